//! Operator norms, Hausdorff measure of noncompactness estimates and
//! compactness verdicts for matrix operators.
//!
//! Every quantity is driven by a per-row number `q_n`: the Luxemburg-type
//! value of the effective associated row (or its `ℓ₁` norm, on request).
//! The effective row is `Ā_n`, or `B̄_n = Σ_{m<=n} t_nm Ā_m` when the target
//! is the domain of a triangle `T`. Limits superior over `n` are estimated
//! by the maximum over a trailing window of rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lambda::LambdaSystem;
use crate::matrix::{associated_matrix, column_limits, composed_associated, MatrixSpec};
use crate::norms::{luxemburg_with, Modular, SpaceSpec, SpaceTag, SUP_INTERPRETATION};

pub const DEFAULT_HORIZON: usize = 2048;
pub const DEFAULT_WINDOW: usize = 128;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Reported with every estimate: how the limit superior over rows is read.
pub const LIMSUP_INTERPRETATION: &str = "limsup_n estimated as max over rows N-window..=N";

/// Row functional used for `q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowScale {
    /// Luxemburg-type value under `(M, s, θ)`.
    #[default]
    Orlicz,
    /// Plain `ℓ₁` norm of the row.
    L1,
}

/// Where the target space lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `c₀`, `c` or `ℓ∞` themselves.
    Plain,
    /// Domain of a triangle `T` in the base space.
    Triangle(MatrixSpec),
    /// `cs₀`, `cs`, `bs`: the summation triangle.
    Series,
    /// Domain of the `Λ̄` triangle built from another λ sequence.
    LambdaPrime(LambdaSystem),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub base: SpaceTag,
    pub domain: Domain,
}

impl Target {
    pub fn plain(base: SpaceTag) -> Self {
        Self {
            base,
            domain: Domain::Plain,
        }
    }

    pub fn series(base: SpaceTag) -> Self {
        Self {
            base,
            domain: Domain::Series,
        }
    }

    pub fn triangle(base: SpaceTag, triangle: MatrixSpec) -> Self {
        Self {
            base,
            domain: Domain::Triangle(triangle),
        }
    }

    pub fn lambda_prime(base: SpaceTag, lambda: LambdaSystem) -> Self {
        Self {
            base,
            domain: Domain::LambdaPrime(lambda),
        }
    }

    /// The triangle applied to `Ā`, if any.
    pub fn effective_triangle(&self) -> Option<MatrixSpec> {
        match &self.domain {
            Domain::Plain => None,
            Domain::Triangle(t) => Some(t.clone()),
            Domain::Series => Some(MatrixSpec::summation()),
            Domain::LambdaPrime(l) => Some(MatrixSpec::lambda_prime(l.clone())),
        }
    }

    pub fn label(&self) -> String {
        let base = match self.base {
            SpaceTag::C0 => "c0",
            SpaceTag::C => "c",
            SpaceTag::Linf => "linf",
        };
        match &self.domain {
            Domain::Plain => base.to_string(),
            Domain::Triangle(_) => format!("{base}_T"),
            Domain::Series => match self.base {
                SpaceTag::C0 => "cs0".into(),
                SpaceTag::C => "cs".into(),
                SpaceTag::Linf => "bs".into(),
            },
            Domain::LambdaPrime(_) => format!("{base}^lambda'"),
        }
    }

    /// Compactness is equivalent to a vanishing limit for `c₀`- and
    /// `c`-like targets; for `ℓ∞`-like targets it is only sufficient.
    pub fn is_iff(&self) -> bool {
        self.base != SpaceTag::Linf
    }

    fn item(&self) -> usize {
        match self.base {
            SpaceTag::C0 => 0,
            SpaceTag::C => 1,
            SpaceTag::Linf => 2,
        }
    }

    /// Citation tag of the compactness criterion.
    pub fn criterion(&self) -> String {
        let i = self.item();
        match &self.domain {
            Domain::Plain => format!("Cor 4.3({})", ["a", "b", "c"][i]),
            Domain::Triangle(_) => format!("Thm 5.4({})", i + 1),
            Domain::Series => format!("Cor 5.9({})", i + 1),
            Domain::LambdaPrime(_) => format!("Thm 5.4({}) via Particular Case 5.5", i + 1),
        }
    }

    /// Citation tag of the estimate formula.
    pub fn estimate_tag(&self) -> String {
        let i = self.item();
        match &self.domain {
            Domain::Plain => format!("Thm 4.2({})", ["a", "b", "c"][i]),
            _ => self.criterion(),
        }
    }

    /// Citation tag of the operator norm identity.
    pub fn norm_tag(&self) -> &'static str {
        match &self.domain {
            Domain::Plain => "Lemma 3.3",
            Domain::Triangle(_) => "Thm 5.2",
            Domain::Series => "Cor 5.7",
            Domain::LambdaPrime(_) => "Particular Case 5.5",
        }
    }

    /// Citation tag of the unconditional result for `ℓ∞` sources.
    pub fn bounded_source_tag(&self) -> &'static str {
        match &self.domain {
            Domain::Plain | Domain::Triangle(_) => "Thm 5.3",
            Domain::Series => "Cor 5.8",
            Domain::LambdaPrime(_) => "Particular Case 5.6",
        }
    }
}

/// Truncation and decision parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    /// Last row index `N`.
    pub horizon: usize,
    /// Number of lacunary blocks `R`.
    pub blocks: usize,
    pub window: usize,
    pub tol: f64,
    pub threshold: f64,
    pub row_scale: RowScale,
}

impl Analysis {
    pub fn new(horizon: usize, blocks: usize) -> Self {
        Self {
            horizon,
            blocks,
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
            threshold: DEFAULT_THRESHOLD,
            row_scale: RowScale::Orlicz,
        }
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_row_scale(mut self, row_scale: RowScale) -> Self {
        self.row_scale = row_scale;
        self
    }

    fn check(&self, windows: usize) -> Result<()> {
        if self.window < 2 {
            return Err(invalid("window", format!("must be >= 2, got {}", self.window)));
        }
        if self.horizon < windows * self.window {
            return Err(invalid(
                "N",
                format!(
                    "horizon {} must be at least {windows} x window ({})",
                    self.horizon, self.window
                ),
            ));
        }
        if !(self.tol > 0.0) || !(self.threshold > 0.0) {
            return Err(invalid("tol", "tol and threshold must be > 0"));
        }
        Ok(())
    }
}

/// Rows `0..=n` of `Ā` or, with a triangle, of `B̄ = TĀ`.
pub fn effective_rows(
    matrix: &MatrixSpec,
    space: &SpaceSpec,
    triangle: Option<&MatrixSpec>,
    n: usize,
) -> Result<Vec<Vec<f64>>> {
    let assoc = associated_matrix(&space.lambda, matrix);
    match triangle {
        None => assoc.rows(n),
        Some(t) => composed_associated(t, &assoc)?.rows(n),
    }
}

/// Luxemburg-type value of an associated row under `(M, s, θ)`.
pub fn row_functional(row: &[f64], space: &SpaceSpec, blocks: usize, tol: f64) -> Result<f64> {
    let m = Modular::new(space, blocks)?;
    Ok(luxemburg_with(&m, row, blocks, tol)?.value)
}

fn row_values(rows: &[Vec<f64>], space: &SpaceSpec, blocks: usize, tol: f64, scale: RowScale) -> Result<Vec<f64>> {
    match scale {
        RowScale::L1 => Ok(rows.iter().map(|r| r.iter().map(|v| v.abs()).sum()).collect()),
        RowScale::Orlicz => {
            let m = Modular::new(space, blocks)?;
            rows.par_iter()
                .map(|row| luxemburg_with(&m, row, blocks, tol).map(|r| r.value))
                .collect()
        }
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNormReport {
    /// `sup_{n<=N} q_n` under the Orlicz-lacunary functional.
    pub value: f64,
    pub argmax: usize,
    pub per_n: Vec<f64>,
    /// The supremum is still growing in the last window of rows.
    pub diverging: bool,
    /// Companion `sup_n ‖Ā_n‖₁`.
    pub l1_value: f64,
    pub l1_per_n: Vec<f64>,
    pub l1_diverging: bool,
    pub criterion: String,
    pub interpretation: String,
}

fn growing(values: &[f64], window: usize, tol: f64) -> bool {
    let split = values.len() - window - 1;
    let before = max_of(&values[..split]);
    let tail = max_of(&values[split..]);
    tail > before + tol * (1.0 + before)
}

/// `sup_{n<=N} q_n`, reported under both row functionals.
pub fn op_norm(
    matrix: &MatrixSpec,
    space: &SpaceSpec,
    target: &Target,
    analysis: &Analysis,
) -> Result<OpNormReport> {
    analysis.check(1)?;
    let triangle = target.effective_triangle();
    let rows = effective_rows(matrix, space, triangle.as_ref(), analysis.horizon)?;
    let per_n = row_values(&rows, space, analysis.blocks, analysis.tol, RowScale::Orlicz)?;
    let l1_per_n = row_values(&rows, space, analysis.blocks, analysis.tol, RowScale::L1)?;
    let (argmax, value) = per_n
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (n, v)| if v > best.1 { (n, v) } else { best });
    Ok(OpNormReport {
        value,
        argmax,
        diverging: growing(&per_n, analysis.window, analysis.tol),
        l1_value: max_of(&l1_per_n),
        l1_diverging: growing(&l1_per_n, analysis.window, analysis.tol),
        per_n,
        l1_per_n,
        criterion: target.norm_tag().into(),
        interpretation: SUP_INTERPRETATION.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSummary {
    /// Estimated `ᾱ_k`.
    pub values: Vec<f64>,
    pub all_converged: bool,
    pub unconverged_columns: usize,
    /// `Σ_k |ᾱ_k|` over the horizon.
    pub l1: f64,
    /// Mass of the columns past `N/2` is below `tol`; a proxy for
    /// `ᾱ ∈ ℓ₁`.
    pub l1_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Row quantities for `n = 0..=N` (after subtracting `ᾱ` on `c`-like
    /// targets).
    pub per_n: Vec<f64>,
    /// Inclusive row range used for the limsup estimate.
    pub tail_window: (usize, usize),
    /// Tail-window max agrees with the previous window's max within tol.
    pub converged: bool,
    /// Tail-window max is clearly below the max over the second half of
    /// the horizon, i.e. the row quantities are still decreasing.
    pub decaying: bool,
    pub target: String,
    pub estimate_tag: String,
    pub row_scale: RowScale,
    /// Upper bound under the other row functional.
    pub companion_upper: f64,
    pub column_limits: Option<LimitSummary>,
    pub interpretation: String,
}

/// Estimates `‖L_A‖_χ` for `A` from the space described by `space` into
/// `target`.
pub fn chi_estimate(
    matrix: &MatrixSpec,
    space: &SpaceSpec,
    target: &Target,
    analysis: &Analysis,
) -> Result<ChiEstimate> {
    analysis.check(2)?;
    let n = analysis.horizon;
    let w = analysis.window;
    let triangle = target.effective_triangle();
    let mut rows = effective_rows(matrix, space, triangle.as_ref(), n)?;

    let mut limits = None;
    if target.base == SpaceTag::C {
        let lim = column_limits(&rows, w, analysis.tol)?;
        for row in rows.iter_mut() {
            if row.len() < lim.values.len() {
                row.resize(lim.values.len(), 0.0);
            }
            for (v, a) in row.iter_mut().zip(&lim.values) {
                *v -= a;
            }
        }
        let l1: f64 = lim.values.iter().map(|v| v.abs()).sum();
        let half: f64 = lim.values.iter().skip(n / 2).map(|v| v.abs()).sum();
        limits = Some(LimitSummary {
            all_converged: lim.all_converged(),
            unconverged_columns: lim.converged.iter().filter(|c| !**c).count(),
            l1,
            l1_stable: half <= analysis.tol * (1.0 + l1),
            values: lim.values,
        });
    }

    let other = match analysis.row_scale {
        RowScale::Orlicz => RowScale::L1,
        RowScale::L1 => RowScale::Orlicz,
    };
    let per_n = row_values(&rows, space, analysis.blocks, analysis.tol, analysis.row_scale)?;
    let companion = row_values(&rows, space, analysis.blocks, analysis.tol, other)?;

    let tail = max_of(&per_n[n - w..=n]);
    let previous = max_of(&per_n[n - 2 * w..n - w]);
    let second_half = max_of(&per_n[n / 2..=n]);
    let converged = (tail - previous).abs() <= analysis.tol * (1.0 + tail.abs());
    let decaying = tail < second_half - analysis.tol * (1.0 + second_half);

    let (lower, upper) = match target.base {
        SpaceTag::C0 => (tail, tail),
        SpaceTag::C => (tail / 2.0, tail),
        SpaceTag::Linf => (0.0, tail),
    };

    Ok(ChiEstimate {
        lower,
        upper,
        per_n,
        tail_window: (n - w, n),
        converged,
        decaying,
        target: target.label(),
        estimate_tag: target.estimate_tag(),
        row_scale: analysis.row_scale,
        companion_upper: max_of(&companion[n - w..=n]),
        column_limits: limits,
        interpretation: LIMSUP_INTERPRETATION.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Compact,
    NotCompact,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessVerdict {
    pub verdict: Verdict,
    pub criterion: String,
    pub threshold: f64,
    pub source: SpaceTag,
    pub notes: Vec<String>,
    pub evidence: ChiEstimate,
}

/// Compactness verdict for `L_A`.
///
/// An `ℓ∞` source with a `c₀`- or `c`-like target is compact without
/// further conditions; the estimate is still computed and attached.
pub fn classify(
    matrix: &MatrixSpec,
    space: &SpaceSpec,
    target: &Target,
    analysis: &Analysis,
) -> Result<CompactnessVerdict> {
    let evidence = chi_estimate(matrix, space, target, analysis)?;
    let threshold = analysis.threshold;
    let mut notes = Vec::new();
    if space.space == SpaceTag::C {
        notes.push("source c^lambda: extrapolated per Thm 4.2 statement".to_string());
    }
    let limits_ok = evidence.column_limits.as_ref().map_or(true, |l| l.all_converged);
    if let Some(l) = &evidence.column_limits {
        if !l.all_converged {
            notes.push(format!("{} column limits did not converge", l.unconverged_columns));
        }
        if !l.l1_stable {
            notes.push("partial sums of |alpha_k| have not stabilized".into());
        }
    }

    let (verdict, criterion) = if space.space == SpaceTag::Linf && target.base != SpaceTag::Linf {
        notes.push("compact for every operator of this class; estimate attached as corroboration".into());
        (Verdict::Compact, target.bounded_source_tag().to_string())
    } else if evidence.upper < threshold && limits_ok {
        (Verdict::Compact, target.criterion())
    } else if target.is_iff()
        && evidence.lower > threshold
        && evidence.converged
        && !evidence.decaying
        && limits_ok
    {
        (Verdict::NotCompact, target.criterion())
    } else {
        if !evidence.converged {
            notes.push("tail windows disagree; limsup estimate not converged".into());
        }
        if evidence.decaying {
            notes.push("row quantities still decreasing at the horizon".into());
        }
        if !target.is_iff() && evidence.upper >= threshold {
            notes.push("criterion is sufficient only; a nonzero bound decides nothing".into());
        }
        (Verdict::Inconclusive, target.criterion())
    };

    Ok(CompactnessVerdict {
        verdict,
        criterion,
        threshold,
        source: space.space,
        notes,
        evidence,
    })
}
