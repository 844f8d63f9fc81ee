//! Row-finite infinite matrices, their associated matrices `Ā`, and
//! composition with triangles.
//!
//! Every matrix is evaluated row by row on a finite horizon `0..=n_max`.
//! Rows are dense vectors whose length is the row support `K(n) + 1`;
//! entries past the end are zero. A row of the associated matrix is the
//! dual transform of the source row, so row-finiteness is preserved.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lambda::{LambdaRule, LambdaSystem};

/// Config-level matrix families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MatrixFamily {
    Identity,
    /// `a_nn = scale (n + 1)^(-decay)`
    Diagonal { scale: f64, decay: f64 },
    /// `a_nn = diag`, `a_{n,n-1} = sub`
    Bidiagonal { diag: f64, sub: f64 },
    /// Cesàro means, `a_nk = 1/(n+1)` for `k <= n`.
    Cesaro,
    /// `a_nk = 1` for `k <= n`.
    Summation,
    /// The weighted difference triangle built from another λ sequence.
    LambdaPrime { lambda: LambdaRule },
    /// Listed rows; every later row is zero.
    FiniteRank { rows: Vec<Vec<f64>> },
    /// Listed rows; asking for a row past the list is an error.
    Explicit { rows: Vec<Vec<f64>> },
    /// The same row for every `n`.
    ConstantRow { row: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Triangle,
    RowFinite,
    /// The rows are already the associated matrix `Ā`.
    DirectAssociated,
}

/// Config fragment: a family plus an optional `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixConfig {
    #[serde(flatten)]
    pub family: MatrixFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MatrixKind>,
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Identity,
    Diagonal { scale: f64, decay: f64 },
    Bidiagonal { diag: f64, sub: f64 },
    Cesaro,
    Summation,
    LambdaPrime(LambdaSystem),
    FiniteRank(Vec<Vec<f64>>),
    Explicit(Vec<Vec<f64>>),
    ConstantRow(Vec<f64>),
    Composed {
        triangle: Box<MatrixSpec>,
        base: Box<MatrixSpec>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpec {
    source: Source,
    direct_associated: bool,
}

impl MatrixSpec {
    pub fn new(family: MatrixFamily) -> Result<Self> {
        let source = match family {
            MatrixFamily::Identity => Source::Identity,
            MatrixFamily::Diagonal { scale, decay } => {
                if !scale.is_finite() || !decay.is_finite() {
                    return Err(invalid("matrix.diagonal", "scale and decay must be finite"));
                }
                Source::Diagonal { scale, decay }
            }
            MatrixFamily::Bidiagonal { diag, sub } => {
                if !diag.is_finite() || !sub.is_finite() {
                    return Err(invalid("matrix.bidiagonal", "entries must be finite"));
                }
                Source::Bidiagonal { diag, sub }
            }
            MatrixFamily::Cesaro => Source::Cesaro,
            MatrixFamily::Summation => Source::Summation,
            MatrixFamily::LambdaPrime { lambda } => Source::LambdaPrime(LambdaSystem::new(lambda)?),
            MatrixFamily::FiniteRank { rows } => Source::FiniteRank(check_rows(rows)?),
            MatrixFamily::Explicit { rows } => Source::Explicit(check_rows(rows)?),
            MatrixFamily::ConstantRow { row } => {
                Source::ConstantRow(check_rows(vec![row])?.pop().expect("one row"))
            }
        };
        Ok(Self {
            source,
            direct_associated: false,
        })
    }

    pub fn from_config(config: MatrixConfig) -> Result<Self> {
        let spec = Self::new(config.family)?;
        match config.kind {
            Some(MatrixKind::DirectAssociated) => Ok(spec.into_associated()),
            Some(MatrixKind::Triangle) if !spec.is_triangle() => Err(Error::NotTriangle(
                "matrix declared as a triangle has a zero diagonal or entries above it".into(),
            )),
            _ => Ok(spec),
        }
    }

    pub fn identity() -> Self {
        Self::plain(Source::Identity)
    }

    pub fn cesaro() -> Self {
        Self::plain(Source::Cesaro)
    }

    pub fn summation() -> Self {
        Self::plain(Source::Summation)
    }

    pub fn diagonal(scale: f64, decay: f64) -> Result<Self> {
        Self::new(MatrixFamily::Diagonal { scale, decay })
    }

    pub fn bidiagonal(diag: f64, sub: f64) -> Result<Self> {
        Self::new(MatrixFamily::Bidiagonal { diag, sub })
    }

    pub fn lambda_prime(lambda: LambdaSystem) -> Self {
        Self::plain(Source::LambdaPrime(lambda))
    }

    pub fn finite_rank(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(MatrixFamily::FiniteRank { rows })
    }

    pub fn explicit(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(MatrixFamily::Explicit { rows })
    }

    pub fn constant_row(row: Vec<f64>) -> Result<Self> {
        Self::new(MatrixFamily::ConstantRow { row })
    }

    fn plain(source: Source) -> Self {
        Self {
            source,
            direct_associated: false,
        }
    }

    /// Marks the rows as already being `Ā`.
    pub fn into_associated(mut self) -> Self {
        self.direct_associated = true;
        self
    }

    pub fn is_direct_associated(&self) -> bool {
        self.direct_associated
    }

    /// Lower triangular with a nonzero diagonal. For explicit rows only the
    /// listed rows are inspected.
    pub fn is_triangle(&self) -> bool {
        match &self.source {
            Source::Identity | Source::Cesaro | Source::Summation | Source::LambdaPrime(_) => true,
            Source::Diagonal { scale, .. } => *scale != 0.0,
            Source::Bidiagonal { diag, .. } => *diag != 0.0,
            Source::Explicit(rows) => rows
                .iter()
                .enumerate()
                .all(|(n, row)| row.len() <= n + 1 && row.get(n).is_some_and(|&v| v != 0.0)),
            Source::FiniteRank(_) | Source::ConstantRow(_) => false,
            Source::Composed { triangle, base } => triangle.is_triangle() && base.is_triangle(),
        }
    }

    pub fn kind(&self) -> MatrixKind {
        if self.direct_associated {
            MatrixKind::DirectAssociated
        } else if self.is_triangle() {
            MatrixKind::Triangle
        } else {
            MatrixKind::RowFinite
        }
    }

    /// Short human-readable name.
    pub fn describe(&self) -> String {
        let base = match &self.source {
            Source::Identity => "identity".to_string(),
            Source::Diagonal { scale, decay } => format!("diagonal({scale}, decay {decay})"),
            Source::Bidiagonal { diag, sub } => format!("bidiagonal({diag}, {sub})"),
            Source::Cesaro => "cesaro".into(),
            Source::Summation => "summation".into(),
            Source::LambdaPrime(_) => "lambda-prime".into(),
            Source::FiniteRank(rows) => format!("finite-rank({} rows)", rows.len()),
            Source::Explicit(rows) => format!("explicit({} rows)", rows.len()),
            Source::ConstantRow(_) => "constant-row".into(),
            Source::Composed { triangle, base } => {
                format!("{} * {}", triangle.describe(), base.describe())
            }
        };
        if self.direct_associated {
            format!("{base} [associated]")
        } else {
            base
        }
    }

    /// Entry `(n, k)`.
    pub fn entry(&self, n: usize, k: usize) -> Result<f64> {
        Ok(self.row(n)?.get(k).copied().unwrap_or(0.0))
    }

    /// Row `n`, dense up to its support.
    pub fn row(&self, n: usize) -> Result<Vec<f64>> {
        match &self.source {
            Source::Identity => Ok(unit(n, 1.0)),
            Source::Diagonal { scale, decay } => Ok(unit(n, diagonal_value(*scale, *decay, n))),
            Source::Bidiagonal { diag, sub } => {
                let mut row = unit(n, *diag);
                if n > 0 {
                    row[n - 1] = *sub;
                }
                Ok(row)
            }
            Source::Cesaro => Ok(vec![1.0 / (n + 1) as f64; n + 1]),
            Source::Summation => Ok(vec![1.0; n + 1]),
            Source::LambdaPrime(lambda) => lambda.lambda_bar_row(n),
            Source::FiniteRank(rows) => Ok(rows.get(n).cloned().unwrap_or_default()),
            Source::Explicit(rows) => rows.get(n).cloned().ok_or(Error::OutOfHorizon {
                what: "matrix row",
                index: n,
                len: rows.len(),
            }),
            Source::ConstantRow(row) => Ok(row.clone()),
            Source::Composed { .. } => Ok(self.rows(n)?.pop().expect("n_max + 1 rows")),
        }
    }

    /// Rows `0..=n_max`.
    pub fn rows(&self, n_max: usize) -> Result<Vec<Vec<f64>>> {
        match &self.source {
            Source::Composed { triangle, base } => combine(triangle, &base.rows(n_max)?),
            _ => (0..=n_max).map(|n| self.row(n)).collect(),
        }
    }
}

fn check_rows(rows: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("matrix.rows", "entries must be finite"));
    }
    Ok(rows)
}

fn unit(n: usize, value: f64) -> Vec<f64> {
    let mut row = vec![0.0; n + 1];
    row[n] = value;
    row
}

fn diagonal_value(scale: f64, decay: f64, n: usize) -> f64 {
    scale * ((n + 1) as f64).powf(-decay)
}

/// `acc += alpha * v`, growing `acc` as needed.
fn axpy(acc: &mut Vec<f64>, alpha: f64, v: &[f64]) {
    if acc.len() < v.len() {
        acc.resize(v.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(v) {
        *a += alpha * b;
    }
}

/// `out_n = Σ_{m<=n} t_nm rows_m` for every `n < rows.len()`.
///
/// The named triangles use recurrences (running sums, the difference
/// recurrence of `Λ̄`) instead of the quadratic direct sum.
pub fn combine(triangle: &MatrixSpec, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if !triangle.is_triangle() {
        return Err(Error::NotTriangle(triangle.describe()));
    }
    let mut out = Vec::with_capacity(rows.len());
    match &triangle.source {
        Source::Identity => out.extend(rows.iter().cloned()),
        Source::Diagonal { scale, decay } => {
            for (n, row) in rows.iter().enumerate() {
                let d = diagonal_value(*scale, *decay, n);
                out.push(row.iter().map(|v| d * v).collect());
            }
        }
        Source::Bidiagonal { diag, sub } => {
            for (n, row) in rows.iter().enumerate() {
                let mut acc: Vec<f64> = row.iter().map(|v| diag * v).collect();
                if n > 0 {
                    axpy(&mut acc, *sub, &rows[n - 1]);
                }
                out.push(acc);
            }
        }
        Source::Summation | Source::Cesaro => {
            let cesaro = matches!(triangle.source, Source::Cesaro);
            let mut running: Vec<f64> = Vec::new();
            for (n, row) in rows.iter().enumerate() {
                axpy(&mut running, 1.0, row);
                if cesaro {
                    let w = 1.0 / (n + 1) as f64;
                    out.push(running.iter().map(|v| v * w).collect());
                } else {
                    out.push(running.clone());
                }
            }
        }
        Source::LambdaPrime(lambda) => {
            // λ'_n out_n = Σ_{m<=n} d'_m (rows_m - rows_{m-1})
            let lam = lambda.values(rows.len())?;
            let mut running: Vec<f64> = Vec::new();
            let mut prev_lam = 0.0;
            for (n, row) in rows.iter().enumerate() {
                let d = lam[n] - prev_lam;
                axpy(&mut running, d, row);
                if n > 0 {
                    axpy(&mut running, -d, &rows[n - 1]);
                }
                out.push(running.iter().map(|v| v / lam[n]).collect());
                prev_lam = lam[n];
            }
        }
        _ => {
            let t_rows = triangle.rows(rows.len().saturating_sub(1))?;
            for t_row in &t_rows {
                let mut acc = Vec::new();
                for (m, &t) in t_row.iter().enumerate() {
                    if t != 0.0 {
                        axpy(&mut acc, t, &rows[m]);
                    }
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// `B = TA`.
pub fn compose(triangle: &MatrixSpec, matrix: &MatrixSpec) -> Result<MatrixSpec> {
    if !triangle.is_triangle() {
        return Err(Error::NotTriangle(triangle.describe()));
    }
    Ok(MatrixSpec {
        source: Source::Composed {
            triangle: Box::new(triangle.clone()),
            base: Box::new(matrix.clone()),
        },
        direct_associated: matrix.direct_associated,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum AssociatedSource {
    Transformed {
        matrix: MatrixSpec,
        lambda: LambdaSystem,
    },
    Direct(MatrixSpec),
    Composed {
        triangle: MatrixSpec,
        base: Box<AssociatedMatrix>,
    },
}

/// The associated matrix `Ā` of a row-finite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedMatrix {
    source: AssociatedSource,
}

/// `Ā` of `A` under `λ`; direct-associated input is passed through.
pub fn associated_matrix(lambda: &LambdaSystem, matrix: &MatrixSpec) -> AssociatedMatrix {
    let source = if matrix.direct_associated {
        AssociatedSource::Direct(matrix.clone())
    } else {
        AssociatedSource::Transformed {
            matrix: matrix.clone(),
            lambda: lambda.clone(),
        }
    };
    AssociatedMatrix { source }
}

/// `B̄_n = Σ_{m<=n} t_nm Ā_m`.
pub fn composed_associated(triangle: &MatrixSpec, assoc: &AssociatedMatrix) -> Result<AssociatedMatrix> {
    if !triangle.is_triangle() {
        return Err(Error::NotTriangle(triangle.describe()));
    }
    Ok(AssociatedMatrix {
        source: AssociatedSource::Composed {
            triangle: triangle.clone(),
            base: Box::new(assoc.clone()),
        },
    })
}

impl AssociatedMatrix {
    /// Rows `0..=n_max` of `Ā`. Rows of a transformed matrix are
    /// independent and computed in parallel.
    pub fn rows(&self, n_max: usize) -> Result<Vec<Vec<f64>>> {
        match &self.source {
            AssociatedSource::Direct(matrix) => matrix.rows(n_max),
            AssociatedSource::Transformed { matrix, lambda } => {
                let rows = matrix.rows(n_max)?;
                rows.par_iter().map(|row| lambda.associated_dual(row)).collect()
            }
            AssociatedSource::Composed { triangle, base } => combine(triangle, &base.rows(n_max)?),
        }
    }

    pub fn row(&self, n: usize) -> Result<Vec<f64>> {
        match &self.source {
            AssociatedSource::Direct(matrix) => matrix.row(n),
            AssociatedSource::Transformed { matrix, lambda } => lambda.associated_dual(&matrix.row(n)?),
            AssociatedSource::Composed { .. } => Ok(self.rows(n)?.pop().expect("n + 1 rows")),
        }
    }

    pub fn describe(&self) -> String {
        match &self.source {
            AssociatedSource::Direct(m) => format!("direct {}", m.describe()),
            AssociatedSource::Transformed { matrix, .. } => format!("associated of {}", matrix.describe()),
            AssociatedSource::Composed { triangle, base } => {
                format!("{} * ({})", triangle.describe(), base.describe())
            }
        }
    }
}

/// Per-column limit estimates of a row sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnLimits {
    /// Estimate of `lim_n rows[n][k]`: the value at the last row.
    pub values: Vec<f64>,
    /// Oscillation `max - min` of column `k` over the tail window.
    pub oscillation: Vec<f64>,
    pub converged: Vec<bool>,
}

impl ColumnLimits {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// Estimates column limits of `rows[0..=N]` from the rows `N - window..=N`.
/// A column is flagged converged when its oscillation over that window is
/// below `eps`.
pub fn column_limits(rows: &[Vec<f64>], window: usize, eps: f64) -> Result<ColumnLimits> {
    if window < 2 {
        return Err(invalid("window", format!("must be >= 2, got {window}")));
    }
    let n = rows.len().checked_sub(1).ok_or_else(|| invalid("rows", "no rows"))?;
    if n <= window {
        return Err(invalid("window", format!("horizon N = {n} must exceed window = {window}")));
    }
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let tail = &rows[n - window..=n];
    let mut values = Vec::with_capacity(width);
    let mut oscillation = Vec::with_capacity(width);
    let mut converged = Vec::with_capacity(width);
    for k in 0..width {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in tail {
            let v = row.get(k).copied().unwrap_or(0.0);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        values.push(rows[n].get(k).copied().unwrap_or(0.0));
        oscillation.push(hi - lo);
        converged.push(hi - lo < eps);
    }
    Ok(ColumnLimits {
        values,
        oscillation,
        converged,
    })
}
