//! The `norm`, `opnorm`, `chi` and `classify` commands and report
//! rendering.

use std::fmt::Write as _;

use serde::Serialize;

use seqspace::chi::{self, ChiEstimate, OpNormReport, Verdict, LIMSUP_INTERPRETATION};
use seqspace::lacunary::GrowthWarning;
use seqspace::norms::{self, NormReport, SUP_INTERPRETATION};
use seqspace::SpaceSpec;

use crate::config::{OutputFormat, Resolved, RunConfig};
use crate::{CliError, Command};

pub struct Context<'a> {
    pub command: Command,
    pub origin: String,
    pub config: &'a RunConfig,
    pub resolved: &'a Resolved,
}

/// Header shared by every report.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: &'static str,
    pub origin: String,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub r: usize,
    /// `config` or `auto` (smallest count covering the data).
    pub r_source: &'static str,
    pub space: SpaceSpec,
    pub warnings: Vec<String>,
}

pub trait Report: Serialize {
    fn meta(&self) -> &Meta;
    fn body(&self, out: &mut String);
}

/// Json is pretty-printed with a trailing newline; floats use the
/// shortest representation that round-trips.
pub fn render<R: Report>(report: &R, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let m = report.meta();
            let _ = writeln!(out, "seqspace {} ({})", m.command, m.origin);
            let _ = writeln!(out, "  seed {}  N {}  R {} ({})", m.seed, m.n, m.r, m.r_source);
            for w in &m.warnings {
                let _ = writeln!(out, "  warning: {w}");
            }
            report.body(&mut out);
            out
        }
    }
}

impl Context<'_> {
    /// Block count: from the config, or the smallest one covering
    /// `max_index`.
    fn blocks(&self, max_index: usize) -> Result<(usize, &'static str), CliError> {
        match self.resolved.analysis.r {
            Some(r) => Ok((r, "config")),
            None => Ok((self.resolved.space.theta.blocks_covering(max_index.max(1))?, "auto")),
        }
    }

    /// `horizon` is the last row index; `usize::MAX` skips the
    /// partial-block warning.
    pub(crate) fn meta(&self, r: usize, r_source: &'static str, horizon: usize) -> Result<Meta, CliError> {
        let theta = &self.resolved.space.theta;
        let mut warnings = Vec::new();
        for w in theta.growth_warnings(r, 1)? {
            warnings.push(match w {
                GrowthWarning::Decreasing { r } => format!("block length decreases at r = {r}"),
                GrowthWarning::Constant { from, to } => {
                    format!("block lengths constant for r = {from}..={to}; h_r is not growing")
                }
            });
        }
        let k_r = theta.k(r)?;
        if k_r > horizon {
            warnings.push(format!("k_R = {k_r} exceeds the horizon {horizon}; the last block is partly past the data"));
        }
        Ok(Meta {
            command: self.command.name(),
            origin: self.origin.clone(),
            seed: self.config.seed,
            n: self.resolved.analysis.n,
            r,
            r_source,
            space: self.resolved.space.clone(),
            warnings,
        })
    }

    /// Largest column index among the effective rows.
    fn row_support(&self) -> Result<usize, CliError> {
        let rows = chi::effective_rows(
            self.resolved.matrix()?,
            &self.resolved.space,
            self.resolved.target.effective_triangle().as_ref(),
            self.resolved.analysis.n,
        )?;
        Ok(rows.iter().map(|r| r.len().saturating_sub(1)).max().unwrap_or(0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormOutput {
    pub meta: Meta,
    pub vector: String,
    pub x: Vec<f64>,
    /// `Λ̄x`.
    pub y: Vec<f64>,
    pub norm: NormReport,
}

pub fn norm(ctx: &Context) -> Result<NormOutput, CliError> {
    let space = &ctx.resolved.space;
    let source = ctx.config.vector.clone().unwrap_or_default();
    let x = source.materialize(&space.lambda)?;
    let (r, r_source) = ctx.blocks(x.len().saturating_sub(1))?;
    let norm = norms::luxemburg_norm(&x, space, r, norms::DEFAULT_TOL)?;
    Ok(NormOutput {
        meta: ctx.meta(r, r_source, usize::MAX)?,
        vector: source.describe(),
        y: space.lambda.apply_lambda_bar(&x)?,
        x,
        norm,
    })
}

impl Report for NormOutput {
    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn body(&self, out: &mut String) {
        let n = &self.norm;
        let _ = writeln!(out, "  vector: {}", self.vector);
        let _ = writeln!(out, "norm {}", n.value);
        if let Some((lo, hi)) = n.rho_bracket {
            let _ = writeln!(out, "  bracket [{lo}, {hi}] after {} bisection steps", n.iterations);
        }
        let _ = writeln!(out, "  modular at value {}", n.modular_at_value);
        let _ = writeln!(out, "  per-block modulars:");
        for (i, v) in n.per_block.iter().enumerate() {
            let _ = writeln!(out, "    [{i}] {v}");
        }
        let _ = writeln!(out, "  interpretation: {}", n.interpretation);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OpNormOutput {
    pub meta: Meta,
    pub matrix: String,
    pub target: String,
    pub opnorm: OpNormReport,
}

pub fn opnorm(ctx: &Context) -> Result<OpNormOutput, CliError> {
    let (r, r_source) = ctx.blocks(ctx.row_support()?)?;
    let matrix = ctx.resolved.matrix()?;
    let report = chi::op_norm(matrix, &ctx.resolved.space, &ctx.resolved.target, &ctx.resolved.analysis(r))?;
    Ok(OpNormOutput {
        meta: ctx.meta(r, r_source, ctx.resolved.analysis.n)?,
        matrix: matrix.describe(),
        target: ctx.resolved.target.label(),
        opnorm: report,
    })
}

impl Report for OpNormOutput {
    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn body(&self, out: &mut String) {
        let o = &self.opnorm;
        let _ = writeln!(out, "  matrix {} -> {}", self.matrix, self.target);
        let _ = writeln!(out, "opnorm {} (attained at n = {}) [{}]", o.value, o.argmax, o.criterion);
        if o.diverging {
            let _ = writeln!(out, "  DIVERGING: sup still growing at the horizon; value is q_N-scale only");
        }
        let _ = writeln!(out, "  l1 companion {}{}", o.l1_value, if o.l1_diverging { " (diverging)" } else { "" });
        let _ = writeln!(out, "  interpretation: {}", o.interpretation);
    }
}

/// Verdict summary shared by `chi` and `classify`.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictSummary {
    pub verdict: Verdict,
    pub criterion: String,
    pub threshold: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiOutput {
    pub meta: Meta,
    pub matrix: String,
    pub estimate: ChiEstimate,
    pub verdict: VerdictSummary,
}

fn classified(ctx: &Context) -> Result<(Meta, String, chi::CompactnessVerdict), CliError> {
    let (r, r_source) = ctx.blocks(ctx.row_support()?)?;
    let matrix = ctx.resolved.matrix()?;
    let v = chi::classify(matrix, &ctx.resolved.space, &ctx.resolved.target, &ctx.resolved.analysis(r))?;
    Ok((ctx.meta(r, r_source, ctx.resolved.analysis.n)?, matrix.describe(), v))
}

fn summary(v: &chi::CompactnessVerdict) -> VerdictSummary {
    VerdictSummary {
        verdict: v.verdict,
        criterion: v.criterion.clone(),
        threshold: v.threshold,
        notes: v.notes.clone(),
    }
}

pub fn chi(ctx: &Context) -> Result<ChiOutput, CliError> {
    let (meta, matrix, v) = classified(ctx)?;
    Ok(ChiOutput {
        meta,
        matrix,
        verdict: summary(&v),
        estimate: v.evidence,
    })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Compact => "compact",
        Verdict::NotCompact => "not-compact",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn write_verdict(out: &mut String, v: &VerdictSummary) {
    let _ = writeln!(out, "verdict {} [{}] (threshold {:e})", verdict_name(v.verdict), v.criterion, v.threshold);
    for n in &v.notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

impl Report for ChiOutput {
    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn body(&self, out: &mut String) {
        let e = &self.estimate;
        let _ = writeln!(out, "  matrix {} -> {} [{}]", self.matrix, e.target, e.estimate_tag);
        let _ = writeln!(out, "chi in [{}, {}]", e.lower, e.upper);
        let _ = writeln!(
            out,
            "  rows {}..={}  converged {}  decaying {}  row scale {:?}",
            e.tail_window.0, e.tail_window.1, e.converged, e.decaying, e.row_scale
        );
        let _ = writeln!(out, "  companion upper (other row scale) {}", e.companion_upper);
        if let Some(l) = &e.column_limits {
            let _ = writeln!(
                out,
                "  column limits: converged {}  sum |alpha_k| {}  stable {}",
                l.all_converged, l.l1, l.l1_stable
            );
        }
        let _ = writeln!(out, "  interpretation: {}; {}", e.interpretation, SUP_INTERPRETATION);
        write_verdict(out, &self.verdict);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOutput {
    pub meta: Meta,
    pub matrix: String,
    pub target: String,
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
    pub decaying: bool,
    pub verdict: VerdictSummary,
    pub interpretation: String,
}

pub fn classify(ctx: &Context) -> Result<ClassifyOutput, CliError> {
    let (meta, matrix, v) = classified(ctx)?;
    let e = &v.evidence;
    Ok(ClassifyOutput {
        meta,
        matrix,
        target: e.target.clone(),
        lower: e.lower,
        upper: e.upper,
        converged: e.converged,
        decaying: e.decaying,
        verdict: summary(&v),
        interpretation: LIMSUP_INTERPRETATION.into(),
    })
}

impl Report for ClassifyOutput {
    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn body(&self, out: &mut String) {
        let _ = writeln!(out, "  matrix {} -> {}", self.matrix, self.target);
        let _ = writeln!(out, "  chi in [{}, {}]  converged {}", self.lower, self.upper, self.converged);
        write_verdict(out, &self.verdict);
    }
}
