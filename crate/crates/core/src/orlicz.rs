//! Orlicz functions: continuous, nondecreasing, convex gauges with `M(0) = 0`.
//!
//! Five families are built in. Parameters are checked at construction;
//! the analytic properties (monotonicity, convexity, growth) are checked
//! numerically by [`OrliczFunction::validate`], which reports failures
//! instead of rejecting the function. The table family in particular can
//! describe non-convex knots, and validation is how that is surfaced.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default probe bound for the growth check.
pub const DEFAULT_T_MAX: f64 = 1e8;

/// Relative slack of the midpoint convexity test.
const CONVEXITY_SLACK: f64 = 1e-12;

/// Ratio between the smallest and the largest point of the validation grid.
const GRID_SPAN: f64 = 1e-12;

/// Config-level description of an Orlicz function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum OrliczFamily {
    /// `M(t) = t`
    Identity,
    /// `M(t) = t^p`, `p >= 1`
    Power { p: f64 },
    /// `M(t) = t^p ln(1 + t)`, `p >= 1`
    PowerLog { p: f64 },
    /// `M(t) = e^t - 1`
    ExpMinusOne,
    /// Piecewise-linear interpolation of `(t, M(t))` knots, extrapolated
    /// linearly past the last knot.
    Table { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "OrliczFamily")]
pub struct OrliczFunction {
    family: OrliczFamily,
}

impl From<OrliczFunction> for OrliczFamily {
    fn from(m: OrliczFunction) -> Self {
        m.family
    }
}

impl OrliczFunction {
    pub fn new(family: OrliczFamily) -> Result<Self> {
        match &family {
            OrliczFamily::Identity | OrliczFamily::ExpMinusOne => {}
            OrliczFamily::Power { p } | OrliczFamily::PowerLog { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(invalid("p", format!("must be a finite real >= 1, got {p}")));
                }
            }
            OrliczFamily::Table { knots } => {
                if knots.len() < 2 {
                    return Err(invalid("knots", "a table needs at least two knots"));
                }
                if knots[0].0 != 0.0 {
                    return Err(invalid("knots", "the first knot must sit at t = 0"));
                }
                for (i, pair) in knots.windows(2).enumerate() {
                    let (t0, _) = pair[0];
                    let (t1, _) = pair[1];
                    if !(t1 > t0) {
                        return Err(invalid(
                            "knots",
                            format!("abscissae must be strictly increasing (knot {})", i + 1),
                        ));
                    }
                }
                if knots.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(invalid("knots", "knots must be finite"));
                }
            }
        }
        Ok(Self { family })
    }

    pub fn identity() -> Self {
        Self {
            family: OrliczFamily::Identity,
        }
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(OrliczFamily::Power { p })
    }

    pub fn power_log(p: f64) -> Result<Self> {
        Self::new(OrliczFamily::PowerLog { p })
    }

    pub fn exp_minus_one() -> Self {
        Self {
            family: OrliczFamily::ExpMinusOne,
        }
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(OrliczFamily::Table { knots })
    }

    pub fn family(&self) -> &OrliczFamily {
        &self.family
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.family, OrliczFamily::Identity)
    }

    /// Evaluates `M(t)` for `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!(
                "Orlicz function evaluated at {t}; argument must be >= 0"
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluation without the sign check; `t` must be nonnegative.
    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        if t == 0.0 {
            return match &self.family {
                OrliczFamily::Table { knots } => knots[0].1,
                _ => 0.0,
            };
        }
        match &self.family {
            OrliczFamily::Identity => t,
            OrliczFamily::Power { p } => t.powf(*p),
            OrliczFamily::PowerLog { p } => t.powf(*p) * t.ln_1p(),
            OrliczFamily::ExpMinusOne => t.exp_m1(),
            OrliczFamily::Table { knots } => table_eval(knots, t),
        }
    }

    /// Checks the defining properties on a geometric grid over `(0, t_max]`
    /// plus the origin.
    pub fn validate(&self, grid_size: usize, t_max: f64) -> Result<ValidationReport> {
        if grid_size < 3 {
            return Err(invalid("grid_size", format!("must be >= 3, got {grid_size}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(invalid("t_max", format!("must be a positive finite real, got {t_max}")));
        }
        let grid = validation_grid(grid_size, t_max);
        let values: Vec<f64> = grid.iter().map(|&t| self.eval_unchecked(t)).collect();

        let m0 = values[0];
        let zero = Check {
            kind: CheckKind::ZeroAtOrigin,
            passed: m0 == 0.0,
            worst_pair: (m0 != 0.0).then_some((0.0, 0.0)),
            violation: m0.abs(),
        };

        let mut monotone = Check::passing(CheckKind::Nondecreasing);
        for i in 0..grid.len() - 1 {
            let drop = values[i] - values[i + 1];
            if drop > 0.0 {
                monotone.record(drop, (grid[i], grid[i + 1]));
            }
        }

        let mut convex = Check::passing(CheckKind::MidpointConvex);
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let (a, b) = (values[i], values[j]);
                let mid = self.eval_unchecked(0.5 * (grid[i] + grid[j]));
                let bound = 0.5 * (a + b) + CONVEXITY_SLACK * (1.0 + a.abs() + b.abs());
                if mid > bound {
                    convex.record(mid - bound, (grid[i], grid[j]));
                }
            }
        }

        let top = *values.last().expect("grid is nonempty");
        let growth = Check {
            kind: CheckKind::ReachesOne,
            passed: top >= 1.0,
            worst_pair: (top < 1.0).then_some((t_max, t_max)),
            violation: (1.0 - top).max(0.0),
        };

        Ok(ValidationReport {
            grid_size,
            t_max,
            checks: vec![zero, monotone, convex, growth],
        })
    }
}

fn table_eval(knots: &[(f64, f64)], t: f64) -> f64 {
    // index of the first knot with abscissa > t
    let idx = knots.partition_point(|&(x, _)| x <= t);
    let seg = idx.clamp(1, knots.len() - 1);
    let (t0, v0) = knots[seg - 1];
    let (t1, v1) = knots[seg];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn validation_grid(grid_size: usize, t_max: f64) -> Vec<f64> {
    let t_min = t_max * GRID_SPAN;
    let steps = (grid_size - 1) as f64;
    let ratio = (t_max / t_min).ln() / steps;
    let mut grid = Vec::with_capacity(grid_size + 1);
    grid.push(0.0);
    for i in 0..grid_size - 1 {
        grid.push(t_min * (ratio * i as f64).exp());
    }
    grid.push(t_max);
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    ZeroAtOrigin,
    Nondecreasing,
    MidpointConvex,
    /// `M(t_max) >= 1`, so the unit level of every modular is reachable.
    ReachesOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub kind: CheckKind,
    pub passed: bool,
    /// Grid pair `(t1, t2)` with the largest violation, if any.
    pub worst_pair: Option<(f64, f64)>,
    pub violation: f64,
}

impl Check {
    fn passing(kind: CheckKind) -> Self {
        Self {
            kind,
            passed: true,
            worst_pair: None,
            violation: 0.0,
        }
    }

    fn record(&mut self, violation: f64, pair: (f64, f64)) {
        self.passed = false;
        if violation > self.violation || self.worst_pair.is_none() {
            self.violation = violation;
            self.worst_pair = Some(pair);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub grid_size: usize,
    pub t_max: f64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, kind: CheckKind) -> &Check {
        self.checks
            .iter()
            .find(|c| c.kind == kind)
            .expect("every check kind is reported")
    }
}
