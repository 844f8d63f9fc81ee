//! Block modulars, the Luxemburg-type space norm, the classical block
//! norm, and the `ℓ₁` dual norm of the dual transform.
//!
//! The modular is read as a supremum over blocks:
//!
//! ```text
//! m(u, ρ) = max_{r <= R} (1/h_r) Σ_{k ∈ J_r} M(|u_k| / ρ)^{s_k}
//! ```
//!
//! A limit over `r` of block averages ignores any finite set of blocks and
//! does not give a norm, so the supremum is used and every report carries
//! [`SUP_INTERPRETATION`] together with the individual block values.

use serde::{Deserialize, Serialize};

use crate::bisect::{infimum_feasible, MAX_ITERATIONS};
use crate::error::{invalid, Error, Result};
use crate::lacunary::{Block, LacunarySequence};
use crate::lambda::LambdaSystem;
use crate::orlicz::OrliczFunction;

/// Default relative width of the final bisection bracket.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Reported with every norm: the limit over blocks is evaluated as a
/// supremum over `r <= R`.
pub const SUP_INTERPRETATION: &str = "lim_r read as sup_r over blocks r <= R";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ExponentRule {
    Constant { value: f64 },
    Explicit { values: Vec<f64> },
}

impl Default for ExponentRule {
    fn default() -> Self {
        Self::Constant { value: 1.0 }
    }
}

impl ExponentRule {
    fn validate(&self) -> Result<()> {
        let bad = |v: f64| !(v.is_finite() && v > 0.0);
        match self {
            Self::Constant { value } if bad(*value) => {
                Err(invalid("s", format!("exponent must be a positive finite real, got {value}")))
            }
            Self::Explicit { values } if values.is_empty() || values.iter().any(|&v| bad(v)) => {
                Err(invalid("s", "explicit exponents must be nonempty, positive and finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn at(&self, k: usize) -> Result<f64> {
        match self {
            Self::Constant { value } => Ok(*value),
            Self::Explicit { values } => values.get(k).copied().ok_or(Error::OutOfHorizon {
                what: "exponent s",
                index: k,
                len: values.len(),
            }),
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, Self::Constant { value } if *value == 1.0)
    }
}

/// Which of the three spaces a [`SpaceSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    C0,
    C,
    Linf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSpec {
    pub orlicz: OrliczFunction,
    pub exponents: ExponentRule,
    pub theta: LacunarySequence,
    pub lambda: LambdaSystem,
    pub space: SpaceTag,
    /// Whether index 0 enters the modular through the synthetic block.
    pub include_k0: bool,
}

impl SpaceSpec {
    pub fn new(
        orlicz: OrliczFunction,
        exponents: ExponentRule,
        theta: LacunarySequence,
        lambda: LambdaSystem,
        space: SpaceTag,
    ) -> Result<Self> {
        exponents.validate()?;
        Ok(Self {
            orlicz,
            exponents,
            theta,
            lambda,
            space,
            include_k0: true,
        })
    }

    /// `M = identity`, `s ≡ 1`: the modular is a plain block mean.
    pub fn classical(theta: LacunarySequence, lambda: LambdaSystem) -> Self {
        Self {
            orlicz: OrliczFunction::identity(),
            exponents: ExponentRule::default(),
            theta,
            lambda,
            space: SpaceTag::C0,
            include_k0: true,
        }
    }

    pub fn with_orlicz(mut self, orlicz: OrliczFunction) -> Self {
        self.orlicz = orlicz;
        self
    }

    pub fn with_space(mut self, space: SpaceTag) -> Self {
        self.space = space;
        self
    }

    pub fn with_include_k0(mut self, include_k0: bool) -> Self {
        self.include_k0 = include_k0;
        self
    }

    pub fn is_classical(&self) -> bool {
        self.orlicz.is_identity() && self.exponents.is_one()
    }
}

/// Precomputed block layout and exponents for repeated modular evaluation.
#[derive(Debug, Clone)]
pub struct Modular<'a> {
    orlicz: &'a OrliczFunction,
    blocks: Vec<Block>,
    /// `s_k` for `k <= covered`, or `None` when `s ≡ 1`.
    exponents: Option<Vec<f64>>,
    covered: usize,
}

impl<'a> Modular<'a> {
    pub fn new(space: &'a SpaceSpec, blocks: usize) -> Result<Self> {
        let layout = space.theta.layout(blocks, space.include_k0)?;
        let covered = layout.last().map(|b| b.end).unwrap_or(0);
        let exponents = if space.exponents.is_one() {
            None
        } else {
            Some((0..=covered).map(|k| space.exponents.at(k)).collect::<Result<_>>()?)
        };
        Ok(Self {
            orlicz: &space.orlicz,
            blocks: layout,
            exponents,
            covered,
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Last index covered by a block.
    pub fn covered(&self) -> usize {
        self.covered
    }

    /// Errors if `u` has a nonzero entry that no block covers.
    pub fn check_support(&self, u: &[f64]) -> Result<()> {
        if let Some(index) = u.iter().rposition(|&v| v != 0.0) {
            if index > self.covered {
                return Err(Error::UncoveredSupport {
                    index,
                    covered: self.covered,
                });
            }
        }
        Ok(())
    }

    fn block_value(&self, u: &[f64], rho: f64, block: &Block) -> f64 {
        if block.start >= u.len() {
            return 0.0;
        }
        let end = block.end.min(u.len() - 1);
        let mut sum = 0.0;
        for k in block.start..=end {
            let v = u[k];
            if v == 0.0 {
                continue;
            }
            let m = self.orlicz.eval_unchecked(v.abs() / rho);
            sum += match &self.exponents {
                None => m,
                Some(s) => m.powf(s[k]),
            };
        }
        sum / block.len() as f64
    }

    /// Block values `(1/h_r) Σ_{k ∈ J_r} M(|u_k|/ρ)^{s_k}` in layout order.
    pub fn per_block(&self, u: &[f64], rho: f64) -> Vec<f64> {
        self.blocks.iter().map(|b| self.block_value(u, rho, b)).collect()
    }

    /// Supremum of the block values. `u` must pass [`Self::check_support`].
    pub fn eval(&self, u: &[f64], rho: f64) -> f64 {
        self.blocks
            .iter()
            .map(|b| self.block_value(u, rho, b))
            .fold(0.0, f64::max)
    }
}

/// The block modular of `u` (already in transformed coordinates) at `rho`.
pub fn modular(u: &[f64], space: &SpaceSpec, rho: f64, blocks: usize) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho must be > 0, got {rho}")));
    }
    let m = Modular::new(space, blocks)?;
    m.check_support(u)?;
    Ok(m.eval(u, rho))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    /// Final bisection bracket; `None` for the zero sequence.
    pub rho_bracket: Option<(f64, f64)>,
    pub modular_at_value: f64,
    pub blocks_used: usize,
    /// Block values at `value`, synthetic block first when present.
    pub per_block: Vec<f64>,
    pub iterations: usize,
    pub interpretation: String,
}

/// Luxemburg-type value of `u` taken as is, without applying `Λ̄`.
pub fn luxemburg_direct(u: &[f64], space: &SpaceSpec, blocks: usize, tol: f64) -> Result<NormReport> {
    let m = Modular::new(space, blocks)?;
    luxemburg_with(&m, u, blocks, tol)
}

pub(crate) fn luxemburg_with(m: &Modular<'_>, u: &[f64], blocks: usize, tol: f64) -> Result<NormReport> {
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    m.check_support(u)?;
    let relevant = |v: &f64| *v != 0.0;
    let nonzero = m
        .blocks()
        .iter()
        .any(|b| b.start < u.len() && u[b.start..=b.end.min(u.len() - 1)].iter().any(relevant));
    if !nonzero {
        return Ok(NormReport {
            value: 0.0,
            rho_bracket: None,
            modular_at_value: 0.0,
            blocks_used: blocks,
            per_block: vec![0.0; m.blocks().len()],
            iterations: 0,
            interpretation: SUP_INTERPRETATION.into(),
        });
    }
    let inf = infimum_feasible(|rho| m.eval(u, rho), tol, MAX_ITERATIONS)?;
    let per_block = m.per_block(u, inf.value);
    Ok(NormReport {
        value: inf.value,
        rho_bracket: Some((inf.lo, inf.hi)),
        modular_at_value: per_block.iter().copied().fold(0.0, f64::max),
        blocks_used: blocks,
        per_block,
        iterations: inf.iterations,
        interpretation: SUP_INTERPRETATION.into(),
    })
}

/// `‖x‖ = inf{ρ > 0 : m(Λ̄x, ρ) <= 1}`.
pub fn luxemburg_norm(x: &[f64], space: &SpaceSpec, blocks: usize, tol: f64) -> Result<NormReport> {
    let u = space.lambda.apply_lambda_bar(x)?;
    luxemburg_direct(&u, space, blocks, tol)
}

/// Classical block norm `sup_r (1/h_r) Σ_{k ∈ J_r} |x_k|`, with the
/// synthetic block for index 0 when `include_k0` holds.
pub fn n_theta_norm(x: &[f64], theta: &LacunarySequence, blocks: usize, include_k0: bool) -> Result<f64> {
    let layout = theta.layout(blocks, include_k0)?;
    let covered = layout.last().map(|b| b.end).unwrap_or(0);
    if let Some(index) = x.iter().rposition(|&v| v != 0.0) {
        if index > covered {
            return Err(Error::UncoveredSupport { index, covered });
        }
    }
    Ok(layout
        .iter()
        .filter(|b| b.start < x.len())
        .map(|b| {
            let end = b.end.min(x.len() - 1);
            x[b.start..=end].iter().map(|v| v.abs()).sum::<f64>() / b.len() as f64
        })
        .fold(0.0, f64::max))
}

/// `Σ_k |ā_k|` with `ā` the dual transform of `a`.
pub fn dual_norm(a: &[f64], space: &SpaceSpec) -> Result<f64> {
    Ok(space.lambda.associated_dual(a)?.iter().map(|v| v.abs()).sum())
}

/// Exact dual of the classical block norm (`M = identity`, `s ≡ 1`)
/// evaluated at `ā`: `Σ_r h_r max_{k ∈ J_r} |ā_k|`. It coincides with
/// [`dual_norm`] only when every block that meets the support of `ā` is a
/// singleton. Infinite when `ā_0 ≠ 0` but index 0 is excluded.
pub fn block_dual_norm(a: &[f64], space: &SpaceSpec, blocks: usize) -> Result<f64> {
    let abar = space.lambda.associated_dual(a)?;
    let layout = space.theta.layout(blocks, space.include_k0)?;
    let covered = layout.last().map(|b| b.end).unwrap_or(0);
    if let Some(index) = abar.iter().rposition(|&v| v != 0.0) {
        if index > covered {
            return Err(Error::UncoveredSupport { index, covered });
        }
    }
    if !space.include_k0 && abar.first().is_some_and(|&v| v != 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok(layout
        .iter()
        .filter(|b| b.start < abar.len())
        .map(|b| {
            let end = b.end.min(abar.len() - 1);
            b.len() as f64 * abar[b.start..=end].iter().fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical(lambda: LambdaSystem) -> SpaceSpec {
        SpaceSpec::classical(LacunarySequence::dyadic(), lambda)
    }

    fn e(k: usize, len: usize) -> Vec<f64> {
        let mut v = vec![0.0; len];
        v[k] = 1.0;
        v
    }

    #[test]
    fn modular_examples() {
        let s = classical(LambdaSystem::linear());
        assert_eq!(modular(&[0.0; 8], &s, 0.3, 3).unwrap(), 0.0);
        assert_eq!(modular(&e(1, 8), &s, 1.0, 3).unwrap(), 0.5);
        assert_eq!(modular(&[0.0, 1.0, 1.0, 0.0], &s, 2.0, 3).unwrap(), 0.5);
        assert!(matches!(modular(&e(1, 8), &s, 0.0, 3), Err(Error::Domain(_))));
        assert!(matches!(
            modular(&e(9, 10), &s, 1.0, 3),
            Err(Error::UncoveredSupport { index: 9, covered: 8 })
        ));
    }

    #[test]
    fn modular_with_exponents() {
        let mut s = classical(LambdaSystem::linear());
        s.exponents = ExponentRule::Explicit { values: vec![1.0, 2.0, 2.0, 0.5, 0.5] };
        // block [1..2]: (3/1)^2 / 2 = 4.5 ; block [3..4]: 4^0.5 / 2 = 1
        let v = modular(&[0.0, 3.0, 0.0, 4.0, 0.0], &s, 1.0, 2).unwrap();
        assert_eq!(v, 4.5);
        assert!(matches!(modular(&[1.0], &s, 1.0, 3), Err(Error::OutOfHorizon { .. })));
    }

    #[test]
    fn excluding_index_zero() {
        let s = classical(LambdaSystem::linear()).with_include_k0(false);
        assert_eq!(modular(&[5.0, 1.0], &s, 1.0, 2).unwrap(), 0.5);
    }

    #[test]
    fn norm_of_unit_block_entry() {
        // x with Λ̄x = e1 under λ_k = k+1 is x = 2 e1
        let s = classical(LambdaSystem::linear());
        let x = s.lambda.inverse_transform(&e(1, 8)).unwrap();
        assert_eq!(x, vec![0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let report = luxemburg_norm(&x, &s, 3, 1e-10).unwrap();
        assert!((report.value - 0.5).abs() <= 1e-10 * 0.5);
        let (lo, hi) = report.rho_bracket.unwrap();
        assert!(lo <= 0.5 && 0.5 <= hi);
        assert!(report.modular_at_value <= 1.0);
        assert_eq!(report.per_block.len(), 4);

        for p in [1.5, 2.0, 3.0] {
            let sp = s.clone().with_orlicz(OrliczFunction::power(p).unwrap());
            let v = luxemburg_norm(&x, &sp, 3, 1e-10).unwrap().value;
            let want = 0.5f64.powf(1.0 / p);
            assert!((v - want).abs() <= 1e-10 * want, "p = {p}: {v} vs {want}");
        }
    }

    #[test]
    fn zero_and_homogeneity_spot() {
        let s = classical(LambdaSystem::power(2.0).unwrap());
        let zero = luxemburg_norm(&[0.0; 16], &s, 4, 1e-10).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.rho_bracket, None);
        let x: Vec<f64> = (0..16).map(|k| (k as f64 * 0.7).sin()).collect();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = luxemburg_norm(&x, &s, 4, 1e-12).unwrap().value;
        let b = luxemburg_norm(&x2, &s, 4, 1e-12).unwrap().value;
        assert!((b / a - 2.0).abs() < 1e-10);
    }

    #[test]
    fn certificate_holds() {
        let s = classical(LambdaSystem::power(1.5).unwrap()).with_orlicz(OrliczFunction::exp_minus_one());
        let x: Vec<f64> = (0..30).map(|k| ((k * 13 % 7) as f64) - 3.0).collect();
        let r = luxemburg_norm(&x, &s, 5, DEFAULT_TOL).unwrap();
        let u = s.lambda.apply_lambda_bar(&x).unwrap();
        assert!(modular(&u, &s, r.value * (1.0 + 1e-8), 5).unwrap() <= 1.0 + 1e-6);
    }

    #[test]
    fn n_theta_examples() {
        let theta = LacunarySequence::dyadic();
        assert_eq!(n_theta_norm(&[1.0; 16], &theta, 4, true).unwrap(), 1.0);
        assert_eq!(n_theta_norm(&e(1, 16), &theta, 4, true).unwrap(), 0.5);
        assert_eq!(n_theta_norm(&[0.0; 16], &theta, 4, true).unwrap(), 0.0);
        assert!(n_theta_norm(&e(17, 18), &theta, 4, true).is_err());
    }

    #[test]
    fn dual_norm_examples() {
        let s = classical(LambdaSystem::linear());
        assert_eq!(dual_norm(&[0.0; 4], &s).unwrap(), 0.0);
        assert_eq!(dual_norm(&[1.0], &s).unwrap(), 1.0);
        let s = classical(LambdaSystem::power(2.0).unwrap());
        assert!((dual_norm(&[0.0, 1.0], &s).unwrap() - 2.0).abs() < 1e-15);
        // ā = (2/3, 4/3): the block dual weighs k = 1 by h_1 = 2
        let bd = block_dual_norm(&[0.0, 1.0], &s, 2).unwrap();
        assert!((bd - 10.0 / 3.0).abs() < 1e-14);
        let singles = SpaceSpec::classical(LacunarySequence::singletons(), LambdaSystem::power(2.0).unwrap());
        assert!((block_dual_norm(&[0.0, 1.0], &singles, 2).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exponent_validation() {
        let err = SpaceSpec::new(
            OrliczFunction::identity(),
            ExponentRule::Constant { value: 0.0 },
            LacunarySequence::dyadic(),
            LambdaSystem::linear(),
            SpaceTag::C0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "s", .. }));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-5.0f64..5.0, len)
        }

        proptest! {
            #[test]
            fn modular_nonincreasing_in_rho(u in vector(32), r1 in 0.01f64..10.0, r2 in 0.01f64..10.0) {
                let s = classical(LambdaSystem::linear()).with_orlicz(OrliczFunction::power(2.0).unwrap());
                let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                prop_assert!(modular(&u, &s, lo, 5).unwrap() >= modular(&u, &s, hi, 5).unwrap());
            }

            #[test]
            fn classical_norm_reduces_to_block_norm(x in vector(32)) {
                let s = classical(LambdaSystem::power(2.0).unwrap());
                let lux = luxemburg_norm(&x, &s, 5, 1e-12).unwrap().value;
                let direct = n_theta_norm(&s.lambda.apply_lambda_bar(&x).unwrap(), &s.theta, 5, true).unwrap();
                prop_assert!((lux - direct).abs() <= 1e-10 * direct.max(1e-300));
            }

            #[test]
            fn triangle_inequality(x in vector(24), y in vector(24)) {
                let s = classical(LambdaSystem::linear()).with_orlicz(OrliczFunction::power_log(1.0).unwrap());
                let tol = 1e-10;
                let n = |v: &[f64]| luxemburg_norm(v, &s, 5, tol).unwrap().value;
                let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                let (nx, ny) = (n(&x), n(&y));
                prop_assert!(n(&sum) <= nx + ny + tol * (nx + ny));
            }
        }
    }
}
