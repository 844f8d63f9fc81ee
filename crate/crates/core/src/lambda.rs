//! Weighted first-difference transform built from a strictly increasing
//! positive sequence `λ = (λ_k)`.
//!
//! With `d_k = λ_k - λ_{k-1}` (and `λ_{-1} = 0`) the triangle `Λ̄` has
//!
//! ```text
//! Λ̄[n][k] = (d_k - d_{k+1}) / λ_n   for k < n
//! Λ̄[n][n] = d_n / λ_n
//! ```
//!
//! so that `y = Λ̄x` satisfies `λ_k y_k = Σ_{j<=k} d_j (x_j - x_{j-1})`.
//! Everything here works on finite prefixes; entries past a supplied
//! slice are zero.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Config form: `{"rule": "power", "d": 1}`, `{"rule": "linear"}` or
/// `{"explicit": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaRule {
    Explicit { explicit: Vec<f64> },
    Rule(GeneratedLambda),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum GeneratedLambda {
    /// `λ_k = k + 1`
    Linear,
    /// `λ_k = (k + 1)^d`, `d > 0`
    Power { d: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "LambdaRule")]
pub struct LambdaSystem {
    rule: LambdaRule,
}

impl From<LambdaSystem> for LambdaRule {
    fn from(l: LambdaSystem) -> Self {
        l.rule
    }
}

impl LambdaSystem {
    pub fn new(rule: LambdaRule) -> Result<Self> {
        match &rule {
            LambdaRule::Explicit { explicit } => {
                if explicit.is_empty() {
                    return Err(invalid("lambda.explicit", "must not be empty"));
                }
                let mut prev = 0.0;
                for (k, &v) in explicit.iter().enumerate() {
                    if !v.is_finite() || v <= prev {
                        return Err(Error::Lambda {
                            k,
                            reason: format!(
                                "lambda_k = {v} must be finite and exceed lambda_(k-1) = {prev}"
                            ),
                        });
                    }
                    prev = v;
                }
            }
            LambdaRule::Rule(GeneratedLambda::Linear) => {}
            LambdaRule::Rule(GeneratedLambda::Power { d }) => {
                if !(d.is_finite() && *d > 0.0) {
                    return Err(invalid("lambda.d", format!("must be > 0, got {d}")));
                }
            }
        }
        Ok(Self { rule })
    }

    /// `λ_k = k + 1`; `Λ̄` is then the diagonal matrix `1/(n+1)`.
    pub fn linear() -> Self {
        Self {
            rule: LambdaRule::Rule(GeneratedLambda::Linear),
        }
    }

    pub fn power(d: f64) -> Result<Self> {
        Self::new(LambdaRule::Rule(GeneratedLambda::Power { d }))
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::new(LambdaRule::Explicit { explicit: values })
    }

    pub fn rule(&self) -> &LambdaRule {
        &self.rule
    }

    /// `λ_k`.
    pub fn value(&self, k: usize) -> Result<f64> {
        let v = match &self.rule {
            LambdaRule::Explicit { explicit } => {
                *explicit.get(k).ok_or(Error::OutOfHorizon {
                    what: "lambda",
                    index: k,
                    len: explicit.len(),
                })?
            }
            LambdaRule::Rule(GeneratedLambda::Linear) => (k + 1) as f64,
            LambdaRule::Rule(GeneratedLambda::Power { d }) => {
                let base = (k + 1) as f64;
                if d.fract() == 0.0 && *d <= 64.0 {
                    base.powi(*d as i32)
                } else {
                    base.powf(*d)
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Lambda {
                k,
                reason: "lambda_k overflows".into(),
            });
        }
        Ok(v)
    }

    /// `λ_0, ..., λ_{len-1}`.
    pub fn values(&self, len: usize) -> Result<Vec<f64>> {
        (0..len).map(|k| self.value(k)).collect()
    }

    /// `d_k = λ_k - λ_{k-1}` with `λ_{-1} = 0`.
    pub fn step(&self, k: usize) -> Result<f64> {
        let prev = if k == 0 { 0.0 } else { self.value(k - 1)? };
        Ok(self.value(k)? - prev)
    }

    /// Entry `(n, k)` of `Λ̄`, as `d_k/λ_n - d_{k+1}/λ_n` below the
    /// diagonal. Scaling before subtracting keeps the row telescoping in
    /// floating point, so row sums stay at `λ_0/λ_n` even when the
    /// entries are large and of mixed sign.
    pub fn lambda_bar_entry(&self, n: usize, k: usize) -> Result<f64> {
        use std::cmp::Ordering;
        let lam_n = self.value(n)?;
        match k.cmp(&n) {
            Ordering::Greater => Ok(0.0),
            Ordering::Equal => Ok(self.step(n)? / lam_n),
            Ordering::Less => Ok(self.step(k)? / lam_n - self.step(k + 1)? / lam_n),
        }
    }

    /// Row `n` of `Λ̄`, entries `0..=n`.
    pub fn lambda_bar_row(&self, n: usize) -> Result<Vec<f64>> {
        let lam = self.values(n + 1)?;
        let scaled: Vec<f64> = (0..=n)
            .map(|k| if k == 0 { lam[0] } else { lam[k] - lam[k - 1] } / lam[n])
            .collect();
        let mut row: Vec<f64> = scaled.windows(2).map(|w| w[0] - w[1]).collect();
        row.push(scaled[n]);
        Ok(row)
    }

    /// `y = Λ̄x` computed by the running difference sum.
    pub fn apply_lambda_bar(&self, x: &[f64]) -> Result<Vec<f64>> {
        let lam = self.values(x.len())?;
        let mut y = Vec::with_capacity(x.len());
        let (mut acc, mut prev_lam, mut prev_x) = (0.0, 0.0, 0.0);
        for (&xk, &lk) in x.iter().zip(&lam) {
            acc += (lk - prev_lam) * (xk - prev_x);
            y.push(acc / lk);
            prev_lam = lk;
            prev_x = xk;
        }
        Ok(y)
    }

    /// Inverse of [`Self::apply_lambda_bar`]:
    /// `x_k = Σ_{j<=k} (λ_j y_j - λ_{j-1} y_{j-1}) / d_j`.
    pub fn inverse_transform(&self, y: &[f64]) -> Result<Vec<f64>> {
        let lam = self.values(y.len())?;
        let mut x = Vec::with_capacity(y.len());
        let (mut acc, mut prev_lam, mut prev_y) = (0.0, 0.0, 0.0);
        for (&yk, &lk) in y.iter().zip(&lam) {
            acc += (lk * yk - prev_lam * prev_y) / (lk - prev_lam);
            x.push(acc);
            prev_lam = lk;
            prev_y = yk;
        }
        Ok(x)
    }

    /// The dual transform `ā` of a finitely supported `a`:
    ///
    /// `ā_k = λ_k [a_k / d_k + (1/d_k - 1/d_{k+1}) Σ_{j>k} a_j]`.
    ///
    /// The output has the same length as `a`; entries past it vanish
    /// because both `a_k` and its tail sum do.
    pub fn associated_dual(&self, a: &[f64]) -> Result<Vec<f64>> {
        let lam = self.values(a.len() + 1)?;
        let step = |k: usize| if k == 0 { lam[0] } else { lam[k] - lam[k - 1] };
        let mut abar = vec![0.0; a.len()];
        let mut tail = 0.0;
        for k in (0..a.len()).rev() {
            let (dk, dk1) = (step(k), step(k + 1));
            abar[k] = lam[k] * (a[k] / dk + (1.0 / dk - 1.0 / dk1) * tail);
            tail += a[k];
        }
        Ok(abar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use num_traits::ToPrimitive;

    type Q = Ratio<i128>;

    fn squares() -> LambdaSystem {
        LambdaSystem::power(2.0).unwrap()
    }

    /// Exact `Λ̄` entry for integer-valued λ given as a closure.
    fn rational_entry(lam: &dyn Fn(i128) -> i128, n: i128, k: i128) -> Q {
        let l = |j: i128| if j < 0 { 0 } else { lam(j) };
        let d = |j: i128| l(j) - l(j - 1);
        if k > n {
            Q::from_integer(0)
        } else if k == n {
            Q::new(d(n), l(n))
        } else {
            Q::new(d(k) - d(k + 1), l(n))
        }
    }

    #[test]
    fn entry_examples() {
        let lin = LambdaSystem::linear();
        assert_eq!(lin.lambda_bar_entry(5, 5).unwrap(), 1.0 / 6.0);
        assert_eq!(lin.lambda_bar_entry(5, 2).unwrap(), 0.0);
        assert_eq!(squares().lambda_bar_entry(2, 0).unwrap(), -2.0 / 9.0);
        assert_eq!(squares().lambda_bar_entry(1, 7).unwrap(), 0.0);
    }

    #[test]
    fn entries_match_rational_shadow() {
        let sq = |j: i128| (j + 1) * (j + 1);
        let cube = |j: i128| (j + 1) * (j + 1) * (j + 1);
        for (sys, lam) in [
            (squares(), &sq as &dyn Fn(i128) -> i128),
            (LambdaSystem::power(3.0).unwrap(), &cube),
        ] {
            for n in 0..40 {
                // one rounding of the scaled steps, then an exact subtraction
                let scale = ((2 * n + 3) * (n + 2) * (n + 2)) as f64 / lam(n) as f64;
                for k in 0..45 {
                    let exact = rational_entry(lam, n, k).to_f64().unwrap();
                    let got = sys.lambda_bar_entry(n as usize, k as usize).unwrap();
                    assert!((got - exact).abs() <= 2.0 * f64::EPSILON * scale, "({n}, {k}): {got} vs {exact}");
                }
                let row = sys.lambda_bar_row(n as usize).unwrap();
                for (k, v) in row.iter().enumerate() {
                    assert_eq!(*v, sys.lambda_bar_entry(n as usize, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn apply_examples() {
        let lin = LambdaSystem::linear();
        let y = lin.apply_lambda_bar(&[1.0; 10]).unwrap();
        for (k, v) in y.iter().enumerate() {
            assert!((v - 1.0 / (k + 1) as f64).abs() < 1e-15);
        }
        let x = [3.0, -1.5, 0.25, 7.0, 2.0];
        let y = lin.apply_lambda_bar(&x).unwrap();
        for k in 0..x.len() {
            assert!((y[k] - x[k] / (k + 1) as f64).abs() < 1e-15);
        }
        assert!(squares().apply_lambda_bar(&[0.0; 8]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_matches_row_products() {
        let x: Vec<f64> = (0..60).map(|k| ((k * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for sys in [LambdaSystem::linear(), squares(), LambdaSystem::power(1.5).unwrap()] {
            let y = sys.apply_lambda_bar(&x).unwrap();
            for n in 0..x.len() {
                let row = sys.lambda_bar_row(n).unwrap();
                let direct: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                assert!((y[n] - direct).abs() <= 1e-12 * (1.0 + norm), "n = {n}");
            }
        }
    }

    #[test]
    fn inverse_of_unit_vector() {
        let x = LambdaSystem::linear().inverse_transform(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let y = LambdaSystem::linear().apply_lambda_bar(&x).unwrap();
        assert_eq!(y, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(squares().inverse_transform(&[0.0; 6]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn associated_dual_examples() {
        assert_eq!(LambdaSystem::linear().associated_dual(&[1.0]).unwrap(), vec![1.0]);
        assert_eq!(
            LambdaSystem::linear().associated_dual(&[1.0, 0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let abar = squares().associated_dual(&[0.0, 1.0, 0.0]).unwrap();
        assert!((abar[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((abar[1] - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(abar[2], 0.0);
        assert!(squares().associated_dual(&[0.0; 4]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn associated_dual_matches_rational_shadow() {
        let lam = |j: i128| if j < 0 { 0 } else { (j + 1) * (j + 1) };
        let d = |j: i128| lam(j) - lam(j - 1);
        let a: Vec<i128> = vec![3, -1, 4, 1, -5, 9, 2];
        let abar = squares()
            .associated_dual(&a.iter().map(|&v| v as f64).collect::<Vec<_>>())
            .unwrap();
        for k in 0..a.len() {
            let tail: i128 = a[k + 1..].iter().sum();
            let exact = Q::from_integer(lam(k as i128))
                * (Q::new(a[k], d(k as i128))
                    + (Q::new(1, d(k as i128)) - Q::new(1, d(k as i128 + 1))) * Q::from_integer(tail));
            let exact = exact.to_f64().unwrap();
            assert!((abar[k] - exact).abs() <= 1e-14 * (1.0 + exact.abs()), "k = {k}");
        }
    }

    #[test]
    fn row_sums() {
        for sys in [LambdaSystem::linear(), squares(), LambdaSystem::power(0.5).unwrap()] {
            let l0 = sys.value(0).unwrap();
            for n in 0..200 {
                let row = sys.lambda_bar_row(n).unwrap();
                let s: f64 = row.iter().sum();
                let mass: f64 = row.iter().map(|v| v.abs()).sum();
                let want = l0 / sys.value(n).unwrap();
                assert!((s - want).abs() <= 1e-13 * mass, "n = {n}: {s} vs {want}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(LambdaSystem::power(0.0).is_err());
        assert!(matches!(
            LambdaSystem::explicit(vec![1.0, 2.0, 2.0]).unwrap_err(),
            Error::Lambda { k: 2, .. }
        ));
        assert!(LambdaSystem::explicit(vec![-1.0]).is_err());
        let short = LambdaSystem::explicit(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            short.apply_lambda_bar(&[1.0, 1.0, 1.0]).unwrap_err(),
            Error::OutOfHorizon { index: 2, .. }
        ));
    }

    #[test]
    fn config_forms() {
        let r: LambdaRule = serde_json::from_str(r#"{"rule":"power","d":1}"#).unwrap();
        let sys = LambdaSystem::new(r).unwrap();
        assert_eq!(sys.value(9).unwrap(), 10.0);
        let r: LambdaRule = serde_json::from_str(r#"{"explicit":[1.0,2.5,4.0]}"#).unwrap();
        assert_eq!(LambdaSystem::new(r).unwrap().value(1).unwrap(), 2.5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_lambda() -> impl Strategy<Value = LambdaSystem> {
            prop_oneof![
                Just(LambdaSystem::linear()),
                (0.5f64..3.0).prop_map(|d| LambdaSystem::power(d).unwrap()),
                proptest::collection::vec(0.5f64..2.0, 64).prop_map(|steps| {
                    let mut acc = 0.0;
                    LambdaSystem::explicit(
                        steps.into_iter().map(|s| { acc += s; acc }).collect(),
                    )
                    .unwrap()
                }),
            ]
        }

        proptest! {
            #[test]
            fn round_trip(sys in any_lambda(), y in proptest::collection::vec(-10.0f64..10.0, 1..60)) {
                let x = sys.inverse_transform(&y).unwrap();
                let back = sys.apply_lambda_bar(&x).unwrap();
                let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for (a, b) in back.iter().zip(&y) {
                    prop_assert!((a - b).abs() <= 1e-10 * scale);
                }
                let again = sys.inverse_transform(&back).unwrap();
                let xs = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for (a, b) in again.iter().zip(&x) {
                    prop_assert!((a - b).abs() <= 1e-10 * xs);
                }
            }
        }
    }
}
