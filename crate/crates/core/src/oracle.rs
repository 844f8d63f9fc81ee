//! Brute-force checks of the identities the estimates rest on: the duality
//! `Σ a_k x_k = Σ ā_k y_k`, the matrix identity `Ax = Ā(Λ̄x)`, a sampled
//! lower bound for the dual norm, and tails of finite sets for the
//! projector form of the measure of noncompactness.
//!
//! Randomness comes from `ChaCha8Rng`: sample `i` uses the stream `i` of
//! the generator seeded with `seed`, so results do not depend on thread
//! scheduling.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lambda::LambdaSystem;
use crate::matrix::{associated_matrix, MatrixSpec};
use crate::norms::{luxemburg_with, Modular, SpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleDistribution {
    #[default]
    Gaussian,
    Rademacher,
    /// Gaussian values on a random set of at most `support` coordinates.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    /// Maximal number of nonzero coordinates for sparse draws.
    pub support: usize,
    pub distribution: SampleDistribution,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 4096,
            support: 8,
            distribution: SampleDistribution::Gaussian,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("samples", "must be >= 1"));
        }
        if self.support == 0 {
            return Err(invalid("support", "must be >= 1"));
        }
        Ok(())
    }
}

/// Generator for sample `stream` of a run seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw number `sample` of length `len`.
pub fn draw(config: &SamplerConfig, len: usize, sample: u64) -> Vec<f64> {
    let mut rng = rng(config.seed, sample);
    match config.distribution {
        SampleDistribution::Gaussian => (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        SampleDistribution::Rademacher => (0..len)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
        SampleDistribution::Sparse => {
            let mut v = vec![0.0; len];
            if len == 0 {
                return v;
            }
            let size = rng.random_range(1..=config.support.min(len));
            for k in index::sample(&mut rng, len, size) {
                v[k] = rng.sample(StandardNormal);
            }
            v
        }
    }
}

/// Absolute residual of an identity with the scale it should be judged at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub residual: f64,
    pub scale: f64,
}

impl Residual {
    /// `residual <= rel · (1 + scale)`.
    pub fn within(&self, rel: f64) -> bool {
        self.residual <= rel * (1.0 + self.scale)
    }

    pub fn relative(&self) -> f64 {
        self.residual / (1.0 + self.scale)
    }
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

/// `|Σ a_k x_k − Σ ā_k y_k|` with `y = Λ̄x`, scaled by `‖a‖₁ ‖x‖∞`.
pub fn check_duality(lambda: &LambdaSystem, a: &[f64], x: &[f64]) -> Result<Residual> {
    check_duality_with(lambda, a, x, |l, a| l.associated_dual(a))
}

/// [`check_duality`] with a caller-supplied dual transform, so a corrupted
/// transform can be shown to fail.
pub fn check_duality_with<F>(lambda: &LambdaSystem, a: &[f64], x: &[f64], dual: F) -> Result<Residual>
where
    F: Fn(&LambdaSystem, &[f64]) -> Result<Vec<f64>>,
{
    let mut xs = x.to_vec();
    xs.resize(a.len().max(x.len()), 0.0);
    let lhs: f64 = a.iter().zip(&xs).map(|(a, x)| a * x).sum();
    let abar = dual(lambda, a)?;
    let y = lambda.apply_lambda_bar(&xs[..abar.len().min(xs.len())])?;
    let rhs: f64 = abar.iter().zip(&y).map(|(a, y)| a * y).sum();
    let l1: f64 = a.iter().map(|v| v.abs()).sum();
    Ok(Residual {
        residual: (lhs - rhs).abs(),
        scale: l1 * sup_abs(x),
    })
}

/// `max_{n<=N} |(Ax)_n − (Ā(Λ̄x))_n|`, scaled by `max_n ‖A_n‖₁ ‖x‖∞`.
pub fn check_matrix_identity(lambda: &LambdaSystem, matrix: &MatrixSpec, x: &[f64], n: usize) -> Result<Residual> {
    if matrix.is_direct_associated() {
        return Err(invalid("matrix", "given directly as an associated matrix; nothing to compare against"));
    }
    let rows = matrix.rows(n)?;
    let abar = associated_matrix(lambda, matrix).rows(n)?;
    let width = rows.iter().map(Vec::len).max().unwrap_or(0).max(x.len());
    let mut xs = x.to_vec();
    xs.resize(width, 0.0);
    let y = lambda.apply_lambda_bar(&xs)?;
    let xsup = sup_abs(x);
    let (residual, scale) = rows
        .par_iter()
        .zip(&abar)
        .map(|(row, brow)| {
            let ax: f64 = row.iter().zip(&xs).map(|(a, x)| a * x).sum();
            let by: f64 = brow.iter().zip(&y).map(|(a, y)| a * y).sum();
            let l1: f64 = row.iter().map(|v| v.abs()).sum();
            ((ax - by).abs(), l1 * xsup)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(Residual { residual, scale })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDual {
    /// Largest `|Σ a_k x_k|` over normalized samples.
    pub best: f64,
    /// Index of the sample attaining `best` (lowest on ties).
    pub best_sample: Option<u64>,
    /// The normalized sample attaining `best`, truncated to the length of
    /// `a`.
    pub certificate: Vec<f64>,
    /// Samples that were nonzero and could be normalized.
    pub samples_used: usize,
}

/// Lower bound for the dual norm of `a` on the space described by `space`.
///
/// Samples are drawn in transformed coordinates `y` of length `horizon`,
/// mapped back by `x = Λ̄⁻¹y`, and scaled by their Luxemburg-type norm
/// (the upper end of its bisection bracket, so each scaled sample lies in
/// the unit ball).
pub fn sampled_dual_norm(
    a: &[f64],
    space: &SpaceSpec,
    config: &SamplerConfig,
    horizon: usize,
    blocks: usize,
) -> Result<SampledDual> {
    config.validate()?;
    if horizon < a.len() {
        return Err(invalid("N", format!("horizon {horizon} is shorter than a ({})", a.len())));
    }
    let m = Modular::new(space, blocks)?;
    if horizon > m.covered() + 1 {
        return Err(Error::UncoveredSupport {
            index: horizon - 1,
            covered: m.covered(),
        });
    }
    if a.iter().all(|v| *v == 0.0) {
        return Ok(SampledDual {
            best: 0.0,
            best_sample: None,
            certificate: vec![0.0; a.len()],
            samples_used: 0,
        });
    }

    let results: Vec<Option<(f64, f64)>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let y = draw(config, horizon, i);
            let norm = luxemburg_with(&m, &y, blocks, 1e-12)?.value;
            if norm == 0.0 {
                return Ok(None);
            }
            let x = space.lambda.inverse_transform(&y[..a.len()])?;
            let pairing: f64 = a.iter().zip(&x).map(|(a, x)| a * x).sum();
            Ok(Some((pairing.abs() / norm, norm)))
        })
        .collect::<Result<_>>()?;

    let mut best = 0.0;
    let mut best_sample = None;
    for (i, r) in results.iter().enumerate() {
        if let Some((v, _)) = r {
            if best_sample.is_none() || *v > best {
                best = *v;
                best_sample = Some(i as u64);
            }
        }
    }
    let certificate = match best_sample {
        Some(i) => {
            let y = draw(config, horizon, i);
            let norm = results[i as usize].expect("recorded").1;
            let mut x = space.lambda.inverse_transform(&y[..a.len()])?;
            x.iter_mut().for_each(|v| *v /= norm);
            x
        }
        None => vec![0.0; a.len()],
    };
    Ok(SampledDual {
        best,
        best_sample,
        certificate,
        samples_used: results.iter().flatten().count(),
    })
}

/// `sup_{x ∈ Q} ‖(I − P_r)x‖∞ = max_{x ∈ Q} max_{n>r} |x_n|`.
pub fn projector_tail(set: &[Vec<f64>], r: usize) -> f64 {
    set.iter()
        .map(|x| x.iter().skip(r + 1).fold(0.0, |m: f64, v| m.max(v.abs())))
        .fold(0.0, f64::max)
}
