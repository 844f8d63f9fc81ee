//! The run configuration document and its translation into core types.

use serde::{Deserialize, Serialize};

use seqspace::chi::{Analysis, RowScale, Target, DEFAULT_HORIZON, DEFAULT_THRESHOLD, DEFAULT_TOL, DEFAULT_WINDOW};
use seqspace::lacunary::ThetaRule;
use seqspace::lambda::LambdaRule;
use seqspace::matrix::{MatrixConfig, MatrixFamily};
use seqspace::norms::{ExponentRule, SpaceTag};
use seqspace::oracle::{SampleDistribution, SamplerConfig};
use seqspace::orlicz::{OrliczFamily, DEFAULT_T_MAX};
use seqspace::{LacunarySequence, LambdaSystem, MatrixSpec, OrliczFunction, SpaceSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub orlicz: OrliczFamily,
    pub theta: ThetaRule,
    pub lambda: LambdaRule,
    #[serde(default)]
    pub space: SpaceFragment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixConfig>,
    /// Alternative spelling of `analysis.triangle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle: Option<MatrixConfig>,
    #[serde(default)]
    pub analysis: AnalysisFragment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<VectorSource>,
    #[serde(default)]
    pub verify: VerifyFragment,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFragment {
    /// Which space `x` lives in: `c0`, `c` or `linf` (over `λ`).
    #[serde(alias = "source")]
    pub target: SpaceTag,
    #[serde(default)]
    pub s: ExponentRule,
    #[serde(default = "yes")]
    pub include_k0: bool,
}

impl Default for SpaceFragment {
    fn default() -> Self {
        Self {
            target: SpaceTag::C0,
            s: ExponentRule::default(),
            include_k0: true,
        }
    }
}

fn yes() -> bool {
    true
}

/// Target space of the operator, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TargetName {
    #[default]
    #[serde(rename = "c0")]
    C0,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "linf")]
    Linf,
    #[serde(rename = "c0_T")]
    C0T,
    #[serde(rename = "c_T")]
    CT,
    #[serde(rename = "linf_T")]
    LinfT,
    #[serde(rename = "cs0")]
    Cs0,
    #[serde(rename = "cs")]
    Cs,
    #[serde(rename = "bs")]
    Bs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisFragment {
    #[serde(default)]
    pub target: TargetName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle: Option<MatrixConfig>,
    #[serde(rename = "N", default = "default_horizon")]
    pub n: usize,
    /// Block count; chosen as the smallest count covering the rows when
    /// absent.
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub row_scale: RowScale,
    /// Overrides `space.include_k0` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_k0: Option<bool>,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_window() -> usize {
    DEFAULT_WINDOW
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl Default for AnalysisFragment {
    fn default() -> Self {
        Self {
            target: TargetName::C0,
            triangle: None,
            n: DEFAULT_HORIZON,
            r: None,
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
            threshold: DEFAULT_THRESHOLD,
            row_scale: RowScale::Orlicz,
            include_k0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedVector {
    Zero,
    /// `e⁽ⁱ⁾` itself.
    Unit,
    /// The `x` with `Λ̄x = e⁽ⁱ⁾`.
    TransformedUnit,
}

/// Where the `norm` command gets its `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorSource {
    Explicit {
        explicit: Vec<f64>,
    },
    Named {
        named: NamedVector,
        #[serde(default)]
        index: usize,
    },
}

impl Default for VectorSource {
    fn default() -> Self {
        Self::Named {
            named: NamedVector::TransformedUnit,
            index: 1,
        }
    }
}

impl VectorSource {
    /// Command-line form: a comma-separated list, `zero`, `e<i>` or
    /// `y:e<i>`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let unit = |rest: &str| rest.parse::<usize>().map_err(|_| format!("bad unit vector index in `{s}`"));
        if s == "zero" {
            return Ok(Self::Named {
                named: NamedVector::Zero,
                index: 0,
            });
        }
        if let Some(rest) = s.strip_prefix("y:e") {
            return Ok(Self::Named {
                named: NamedVector::TransformedUnit,
                index: unit(rest)?,
            });
        }
        if let Some(rest) = s.strip_prefix('e') {
            return Ok(Self::Named {
                named: NamedVector::Unit,
                index: unit(rest)?,
            });
        }
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
            .collect::<Result<Vec<_>, _>>()
            .map(|explicit| Self::Explicit { explicit })
    }

    pub fn materialize(&self, lambda: &LambdaSystem) -> seqspace::Result<Vec<f64>> {
        match self {
            Self::Explicit { explicit } => Ok(explicit.clone()),
            Self::Named { named, index } => {
                let mut e = vec![0.0; index + 1];
                match named {
                    NamedVector::Zero => Ok(vec![0.0]),
                    NamedVector::Unit => {
                        e[*index] = 1.0;
                        Ok(e)
                    }
                    NamedVector::TransformedUnit => {
                        e[*index] = 1.0;
                        lambda.inverse_transform(&e)
                    }
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Explicit { explicit } => format!("explicit ({} entries)", explicit.len()),
            Self::Named { named: NamedVector::Zero, .. } => "zero".into(),
            Self::Named { named: NamedVector::Unit, index } => format!("e{index}"),
            Self::Named {
                named: NamedVector::TransformedUnit,
                index,
            } => format!("x with Lambda-bar x = e{index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFragment {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_support")]
    pub support: usize,
    #[serde(default = "default_distribution")]
    pub distribution: SampleDistribution,
    /// Sequences `a` whose dual norm is sampled.
    #[serde(default = "default_probes")]
    pub probes: Vec<Vec<f64>>,
    /// Length of sampled sequences.
    #[serde(default = "default_sample_horizon")]
    pub horizon: usize,
    #[serde(default = "default_duality_trials")]
    pub duality_trials: usize,
    #[serde(default = "default_matrix_trials")]
    pub matrix_trials: usize,
}

fn default_samples() -> usize {
    10_000
}
fn default_support() -> usize {
    4
}
fn default_distribution() -> SampleDistribution {
    SampleDistribution::Sparse
}
fn default_probes() -> Vec<Vec<f64>> {
    vec![vec![1.0], vec![0.0, 1.0]]
}
fn default_sample_horizon() -> usize {
    8
}
fn default_duality_trials() -> usize {
    1000
}
fn default_matrix_trials() -> usize {
    50
}

impl Default for VerifyFragment {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            support: default_support(),
            distribution: default_distribution(),
            probes: default_probes(),
            horizon: default_sample_horizon(),
            duality_trials: default_duality_trials(),
            matrix_trials: default_matrix_trials(),
        }
    }
}

/// Parses a config document, naming the failing path on error.
pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("at `{path}`: {inner}"))
        }
    })?;
    config.sampler().validate().map_err(|e| CliError::Config(format!("at `verify`: {e}")))?;
    if config.verify.horizon == 0 {
        return Err(CliError::Config("at `verify.horizon`: must be >= 1".into()));
    }
    Ok(config)
}

/// Everything the commands need, validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub space: SpaceSpec,
    pub matrix: Option<MatrixSpec>,
    pub target: Target,
    pub analysis: AnalysisFragment,
    /// Orlicz validation outcome, kept for the report.
    pub orlicz_checks: seqspace::orlicz::ValidationReport,
}

const ORLICZ_GRID: usize = 257;

impl RunConfig {
    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            samples: self.verify.samples,
            support: self.verify.support,
            distribution: self.verify.distribution,
        }
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let orlicz = OrliczFunction::new(self.orlicz.clone())?;
        let checks = orlicz.validate(ORLICZ_GRID, DEFAULT_T_MAX)?;
        if let Some(bad) = checks.checks.iter().find(|c| !c.passed) {
            return Err(CliError::Validation(format!(
                "orlicz function fails the {:?} check (violation {:e}, pair {:?})",
                bad.kind, bad.violation, bad.worst_pair
            )));
        }
        let theta = LacunarySequence::new(self.theta.clone())?;
        let lambda = LambdaSystem::new(self.lambda.clone())?;
        let include_k0 = self.analysis.include_k0.unwrap_or(self.space.include_k0);
        let space = SpaceSpec::new(orlicz, self.space.s.clone(), theta, lambda, self.space.target)?
            .with_include_k0(include_k0);
        let matrix = self.matrix.clone().map(MatrixSpec::from_config).transpose()?;

        let triangle = match (&self.triangle, &self.analysis.triangle) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "triangle given both at top level and under analysis".into(),
                ))
            }
            (Some(t), None) | (None, Some(t)) => Some(t.clone()),
            (None, None) => None,
        };
        let target = target_for(self.analysis.target, triangle)?;

        let a = &self.analysis;
        if a.window < 2 || a.n < 2 * a.window {
            return Err(CliError::Validation(format!(
                "analysis needs window >= 2 and N >= 2 x window, got N = {}, window = {}",
                a.n, a.window
            )));
        }
        if !(a.tol > 0.0 && a.threshold > 0.0) {
            return Err(CliError::Validation("analysis.tol and analysis.threshold must be > 0".into()));
        }
        Ok(Resolved {
            space,
            matrix,
            target,
            analysis: a.clone(),
            orlicz_checks: checks,
        })
    }
}

fn target_for(name: TargetName, triangle: Option<MatrixConfig>) -> Result<Target, CliError> {
    use TargetName::*;
    let base = match name {
        C0 | C0T | Cs0 => SpaceTag::C0,
        C | CT | Cs => SpaceTag::C,
        Linf | LinfT | Bs => SpaceTag::Linf,
    };
    match name {
        C0 | C | Linf | Cs0 | Cs | Bs if triangle.is_some() => Err(CliError::Validation(format!(
            "a triangle is only used with the c0_T, c_T and linf_T targets, not {name:?}"
        ))),
        C0 | C | Linf => Ok(Target::plain(base)),
        Cs0 | Cs | Bs => Ok(Target::series(base)),
        C0T | CT | LinfT => {
            let t = triangle.ok_or_else(|| {
                CliError::Validation("targets c0_T, c_T and linf_T need `analysis.triangle`".into())
            })?;
            if let MatrixFamily::LambdaPrime { lambda } = &t.family {
                return Ok(Target::lambda_prime(base, LambdaSystem::new(lambda.clone())?));
            }
            let spec = MatrixSpec::from_config(t)?;
            if !spec.is_triangle() {
                return Err(seqspace::Error::NotTriangle(spec.describe()).into());
            }
            Ok(Target::triangle(base, spec))
        }
    }
}

impl Resolved {
    pub fn matrix(&self) -> Result<&MatrixSpec, CliError> {
        self.matrix
            .as_ref()
            .ok_or_else(|| CliError::Validation("this command needs a `matrix` fragment".into()))
    }

    pub fn analysis(&self, blocks: usize) -> Analysis {
        Analysis {
            horizon: self.analysis.n,
            blocks,
            window: self.analysis.window,
            tol: self.analysis.tol,
            threshold: self.analysis.threshold,
            row_scale: self.analysis.row_scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"orlicz": {"family": "identity"}, "theta": {"rule": "geometric", "q": 2.0, "c": 1.0}, "lambda": {"rule": "linear"}}"#;

    #[test]
    fn minimal_document() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.analysis.n, 2048);
        assert_eq!(c.space.target, SpaceTag::C0);
        assert!(c.space.include_k0);
        assert_eq!(c.output, OutputFormat::Text);
        let r = c.resolve().unwrap();
        assert!(r.space.is_classical());
        assert!(r.matrix().is_err());
    }

    #[test]
    fn errors_name_the_path() {
        let err = parse(r#"{"orlicz": {"family": "identity"}, "lambda": {"rule": "linear"}}"#).unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
        let text = MINIMAL.replace("\"linear\"", "\"linear\"}, \"analysis\": {\"N\": \"many\"");
        let err = parse(&text).unwrap_err();
        assert!(err.to_string().contains("analysis.N"), "{err}");
        let text = MINIMAL.replace("\"linear\"}", "\"linear\"}, \"verify\": {\"samples\": 0}");
        assert!(matches!(parse(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn vector_parsing() {
        assert_eq!(
            VectorSource::parse("1, 0,2.5").unwrap(),
            VectorSource::Explicit {
                explicit: vec![1.0, 0.0, 2.5]
            }
        );
        let l = LambdaSystem::linear();
        assert_eq!(VectorSource::parse("e2").unwrap().materialize(&l).unwrap(), vec![0.0, 0.0, 1.0]);
        let x = VectorSource::parse("y:e1").unwrap().materialize(&l).unwrap();
        assert_eq!(l.apply_lambda_bar(&x).unwrap(), vec![0.0, 1.0]);
        assert_eq!(VectorSource::parse("zero").unwrap().materialize(&l).unwrap(), vec![0.0]);
        assert!(VectorSource::parse("e").is_err());
        assert!(VectorSource::parse("1,x").is_err());
    }

    #[test]
    fn targets() {
        let t = target_for(TargetName::Bs, None).unwrap();
        assert_eq!(t.criterion(), "Cor 5.9(3)");
        assert!(target_for(TargetName::C0T, None).is_err());
        let lp: MatrixConfig =
            serde_json::from_str(r#"{"family": "lambda-prime", "lambda": {"rule": "power", "d": 2}}"#).unwrap();
        let t = target_for(TargetName::CT, Some(lp)).unwrap();
        assert_eq!(t.bounded_source_tag(), "Particular Case 5.6");
        let bad: MatrixConfig = serde_json::from_str(r#"{"family": "finite-rank", "rows": [[1.0, 1.0]]}"#).unwrap();
        assert!(target_for(TargetName::C0T, Some(bad)).is_err());
    }
}
