//! Experiment configuration: one JSON document per invocation.
//!
//! Tagged objects (`experiment`, `probe`) are dispatched on their `kind` by hand so that
//! deserialization errors carry the path of the offending field.

use altproj_core::constructions::{Ell2Params, ScenarioSpec};
use altproj_core::sets::SetDescriptor;
use altproj_core::variational::ContainmentTarget;
use altproj_core::Point;
use anyhow::{anyhow, Context, Result};
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub rng_seed: u64,
    pub max_iter: Option<usize>,
    #[serde(default = "one")]
    pub record_stride: usize,
}

fn one() -> usize {
    1
}

/// Output file names, resolved against `--out`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default = "default_csv")]
    pub csv: String,
    /// Full-precision trace with coordinates; written only when set.
    pub json: Option<String>,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_csv() -> String {
    "trace.csv".into()
}

fn default_report() -> String {
    "report.json".into()
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            csv: default_csv(),
            json: None,
            report: default_report(),
        }
    }
}

#[derive(Debug)]
pub enum Experiment {
    Classical(Classical),
    Perturbed(Perturbed),
    Example44(Blocks),
    Example51(Blocks),
    Ell2(Ell2),
    StableScenario(Stable),
    Probe(ProbeSpec),
}

pub const EXPERIMENT_KINDS: [&str; 7] = [
    "classical",
    "perturbed",
    "example44",
    "example51",
    "ell2",
    "stable-scenario",
    "probe",
];

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Classical(_) => "classical",
            Experiment::Perturbed(_) => "perturbed",
            Experiment::Example44(_) => "example44",
            Experiment::Example51(_) => "example51",
            Experiment::Ell2(_) => "ell2",
            Experiment::StableScenario(_) => "stable-scenario",
            Experiment::Probe(_) => "probe",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classical {
    pub a: SetDescriptor,
    pub b: SetDescriptor,
    pub start: Point,
    pub target: Option<Point>,
    pub stop_residual: Option<f64>,
}

/// `A_n = A + δ n^(−decay) shift_a`, `B_n = B + δ n^(−decay) shift_b`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbed {
    pub a: SetDescriptor,
    pub b: SetDescriptor,
    pub shift_a: Point,
    pub shift_b: Point,
    pub delta: f64,
    #[serde(default = "unit_decay")]
    pub decay: f64,
    pub start: Point,
    pub target: Option<Point>,
    pub stop_residual: Option<f64>,
}

fn unit_decay() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Blocks {
    pub blocks: usize,
    pub max_block_len: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ell2 {
    pub construction: Ell2Params,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    /// Radii `N` of the AW-distance certificates.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
}

fn default_checkpoints() -> usize {
    100
}

fn default_radii() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stable {
    pub scenario: ScenarioSpec,
    #[serde(default = "unit_decay")]
    pub delta: f64,
    pub start: Option<Point>,
    pub stop_residual: Option<f64>,
}

#[derive(Debug)]
pub enum ProbeSpec {
    Omega(OmegaProbe),
    OmegaRandom(OmegaRandomProbe),
    Exposure(ExposureProbe),
    Aw(AwProbe),
    AwUnstableFamily(AwFamilyProbe),
    Containment(ContainmentProbe),
    Facts(FactsProbe),
}

pub const PROBE_KINDS: [&str; 7] = [
    "omega",
    "omega-random",
    "exposure",
    "aw",
    "aw-unstable-family",
    "containment",
    "facts",
];

impl ProbeSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProbeSpec::Omega(_) => "omega",
            ProbeSpec::OmegaRandom(_) => "omega-random",
            ProbeSpec::Exposure(_) => "exposure",
            ProbeSpec::Aw(_) => "aw",
            ProbeSpec::AwUnstableFamily(_) => "aw-unstable-family",
            ProbeSpec::Containment(_) => "containment",
            ProbeSpec::Facts(_) => "facts",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaProbe {
    pub u_basis: Vec<Point>,
    pub v_basis: Vec<Point>,
    /// When set, also report the separation constants for this `M`.
    pub m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaRandomProbe {
    pub dim: usize,
    pub u_dim: usize,
    pub v_dim: usize,
    pub m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExposureProbe {
    pub set: SetDescriptor,
    pub f: Point,
    pub alphas: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    2000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AwProbe {
    pub a: SetDescriptor,
    pub c: SetDescriptor,
    pub radii: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AwFamilyProbe {
    /// Pairs `(C_k, D_k)` for `k = 1..=max_k`.
    pub max_k: usize,
    pub radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainmentProbe {
    pub sets: Vec<SetDescriptor>,
    pub target: ContainmentTarget,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactsProbe {
    pub norms: Option<NormsFact>,
    pub cos_separation: Option<CosFact>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsFact {
    /// Set containing `eps·B`.
    pub set: SetDescriptor,
    pub eps: f64,
    pub k: f64,
    pub trials: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosFact {
    pub theta1: f64,
    pub theta2: f64,
    pub trials: usize,
    pub dim: Option<usize>,
}

/// Deserializes `T`, prefixing errors with the JSON path of the failing field.
fn with_path<T: DeserializeOwned>(value: Value) -> std::result::Result<T, String> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.into_inner().to_string()
        } else {
            format!("{path}: {}", e.into_inner())
        }
    })
}

fn split_kind<'de, D: Deserializer<'de>>(
    deserializer: D,
    kinds: &[&str],
) -> std::result::Result<(String, Value), D::Error> {
    let mut value = Value::deserialize(deserializer)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| D::Error::custom("expected an object with a `kind` field"))?;
    let kind = match obj.remove("kind") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(D::Error::custom("kind: expected a string")),
        None => return Err(D::Error::missing_field("kind")),
    };
    if !kinds.contains(&kind.as_str()) {
        return Err(D::Error::custom(format!(
            "kind: unknown kind `{kind}`, expected one of {}",
            kinds.join(", ")
        )));
    }
    Ok((kind, value))
}

impl<'de> Deserialize<'de> for Experiment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (kind, rest) = split_kind(deserializer, &EXPERIMENT_KINDS)?;
        let exp = match kind.as_str() {
            "classical" => with_path(rest).map(Experiment::Classical),
            "perturbed" => with_path(rest).map(Experiment::Perturbed),
            "example44" => with_path(rest).map(Experiment::Example44),
            "example51" => with_path(rest).map(Experiment::Example51),
            "ell2" => with_path(rest).map(Experiment::Ell2),
            "stable-scenario" => with_path(rest).map(Experiment::StableScenario),
            "probe" => {
                #[derive(Deserialize)]
                #[serde(deny_unknown_fields)]
                struct Wrapper {
                    probe: ProbeSpec,
                }
                with_path::<Wrapper>(rest).map(|w| Experiment::Probe(w.probe))
            }
            _ => unreachable!("kind checked above"),
        };
        exp.map_err(D::Error::custom)
    }
}

impl<'de> Deserialize<'de> for ProbeSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (kind, rest) = split_kind(deserializer, &PROBE_KINDS)?;
        let spec = match kind.as_str() {
            "omega" => with_path(rest).map(ProbeSpec::Omega),
            "omega-random" => with_path(rest).map(ProbeSpec::OmegaRandom),
            "exposure" => with_path(rest).map(ProbeSpec::Exposure),
            "aw" => with_path(rest).map(ProbeSpec::Aw),
            "aw-unstable-family" => with_path(rest).map(ProbeSpec::AwUnstableFamily),
            "containment" => with_path(rest).map(ProbeSpec::Containment),
            "facts" => with_path(rest).map(ProbeSpec::Facts),
            _ => unreachable!("kind checked above"),
        };
        spec.map_err(D::Error::custom)
    }
}

/// A parsed configuration together with the identity of the file it came from.
#[derive(Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub sha256: String,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text).context("config is not valid JSON")?;
    with_path(value).map_err(|e| anyhow!("invalid config: {e}"))
}

pub fn load_config(path: &std::path::Path) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("config is not UTF-8")?;
    let config = parse_config(text)?;
    if config.record_stride == 0 {
        return Err(anyhow!("invalid config: record_stride: must be at least 1"));
    }
    Ok(LoadedConfig {
        config,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}
