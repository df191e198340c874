use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{FamilyArg, Format, LawArg};
use crate::{CliError, CliResult};

/// Contents of a `--config` TOML file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub nats: Option<bool>,
    #[serde(default)]
    pub gaussian: GaussianFile,
    #[serde(default)]
    pub degraded: DegradedFile,
    #[serde(default)]
    pub inner: InnerFile,
    #[serde(default)]
    pub fading: FadingFile,
    #[serde(default)]
    pub simulate: SimulateFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianFile {
    pub power: Option<f64>,
    pub sigmas: Option<Vec<f64>>,
    pub points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradedFile {
    pub channel: Option<PathBuf>,
    pub mu_grid: Option<Vec<f64>>,
    pub grid: Option<usize>,
    pub samples: Option<usize>,
    pub refine_iters: Option<usize>,
    pub seed: Option<u64>,
    pub u_cardinality: Option<usize>,
    pub max_grid_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerFile {
    pub channel: Option<PathBuf>,
    pub caps: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingFile {
    pub family: Option<FamilyArg>,
    pub m: Option<f64>,
    pub s_prime: Option<f64>,
    pub power: Option<f64>,
    pub law: Option<LawArg>,
    pub points: Option<usize>,
    pub layers: Option<usize>,
    pub max_iters: Option<usize>,
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub channel: Option<PathBuf>,
    pub dist: Option<PathBuf>,
    pub n: Option<Vec<usize>>,
    pub rates: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }
}

/// Options shared by every subcommand after merging flags and file.
#[derive(Clone, Debug, Serialize)]
pub struct Common {
    pub format: Format,
    pub workers: Option<usize>,
    pub units: Units,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Bits,
    Nats,
}

impl Units {
    /// Converts a rate in bits.
    pub fn scale(self, bits: f64) -> f64 {
        match self {
            Units::Bits => bits,
            Units::Nats => bits * std::f64::consts::LN_2,
        }
    }
}

/// `flag`, else `file`, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn require<T>(flag: Option<T>, file: Option<T>, what: &str) -> CliResult<T> {
    flag.or(file).ok_or_else(|| CliError::Input(format!("missing required --{what}")))
}

/// Parses `a..b` (inclusive) or a comma-separated list.
pub fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::Input(format!("cannot parse seeds '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}
