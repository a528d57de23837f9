use std::path::{Path, PathBuf};

use bloch_hfh::hfh::{TuningParameter, CLASSIFY_TOL, CLUSTER_TOL, DECOUPLE_TOL};
use bloch_hfh::{Problem, VertexLabel};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Bands,
    Hfh,
    DiracTune,
    Effective,
    Decay,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Bands => "bands",
            Task::Hfh => "hfh",
            Task::DiracTune => "dirac-tune",
            Task::Effective => "effective",
            Task::Decay => "decay",
        }
    }
}

/// Asymptotic overlay about one vertex group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub vertex: VertexLabel,
    /// Band counted from 1.
    pub band: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandsParams {
    pub samples_per_segment: usize,
    pub n_bands: usize,
    pub overlay: Vec<Overlay>,
    /// Largest `|K − K0|` at which overlay curves are drawn.
    pub overlay_radius: f64,
}

impl Default for BandsParams {
    fn default() -> Self {
        Self { samples_per_segment: 21, n_bands: 8, overlay: Vec::new(), overlay_radius: 0.3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HfhParams {
    pub vertex: VertexLabel,
    /// Band counted from 1.
    pub band: usize,
    pub oracle: bool,
    pub fd_step: f64,
    pub cluster_tol: f64,
    pub classify_tol: f64,
    pub decouple_tol: f64,
}

impl Default for HfhParams {
    fn default() -> Self {
        Self {
            vertex: VertexLabel::X,
            band: 1,
            oracle: true,
            fd_step: 0.01 * std::f64::consts::FRAC_PI_2,
            cluster_tol: CLUSTER_TOL,
            classify_tol: CLASSIFY_TOL,
            decouple_tol: DECOUPLE_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneParams {
    pub parameter: TuningParameter,
    pub range: [f64; 2],
    pub vertex: VertexLabel,
    /// Lower and upper band, counted from 1.
    pub bands: [usize; 2],
    pub gap_tol: f64,
    pub scan_points: usize,
}

impl Default for TuneParams {
    fn default() -> Self {
        Self {
            parameter: TuningParameter::BetaL,
            range: [0.5, 1.5],
            vertex: VertexLabel::M,
            bands: [3, 4],
            gap_tol: 1e-4,
            scan_points: 11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayParams {
    pub frequencies: Vec<f64>,
    /// Long-scale axis, counted from 1.
    pub direction: usize,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self { frequencies: Vec::new(), direction: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EffectiveParams {
    pub fd_step: f64,
}

impl Default for EffectiveParams {
    fn default() -> Self {
        Self { fd_step: 0.02 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub task: Option<Task>,
    pub problem: Problem,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub bands: BandsParams,
    /// Vertex group analysed by `hfh` and `decay`.
    #[serde(default)]
    pub hfh: HfhParams,
    #[serde(default)]
    pub tune: TuneParams,
    #[serde(default)]
    pub decay: DecayParams,
    #[serde(default)]
    pub effective: EffectiveParams,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if json {
            serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
        }
    }
}
