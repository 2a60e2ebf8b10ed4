use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use vacmirror::{ForceProfile, InitialState, MirrorMechanics, MirrorModel, ScatteringTable};

/// Config rejection, anchored to a line of the file when possible.
#[derive(Debug)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.path.display(), l, self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Perfect,
    Lorentzian,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: Kind,
    #[serde(default = "one")]
    pub omega: f64,
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsBlock {
    #[serde(default = "default_tau")]
    pub tau_omega: f64,
    #[serde(default)]
    pub k_over_m: f64,
}

impl Default for MechanicsBlock {
    fn default() -> Self {
        Self { tau_omega: default_tau(), k_over_m: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { omega_min: 1e-3, omega_max: 1e3, points: 2000, spacing: Spacing::Log }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    pub contour_re_max: Option<f64>,
    pub contour_im_max: Option<f64>,
    #[serde(default = "default_moduli")]
    pub probe_moduli: usize,
    #[serde(default = "default_arguments")]
    pub probe_arguments: usize,
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        Self { contour_re_max: None, contour_im_max: None, probe_moduli: default_moduli(), probe_arguments: default_arguments() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Auto,
    Local,
    Memory,
    Modal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ForceBlock {
    Zero,
    GaussianPulse { amplitude: f64, center: f64, width: f64 },
    Step { amplitude: f64, start: f64 },
    Sinusoid { amplitude: f64, omega: f64, #[serde(default)] ramp: f64 },
    Custom { start: f64, dt: f64, samples: Vec<f64> },
}

impl ForceBlock {
    pub fn profile(&self) -> ForceProfile<f64> {
        match self.clone() {
            Self::Zero => ForceProfile::Zero,
            Self::GaussianPulse { amplitude, center, width } => ForceProfile::GaussianPulse { amplitude, center, width },
            Self::Step { amplitude, start } => ForceProfile::Step { amplitude, start },
            Self::Sinusoid { amplitude, omega, ramp } => ForceProfile::Sinusoid { amplitude, omega, ramp },
            Self::Custom { start, dt, samples } => ForceProfile::Custom { start, dt, samples },
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub a: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    pub dt: Option<f64>,
    #[serde(default = "default_window")]
    pub kernel_window: f64,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default = "default_force")]
    pub force: ForceBlock,
}

impl Default for SimulationBlock {
    fn default() -> Self {
        Self {
            integrator: Integrator::Auto,
            t_end: default_t_end(),
            dt: None,
            kernel_window: default_window(),
            initial: InitialBlock::default(),
            force: default_force(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckBlock {
    #[serde(default = "default_kk")]
    pub kk_threshold: f64,
    #[serde(default = "default_spectral")]
    pub spectral_threshold: f64,
    #[serde(default = "default_consistency")]
    pub consistency_threshold: f64,
}

impl Default for CrosscheckBlock {
    fn default() -> Self {
        Self { kk_threshold: default_kk(), spectral_threshold: default_spectral(), consistency_threshold: default_consistency() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: default_dir(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub mechanics: MechanicsBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub simulation: SimulationBlock,
    #[serde(default)]
    pub crosscheck: CrosscheckBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn one() -> f64 {
    1.0
}
fn default_tau() -> f64 {
    1e-3
}
fn default_moduli() -> usize {
    40
}
fn default_arguments() -> usize {
    25
}
fn default_t_end() -> f64 {
    100.0
}
fn default_window() -> f64 {
    40.0
}
fn default_force() -> ForceBlock {
    ForceBlock::Zero
}
fn default_kk() -> f64 {
    1e-3
}
fn default_spectral() -> f64 {
    1e-4
}
fn default_consistency() -> f64 {
    1e-2
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

/// A parsed and checked config with its model materialized.
pub struct Loaded {
    pub config: RunConfig,
    pub model: MirrorModel<f64>,
    pub mech: MirrorMechanics<f64>,
}

impl Loaded {
    pub fn init(&self) -> InitialState<f64> {
        let i = self.config.simulation.initial;
        InitialState { q: i.q, v: i.v, a: i.a }
    }

    pub fn writes(&self, f: Format) -> bool {
        self.config.output.formats.contains(&f)
    }
}

pub fn load(path: &Path) -> Result<Loaded, ConfigError> {
    let fail = |line: Option<usize>, message: String| ConfigError { path: path.to_path_buf(), line, message };
    let text = std::fs::read_to_string(path).map_err(|e| fail(None, format!("cannot read config: {e}")))?;
    let config: RunConfig = toml::from_str(&text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
        fail(line, e.message().trim().to_string())
    })?;
    let at = |key: &str, message: String| fail(line_of(&text, key), message);

    let positive = |key: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(at(key, format!("`{key}` must be positive and finite, got {v}")))
        }
    };
    let nonnegative = |key: &str, v: f64| {
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(at(key, format!("`{key}` must be nonnegative and finite, got {v}")))
        }
    };

    positive("omega", config.model.omega)?;
    nonnegative("tau_omega", config.mechanics.tau_omega)?;
    nonnegative("k_over_m", config.mechanics.k_over_m)?;
    let g = &config.grid;
    positive("omega_min", g.omega_min)?;
    positive("omega_max", g.omega_max)?;
    if g.omega_max <= g.omega_min {
        return Err(at("omega_max", "`omega_max` must exceed `omega_min`".into()));
    }
    if g.points < 4 {
        return Err(at("points", format!("`points` must be at least 4, got {}", g.points)));
    }
    if config.analysis.probe_moduli < 2 || config.analysis.probe_arguments < 2 {
        return Err(at("probe_moduli", "probe counts must be at least 2".into()));
    }
    for (key, v) in [("contour_re_max", config.analysis.contour_re_max), ("contour_im_max", config.analysis.contour_im_max)] {
        if let Some(v) = v {
            positive(key, v)?;
        }
    }
    let s = &config.simulation;
    positive("t_end", s.t_end)?;
    if let Some(dt) = s.dt {
        positive("dt", dt)?;
    }
    positive("kernel_window", s.kernel_window)?;
    match &s.force {
        ForceBlock::GaussianPulse { width, .. } => positive("width", *width)?,
        ForceBlock::Sinusoid { omega, ramp, .. } => {
            positive("omega", *omega)?;
            nonnegative("ramp", *ramp)?;
        }
        ForceBlock::Custom { dt, samples, .. } => {
            positive("dt", *dt)?;
            if samples.is_empty() {
                return Err(at("samples", "custom force needs samples".into()));
            }
        }
        _ => {}
    }
    let c = &config.crosscheck;
    positive("kk_threshold", c.kk_threshold)?;
    positive("spectral_threshold", c.spectral_threshold)?;
    positive("consistency_threshold", c.consistency_threshold)?;

    let model = match config.model.kind {
        Kind::Perfect => MirrorModel::Perfect,
        Kind::Lorentzian => MirrorModel::lorentzian(config.model.omega),
        Kind::Tabulated => {
            let rel = config.model.table.as_ref().ok_or_else(|| at("kind", "tabulated model needs `table`".into()))?;
            let file = path.parent().unwrap_or(Path::new(".")).join(rel);
            let body = std::fs::read_to_string(&file)
                .map_err(|e| at("table", format!("cannot read table {}: {e}", file.display())))?;
            let table = ScatteringTable::parse(&body).map_err(|e| at("table", format!("{}: {e}", file.display())))?;
            MirrorModel::Tabulated(table)
        }
    };
    if config.model.kind != Kind::Tabulated && config.model.table.is_some() {
        return Err(at("table", "`table` is only valid for tabulated models".into()));
    }
    let mech = MirrorMechanics::new(1.0, config.mechanics.k_over_m, config.mechanics.tau_omega)
        .map_err(|e| at("tau_omega", e.to_string()))?;
    Ok(Loaded { config, model, mech })
}

/// First line assigning `key`, 1-based.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}
