//! Run configuration: a flat TOML document, every key optional.
//!
//! ```toml
//! lambda = 1.0
//! beta = 4.0
//! threshold = 0.8
//! rho = 0.5
//! window_area = 20.0
//! n_realizations = 10000
//! model = "mean-theta:far-field"
//! threshold_grid = [0.1, 0.8, 2.0]
//! ```

use std::path::{Path, PathBuf};

use coopcov::coverage::QuadratureConfig;
use coopcov::geometry::{Metric, Window};
use coopcov::simulator::{DistanceModel, PhaseModel, SimConfig, SinrModel};
use coopcov::SystemParams;
use serde::Deserialize;

use crate::CliError;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Contents of the configuration file. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub lambda: f64,
    pub beta: f64,
    pub p: f64,
    pub sigma2: f64,
    pub threshold: f64,
    pub rho: f64,
    /// Area of the centred square simulation window.
    pub window_area: f64,
    pub metric: Metric,
    pub n_realizations: usize,
    pub seed: u64,
    /// `PHASE:DISTANCE`, e.g. `exact-theta:exact`.
    pub model: String,
    pub dpc: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub r_max_factor: f64,
    pub s_max_initial: f64,
    pub s_tail_tol: f64,
    pub rho_grid: Option<Vec<f64>>,
    pub threshold_grid: Option<Vec<f64>>,
    /// Transform arguments for `interference`.
    pub s_grid: Option<Vec<f64>>,
    /// Second-neighbour distance for `interference`.
    pub r2: f64,
    /// Raster size for `region`.
    pub nx: usize,
    pub ny: usize,
}

impl Default for FileConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        let q = QuadratureConfig::default();
        Self {
            lambda: p.lambda,
            beta: p.beta,
            p: p.p,
            sigma2: p.sigma2,
            threshold: p.threshold,
            rho: p.rho,
            window_area: 20.0,
            metric: Metric::Euclidean,
            n_realizations: 10_000,
            seed: 1,
            model: "mean-theta:far-field".into(),
            dpc: false,
            format: Format::Csv,
            out: None,
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            r_max_factor: q.r_max_factor,
            s_max_initial: q.s_max_initial,
            s_tail_tol: q.s_tail_tol,
            rho_grid: None,
            threshold_grid: None,
            s_grid: None,
            r2: 1.0,
            nx: 100,
            ny: 100,
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dpc: bool,
    pub model: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

/// Validated configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub window: Window,
    pub metric: Metric,
    pub quad: QuadratureConfig,
    pub model: SinrModel,
    pub n_realizations: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub rho_grid: Option<Vec<f64>>,
    pub threshold_grid: Option<Vec<f64>>,
    pub s_grid: Option<Vec<f64>>,
    pub r2: f64,
    pub nx: usize,
    pub ny: usize,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, over: Overrides) -> Result<Self, CliError> {
        let params = SystemParams::new(file.lambda, file.beta, file.p, file.sigma2, file.threshold, file.rho)
            .map_err(config_error)?;
        let window = Window::centered_square(file.window_area).map_err(config_error)?;
        let quad = QuadratureConfig {
            rel_tol: file.rel_tol,
            abs_tol: file.abs_tol,
            r_max_factor: file.r_max_factor,
            s_max_initial: file.s_max_initial,
            s_tail_tol: file.s_tail_tol,
        };
        quad.validate().map_err(config_error)?;
        let mut model = parse_model(over.model.as_deref().unwrap_or(&file.model))?;
        model.dpc = file.dpc || over.dpc;
        let config = Self {
            params,
            window,
            metric: file.metric,
            quad,
            model,
            n_realizations: file.n_realizations,
            seed: over.seed.unwrap_or(file.seed),
            output_path: over.out.or(file.out),
            format: over.format.unwrap_or(file.format),
            rho_grid: file.rho_grid,
            threshold_grid: file.threshold_grid,
            s_grid: file.s_grid,
            r2: file.r2,
            nx: file.nx,
            ny: file.ny,
        };
        if config.n_realizations == 0 {
            return Err(CliError::Config("n_realizations must be >= 1".into()));
        }
        if !(config.r2 > 0.0 && config.r2.is_finite()) {
            return Err(CliError::Config(format!("r2 = {}", config.r2)));
        }
        for grid in [&config.rho_grid, &config.threshold_grid, &config.s_grid].into_iter().flatten() {
            if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config("grids must be non-empty and finite".into()));
            }
        }
        Ok(config)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig::new(self.params, self.window, self.n_realizations, self.seed).with_metric(self.metric)
    }
}

/// Parses `PHASE:DISTANCE`; `x` is accepted as the separator too.
pub fn parse_model(text: &str) -> Result<SinrModel, CliError> {
    let bad = || CliError::Config(format!("model {text:?}: expected {{exact-theta|mean-theta}}:{{far-field|exact}}"));
    let (phase, rest) = [("exact-theta", PhaseModel::ExactTheta), ("mean-theta", PhaseModel::MeanTheta)]
        .into_iter()
        .find_map(|(name, phase)| text.trim().strip_prefix(name).map(|rest| (phase, rest)))
        .ok_or_else(bad)?;
    let rest = rest.strip_prefix(':').or_else(|| rest.strip_prefix('x')).ok_or_else(bad)?;
    let distance = match rest {
        "far-field" => DistanceModel::FarField,
        "exact" => DistanceModel::Exact,
        _ => return Err(bad()),
    };
    Ok(SinrModel::new(phase, distance, false))
}

fn config_error(e: coopcov::Error) -> CliError {
    CliError::Config(e.to_string())
}
