//! Subcommand bodies. Each returns the rendered output; nothing is written here.

use coopcov::coverage::{default_rho_grid, default_threshold_grid, log_grid, optimize_rho, qc, sweep_threshold, RHO_SEARCH_STEP};
use coopcov::geometry::{coop_disc, delaunay_pairs};
use coopcov::interference::{li, li_dpc, lj, mean_interference, mean_interference_dpc};
use coopcov::simulator::{build_realization, estimate_coverage_grid, realization_rng, sinr_map, DistanceModel, PhaseModel};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{render, render_sections};
use crate::CliError;

/// `|z|` at or above which a simulated estimate is flagged.
pub const Z_WARNING: f64 = 3.0;

#[derive(Debug, Serialize)]
struct CoverageRow {
    rho: f64,
    qc: f64,
    qc1: f64,
    qc2: f64,
}

#[derive(Debug, Serialize)]
struct ThresholdRow {
    #[serde(rename = "T")]
    threshold: f64,
    qc_nocoop: f64,
    qc_fullcoop: f64,
    qc_opt: f64,
    rho_star: f64,
}

#[derive(Debug, Serialize)]
struct SimRow {
    phase: PhaseModel,
    distance: DistanceModel,
    dpc: bool,
    rho: f64,
    #[serde(rename = "T")]
    threshold: f64,
    coverage: f64,
    stderr: f64,
    n_realizations: usize,
    redraws: usize,
    analytic: Option<f64>,
    z: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DiscRow {
    i: usize,
    j: usize,
    bi_x: f64,
    bi_y: f64,
    bj_x: f64,
    bj_y: f64,
    center_x: f64,
    center_y: f64,
    /// Infinite when the disc degenerates to the bisector half-plane.
    radius: f64,
}

#[derive(Debug, Serialize)]
struct InterferenceRow {
    s: f64,
    rho: f64,
    r2: f64,
    li: f64,
    li_dpc: f64,
    lj: f64,
    mean: f64,
    mean_dpc: f64,
}

/// Keeps parameter errors as configuration errors; anything else is mapped by `other`.
fn classify(other: fn(coopcov::Error) -> CliError) -> impl Fn(coopcov::Error) -> CliError {
    move |e| match e {
        coopcov::Error::InvalidParams(_) | coopcov::Error::InvalidWindow(_) | coopcov::Error::InvalidRatio(_) => {
            CliError::Config(e.to_string())
        }
        e => other(e),
    }
}

fn numerical() -> impl Fn(coopcov::Error) -> CliError {
    classify(CliError::Numerical)
}

fn simulation() -> impl Fn(coopcov::Error) -> CliError {
    classify(CliError::Simulation)
}

fn coverage_rows(cfg: &RunConfig, rhos: &[f64]) -> Result<Vec<CoverageRow>, CliError> {
    use rayon::prelude::*;
    rhos.par_iter()
        .map(|&rho| {
            let (q, q1, q2) = qc(rho, &cfg.params, &cfg.quad, cfg.model.dpc).map_err(numerical())?;
            Ok(CoverageRow {
                rho,
                qc: q.clamp(0.0, 1.0),
                qc1: q1,
                qc2: q2,
            })
        })
        .collect()
}

/// `qc` at the configured `ρ` (or each `rho_grid` entry), or at the optimal `ρ`.
pub fn coverage(cfg: &RunConfig, optimize: bool) -> Result<String, CliError> {
    let rows = if optimize {
        let (rho, q, q1, q2) =
            optimize_rho(&cfg.params, &cfg.quad, cfg.model.dpc, RHO_SEARCH_STEP).map_err(numerical())?;
        vec![CoverageRow {
            rho,
            qc: q.clamp(0.0, 1.0),
            qc1: q1,
            qc2: q2,
        }]
    } else {
        coverage_rows(cfg, cfg.rho_grid.as_deref().unwrap_or(&[cfg.params.rho]))?
    };
    render(&rows, cfg.format)
}

/// `qc` over `rho_grid`, by default 0, 0.05, ..., 1.
pub fn sweep_rho(cfg: &RunConfig) -> Result<String, CliError> {
    let grid = cfg.rho_grid.clone().unwrap_or_else(default_rho_grid);
    render(&coverage_rows(cfg, &grid)?, cfg.format)
}

/// No cooperation, cooperation everywhere, and the configured or optimal policy
/// over `threshold_grid`.
pub fn sweep_threshold_cmd(cfg: &RunConfig, optimize: bool) -> Result<String, CliError> {
    let grid = cfg.threshold_grid.clone().unwrap_or_else(default_threshold_grid);
    let dpc = cfg.model.dpc;
    let p = cfg.params;
    let none = sweep_threshold(&p.with_rho(1.0), &grid, &cfg.quad, false, false).map_err(numerical())?;
    let full = sweep_threshold(&p.with_rho(0.0), &grid, &cfg.quad, dpc, false).map_err(numerical())?;
    let chosen = sweep_threshold(&p, &grid, &cfg.quad, dpc, optimize).map_err(numerical())?;
    let rows: Vec<ThresholdRow> = none
        .points
        .iter()
        .zip(&full.points)
        .zip(&chosen.points)
        .map(|((a, b), c)| ThresholdRow {
            threshold: a.x,
            qc_nocoop: a.qc_clipped(),
            qc_fullcoop: b.qc_clipped(),
            qc_opt: c.qc_clipped(),
            rho_star: c.rho_star.unwrap_or(p.rho),
        })
        .collect();
    render(&rows, cfg.format)
}

/// Monte Carlo estimates over `rho_grid` × `threshold_grid` (default: the
/// configured point), optionally next to the analytic value.
///
/// Returns the output and one warning line per estimate with `|z| >= 3`.
pub fn simulate(cfg: &RunConfig, compare: bool) -> Result<(String, Vec<String>), CliError> {
    let rhos = cfg.rho_grid.clone().unwrap_or_else(|| vec![cfg.params.rho]);
    let thresholds = cfg.threshold_grid.clone().unwrap_or_else(|| vec![cfg.params.threshold]);
    let estimates =
        estimate_coverage_grid(&cfg.sim_config(), &[cfg.model], &rhos, &thresholds).map_err(simulation())?;
    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(estimates.len());
    for e in estimates {
        let (analytic, z) = if compare {
            let p = cfg.params.with_rho(e.rho).with_threshold(e.threshold);
            let a = qc(e.rho, &p, &cfg.quad, cfg.model.dpc).map_err(numerical())?.0;
            let z = e.z_score(a);
            if z.abs() >= Z_WARNING {
                warnings.push(format!(
                    "warning: rho={} T={}: simulated {:.4} vs analytic {a:.4} (z = {z:.2}); \
                     a finite window drops distant interferers, which inflates simulated coverage",
                    e.rho, e.threshold, e.coverage
                ));
            }
            (Some(a), Some(z))
        } else {
            (None, None)
        };
        rows.push(SimRow {
            phase: e.model.phase,
            distance: e.model.distance,
            dpc: e.model.dpc,
            rho: e.rho,
            threshold: e.threshold,
            coverage: e.coverage,
            stderr: e.stderr,
            n_realizations: e.n_realizations,
            redraws: e.redraws,
            analytic,
            z,
        });
    }
    Ok((render(&rows, cfg.format)?, warnings))
}

/// SINR raster of one realization plus the cooperation disc of every
/// Delaunay pair, in both orientations.
pub fn region(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let mut rng = realization_rng(cfg.seed, 0);
    let real = build_realization(&cfg.params, &cfg.window, cfg.metric, &mut rng).map_err(simulation())?;
    let map = sinr_map(&real, &cfg.params, cfg.nx, cfg.ny).map_err(simulation())?;
    let mut discs = Vec::new();
    for (i, j) in delaunay_pairs(&real.atoms) {
        for (a, b) in [(i, j), (j, i)] {
            let (ba, bb) = (real.atoms[a], real.atoms[b]);
            let d = coop_disc(ba, bb, cfg.params.rho).map_err(simulation())?;
            discs.push(DiscRow {
                i: a,
                j: b,
                bi_x: ba.x,
                bi_y: ba.y,
                bj_x: bb.x,
                bj_y: bb.y,
                center_x: d.center.x,
                center_y: d.center.y,
                radius: d.radius,
            });
        }
    }
    render_sections(&map.pixels, &discs, cfg.format)
}

/// Interference transforms on `s_grid` (default 25 log-spaced points on
/// [1e-3, 1e3]) at the configured `ρ` and `r2`.
pub fn interference(cfg: &RunConfig) -> Result<String, CliError> {
    let grid = cfg.s_grid.clone().unwrap_or_else(|| log_grid(1e-3, 1e3, 25));
    if grid.iter().any(|&s| s < 0.0) {
        return Err(CliError::Config("s_grid entries must be >= 0".into()));
    }
    let (p, rho, r2) = (cfg.params, cfg.params.rho, cfg.r2);
    let mean = mean_interference(rho, r2, &p).map_err(numerical())?;
    let mean_dpc = mean_interference_dpc(rho, r2, &p).map_err(numerical())?;
    let rows = grid
        .iter()
        .map(|&s| {
            let z = Complex64::from(s);
            Ok(InterferenceRow {
                s,
                rho,
                r2,
                li: li(z, rho, r2, &p).map_err(numerical())?.value.re,
                li_dpc: li_dpc(z, rho, r2, &p).map_err(numerical())?.value.re,
                lj: lj(z, rho, r2, &p).map_err(numerical())?.value.re,
                mean,
                mean_dpc,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    render(&rows, cfg.format)
}
