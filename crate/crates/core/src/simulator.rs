//! Monte Carlo ground truth for the coverage model.
//!
//! A realization holds the stations, one user per cell and the typical
//! location (the window centre). Fading is drawn separately so the same
//! network and the same gains can be scored under several SINR models,
//! cooperation parameters and thresholds.
//!
//! The station nearest the typical location serves it as its primary user,
//! so the user sampled in that cell is never an interferer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::FadingDraw;
use crate::error::{Error, Result};
use crate::geometry::{
    policy_action, sample_ppp, sample_users, Action, AtomIndex, Metric, Point2, TwoNearest, Window,
    DEFAULT_CELL_ATTEMPTS,
};
use crate::params::SystemParams;

/// Attempts at drawing a window with at least two stations.
pub const MAX_REDRAWS: usize = 100;

/// Phase treatment of cooperative interferers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModel {
    /// Keeps the `√(h1 h2) cos(θ1 − θ2)` cross term.
    ExactTheta,
    /// Replaces the cross term by its mean, zero.
    MeanTheta,
}

/// Distance treatment of cooperative interferers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceModel {
    /// Both streams of user `n` arrive from its own station.
    FarField,
    /// Every transmitting station at its true distance.
    Exact,
}

/// SINR model used to score the typical location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SinrModel {
    pub phase: PhaseModel,
    pub distance: DistanceModel,
    /// When the typical location cooperates, cancel the streams its serving
    /// pair transmits: far-field, those of the pair's own users; exact, every
    /// stream either station takes part in.
    pub dpc: bool,
}

impl SinrModel {
    pub const fn new(phase: PhaseModel, distance: DistanceModel, dpc: bool) -> Self {
        Self {
            phase,
            distance,
            dpc,
        }
    }

    /// The model the analytic pipeline describes exactly.
    pub const fn analytic(dpc: bool) -> Self {
        Self::new(PhaseModel::MeanTheta, DistanceModel::FarField, dpc)
    }
}

impl Default for SinrModel {
    fn default() -> Self {
        Self::analytic(false)
    }
}

/// A user with its two nearest stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub position: Point2,
    pub b1: usize,
    pub b2: usize,
    pub r1: f64,
    pub r2: f64,
    pub action: Action,
}

impl UserRecord {
    fn action_at(&self, rho: f64) -> Action {
        if self.r1 <= rho * self.r2 {
            Action::NoCoop
        } else {
            Action::FullCoop
        }
    }
}

/// One network draw. `users[i]` is the user of station `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub window: Window,
    pub metric: Metric,
    pub atoms: Vec<Point2>,
    pub users: Vec<UserRecord>,
    pub location: Point2,
    pub typical: TwoNearest,
    pub typical_action: Action,
    /// Windows discarded for holding fewer than two stations.
    pub redraws: usize,
}

impl NetworkRealization {
    /// Builds a realization on given stations, with the typical location at `location`.
    pub fn from_atoms<R: Rng + ?Sized>(
        atoms: Vec<Point2>,
        window: Window,
        metric: Metric,
        location: Point2,
        params: &SystemParams,
        rng: &mut R,
    ) -> Result<Self> {
        if atoms.len() < 2 {
            return Err(Error::InsufficientAtoms(atoms.len()));
        }
        let index = AtomIndex::new(&atoms, window, metric);
        let positions = sample_users(&index, rng, DEFAULT_CELL_ATTEMPTS)?;
        let users = positions
            .into_iter()
            .map(|z| {
                let t = index.two_nearest(z)?;
                Ok(UserRecord {
                    position: z,
                    b1: t.i1,
                    b2: t.i2,
                    r1: t.r1,
                    r2: t.r2,
                    action: policy_action(t.r1, t.r2, params.rho)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let typical = index.two_nearest(location)?;
        let typical_action = policy_action(typical.r1, typical.r2, params.rho)?;
        Ok(Self {
            window,
            metric,
            atoms,
            users,
            location,
            typical,
            typical_action,
            redraws: 0,
        })
    }

    fn receiver(&self) -> Receiver {
        Receiver {
            location: self.location,
            nearest: self.typical,
        }
    }
}

/// A receiving location with its two nearest stations.
#[derive(Debug, Clone, Copy)]
struct Receiver {
    location: Point2,
    nearest: TwoNearest,
}

impl Receiver {
    fn action_at(&self, rho: f64) -> Action {
        if self.nearest.r1 <= rho * self.nearest.r2 {
            Action::NoCoop
        } else {
            Action::FullCoop
        }
    }
}

/// Draws stations, users and the typical geometry; windows with fewer than
/// two stations are redrawn.
pub fn build_realization<R: Rng + ?Sized>(
    params: &SystemParams,
    window: &Window,
    metric: Metric,
    rng: &mut R,
) -> Result<NetworkRealization> {
    params.validate()?;
    for redraws in 0..MAX_REDRAWS {
        let atoms = sample_ppp(params, window, rng);
        if atoms.len() < 2 {
            continue;
        }
        let mut real =
            NetworkRealization::from_atoms(atoms, *window, metric, window.center(), params, rng)?;
        real.redraws = redraws;
        return Ok(real);
    }
    Err(Error::RedrawLimit(MAX_REDRAWS))
}

/// Gains of the two links a stream may use: from its first and second station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkFading {
    pub first: FadingDraw,
    pub second: FadingDraw,
}

/// Gains towards the typical location for its own signal and every user's stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFading {
    pub typical: LinkFading,
    pub users: Vec<LinkFading>,
}

/// Draws all gains, whatever the actions, so that paired comparisons share them.
pub fn draw_fading<R: Rng + ?Sized>(real: &NetworkRealization, p: f64, rng: &mut R) -> RealizationFading {
    let link = |rng: &mut R| LinkFading {
        first: FadingDraw::sample(p, rng),
        second: FadingDraw::sample(p, rng),
    };
    let typical = link(rng);
    let users = (0..real.users.len()).map(|_| link(rng)).collect();
    RealizationFading { typical, users }
}

/// Received signal power at the typical location.
pub fn typical_signal(real: &NetworkRealization, params: &SystemParams, fading: &RealizationFading) -> f64 {
    signal_at(&real.receiver(), params, fading.typical)
}

fn signal_at(rx: &Receiver, params: &SystemParams, own: LinkFading) -> f64 {
    let beta = params.beta;
    let s1 = own.first.g * rx.nearest.r1.powf(-beta);
    match rx.action_at(params.rho) {
        Action::NoCoop => s1,
        Action::FullCoop => {
            let s2 = own.second.g * rx.nearest.r2.powf(-beta);
            let a = s1.sqrt() + s2.sqrt();
            0.5 * a * a
        }
    }
}

/// Interference power at the typical location.
pub fn typical_interference(
    real: &NetworkRealization,
    params: &SystemParams,
    model: SinrModel,
    fading: &RealizationFading,
) -> f64 {
    interference_at(real, &real.receiver(), params, model, |n| fading.users[n])
}

fn interference_at<F: Fn(usize) -> LinkFading>(
    real: &NetworkRealization,
    rx: &Receiver,
    params: &SystemParams,
    model: SinrModel,
    fading: F,
) -> f64 {
    let beta = params.beta;
    let own = rx.nearest.i1;
    let cancel = model.dpc && rx.action_at(params.rho) == Action::FullCoop;
    let cancelled = |bs: usize| cancel && (bs == rx.nearest.i1 || bs == rx.nearest.i2);
    let loss = |bs: usize| {
        real.metric
            .dist(&real.window, real.atoms[bs], rx.location)
            .powf(-beta)
    };
    let mut total = 0.0;
    for (n, user) in real.users.iter().enumerate() {
        if n == own {
            continue;
        }
        let f = fading(n);
        match (model.distance, user.action_at(params.rho)) {
            (DistanceModel::FarField, _) if cancelled(user.b1) => {}
            (DistanceModel::FarField, Action::NoCoop) => total += f.first.g * loss(user.b1),
            (DistanceModel::FarField, Action::FullCoop) => {
                total += 0.5 * loss(user.b1) * combine(f.first, f.second, model.phase);
            }
            (DistanceModel::Exact, Action::NoCoop) => {
                if !cancelled(user.b1) {
                    total += f.first.g * loss(user.b1);
                }
            }
            // the serving pair knows this stream, so it is cancelled as a whole
            (DistanceModel::Exact, Action::FullCoop) if cancelled(user.b1) || cancelled(user.b2) => {}
            (DistanceModel::Exact, Action::FullCoop) => {
                let h1 = f.first.g * loss(user.b1);
                let h2 = f.second.g * loss(user.b2);
                let mut v = h1 + h2;
                if model.phase == PhaseModel::ExactTheta {
                    v += 2.0 * (h1 * h2).sqrt() * (f.first.theta - f.second.theta).cos();
                }
                total += 0.5 * v;
            }
        }
    }
    total
}

/// `g1 + g2`, plus the phase cross term when it is kept.
fn combine(a: FadingDraw, b: FadingDraw, phase: PhaseModel) -> f64 {
    let mut v = a.g + b.g;
    if phase == PhaseModel::ExactTheta {
        v += 2.0 * (a.g * b.g).sqrt() * (a.theta - b.theta).cos();
    }
    v
}

/// SINR at the typical location for given gains.
pub fn sinr_with_fading(
    real: &NetworkRealization,
    params: &SystemParams,
    model: SinrModel,
    fading: &RealizationFading,
) -> f64 {
    let signal = typical_signal(real, params, fading);
    signal / (params.sigma2 + typical_interference(real, params, model, fading))
}

/// SINR at the typical location with freshly drawn gains.
pub fn typical_sinr<R: Rng + ?Sized>(
    real: &NetworkRealization,
    params: &SystemParams,
    model: SinrModel,
    rng: &mut R,
) -> f64 {
    let fading = draw_fading(real, params.p, rng);
    sinr_with_fading(real, params, model, &fading)
}

/// Generator of realization `index` under `seed`.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Everything a Monte Carlo run needs besides the SINR model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: SystemParams,
    pub window: Window,
    pub metric: Metric,
    pub n_realizations: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(params: SystemParams, window: Window, n_realizations: usize, seed: u64) -> Self {
        Self {
            params,
            window,
            metric: Metric::Euclidean,
            n_realizations,
            seed,
        }
    }

    pub fn with_metric(self, metric: Metric) -> Self {
        Self { metric, ..self }
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_realizations == 0 {
            return Err(Error::InvalidParams("n_realizations must be >= 1".into()));
        }
        if self.window.area() * self.params.lambda < 4.0 {
            return Err(Error::InvalidWindow(format!(
                "window area {} holds fewer than 4 stations on average",
                self.window.area()
            )));
        }
        Ok(())
    }
}

/// Monte Carlo coverage estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub coverage: f64,
    pub stderr: f64,
    pub n_realizations: usize,
    pub model: SinrModel,
    pub rho: f64,
    pub threshold: f64,
    /// Windows redrawn for holding fewer than two stations.
    pub redraws: usize,
}

impl SimEstimate {
    fn from_count(covered: u64, n: usize, model: SinrModel, rho: f64, threshold: f64, redraws: usize) -> Self {
        let q = covered as f64 / n as f64;
        Self {
            coverage: q,
            stderr: (q * (1.0 - q) / n as f64).sqrt(),
            n_realizations: n,
            model,
            rho,
            threshold,
            redraws,
        }
    }

    /// `(coverage − reference)/stderr`, using the reference's binomial error when
    /// the estimate sits at 0 or 1.
    pub fn z_score(&self, reference: f64) -> f64 {
        let se = if self.stderr > 0.0 {
            self.stderr
        } else {
            (reference * (1.0 - reference) / self.n_realizations as f64).sqrt()
        };
        if se == 0.0 {
            return 0.0;
        }
        (self.coverage - reference) / se
    }
}

/// Coverage estimates for every `(model, ρ, T)` combination on shared draws.
///
/// Realization `i` uses the generator [`realization_rng`]`(seed, i)`, so the
/// result does not depend on how the work is scheduled. The output is ordered
/// model-major, then `ρ`, then `T`.
pub fn estimate_coverage_grid(
    config: &SimConfig,
    models: &[SinrModel],
    rhos: &[f64],
    thresholds: &[f64],
) -> Result<Vec<SimEstimate>> {
    config.validate()?;
    for &rho in rhos {
        config.params.with_rho(rho).validate()?;
    }
    let cells = models.len() * rhos.len() * thresholds.len();
    let params = config.params;
    let (counts, redraws) = (0..config.n_realizations as u64)
        .into_par_iter()
        .map(|i| -> Result<(Vec<u64>, usize)> {
            let mut rng = realization_rng(config.seed, i);
            let real = build_realization(&params, &config.window, config.metric, &mut rng)?;
            let fading = draw_fading(&real, params.p, &mut rng);
            let mut hits = vec![0u64; cells];
            let mut k = 0;
            for &model in models {
                for &rho in rhos {
                    let sinr = sinr_with_fading(&real, &params.with_rho(rho), model, &fading);
                    for &t in thresholds {
                        hits[k] = u64::from(sinr > t);
                        k += 1;
                    }
                }
            }
            Ok((hits, real.redraws))
        })
        .try_reduce(
            || (vec![0u64; cells], 0usize),
            |(mut a, ra), (b, rb)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok((a, ra + rb))
            },
        )?;
    let mut out = Vec::with_capacity(cells);
    let mut k = 0;
    for &model in models {
        for &rho in rhos {
            for &t in thresholds {
                out.push(SimEstimate::from_count(
                    counts[k],
                    config.n_realizations,
                    model,
                    rho,
                    t,
                    redraws,
                ));
                k += 1;
            }
        }
    }
    Ok(out)
}

/// Coverage estimate at the configured `ρ` and threshold.
pub fn estimate_coverage(config: &SimConfig, model: SinrModel) -> Result<SimEstimate> {
    let p = config.params;
    Ok(estimate_coverage_grid(config, &[model], &[p.rho], &[p.threshold])?[0])
}

/// One pixel of a deterministic SINR map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrPixel {
    pub x: f64,
    pub y: f64,
    pub sinr: f64,
    pub covered: bool,
    pub action: Action,
}

/// Raster of [`SinrPixel`]s in row-major order, `y` outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrMap {
    pub nx: usize,
    pub ny: usize,
    pub window: Window,
    pub pixels: Vec<SinrPixel>,
}

impl SinrMap {
    pub fn count(&self, action: Action) -> usize {
        self.pixels.iter().filter(|p| p.action == action).count()
    }
}

/// SINR map without fading: unit gains, in-phase cooperative signal and
/// phase-averaged interference at exact distances.
///
/// Each pixel takes the place of the user in its nearest station's cell.
pub fn sinr_map(real: &NetworkRealization, params: &SystemParams, nx: usize, ny: usize) -> Result<SinrMap> {
    params.validate()?;
    let w = real.window;
    let max_pixel = 0.5 / params.lambda.sqrt();
    if nx == 0 || ny == 0 || w.width() / nx as f64 > max_pixel || w.height() / ny as f64 > max_pixel {
        return Err(Error::InvalidParams(format!(
            "raster {nx}x{ny} is coarser than two pixels per 1/sqrt(lambda)"
        )));
    }
    let index = AtomIndex::new(&real.atoms, w, real.metric);
    let unit = FadingDraw {
        g: params.p,
        theta: 0.0,
    };
    let link = LinkFading {
        first: unit,
        second: unit,
    };
    let model = SinrModel::new(PhaseModel::MeanTheta, DistanceModel::Exact, false);
    let mut pixels = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = w.x_min + (i as f64 + 0.5) * w.width() / nx as f64;
            let y = w.y_min + (j as f64 + 0.5) * w.height() / ny as f64;
            let location = Point2::new(x, y);
            let rx = Receiver {
                location,
                nearest: index.two_nearest(location)?,
            };
            let signal = signal_at(&rx, params, link);
            let sinr = signal / (params.sigma2 + interference_at(real, &rx, params, model, |_| link));
            pixels.push(SinrPixel {
                x,
                y,
                sinr,
                covered: sinr > params.threshold,
                action: rx.action_at(params.rho),
            });
        }
    }
    Ok(SinrMap { nx, ny, window: w, pixels })
}
