//! Coverage probability at the typical location, `qc(ρ) = qc1(ρ) + qc2(ρ)`.
//!
//! `qc1` collects users that stay with their nearest station (`r1 < ρ r2`),
//! `qc2` the cooperating ones. Both are written with `v = r1/r2`,
//! `w = λπ r2²` and, for `qc2`, the scaled frequency `u = s p / r2^β`. In
//! these variables the interference transform depends on `u` (or `v`) alone
//! and on `w` only through `exp(−2w F)`, so the integrals separate:
//!
//! - `qc1 = ∫_0^ρ 2v L_J(v^β T) H(1 + 2F(v^β T), v) dv`
//! - `qc2 = 2∫_0^∞ Re[L_J(2jπu) H(1 + 2F(2jπu), u) ∫_ρ^1 2v D(u, v) dv] du`
//!
//! where `H` is the `w`-integral against `w e^{−w}` and `D` the scaled
//! `(L_Z − 1)/(2jπs)` kernel. Without noise `H` has a closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{z_lt, z_lt_difference_quotient, z_mean, MuPair};
use crate::error::{Error, Result};
use crate::interference;
use crate::params::SystemParams;
use crate::quadrature::{try_integrate_pieces, Tolerance};

/// Tolerances and truncation points of the coverage integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Distance truncation at `r_max_factor / √λ`.
    pub r_max_factor: f64,
    /// First frequency panel `[0, s_max_initial]`, in units of `r2^β / p`.
    pub s_max_initial: f64,
    /// Stop doubling the frequency range once a panel adds less than this.
    pub s_tail_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-5,
            abs_tol: 1e-7,
            r_max_factor: 5.0,
            s_max_initial: 1.0,
            s_tail_tol: 1e-7,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.rel_tol,
            self.abs_tol,
            self.r_max_factor,
            self.s_max_initial,
            self.s_tail_tol,
        ];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("quadrature config {self:?}")))
        }
    }

    fn outer(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_intervals: 4000,
        }
    }

    fn inner(&self) -> Tolerance {
        Tolerance {
            rel: (self.rel_tol * 1e-3).max(1e-12),
            abs: self.abs_tol * 1e-3,
            max_intervals: 4000,
        }
    }

    /// Upper end of `w = λπ r2²`.
    fn w_max(&self) -> f64 {
        PI * self.r_max_factor * self.r_max_factor
    }
}

/// Which quantity a curve is swept over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Rho,
    Threshold,
}

/// One point of a coverage curve; probabilities are unclipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub x: f64,
    pub qc: f64,
    pub qc1: f64,
    pub qc2: f64,
    /// Maximising ρ when the curve was optimised over ρ.
    pub rho_star: Option<f64>,
}

impl CoveragePoint {
    /// Coverage clipped to `[0, 1]` for reporting.
    pub fn qc_clipped(&self) -> f64 {
        self.qc.clamp(0.0, 1.0)
    }
}

/// A coverage curve together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub axis: Axis,
    pub dpc: bool,
    pub params: SystemParams,
    pub points: Vec<CoveragePoint>,
}

fn one() -> Complex64 {
    Complex64::from(1.0)
}

/// `∫_0^W w e^{−a w} dw` for `Re a > 0`.
fn gamma2_truncated(a: Complex64, w_max: f64) -> Complex64 {
    let aw = a * w_max;
    (one() - (-aw).exp() * (one() + aw)) / (a * a)
}

/// Distance average `∫_0^W w e^{−w a} N(w) dw`, where `N` is the noise factor
/// expressed through `r2^β = (w/(λπ))^{β/2}`.
fn distance_average<N: Fn(f64) -> Complex64>(
    a: Complex64,
    noise: Option<N>,
    params: &SystemParams,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let w_max = quad.w_max();
    match noise {
        None => Ok(gamma2_truncated(a, w_max)),
        Some(noise) => {
            let lp = params.lambda * PI;
            let half_beta = 0.5 * params.beta;
            let breaks = [0.0, 1.0, 4.0, 12.0, w_max.max(12.5)];
            let est = try_integrate_pieces(
                |w: f64| {
                    let r2b = (w / lp).powf(half_beta);
                    Ok((-a * w).exp() * w * noise(r2b))
                },
                &breaks[..if w_max > 12.0 { 5 } else { 2 }],
                quad.inner(),
            )?;
            Ok(est.value)
        }
    }
}

fn breakpoints(lo: f64, hi: f64, inner: &[f64]) -> Vec<f64> {
    let mut b = vec![lo];
    for &x in inner {
        if x > lo && x < hi {
            b.push(x);
        }
    }
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Coverage of users that keep a single serving station.
pub fn qc1(rho: f64, params: &SystemParams, quad: &QuadratureConfig) -> Result<f64> {
    let params = params.with_rho(rho);
    params.validate()?;
    quad.validate()?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let beta = params.beta;
    let t = params.threshold;
    let unit = SystemParams {
        lambda: 1.0 / (2.0 * PI),
        p: 1.0,
        ..params
    };
    let knee = t.powf(-1.0 / beta);
    let breaks = breakpoints(0.0, rho, &[0.5 * knee, knee, 2.0 * knee]);
    let est = try_integrate_pieces(
        |v: f64| {
            let x = v.powf(beta) * t;
            let (lj, f) = interference_parts(Complex64::from(x), rho, &unit)?;
            let a = one() + f * 2.0;
            let noise = (params.sigma2 > 0.0).then(|| {
                let c = v.powf(beta) * t * params.sigma2 / params.p;
                move |r2b: f64| Complex64::from((-c * r2b).exp())
            });
            let h = distance_average(a, noise, &params, quad)?;
            Ok(2.0 * v * (lj * h).re)
        },
        &breaks,
        quad.outer(),
    )?;
    Ok(est.value)
}

/// `(L_J(x), F(x))` in scaled units: `r2 = 1`, `p = 1`, `2πλ = 1`.
fn interference_parts(x: Complex64, rho: f64, unit: &SystemParams) -> Result<(Complex64, Complex64)> {
    let lj = interference::lj(x, rho, 1.0, unit)?.value;
    let f = interference::field_exponent(x, rho, 1.0, unit)?;
    Ok((lj, f))
}

/// Scaled kernel `(L_Z(−jπu/T) − 1)/(2jπu)` for rates `(v^β, 1)`.
fn z_kernel(u: f64, v: f64, beta: f64, t: f64) -> Result<Complex64> {
    let mu1 = v.powf(beta);
    if mu1 < 1e-250 {
        // vanishing first path loss: L_Z → 0
        return Ok(Complex64::new(0.0, 1.0 / (2.0 * PI * u)));
    }
    let mu = MuPair::new(mu1, 1.0)?;
    let arg = Complex64::new(0.0, -PI * u / t);
    debug_assert!((one() + arg * (1.0 / mu1 + 1.0)).re > 0.0);
    Ok(z_lt_difference_quotient(arg, &mu)? * (-0.5 / t))
}

/// `∫_ρ^1 2v D(u, v) dv`.
fn kernel_average(u: f64, rho: f64, params: &SystemParams, quad: &QuadratureConfig) -> Result<Complex64> {
    let beta = params.beta;
    let t = params.threshold;
    let knee = (u / t).powf(1.0 / beta);
    let breaks = breakpoints(rho, 1.0, &[0.3 * knee, knee, 3.0 * knee]);
    Ok(try_integrate_pieces(
        |v: f64| Ok(z_kernel(u, v, beta, t)? * (2.0 * v)),
        &breaks,
        quad.inner(),
    )?
    .value)
}

/// Scaled `qc2` integrand at frequency `u`, already averaged over `v` and `w`.
fn qc2_scaled_integrand(
    u: f64,
    rho: f64,
    params: &SystemParams,
    quad: &QuadratureConfig,
    dpc: bool,
) -> Result<Complex64> {
    let unit = SystemParams {
        lambda: 1.0 / (2.0 * PI),
        p: 1.0,
        ..*params
    };
    let x = Complex64::new(0.0, 2.0 * PI * u);
    let (lj, f) = interference_parts(x, rho, &unit)?;
    let a = one() + f * 2.0;
    let noise = (params.sigma2 > 0.0).then(|| {
        let c = 2.0 * PI * params.sigma2 * u / params.p;
        move |r2b: f64| Complex64::new(0.0, -c * r2b).exp()
    });
    let h = distance_average(a, noise, params, quad)?;
    let boundary = if dpc { one() } else { lj };
    Ok(boundary * h * kernel_average(u, rho, params, quad)?)
}

/// `2∫_0^∞ Re f(u) du` over doubling panels, after `u = τ^m` with `m = β/2`
/// to absorb the `u^{2/β − 1}` behaviour at the origin.
fn frequency_integral<F: FnMut(f64) -> Result<Complex64>>(
    mut f: F,
    beta: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let m = 0.5 * beta;
    let mut g = |tau: f64| -> Result<f64> {
        let u = tau.powf(m);
        Ok(f(u)?.re * m * tau.powf(m - 1.0))
    };
    let tol = Tolerance {
        rel: quad.rel_tol,
        abs: quad.abs_tol * 0.1,
        max_intervals: 4000,
    };
    let mut upper = quad.s_max_initial;
    let mut total = try_integrate_pieces(&mut g, &[0.0, upper.powf(1.0 / m)], tol)?.value;
    let mut quiet = 0;
    for _ in 0..120 {
        let a = upper.powf(1.0 / m);
        upper *= 2.0;
        let b = upper.powf(1.0 / m);
        let panel = try_integrate_pieces(&mut g, &[a, b], tol)?.value;
        total += panel;
        if 2.0 * panel.abs() < quad.s_tail_tol {
            quiet += 1;
            if quiet == 2 {
                return Ok(2.0 * total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::IntegrationError(format!(
        "frequency integral still changing at s = {upper:e}"
    )))
}

/// Coverage of cooperating users; `dpc` removes the second neighbour's interference.
pub fn qc2(rho: f64, params: &SystemParams, quad: &QuadratureConfig, dpc: bool) -> Result<f64> {
    let params = params.with_rho(rho);
    params.validate()?;
    quad.validate()?;
    if rho == 1.0 {
        return Ok(0.0);
    }
    frequency_integral(
        |u| qc2_scaled_integrand(u, rho, &params, quad, dpc),
        params.beta,
        quad,
    )
}

/// `(qc, qc1, qc2)` at cooperation parameter `rho`.
pub fn qc(rho: f64, params: &SystemParams, quad: &QuadratureConfig, dpc: bool) -> Result<(f64, f64, f64)> {
    let a = qc1(rho, params, quad)?;
    let b = qc2(rho, params, quad, dpc)?;
    Ok((a + b, a, b))
}

/// Unscaled `qc2` integrand at frequency `s` for one distance pair `(r1, r2)`:
/// `e^{−2jπσ²s} L_I(2jπs, ρ, r2) (L_Z(−jπs/T) − 1)/(2jπs)`, with its limit
/// `E[Z]/(2T)` at `s = 0`.
pub fn qc2_integrand(s: f64, r1: f64, r2: f64, params: &SystemParams, dpc: bool) -> Result<Complex64> {
    let mu = MuPair::from_distances(r1, r2, params.beta, params.p)?;
    let t = params.threshold;
    if s == 0.0 {
        return Ok(Complex64::from(z_mean(&mu) / (2.0 * t)));
    }
    let x = Complex64::new(0.0, 2.0 * PI * s);
    let l_i = if dpc {
        interference::li_dpc(x, params.rho, r2, params)?.value
    } else {
        interference::li(x, params.rho, r2, params)?.value
    };
    let lz = z_lt(Complex64::new(0.0, -PI * s / t), &mu)?.value;
    let noise = Complex64::new(0.0, -2.0 * PI * params.sigma2 * s).exp();
    Ok(noise * l_i * (lz - 1.0) / x)
}

/// Default cooperation grid `0, 0.1, …, 1`.
pub fn default_rho_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Default threshold grid: 40 log-spaced points on `[0.01, 10]`.
pub fn default_threshold_grid() -> Vec<f64> {
    log_grid(0.01, 10.0, 40)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::InvalidParams("grid must be non-empty and strictly increasing".into()));
    }
    Ok(())
}

/// Coverage over a grid of `ρ` at fixed threshold.
pub fn sweep_rho(params: &SystemParams, grid: &[f64], quad: &QuadratureConfig, dpc: bool) -> Result<CoverageCurve> {
    check_grid(grid)?;
    let points = grid
        .par_iter()
        .map(|&rho| {
            let (q, a, b) = qc(rho, params, quad, dpc)?;
            Ok(CoveragePoint {
                x: rho,
                qc: q,
                qc1: a,
                qc2: b,
                rho_star: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        axis: Axis::Rho,
        dpc,
        params: *params,
        points,
    })
}

/// Step of the coarse `ρ` search in [`optimize_rho`].
pub const RHO_SEARCH_STEP: f64 = 0.05;

/// Maximises `qc` over `ρ`: grid search with step `step`, then one
/// golden-section pass on the bracket around the best grid point.
/// Returns `(ρ*, qc, qc1, qc2)`.
pub fn optimize_rho(
    params: &SystemParams,
    quad: &QuadratureConfig,
    dpc: bool,
    step: f64,
) -> Result<(f64, f64, f64, f64)> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParams(format!("rho step = {step}")));
    }
    let n = (1.0 / step).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    let vals = grid
        .iter()
        .map(|&r| qc(r, params, quad, dpc))
        .collect::<Result<Vec<_>>>()?;
    let (mut best_i, mut best) = (0, vals[0]);
    for (i, v) in vals.iter().enumerate() {
        if v.0 > best.0 {
            best_i = i;
            best = *v;
        }
    }
    let mut best_rho = grid[best_i];
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(n)];
    if hi > lo {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = qc(c, params, quad, dpc)?;
        let mut fd = qc(d, params, quad, dpc)?;
        for _ in 0..12 {
            if fc.0 > fd.0 {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = qc(c, params, quad, dpc)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = qc(d, params, quad, dpc)?;
            }
        }
        for (r, v) in [(c, fc), (d, fd)] {
            if v.0 > best.0 {
                best = v;
                best_rho = r;
            }
        }
    }
    Ok((best_rho, best.0, best.1, best.2))
}

/// Coverage over a threshold grid at fixed `ρ`, or at the optimal `ρ` per threshold.
pub fn sweep_threshold(
    params: &SystemParams,
    grid: &[f64],
    quad: &QuadratureConfig,
    dpc: bool,
    optimize: bool,
) -> Result<CoverageCurve> {
    check_grid(grid)?;
    let points = grid
        .par_iter()
        .map(|&t| {
            let p = params.with_threshold(t);
            if optimize {
                let (r, q, a, b) = optimize_rho(&p, quad, dpc, RHO_SEARCH_STEP)?;
                Ok(CoveragePoint {
                    x: t,
                    qc: q,
                    qc1: a,
                    qc2: b,
                    rho_star: Some(r),
                })
            } else {
                let (q, a, b) = qc(p.rho, &p, quad, dpc)?;
                Ok(CoveragePoint {
                    x: t,
                    qc: q,
                    qc1: a,
                    qc2: b,
                    rho_star: None,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        axis: Axis::Threshold,
        dpc,
        params: *params,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn base() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn truncated_gamma_matches_quadrature() {
        let a = Complex64::new(1.7, -0.4);
        let direct = integrate(|w: f64| (-a * w).exp() * w, 0.0, 30.0, Tolerance::new(1e-13, 0.0))
            .unwrap()
            .value;
        assert!((gamma2_truncated(a, 30.0) - direct).norm() < 1e-12);
    }

    #[test]
    fn inversion_recovers_exponential_signal() {
        // P[X > 2T I] = L_I(2Tμ) when X ~ exp(μ)
        let pr = base().with_rho(0.4);
        let (t, mu, r2) = (0.7, 1.9, 0.8);
        let quad = QuadratureConfig::default();
        let l_i = |s: Complex64| interference::li(s, pr.rho, r2, &pr).map(|v| v.value);
        let got = frequency_integral(
            |s| {
                if s == 0.0 {
                    return Ok(Complex64::from(1.0 / (2.0 * t * mu)));
                }
                let lx_minus_1_over = Complex64::from(1.0 / (2.0 * t)) / (Complex64::new(mu, -PI * s / t));
                Ok(l_i(Complex64::new(0.0, 2.0 * PI * s))? * lx_minus_1_over)
            },
            2.0,
            &quad,
        )
        .unwrap();
        let expected = l_i(Complex64::from(2.0 * t * mu)).unwrap().re;
        assert!((got - expected).abs() < 1e-5, "{got} vs {expected}");
    }

    #[test]
    fn integrand_limit_at_origin() {
        let pr = base().with_rho(0.3).with_threshold(1.3);
        for &(r1, r2) in &[(0.2, 0.5), (0.7, 0.9), (1.0, 2.0)] {
            let at0 = qc2_integrand(0.0, r1, r2, &pr, false).unwrap();
            let near = qc2_integrand(1e-8, r1, r2, &pr, false).unwrap();
            let mu = MuPair::from_distances(r1, r2, pr.beta, pr.p).unwrap();
            assert!((at0.re - z_mean(&mu) / (2.0 * pr.threshold)).abs() < 1e-12);
            assert!((near - at0).norm() < 1e-4 * at0.norm());
        }
    }

    #[test]
    fn scaled_kernel_matches_unscaled_integrand() {
        // one (r1, r2) pair: the scaled form must reproduce the raw s-integrand
        let pr = base().with_rho(0.2).with_power(1.7).with_threshold(0.6);
        let (r1, r2): (f64, f64) = (0.45, 0.8);
        let v = r1 / r2;
        let scale = r2.powf(pr.beta) / pr.p;
        for &u in &[0.01, 0.3, 2.0, 15.0] {
            let raw = qc2_integrand(u * scale, r1, r2, &pr, false).unwrap() * scale;
            let unit = SystemParams {
                lambda: 1.0 / (2.0 * PI),
                p: 1.0,
                ..pr
            };
            let x = Complex64::new(0.0, 2.0 * PI * u);
            let (lj, f) = interference_parts(x, pr.rho, &unit).unwrap();
            let w = pr.lambda * PI * r2 * r2;
            let li = lj * (-f * (2.0 * w)).exp();
            let scaled = li * z_kernel(u, v, pr.beta, pr.threshold).unwrap();
            assert!((raw - scaled).norm() < 1e-10 * raw.norm() + 1e-16, "u={u}: {raw} vs {scaled}");
        }
    }

    #[test]
    fn empty_regions() {
        let quad = QuadratureConfig::default();
        assert_eq!(qc1(0.0, &base(), &quad).unwrap(), 0.0);
        assert_eq!(qc2(1.0, &base(), &quad, false).unwrap(), 0.0);
        assert_eq!(qc2(1.0, &base(), &quad, true).unwrap(), 0.0);
    }

    #[test]
    fn no_cooperation_closed_form() {
        // ρ = 1, β = 4, σ² = 0: ∫ 2v L_J(v⁴T) / (1 + 2F(v⁴T))² dv with F from the closed form
        let pr = base().with_rho(1.0);
        let t = pr.threshold;
        let exact = integrate(
            |v: f64| {
                let x = v.powi(4) * t;
                let unit = SystemParams {
                    lambda: 1.0 / PI,
                    p: 1.0,
                    ..pr
                };
                // with πλ = 1 and r2 = 1 the closed form is L_J(x) exp(−2F(x))
                let lt = interference::li_nocoop_beta4(Complex64::from(x), 1.0, &unit)
                    .unwrap()
                    .value
                    .re;
                let lj = 1.0 / (1.0 + x);
                let f2 = -(lt / lj).ln();
                2.0 * v * lj / (1.0 + f2).powi(2)
            },
            0.0,
            1.0,
            Tolerance::new(1e-12, 0.0),
        )
        .unwrap()
        .value;
        let quad = QuadratureConfig::default();
        let got = qc1(1.0, &pr, &quad).unwrap();
        assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    }

    #[test]
    fn reference_values_at_unit_density() {
        let quad = QuadratureConfig::default();
        let (q1, _, _) = qc(1.0, &base(), &quad, false).unwrap();
        let (q5, _, _) = qc(0.5, &base(), &quad, false).unwrap();
        assert!((q1 - 0.6051).abs() < 5e-4, "{q1}");
        assert!((q5 - 0.6817).abs() < 5e-4, "{q5}");
        // the cooperative kernel is singular at the origin only for ρ = 0
        let (q0, a0, _) = qc(0.0, &base(), &quad, false).unwrap();
        let (q_small, _, _) = qc(1e-3, &base(), &quad, false).unwrap();
        assert!((q0 - q_small).abs() < 1e-5);
        assert_eq!(a0, 0.0);
    }

    #[test]
    fn power_scaling_without_noise() {
        let quad = QuadratureConfig::default();
        let a = qc(0.4, &base(), &quad, false).unwrap().0;
        let b = qc(0.4, &base().with_power(10.0), &quad, false).unwrap().0;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn noise_lowers_coverage() {
        let quad = QuadratureConfig::default();
        let clean = qc(0.5, &base(), &quad, false).unwrap();
        let noisy = qc(0.5, &base().with_sigma2(0.05), &quad, false).unwrap();
        assert!(noisy.1 < clean.1 && noisy.2 < clean.2);
        let tiny = qc(0.5, &base().with_sigma2(1e-12), &quad, false).unwrap();
        assert!((tiny.0 - clean.0).abs() < 1e-5);
    }

    #[test]
    fn grids() {
        let g = default_threshold_grid();
        assert_eq!(g.len(), 40);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[39] - 10.0).abs() < 1e-12);
        assert!(check_grid(&[0.1, 0.1]).is_err());
        assert_eq!(default_rho_grid().len(), 11);
    }
}
