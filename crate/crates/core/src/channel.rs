//! Fading models and the cooperative signal variable
//! `Z = (√(G1 r1^-β) + √(G2 r2^-β))²`.
//!
//! With `μi = ri^β / p`, `√(Gi ri^-β)` is Rayleigh with parameter `μi`.
//! Everything here is expressed through the pair `(μ1, μ2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// One link's fading: power gain (exponential with mean `p`) and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingDraw {
    pub g: f64,
    pub theta: f64,
}

impl FadingDraw {
    pub fn sample<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Self {
        let g = Exp::new(1.0 / p).expect("p > 0").sample(rng);
        let theta = 2.0 * PI * rng.random::<f64>();
        Self { g, theta }
    }
}

/// Rates `μi = ri^β / p` of the two cooperating links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuPair {
    pub mu1: f64,
    pub mu2: f64,
}

impl MuPair {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        if !(mu1 > 0.0 && mu2 > 0.0 && mu1.is_finite() && mu2.is_finite()) {
            return Err(Error::DomainError(format!("mu1 = {mu1}, mu2 = {mu2}")));
        }
        Ok(Self { mu1, mu2 })
    }

    pub fn from_distances(r1: f64, r2: f64, beta: f64, p: f64) -> Result<Self> {
        Self::new(r1.powf(beta) / p, r2.powf(beta) / p)
    }

    fn c(&self) -> f64 {
        1.0 / self.mu1 + 1.0 / self.mu2
    }

    fn k(&self) -> f64 {
        1.0 / (self.mu1 * self.mu2).sqrt()
    }
}

/// A Laplace transform evaluated at one complex argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtValue {
    pub s: Complex64,
    pub value: Complex64,
}

/// Principal complex arctangent, `atan(w) = log((1 + jw)/(1 - jw)) / 2j`.
///
/// Matches the principal branch everywhere off the cuts `w = ±j·[1, ∞)`.
pub fn catan(w: Complex64) -> Complex64 {
    let j = Complex64::i();
    ((Complex64::from(1.0) + j * w) / (Complex64::from(1.0) - j * w)).ln() / (2.0 * j)
}

/// Transform of an exponential gain with mean `p`: `1/(1 + s p)`.
pub fn g_lt(s: Complex64, p: f64) -> Result<LtValue> {
    let den = Complex64::from(1.0) + s * p;
    if den.norm() == 0.0 {
        return Err(Error::PoleError(format!("{s}")));
    }
    Ok(LtValue {
        s,
        value: den.inv(),
    })
}

fn z_sqrt_arg(s: Complex64, mu: &MuPair) -> Result<Complex64> {
    let g = (Complex64::from(1.0) + s * mu.c()).sqrt();
    if g.norm() == 0.0 {
        return Err(Error::BranchPointError(format!("{s}")));
    }
    Ok(g)
}

/// Laplace transform of `Z`.
///
/// `[s k (atan(√(μ1/μ2) g) + atan(√(μ2/μ1) g) − π) + g] / g³` with
/// `g = √(1 + (1/μ1 + 1/μ2) s)` and `k = 1/√(μ1 μ2)`, principal branches.
pub fn z_lt(s: Complex64, mu: &MuPair) -> Result<LtValue> {
    if s == Complex64::from(0.0) {
        return Ok(LtValue {
            s,
            value: Complex64::from(1.0),
        });
    }
    let g = z_sqrt_arg(s, mu)?;
    let a = (mu.mu1 / mu.mu2).sqrt();
    let num = s * mu.k() * (catan(g * a) + catan(g / a) - PI) + g;
    Ok(LtValue {
        s,
        value: num / (g * g * g),
    })
}

/// `(L_Z(s) − 1)/s`, evaluated without cancellation near `s = 0`.
///
/// Since `g − g³ = −c s g`, the difference divides out exactly:
/// `[k (atan(a g) + atan(g/a) − π) − c g] / g³`; the value at 0 is `−E[Z]`.
pub fn z_lt_difference_quotient(s: Complex64, mu: &MuPair) -> Result<Complex64> {
    let g = z_sqrt_arg(s, mu)?;
    let a = (mu.mu1 / mu.mu2).sqrt();
    let num = (catan(g * a) + catan(g / a) - PI) * mu.k() - g * mu.c();
    Ok(num / (g * g * g))
}

/// Mean of `Z`: `k (π/2 + (μ1 + μ2) k)`.
pub fn z_mean(mu: &MuPair) -> f64 {
    let k = mu.k();
    k * (FRAC_PI_2 + (mu.mu1 + mu.mu2) * k)
}

const PDF_TOL: Tolerance = Tolerance {
    rel: 1e-8,
    abs: 0.0,
    max_intervals: 200,
};

/// Density of `√Z` at `v`, by quadrature of the Rayleigh convolution.
pub fn sqrt_z_pdf(v: f64, mu: &MuPair) -> Result<f64> {
    if v <= 0.0 {
        return Ok(0.0);
    }
    let (m1, m2) = (mu.mu1, mu.mu2);
    let inner = integrate(
        |u: f64| {
            let w = v - u;
            u * w * (-m1 * u * u - m2 * w * w).exp()
        },
        0.0,
        v,
        PDF_TOL,
    )?;
    Ok(4.0 * m1 * m2 * inner.value)
}

/// Density of `Z`; `f_Z(0)` is the right limit 0.
pub fn z_pdf(z: f64, mu: &MuPair) -> Result<f64> {
    if z < 0.0 || z.is_nan() {
        return Err(Error::DomainError(format!("z = {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let v = z.sqrt();
    Ok(sqrt_z_pdf(v, mu)? / (2.0 * v))
}

/// Upper end beyond which the density of `√Z` is below `e^-60` of its scale.
fn sqrt_z_cutoff(mu: &MuPair) -> f64 {
    // max over u of exp(−μ1 u² − μ2 (v−u)²) is exp(−m v²), m = μ1μ2/(μ1+μ2)
    let m = mu.mu1 * mu.mu2 / (mu.mu1 + mu.mu2);
    (70.0 / m).sqrt()
}

/// `P[Z > 2t]`, integrating the density of `√Z` over `(√(2t), ∞)`.
pub fn z_tail(t: f64, mu: &MuPair) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::DomainError(format!("t = {t}")));
    }
    let v0 = (2.0 * t).sqrt();
    let v_max = v0 + sqrt_z_cutoff(mu);
    let tol = Tolerance {
        rel: 1e-10,
        abs: 1e-300,
        max_intervals: 500,
    };
    // a few pieces keep the adaptive scheme from missing the bulk
    let pieces = 8;
    let mut total = 0.0;
    let mut err: Option<Error> = None;
    for k in 0..pieces {
        let a = v0 + (v_max - v0) * k as f64 / pieces as f64;
        let b = v0 + (v_max - v0) * (k + 1) as f64 / pieces as f64;
        let est = integrate(
            |v: f64| match sqrt_z_pdf(v, mu) {
                Ok(x) => x,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            tol,
        )?;
        total += est.value;
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Draws `Z` for the given rates.
pub fn sample_z<R: Rng + ?Sized>(mu: &MuPair, rng: &mut R) -> f64 {
    let x1 = Exp::new(mu.mu1).expect("mu1 > 0").sample(rng);
    let x2 = Exp::new(mu.mu2).expect("mu2 > 0").sample(rng);
    let s = x1.sqrt() + x2.sqrt();
    s * s
}

/// Signal-tail difference `P[Z/2 > t] − P[X1 > t]`, `X1 ~ exp(μ1)` the
/// non-cooperative signal from the first neighbour.
pub fn tail_difference(t: f64, mu: &MuPair) -> Result<f64> {
    Ok(z_tail(t, mu)? - (-mu.mu1 * t).exp())
}

/// Level crossings of [`tail_difference`] on a grid, refined by bisection.
pub fn tail_crossings(mu: &MuPair, grid: &[f64]) -> Result<Vec<f64>> {
    let vals = grid
        .iter()
        .map(|&t| tail_difference(t, mu))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 1..grid.len() {
        if vals[i - 1] == 0.0 || vals[i - 1].signum() == vals[i].signum() {
            continue;
        }
        let (mut lo, mut hi) = (grid[i - 1], grid[i]);
        let lo_sign = vals[i - 1].signum();
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if tail_difference(mid, mu)?.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Outcome of the stochastic and Laplace ordering comparisons between the
/// non-cooperative gain `G ~ exp(μ)` and the symmetric cooperative gain `Z_{r,r}/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub mu: f64,
    /// `(t, P[G > t], P[Z/2 > t])` on the tail grid.
    pub tails: Vec<(f64, f64, f64)>,
    /// `P[G > t] <= P[Z/2 > t]` at every grid point.
    pub stochastic_dominance: bool,
    /// Points where the tail difference changes sign.
    pub crossings: Vec<f64>,
    /// `(s, L_G(s), L_{Z/2}(s))` on the Laplace grid.
    pub laplace: Vec<(f64, f64, f64)>,
    /// `L_G(s) >= L_{Z/2}(s)` at every grid point.
    pub laplace_order: bool,
}

/// Compares `G` and `Z_{r,r}/2` for `μ1 = μ2 = μ` on the given tail grid and
/// a fixed log-spaced Laplace grid `s ∈ {0} ∪ [1e-3, 1e3]`.
pub fn ordering_checks(mu: f64, grid: &[f64]) -> Result<OrderingReport> {
    let pair = MuPair::new(mu, mu)?;
    let mut tails = Vec::with_capacity(grid.len());
    for &t in grid {
        let pg = (-mu * t).exp();
        let pz = z_tail(t, &pair)?;
        tails.push((t, pg, pz));
    }
    // relative slack for quadrature noise where both tails are ~1
    let stochastic_dominance = tails.iter().all(|&(_, pg, pz)| pg <= pz + 1e-9);
    let crossings = tail_crossings(&pair, grid)?;

    let mut laplace = Vec::new();
    let s_grid = std::iter::once(0.0).chain((0..=24).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)));
    for s in s_grid {
        let lg = g_lt(Complex64::from(s), 1.0 / mu)?.value.re;
        let lz = z_lt(Complex64::from(0.5 * s), &pair)?.value.re;
        laplace.push((s, lg, lz));
    }
    let laplace_order = laplace.iter().all(|&(_, lg, lz)| lg >= lz - 1e-14);
    Ok(OrderingReport {
        mu,
        tails,
        stochastic_dominance,
        crossings,
        laplace,
        laplace_order,
    })
}
