//! Shot-noise interference outside the ball of radius `r2`.
//!
//! Each interfering atom serves one user, which cooperates with probability
//! `ρ²`. The per-atom mark is then `exp(mean p)` (no cooperation) or
//! `Γ(2, p/2)` (full cooperation), scaled by the path loss `d^-β`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{catan, LtValue};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quadrature::{integrate_pieces, Tolerance};

const RADIAL_TOL: Tolerance = Tolerance {
    rel: 1e-10,
    abs: 1e-300,
    max_intervals: 2000,
};

/// Parameters plus the exclusion radius for one interference field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceContext {
    pub params: SystemParams,
    pub r2: f64,
}

impl InterferenceContext {
    pub fn new(params: SystemParams, r2: f64) -> Result<Self> {
        params.validate()?;
        check_r2(r2)?;
        Ok(Self { params, r2 })
    }

    pub fn li(&self, s: Complex64, rho: f64) -> Result<LtValue> {
        li(s, rho, self.r2, &self.params)
    }

    pub fn li_dpc(&self, s: Complex64, rho: f64) -> Result<LtValue> {
        li_dpc(s, rho, self.r2, &self.params)
    }

    pub fn mean(&self) -> Result<f64> {
        mean_interference(self.params.rho, self.r2, &self.params)
    }

    pub fn mean_dpc(&self) -> Result<f64> {
        mean_interference_dpc(self.params.rho, self.r2, &self.params)
    }
}

fn check_r2(r2: f64) -> Result<()> {
    if r2 > 0.0 && r2.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("r2 = {r2}")))
    }
}

fn one() -> Complex64 {
    Complex64::from(1.0)
}

/// Mark transform as a function of `w = s p d^-β`.
fn lj_scaled(w: Complex64, rho: f64) -> Result<Complex64> {
    let d1 = one() + w;
    let d2 = one() + w * 0.5;
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return Err(Error::PoleError(format!("s p d^-β = {w}")));
    }
    let r2 = rho * rho;
    Ok(d1.inv() * r2 + (d2 * d2).inv() * (1.0 - r2))
}

/// `1 − L_J` written without cancellation for small `w`.
fn one_minus_lj_scaled(w: Complex64, rho: f64) -> Complex64 {
    let r2 = rho * rho;
    let d2 = one() + w * 0.5;
    w / (one() + w) * r2 + w * (one() + w * 0.25) / (d2 * d2) * (1.0 - r2)
}

/// Transform of one interferer's contribution at distance `d`.
pub fn lj(s: Complex64, rho: f64, d: f64, params: &SystemParams) -> Result<LtValue> {
    let w = s * params.p * d.powf(-params.beta);
    Ok(LtValue {
        s,
        value: lj_scaled(w, rho)?,
    })
}

/// `∫_1^∞ (1 − L_J(x t^-β)) t dt` for `x = s p r2^-β`.
///
/// With `y = t^(2−β)` this is `(1/(β−2)) ∫_0^1 (1 − L_J(x y^q)) y^-q dy`,
/// `q = β/(β−2)`: a finite interval with a bounded integrand.
fn radial_integral(x: Complex64, rho: f64, beta: f64) -> Result<Complex64> {
    if x.norm() == 0.0 {
        return Ok(Complex64::from(0.0));
    }
    let q = beta / (beta - 2.0);
    // the integrand turns over near |x| y^q = 1
    let knee = x.norm().powf(-1.0 / q);
    let mut breaks = vec![0.0];
    for f in [0.1, 1.0, 10.0] {
        let b = knee * f;
        if b > 0.0 && b < 1.0 {
            breaks.push(b);
        }
    }
    breaks.push(1.0);
    let est = integrate_pieces(
        |y: f64| {
            if y == 0.0 {
                return x;
            }
            let yq = y.powf(q);
            one_minus_lj_scaled(x * yq, rho) / yq
        },
        &breaks,
        RADIAL_TOL,
    )?;
    Ok(est.value / (beta - 2.0))
}

/// Exponent `2πλ ∫_{r2}^∞ (1 − L_J(s, ρ, r)) r dr` of the field beyond `r2`,
/// so that `li_dpc = exp(−field_exponent)`.
///
/// Use this rather than the logarithm of [`li_dpc`] when the exponent is
/// rescaled: its imaginary part is not confined to `(−π, π]`.
pub fn field_exponent(s: Complex64, rho: f64, r2: f64, params: &SystemParams) -> Result<Complex64> {
    check_r2(r2)?;
    let x = s * params.p * r2.powf(-params.beta);
    Ok(radial_integral(x, rho, params.beta)? * (2.0 * PI * params.lambda * r2 * r2))
}

/// Returns `(L_J(s, ρ, r2), L_I without the boundary factor)`.
fn li_parts(s: Complex64, rho: f64, r2: f64, params: &SystemParams) -> Result<(Complex64, Complex64)> {
    check_r2(r2)?;
    let boundary = lj_scaled(s * params.p * r2.powf(-params.beta), rho)?;
    let field = (-field_exponent(s, rho, r2, params)?).exp();
    Ok((boundary, field))
}

/// Transform of the total interference seen by a user whose second neighbour is at `r2`.
pub fn li(s: Complex64, rho: f64, r2: f64, params: &SystemParams) -> Result<LtValue> {
    let (boundary, field) = li_parts(s, rho, r2, params)?;
    Ok(LtValue {
        s,
        value: boundary * field,
    })
}

/// [`li`] with the second neighbour's own transmission removed.
pub fn li_dpc(s: Complex64, rho: f64, r2: f64, params: &SystemParams) -> Result<LtValue> {
    let (_, field) = li_parts(s, rho, r2, params)?;
    Ok(LtValue { s, value: field })
}

/// Closed form of `li(s, 1, r2)` for `β = 4`.
pub fn li_nocoop_beta4(s: Complex64, r2: f64, params: &SystemParams) -> Result<LtValue> {
    if params.beta != 4.0 {
        return Err(Error::WrongExponent(params.beta));
    }
    check_r2(r2)?;
    let boundary = lj_scaled(s * params.p / r2.powi(4), 1.0)?;
    if s.norm() == 0.0 {
        return Ok(LtValue { s, value: boundary });
    }
    let root = (s * params.p).sqrt();
    let angle = Complex64::from(FRAC_PI_2) - catan(Complex64::from(r2 * r2) / root);
    let field = (-root * angle * (PI * params.lambda)).exp();
    Ok(LtValue {
        s,
        value: boundary * field,
    })
}

fn mean_prefactor(r2: f64, params: &SystemParams) -> Result<f64> {
    if params.beta <= 2.0 {
        return Err(Error::DivergentMean(params.beta));
    }
    check_r2(r2)?;
    let v = params.p / ((params.beta - 2.0) * r2.powf(params.beta));
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DivergentNearField(r2))
    }
}

/// Mean interference, `p/((β−2) r2^β) (β − 2 + 2πλ r2²)`; `rho` has no effect.
pub fn mean_interference(_rho: f64, r2: f64, params: &SystemParams) -> Result<f64> {
    let pre = mean_prefactor(r2, params)?;
    let v = pre * (params.beta - 2.0 + 2.0 * PI * params.lambda * r2 * r2);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DivergentNearField(r2))
    }
}

/// Mean interference without the second neighbour, `p/((β−2) r2^β) 2πλ r2²`.
pub fn mean_interference_dpc(_rho: f64, r2: f64, params: &SystemParams) -> Result<f64> {
    let pre = mean_prefactor(r2, params)?;
    let v = pre * 2.0 * PI * params.lambda * r2 * r2;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DivergentNearField(r2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::from(x)
    }

    fn params(lambda: f64, beta: f64, p: f64) -> SystemParams {
        SystemParams::default()
            .with_lambda(lambda)
            .with_beta(beta)
            .with_power(p)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn lj_examples() {
        let pr = params(1.0, 4.0, 1.0);
        assert_eq!(lj(c(0.0), 0.3, 1.5, &pr).unwrap().value, c(1.0));
        let d: f64 = 1.3;
        let w = 0.7 * d.powf(-4.0);
        let v1 = lj(c(0.7), 1.0, d, &pr).unwrap().value.re;
        assert!((v1 - 1.0 / (1.0 + w)).abs() < 1e-15);
        let v0 = lj(c(0.7), 0.0, d, &pr).unwrap().value.re;
        assert!((v0 - (1.0 + w / 2.0).powi(-2)).abs() < 1e-15);
        assert!(matches!(lj(c(-1.0), 1.0, 1.0, &pr), Err(Error::PoleError(_))));
    }

    #[test]
    fn li_worked_example() {
        let pr = params(1.0 / PI, 4.0, 1.0);
        let expected = 0.5 * (-PI / 4.0).exp();
        let v = li(c(1.0), 1.0, 1.0, &pr).unwrap().value;
        assert!(rel(v.re, expected) < 1e-9, "{v}");
        let closed = li_nocoop_beta4(c(1.0), 1.0, &pr).unwrap().value;
        assert!(rel(closed.re, expected) < 1e-14);
        assert_eq!(li(c(0.0), 0.4, 1.0, &pr).unwrap().value, c(1.0));
        assert_eq!(li_dpc(c(0.0), 0.4, 1.0, &pr).unwrap().value, c(1.0));
        assert_eq!(li_nocoop_beta4(c(0.0), 1.0, &pr).unwrap().value, c(1.0));
    }

    #[test]
    fn closed_form_agrees_on_real_and_imaginary_axes() {
        let pr = params(0.8, 4.0, 1.3);
        for i in 0..=16 {
            let s = 10f64.powf(-3.0 + 0.375 * i as f64);
            for r2 in [0.3, 1.0, 2.2] {
                for arg in [c(s), Complex64::new(0.0, s), Complex64::new(0.0, -s)] {
                    let a = li(arg, 1.0, r2, &pr).unwrap().value;
                    let b = li_nocoop_beta4(arg, r2, &pr).unwrap().value;
                    assert!((a - b).norm() <= 1e-8 * b.norm(), "s={arg}, r2={r2}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn wrong_exponent_rejected() {
        let pr = params(1.0, 3.0, 1.0);
        assert!(matches!(
            li_nocoop_beta4(c(1.0), 1.0, &pr),
            Err(Error::WrongExponent(_))
        ));
    }

    #[test]
    fn factorization_and_dpc_order() {
        let pr = params(1.0, 3.5, 1.0);
        for &s in &[0.01, 0.3, 2.0, 40.0] {
            for &rho in &[0.0, 0.4, 1.0] {
                for &r2 in &[0.2, 0.9, 2.0] {
                    let full = li(c(s), rho, r2, &pr).unwrap().value.re;
                    let dpc = li_dpc(c(s), rho, r2, &pr).unwrap().value.re;
                    let j = lj(c(s), rho, r2, &pr).unwrap().value.re;
                    assert!((full - j * dpc).abs() <= 1e-14 * dpc.max(1e-300));
                    assert!(dpc >= full);
                    assert!(full > 0.0 && full <= 1.0);
                }
            }
        }
    }

    #[test]
    fn monotone_in_s_rho_and_r2() {
        let pr = params(1.0, 4.0, 1.0);
        let s_grid = [0.0, 0.05, 0.2, 1.0, 5.0, 20.0];
        let rho_grid = [0.0, 0.5, 1.0];
        let r2_grid = [0.3, 0.7, 1.2, 2.0];
        let v = |s: f64, rho: f64, r2: f64| li(c(s), rho, r2, &pr).unwrap().value.re;
        for &rho in &rho_grid {
            for &r2 in &r2_grid {
                for w in s_grid.windows(2) {
                    assert!(v(w[1], rho, r2) <= v(w[0], rho, r2));
                }
            }
        }
        for &s in &s_grid[1..] {
            for &r2 in &r2_grid {
                for w in rho_grid.windows(2) {
                    assert!(v(s, w[1], r2) >= v(s, w[0], r2));
                }
            }
            for &rho in &rho_grid {
                for w in r2_grid.windows(2) {
                    assert!(v(s, rho, w[1]) >= v(s, rho, w[0]));
                }
            }
        }
    }

    #[test]
    fn mean_examples() {
        let pr = params(1.0, 4.0, 1.0);
        assert!((mean_interference(0.3, 1.0, &pr).unwrap() - (1.0 + PI)).abs() < 1e-12);
        assert!((mean_interference_dpc(0.3, 1.0, &pr).unwrap() - PI).abs() < 1e-12);
        for &r2 in &[0.4, 1.0, 3.0] {
            let general = mean_interference(0.0, r2, &pr).unwrap();
            let special = (1.0 + PI * r2 * r2) / r2.powi(4);
            assert!(rel(general, special) < 1e-12);
            let ratio = general / mean_interference_dpc(1.0, r2, &pr).unwrap();
            assert!(ratio > 1.0);
            assert!(rel(ratio, (2.0 + 2.0 * PI * r2 * r2) / (2.0 * PI * r2 * r2)) < 1e-12);
        }
        let a = mean_interference_dpc(0.0, 1.3, &pr).unwrap();
        let b = mean_interference_dpc(1.0, 1.3, &pr).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            mean_interference(0.5, 1.0, &params(1.0, 2.0, 1.0)),
            Err(Error::DivergentMean(_))
        ));
        assert!(matches!(
            mean_interference(0.5, 1e-300, &pr),
            Err(Error::DivergentNearField(_))
        ));
    }

    #[test]
    fn mean_from_transform_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..10 {
            let rho = rng.random::<f64>();
            let r2 = rng.random_range(0.3..2.0);
            let pr = params(rng.random_range(0.2..3.0), rng.random_range(2.5..5.0), rng.random_range(0.5..2.0));
            let slope = (1.0 - li(c(h), rho, r2, &pr).unwrap().value.re) / h;
            let mean = mean_interference(rho, r2, &pr).unwrap();
            assert!(rel(slope, mean) < 1e-3, "{slope} vs {mean}");
            let slope_dpc = (1.0 - li_dpc(c(h), rho, r2, &pr).unwrap().value.re) / h;
            let mean_dpc = mean_interference_dpc(rho, r2, &pr).unwrap();
            assert!(rel(slope_dpc, mean_dpc) < 1e-3);
        }
    }

    #[test]
    fn near_two_exponent_still_integrates() {
        let pr = params(1.0, 2.1, 1.0);
        let v = li(c(0.5), 0.5, 1.0, &pr).unwrap().value.re;
        assert!(v > 0.0 && v < 1.0);
    }
}
