//! Adaptive Gauss–Kronrod quadrature for real and complex integrands.
//!
//! Every integral in the analytic pipeline goes through [`integrate`]: a
//! globally adaptive 7/15-point Gauss–Kronrod scheme that repeatedly bisects
//! the interval with the largest error estimate. The integrand value type is
//! abstract ([`Field`]) so that complex Laplace-transform integrands share the
//! node set between real and imaginary parts.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1); even indices 1, 3, 5, 7 are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: a vector space over `f64` with a norm.
pub trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Tolerances for a single adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self {
            rel,
            abs,
            max_intervals: 2000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T> Eq for Segment<T> {}

impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel; returns (integral, error estimate).
pub fn gk15<T: Field, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut lo = [T::zero(); 7];
    let mut hi = [T::zero(); 7];
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        lo[j] = f(center - dx);
        hi[j] = f(center + dx);
        let sum = lo[j] + hi[j];
        kronrod = kronrod + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((lo[j] - mean).norm() + (hi[j] - mean).norm());
    }
    let h = half.abs();
    let value = kronrod * half;
    let resasc = resasc * h;
    let mut error = (kronrod - gauss).norm() * h;
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    (value, error.max(50.0 * f64::EPSILON * value.norm()))
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<T: Field, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    loop {
        if !total.is_finite() {
            return Err(Error::IntegrationError(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if total_err <= tol.target(total.norm()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::IntegrationError(format!(
                "{} subintervals on [{a}, {b}], error {total_err:.3e} vs target {:.3e}",
                heap.len(),
                tol.target(total.norm())
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to shed the drift from incremental updates.
    let (mut value, mut error) = (T::zero(), 0.0);
    for seg in heap.iter() {
        value = value + seg.value;
        error += seg.error;
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// [`integrate_pieces`] for integrands that can fail; the first error wins.
pub fn try_integrate_pieces<T: Field, F: FnMut(f64) -> Result<T>>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate<T>> {
    let mut failure: Option<Error> = None;
    let est = integrate_pieces(
        |x: f64| {
            if failure.is_some() {
                return T::zero();
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    T::zero()
                }
            }
        },
        breaks,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => est,
    }
}

/// Integrates over consecutive breakpoints and sums the pieces.
///
/// Each piece receives the absolute tolerance scaled by its share, so a
/// breakpoint list that isolates sharp features keeps the total within `tol`.
pub fn integrate_pieces<T: Field, F: FnMut(f64) -> T>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate<T>> {
    let mut value = T::zero();
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let est = integrate(&mut f, w[0], w[1], tol)?;
        value = value + est.value;
        error += est.error;
        evaluations += est.evaluations;
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_interval_length() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_is_exact_for_degree_22() {
        for deg in 0..=22 {
            let (v, _) = gk15(&mut |x: f64| x.powi(deg), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn gauss_part_is_exact_for_degree_13() {
        for deg in 0..=13 {
            let f = |x: f64| x.powi(deg);
            let mut g = f(0.0) * WG[3];
            for j in 0..3 {
                let x = XGK[2 * j + 1];
                g += (f(x) + f(-x)) * WG[j];
            }
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((g - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫_0^1 1/(1e-4 + (x-0.3)^2) dx, closed form via arctan
        let eps: f64 = 1e-4;
        let est = integrate(
            |x: f64| 1.0 / (eps + (x - 0.3) * (x - 0.3)),
            0.0,
            1.0,
            Tolerance::new(1e-10, 0.0),
        )
        .unwrap();
        let s = eps.sqrt();
        let exact = ((0.7 / s).atan() + (0.3 / s).atan()) / s;
        assert!((est.value - exact).abs() / exact < 1e-9);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^π e^{jx} dx = 2j
        let est = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            Tolerance::new(1e-12, 0.0),
        )
        .unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            rel: 1e-14,
            abs: 0.0,
            max_intervals: 4,
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, tol);
        assert!(matches!(r, Err(Error::IntegrationError(_))));
    }
}
