use std::f64::consts::PI;

use coopcov::coverage::{qc, QuadratureConfig};
use coopcov::geometry::{coop_disc, two_nearest, Action, Metric, Point2, Window};
use coopcov::interference::li;
use coopcov::quadrature::{integrate, Tolerance};
use coopcov::simulator::*;
use coopcov::SystemParams;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> SystemParams {
    SystemParams::default()
}

#[test]
fn mean_atom_count_in_small_window() {
    let w = Window::centered_square(20.0).unwrap();
    let n = 10_000;
    let mut total = 0usize;
    let mut redraws = 0usize;
    for i in 0..n {
        let mut rng = realization_rng(3, i);
        let real = build_realization(&params(), &w, Metric::Euclidean, &mut rng).unwrap();
        total += real.atoms.len();
        redraws += real.redraws;
        assert!(real.typical.r1 <= real.typical.r2);
        assert_eq!(real.users.len(), real.atoms.len());
    }
    // conditioned on >= 2 atoms the mean is 20 up to ~1e-7
    let mean = total as f64 / n as f64;
    let se = (20.0 / n as f64).sqrt();
    assert!((mean - 20.0).abs() < 3.0 * se, "{mean}");
    assert_eq!(redraws, 0);
}

#[test]
fn recorded_actions_follow_the_policy() {
    let p = params().with_rho(0.6);
    let w = Window::centered_square(50.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let real = build_realization(&p, &w, Metric::Euclidean, &mut rng).unwrap();
        for u in &real.users {
            let t = two_nearest(u.position, &real.atoms).unwrap();
            assert_eq!((t.i1, t.i2), (u.b1, u.b2));
            let expected = if u.r1 <= 0.6 * u.r2 { Action::NoCoop } else { Action::FullCoop };
            assert_eq!(u.action, expected);
        }
        let t = two_nearest(real.location, &real.atoms).unwrap();
        assert_eq!(t.i1, real.typical.i1);
    }
}

#[test]
fn typical_distance_moments() {
    let w = Window::centered_square(100.0).unwrap();
    let p = params();
    let n = 20_000u64;
    let (mut s1, mut s2, mut q1, mut q2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let mut rng = realization_rng(5, i);
        let atoms = coopcov::geometry::sample_ppp(&p, &w, &mut rng);
        let t = two_nearest(w.center(), &atoms).unwrap();
        s1 += t.r1;
        s2 += t.r2;
        q1 += t.r1 * t.r1;
        q2 += t.r2 * t.r2;
    }
    let nf = n as f64;
    let se1 = ((q1 / nf - (s1 / nf).powi(2)) / nf).sqrt();
    let se2 = ((q2 / nf - (s2 / nf).powi(2)) / nf).sqrt();
    assert!((s1 / nf - 0.5).abs() < 3.0 * se1, "{}", s1 / nf);
    assert!((s2 / nf - 0.75).abs() < 3.0 * se2, "{}", s2 / nf);
}

#[test]
fn single_interferer_mixture() {
    // r1 = 1, r2 = 2 and one more station at 3; no cooperation anywhere
    let w = Window::new(-5.0, 5.0, -5.0, 5.0).unwrap();
    let p = params().with_rho(1.0);
    let atoms = vec![Point2::new(1.0, 0.0), Point2::new(-2.0, 0.0), Point2::new(0.0, 3.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let real = NetworkRealization::from_atoms(atoms, w, Metric::Euclidean, w.center(), &p, &mut rng).unwrap();
    assert_eq!((real.typical.r1, real.typical.r2), (1.0, 2.0));
    let t = 0.8;
    let exact = 1.0 / ((1.0 + t / 16.0) * (1.0 + t / 81.0));
    for distance in [DistanceModel::FarField, DistanceModel::Exact] {
        let model = SinrModel::new(PhaseModel::MeanTheta, distance, false);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| typical_sinr(&real, &p, model, &mut rng) > t)
            .count();
        let q = hits as f64 / n as f64;
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((q - exact).abs() < 3.0 * se, "{distance:?}: {q} vs {exact}");
    }
}

#[test]
fn dpc_never_lowers_sinr() {
    let w = Window::centered_square(30.0).unwrap();
    for rho in [0.0, 0.5, 0.9] {
        let p = params().with_rho(rho);
        for i in 0..300 {
            let mut rng = realization_rng(7, i);
            let real = build_realization(&p, &w, Metric::Euclidean, &mut rng).unwrap();
            let fading = draw_fading(&real, p.p, &mut rng);
            for phase in [PhaseModel::ExactTheta, PhaseModel::MeanTheta] {
                for distance in [DistanceModel::FarField, DistanceModel::Exact] {
                    let plain = sinr_with_fading(&real, &p, SinrModel::new(phase, distance, false), &fading);
                    let dpc = sinr_with_fading(&real, &p, SinrModel::new(phase, distance, true), &fading);
                    assert!(dpc >= plain);
                    if real.typical_action == Action::NoCoop {
                        assert_eq!(dpc, plain);
                    }
                }
            }
        }
    }
}

#[test]
fn estimates_are_deterministic_and_monotone_in_threshold() {
    let cfg = SimConfig::new(params(), Window::centered_square(20.0).unwrap(), 2000, 42);
    let models = [SinrModel::analytic(false), SinrModel::new(PhaseModel::ExactTheta, DistanceModel::Exact, true)];
    let thresholds = [1e-6, 0.1, 0.5, 1.0, 2.0, 5.0];
    let a = estimate_coverage_grid(&cfg, &models, &[0.0, 0.5, 1.0], &thresholds).unwrap();
    let b = estimate_coverage_grid(&cfg, &models, &[0.0, 0.5, 1.0], &thresholds).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    for row in a.chunks(thresholds.len()) {
        assert!(row[0].coverage > 0.999);
        for w in row.windows(2) {
            assert!(w[1].coverage <= w[0].coverage);
        }
    }
    let single = estimate_coverage(&cfg.with_metric(Metric::Euclidean), SinrModel::analytic(false)).unwrap();
    let grid = estimate_coverage_grid(&cfg, &[SinrModel::analytic(false)], &[0.5], &[0.8]).unwrap();
    assert_eq!(single, grid[0]);
}

#[test]
fn simulation_matches_analytic_without_cooperation() {
    let p = params().with_rho(1.0).with_threshold(0.8);
    let cfg = SimConfig::new(p, Window::centered_square(200.0).unwrap(), 10_000, 9);
    let est = estimate_coverage(&cfg, SinrModel::analytic(false)).unwrap();
    let (exact, _, _) = qc(1.0, &p, &QuadratureConfig::default(), false).unwrap();
    let z = est.z_score(exact);
    assert!(z.abs() < 3.0, "sim {} vs analytic {exact}, z = {z}", est.coverage);
}

#[test]
fn far_field_interference_transform() {
    // E[exp(−s I)] averaged over the second-neighbour distance
    let rho = 0.5;
    let p = params().with_rho(rho);
    let w = Window::centered_square(1000.0).unwrap();
    let n = 3000u64;
    let s_grid = [0.02, 0.05, 0.1, 0.2, 0.5];
    let mut sums = vec![(0.0, 0.0); s_grid.len()];
    for i in 0..n {
        let mut rng = realization_rng(10, i);
        let real = build_realization(&p, &w, Metric::Euclidean, &mut rng).unwrap();
        let fading = draw_fading(&real, p.p, &mut rng);
        let interference = typical_interference(&real, &p, SinrModel::analytic(false), &fading);
        for (k, &s) in s_grid.iter().enumerate() {
            let v = (-s * interference).exp();
            sums[k].0 += v;
            sums[k].1 += v * v;
        }
    }
    for (k, &s) in s_grid.iter().enumerate() {
        let expected = integrate(
            |w2: f64| {
                let r2 = (w2 / (p.lambda * PI)).sqrt();
                w2 * (-w2).exp() * li(Complex64::from(s), rho, r2, &p).unwrap().value.re
            },
            0.0,
            80.0,
            Tolerance::new(1e-9, 1e-12),
        )
        .unwrap()
        .value;
        let nf = n as f64;
        let mean = sums[k].0 / nf;
        let se = ((sums[k].1 / nf - mean * mean) / nf).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "s={s}: {mean} vs {expected} (se {se})");
    }
}

#[test]
fn sinr_map_regions() {
    let w = Window::centered_square(25.0).unwrap();
    let base = params();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let real = build_realization(&base, &w, Metric::Euclidean, &mut rng).unwrap();
    let map1 = sinr_map(&real, &base.with_rho(1.0), 20, 20).unwrap();
    assert_eq!(map1.count(Action::FullCoop), 0);
    let map4 = sinr_map(&real, &base.with_rho(0.4), 20, 20).unwrap();
    let map9 = sinr_map(&real, &base.with_rho(0.9), 20, 20).unwrap();
    assert!(map4.count(Action::FullCoop) > map9.count(Action::FullCoop));
    for px in &map4.pixels {
        let z = Point2::new(px.x, px.y);
        let t = two_nearest(z, &real.atoms).unwrap();
        let inside = coop_disc(t.b1, t.b2, 0.4).unwrap().contains(z)
            || coop_disc(t.b2, t.b1, 0.4).unwrap().contains(z);
        assert_eq!(px.action == Action::FullCoop, !inside);
    }
    assert!(sinr_map(&real, &base, 3, 3).is_err());
    assert_eq!(map4, sinr_map(&real, &base.with_rho(0.4), 20, 20).unwrap());
}

#[test]
fn small_exponent_window_overstates_coverage() {
    let p = params().with_beta(2.5).with_rho(1.0);
    let cfg = SimConfig::new(p, Window::centered_square(20.0).unwrap(), 4000, 13);
    let thresholds = [0.1, 0.5, 1.0];
    let est = estimate_coverage_grid(&cfg, &[SinrModel::analytic(false)], &[1.0], &thresholds).unwrap();
    for e in est {
        let (exact, _, _) = qc(1.0, &p.with_threshold(e.threshold), &QuadratureConfig::default(), false).unwrap();
        assert!(e.coverage > exact, "T={}: {} vs {exact}", e.threshold, e.coverage);
    }
}

#[test]
fn window_too_small_is_rejected() {
    let cfg = SimConfig::new(params(), Window::centered_square(3.0).unwrap(), 10, 1);
    assert!(estimate_coverage(&cfg, SinrModel::default()).is_err());
    let cfg = SimConfig::new(params(), Window::centered_square(30.0).unwrap(), 0, 1);
    assert!(estimate_coverage(&cfg, SinrModel::default()).is_err());
}
