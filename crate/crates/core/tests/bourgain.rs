use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_nls::bourgain::*;
use spectral_nls::harmonic_basis::HarmonicField;
use spectral_nls::spectral_ops::{make_zoll_spectrum, round_spectrum, SpectrumModel};

fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Discrete `‖ψ‖_{H^b}` on `n` samples over `[0, 2π)` by a direct O(n²) DFT.
fn window_hb_norm(n: usize, b: f64) -> f64 {
    let dt = 2.0 * PI / n as f64;
    let psi: Vec<f64> = (0..n).map(|j| time_window(j as f64 * dt, 2.0 * PI)).collect();
    let mut acc = 0.0;
    for k in 0..n {
        let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let c: Complex64 = psi
            .iter()
            .enumerate()
            .map(|(j, &p)| p * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / n as f64))
            .sum();
        acc += bracket(freq).powf(2.0 * b) * c.norm_sqr();
    }
    (acc * dt / n as f64).sqrt()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn suite_grid(n_t: usize) -> SuiteGrid {
    SuiteGrid {
        k_max: 6,
        n_t,
        dt: 2.0 * PI / n_t as f64,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_zero_norm_is_space_time_l2(seed in any::<u64>()) {
        let grid = suite_grid(256);
        let spec = SpectrumModel::sphere_exact();
        let traj = random_trajectory(&grid, &spec, 10.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let x = xsb_norm(&traj, 0.0, 0.0, &spec).unwrap().value;
        let l2 = l2t_l2x_norm(&traj);
        prop_assert!((x - l2).abs() <= 1e-8 * l2);
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), c in 0.1f64..10.0, s in 0.0f64..2.0, b in 0.0f64..1.0) {
        let grid = suite_grid(128);
        let spec = SpectrumModel::sphere_exact();
        let traj = random_trajectory(&grid, &spec, 5.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let scaled = traj.scaled(c);
        let x1 = xsb_norm(&traj, s, b, &spec).unwrap().value;
        let x2 = xsb_norm(&scaled, s, b, &spec).unwrap().value;
        prop_assert!((x2 - c * x1).abs() <= 1e-12 * x2);
        prop_assert!((l4t_l2x_norm(&scaled) - c * l4t_l2x_norm(&traj)).abs() <= 1e-12 * c * l4t_l2x_norm(&traj));
        prop_assert!((linf_t_l2x_norm(&scaled) - c * linf_t_l2x_norm(&traj)).abs() <= 1e-12 * c * linf_t_l2x_norm(&traj));
    }

    #[test]
    fn identical_spectra_give_ratio_one(seed in any::<u64>(), s in 0.0f64..2.0, b in -1.0f64..1.0) {
        let grid = suite_grid(64);
        let spec = make_zoll_spectrum(1, 0.5, grid.k_max, seed).unwrap();
        let traj = random_trajectory(&grid, &spec, 5.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(norm_equivalence_ratio(&traj, &spec, &spec, s, b).unwrap(), 1.0);
    }
}

#[test]
fn free_modes_have_the_window_norm() {
    let grid = SuiteGrid::default();
    for b in [0.0, 0.4, 0.6] {
        let want = window_hb_norm(grid.n_t, b);
        let norms = free_mode_norms(&grid, b, &[0, 1, 3, 5, 8]).unwrap();
        for (k, v) in norms.iter().enumerate() {
            assert!((v - want).abs() <= 1e-8 * want, "b={b} #{k}: {v} vs {want}");
        }
    }
    assert!(free_mode_norms(&grid, 0.5, &[9]).is_err());
}

#[test]
fn zero_trajectory_has_zero_norms() {
    let z = TimeSampledField::new(0.0, 0.1, vec![HarmonicField::zeros(3); 16]).unwrap();
    let spec = SpectrumModel::sphere_exact();
    assert_eq!(xsb_norm(&z, 1.0, 0.5, &spec).unwrap().value, 0.0);
    assert_eq!(l4t_l2x_norm(&z), 0.0);
    assert_eq!(linf_t_l2x_norm(&z), 0.0);
}

#[test]
fn constant_in_time_field_has_window_l4_norm() {
    let n_t = 512;
    let t_win = 2.0 * PI;
    let dt = t_win / n_t as f64;
    let u = HarmonicField::basis(4, 2, -1);
    let traj = TimeSampledField::new(0.0, dt, vec![u; n_t]).unwrap().windowed();
    let want = simpson(|t| time_window(t, t_win).powi(4), 0.0, t_win, 200_000).powf(0.25);
    assert!((l4t_l2x_norm(&traj) - want).abs() <= 1e-10, "{} vs {want}", l4t_l2x_norm(&traj));
    assert!((linf_t_l2x_norm(&traj) - 1.0).abs() <= 1e-15);
}

#[test]
fn under_sampled_trajectories_are_flagged() {
    let spec = SpectrumModel::sphere_exact();
    let coarse = TimeSampledField::free_mode(8, 5, 3, 30.0, 64, 2.0 * PI / 64.0).unwrap();
    assert!(!xsb_norm(&coarse, 0.0, 0.6, &spec).unwrap().resolved);
    let fine = TimeSampledField::free_mode(8, 5, 3, 30.0, 1024, 2.0 * PI / 1024.0).unwrap();
    assert!(xsb_norm(&fine, 0.0, 0.6, &spec).unwrap().resolved);
}

#[test]
fn trajectories_need_consistent_samples() {
    let f = HarmonicField::zeros(2);
    assert!(TimeSampledField::new(0.0, 0.1, vec![f.clone()]).is_err());
    assert!(TimeSampledField::new(0.0, 0.0, vec![f.clone(); 4]).is_err());
    assert!(TimeSampledField::new(0.0, 0.1, vec![f, HarmonicField::zeros(3)]).is_err());
}

#[test]
fn zoll_and_rounded_coincide_at_s_b_zero() {
    let grid = suite_grid(128);
    for seed in 0..5 {
        let z = make_zoll_spectrum(2, 1.0, grid.k_max, seed).unwrap();
        let r = round_spectrum(&z).unwrap();
        let traj = random_trajectory(&grid, &z, 8.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let ratio = norm_equivalence_ratio(&traj, &z, &r, 0.0, 0.0).unwrap();
        assert!((ratio - 1.0).abs() <= 1e-10, "seed {seed}: {ratio}");
    }
}

#[test]
fn weight_ratio_bound_matches_a_direct_supremum() {
    let k_max = 5;
    let z = make_zoll_spectrum(1, 1.0, k_max, 3).unwrap();
    let r = round_spectrum(&z).unwrap();
    let (s, b) = (0.0, 0.6);
    let bound = weight_ratio_bound(&z, &r, s, b, k_max).unwrap();
    let ma = z.sphere_modes(k_max).unwrap();
    let mb = r.sphere_modes(k_max).unwrap();
    let mut direct: f64 = 1.0;
    for (&x, &y) in ma.iter().zip(&mb) {
        for i in -40_000..40_000 {
            let tau = i as f64 * 5e-3 - y;
            let w = (bracket(tau + x) / bracket(tau + y)).powf(b);
            direct = direct.max(w).max(1.0 / w);
        }
    }
    assert!(bound >= direct * (1.0 - 1e-12) && bound <= direct * (1.0 + 1e-5), "{bound} vs {direct}");
}

#[test]
fn zoll_equivalence_stays_within_the_weight_bound() {
    let grid = suite_grid(256);
    let rep = equivalence_suite(50, &grid, 1, 1.0, 0.0, 0.6, 99).unwrap();
    assert_eq!(rep.ratios.len(), 50);
    assert!(rep.within);
    assert!(rep.bound > 1.0);
    for &x in &rep.ratios {
        assert!(x <= rep.bound && x >= 1.0 / rep.bound, "{x} vs {}", rep.bound);
    }
}

#[test]
fn embeddings_hold_across_a_seeded_suite() {
    let rep = embedding_suite(50, &SuiteGrid::default(), 0.4, 0.6, 7).unwrap();
    assert_eq!(rep.l4_ratios.len(), 50);
    assert!(rep.envelope_excess() <= 0.01);
    assert!(rep.c_l4 <= rep.bound_l4, "{} > {}", rep.c_l4, rep.bound_l4);
    assert!(rep.c_linf <= rep.bound_linf, "{} > {}", rep.c_linf, rep.bound_linf);
    assert!(rep.parseval_error <= 1e-8);
    assert!(rep.resolved);
    assert!(embedding_suite(0, &SuiteGrid::default(), 0.4, 0.6, 7).is_err());
}
