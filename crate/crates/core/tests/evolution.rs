use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectral_nls::bilinear_estimates::{fit_growth_exponent, ExtremalOptions};
use spectral_nls::evolution::*;
use spectral_nls::harmonic_basis::{make_highest_weight, HarmonicField, SphereGrid, SphereTransform, TorusField};
use spectral_nls::spectral_ops::{make_zoll_spectrum, round_spectrum, sobolev_norm, SpectrumModel};
use spectral_nls::Error;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_diff(a: &HarmonicField, b: &HarmonicField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn h1_distance(a: &HarmonicField, b: &HarmonicField) -> f64 {
    let mut d = a.clone();
    d.coeffs_mut().iter_mut().zip(b.coeffs()).for_each(|(x, y)| *x -= y);
    sobolev_norm(&d, 1.0, &SpectrumModel::sphere_exact()).unwrap()
}

fn constant_field(k_max: usize, c: Complex64) -> HarmonicField {
    let mut f = HarmonicField::zeros(k_max);
    f.set(0, 0, c * (4.0 * PI).sqrt());
    f
}

// ---------- linear propagation ----------

#[test]
fn propagation_by_zero_is_identity() {
    let u = HarmonicField::random(10, &mut rng(1));
    let v = linear_propagate(&u, 0.0, &SpectrumModel::sphere_exact()).unwrap();
    assert_eq!(u, v);
}

#[test]
fn sphere_flow_has_period_pi() {
    let spec = SpectrumModel::sphere_exact();
    for seed in 0..5 {
        let u = HarmonicField::random(40, &mut rng(seed));
        let v = linear_propagate(&u, PI, &spec).unwrap();
        assert!(max_diff(&u, &v) <= 1e-12);
    }
}

#[test]
fn torus_flow_has_period_one() {
    let spec = SpectrumModel::torus_exact();
    let u = TorusField::random(20, &mut rng(3));
    for t in [1.0, 2.0, 7.0] {
        let v = linear_propagate(&u, t, &spec).unwrap();
        let err = u.coeffs().iter().zip(v.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-12, "t={t}: {err}");
    }
}

#[test]
fn propagate_state_advances_clock() {
    let state = EvolutionState {
        field: HarmonicField::basis(3, 2, 1),
        time: 0.5,
        spec: SpectrumModel::sphere_exact(),
    };
    let next = propagate_state(&state, 0.25).unwrap();
    assert_eq!(next.time, 0.75);
    let expected = Complex64::from_polar(1.0, -6.0 * 0.25);
    assert!((next.field.get(2, 1) - expected).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn linear_flow_is_an_isometry(seed in any::<u64>(), t in -50.0f64..50.0, which in 0usize..4) {
        let k_max = 12;
        let spec = match which {
            0 => SpectrumModel::sphere_exact(),
            1 => make_zoll_spectrum(1, 0.3, k_max, seed).unwrap(),
            2 => round_spectrum(&make_zoll_spectrum(2, 0.3, k_max, seed).unwrap()).unwrap(),
            _ => SpectrumModel::torus_exact(),
        };
        if which == 3 {
            let u = TorusField::random(6, &mut rng(seed));
            let v = linear_propagate(&u, t, &spec).unwrap();
            prop_assert!((u.l2_norm() - v.l2_norm()).abs() <= 1e-12 * u.l2_norm());
        } else {
            let u = HarmonicField::random(k_max, &mut rng(seed));
            let v = linear_propagate(&u, t, &spec).unwrap();
            prop_assert!((u.l2_norm() - v.l2_norm()).abs() <= 1e-12 * u.l2_norm());
        }
    }
}

// ---------- split-step NLS ----------

#[test]
fn zero_data_stays_zero() {
    let opts = NlsOptions {
        t_final: 0.1,
        dt: 0.01,
        stride: 1,
        ..Default::default()
    };
    let (traj, report) = nls_evolve(&HarmonicField::zeros(6), &SpectrumModel::sphere_exact(), &opts).unwrap();
    assert_eq!(traj.len(), 11);
    assert!(traj.fields.iter().all(|f| f.l2_norm() == 0.0));
    assert!(report.energy.iter().all(|&e| e == 0.0));
}

#[test]
fn constant_data_follows_the_phase_ode() {
    let c = Complex64::new(0.6, -0.3);
    let exact = |t: f64| c * Complex64::from_polar(1.0, -c.norm_sqr() * t);
    for scheme in [NonlinearStep::GaussCollocation, NonlinearStep::PhaseRotation] {
        let opts = NlsOptions {
            t_final: 1.0,
            dt: 1e-3,
            stride: 100,
            scheme,
            ..Default::default()
        };
        let (traj, _) = nls_evolve(&constant_field(4, c), &SpectrumModel::sphere_exact(), &opts).unwrap();
        let last = traj.fields.last().unwrap();
        let want = constant_field(4, exact(1.0));
        assert!(max_diff(last, &want) <= 1e-10, "{scheme:?}: {}", max_diff(last, &want));
    }
}

#[test]
fn mass_is_conserved_to_roundoff() {
    let mut u0 = HarmonicField::random(16, &mut rng(11));
    u0.scale(2.0);
    let opts = NlsOptions {
        t_final: 1.0,
        dt: 1e-3,
        stride: 50,
        ..Default::default()
    };
    let (_, report) = nls_evolve(&u0, &SpectrumModel::sphere_exact(), &opts).unwrap();
    assert!(report.max_mass_drift <= 1e-10, "{}", report.max_mass_drift);
    assert_eq!(report.times.len(), 21);
}

#[test]
fn energy_error_is_second_order() {
    let mut u0 = HarmonicField::random(16, &mut rng(12));
    u0.scale(2.0);
    let spec = SpectrumModel::sphere_exact();
    let drift = |dt: f64| {
        let opts = NlsOptions {
            t_final: 1.0,
            dt,
            stride: 1,
            ..Default::default()
        };
        nls_evolve(&u0, &spec, &opts).unwrap().1.max_energy_drift
    };
    let d: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&h| drift(h)).collect();
    assert!(d[0] / d[1] >= 3.5 && d[1] / d[2] >= 3.5, "{d:?}");
}

#[test]
fn stride_must_divide_steps() {
    let opts = NlsOptions {
        t_final: 1.0,
        dt: 0.1,
        stride: 3,
        ..Default::default()
    };
    let r = nls_evolve(&HarmonicField::zeros(2), &SpectrumModel::sphere_exact(), &opts);
    assert!(matches!(r, Err(Error::InvalidParams(_))));
}

#[test]
fn large_step_on_large_data_trips_the_blowup_guard() {
    let mut u0 = HarmonicField::random(8, &mut rng(13));
    u0.scale(200.0);
    let opts = NlsOptions {
        t_final: 1.0,
        dt: 0.5,
        stride: 1,
        scheme: NonlinearStep::PhaseRotation,
        ..Default::default()
    };
    let r = nls_evolve(&u0, &SpectrumModel::sphere_exact(), &opts);
    assert!(matches!(r, Err(Error::BlowUp { .. })), "{r:?}");
}

// ---------- Picard iteration ----------

fn small_data(seed: u64) -> HarmonicField {
    let mut u = HarmonicField::random(8, &mut rng(seed));
    let n = sobolev_norm(&u, 1.0, &SpectrumModel::sphere_exact()).unwrap();
    u.scale(0.01 / n);
    u
}

#[test]
fn picard_of_zero_is_zero() {
    let r = picard_solve(&HarmonicField::zeros(4), &SpectrumModel::sphere_exact(), &PicardOptions::default()).unwrap();
    assert_eq!(r.field.l2_norm(), 0.0);
    assert!(r.residuals.iter().all(|&x| x == 0.0));
    assert!(!r.diverged);
}

#[test]
fn picard_contracts_for_small_data() {
    let opts = PicardOptions {
        n_iters: 4,
        ..Default::default()
    };
    let r = picard_solve(&small_data(21), &SpectrumModel::sphere_exact(), &opts).unwrap();
    assert!(!r.diverged);
    assert!(r.residuals[0] > 0.0);
    for j in 1..r.residuals.len() {
        // an exactly vanishing residual means the iteration has reached its fixed point
        assert!(r.residuals[j] == 0.0 || r.residuals[j] < 0.5 * r.residuals[j - 1], "{:?}", r.residuals);
    }
}

#[test]
fn picard_contracts_geometrically_for_moderate_data() {
    let mut u0 = small_data(24);
    u0.scale(50.0);
    let opts = PicardOptions {
        n_iters: 4,
        ..Default::default()
    };
    let r = picard_solve(&u0, &SpectrumModel::sphere_exact(), &opts).unwrap();
    assert!(r.residuals.iter().all(|&x| x > 0.0), "{:?}", r.residuals);
    for j in 1..r.residuals.len() {
        assert!(r.residuals[j] < 0.5 * r.residuals[j - 1], "{:?}", r.residuals);
    }
}

#[test]
fn picard_agrees_with_split_step() {
    let spec = SpectrumModel::sphere_exact();
    for seed in [22, 23] {
        let u0 = small_data(seed);
        let p = picard_solve(&u0, &spec, &PicardOptions::default()).unwrap();
        let opts = NlsOptions {
            t_final: 0.1,
            dt: 1e-3,
            stride: 100,
            ..Default::default()
        };
        let (traj, _) = nls_evolve(&u0, &spec, &opts).unwrap();
        let d = h1_distance(&p.field, traj.fields.last().unwrap());
        assert!(d <= 1e-6, "seed {seed}: {d:e}");
    }
}

// ---------- bilinear Strichartz functionals ----------

#[test]
fn constant_harmonics_give_closed_form() {
    let spec = SpectrumModel::sphere_exact();
    let y00 = HarmonicField::basis(0, 0, 0);
    for t in [0.3, 1.0, PI, 2.0 * PI] {
        let s = bilinear_strichartz(&y00, &y00, t, None, &spec).unwrap();
        let want = (t / (4.0 * PI)).sqrt();
        assert!((s.value - want).abs() <= 1e-13, "T={t}: {} vs {want}", s.value);
        assert!(!s.under_resolved);
    }
    let p = strichartz_parseval_sphere(&y00, &y00).unwrap();
    assert!((p.value - 0.5f64.sqrt()).abs() <= 1e-13);
    assert_eq!(p.method, StrichartzMethod::ParsevalExact);
}

#[test]
fn single_resonance_term_matches_spatial_quadrature() {
    let (a, b) = (HarmonicField::basis(2, 1, 0), HarmonicField::basis(2, 2, 0));
    let p = strichartz_parseval_sphere(&a, &b).unwrap();
    let t = SphereTransform::new(SphereGrid::exact_for_degree(8).unwrap(), 2);
    let mut x = t.synthesize(&a).unwrap();
    x.iter_mut().zip(t.synthesize(&b).unwrap()).for_each(|(p, q)| *p *= q);
    let want = (2.0 * PI * t.quadrature_norm_sqr(&x)).sqrt();
    assert!((p.value - want).abs() <= 1e-13 * want);
}

#[test]
fn quadrature_matches_parseval_over_full_period() {
    let spec = SpectrumModel::sphere_exact();
    let mut r = rng(31);
    for i in 0..6 {
        let (lo, hi) = (1 + i, 3 + 2 * i);
        let u = HarmonicField::random_band(hi, lo, hi, &mut r);
        let v = HarmonicField::random_band(hi + 2, lo + 1, hi + 2, &mut r);
        let q = bilinear_strichartz(&u, &v, 2.0 * PI, None, &spec).unwrap();
        let p = strichartz_parseval_sphere(&u, &v).unwrap();
        assert!((q.value - p.value).abs() <= 1e-8 * p.value, "{} vs {}", q.value, p.value);
        assert!(!q.under_resolved);
    }
}

#[test]
fn gauss_panels_agree_with_periodic_rule() {
    let spec = SpectrumModel::sphere_exact();
    let mut r = rng(32);
    let u = HarmonicField::random_band(5, 2, 5, &mut r);
    let v = HarmonicField::random_band(6, 3, 6, &mut r);
    // 2π is a multiple of the period; 2π·(1+1e-9) is not and takes the panel branch
    let a = bilinear_strichartz(&u, &v, 2.0 * PI, None, &spec).unwrap();
    let b = bilinear_strichartz(&u, &v, 2.0 * PI * (1.0 + 1e-9), None, &spec).unwrap();
    assert!((a.value - b.value).abs() <= 1e-8 * a.value);
}

#[test]
fn doubling_nodes_beyond_nyquist_changes_nothing() {
    let spec = SpectrumModel::sphere_exact();
    let mut r = rng(33);
    let u = HarmonicField::random_band(4, 1, 4, &mut r);
    let v = HarmonicField::random_band(4, 2, 4, &mut r);
    let a = bilinear_strichartz(&u, &v, PI, None, &spec).unwrap();
    let b = bilinear_strichartz(&u, &v, PI, Some(2 * a.nt), &spec).unwrap();
    assert!((a.value - b.value).abs() <= 1e-10 * a.value);
}

#[test]
fn too_few_nodes_are_flagged() {
    let spec = SpectrumModel::sphere_exact();
    let mut r = rng(34);
    let u = HarmonicField::random_band(6, 3, 6, &mut r);
    let v = HarmonicField::random_band(6, 1, 6, &mut r);
    let s = bilinear_strichartz(&u, &v, PI, Some(3), &spec).unwrap();
    assert!(s.under_resolved);
}

#[test]
fn swapping_disjoint_bands_keeps_the_value() {
    let mut r = rng(35);
    let u = HarmonicField::random_band(3, 2, 3, &mut r);
    let v = HarmonicField::random_band(9, 6, 9, &mut r);
    let a = strichartz_parseval_sphere(&u, &v).unwrap();
    let b = strichartz_parseval_sphere(&v, &u).unwrap();
    assert!((a.value - b.value).abs() <= 1e-12 * a.value);
    assert_eq!((a.n, a.l), (3, 9));
}

#[test]
fn clustered_spectra_need_one_eigenvalue_per_degree() {
    let spec = make_zoll_spectrum(1, 0.3, 6, 4).unwrap();
    let u = HarmonicField::random(6, &mut rng(36));
    assert!(bilinear_strichartz(&u, &u, 1.0, None, &spec).is_err());
    let rounded = round_spectrum(&spec).unwrap();
    assert!(bilinear_strichartz(&u, &u, 1.0, None, &rounded).is_ok());
}

#[test]
fn torus_engine_matches_space_time_quadrature() {
    let e = TorusStrichartz::new(2, 3).unwrap();
    let mut r = rng(37);
    let u = TorusField::random(5, &mut r);
    let v = TorusField::random(5, &mut r);
    let c: Vec<Complex64> = e.u_modes().iter().map(|q| u.get(q.0, q.1)).collect();
    let d: Vec<Complex64> = e.v_modes().iter().map(|q| v.get(q.0, q.1)).collect();
    let (fu, fv) = (e.to_field(&c, true), e.to_field(&d, false));
    let q = bilinear_strichartz_torus(&fu, &fv, 1.0, None).unwrap();
    let exact = e.value(&c, &d);
    assert!((q.value - exact).abs() <= 1e-10 * exact, "{} vs {exact}", q.value);
    assert!(!q.under_resolved);
}

#[test]
fn torus_shell_sizes() {
    for n in 1..6usize {
        assert_eq!(torus_shell(n).len(), (4 * n - 1).pow(2) - (2 * n - 1).pow(2));
    }
}

#[test]
fn torus_maximizer_beats_random_pairs() {
    let e = TorusStrichartz::new(1, 2).unwrap();
    let best = e.maximize(&ExtremalOptions::default()).unwrap();
    let mut r = rng(38);
    for _ in 0..20 {
        let u = TorusField::random(3, &mut r);
        let v = TorusField::random(3, &mut r);
        let c: Vec<Complex64> = e.u_modes().iter().map(|q| u.get(q.0, q.1)).collect();
        let d: Vec<Complex64> = e.v_modes().iter().map(|q| v.get(q.0, q.1)).collect();
        let nc = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nd = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(e.value(&c, &d) / (nc * nd) <= best.value * (1.0 + 1e-9));
    }
}

#[test]
fn scan_requires_four_pairs_with_fixed_ratio() {
    let o = ExtremalOptions::default();
    assert!(strichartz_exponent_scan(&[(1, 4), (2, 8), (3, 12)], StrichartzGeometry::Sphere, &o).is_err());
    assert!(strichartz_exponent_scan(&[(1, 4), (2, 8), (3, 12), (4, 15)], StrichartzGeometry::Sphere, &o).is_err());
}

#[test]
fn synthetic_quarter_law_fits_exactly() {
    let pts: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0, 32.0].iter().map(|&m| (m, 1.7 * m.powf(0.25))).collect();
    assert!((fit_growth_exponent(&pts).unwrap().slope - 0.25).abs() <= 1e-12);
}

#[test]
fn small_sphere_scan_grows() {
    let o = ExtremalOptions {
        random_restarts: 1,
        ..Default::default()
    };
    let s = strichartz_exponent_scan(&[(1, 2), (2, 4), (3, 6), (4, 8)], StrichartzGeometry::Sphere, &o).unwrap();
    assert_eq!(s.points.len(), 4);
    assert!(s.points.iter().all(|p| p.converged && p.constant > 0.0));
    assert!(s.fit.slope > 0.0);
}

// ---------- stability probe ----------

#[test]
fn probe_without_perturbation_returns_one() {
    let p = flow_stability_probe(8, 0.2, 1.0, 0.0, &ProbeOptions::default()).unwrap();
    assert_eq!(p.ratio, 1.0);
}

#[test]
fn probe_at_zero_amplitude_is_linear() {
    let opts = ProbeOptions {
        t_final: 0.2,
        dt: 0.01,
        ..Default::default()
    };
    let p = flow_stability_probe(6, 0.2, 0.0, 1e-5, &opts).unwrap();
    assert!((p.ratio - 1.0).abs() <= 1e-8, "{}", p.ratio);
}

#[test]
fn probe_rejects_bad_parameters() {
    let o = ProbeOptions::default();
    assert!(flow_stability_probe(0, 0.2, 1.0, 0.1, &o).is_err());
    assert!(flow_stability_probe(4, 0.2, 1.0, 2.0, &o).is_err());
}

// ---------- dumps and snapshots ----------

#[test]
fn trajectory_dump_round_trip() {
    let u0 = make_highest_weight(3).with_k_max(5);
    let opts = NlsOptions {
        t_final: 0.1,
        dt: 0.01,
        stride: 2,
        ..Default::default()
    };
    let (_, report) = nls_evolve(&u0, &SpectrumModel::sphere_exact(), &opts).unwrap();
    let mut buf = Vec::new();
    write_trajectory(&mut buf, &[("k_max", "5".into()), ("dt", "0.01".into())], &report).unwrap();
    let (params, rows) = read_trajectory(buf.as_slice()).unwrap();
    assert_eq!(params, vec![("k_max".to_string(), "5".to_string()), ("dt".to_string(), "0.01".to_string())]);
    assert_eq!(rows.len(), report.times.len());
    for (row, i) in rows.iter().zip(0..) {
        assert_eq!(row[0], report.times[i]);
        assert_eq!(row[1], report.mass[i]);
        assert_eq!(row[2], report.energy[i]);
        assert_eq!(row[3], report.hs_norm[i]);
    }
}

#[test]
fn snapshot_round_trip_on_every_spectrum_kind() {
    let u = HarmonicField::random(5, &mut rng(41));
    let zoll = make_zoll_spectrum(3, 0.2, 5, 9).unwrap();
    for spec in [SpectrumModel::sphere_exact(), round_spectrum(&zoll).unwrap(), zoll] {
        let text = snapshot_to_text(&u, &spec);
        let (v, s) = snapshot_from_text(&text).unwrap();
        assert_eq!(u, v);
        assert_eq!(spec, s);
    }
}

#[test]
fn snapshot_rejects_malformed_lines() {
    let good = snapshot_to_text(&HarmonicField::basis(1, 1, 0), &SpectrumModel::sphere_exact());
    assert!(snapshot_from_text(&good.replace("#field", "#fild")).is_err());
    assert!(snapshot_from_text(&format!("{good}1 0 1.0\n")).is_err());
    assert!(snapshot_from_text(&format!("{good}2 0 1.0 0.0\n")).is_err());
    assert!(snapshot_from_text(&format!("{good}1 0 1.0 0.0\n")).is_err());
}
