use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_nls::harmonic_basis::{make_highest_weight, HarmonicField, TorusField};
use spectral_nls::spectral_ops::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn spectra(k_max: usize, seed: u64) -> Vec<SpectrumModel> {
    let z = make_zoll_spectrum(1, 0.5, k_max, seed).unwrap();
    let r = round_spectrum(&z).unwrap();
    vec![SpectrumModel::sphere_exact(), z, r]
}

fn windows() -> Vec<SpectralWindow> {
    vec![
        SpectralWindow::dyadic(2.0),
        SpectralWindow::degree_band(3),
        SpectralWindow::bump(4.2),
        SpectralWindow::SmoothBump { center: 1.5, half_width: 2.5 },
    ]
}

#[test]
fn projectors_are_orthogonal_idempotents() {
    let f = HarmonicField::random(9, &mut rng(1));
    for k in 0..=9 {
        let pk = project_degree(&f, k);
        for j in 0..=9 {
            let pjpk = project_degree(&pk, j);
            if j == k {
                assert_eq!(pjpk, pk);
            } else {
                assert!(pjpk.coeffs().iter().all(|c| *c == Complex64::new(0.0, 0.0)));
            }
        }
    }
    let y32 = HarmonicField::basis(5, 3, 2);
    assert_eq!(project_degree(&y32, 3), y32);
    assert_eq!(project_degree(&y32, 2).l2_norm(), 0.0);
}

#[test]
fn projectors_resolve_the_identity() {
    let f = HarmonicField::random(11, &mut rng(2));
    let mut sum = HarmonicField::zeros(11);
    for k in 0..=11 {
        let p = project_degree(&f, k);
        sum.coeffs_mut().iter_mut().zip(p.coeffs()).for_each(|(s, c)| *s += c);
    }
    assert_eq!(sum, f);
}

#[test]
fn disjoint_dyadic_bands_compose_to_zero() {
    let spec = SpectrumModel::sphere_exact();
    let f = HarmonicField::random(40, &mut rng(3));
    let a = apply_window(&f, &SpectralWindow::dyadic(4.0), &spec).unwrap();
    let ab = apply_window(&a, &SpectralWindow::dyadic(8.5), &spec).unwrap();
    assert_eq!(ab.l2_norm(), 0.0);
    let aa = apply_window(&a, &SpectralWindow::dyadic(4.0), &spec).unwrap();
    assert_eq!(aa, a);
    let degrees: Vec<usize> = (0..=40).filter(|&k| a.degree_norm_sqr(k) > 0.0).collect();
    assert_eq!(degrees, vec![4, 5, 6, 7]);
}

#[test]
fn bump_at_its_center_keeps_highest_weights() {
    let spec = SpectrumModel::sphere_exact();
    for n in [1usize, 4, 10] {
        let phi = make_highest_weight(n);
        let w = SpectralWindow::bump(((n * (n + 1)) as f64).sqrt());
        assert_eq!(apply_window(&phi, &w, &spec).unwrap(), phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn windows_are_self_adjoint(seed in any::<u64>(), which in 0usize..4, sp in 0usize..3) {
        let k_max = 8;
        let spec = &spectra(k_max, seed)[sp];
        let w = windows()[which];
        let mut r = rng(seed);
        let f = HarmonicField::random(k_max, &mut r);
        let g = HarmonicField::random(k_max, &mut r);
        let lhs = apply_window(&f, &w, spec).unwrap().inner(&g);
        let rhs = f.inner(&apply_window(&g, &w, spec).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn sobolev_zero_is_l2(seed in any::<u64>(), sp in 0usize..3) {
        let spec = &spectra(10, seed)[sp];
        let f = HarmonicField::random(10, &mut rng(seed));
        prop_assert!((sobolev_norm(&f, 0.0, spec).unwrap() - f.l2_norm()).abs() <= 1e-13 * f.l2_norm());
    }

    #[test]
    fn sobolev_norm_is_monotone_in_s(seed in any::<u64>(), s in 0.0f64..3.0, ds in 0.0f64..2.0) {
        let spec = SpectrumModel::sphere_exact();
        let f = HarmonicField::random(8, &mut rng(seed));
        prop_assert!(sobolev_norm(&f, s, &spec).unwrap() <= sobolev_norm(&f, s + ds, &spec).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn rounding_moves_each_eigenvalue_by_at_most_e(seed in any::<u64>(), alpha in 0u32..4, e in 0.0f64..0.99) {
        let k_max = 12;
        let z = make_zoll_spectrum(alpha, e, k_max, seed).unwrap();
        let r = round_spectrum(&z).unwrap();
        let a = z.sphere_modes(k_max).unwrap();
        let b = r.sphere_modes(k_max).unwrap();
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= e + 1e-12);
    }

    #[test]
    fn spectrum_text_round_trips(seed in any::<u64>(), alpha in 0u32..4, e in 0.0f64..0.99, rounded in any::<bool>()) {
        let mut s = make_zoll_spectrum(alpha, e, 6, seed).unwrap();
        if rounded {
            s = round_spectrum(&s).unwrap();
        }
        prop_assert_eq!(SpectrumModel::from_text(&s.to_text()).unwrap(), s);
    }
}

#[test]
fn sobolev_of_y10_and_torus_mode() {
    let spec = SpectrumModel::sphere_exact();
    let y = HarmonicField::basis(1, 1, 0);
    assert!((sobolev_norm(&y, 1.0, &spec).unwrap() - 5f64.powf(0.25)).abs() <= 1e-14);
    let mut t = TorusField::zeros(2);
    t.set(1, 1, Complex64::new(1.0, 0.0));
    let mu = 4.0 * std::f64::consts::PI;
    let want = japanese(mu).sqrt();
    assert!((sobolev_norm(&t, 1.0, &SpectrumModel::torus_exact()).unwrap() - want).abs() <= 1e-13);
}

#[test]
fn weyl_counts_match_enumeration_and_grow_quadratically() {
    let spec = SpectrumModel::sphere_exact();
    let mut ratios = Vec::new();
    for n in [4usize, 8, 16, 32] {
        let (lo, hi) = (n as f64, 2.0 * n as f64);
        let k_max = 2 * n + 1;
        let got = weyl_count(&spec, k_max, lo, hi).unwrap();
        let want: usize = (0..=k_max)
            .filter(|&k| {
                let mu = (k * (k + 1)) as f64;
                (lo..=hi).contains(&(1.0 + mu * mu).powf(0.25))
            })
            .map(|k| 2 * k + 1)
            .sum();
        assert_eq!(got, want, "N={n}");
        ratios.push(got as f64 / (n * n) as f64);
    }
    // one constant bounds all four counts
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(c <= 4.0, "{ratios:?}");
    assert!(ratios.iter().all(|&r| r >= 2.0), "{ratios:?}");
}

#[test]
fn zoll_examples() {
    let s = make_zoll_spectrum(2, 1.0, 12, 77).unwrap();
    assert!(s.cluster(10).unwrap().iter().all(|&m| (109.25..=111.25).contains(&m)));
    assert_eq!(make_zoll_spectrum(2, 1.0, 12, 77).unwrap(), s);
    let flat = make_zoll_spectrum(3, 0.0, 8, 1).unwrap();
    assert_eq!(round_spectrum(&flat).unwrap().sphere_modes(8).unwrap(), flat.sphere_modes(8).unwrap());
    assert!(round_spectrum(&SpectrumModel::sphere_exact()).is_err());
}
