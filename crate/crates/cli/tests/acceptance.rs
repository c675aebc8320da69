//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, non-zero exit on any failure.
//! Pass criterion numbers as arguments to run a subset.

use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_nls::arithmetic::{alpha_count, alpha_count_brute, max_alpha_scan};
use spectral_nls::bilinear_estimates::{
    extremal_bilinear_constant, fit_growth_exponent, quadruple_orthogonality_check, sogge_ratio, ExtremalOptions,
};
use spectral_nls::bourgain::{embedding_suite, equivalence_suite, free_mode_norms, SuiteGrid};
use spectral_nls::evolution::{
    bilinear_strichartz, nls_evolve, picard_solve, strichartz_exponent_scan, strichartz_parseval_sphere, NlsOptions,
    PicardOptions, StrichartzGeometry,
};
use spectral_nls::harmonic_basis::{make_highest_weight, HarmonicField, SphereGrid};
use spectral_nls::spectral_ops::{sobolev_norm, SpectralWindow, SpectrumModel};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sphere_band_constant(n: usize, l: usize) -> f64 {
    let spec = SpectrumModel::sphere_exact();
    let r = extremal_bilinear_constant(
        &SpectralWindow::degree_band(n),
        &SpectralWindow::degree_band(l),
        &spec,
        n.max(l),
        &ExtremalOptions::default(),
    )
    .unwrap();
    r.constant
}

fn theorem_exponent() -> Outcome {
    let pts: Vec<(f64, f64)> = [8usize, 16, 32, 64].iter().map(|&n| (n as f64, sphere_band_constant(n, n))).collect();
    let fit = fit_growth_exponent(&pts).unwrap();
    check((0.20..=0.30).contains(&fit.slope), format!("slope {:.4} in [0.20, 0.30]", fit.slope))
}

fn min_dependence() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [8usize, 16] {
        let cs: Vec<f64> = [1, 2, 4, 8].iter().map(|&r| sphere_band_constant(n, r * n)).collect();
        let hi = cs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = cs.iter().cloned().fold(f64::MAX, f64::min);
        ok &= hi / lo < 2.0;
        parts.push(format!("n={n}: max/min {:.4}", hi / lo));
    }
    check(ok, parts.join(", ") + " (< 2)")
}

/// `∫₀^π sin^{2m+1}θ dθ = 2 ∏_{j=1}^m 2j/(2j+1)`.
fn wallis_odd(m: usize) -> f64 {
    2.0 * (1..=m).map(|j| (2 * j) as f64 / (2 * j + 1) as f64).product::<f64>()
}

/// `‖φ_n‖₄/‖φ_n‖₂` for `φ_n = c sinⁿθ e^{inφ}` with `‖φ_n‖₂ = 1`.
fn highest_weight_l4_ratio(n: usize) -> f64 {
    let c2 = 1.0 / (2.0 * PI * wallis_odd(n));
    (c2 * c2 * 2.0 * PI * wallis_odd(2 * n)).powf(0.25)
}

fn sogge_l4() -> Outcome {
    let mut pts = Vec::new();
    let mut worst: f64 = 0.0;
    for n in [8usize, 16, 32, 64, 128] {
        let r = sogge_ratio(&make_highest_weight(n), 4.0, &SphereGrid::exact_for_degree(4 * n).unwrap()).unwrap();
        let want = highest_weight_l4_ratio(n);
        worst = worst.max((r - want).abs() / want);
        pts.push((n as f64, r));
    }
    let fit = fit_growth_exponent(&pts).unwrap();
    check(
        (0.10..=0.15).contains(&fit.slope) && worst <= 1e-8,
        format!("slope {:.4} in [0.10, 0.15], closed-form error {worst:.1e} (<= 1e-8)", fit.slope),
    )
}

fn strichartz_scans() -> Outcome {
    let sphere_pairs: Vec<(usize, usize)> = [4usize, 6, 8, 12, 16].iter().map(|&n| (n, 4 * n)).collect();
    let s = strichartz_exponent_scan(&sphere_pairs, StrichartzGeometry::Sphere, &ExtremalOptions::default()).unwrap();
    let torus_opts = ExtremalOptions {
        random_restarts: 0,
        ..ExtremalOptions::default()
    };
    let torus_pairs: Vec<(usize, usize)> = [1usize, 2, 4, 8].iter().map(|&n| (n, 4 * n)).collect();
    let t = strichartz_exponent_scan(&torus_pairs, StrichartzGeometry::Torus, &torus_opts).unwrap();
    check(
        (0.17..=0.33).contains(&s.fit.slope) && t.fit.slope <= 0.15,
        format!("sphere slope {:.4} in [0.17, 0.33], torus slope {:.4} <= 0.15", s.fit.slope, t.fit.slope),
    )
}

fn parseval_cross_method() -> Outcome {
    let spec = SpectrumModel::sphere_exact();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let band = |rng: &mut ChaCha8Rng| {
            let lo = rng.random_range(0..=21usize);
            let hi = rng.random_range(lo..=(lo + 3).min(24));
            HarmonicField::random_band(hi, lo, hi, rng)
        };
        let u = band(&mut rng);
        let v = band(&mut rng);
        let q = bilinear_strichartz(&u, &v, 2.0 * PI, None, &spec).unwrap();
        let p = strichartz_parseval_sphere(&u, &v).unwrap();
        worst = worst.max((q.value - p.value).abs() / p.value);
    }
    check(worst <= 1e-8, format!("largest relative difference {worst:.1e} over 20 pairs (<= 1e-8)"))
}

fn exact_vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst: f64 = 0.0;
    for i in 0..30 {
        let k1 = rng.random_range(0..=6usize);
        let k2 = rng.random_range(0..=6usize);
        let k3 = rng.random_range(0..=6usize);
        let k0 = k1 + k2 + k3 + rng.random_range(1..=4usize);
        worst = worst.max(quadruple_orthogonality_check([k0, k1, k2, k3], 3, 600 + i).unwrap());
    }
    check(worst <= 1e-10, format!("largest |integral| {worst:.1e} over 30 tuples (<= 1e-10)"))
}

fn conservation() -> Outcome {
    let mut u0 = HarmonicField::random(16, &mut ChaCha8Rng::seed_from_u64(77));
    u0.scale(2.0 / u0.l2_norm());
    let spec = SpectrumModel::sphere_exact();
    let run = |dt: f64| {
        let opts = NlsOptions {
            t_final: 1.0,
            dt,
            stride: 1,
            ..NlsOptions::default()
        };
        nls_evolve(&u0, &spec, &opts).unwrap().1
    };
    let mass = run(1e-3).max_mass_drift;
    let d: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&h| run(h).max_energy_drift).collect();
    let orders: Vec<f64> = d.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    check(
        mass <= 1e-10 && orders.iter().all(|&p| p >= 1.8),
        format!("mass drift {mass:.1e} (<= 1e-10), energy orders {:.3}, {:.3} (>= 1.8)", orders[0], orders[1]),
    )
}

fn duhamel() -> Outcome {
    let spec = SpectrumModel::sphere_exact();
    let mut worst: f64 = 0.0;
    let mut ratios_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for seed in [81u64, 82, 83] {
        let mut u0 = HarmonicField::random(8, &mut ChaCha8Rng::seed_from_u64(seed));
        u0.scale(0.01 / sobolev_norm(&u0, 1.0, &spec).unwrap());
        let p = picard_solve(&u0, &spec, &PicardOptions::default()).unwrap();
        let opts = NlsOptions {
            t_final: 0.1,
            dt: 1e-3,
            stride: 100,
            ..NlsOptions::default()
        };
        let (traj, _) = nls_evolve(&u0, &spec, &opts).unwrap();
        let mut d = p.field.clone();
        d.coeffs_mut().iter_mut().zip(traj.fields.last().unwrap().coeffs()).for_each(|(x, y)| *x -= y);
        worst = worst.max(sobolev_norm(&d, 1.0, &spec).unwrap());
        for w in p.residuals.windows(2) {
            // a residual of exactly zero is a reached fixed point
            if w[1] != 0.0 {
                ratios_ok &= w[1] < 0.5 * w[0];
                worst_ratio = worst_ratio.max(w[1] / w[0]);
            }
        }
    }
    check(
        worst <= 1e-6 && ratios_ok,
        format!("H1 distance {worst:.1e} (<= 1e-6), largest residual ratio {worst_ratio:.1e} (< 0.5)"),
    )
}

fn lattice() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut mismatches = 0;
    let mut nonzero = 0;
    for i in 0..200 {
        let n = rng.random_range(1..=60u64);
        let l0 = rng.random_range(1..=60u64);
        let tau = if i % 2 == 0 {
            let k = rng.random_range(n..=2 * n);
            let l = rng.random_range(l0..=2 * l0);
            k * (k + 1) + l * (l + 1)
        } else {
            rng.random_range(0..=4 * (n * n + l0 * l0) + 6 * (n + l0))
        };
        let a = alpha_count(n, l0, tau);
        nonzero += (a > 0) as usize;
        mismatches += (a != alpha_count_brute(n, l0, tau)) as usize;
    }
    let start = Instant::now();
    let pts: Vec<(f64, f64)> = (1..=10)
        .map(|e| {
            let n = 1u64 << e;
            (n as f64, max_alpha_scan(n, n).unwrap().count as f64)
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let fit = fit_growth_exponent(&pts).unwrap();
    check(
        mismatches == 0 && fit.slope <= 0.40 && secs < 60.0,
        format!(
            "{mismatches} mismatches in 200 instances ({nonzero} nonzero), max-count slope {:.4} (<= 0.40), scan {secs:.1}s (< 60s)",
            fit.slope
        ),
    )
}

fn xsb_suite() -> Outcome {
    let grid = SuiteGrid::default();
    let e = embedding_suite(50, &grid, 0.4, 0.6, 2024).unwrap();
    let free = free_mode_norms(&grid, 0.6, &(0..=grid.k_max).collect::<Vec<_>>()).unwrap();
    let spread = free.iter().map(|x| (x / free[0] - 1.0).abs()).fold(0.0, f64::max);
    let q = equivalence_suite(50, &grid, 1, 0.5, 0.0, 0.6, 2024).unwrap();
    let excess = e.envelope_excess();
    let ok = e.parseval_error <= 1e-8
        && spread <= 1e-6
        && excess <= 0.01
        && e.c_l4 <= e.bound_l4
        && e.c_linf <= e.bound_linf
        && q.within;
    check(
        ok,
        format!(
            "(0,0) error {:.1e}, free-mode spread {spread:.1e}, envelope excess {excess:.1e}, C_L4 {:.4} <= {:.4}, C_Linf {:.4} <= {:.4}, equivalence ratios in [{:.4}, {:.4}] within bound {:.4}",
            e.parseval_error,
            e.c_l4,
            e.bound_l4,
            e.c_linf,
            e.bound_linf,
            q.ratios.iter().cloned().fold(f64::MAX, f64::min),
            q.ratios.iter().cloned().fold(f64::MIN, f64::max),
            q.bound
        ),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("spectral-nls-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.toml");
    fs::write(&cfg, "experiment = \"strichartz-scan\"\nseed = 11\n[strichartz-scan]\nrestarts = 2\n").unwrap();
    let run = |out: &str| {
        Command::new(env!("CARGO_BIN_EXE_spectral-nls"))
            .args(["--check", "--quick", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(out))
            .output()
            .unwrap()
            .status
            .code()
    };
    let codes = (run("a"), run("b"));
    let files = ["strichartz-scan.csv", "strichartz-scan.svg", "summary.txt"];
    let same = files
        .iter()
        .all(|f| fs::read(dir.join("a").join(f)).ok().is_some_and(|x| Some(x) == fs::read(dir.join("b").join(f)).ok()));
    let _ = fs::remove_dir_all(&dir);
    check(
        codes == (Some(0), Some(0)) && same,
        format!("exit codes {codes:?}, outputs byte-identical: {same}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "bilinear exponent", theorem_exponent),
        (2, "min-dependence", min_dependence),
        (3, "L4 growth of highest weights", sogge_l4),
        (4, "bilinear Strichartz scans", strichartz_scans),
        (5, "quadrature vs Parseval", parseval_cross_method),
        (6, "exact vanishing", exact_vanishing),
        (7, "conservation", conservation),
        (8, "Duhamel consistency", duhamel),
        (9, "lattice counting", lattice),
        (10, "X^{s,b} suite", xsb_suite),
        (11, "determinism", determinism),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, f) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("[PASS] criterion {id} {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("[FAIL] criterion {id} {name}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
