//! Experiment orchestration. Each experiment yields its artifacts in memory; nothing
//! here depends on wall-clock time, so reruns with one seed produce identical bytes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use spectral_nls::arithmetic::{max_alpha_scan, torus_sup_count};
use spectral_nls::bilinear_estimates::{
    extremal_bilinear_constant, fit_growth_exponent, sogge_exponent, sogge_ratio, ExtremalOptions, PowerFit,
    SCAN_CSV_HEADER,
};
use spectral_nls::bourgain::{embedding_suite, equivalence_suite, free_mode_norms, SuiteGrid};
use spectral_nls::evolution::{
    flow_stability_probe, nls_evolve, snapshot_to_text, strichartz_extremal, write_trajectory, NlsOptions,
    NonlinearStep, ProbeOptions, StrichartzGeometry,
};
use spectral_nls::harmonic_basis::{make_highest_weight, HarmonicField, SphereGrid};
use spectral_nls::spectral_ops::{make_zoll_spectrum, round_spectrum, SpectralWindow, SpectrumModel};

use crate::config::{Experiment, ExperimentConfig, Geometry, Scheme};
use crate::report::{loglog_svg, Series, Summary};

/// Files to write (name relative to the output directory, contents) and the summary.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub summary: Summary,
    pub error: Option<String>,
}

impl Artifacts {
    fn fail(&mut self, msg: impl ToString) {
        self.error = Some(msg.to_string());
    }
}

/// Evaluate cells in parallel; keep results in input order up to the first failure.
fn cells<I: Sync, T: Send>(
    items: &[I],
    f: impl Fn(&I) -> spectral_nls::Result<T> + Sync + Send,
) -> (Vec<T>, Option<String>) {
    let results: Vec<_> = items.par_iter().map(f).collect();
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(e) => return (out, Some(e.to_string())),
        }
    }
    (out, None)
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

/// Spherical spectrum for the configured geometry, tabulated up to `k_max`.
fn sphere_spectrum(cfg: &ExperimentConfig, k_max: usize) -> spectral_nls::Result<SpectrumModel> {
    match cfg.geometry {
        Geometry::Zoll => {
            let z = &cfg.zoll;
            let spec = make_zoll_spectrum(z.alpha, z.half_width, k_max, z.seed.unwrap_or(cfg.seed))?;
            if z.rounded {
                round_spectrum(&spec)
            } else {
                Ok(spec)
            }
        }
        _ => Ok(SpectrumModel::sphere_exact()),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Artifacts {
    let mut a = Artifacts::default();
    a.summary.set("experiment", cfg.experiment.name());
    a.summary.set("geometry", cfg.geometry);
    a.summary.set("seed", cfg.seed);
    match cfg.experiment {
        Experiment::BilinearScan => bilinear_scan(cfg, &mut a),
        Experiment::SoggeScan => sogge_scan(cfg, &mut a),
        Experiment::LatticeScan => lattice_scan(cfg, &mut a),
        Experiment::StrichartzScan => strichartz_scan(cfg, &mut a),
        Experiment::Evolve => evolve(cfg, &mut a),
        Experiment::XsbCheck => xsb_check(cfg, &mut a),
        Experiment::StabilityProbe => stability_probe(cfg, &mut a),
    }
    match &a.error {
        None => a.summary.set("status", "ok"),
        Some(e) => {
            a.summary.set("status", "failed");
            a.summary.set("error", e.replace('\n', " "));
        }
    }
    a
}

fn bilinear_scan(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.bilinear_scan;
    let name = cfg.experiment.name();
    let top = c.degrees.iter().max().unwrap() * c.ratios.iter().max().unwrap();
    let spec = match sphere_spectrum(cfg, top) {
        Ok(s) => s,
        Err(e) => return a.fail(e),
    };
    let band = |k: usize| {
        let center = spec.cluster_center(k).sqrt();
        SpectralWindow::SharpBand { lo: center - 0.5, hi: center + 0.5 }
    };
    let opts = ExtremalOptions {
        random_restarts: c.restarts,
        seed: cfg.seed,
        ..ExtremalOptions::default()
    };
    let grid: Vec<(usize, usize)> = c.ratios.iter().flat_map(|&r| c.degrees.iter().map(move |&n| (r, n))).collect();
    let (results, err) = cells(&grid, |&(r, n)| extremal_bilinear_constant(&band(n), &band(r * n), &spec, r * n, &opts));
    a.files.push((format!("{name}.csv"), csv(SCAN_CSV_HEADER, results.iter().map(|r| r.csv_row()))));
    if let Some(e) = err {
        return a.fail(e);
    }
    let mut fits: Vec<(usize, Vec<(f64, f64)>, PowerFit)> = Vec::new();
    for (i, &r) in c.ratios.iter().enumerate() {
        let pts: Vec<(f64, f64)> = c
            .degrees
            .iter()
            .zip(&results[i * c.degrees.len()..(i + 1) * c.degrees.len()])
            .map(|(&n, res)| (n as f64, res.constant))
            .collect();
        match fit_growth_exponent(&pts) {
            Ok(f) => fits.push((r, pts, f)),
            Err(e) => return a.fail(e),
        }
    }
    for (r, _, f) in &fits {
        a.summary.fit(&format!("ratio_{r}_"), f);
    }
    a.summary.set("reference_slope", 0.25);
    a.summary.set("slope_pass", fits.iter().all(|(_, _, f)| within(f.slope, 0.20, 0.30)));
    let series: Vec<Series> = fits
        .iter()
        .map(|(r, pts, f)| Series {
            label: format!("l = {r}n"),
            points: pts,
            fit: f,
        })
        .collect();
    a.files.push((
        format!("{name}.svg"),
        loglog_svg("Extremal bilinear constant", "n", "constant", &series, Some(0.25)),
    ));
}

fn sogge_scan(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.sogge_scan;
    let name = cfg.experiment.name();
    let (ratios, err) = cells(&c.degrees, |&n| {
        let grid = SphereGrid::exact_for_degree(c.p.ceil() as usize * n)?;
        sogge_ratio(&make_highest_weight(n), c.p, &grid)
    });
    let rows = c.degrees.iter().zip(&ratios).map(|(n, r)| format!("{n},{r}"));
    a.files.push((format!("{name}.csv"), csv("n,ratio", rows)));
    if let Some(e) = err {
        return a.fail(e);
    }
    let pts: Vec<(f64, f64)> = c.degrees.iter().zip(&ratios).map(|(&n, &r)| (n as f64, r)).collect();
    let fit = match fit_growth_exponent(&pts) {
        Ok(f) => f,
        Err(e) => return a.fail(e),
    };
    let reference = sogge_exponent(c.p);
    a.summary.fit("", &fit);
    a.summary.set("p", c.p);
    a.summary.setf("reference_slope", reference);
    if c.p == 4.0 {
        a.summary.set("slope_pass", within(fit.slope, 0.10, 0.15));
    }
    let series = [Series {
        label: format!("highest weight, p = {}", c.p),
        points: &pts,
        fit: &fit,
    }];
    a.files.push((
        format!("{name}.svg"),
        loglog_svg("Lp / L2 ratio of highest-weight harmonics", "n", "ratio", &series, Some(reference)),
    ));
}

fn lattice_scan(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.lattice_scan;
    let name = cfg.experiment.name();
    let (pts, header, rows, err) = if cfg.geometry == Geometry::Torus {
        let (res, err) = cells(&c.half_widths, |&h| Ok(torus_sup_count(h)));
        let rows: Vec<String> = res.iter().map(|s| format!("{},{}", s.half_width, s.count)).collect();
        let pts: Vec<(f64, f64)> = res.iter().map(|s| (s.half_width as f64, s.count as f64)).collect();
        (pts, "A,sup_count", rows, err)
    } else {
        let (res, err) = cells(&c.sizes, |&n| max_alpha_scan(n, n));
        let rows: Vec<String> = c
            .sizes
            .iter()
            .zip(&res)
            .map(|(n, m)| format!("{n},{n},{},{}", m.tau, m.count))
            .collect();
        let pts: Vec<(f64, f64)> = c.sizes.iter().zip(&res).map(|(&n, m)| (n as f64, m.count as f64)).collect();
        (pts, "N,L,tau_star,max_count", rows, err)
    };
    a.files.push((format!("{name}.csv"), csv(header, rows)));
    if let Some(e) = err {
        return a.fail(e);
    }
    let fit = match fit_growth_exponent(&pts) {
        Ok(f) => f,
        Err(e) => return a.fail(e),
    };
    a.summary.fit("", &fit);
    let (title, x) = if cfg.geometry == Geometry::Torus {
        ("Largest torus pair count", "A")
    } else {
        a.summary.set("slope_pass", fit.slope <= 0.40);
        ("Largest resonant count", "N")
    };
    let series = [Series {
        label: "max count".into(),
        points: &pts,
        fit: &fit,
    }];
    a.files.push((format!("{name}.svg"), loglog_svg(title, x, "count", &series, None)));
}

fn strichartz_scan(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.strichartz_scan;
    let name = cfg.experiment.name();
    let torus = cfg.geometry == Geometry::Torus;
    let geometry = if torus { StrichartzGeometry::Torus } else { StrichartzGeometry::Sphere };
    let ns = c.n_values.clone().unwrap_or_else(|| if torus { vec![1, 2, 4, 8] } else { vec![4, 6, 8, 12, 16] });
    let opts = ExtremalOptions {
        random_restarts: c.restarts.unwrap_or(if torus { 0 } else { 3 }),
        seed: cfg.seed,
        ..ExtremalOptions::default()
    };
    let pairs: Vec<(usize, usize)> = ns.iter().map(|&n| (n, c.ratio * n)).collect();
    let (points, err) = cells(&pairs, |&(n, l)| strichartz_extremal(n, l, geometry, &opts));
    let rows = points
        .iter()
        .map(|p| format!("{},{},{},{},{:e},{}", p.n, p.l, p.constant, p.rounds, p.residual, p.converged));
    a.files.push((format!("{name}.csv"), csv("N,L,constant,rounds,residual,converged", rows)));
    if let Some(e) = err {
        return a.fail(e);
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.n.min(p.l) as f64, p.constant)).collect();
    let fit = match fit_growth_exponent(&pts) {
        Ok(f) => f,
        Err(e) => return a.fail(e),
    };
    a.summary.fit("", &fit);
    a.summary.set("ratio", c.ratio);
    a.summary.set("all_converged", points.iter().all(|p| p.converged));
    let pass = if torus { fit.slope <= 0.15 } else { within(fit.slope, 0.17, 0.33) };
    a.summary.set("slope_pass", pass);
    let series = [Series {
        label: format!("{geometry}, L = {}N", c.ratio),
        points: &pts,
        fit: &fit,
    }];
    let reference = (!torus).then_some(0.25);
    a.files.push((
        format!("{name}.svg"),
        loglog_svg("Bilinear Strichartz constant", "min(N, L)", "constant", &series, reference),
    ));
}

fn evolve(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.evolve;
    let name = cfg.experiment.name();
    let spec = match sphere_spectrum(cfg, c.k_max) {
        Ok(s) => s,
        Err(e) => return a.fail(e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut u0 = HarmonicField::random(c.k_max, &mut rng);
    let norm = u0.l2_norm();
    if norm > 0.0 {
        u0.scale(c.amplitude / norm);
    }
    let scheme = match c.scheme {
        Scheme::Collocation => NonlinearStep::GaussCollocation,
        Scheme::Rotation => NonlinearStep::PhaseRotation,
    };
    let opts = NlsOptions {
        t_final: c.t_final,
        dt: c.dt,
        stride: c.stride,
        scheme,
        s: c.s,
    };
    let (traj, report) = match nls_evolve(&u0, &spec, &opts) {
        Ok(r) => r,
        Err(e) => return a.fail(e),
    };
    let params = [
        ("geometry", cfg.geometry.to_string()),
        ("seed", cfg.seed.to_string()),
        ("k_max", c.k_max.to_string()),
        ("amplitude", c.amplitude.to_string()),
        ("t_final", c.t_final.to_string()),
        ("dt", c.dt.to_string()),
        ("stride", c.stride.to_string()),
        ("s", c.s.to_string()),
        ("scheme", format!("{scheme:?}")),
    ];
    let mut dump = Vec::new();
    if let Err(e) = write_trajectory(&mut dump, &params, &report) {
        return a.fail(e);
    }
    a.files.push((format!("{name}.csv"), String::from_utf8(dump).expect("dump is UTF-8")));
    let last = traj.fields.last().expect("trajectory has samples");
    a.files.push((format!("{name}_final.txt"), snapshot_to_text(last, &spec)));
    a.summary.setf("mass_drift", report.max_mass_drift);
    a.summary.setf("energy_drift", report.max_energy_drift);
    a.summary.set("mass_pass", report.max_mass_drift <= 1e-10);
}

fn xsb_check(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.xsb_check;
    let name = cfg.experiment.name();
    let grid = SuiteGrid {
        k_max: c.k_max,
        n_t: c.n_t,
        dt: c.t_win / c.n_t as f64,
    };
    let degrees: Vec<usize> = (0..=c.k_max).collect();
    let z = &cfg.zoll;
    let tasks = [0usize, 1, 2];
    enum Part {
        Emb(spectral_nls::bourgain::EmbeddingReport),
        Free(Vec<f64>),
        Equiv(spectral_nls::bourgain::EquivalenceReport),
    }
    let (parts, err) = cells(&tasks, |&t| match t {
        0 => embedding_suite(c.trajectories, &grid, c.b_l4, c.b_linf, cfg.seed).map(Part::Emb),
        1 => free_mode_norms(&grid, c.b_linf, &degrees).map(Part::Free),
        _ => equivalence_suite(c.equivalence_trials, &grid, z.alpha, z.half_width, c.s, c.b, z.seed.unwrap_or(cfg.seed))
            .map(Part::Equiv),
    });
    let mut rows = Vec::new();
    for p in &parts {
        match p {
            Part::Emb(r) => {
                rows.extend(r.l4_ratios.iter().enumerate().map(|(i, x)| format!("l4_ratio,{i},{x}")));
                rows.extend(r.linf_ratios.iter().enumerate().map(|(i, x)| format!("linf_ratio,{i},{x}")));
                a.summary.setf("c_l4", r.c_l4);
                a.summary.setf("c_linf", r.c_linf);
                a.summary.setf("bound_l4", r.bound_l4);
                a.summary.setf("bound_linf", r.bound_linf);
                a.summary.setf("parseval_error", r.parseval_error);
                a.summary.setf("envelope_excess", r.envelope_excess());
                a.summary.set("resolved", r.resolved);
                a.summary.set("parseval_pass", r.parseval_error <= 1e-8);
                a.summary.set("embedding_pass", r.c_l4 <= r.bound_l4 && r.c_linf <= r.bound_linf);
            }
            Part::Free(v) => {
                rows.extend(v.iter().enumerate().map(|(k, x)| format!("free_mode,{k},{x}")));
                let x0 = v[0];
                a.summary.set("free_mode_pass", v.iter().all(|x| (x - x0).abs() <= 1e-6 * x0));
            }
            Part::Equiv(r) => {
                rows.extend(r.ratios.iter().enumerate().map(|(i, x)| format!("equivalence_ratio,{i},{x}")));
                a.summary.setf("equivalence_bound", r.bound);
                a.summary.set("equivalence_pass", r.within);
            }
        }
    }
    a.files.push((format!("{name}.csv"), csv("quantity,index,value", rows)));
    if let Some(e) = err {
        a.fail(e);
    }
}

fn stability_probe(cfg: &ExperimentConfig, a: &mut Artifacts) {
    let c = &cfg.stability_probe;
    let name = cfg.experiment.name();
    let (probes, err) = cells(&c.degrees, |&n| {
        let opts = ProbeOptions {
            t_final: c.t_final,
            dt: c.dt,
            k_max: Some(n + c.padding),
            ..ProbeOptions::default()
        };
        flow_stability_probe(n, c.s, c.amplitude, c.delta, &opts)
    });
    let rows = probes.iter().map(|p| format!("{},{},{}", p.n, p.ratio, p.sup_time));
    a.files.push((format!("{name}.csv"), csv("n,ratio,sup_time", rows)));
    if let Some(e) = err {
        return a.fail(e);
    }
    let pts: Vec<(f64, f64)> = probes.iter().map(|p| (p.n as f64, p.ratio)).collect();
    if let Ok(fit) = fit_growth_exponent(&pts) {
        a.summary.fit("", &fit);
        let series = [Series {
            label: format!("s = {}", c.s),
            points: &pts,
            fit: &fit,
        }];
        a.files.push((
            format!("{name}.svg"),
            loglog_svg("Flow-map distance growth", "n", "ratio", &series, None),
        ));
    }
}
