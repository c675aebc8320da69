use std::cmp::Ordering;

use super::engine::{ExtremalOptions, GroupedBilinear};
use crate::harmonic_basis::{sh_len, HarmonicField};
use crate::spectral_ops::{SpectralWindow, SpectrumModel};
use crate::{Error, Result};

/// Extremal constant of `‖χ_λ f · χ_μ g‖ / (‖f‖ ‖g‖)` and its maximizers.
#[derive(Debug, Clone)]
pub struct BilinearScanResult {
    pub lambda: f64,
    pub mu: f64,
    pub constant: f64,
    pub maximizer_f: HarmonicField,
    pub maximizer_g: HarmonicField,
    /// Alternation rounds of the winning start.
    pub iterations: usize,
    /// Relative change of the quotient in the last round of the winning start.
    pub residual: f64,
    pub restarts_used: usize,
    pub converged: bool,
    /// Quotient after each round of the winning start.
    pub history: Vec<f64>,
}

/// Nominal spectral level of a window.
pub fn window_center(w: &SpectralWindow) -> f64 {
    match *w {
        SpectralWindow::SharpBand { lo, hi } => 0.5 * (lo + hi),
        SpectralWindow::SmoothBump { center, .. } => center,
    }
}

fn window_key(w: &SpectralWindow) -> (u8, u64, u64) {
    match *w {
        SpectralWindow::SharpBand { lo, hi } => (0, lo.to_bits(), hi.to_bits()),
        SpectralWindow::SmoothBump { center, half_width } => (1, center.to_bits(), half_width.to_bits()),
    }
}

/// Per-mode multipliers and supported degrees of a window on a sphere-like spectrum.
fn window_modes(w: &SpectralWindow, spec: &SpectrumModel, k_max: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    if !spec.is_spherical() {
        return Err(Error::InvalidParams("bilinear scans need a spherical spectrum".into()));
    }
    let mu = spec.sphere_modes(k_max)?;
    let weights: Vec<f64> = mu.iter().map(|&m| w.weight_at(m)).collect();
    let degrees: Vec<usize> = (0..=k_max)
        .filter(|&k| weights[k * k..(k + 1) * (k + 1)].iter().any(|&x| x != 0.0))
        .collect();
    if degrees.is_empty() {
        return Err(Error::InvalidParams(format!("window {w:?} passes no eigenvalue up to degree {k_max}")));
    }
    // the window must vanish on the next cluster, whose eigenvalues lie within E of its center
    let spread = spec.zoll_params().map_or(0.0, |z| z.half_width);
    let c = spec.cluster_center(k_max + 1);
    let probes = 64;
    let leaks = (0..=probes).any(|i| {
        let t = c - spread + 2.0 * spread * i as f64 / probes as f64;
        w.weight_at(t) != 0.0
    });
    if leaks {
        return Err(Error::InvalidParams(format!("window {w:?} is not contained below degree {}", k_max + 1)));
    }
    debug_assert_eq!(weights.len(), sh_len(k_max));
    Ok((degrees, weights))
}

/// Maximize the windowed product quotient over `f, g` band-limited to `k_max`.
pub fn extremal_bilinear_constant(
    win_f: &SpectralWindow,
    win_g: &SpectralWindow,
    spec: &SpectrumModel,
    k_max: usize,
    opts: &ExtremalOptions,
) -> Result<BilinearScanResult> {
    // solve in a canonical order so that swapping the windows is an exact symmetry
    let swapped = window_key(win_f).cmp(&window_key(win_g)) == Ordering::Greater;
    let (first, second) = if swapped { (win_g, win_f) } else { (win_f, win_g) };
    let (du, wu) = window_modes(first, spec, k_max)?;
    let (dv, wv) = window_modes(second, spec, k_max)?;
    let problem = GroupedBilinear::product(du, dv, Some(wu), Some(wv))?;
    let max = problem.maximize(opts)?;
    let b = max.best;
    let (f, g) = if swapped { (b.v, b.u) } else { (b.u, b.v) };
    Ok(BilinearScanResult {
        lambda: window_center(win_f),
        mu: window_center(win_g),
        constant: b.value,
        maximizer_f: f.with_k_max(k_max),
        maximizer_g: g.with_k_max(k_max),
        iterations: b.rounds,
        residual: b.residual,
        restarts_used: max.start_values.len(),
        converged: b.converged,
        history: b.history,
    })
}

/// `‖χ_λ f · χ_μ g‖ / (‖f‖ ‖g‖)` for given fields, by direct quadrature.
pub fn bilinear_quotient(
    f: &HarmonicField,
    g: &HarmonicField,
    win_f: &SpectralWindow,
    win_g: &SpectralWindow,
    spec: &SpectrumModel,
) -> Result<f64> {
    let k_max = f.k_max().max(g.k_max());
    let (du, wu) = window_modes(win_f, spec, k_max)?;
    let (dv, wv) = window_modes(win_g, spec, k_max)?;
    let problem = GroupedBilinear::product(du, dv, Some(wu), Some(wv))?;
    let nf = f.l2_norm() * g.l2_norm();
    if nf == 0.0 {
        return Ok(0.0);
    }
    Ok(problem.value(&f.with_k_max(k_max), &g.with_k_max(k_max))? / nf)
}
