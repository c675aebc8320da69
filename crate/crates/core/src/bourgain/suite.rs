//! Seeded trajectory suites for the embedding and equivalence checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::sampled::TimeSampledField;
use super::xsb::{
    l2t_l2x_norm, l4_embedding_constant, l4t_l2x_norm, linf_embedding_constant, linf_t_l2x_norm, norm_equivalence_ratio,
    weight_ratio_bound, xsb_norm,
};
use crate::harmonic_basis::HarmonicField;
use crate::spectral_ops::{make_zoll_spectrum, round_spectrum, SpectrumModel};
use crate::{Error, Result};

/// Shape of the sampled trajectories in a suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteGrid {
    pub k_max: usize,
    /// Samples over the window `[0, n_t Δt)`.
    pub n_t: usize,
    pub dt: f64,
}

impl Default for SuiteGrid {
    /// Window `[0, 2π)` with 1024 samples and band limit 8.
    fn default() -> Self {
        Self {
            k_max: 8,
            n_t: 1024,
            dt: 2.0 * PI / 1024.0,
        }
    }
}

/// `ψ(t) Σ_r e^{iω_r t} S(t) u_r` with 1 to 3 random fields `u_r` and modulations `ω_r`
/// drawn from the integer multiples of `2π / T_win` up to `max_modulation`.
pub fn random_trajectory<R: Rng + ?Sized>(
    grid: &SuiteGrid,
    spec: &SpectrumModel,
    max_modulation: f64,
    rng: &mut R,
) -> Result<TimeSampledField> {
    if grid.n_t < 2 {
        return Err(Error::InvalidParams("a trajectory needs at least two samples".into()));
    }
    let mu = spec.sphere_modes(grid.k_max)?;
    let t_win = grid.n_t as f64 * grid.dt;
    let step = 2.0 * PI / t_win;
    let kmax_mod = (max_modulation / step).floor() as i64;
    let parts: Vec<(f64, HarmonicField)> = (0..rng.random_range(1..=3))
        .map(|_| {
            let w = step * rng.random_range(-kmax_mod..=kmax_mod) as f64;
            let lo = rng.random_range(0..=grid.k_max);
            let hi = rng.random_range(lo..=grid.k_max);
            let mut u = HarmonicField::random_band(grid.k_max, lo, hi, rng);
            u.scale(rng.random_range(0.2..2.0));
            (w, u)
        })
        .collect();
    let fields = (0..grid.n_t)
        .map(|j| {
            let t = j as f64 * grid.dt;
            let mut f = HarmonicField::zeros(grid.k_max);
            for (w, u) in &parts {
                for ((c, a), m) in f.coeffs_mut().iter_mut().zip(u.coeffs()).zip(&mu) {
                    *c += a * Complex64::from_polar(1.0, w * t - m * t);
                }
            }
            f
        })
        .collect();
    Ok(TimeSampledField::new(0.0, grid.dt, fields)?.windowed())
}

/// Ratios `‖u‖_{L⁴L²} / ‖u‖_{X^{0,b₄}}` and `‖u‖_{L^∞L²} / ‖u‖_{X^{0,b∞}}` over a suite,
/// the envelope constants fitted to them and the explicit embedding constants.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub l4_ratios: Vec<f64>,
    pub linf_ratios: Vec<f64>,
    /// Fitted envelope: the largest ratio in the suite.
    pub c_l4: f64,
    pub c_linf: f64,
    /// See [`l4_embedding_constant`] and [`linf_embedding_constant`].
    pub bound_l4: f64,
    pub bound_linf: f64,
    /// Largest `|‖u‖_{X^{0,0}} − ‖u‖_{L²L²}| / ‖u‖_{L²L²}` over the suite.
    pub parseval_error: f64,
    /// Every X^{s,b} value passed the halving check.
    pub resolved: bool,
}

impl EmbeddingReport {
    /// Largest `ratio / C − 1` over the suite for the fitted envelopes.
    pub fn envelope_excess(&self) -> f64 {
        let ex = |r: &[f64], c: f64| r.iter().map(|x| x / c - 1.0).fold(f64::MIN, f64::max);
        ex(&self.l4_ratios, self.c_l4).max(ex(&self.linf_ratios, self.c_linf))
    }
}

pub fn embedding_suite(count: usize, grid: &SuiteGrid, b_l4: f64, b_linf: f64, seed: u64) -> Result<EmbeddingReport> {
    if count == 0 {
        return Err(Error::InvalidParams("the suite needs at least one trajectory".into()));
    }
    let spec = SpectrumModel::sphere_exact();
    let max_mod = 0.125 * PI / grid.dt;
    let mut l4 = Vec::with_capacity(count);
    let mut linf = Vec::with_capacity(count);
    let mut parseval_error: f64 = 0.0;
    let mut resolved = true;
    for i in 0..count {
        let mut rng = crate::rng::stream(seed, 3000 + i as u64);
        let traj = random_trajectory(grid, &spec, max_mod, &mut rng)?;
        let x4 = xsb_norm(&traj, 0.0, b_l4, &spec)?;
        let xi = xsb_norm(&traj, 0.0, b_linf, &spec)?;
        let x0 = xsb_norm(&traj, 0.0, 0.0, &spec)?.value;
        let l2 = l2t_l2x_norm(&traj);
        parseval_error = parseval_error.max((x0 - l2).abs() / l2);
        resolved &= x4.resolved && xi.resolved;
        l4.push(l4t_l2x_norm(&traj) / x4.value);
        linf.push(linf_t_l2x_norm(&traj) / xi.value);
    }
    let mu = spec.sphere_modes(grid.k_max)?;
    let fit = |r: &[f64]| r.iter().cloned().fold(0.0, f64::max);
    Ok(EmbeddingReport {
        c_l4: fit(&l4),
        c_linf: fit(&linf),
        bound_l4: l4_embedding_constant(grid.n_t, grid.dt, b_l4, &mu),
        bound_linf: linf_embedding_constant(grid.n_t, grid.dt, b_linf, &mu),
        l4_ratios: l4,
        linf_ratios: linf,
        parseval_error,
        resolved,
    })
}

/// `‖ψ S(t) Y_k^0‖_{X^{0,b}}` for each `k`, which should not depend on `k`.
pub fn free_mode_norms(grid: &SuiteGrid, b: f64, degrees: &[usize]) -> Result<Vec<f64>> {
    let spec = SpectrumModel::sphere_exact();
    degrees
        .iter()
        .map(|&k| {
            if k > grid.k_max {
                return Err(Error::InvalidParams(format!("degree {k} exceeds band limit {}", grid.k_max)));
            }
            let traj = TimeSampledField::free_mode(grid.k_max, k, 0, (k * (k + 1)) as f64, grid.n_t, grid.dt)?;
            Ok(xsb_norm(&traj, 0.0, b, &spec)?.value)
        })
        .collect()
}

/// Equivalence ratios between a synthetic Zoll spectrum and its rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub ratios: Vec<f64>,
    pub bound: f64,
    pub within: bool,
}

/// For each trial, a fresh Zoll spectrum (seeded), its rounding and a random trajectory;
/// the ratio must lie in `[1/R, R]` with `R` from [`weight_ratio_bound`].
pub fn equivalence_suite(
    trials: usize,
    grid: &SuiteGrid,
    alpha: u32,
    half_width: f64,
    s: f64,
    b: f64,
    seed: u64,
) -> Result<EquivalenceReport> {
    let mut ratios = Vec::with_capacity(trials);
    let mut bound: f64 = 1.0;
    let mut within = true;
    for i in 0..trials {
        let zoll = make_zoll_spectrum(alpha, half_width, grid.k_max, seed.wrapping_add(i as u64))?;
        let rounded = round_spectrum(&zoll)?;
        let r_bound = weight_ratio_bound(&zoll, &rounded, s, b, grid.k_max)?;
        let mut rng = crate::rng::stream(seed, 4000 + i as u64);
        let traj = random_trajectory(grid, &zoll, 0.1 * PI / grid.dt, &mut rng)?;
        let r = norm_equivalence_ratio(&traj, &zoll, &rounded, s, b)?;
        within &= r <= r_bound * (1.0 + 1e-12) && r >= (1.0 - 1e-12) / r_bound;
        bound = bound.max(r_bound);
        ratios.push(r);
    }
    Ok(EquivalenceReport { ratios, bound, within })
}
