use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::sampled::{dft_frequency, TimeSampledField};
use crate::spectral_ops::{japanese, SpectrumModel};
use crate::{Error, Result};

/// Relative change under halving the sample rate above which a norm is flagged as
/// under-resolved in time.
pub const NYQUIST_TOL: f64 = 1e-4;

/// Discretized `X^{s,b}` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XsbNorm {
    pub s: f64,
    pub b: f64,
    pub value: f64,
    /// Relative change when every other sample is dropped (`NaN` if too few samples).
    pub nyquist_change: f64,
    pub resolved: bool,
}

/// `‖u‖²_{X^{s,b}} ≈ (Δt/n) Σ_modes ⟨μ⟩^s Σ_j ⟨τ_j + μ⟩^{2b} |Σ_l c_l e^{−2πi jl/n}|²`.
fn xsb_raw(fields: &[&[Complex64]], dt: f64, mu: &[f64], s: f64, b: f64) -> f64 {
    let n = fields.len();
    let modes = mu.len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let per_mode: Vec<f64> = (0..modes)
        .into_par_iter()
        .map(|i| {
            let mut series: Vec<Complex64> = fields.iter().map(|f| f[i]).collect();
            if series.iter().all(|c| c.norm_sqr() == 0.0) {
                return 0.0;
            }
            fft.process(&mut series);
            let w = japanese(mu[i]).powf(s);
            let acc: f64 = series
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let tau = dft_frequency(j, n, dt);
                    japanese(tau + mu[i]).powf(2.0 * b) * c.norm_sqr()
                })
                .sum();
            w * acc
        })
        .collect();
    per_mode.iter().sum::<f64>() * dt / n as f64
}

pub fn xsb_norm(traj: &TimeSampledField, s: f64, b: f64, spec: &SpectrumModel) -> Result<XsbNorm> {
    let mu = spec.sphere_modes(traj.k_max())?;
    let full: Vec<&[Complex64]> = traj.fields.iter().map(|f| f.coeffs()).collect();
    let value = xsb_raw(&full, traj.dt, &mu, s, b).sqrt();
    let nyquist_change = if traj.len() >= 4 && traj.len() % 2 == 0 {
        let half: Vec<&[Complex64]> = full.iter().step_by(2).copied().collect();
        let coarse = xsb_raw(&half, 2.0 * traj.dt, &mu, s, b).sqrt();
        if value > 0.0 {
            (coarse - value).abs() / value
        } else {
            0.0
        }
    } else {
        f64::NAN
    };
    Ok(XsbNorm {
        s,
        b,
        value,
        nyquist_change,
        resolved: nyquist_change <= NYQUIST_TOL,
    })
}

/// `(∫ ‖u(t)‖⁴_{L²} dt)^{1/4}` by the periodic rectangle rule.
pub fn l4t_l2x_norm(traj: &TimeSampledField) -> f64 {
    (traj.dt * traj.fields.iter().map(|f| f.l2_norm().powi(4)).sum::<f64>()).powf(0.25)
}

/// `(∫ ‖u(t)‖²_{L²} dt)^{1/2}` by the periodic rectangle rule.
pub fn l2t_l2x_norm(traj: &TimeSampledField) -> f64 {
    (traj.dt * traj.fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>()).sqrt()
}

/// `max_j ‖u(t_j)‖_{L²}`.
pub fn linf_t_l2x_norm(traj: &TimeSampledField) -> f64 {
    traj.fields.iter().map(|f| f.l2_norm()).fold(0.0, f64::max)
}

/// `‖u‖_{X^{s,b}_A} / ‖u‖_{X^{s,b}_B}`; 1 for the zero trajectory.
pub fn norm_equivalence_ratio(
    traj: &TimeSampledField,
    spec_a: &SpectrumModel,
    spec_b: &SpectrumModel,
    s: f64,
    b: f64,
) -> Result<f64> {
    let na = xsb_norm(traj, s, b, spec_a)?.value;
    let nb = xsb_norm(traj, s, b, spec_b)?.value;
    if na == 0.0 && nb == 0.0 {
        return Ok(1.0);
    }
    if nb == 0.0 {
        return Err(Error::InvalidParams("second norm vanishes on a nonzero trajectory".into()));
    }
    Ok(na / nb)
}

/// Largest `(T⁻¹ Σ_j ⟨τ_j + μ⟩^{−q})` over the given eigenvalues, with `τ_j` the DFT
/// frequencies of `n_t` samples spaced `dt` and `T = n_t dt`.
fn max_weight_sum(n_t: usize, dt: f64, mu: &[f64], q: f64) -> f64 {
    let t = n_t as f64 * dt;
    mu.iter()
        .map(|&m| (0..n_t).map(|j| japanese(dft_frequency(j, n_t, dt) + m).powf(-q)).sum::<f64>() / t)
        .fold(0.0, f64::max)
}

/// Constant `C` with `‖u‖_{L⁴L²} ≤ C ‖u‖_{X^{0,b}}` for every sampled trajectory whose modes
/// have eigenvalues in `mu`: discrete Hausdorff–Young and Hölder per mode, then Minkowski.
pub fn l4_embedding_constant(n_t: usize, dt: f64, b: f64, mu: &[f64]) -> f64 {
    max_weight_sum(n_t, dt, mu, 4.0 * b).powf(0.25)
}

/// Constant `C` with `max_t ‖u(t)‖_{L²} ≤ C ‖u‖_{X^{0,b}}`, by Cauchy–Schwarz per mode.
pub fn linf_embedding_constant(n_t: usize, dt: f64, b: f64, mu: &[f64]) -> f64 {
    max_weight_sum(n_t, dt, mu, 2.0 * b).sqrt()
}

/// `sup_τ ⟨τ + d⟩² / ⟨τ⟩²`, the larger root of `r² − (2 + d²) r + 1 = 0`.
fn shifted_bracket_ratio_sqr(d: f64) -> f64 {
    let p = 2.0 + d * d;
    0.5 * (p + (p * p - 4.0).max(0.0).sqrt())
}

/// Bound `R` with `1/R ≤ ‖u‖_{X_A} / ‖u‖_{X_B} ≤ R` for every trajectory band-limited
/// to `k_max`, from the mode-wise weight ratios.
pub fn weight_ratio_bound(spec_a: &SpectrumModel, spec_b: &SpectrumModel, s: f64, b: f64, k_max: usize) -> Result<f64> {
    let ma = spec_a.sphere_modes(k_max)?;
    let mb = spec_b.sphere_modes(k_max)?;
    Ok(ma
        .iter()
        .zip(&mb)
        .map(|(&x, &y)| {
            let ws = (japanese(x) / japanese(y)).powf(s / 2.0);
            let ws = ws.max(1.0 / ws);
            ws * shifted_bracket_ratio_sqr(x - y).powf(b.abs() / 2.0)
        })
        .fold(1.0, f64::max))
}
