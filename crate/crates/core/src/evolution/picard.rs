use num_complex::Complex64;

use super::nls::{NlsSolver, NonlinearStep};
use super::propagate::mode_phases;
use crate::harmonic_basis::HarmonicField;
use crate::spectral_ops::SpectrumModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub t_final: f64,
    pub n_iters: usize,
    /// Time nodes on `[0, T]`; `None` picks `8 ω T / 2π` (at least 17) with `ω = 2 max μ`.
    pub nt: Option<usize>,
    /// Regularity of the residual norm.
    pub s: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            t_final: 0.1,
            n_iters: 6,
            nt: None,
            s: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// Last iterate at the final time.
    pub field: HarmonicField,
    /// `sup_t ‖u⁽ʲ⁺¹⁾(t) − u⁽ʲ⁾(t)‖_{H^s}` for each performed iteration.
    pub residuals: Vec<f64>,
    /// Residuals grew three times in a row.
    pub diverged: bool,
    pub nt: usize,
}

/// Truncated Picard iteration of the Duhamel formula, in the interaction picture
/// `w(t) = S(−t)u(t)`, with the time integral by the cumulative trapezoid rule.
pub fn picard_solve(u0: &HarmonicField, spec: &SpectrumModel, opts: &PicardOptions) -> Result<PicardResult> {
    if !(opts.t_final > 0.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidParams(format!("final time must be positive, got {}", opts.t_final)));
    }
    let k_max = u0.k_max();
    let solver = NlsSolver::new(spec, k_max, NonlinearStep::GaussCollocation)?;
    let mu = spec.sphere_modes(k_max)?;
    let omega = 2.0 * mu.iter().cloned().fold(0.0, f64::max);
    let nt = opts
        .nt
        .unwrap_or_else(|| ((8.0 * omega * opts.t_final / (2.0 * std::f64::consts::PI)).ceil() as usize).max(16) + 1);
    if nt < 2 {
        return Err(Error::InvalidParams("need at least two time nodes".into()));
    }
    let h = opts.t_final / (nt - 1) as f64;
    let times: Vec<f64> = (0..nt).map(|j| j as f64 * h).collect();
    let fwd: Vec<Vec<Complex64>> = times.iter().map(|&t| mode_phases(u0, t, spec)).collect::<Result<_>>()?;

    let mut w: Vec<HarmonicField> = vec![u0.clone(); nt];
    let mut residuals = Vec::new();
    let mut diverged = false;
    let mut rises = 0;
    for _ in 0..opts.n_iters {
        // g(t) = S(−t) P(|S(t)w|² S(t)w)
        let g: Vec<Vec<Complex64>> = w
            .iter()
            .zip(&fwd)
            .map(|(wj, ph)| {
                let mut u = wj.clone();
                u.coeffs_mut().iter_mut().zip(ph).for_each(|(c, p)| *c *= p);
                let n = solver.cubic(&u)?;
                Ok(n.coeffs().iter().zip(ph).map(|(c, p)| c * p.conj()).collect())
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(nt);
        let mut acc = vec![Complex64::new(0.0, 0.0); u0.coeffs().len()];
        next.push(u0.clone());
        for j in 1..nt {
            for (a, (x, y)) in acc.iter_mut().zip(g[j - 1].iter().zip(&g[j])) {
                *a += (x + y) * (0.5 * h);
            }
            let mut f = u0.clone();
            f.coeffs_mut().iter_mut().zip(&acc).for_each(|(c, a)| *c += Complex64::new(a.im, -a.re));
            next.push(f);
        }
        let res = next
            .iter()
            .zip(&w)
            .map(|(a, b)| {
                let d: Vec<Complex64> = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect();
                crate::spectral_ops::sobolev_norm_with(&d, &mu, opts.s)
            })
            .fold(0.0, f64::max);
        if let Some(&last) = residuals.last() {
            rises = if res > last { rises + 1 } else { 0 };
        }
        residuals.push(res);
        w = next;
        if rises >= 3 {
            diverged = true;
            break;
        }
    }
    let mut field = w.pop().expect("nt ≥ 2");
    field.coeffs_mut().iter_mut().zip(&fwd[nt - 1]).for_each(|(c, p)| *c *= p);
    Ok(PicardResult {
        field,
        residuals,
        diverged,
        nt,
    })
}
