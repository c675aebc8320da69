use crate::harmonic_basis::{make_highest_weight, HarmonicField};
use crate::spectral_ops::{sobolev_norm, SpectrumModel};
use crate::{Error, Result};

use super::nls::{NlsSolver, NonlinearStep, BLOWUP_MASS_DRIFT};

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Truncation degree; `None` means `n + 8`.
    pub k_max: Option<usize>,
    pub scheme: NonlinearStep,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            dt: 1e-3,
            k_max: None,
            scheme: NonlinearStep::GaussCollocation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityProbe {
    pub n: usize,
    pub s: f64,
    pub amplitude: f64,
    pub delta: f64,
    /// `sup_t ‖u(t) − v(t)‖_{H^s} / ‖u₀ − v₀‖_{H^s}`.
    pub ratio: f64,
    /// Time at which the supremum is attained.
    pub sup_time: f64,
}

/// Evolve `a φ_n/‖φ_n‖_{H^s}` and `(a + δ) φ_n/‖φ_n‖_{H^s}` with the highest-weight
/// harmonic `φ_n` and report the largest relative growth of their `H^s` distance.
/// `δ = 0` returns ratio 1.
pub fn flow_stability_probe(n: usize, s: f64, amplitude: f64, delta: f64, opts: &ProbeOptions) -> Result<StabilityProbe> {
    if n == 0 {
        return Err(Error::InvalidParams("probe degree must be at least 1".into()));
    }
    if !(amplitude >= 0.0 && delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParams("amplitude and perturbation must be non-negative".into()));
    }
    if amplitude > 0.0 && delta >= amplitude {
        return Err(Error::InvalidParams(format!("perturbation {delta} must be below amplitude {amplitude}")));
    }
    let mut out = StabilityProbe {
        n,
        s,
        amplitude,
        delta,
        ratio: 1.0,
        sup_time: 0.0,
    };
    if delta == 0.0 {
        return Ok(out);
    }
    if !(opts.dt > 0.0 && opts.t_final > 0.0) {
        return Err(Error::InvalidParams("time step and final time must be positive".into()));
    }
    let spec = SpectrumModel::sphere_exact();
    let k_max = opts.k_max.unwrap_or(n + 8).max(n);
    let phi = make_highest_weight(n).with_k_max(k_max);
    let unit = 1.0 / sobolev_norm(&phi, s, &spec)?;
    let scaled = |c: f64| {
        let mut f = phi.clone();
        f.scale(c * unit);
        f
    };
    let (mut u, mut v) = (scaled(amplitude), scaled(amplitude + delta));
    let d0 = distance(&u, &v, s, &spec)?;
    let solver = NlsSolver::new(&spec, k_max, opts.scheme)?;
    let steps = (opts.t_final / opts.dt).round().max(1.0) as usize;
    let h = opts.t_final / steps as f64;
    let (mu, mv) = (u.l2_norm().powi(2), v.l2_norm().powi(2));
    for i in 1..=steps {
        solver.step(&mut u, h)?;
        solver.step(&mut v, h)?;
        let t = i as f64 * h;
        for (f, m0) in [(&u, mu), (&v, mv)] {
            let m = f.l2_norm().powi(2);
            if !m.is_finite() || (m0 > 0.0 && (m - m0).abs() / m0 > BLOWUP_MASS_DRIFT) {
                return Err(Error::BlowUp {
                    time: t,
                    reason: format!("mass {m:e} from {m0:e}"),
                });
            }
        }
        let r = distance(&u, &v, s, &spec)? / d0;
        if r > out.ratio {
            out.ratio = r;
            out.sup_time = t;
        }
    }
    Ok(out)
}

fn distance(u: &HarmonicField, v: &HarmonicField, s: f64, spec: &SpectrumModel) -> Result<f64> {
    let mut d = u.clone();
    d.coeffs_mut().iter_mut().zip(v.coeffs()).for_each(|(a, b)| *a -= b);
    sobolev_norm(&d, s, spec)
}
