use num_complex::Complex64;

use super::propagate::mode_phases;
use crate::bourgain::TimeSampledField;
use crate::harmonic_basis::{GridFunction, HarmonicField, SphereGrid, SphereTransform};
use crate::spectral_ops::{sobolev_norm_with, SpectrumModel};
use crate::{Error, Result};

/// Relative mass drift that aborts an evolution.
pub const BLOWUP_MASS_DRIFT: f64 = 1e-6;

/// How the cubic substep `i ∂_t u = |u|²u` is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearStep {
    /// Band-limited flow `i u' = P_K(|u|²u)` by two-stage Gauss–Legendre collocation,
    /// with the projection computed exactly on a grid resolving degree `4K`.
    GaussCollocation,
    /// Pointwise rotation `u ← P_K(u e^{−ih|u|²})` on a grid resolving degree `3K`.
    PhaseRotation,
}

#[derive(Debug, Clone, Copy)]
pub struct NlsOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Record a sample every `stride` steps; must divide the step count.
    pub stride: usize,
    pub scheme: NonlinearStep,
    /// Regularity of the monitored Sobolev norm.
    pub s: f64,
}

impl Default for NlsOptions {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            dt: 1e-3,
            stride: 10,
            scheme: NonlinearStep::GaussCollocation,
            s: 1.0,
        }
    }
}

/// Mass, energy and Sobolev-norm series of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub hs_norm: Vec<f64>,
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
}

fn relative_drift(series: &[f64]) -> f64 {
    let base = series.first().copied().unwrap_or(0.0);
    let scale = if base.abs() > 0.0 { base.abs() } else { 1.0 };
    series.iter().map(|v| (v - base).abs() / scale).fold(0.0, f64::max)
}

impl ConservationReport {
    fn push(&mut self, t: f64, mass: f64, energy: f64, hs: f64) {
        self.times.push(t);
        self.mass.push(mass);
        self.energy.push(energy);
        self.hs_norm.push(hs);
        self.max_mass_drift = relative_drift(&self.mass);
        self.max_energy_drift = relative_drift(&self.energy);
    }
}

/// Split-step solver for `i ∂_t u + Δu = |u|²u` on band-limited spherical fields.
pub struct NlsSolver {
    spec: SpectrumModel,
    k_max: usize,
    transform: SphereTransform,
    mu: Vec<f64>,
    scheme: NonlinearStep,
}

impl std::fmt::Debug for NlsSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NlsSolver").field("k_max", &self.k_max).field("scheme", &self.scheme).finish()
    }
}

impl NlsSolver {
    pub fn new(spec: &SpectrumModel, k_max: usize, scheme: NonlinearStep) -> Result<Self> {
        let degree = match scheme {
            NonlinearStep::GaussCollocation => 4 * k_max,
            NonlinearStep::PhaseRotation => 3 * k_max,
        };
        let grid = SphereGrid::exact_for_degree(degree.max(2 * k_max))?;
        Ok(Self {
            spec: spec.clone(),
            k_max,
            transform: SphereTransform::new(grid, k_max),
            mu: spec.sphere_modes(k_max)?,
            scheme,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn spec(&self) -> &SpectrumModel {
        &self.spec
    }

    /// `P_K(|u|²u)`.
    pub fn cubic(&self, u: &HarmonicField) -> Result<HarmonicField> {
        let mut v = self.transform.synthesize(u)?;
        for z in &mut v {
            *z *= z.norm_sqr();
        }
        self.transform.analyze(&v, self.k_max)
    }

    /// `Σ μ|c|² + ½ ∫ |u|⁴`.
    pub fn energy(&self, u: &HarmonicField) -> Result<f64> {
        let kinetic: f64 = u.coeffs().iter().zip(&self.mu).map(|(c, m)| m * c.norm_sqr()).sum();
        let g = self.transform.synthesize_grid(u)?;
        let sq = GridFunction {
            values: g.values.iter().map(|z| Complex64::new(z.norm_sqr() * z.norm_sqr(), 0.0)).collect(),
            degree: 4 * g.degree,
        };
        let quartic = crate::harmonic_basis::integrate_product(&[sq], self.transform.grid())?.value.re;
        Ok(kinetic + 0.5 * quartic)
    }

    pub fn hs_norm(&self, u: &HarmonicField, s: f64) -> f64 {
        sobolev_norm_with(u.coeffs(), &self.mu, s)
    }

    fn linear(&self, u: &mut HarmonicField, t: f64) -> Result<()> {
        let ph = mode_phases(u, t, &self.spec)?;
        for (c, p) in u.coeffs_mut().iter_mut().zip(ph) {
            *c *= p;
        }
        Ok(())
    }

    fn nonlinear(&self, u: &mut HarmonicField, h: f64) -> Result<()> {
        match self.scheme {
            NonlinearStep::GaussCollocation => self.collocation_step(u, h),
            NonlinearStep::PhaseRotation => {
                let mut v = self.transform.synthesize(u)?;
                for z in &mut v {
                    *z *= Complex64::from_polar(1.0, -h * z.norm_sqr());
                }
                *u = self.transform.analyze(&v, self.k_max)?;
                Ok(())
            }
        }
    }

    fn collocation_step(&self, u: &mut HarmonicField, h: f64) -> Result<()> {
        let r3 = 3f64.sqrt() / 6.0;
        let a = [[0.25, 0.25 - r3], [0.25 + r3, 0.25]];
        let minus_i = Complex64::new(0.0, -1.0);
        let f0 = self.cubic(u)?;
        let mut k: [Vec<Complex64>; 2] = [
            f0.coeffs().iter().map(|c| c * minus_i).collect(),
            f0.coeffs().iter().map(|c| c * minus_i).collect(),
        ];
        let scale = u.l2_norm().max(1e-300);
        for _ in 0..100 {
            let mut change: f64 = 0.0;
            let mut next: [Vec<Complex64>; 2] = [Vec::new(), Vec::new()];
            for (s, row) in a.iter().enumerate() {
                let mut stage = u.clone();
                for (i, c) in stage.coeffs_mut().iter_mut().enumerate() {
                    *c += (k[0][i] * row[0] + k[1][i] * row[1]) * h;
                }
                let f = self.cubic(&stage)?;
                next[s] = f.coeffs().iter().map(|c| c * minus_i).collect();
                for (x, y) in next[s].iter().zip(&k[s]) {
                    change = change.max((x - y).norm());
                }
            }
            k = next;
            if change * h <= 1e-16 * scale {
                break;
            }
        }
        for (i, c) in u.coeffs_mut().iter_mut().enumerate() {
            *c += (k[0][i] + k[1][i]) * (0.5 * h);
        }
        Ok(())
    }

    /// One Strang step `L(h/2) N(h) L(h/2)`.
    pub fn step(&self, u: &mut HarmonicField, h: f64) -> Result<()> {
        self.linear(u, 0.5 * h)?;
        self.nonlinear(u, h)?;
        self.linear(u, 0.5 * h)
    }

    /// Evolve `u0` to `opts.t_final`; the step is adjusted to divide the interval evenly.
    /// Aborts with [`Error::BlowUp`] once the relative mass drift exceeds
    /// [`BLOWUP_MASS_DRIFT`] or a coefficient stops being finite.
    pub fn evolve(&self, u0: &HarmonicField, opts: &NlsOptions) -> Result<(TimeSampledField, ConservationReport)> {
        if !(opts.dt > 0.0 && opts.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("time step must be positive, got {}", opts.dt)));
        }
        if !(opts.t_final > 0.0 && opts.t_final.is_finite()) {
            return Err(Error::InvalidParams(format!("final time must be positive, got {}", opts.t_final)));
        }
        if opts.stride == 0 {
            return Err(Error::InvalidParams("sampling stride must be at least 1".into()));
        }
        let steps = (opts.t_final / opts.dt).round().max(1.0) as usize;
        if steps % opts.stride != 0 {
            return Err(Error::InvalidParams(format!(
                "sampling stride {} does not divide the {steps} steps",
                opts.stride
            )));
        }
        let h = opts.t_final / steps as f64;
        let mut u = u0.with_k_max(self.k_max);
        let mut report = ConservationReport {
            times: Vec::new(),
            mass: Vec::new(),
            energy: Vec::new(),
            hs_norm: Vec::new(),
            max_mass_drift: 0.0,
            max_energy_drift: 0.0,
        };
        let mass0 = u.l2_norm().powi(2);
        report.push(0.0, mass0, self.energy(&u)?, self.hs_norm(&u, opts.s));
        let mut samples = vec![u.clone()];
        for n in 1..=steps {
            self.step(&mut u, h)?;
            let t = n as f64 * h;
            let mass = u.l2_norm().powi(2);
            if !mass.is_finite() || u.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::BlowUp {
                    time: t,
                    reason: "non-finite coefficients".into(),
                });
            }
            let drift = if mass0 > 0.0 { (mass - mass0).abs() / mass0 } else { mass };
            if drift > BLOWUP_MASS_DRIFT {
                return Err(Error::BlowUp {
                    time: t,
                    reason: format!("relative mass drift {drift:e}"),
                });
            }
            if n % opts.stride == 0 {
                report.push(t, mass, self.energy(&u)?, self.hs_norm(&u, opts.s));
                samples.push(u.clone());
            }
        }
        let dt_sample = h * opts.stride as f64;
        let traj = TimeSampledField::new(0.0, dt_sample, samples)?;
        Ok((traj, report))
    }
}

/// Convenience wrapper: build a solver for `u0`'s band limit and run it.
pub fn nls_evolve(u0: &HarmonicField, spec: &SpectrumModel, opts: &NlsOptions) -> Result<(TimeSampledField, ConservationReport)> {
    NlsSolver::new(spec, u0.k_max(), opts.scheme)?.evolve(u0, opts)
}
