use std::f64::consts::PI;

use num_complex::Complex64;

use crate::harmonic_basis::HarmonicField;
use crate::spectral_ops::{ModalField, SpectrumKind, SpectrumModel};
use crate::Result;

/// Field together with its time and spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState<F = HarmonicField> {
    pub field: F,
    pub time: f64,
    pub spec: SpectrumModel,
}

/// `e^{−iμt}` for every mode. The angle is reduced modulo `2π` from the half-turn count
/// `μt/π`, which is formed exactly for integer spectra at `t = π` (sphere) or integer `t`
/// (torus).
pub fn mode_phases<F: ModalField>(f: &F, t: f64, spec: &SpectrumModel) -> Result<Vec<Complex64>> {
    let mu = f.mode_eigenvalues(spec)?;
    let torus = spec.kind() == SpectrumKind::TorusExact;
    let t_over_pi = t / PI;
    Ok(mu
        .iter()
        .map(|&m| {
            // torus eigenvalues are 2π|n|², so μt/π = 2|n|² t
            let half_turns = if torus { (m / PI).round() * t } else { m * t_over_pi };
            let reduced = half_turns - 2.0 * (half_turns / 2.0).round();
            Complex64::from_polar(1.0, -PI * reduced)
        })
        .collect())
}

/// Multiply every coefficient by `e^{−iμt}`.
pub fn linear_propagate<F: ModalField>(f: &F, t: f64, spec: &SpectrumModel) -> Result<F> {
    let phases = mode_phases(f, t, spec)?;
    let mut out = f.clone();
    for (c, p) in out.coefficients_mut().iter_mut().zip(phases) {
        *c *= p;
    }
    Ok(out)
}

/// [`linear_propagate`] on a state, advancing its clock.
pub fn propagate_state<F: ModalField>(state: &EvolutionState<F>, t: f64) -> Result<EvolutionState<F>> {
    Ok(EvolutionState {
        field: linear_propagate(&state.field, t, &state.spec)?,
        time: state.time + t,
        spec: state.spec.clone(),
    })
}
