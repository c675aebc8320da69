use num_complex::Complex64;

use super::spectrum::{SpectrumKind, SpectrumModel};
use crate::harmonic_basis::{HarmonicField, TorusField};
use crate::{Error, Result};

/// `⟨x⟩ = (1 + x²)^{1/2}`.
#[inline]
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// A field expanded in Laplace eigenfunctions, one coefficient per mode.
pub trait ModalField: Clone {
    fn coefficients(&self) -> &[Complex64];
    fn coefficients_mut(&mut self) -> &mut [Complex64];
    /// Eigenvalue of every mode under `spec`, in coefficient order.
    fn mode_eigenvalues(&self, spec: &SpectrumModel) -> Result<Vec<f64>>;
}

impl ModalField for HarmonicField {
    fn coefficients(&self) -> &[Complex64] {
        self.coeffs()
    }

    fn coefficients_mut(&mut self) -> &mut [Complex64] {
        self.coeffs_mut()
    }

    fn mode_eigenvalues(&self, spec: &SpectrumModel) -> Result<Vec<f64>> {
        spec.sphere_modes(self.k_max())
    }
}

impl ModalField for TorusField {
    fn coefficients(&self) -> &[Complex64] {
        self.coeffs()
    }

    fn coefficients_mut(&mut self) -> &mut [Complex64] {
        self.coeffs_mut()
    }

    fn mode_eigenvalues(&self, spec: &SpectrumModel) -> Result<Vec<f64>> {
        if spec.kind() != SpectrumKind::TorusExact {
            return Err(Error::InvalidParams("torus fields need the torus spectrum".into()));
        }
        Ok((0..self.coeffs().len())
            .map(|i| {
                let (n1, n2) = self.lattice_point(i);
                SpectrumModel::torus_eigenvalue(n1, n2)
            })
            .collect())
    }
}

/// Compactly supported even bump on `(-1, 1)` with value 1 at 0.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Spectral multiplier evaluated at `√μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralWindow {
    /// Indicator of `lo ≤ √μ ≤ hi`.
    SharpBand { lo: f64, hi: f64 },
    /// `χ((√μ − center)/half_width)` for the bump `χ` supported in `(-1, 1)`.
    SmoothBump { center: f64, half_width: f64 },
}

impl SpectralWindow {
    /// Dyadic passband `[n, 2n]`.
    pub fn dyadic(n: f64) -> Self {
        Self::SharpBand { lo: n, hi: 2.0 * n }
    }

    /// Band of unit width around `√(n(n+1))`; on the sphere it passes degree `n` only.
    pub fn degree_band(n: usize) -> Self {
        let c = ((n * (n + 1)) as f64).sqrt();
        Self::SharpBand { lo: c - 0.5, hi: c + 0.5 }
    }

    /// Unit-width smooth bump centered at `center`.
    pub fn bump(center: f64) -> Self {
        Self::SmoothBump { center, half_width: 1.0 }
    }

    pub fn weight(&self, sqrt_mu: f64) -> f64 {
        match *self {
            Self::SharpBand { lo, hi } => {
                if (lo..=hi).contains(&sqrt_mu) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::SmoothBump { center, half_width } => bump((sqrt_mu - center) / half_width),
        }
    }

    /// Weight at eigenvalue `μ` (negative eigenvalues are clipped to zero).
    pub fn weight_at(&self, mu: f64) -> f64 {
        self.weight(mu.max(0.0).sqrt())
    }

    /// Spherical degrees `k ≤ k_max` with a nonzero weight at some eigenvalue of cluster `k`.
    pub fn sphere_support(&self, spec: &SpectrumModel, k_max: usize) -> Result<Vec<usize>> {
        let mu = spec.sphere_modes(k_max)?;
        Ok((0..=k_max)
            .filter(|&k| mu[k * k..(k + 1) * (k + 1)].iter().any(|&m| self.weight_at(m) != 0.0))
            .collect())
    }
}

/// Keep the degree-`k` coefficients of `f`, zero everything else.
pub fn project_degree(f: &HarmonicField, k: usize) -> HarmonicField {
    let mut out = HarmonicField::zeros(f.k_max());
    if k <= f.k_max() {
        out.degree_mut(k).copy_from_slice(f.degree(k));
    }
    out
}

/// Multiply every coefficient by the window evaluated at its eigenvalue.
pub fn apply_window<F: ModalField>(f: &F, w: &SpectralWindow, spec: &SpectrumModel) -> Result<F> {
    let mu = f.mode_eigenvalues(spec)?;
    let mut out = f.clone();
    for (c, m) in out.coefficients_mut().iter_mut().zip(mu) {
        *c *= w.weight_at(m);
    }
    Ok(out)
}

/// `(Σ ⟨μ⟩^s |c|²)^{1/2}`.
pub fn sobolev_norm<F: ModalField>(f: &F, s: f64, spec: &SpectrumModel) -> Result<f64> {
    let mu = f.mode_eigenvalues(spec)?;
    Ok(sobolev_norm_with(f.coefficients(), &mu, s))
}

/// Sobolev norm from precomputed mode eigenvalues.
pub fn sobolev_norm_with(coeffs: &[Complex64], mu: &[f64], s: f64) -> f64 {
    coeffs
        .iter()
        .zip(mu)
        .map(|(c, &m)| japanese(m).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Number of sphere eigenfunctions (with multiplicity) with `lo ≤ ⟨μ⟩^{1/2} ≤ hi`.
pub fn weyl_count(spec: &SpectrumModel, k_max: usize, lo: f64, hi: f64) -> Result<usize> {
    let mu = spec.sphere_modes(k_max)?;
    Ok(mu.iter().filter(|&&m| (lo..=hi).contains(&japanese(m).sqrt())).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_four_passes_degrees_four_to_seven() {
        let spec = SpectrumModel::sphere_exact();
        let degrees = SpectralWindow::dyadic(4.0).sphere_support(&spec, 12).unwrap();
        assert_eq!(degrees, vec![4, 5, 6, 7]);
    }

    #[test]
    fn degree_band_isolates_one_degree() {
        let spec = SpectrumModel::sphere_exact();
        for n in 0..60 {
            assert_eq!(SpectralWindow::degree_band(n).sphere_support(&spec, 70).unwrap(), vec![n]);
        }
    }

    #[test]
    fn sobolev_of_y10() {
        let f = HarmonicField::basis(3, 1, 0);
        let n = sobolev_norm(&f, 1.0, &SpectrumModel::sphere_exact()).unwrap();
        assert!((n - 5f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-0.3), bump(0.3));
        assert!(bump(0.99) > 0.0);
    }

    #[test]
    fn torus_window_uses_torus_spectrum() {
        let mut f = TorusField::zeros(2);
        f.set(1, 0, Complex64::new(1.0, 0.0));
        f.set(2, 2, Complex64::new(1.0, 0.0));
        let w = SpectralWindow::SharpBand { lo: 2.0, hi: 3.0 };
        let g = apply_window(&f, &w, &SpectrumModel::torus_exact()).unwrap();
        assert_eq!(g.get(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(g.get(2, 2), Complex64::new(0.0, 0.0));
        assert!(apply_window(&f, &w, &SpectrumModel::sphere_exact()).is_err());
    }
}
