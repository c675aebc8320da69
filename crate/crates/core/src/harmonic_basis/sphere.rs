use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::SphereGrid;
use super::legendre::{normalized_legendre, LegendreTable};
use crate::{Error, Result};

/// Flat index of `(k, m)` in a coefficient vector.
#[inline]
pub fn sh_index(k: usize, m: i64) -> usize {
    ((k * k + k) as i64 + m) as usize
}

/// Number of coefficients of a field band-limited to `k_max`.
#[inline]
pub fn sh_len(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 1)
}

/// Spherical-harmonic coefficients `c_{k,m}` in the orthonormal convention.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicField {
    k_max: usize,
    coeffs: Vec<Complex64>,
}

impl HarmonicField {
    pub fn zeros(k_max: usize) -> Self {
        Self {
            k_max,
            coeffs: vec![Complex64::new(0.0, 0.0); sh_len(k_max)],
        }
    }

    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != sh_len(k_max) {
            return Err(Error::DimensionMismatch {
                expected: sh_len(k_max),
                got: coeffs.len(),
            });
        }
        Ok(Self { k_max, coeffs })
    }

    /// A single harmonic `Y_k^m` embedded in a field of band limit `k_max`.
    pub fn basis(k_max: usize, k: usize, m: i64) -> Self {
        assert!(k <= k_max && m.unsigned_abs() as usize <= k, "({k},{m}) outside band {k_max}");
        let mut f = Self::zeros(k_max);
        f.coeffs[sh_index(k, m)] = Complex64::new(1.0, 0.0);
        f
    }

    /// Gaussian random coefficients on degrees `lo..=hi`, normalized to unit L² norm.
    pub fn random_band<R: Rng + ?Sized>(k_max: usize, lo: usize, hi: usize, rng: &mut R) -> Self {
        let mut f = Self::zeros(k_max);
        for k in lo..=hi.min(k_max) {
            for m in -(k as i64)..=k as i64 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                f.coeffs[sh_index(k, m)] = Complex64::new(re, im);
            }
        }
        let n = f.l2_norm();
        if n > 0.0 {
            f.scale(1.0 / n);
        }
        f
    }

    pub fn random<R: Rng + ?Sized>(k_max: usize, rng: &mut R) -> Self {
        Self::random_band(k_max, 0, k_max, rng)
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: usize, m: i64) -> Complex64 {
        if k > self.k_max || m.unsigned_abs() as usize > k {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[sh_index(k, m)]
    }

    pub fn set(&mut self, k: usize, m: i64, v: Complex64) {
        self.coeffs[sh_index(k, m)] = v;
    }

    /// Coefficients of degree `k`, ordered by `m = -k..=k`.
    pub fn degree(&self, k: usize) -> &[Complex64] {
        &self.coeffs[k * k..(k + 1) * (k + 1)]
    }

    pub fn degree_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.coeffs[k * k..(k + 1) * (k + 1)]
    }

    pub fn degree_norm_sqr(&self, k: usize) -> f64 {
        self.degree(k).iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩ = Σ c_self · conj(c_other)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let n = self.coeffs.len().min(other.coeffs.len());
        self.coeffs[..n].iter().zip(&other.coeffs[..n]).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// Highest degree carrying a nonzero coefficient (0 for the zero field).
    pub fn effective_degree(&self) -> usize {
        (0..=self.k_max)
            .rev()
            .find(|&k| self.degree(k).iter().any(|c| c.norm_sqr() > 0.0))
            .unwrap_or(0)
    }

    /// Copy into a field of a different band limit, truncating or zero-padding.
    pub fn with_k_max(&self, k_max: usize) -> Self {
        let mut out = Self::zeros(k_max);
        let n = sh_len(k_max.min(self.k_max));
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Pointwise value at colatitude `theta`, longitude `phi`.
    pub fn evaluate(&self, theta: f64, phi: f64) -> Complex64 {
        let x = theta.cos();
        let k_max = self.k_max;
        let mut col = vec![0.0; super::legendre::triangle_len(k_max)];
        super::legendre::fill_column(k_max, x, &mut col);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=k_max {
            for m in -(k as i64)..=k as i64 {
                let c = self.coeffs[sh_index(k, m)];
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let ma = m.unsigned_abs() as usize;
                let mut p = col[super::legendre::triangle_index(k, ma)];
                if m < 0 && ma % 2 == 1 {
                    p = -p;
                }
                acc += c * p * Complex64::from_polar(1.0, m as f64 * phi);
            }
        }
        acc
    }
}

/// Closed-form evaluation of a single `Y_k^m`.
pub fn spherical_harmonic(k: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    normalized_legendre(k, m, theta.cos()) * Complex64::from_polar(1.0, m as f64 * phi)
}

/// L²-normalized harmonic of degree and order `n`, a positive multiple of `(x₁ + i x₂)ⁿ`.
pub fn make_highest_weight(n: usize) -> HarmonicField {
    let mut f = HarmonicField::zeros(n);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    f.set(n, n as i64, Complex64::new(sign, 0.0));
    f
}

/// Samples on a sphere grid, tagged with a degree bound for the represented function.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub values: Vec<Complex64>,
    pub degree: usize,
}

impl GridFunction {
    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            degree: self.degree,
        }
    }

    /// Pointwise product; degree bounds add.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            degree: self.degree + other.degree,
        }
    }
}

/// A quadrature value together with whether the rule is exact for the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub exact: bool,
}

/// `∫ ∏ fields dσ` by the grid rule; `exact` is false when the summed degree exceeds the rule.
pub fn integrate_product(fields: &[GridFunction], grid: &SphereGrid) -> Result<Quadrature<Complex64>> {
    let n = grid.len();
    let mut degree = 0;
    for f in fields {
        if f.values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.values.len(),
            });
        }
        degree += f.degree;
    }
    let dl = grid.lon_weight();
    let n_lon = grid.n_lon();
    let mut value = Complex64::new(0.0, 0.0);
    for (i, &w) in grid.lat_weights().iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n_lon {
            let idx = i * n_lon + j;
            let mut p = Complex64::new(1.0, 0.0);
            for f in fields {
                p *= f.values[idx];
            }
            row += p;
        }
        value += row * (w * dl);
    }
    Ok(Quadrature {
        value,
        exact: degree <= grid.exactness_degree(),
    })
}

/// Synthesis/analysis pair bound to one grid and band limit.
pub struct SphereTransform {
    grid: SphereGrid,
    k_max: usize,
    table: LegendreTable,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SphereTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphereTransform")
            .field("n_lat", &self.grid.n_lat())
            .field("n_lon", &self.grid.n_lon())
            .field("k_max", &self.k_max)
            .finish()
    }
}

impl SphereTransform {
    pub fn new(grid: SphereGrid, k_max: usize) -> Self {
        let table = LegendreTable::new(k_max, grid.cos_theta());
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n_lon());
        let inv = planner.plan_fft_inverse(grid.n_lon());
        Self {
            grid,
            k_max,
            table,
            fwd,
            inv,
        }
    }

    /// Transform whose grid integrates products of total degree `degree` exactly.
    pub fn for_degree(k_max: usize, degree: usize) -> Result<Self> {
        Ok(Self::new(SphereGrid::exact_for_degree(degree.max(2 * k_max))?, k_max))
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn table(&self) -> &LegendreTable {
        &self.table
    }

    /// Pointwise values `Σ c_{k,m} Y_k^m` at the grid nodes (row-major in latitude).
    pub fn synthesize(&self, field: &HarmonicField) -> Result<Vec<Complex64>> {
        if field.k_max() > self.k_max {
            return Err(Error::DimensionMismatch {
                expected: sh_len(self.k_max),
                got: field.coeffs().len(),
            });
        }
        let kf = field.k_max();
        let n_lon = self.grid.n_lon();
        let active: Vec<i64> = (-(kf as i64)..=kf as i64)
            .filter(|&m| (m.unsigned_abs() as usize..=kf).any(|k| field.get(k, m).norm_sqr() > 0.0))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        out.par_chunks_mut(n_lon).enumerate().for_each(|(i, row)| {
            for &m in &active {
                let ma = m.unsigned_abs() as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for k in ma..=kf {
                    acc += field.coeffs[sh_index(k, m)] * self.table.get_signed(i, k, m);
                }
                row[m.rem_euclid(n_lon as i64) as usize] += acc;
            }
            self.inv.process(row);
        });
        Ok(out)
    }

    pub fn synthesize_grid(&self, field: &HarmonicField) -> Result<GridFunction> {
        Ok(GridFunction {
            values: self.synthesize(field)?,
            degree: field.effective_degree(),
        })
    }

    /// Coefficients up to `k_max` of grid samples; exact for samples band-limited to `k_max`.
    pub fn analyze(&self, samples: &[Complex64], k_max: usize) -> Result<HarmonicField> {
        if samples.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                got: samples.len(),
            });
        }
        if k_max > self.k_max || k_max > self.grid.max_analysis_degree() {
            return Err(Error::InvalidParams(format!(
                "grid {}x{} cannot analyze band limit {k_max}",
                self.grid.n_lat(),
                self.grid.n_lon()
            )));
        }
        let n_lon = self.grid.n_lon();
        let mut rows = samples.to_vec();
        let dl = self.grid.lon_weight();
        rows.par_chunks_mut(n_lon).for_each(|row| {
            self.fwd.process(row);
            for v in row.iter_mut() {
                *v *= dl;
            }
        });
        let w = self.grid.lat_weights();
        let per_m: Vec<(i64, Vec<Complex64>)> = (-(k_max as i64)..=k_max as i64)
            .into_par_iter()
            .map(|m| {
                let ma = m.unsigned_abs() as usize;
                let col = m.rem_euclid(n_lon as i64) as usize;
                let mut acc = vec![Complex64::new(0.0, 0.0); k_max + 1 - ma];
                for (i, &wi) in w.iter().enumerate() {
                    let f = rows[i * n_lon + col] * wi;
                    for (slot, k) in acc.iter_mut().zip(ma..=k_max) {
                        *slot += f * self.table.get_signed(i, k, m);
                    }
                }
                (m, acc)
            })
            .collect();
        let mut field = HarmonicField::zeros(k_max);
        for (m, acc) in per_m {
            let ma = m.unsigned_abs() as usize;
            for (v, k) in acc.into_iter().zip(ma..=k_max) {
                field.coeffs[sh_index(k, m)] = v;
            }
        }
        Ok(field)
    }

    /// `‖f‖²_{L²}` by quadrature of the grid samples.
    pub fn quadrature_norm_sqr(&self, samples: &[Complex64]) -> f64 {
        let n_lon = self.grid.n_lon();
        let dl = self.grid.lon_weight();
        self.grid
            .lat_weights()
            .iter()
            .enumerate()
            .map(|(i, &w)| w * dl * samples[i * n_lon..(i + 1) * n_lon].iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// One-shot analysis of grid samples.
pub fn sh_analyze(samples: &[Complex64], grid: &SphereGrid, k_max: usize) -> Result<HarmonicField> {
    SphereTransform::new(grid.clone(), k_max).analyze(samples, k_max)
}

/// One-shot synthesis onto a grid.
pub fn sh_synthesize(field: &HarmonicField, grid: &SphereGrid) -> Result<Vec<Complex64>> {
    SphereTransform::new(grid.clone(), field.k_max()).synthesize(field)
}

/// Fraction of the mass of `|f|²` inside the colatitude band `|θ − π/2| ≤ half_width`,
/// computed by Gauss–Legendre quadrature in θ on the band and on the full range.
pub fn equatorial_mass_fraction(field: &HarmonicField, half_width: f64) -> f64 {
    let nodes = 4 * field.k_max() + 64;
    let n_phi = 2 * field.k_max() + 2;
    let (xs, ws) = super::grid::gauss_legendre(nodes);
    let band = |a: f64, b: f64| -> f64 {
        let mut total = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let theta = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let mut ring = 0.0;
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                ring += field.evaluate(theta, phi).norm_sqr();
            }
            total += w * 0.5 * (b - a) * theta.sin() * ring * 2.0 * PI / n_phi as f64;
        }
        total
    };
    let h = half_width.min(PI / 2.0);
    let inside = band(PI / 2.0 - h, PI / 2.0 + h);
    let whole = band(0.0, PI / 2.0 - h) + inside + band(PI / 2.0 + h, PI);
    inside / whole
}
