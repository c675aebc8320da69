use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Fourier coefficients `c_{n₁,n₂}`, `|n₁|, |n₂| ≤ A`, of a function on `ℝ²/ℤ²`
/// expanded in `e^{2πi(n₁x₁ + n₂x₂)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    half_width: usize,
    coeffs: Vec<Complex64>,
}

impl TorusField {
    pub fn zeros(half_width: usize) -> Self {
        let side = 2 * half_width + 1;
        Self {
            half_width,
            coeffs: vec![Complex64::new(0.0, 0.0); side * side],
        }
    }

    pub fn random<R: Rng + ?Sized>(half_width: usize, rng: &mut R) -> Self {
        let mut f = Self::zeros(half_width);
        for c in &mut f.coeffs {
            *c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let n = f.l2_norm();
        for c in &mut f.coeffs {
            *c /= n;
        }
        f
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    #[inline]
    pub fn index(&self, n1: i64, n2: i64) -> usize {
        let a = self.half_width as i64;
        ((n1 + a) * (2 * a + 1) + (n2 + a)) as usize
    }

    /// Lattice point of a flat index.
    pub fn lattice_point(&self, idx: usize) -> (i64, i64) {
        let side = self.side();
        let a = self.half_width as i64;
        ((idx / side) as i64 - a, (idx % side) as i64 - a)
    }

    pub fn contains(&self, n1: i64, n2: i64) -> bool {
        let a = self.half_width as i64;
        n1.abs() <= a && n2.abs() <= a
    }

    pub fn get(&self, n1: i64, n2: i64) -> Complex64 {
        if self.contains(n1, n2) {
            self.coeffs[self.index(n1, n2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, n1: i64, n2: i64, v: Complex64) {
        let i = self.index(n1, n2);
        self.coeffs[i] = v;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Pointwise value at `(x₁, x₂)`.
    pub fn evaluate(&self, x1: f64, x2: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let (n1, n2) = self.lattice_point(idx);
            let arg = 2.0 * std::f64::consts::PI * (n1 as f64 * x1 + n2 as f64 * x2);
            acc += c * Complex64::from_polar(1.0, arg);
        }
        acc
    }
}

/// Uniform `M × M` grid transform on the unit torus; samples are row-major in `x₁`.
pub struct TorusTransform {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TorusTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusTransform").field("m", &self.m).finish()
    }
}

impl TorusTransform {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("torus grid needs at least one point".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        })
    }

    /// Smallest grid accepted for analysis at half-width `a`.
    pub fn for_half_width(a: usize) -> Self {
        Self::new(2 * a + 2).expect("positive size")
    }

    pub fn size(&self) -> usize {
        self.m
    }

    fn transform_2d(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        for row in data.chunks_mut(m) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            for i in 0..m {
                col[i] = data[i * m + j];
            }
            fft.process(&mut col);
            for i in 0..m {
                data[i * m + j] = col[i];
            }
        }
    }

    pub fn synthesize(&self, field: &TorusField) -> Vec<Complex64> {
        let m = self.m as i64;
        let mut data = vec![Complex64::new(0.0, 0.0); self.m * self.m];
        for (idx, c) in field.coeffs().iter().enumerate() {
            let (n1, n2) = field.lattice_point(idx);
            data[(n1.rem_euclid(m) * m + n2.rem_euclid(m)) as usize] += c;
        }
        self.transform_2d(&mut data, &self.inv);
        data
    }

    pub fn analyze(&self, samples: &[Complex64], half_width: usize) -> Result<TorusField> {
        let needed = 2 * half_width + 2;
        if self.m < needed {
            return Err(Error::Aliasing {
                samples: self.m,
                half_width,
                needed,
            });
        }
        if samples.len() != self.m * self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m * self.m,
                got: samples.len(),
            });
        }
        let mut data = samples.to_vec();
        self.transform_2d(&mut data, &self.fwd);
        let scale = 1.0 / (self.m * self.m) as f64;
        let m = self.m as i64;
        let mut field = TorusField::zeros(half_width);
        let a = half_width as i64;
        for n1 in -a..=a {
            for n2 in -a..=a {
                let v = data[(n1.rem_euclid(m) * m + n2.rem_euclid(m)) as usize] * scale;
                field.set(n1, n2, v);
            }
        }
        Ok(field)
    }

    /// `∫_{T²} |f|²` from grid samples.
    pub fn quadrature_norm_sqr(&self, samples: &[Complex64]) -> f64 {
        samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / (self.m * self.m) as f64
    }

    /// Sample coordinates `(j₁/M, j₂/M)` of flat index `idx`.
    pub fn node(&self, idx: usize) -> (f64, f64) {
        let m = self.m as f64;
        ((idx / self.m) as f64 / m, (idx % self.m) as f64 / m)
    }
}

/// Analyze `M × M` uniform samples (`M² = samples.len()`) at half-width `a`.
pub fn torus_analyze(samples: &[Complex64], a: usize) -> Result<TorusField> {
    let m = (samples.len() as f64).sqrt().round() as usize;
    if m * m != samples.len() {
        return Err(Error::InvalidParams(format!("{} samples do not form a square grid", samples.len())));
    }
    TorusTransform::new(m)?.analyze(samples, a)
}

/// Synthesize on the default `(2A + 2)²` grid.
pub fn torus_synthesize(field: &TorusField) -> Vec<Complex64> {
    TorusTransform::for_half_width(field.half_width()).synthesize(field)
}
