use num_complex::Complex64;

use crate::{Error, Result};

/// A Hermitian positive semidefinite operator on `ℂⁿ`.
pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// Stopping rule for [`power_iteration`].
#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    /// Relative change of the singular value `√λ` that ends the iteration.
    pub tol: f64,
    pub max_iters: usize,
    /// Multiple of the identity added to the operator; moves the spectrum away from
    /// eigenvalues of large modulus but opposite sign.
    pub shift: f64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    /// Top eigenvalue (Rayleigh quotient of the returned vector, without shift).
    pub eigenvalue: f64,
    pub vector: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative change of `√λ` in the last step.
    pub residual: f64,
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Leading eigenpair by power iteration from `start`.
pub fn power_iteration(op: &dyn HermitianOperator, start: &[Complex64], opts: PowerOptions) -> Result<PowerResult> {
    let n = op.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: start.len() });
    }
    let s = norm(start);
    if s == 0.0 || !s.is_finite() {
        return Err(Error::InvalidParams("power iteration needs a nonzero start vector".into()));
    }
    let mut x: Vec<Complex64> = start.iter().map(|c| c / s).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    op.apply(&x, &mut y);
    let mut lambda = dot(&x, &y).re;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi * opts.shift;
        }
        let ny = norm(&y);
        if ny == 0.0 {
            // the start vector lies in the kernel
            converged = true;
            residual = 0.0;
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        op.apply(&x, &mut y);
        let next = dot(&x, &y).re;
        let (a, b) = (lambda.max(0.0).sqrt(), next.max(0.0).sqrt());
        residual = if b > 0.0 { (b - a).abs() / b } else { 0.0 };
        lambda = next;
        if residual <= opts.tol {
            converged = true;
            break;
        }
    }
    Ok(PowerResult {
        eigenvalue: lambda,
        vector: x,
        iterations,
        converged,
        residual,
    })
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone)]
pub struct DenseHermitian {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl HermitianOperator for DenseHermitian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (row, yi) in self.data.chunks(self.n).zip(y.iter_mut()) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}
