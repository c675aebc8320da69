use num_complex::Complex64;

use crate::harmonic_basis::{integrate_product, HarmonicField, Quadrature, SphereGrid, SphereTransform};
use crate::{Error, Result};

/// Growth exponent `s(p)` of `‖χ_λ f‖_{L^p} / ‖f‖_{L²}` on surfaces.
pub fn sogge_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        0.5
    } else if p <= 6.0 {
        (p - 2.0) / (4.0 * p)
    } else {
        (p - 4.0) / (2.0 * p)
    }
}

/// Tabulated `p ↦ s(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoggeExponentTable {
    pub entries: Vec<(f64, f64)>,
}

impl SoggeExponentTable {
    pub fn new(ps: &[f64]) -> Result<Self> {
        if let Some(p) = ps.iter().find(|&&p| !(p >= 2.0)) {
            return Err(Error::InvalidParams(format!("exponent {p} below 2")));
        }
        Ok(Self {
            entries: ps.iter().map(|&p| (p, sogge_exponent(p))).collect(),
        })
    }

    /// The points `p = 2, 4, 6, ∞`.
    pub fn labeled() -> Self {
        Self::new(&[2.0, 4.0, 6.0, f64::INFINITY]).expect("valid exponents")
    }
}

/// `‖f g‖_{L²(S²)}` by quadrature; `exact` is false when the grid under-resolves the product.
pub fn product_l2(f: &HarmonicField, g: &HarmonicField, grid: &SphereGrid) -> Result<Quadrature<f64>> {
    let k = f.k_max().max(g.k_max());
    let t = SphereTransform::new(grid.clone(), k);
    let a = t.synthesize_grid(f)?;
    let b = t.synthesize_grid(g)?;
    let q = integrate_product(&[a.mul(&b), a.conj().mul(&b.conj())], grid)?;
    Ok(Quadrature {
        value: q.value.re.max(0.0).sqrt(),
        exact: q.exact,
    })
}

/// `‖f‖_{L^p} / ‖f‖_{L²}` with the L^p norm by grid quadrature (a grid maximum refined
/// by local search for `p = ∞`) and the L² norm from the coefficients.
pub fn sogge_ratio(f: &HarmonicField, p: f64, grid: &SphereGrid) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::InvalidParams(format!("exponent {p} below 2")));
    }
    let l2 = f.l2_norm();
    if l2 == 0.0 {
        return Err(Error::InvalidParams("zero field".into()));
    }
    let t = SphereTransform::new(grid.clone(), f.k_max());
    let vals = t.synthesize(f)?;
    if p.is_infinite() {
        return Ok(sup_norm(f, &vals, grid) / l2);
    }
    let n_lon = grid.n_lon();
    let dl = grid.lon_weight();
    let integral: f64 = grid
        .lat_weights()
        .iter()
        .enumerate()
        .map(|(i, &w)| w * dl * vals[i * n_lon..(i + 1) * n_lon].iter().map(|v| v.norm().powf(p)).sum::<f64>())
        .sum();
    Ok(integral.powf(1.0 / p) / l2)
}

fn sup_norm(f: &HarmonicField, vals: &[Complex64], grid: &SphereGrid) -> f64 {
    let (idx, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("nonempty grid");
    let n_lon = grid.n_lon();
    let mut theta = grid.colatitude(idx / n_lon);
    let mut phi = grid.longitude(idx % n_lon);
    let mut best = f.evaluate(theta, phi).norm();
    let mut step = std::f64::consts::PI / grid.n_lat() as f64;
    while step > 1e-10 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let t = (theta + dt).clamp(0.0, std::f64::consts::PI);
            let v = f.evaluate(t, phi + dp).norm();
            if v > best {
                best = v;
                theta = t;
                phi += dp;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// Largest `|∫ w₀ w₁ w₂ w₃ dσ|` over seeded random unit fields `w_j` of pure degree `k_j`.
pub fn quadruple_orthogonality_check(ks: [usize; 4], trials: usize, seed: u64) -> Result<f64> {
    let total: usize = ks.iter().sum();
    let k_max = *ks.iter().max().unwrap();
    let grid = SphereGrid::exact_for_degree(total.max(2 * k_max))?;
    let t = SphereTransform::new(grid.clone(), k_max);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = crate::rng::stream(seed, trial as u64);
        let fields = ks
            .iter()
            .map(|&k| t.synthesize_grid(&HarmonicField::random_band(k, k, k, &mut rng)))
            .collect::<Result<Vec<_>>>()?;
        let q = integrate_product(&fields, &grid)?;
        debug_assert!(q.exact);
        worst = worst.max(q.value.norm());
    }
    Ok(worst)
}
