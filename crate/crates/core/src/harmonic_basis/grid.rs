use std::f64::consts::PI;

use crate::{Error, Result};

/// Default cap on the number of grid points a single grid may allocate.
pub const DEFAULT_MAX_GRID_POINTS: usize = 1 << 24;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in decreasing order
/// (so that colatitude increases with the index).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre (in cos θ) × uniform-longitude quadrature grid on S².
///
/// With `n_lat` latitude rows and `n_lon` longitudes the rule integrates
/// exactly every polynomial of degree at most `min(2 n_lat - 1, n_lon - 1)`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    n_lat: usize,
    n_lon: usize,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    lat_weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_lat: usize, n_lon: usize) -> Result<Self> {
        Self::with_cap(n_lat, n_lon, DEFAULT_MAX_GRID_POINTS)
    }

    pub fn with_cap(n_lat: usize, n_lon: usize, cap: usize) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(Error::InvalidParams("sphere grid needs at least one node per axis".into()));
        }
        let points = n_lat.saturating_mul(n_lon);
        if points > cap {
            return Err(Error::ResourceLimit { points, cap });
        }
        let (cos_theta, lat_weights) = gauss_legendre(n_lat);
        let sin_theta = cos_theta.iter().map(|&x| (1.0 - x * x).max(0.0).sqrt()).collect();
        Ok(Self {
            n_lat,
            n_lon,
            cos_theta,
            sin_theta,
            lat_weights,
        })
    }

    /// Smallest grid of this family that integrates polynomials of total
    /// degree `degree` exactly.
    pub fn exact_for_degree(degree: usize) -> Result<Self> {
        Self::new(degree / 2 + 1, degree + 2)
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn len(&self) -> usize {
        self.n_lat * self.n_lon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        (2 * self.n_lat - 1).min(self.n_lon - 1)
    }

    /// Largest band limit whose analysis on this grid is exact.
    pub fn max_analysis_degree(&self) -> usize {
        self.exactness_degree() / 2
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_theta
    }

    pub fn lat_weights(&self) -> &[f64] {
        &self.lat_weights
    }

    pub fn colatitude(&self, i: usize) -> f64 {
        self.cos_theta[i].clamp(-1.0, 1.0).acos()
    }

    pub fn longitude(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_lon as f64
    }

    pub fn lon_weight(&self) -> f64 {
        2.0 * PI / self.n_lon as f64
    }

    /// (colatitude, longitude) of every node, row-major in latitude.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.n_lat).flat_map(move |i| (0..self.n_lon).map(move |j| (self.colatitude(i), self.longitude(j))))
    }

    /// Surface quadrature weight of every node; they sum to 4π.
    pub fn weights(&self) -> Vec<f64> {
        let dl = self.lon_weight();
        self.lat_weights
            .iter()
            .flat_map(|&w| std::iter::repeat_n(w * dl, self.n_lon))
            .collect()
    }

    /// Cartesian coordinates of node (i, j) on the unit sphere.
    pub fn cartesian(&self, i: usize, j: usize) -> [f64; 3] {
        let phi = self.longitude(j);
        let s = self.sin_theta[i];
        [s * phi.cos(), s * phi.sin(), self.cos_theta[i]]
    }
}

/// Grid resolving products of two fields band-limited to `k_max`.
pub fn build_sphere_grid(k_max: usize) -> Result<SphereGrid> {
    SphereGrid::new(k_max + 1, 2 * k_max + 2)
}
