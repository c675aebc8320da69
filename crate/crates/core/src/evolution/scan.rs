use std::fmt;

use crate::bilinear_estimates::{fit_growth_exponent, ExtremalOptions, GroupedBilinear, PowerFit};
use crate::spectral_ops::{SpectralWindow, SpectrumModel};
use crate::{Error, Result};

use super::torus_strichartz::TorusStrichartz;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrichartzGeometry {
    /// Round sphere over `[0, 2π]`, dyadic bands `N ≤ √(k(k+1)) < 2N`.
    Sphere,
    /// Unit torus over `[0, 1]`, shells `N ≤ |n|_∞ < 2N`.
    Torus,
}

impl fmt::Display for StrichartzGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sphere => "sphere",
            Self::Torus => "torus",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzScanPoint {
    pub n: usize,
    pub l: usize,
    /// Largest quotient `‖uv‖ / (‖u₀‖ ‖v₀‖)` found.
    pub constant: f64,
    pub rounds: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzScan {
    pub geometry: StrichartzGeometry,
    pub points: Vec<StrichartzScanPoint>,
    /// Fit of `log constant` against `log min(N, L)`.
    pub fit: PowerFit,
}

/// Extremal bilinear Strichartz constant for one band pair.
pub fn strichartz_extremal(n: usize, l: usize, geometry: StrichartzGeometry, opts: &ExtremalOptions) -> Result<StrichartzScanPoint> {
    if n == 0 || l == 0 {
        return Err(Error::InvalidParams("band parameters must be at least 1".into()));
    }
    match geometry {
        StrichartzGeometry::Sphere => {
            let spec = SpectrumModel::sphere_exact();
            let du = SpectralWindow::dyadic(n as f64).sphere_support(&spec, 2 * n + 1)?;
            let dv = SpectralWindow::dyadic(l as f64).sphere_support(&spec, 2 * l + 1)?;
            let m = GroupedBilinear::sphere_strichartz(du, dv)?.maximize(opts)?;
            Ok(StrichartzScanPoint {
                n,
                l,
                constant: m.best.value,
                rounds: m.best.rounds,
                residual: m.best.residual,
                converged: m.best.converged,
            })
        }
        StrichartzGeometry::Torus => {
            let e = TorusStrichartz::new(n, l)?.maximize(opts)?;
            Ok(StrichartzScanPoint {
                n,
                l,
                constant: e.value,
                rounds: e.rounds,
                residual: e.residual,
                converged: e.converged,
            })
        }
    }
}

/// Maximize the Strichartz quotient for each band pair and fit its growth in `min(N, L)`.
pub fn strichartz_exponent_scan(pairs: &[(usize, usize)], geometry: StrichartzGeometry, opts: &ExtremalOptions) -> Result<StrichartzScan> {
    if pairs.len() < 4 {
        return Err(Error::InvalidParams(format!("need at least 4 band pairs, got {}", pairs.len())));
    }
    let ratio = pairs[0].1 as f64 / pairs[0].0 as f64;
    if pairs.iter().any(|&(n, l)| n == 0 || (l as f64 / n as f64 - ratio).abs() > 1e-12) {
        return Err(Error::InvalidParams("band pairs must share one ratio L/N".into()));
    }
    let points = pairs
        .iter()
        .map(|&(n, l)| strichartz_extremal(n, l, geometry, opts))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_growth_exponent(&points.iter().map(|p| (p.n.min(p.l) as f64, p.constant)).collect::<Vec<_>>())?;
    Ok(StrichartzScan { geometry, points, fit })
}
