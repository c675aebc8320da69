use crate::{Error, Result};

/// Least-squares line through `(log m, log c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    /// `log C` in `c ≈ C m^slope`.
    pub intercept: f64,
    pub r2: f64,
}

impl PowerFit {
    pub fn predict(&self, m: f64) -> f64 {
        (self.intercept + self.slope * m.ln()).exp()
    }
}

/// Fit `c ≈ C m^s` to at least four positive points.
pub fn fit_growth_exponent(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 4 {
        return Err(Error::InvalidParams(format!("need at least 4 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(m, c)| !(*m > 0.0 && *c > 0.0 && m.is_finite() && c.is_finite())) {
        return Err(Error::InvalidParams(format!("nonpositive or non-finite point {p:?}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(PowerFit { slope, intercept, r2 })
}
