use std::f64::consts::PI;

use crate::harmonic_basis::HarmonicField;
use crate::{Error, Result};

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C^∞` in between.
pub fn smooth_step(x: f64) -> f64 {
    let f = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
    let (a, b) = (f(x), f(1.0 - x));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Time cutoff on `[0, T]`: 1 on the middle half, smooth roll-off to 0 at both ends.
pub fn time_window(t: f64, t_win: f64) -> f64 {
    let x = t / t_win;
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    smooth_step(4.0 * x) * smooth_step(4.0 * (1.0 - x))
}

/// Cutoff applied to a [`TimeSampledField`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWindow {
    None,
    /// [`time_window`] over the sampled interval.
    Smooth,
}

/// Uniform samples `u(t₀ + j Δt)`, `j = 0..n_t`, of a spherical field.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSampledField {
    pub t0: f64,
    pub dt: f64,
    pub fields: Vec<HarmonicField>,
    pub window: TimeWindow,
}

impl TimeSampledField {
    pub fn new(t0: f64, dt: f64, fields: Vec<HarmonicField>) -> Result<Self> {
        if fields.len() < 2 {
            return Err(Error::InvalidParams("a trajectory needs at least two samples".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("sampling step must be positive, got {dt}")));
        }
        let k = fields[0].k_max();
        if fields.iter().any(|f| f.k_max() != k) {
            return Err(Error::InvalidParams("samples have different band limits".into()));
        }
        Ok(Self {
            t0,
            dt,
            fields,
            window: TimeWindow::None,
        })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn k_max(&self) -> usize {
        self.fields[0].k_max()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.t0 + j as f64 * self.dt).collect()
    }

    /// Length `n_t Δt` of the periodic sampling window.
    pub fn period(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    /// Multiply sample `j` by the smooth cutoff evaluated at `j Δt` over the period.
    pub fn windowed(&self) -> Self {
        let tw = self.period();
        let fields = self
            .fields
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let mut g = f.clone();
                g.scale(time_window(j as f64 * self.dt, tw));
                g
            })
            .collect();
        Self {
            fields,
            window: TimeWindow::Smooth,
            ..*self
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for f in &mut out.fields {
            f.scale(s);
        }
        out
    }

    /// `ψ(t) e^{−itμ} Y_k^m` sampled at `n_t` points with spacing `dt`.
    pub fn free_mode(k_max: usize, k: usize, m: i64, mu: f64, n_t: usize, dt: f64) -> Result<Self> {
        let fields = (0..n_t)
            .map(|j| {
                let t = j as f64 * dt;
                let mut f = HarmonicField::zeros(k_max);
                f.set(k, m, num_complex::Complex64::from_polar(1.0, -mu * t));
                f
            })
            .collect();
        Ok(Self::new(0.0, dt, fields)?.windowed())
    }
}

/// `2π j / (n Δt)` for DFT index `j`, folded to the symmetric range.
pub fn dft_frequency(j: usize, n: usize, dt: f64) -> f64 {
    let js = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
    2.0 * PI * js / (n as f64 * dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_shape() {
        assert_eq!(time_window(0.0, 2.0), 0.0);
        assert_eq!(time_window(2.0, 2.0), 0.0);
        for t in [0.5, 0.75, 1.0, 1.25, 1.5] {
            assert_eq!(time_window(t, 2.0), 1.0, "t={t}");
        }
        assert!(time_window(0.25, 2.0) > 0.0 && time_window(0.25, 2.0) < 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_sampling() {
        let f = HarmonicField::zeros(1);
        assert!(TimeSampledField::new(0.0, 0.1, vec![f.clone()]).is_err());
        assert!(TimeSampledField::new(0.0, 0.0, vec![f.clone(), f.clone()]).is_err());
        assert!(TimeSampledField::new(0.0, 0.1, vec![f, HarmonicField::zeros(2)]).is_err());
    }
}
