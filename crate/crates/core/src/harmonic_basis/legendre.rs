//! Fully normalized associated Legendre functions.
//!
//! `lm(k, m, x)` is normalized so that `Y_k^m(θ, φ) = lm(k, m, cos θ) e^{imφ}`
//! is orthonormal on the unit sphere, with the Condon–Shortley phase.

use std::f64::consts::PI;

const BIG: f64 = 1e200;
const TINY: f64 = 1e-200;

/// Number of `(k, m)` entries with `0 ≤ m ≤ k ≤ k_max`.
pub fn triangle_len(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 2) / 2
}

#[inline]
pub fn triangle_index(k: usize, m: usize) -> usize {
    k * (k + 1) / 2 + m
}

/// Values of the normalized functions at one abscissa for all `0 ≤ m ≤ k ≤ k_max`,
/// written into `out` in triangle order.
///
/// The diagonal `m = k` underflows quickly near the poles; it is carried as a
/// mantissa/exponent pair and only materialized once it is representable.
pub fn fill_column(k_max: usize, x: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), triangle_len(k_max));
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut diag = 1.0 / (4.0 * PI).sqrt();
    let mut exp: i32 = 0;
    for m in 0..=k_max {
        if m > 0 {
            diag *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            if diag.abs() < TINY && diag != 0.0 {
                diag *= BIG;
                exp -= 1;
            }
        }
        recur_order(k_max, m, x, diag, exp, out);
    }
}

fn recur_order(k_max: usize, m: usize, x: f64, diag: f64, mut exp: i32, out: &mut [f64]) {
    let mf = m as f64;
    let emit = |v: f64, e: i32| -> f64 {
        match e {
            0 => v,
            -1 => v * TINY,
            _ => 0.0,
        }
    };
    out[triangle_index(m, m)] = emit(diag, exp);
    if m == k_max {
        return;
    }
    let mut p_prev = diag;
    let mut p = x * (2.0 * mf + 3.0).sqrt() * diag;
    out[triangle_index(m + 1, m)] = emit(p, exp);
    let mut a_prev = (2.0 * mf + 3.0).sqrt();
    for k in (m + 2)..=k_max {
        let kf = k as f64;
        let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
        let next = a * (x * p - p_prev / a_prev);
        p_prev = p;
        p = next;
        a_prev = a;
        if exp < 0 && p.abs() > 1.0 {
            p *= TINY;
            p_prev *= TINY;
            exp += 1;
        }
        out[triangle_index(k, m)] = emit(p, exp);
    }
}

/// Single value `lm(k, m, x)` for signed `m`.
pub fn normalized_legendre(k: usize, m: i64, x: f64) -> f64 {
    let ma = m.unsigned_abs() as usize;
    if ma > k {
        return 0.0;
    }
    let mut col = vec![0.0; triangle_len(k)];
    fill_column(k, x, &mut col);
    let v = col[triangle_index(k, ma)];
    if m < 0 && ma % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Tabulated functions at a fixed set of abscissae.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    k_max: usize,
    stride: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(k_max: usize, xs: &[f64]) -> Self {
        let stride = triangle_len(k_max);
        let mut values = vec![0.0; stride * xs.len()];
        for (x, chunk) in xs.iter().zip(values.chunks_mut(stride)) {
            fill_column(k_max, *x, chunk);
        }
        Self { k_max, stride, values }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Value at abscissa `i` for `0 ≤ m ≤ k`.
    #[inline]
    pub fn get(&self, i: usize, k: usize, m: usize) -> f64 {
        self.values[i * self.stride + triangle_index(k, m)]
    }

    /// Value for signed order.
    #[inline]
    pub fn get_signed(&self, i: usize, k: usize, m: i64) -> f64 {
        let ma = m.unsigned_abs() as usize;
        let v = self.get(i, k, ma);
        if m < 0 && ma % 2 == 1 {
            -v
        } else {
            v
        }
    }
}
