//! Exact lattice counts: sums of two squares, degree-pair resonances on the
//! sphere and quadruple resonances on the torus.

use rayon::prelude::*;

use crate::{Error, Result};

/// Default work budget for resonance scans (number of enumerated pairs).
pub const DEFAULT_SCAN_BUDGET: u128 = 1_000_000_000;

/// `#{(a, b) ∈ ℤ² : a² + b² = m}` from the prime factorization of `m`.
pub fn sum_two_squares_count(m: u64) -> Result<u64> {
    if m > i64::MAX as u64 {
        return Err(Error::Overflow(format!("{m} exceeds 2^63 - 1")));
    }
    if m == 0 {
        return Ok(1);
    }
    let mut n = m;
    while n % 2 == 0 {
        n /= 2;
    }
    let mut product: u64 = 1;
    let mut p: u64 = 3;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u64;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if p % 4 == 3 {
                if e % 2 == 1 {
                    return Ok(0);
                }
            } else {
                product *= e + 1;
            }
        }
        p += 2;
    }
    if n > 1 {
        if n % 4 == 3 {
            return Ok(0);
        }
        product *= 2;
    }
    Ok(4 * product)
}

/// Integer square root: largest `r` with `r² ≤ n`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u64) as i64;
    (r * r == n).then_some(r)
}

/// Direct enumeration of `a² + b² = m`.
pub fn sum_two_squares_enumerate(m: u64) -> u64 {
    let r = isqrt(m) as i64;
    let m = m as i64;
    (-r..=r).map(|a| match exact_sqrt(m - a * a) {
        Some(0) => 1,
        Some(_) => 2,
        None => 0,
    })
    .sum()
}

/// `#{(k, l) : n ≤ k ≤ 2n, l0 ≤ l ≤ 2 l0, k(k+1) + l(l+1) = τ}`, through the
/// representation `4τ + 2 = (2k+1)² + (2l+1)²`.
pub fn alpha_count(n: u64, l0: u64, tau: u64) -> u64 {
    let target = 4 * tau as i128 + 2;
    let mut count = 0;
    for k in n..=2 * n {
        let a = 2 * k as i128 + 1;
        let rest = target - a * a;
        if rest <= 0 {
            break;
        }
        if let Some(b) = exact_sqrt(rest as i64) {
            if b % 2 == 1 {
                let l = (b as u64 - 1) / 2;
                if (l0..=2 * l0).contains(&l) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Double-loop version of [`alpha_count`].
pub fn alpha_count_brute(n: u64, l0: u64, tau: u64) -> u64 {
    let mut count = 0;
    for k in n..=2 * n {
        for l in l0..=2 * l0 {
            if k * (k + 1) + l * (l + 1) == tau {
                count += 1;
            }
        }
    }
    count
}

/// Largest resonance count over all `τ` and the smallest `τ` attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaMax {
    pub tau: u64,
    pub count: u64,
}

/// Maximize `alpha_count(n, l, ·)` over `τ` by histogramming all pairs.
pub fn max_alpha_scan(n: u64, l: u64) -> Result<AlphaMax> {
    max_alpha_scan_with_budget(n, l, DEFAULT_SCAN_BUDGET)
}

pub fn max_alpha_scan_with_budget(n: u64, l: u64, budget: u128) -> Result<AlphaMax> {
    if n == 0 || l == 0 {
        return Err(Error::InvalidParams("band parameters must be at least 1".into()));
    }
    let work = (n as u128 + 1) * (l as u128 + 1);
    if work > budget {
        return Err(Error::BudgetExceeded { work, budget });
    }
    let mut taus: Vec<u64> = (n..=2 * n)
        .flat_map(|k| (l..=2 * l).map(move |j| k * (k + 1) + j * (j + 1)))
        .collect();
    taus.par_sort_unstable();
    let mut best = AlphaMax { tau: 0, count: 0 };
    let mut i = 0;
    while i < taus.len() {
        let mut j = i;
        while j < taus.len() && taus[j] == taus[i] {
            j += 1;
        }
        let c = (j - i) as u64;
        if c > best.count {
            best = AlphaMax { tau: taus[i], count: c };
        }
        i = j;
    }
    Ok(best)
}

/// `#{(q, r) ∈ ℤ²×ℤ² : |q|² + |r|² = τ, q + r = p, |q_j|, |r_j| ≤ A}` through
/// `2τ − |p|² = (2q₁ − p₁)² + (2q₂ − p₂)²`.
pub fn torus_pair_count(tau: i64, p1: i64, p2: i64, a: i64) -> u64 {
    let d = 2 * tau - p1 * p1 - p2 * p2;
    if d < 0 || p1.abs() > 2 * a || p2.abs() > 2 * a {
        return 0;
    }
    let bx = 2 * a - p1.abs();
    let by = 2 * a - p2.abs();
    let r = (isqrt(d as u64) as i64).min(bx);
    let mut count = 0;
    for x in -r..=r {
        if (x - p1).rem_euclid(2) != 0 {
            continue;
        }
        if let Some(y) = exact_sqrt(d - x * x) {
            if y > by || (y - p2).rem_euclid(2) != 0 {
                continue;
            }
            count += if y == 0 { 1 } else { 2 };
        }
    }
    count
}

/// Four-loop version of [`torus_pair_count`].
pub fn torus_pair_count_brute(tau: i64, p1: i64, p2: i64, a: i64) -> u64 {
    let mut count = 0;
    for q1 in -a..=a {
        let r1 = p1 - q1;
        if r1.abs() > a {
            continue;
        }
        for q2 in -a..=a {
            let r2 = p2 - q2;
            if r2.abs() <= a && q1 * q1 + q2 * q2 + r1 * r1 + r2 * r2 == tau {
                count += 1;
            }
        }
    }
    count
}

/// Supremum of [`torus_pair_count`] over `(τ, p)` at fixed `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusSup {
    pub half_width: i64,
    pub tau: i64,
    pub p: (i64, i64),
    pub count: u64,
}

/// The count only depends on `p` through its parity class and the box
/// `|2q_j − p_j| ≤ 2A − |p_j|`, which is largest for `p_j ∈ {0, 1}`; the
/// classes `(0,0)`, `(1,0)`, `(1,1)` cover everything up to symmetry.
pub fn torus_sup_count(a: i64) -> TorusSup {
    let mut best = TorusSup {
        half_width: a,
        tau: 0,
        p: (0, 0),
        count: 0,
    };
    for p in [(0i64, 0i64), (1, 0), (1, 1)] {
        let bx = 2 * a - p.0;
        let by = 2 * a - p.1;
        if bx < 0 || by < 0 {
            continue;
        }
        let mut ds: Vec<i64> = Vec::new();
        let mut x = -bx;
        while x <= bx {
            let mut y = -by;
            while y <= by {
                ds.push(x * x + y * y);
                y += 2;
            }
            x += 2;
        }
        ds.sort_unstable();
        let mut i = 0;
        while i < ds.len() {
            let mut j = i;
            while j < ds.len() && ds[j] == ds[i] {
                j += 1;
            }
            let c = (j - i) as u64;
            let tau = (ds[i] + p.0 * p.0 + p.1 * p.1) / 2;
            if c > best.count || (c == best.count && tau < best.tau) {
                best = TorusSup {
                    half_width: a,
                    tau,
                    p,
                    count: c,
                };
            }
            i = j;
        }
    }
    best
}
