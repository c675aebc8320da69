//! Extremal bilinear Strichartz constant on the unit torus over one time period.
//!
//! With `u = Σ c_q e^{2πi(q·x + |q|²t)}` on the shell `N ≤ |q|_∞ < 2N` and `v` likewise
//! on the shell of `L`, Parseval in `(t, x)` gives
//! `‖uv‖²_{L²([0,1]×T²)} = Σ_{τ,p} |Σ_{q+r=p, |q|²+|r|²=τ} c_q d_r|²`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bilinear_estimates::{norm, power_iteration, ExtremalOptions, HermitianOperator};
use crate::harmonic_basis::TorusField;
use crate::{Error, Result};

/// Lattice points with `n ≤ max(|q₁|, |q₂|) < 2n`, sorted.
pub fn torus_shell(n: usize) -> Vec<(i64, i64)> {
    let (lo, hi) = (n as i64, 2 * n as i64);
    let mut out = Vec::new();
    for q1 in -hi + 1..hi {
        for q2 in -hi + 1..hi {
            if q1.abs().max(q2.abs()) >= lo {
                out.push((q1, q2));
            }
        }
    }
    out
}

/// Resonance classes of all `(q, r)` pairs between two shells.
pub struct TorusStrichartz {
    n: usize,
    l: usize,
    u_modes: Vec<(i64, i64)>,
    v_modes: Vec<(i64, i64)>,
    /// Pairs `(i, j)` of classes with more than one member, class by class.
    multi_pairs: Vec<(u32, u32)>,
    multi_bounds: Vec<u32>,
    /// `single[i]` lists `j` such that `(i, j)` is alone in its class.
    single_u: Vec<Vec<u32>>,
    single_v: Vec<Vec<u32>>,
}

impl std::fmt::Debug for TorusStrichartz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusStrichartz")
            .field("n", &self.n)
            .field("l", &self.l)
            .field("multi_pairs", &self.multi_pairs.len())
            .finish()
    }
}

impl TorusStrichartz {
    pub fn new(n: usize, l: usize) -> Result<Self> {
        if n == 0 || l == 0 {
            return Err(Error::InvalidParams("shell parameters must be at least 1".into()));
        }
        let u_modes = torus_shell(n);
        let v_modes = torus_shell(l);
        let pairs = u_modes.len() as u128 * v_modes.len() as u128;
        if pairs > 50_000_000 {
            return Err(Error::BudgetExceeded { work: pairs, budget: 50_000_000 });
        }
        let off = 4 * (n.max(l) as i64) + 1;
        let span = (2 * off + 1) as u64;
        let mut keyed: Vec<(u64, u32, u32)> = Vec::with_capacity(pairs as usize);
        for (i, q) in u_modes.iter().enumerate() {
            for (j, r) in v_modes.iter().enumerate() {
                let tau = (q.0 * q.0 + q.1 * q.1 + r.0 * r.0 + r.1 * r.1) as u64;
                let p1 = (q.0 + r.0 + off) as u64;
                let p2 = (q.1 + r.1 + off) as u64;
                keyed.push(((tau * span + p1) * span + p2, i as u32, j as u32));
            }
        }
        keyed.sort_unstable();
        let mut multi_pairs = Vec::new();
        let mut multi_bounds = vec![0u32];
        let mut single_u = vec![Vec::new(); u_modes.len()];
        let mut single_v = vec![Vec::new(); v_modes.len()];
        let mut s = 0;
        while s < keyed.len() {
            let mut e = s + 1;
            while e < keyed.len() && keyed[e].0 == keyed[s].0 {
                e += 1;
            }
            if e - s == 1 {
                let (_, i, j) = keyed[s];
                single_u[i as usize].push(j);
                single_v[j as usize].push(i);
            } else {
                multi_pairs.extend(keyed[s..e].iter().map(|k| (k.1, k.2)));
                multi_bounds.push(multi_pairs.len() as u32);
            }
            s = e;
        }
        Ok(Self {
            n,
            l,
            u_modes,
            v_modes,
            multi_pairs,
            multi_bounds,
            single_u,
            single_v,
        })
    }

    pub fn u_modes(&self) -> &[(i64, i64)] {
        &self.u_modes
    }

    pub fn v_modes(&self) -> &[(i64, i64)] {
        &self.v_modes
    }

    /// Number of pairs lying in classes with at least two members.
    pub fn resonant_pairs(&self) -> usize {
        self.multi_pairs.len()
    }

    /// `‖uv‖_{L²([0,1]×T²)}` for shell coefficient vectors.
    pub fn value(&self, c: &[Complex64], d: &[Complex64]) -> f64 {
        let mut total = 0.0;
        for (i, js) in self.single_u.iter().enumerate() {
            let ci = c[i].norm_sqr();
            total += js.iter().map(|&j| ci * d[j as usize].norm_sqr()).sum::<f64>();
        }
        for w in self.multi_bounds.windows(2) {
            let f: Complex64 = self.multi_pairs[w[0] as usize..w[1] as usize]
                .iter()
                .map(|&(i, j)| c[i as usize] * d[j as usize])
                .sum();
            total += f.norm_sqr();
        }
        total.sqrt()
    }

    /// Embed shell coefficients into a lattice field of half-width `2 max(n, l) − 1`.
    pub fn to_field(&self, c: &[Complex64], on_u: bool) -> TorusField {
        let a = 2 * self.n.max(self.l) - 1;
        let modes = if on_u { &self.u_modes } else { &self.v_modes };
        let mut f = TorusField::zeros(a);
        for (m, v) in modes.iter().zip(c) {
            f.set(m.0, m.1, *v);
        }
        f
    }

    /// Alternating maximization of `value(c, d) / (‖c‖ ‖d‖)` from a face start, a flat start
    /// and seeded random restarts.
    pub fn maximize(&self, opts: &ExtremalOptions) -> Result<TorusExtremum> {
        let flat = |n: usize| vec![Complex64::new(1.0, 0.0); n];
        // extremizers concentrate near one face of the shells
        let face = |modes: &[(i64, i64)], n: usize| -> Vec<Complex64> {
            modes
                .iter()
                .map(|q| Complex64::new(if q.1 >= n as i64 { 1.0 } else { 0.0 }, 0.0))
                .collect()
        };
        let mut starts = vec![
            (face(&self.u_modes, self.n), face(&self.v_modes, self.l)),
            (flat(self.u_modes.len()), flat(self.v_modes.len())),
        ];
        for r in 0..opts.random_restarts {
            let mut rng = crate::rng::stream(opts.seed, 2000 + r as u64);
            let mut g = |n: usize| -> Vec<Complex64> {
                (0..n)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            };
            let u = g(self.u_modes.len());
            let v = g(self.v_modes.len());
            starts.push((u, v));
        }
        let mut best: Option<TorusExtremum> = None;
        let mut start_values = Vec::new();
        for (u, v) in starts {
            let e = self.alternate(u, v, opts)?;
            start_values.push(e.value);
            if best.as_ref().is_none_or(|b| e.value > b.value) {
                best = Some(e);
            }
        }
        let mut best = best.expect("at least one start");
        best.start_values = start_values;
        Ok(best)
    }

    fn alternate(&self, mut c: Vec<Complex64>, mut d: Vec<Complex64>, opts: &ExtremalOptions) -> Result<TorusExtremum> {
        for x in [&mut c, &mut d] {
            let s = norm(x);
            x.iter_mut().for_each(|z| *z /= s);
        }
        let mut history = Vec::new();
        let mut prev = 0.0;
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..opts.max_iters {
            // inner solves only need to be as accurate as the outer iteration so far
            let mut p = opts.power;
            p.tol = p.tol.max(1e-3 * residual.min(1.0));
            let op = TorusNormal::new(self, &d, true);
            p.shift = -op.shift;
            c = power_iteration(&op, &c, p)?.vector;
            let op = TorusNormal::new(self, &c, false);
            p.shift = -op.shift;
            d = power_iteration(&op, &d, p)?.vector;
            let q = self.value(&c, &d);
            history.push(q);
            residual = if q > 0.0 { (q - prev).abs() / q } else { 0.0 };
            prev = q;
            if residual < opts.tol {
                converged = true;
                break;
            }
        }
        Ok(TorusExtremum {
            value: prev,
            u: c,
            v: d,
            rounds: history.len(),
            residual,
            converged,
            history,
            start_values: Vec::new(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct TorusExtremum {
    pub value: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub rounds: usize,
    pub residual: f64,
    pub converged: bool,
    pub history: Vec<f64>,
    pub start_values: Vec<f64>,
}

/// Normal operator of one side with the other frozen:
/// a diagonal from singleton classes plus the resonant coupling.
struct TorusNormal<'a> {
    eng: &'a TorusStrichartz,
    fixed: &'a [Complex64],
    on_u: bool,
    diag: Vec<f64>,
    /// Half of the smallest diagonal entry, removed to speed up the power iteration.
    shift: f64,
}

impl<'a> TorusNormal<'a> {
    fn new(eng: &'a TorusStrichartz, fixed: &'a [Complex64], on_u: bool) -> Self {
        let singles = if on_u { &eng.single_u } else { &eng.single_v };
        let diag: Vec<f64> = singles
            .iter()
            .map(|js| js.iter().map(|&j| fixed[j as usize].norm_sqr()).sum())
            .collect();
        let shift = 0.5 * diag.iter().cloned().fold(f64::INFINITY, f64::min);
        Self {
            eng,
            fixed,
            on_u,
            diag,
            shift: if shift.is_finite() { shift } else { 0.0 },
        }
    }
}

impl HermitianOperator for TorusNormal<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for ((yi, xi), di) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = xi * di;
        }
        let e = self.eng;
        for w in e.multi_bounds.windows(2) {
            let class = &e.multi_pairs[w[0] as usize..w[1] as usize];
            let f: Complex64 = class
                .iter()
                .map(|&(i, j)| {
                    let (i, j) = (i as usize, j as usize);
                    if self.on_u {
                        x[i] * self.fixed[j]
                    } else {
                        self.fixed[i] * x[j]
                    }
                })
                .sum();
            for &(i, j) in class {
                let (i, j) = (i as usize, j as usize);
                if self.on_u {
                    y[i] += self.fixed[j].conj() * f;
                } else {
                    y[j] += self.fixed[i].conj() * f;
                }
            }
        }
    }
}
