//! Maximization of grouped bilinear quotients on the sphere.
//!
//! For band-limited `U = Σ_a U_a`, `V = Σ_b V_b` (degree components) the engine
//! evaluates
//!
//! `Q(U, V)² = scale · Σ_g ‖ Σ_{(a,b) ∈ g} (w U)_a (w' V)_b ‖²_{L²(S²)}`
//!
//! where `w`, `w'` are per-mode multipliers and `g` runs over groups of degree
//! pairs. A single group holding every pair is the plain product norm; grouping
//! by `a(a+1) + b(b+1)` gives the time-integrated bilinear Schrödinger product.
//! With one side frozen `Q²` is a Hermitian form in the other side, so the
//! maximization alternates top eigenvectors of the two normal operators.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::power::{norm, power_iteration, HermitianOperator, PowerOptions};
use crate::harmonic_basis::{sh_index, sh_len, HarmonicField, SphereGrid, SphereTransform};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How degree pairs are grouped before squaring.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// One group containing every pair: `‖(wU)(w'V)‖²`.
    Product,
    /// Explicit groups of `(u_degree, v_degree)` pairs.
    Resonant(Vec<Vec<(usize, usize)>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    U,
    V,
}

/// Options of the alternating maximization.
#[derive(Debug, Clone, Copy)]
pub struct ExtremalOptions {
    /// Relative change of the quotient between rounds that stops the alternation.
    pub tol: f64,
    pub max_iters: usize,
    pub power: PowerOptions,
    /// Seeded random starting pairs tried after the highest-weight warm start.
    pub random_restarts: usize,
    pub seed: u64,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iters: 50,
            power: PowerOptions::default(),
            random_restarts: 3,
            seed: 0,
        }
    }
}

/// Outcome of one alternating run.
#[derive(Debug, Clone)]
pub struct Extremum {
    pub value: f64,
    pub u: HarmonicField,
    pub v: HarmonicField,
    pub rounds: usize,
    pub residual: f64,
    pub converged: bool,
    /// Quotient after each round.
    pub history: Vec<f64>,
}

/// Best of all starts.
#[derive(Debug, Clone)]
pub struct Maximum {
    pub best: Extremum,
    /// Final quotient of every start, warm start first.
    pub start_values: Vec<f64>,
}

/// Degree bands, multipliers and grouping of one bilinear quotient.
pub struct GroupedBilinear {
    transform: SphereTransform,
    k_max: usize,
    u_degrees: Vec<usize>,
    v_degrees: Vec<usize>,
    u_weights: Vec<f64>,
    v_weights: Vec<f64>,
    coupling: Coupling,
    scale: f64,
}

impl std::fmt::Debug for GroupedBilinear {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupedBilinear")
            .field("u_degrees", &self.u_degrees)
            .field("v_degrees", &self.v_degrees)
            .field("scale", &self.scale)
            .finish()
    }
}

/// Degree-restricted block of the normal operator, Hermitian storage (`a ≤ a'` only).
struct BlockHermitian {
    offsets: Vec<usize>,
    dim: usize,
    blocks: Vec<(usize, usize, usize, Vec<Complex64>)>,
}

impl HermitianOperator for BlockHermitian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        for (i, j, cols, data) in &self.blocks {
            let (oi, oj) = (self.offsets[*i], self.offsets[*j]);
            let xj = &x[oj..oj + cols];
            for (r, row) in data.chunks(*cols).enumerate() {
                y[oi + r] += row.iter().zip(xj).map(|(a, b)| a * b).sum::<Complex64>();
            }
            if i != j {
                let rows = data.len() / cols;
                let xi = &x[oi..oi + rows];
                for (r, row) in data.chunks(*cols).enumerate() {
                    let xr = xi[r];
                    for (c, a) in row.iter().enumerate() {
                        y[oj + c] += a.conj() * xr;
                    }
                }
            }
        }
    }
}

impl GroupedBilinear {
    pub fn new(
        u_degrees: Vec<usize>,
        v_degrees: Vec<usize>,
        u_weights: Option<Vec<f64>>,
        v_weights: Option<Vec<f64>>,
        coupling: Coupling,
        scale: f64,
    ) -> Result<Self> {
        if u_degrees.is_empty() || v_degrees.is_empty() {
            return Err(Error::InvalidParams("empty degree band".into()));
        }
        let mut u_degrees = u_degrees;
        let mut v_degrees = v_degrees;
        u_degrees.sort_unstable();
        u_degrees.dedup();
        v_degrees.sort_unstable();
        v_degrees.dedup();
        let hi_u = *u_degrees.last().unwrap();
        let hi_v = *v_degrees.last().unwrap();
        let k_max = hi_u.max(hi_v);
        let check = |w: &Option<Vec<f64>>| -> Result<Vec<f64>> {
            match w {
                Some(w) if w.len() < sh_len(k_max) => Err(Error::DimensionMismatch {
                    expected: sh_len(k_max),
                    got: w.len(),
                }),
                Some(w) => Ok(w[..sh_len(k_max)].to_vec()),
                None => Ok(vec![1.0; sh_len(k_max)]),
            }
        };
        let u_weights = check(&u_weights)?;
        let v_weights = check(&v_weights)?;
        if let Coupling::Resonant(groups) = &coupling {
            for &(a, b) in groups.iter().flatten() {
                if u_degrees.binary_search(&a).is_err() || v_degrees.binary_search(&b).is_err() {
                    return Err(Error::InvalidParams(format!("pair ({a},{b}) outside the bands")));
                }
            }
        }
        let grid = SphereGrid::exact_for_degree(2 * (hi_u + hi_v))?;
        Ok(Self {
            transform: SphereTransform::new(grid, k_max),
            k_max,
            u_degrees,
            v_degrees,
            u_weights,
            v_weights,
            coupling,
            scale,
        })
    }

    /// `‖(wU)(w'V)‖` over all degrees in the two bands.
    pub fn product(u_degrees: Vec<usize>, v_degrees: Vec<usize>, u_weights: Option<Vec<f64>>, v_weights: Option<Vec<f64>>) -> Result<Self> {
        Self::new(u_degrees, v_degrees, u_weights, v_weights, Coupling::Product, 1.0)
    }

    /// `‖e^{itΔ}U · e^{itΔ}V‖_{L²([0,2π]×S²)}` written as a sum over resonance classes
    /// `τ = a(a+1) + b(b+1)`.
    pub fn sphere_strichartz(u_degrees: Vec<usize>, v_degrees: Vec<usize>) -> Result<Self> {
        let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &a in &u_degrees {
            for &b in &v_degrees {
                groups.entry(a * (a + 1) + b * (b + 1)).or_default().push((a, b));
            }
        }
        Self::new(
            u_degrees,
            v_degrees,
            None,
            None,
            Coupling::Resonant(groups.into_values().collect()),
            2.0 * std::f64::consts::PI,
        )
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn u_degrees(&self) -> &[usize] {
        &self.u_degrees
    }

    pub fn v_degrees(&self) -> &[usize] {
        &self.v_degrees
    }

    pub fn grid(&self) -> &SphereGrid {
        self.transform.grid()
    }

    fn degrees(&self, side: Side) -> &[usize] {
        match side {
            Side::U => &self.u_degrees,
            Side::V => &self.v_degrees,
        }
    }

    fn weights(&self, side: Side) -> &[f64] {
        match side {
            Side::U => &self.u_weights,
            Side::V => &self.v_weights,
        }
    }

    fn band_dim(&self, side: Side) -> usize {
        self.degrees(side).iter().map(|a| 2 * a + 1).sum()
    }

    fn offsets(&self, side: Side) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.degrees(side).len() + 1);
        let mut acc = 0;
        for a in self.degrees(side) {
            off.push(acc);
            acc += 2 * a + 1;
        }
        off.push(acc);
        off
    }

    fn compact(&self, side: Side, f: &HarmonicField) -> Vec<Complex64> {
        self.degrees(side).iter().flat_map(|&a| f.degree(a).iter().copied().collect::<Vec<_>>()).collect()
    }

    fn expand(&self, side: Side, x: &[Complex64]) -> HarmonicField {
        let mut f = HarmonicField::zeros(self.k_max);
        let mut pos = 0;
        for &a in self.degrees(side) {
            let n = 2 * a + 1;
            f.degree_mut(a).copy_from_slice(&x[pos..pos + n]);
            pos += n;
        }
        f
    }

    /// Grid values of the weighted degree components of one side.
    fn degree_samples(&self, side: Side, f: &HarmonicField) -> Result<Vec<Vec<Complex64>>> {
        let w = self.weights(side);
        self.degrees(side)
            .iter()
            .map(|&a| {
                let mut g = HarmonicField::zeros(self.k_max);
                for m in -(a as i64)..=a as i64 {
                    let i = sh_index(a, m);
                    g.coeffs_mut()[i] = f.coeffs()[i] * w[i];
                }
                self.transform.synthesize(&g)
            })
            .collect()
    }

    /// `Q(u, v)` by direct synthesis and quadrature (independent of the normal operators).
    pub fn value(&self, u: &HarmonicField, v: &HarmonicField) -> Result<f64> {
        let us = self.degree_samples(Side::U, &u.with_k_max(self.k_max))?;
        let vs = self.degree_samples(Side::V, &v.with_k_max(self.k_max))?;
        let n = self.transform.grid().len();
        let total = match &self.coupling {
            Coupling::Product => {
                let sum = |s: &[Vec<Complex64>]| {
                    let mut acc = vec![ZERO; n];
                    for d in s {
                        acc.iter_mut().zip(d).for_each(|(a, b)| *a += b);
                    }
                    acc
                };
                let (su, sv) = (sum(&us), sum(&vs));
                let p: Vec<Complex64> = su.iter().zip(&sv).map(|(a, b)| a * b).collect();
                self.transform.quadrature_norm_sqr(&p)
            }
            Coupling::Resonant(groups) => groups
                .iter()
                .map(|g| {
                    let mut acc = vec![ZERO; n];
                    for &(a, b) in g {
                        let ia = self.u_degrees.binary_search(&a).unwrap();
                        let ib = self.v_degrees.binary_search(&b).unwrap();
                        acc.iter_mut().zip(us[ia].iter().zip(&vs[ib])).for_each(|(s, (x, y))| *s += x * y);
                    }
                    self.transform.quadrature_norm_sqr(&acc)
                })
                .sum(),
        };
        Ok((self.scale * total).sqrt())
    }

    /// Pairs `(left, right)` of degree positions, per group, seen from `side`.
    fn groups_from(&self, side: Side) -> Vec<Vec<(usize, usize)>> {
        match &self.coupling {
            Coupling::Product => Vec::new(),
            Coupling::Resonant(groups) => groups
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|&(a, b)| {
                            let ia = self.u_degrees.binary_search(&a).unwrap();
                            let ib = self.v_degrees.binary_search(&b).unwrap();
                            match side {
                                Side::U => (ia, ib),
                                Side::V => (ib, ia),
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Normal operator of `x ↦ Q(x, other)` (side U) or `x ↦ Q(other, x)` (side V).
    fn normal_operator(&self, side: Side, other: &HarmonicField) -> Result<BlockHermitian> {
        let other_side = match side {
            Side::U => Side::V,
            Side::V => Side::U,
        };
        let right = self.degree_samples(other_side, other)?;
        let left_deg = self.degrees(side).to_vec();
        let nl = left_deg.len();
        let n = self.transform.grid().len();

        // Contributions conj(R_i) R_j to every block (a, a') with a ≤ a'.
        let mut keys: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        let product_sum: Option<Vec<Complex64>> = match &self.coupling {
            Coupling::Product => {
                let mut acc = vec![ZERO; n];
                for d in &right {
                    acc.iter_mut().zip(d).for_each(|(a, b)| *a += b);
                }
                for i in 0..nl {
                    for j in i..nl {
                        keys.insert((i, j), Vec::new());
                    }
                }
                Some(acc)
            }
            Coupling::Resonant(_) => {
                for g in self.groups_from(side) {
                    for &(a, b) in &g {
                        for &(a2, b2) in &g {
                            if a <= a2 {
                                keys.entry((a, a2)).or_default().push((b, b2));
                            }
                        }
                    }
                }
                None
            }
        };
        for c in keys.values_mut() {
            c.sort_unstable();
        }

        // Distinct multiplier functions W, row-FFT'd and weighted.
        let mut w_index: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
        let mut w_sources: Vec<Vec<(usize, usize)>> = Vec::new();
        for c in keys.values() {
            if !w_index.contains_key(c) {
                w_index.insert(c.clone(), w_sources.len());
                w_sources.push(c.clone());
            }
        }
        let grid = self.transform.grid();
        let (n_lat, n_lon) = (grid.n_lat(), grid.n_lon());
        let q_max = 2 * *left_deg.last().unwrap();
        let n_q = 2 * q_max + 1;
        let lat_w = grid.lat_weights().to_vec();
        let dl = grid.lon_weight();
        let mut planner = rustfft::FftPlanner::new();
        let fft = planner.plan_fft_forward(n_lon);
        let w_hats: Vec<Vec<Complex64>> = w_sources
            .par_iter()
            .map(|src| {
                let mut w = vec![ZERO; n];
                match &product_sum {
                    Some(s) => w.iter_mut().zip(s).for_each(|(w, s)| *w = Complex64::new(s.norm_sqr(), 0.0)),
                    None => {
                        for &(i, j) in src {
                            w.iter_mut()
                                .zip(right[i].iter().zip(&right[j]))
                                .for_each(|(w, (x, y))| *w += x.conj() * y);
                        }
                    }
                }
                for row in w.chunks_mut(n_lon) {
                    fft.process(row);
                }
                // layout [q][i]: lat weight · (2π/n_lon) Σ_j W_ij e^{iqφ_j}
                let mut hat = vec![ZERO; n_q * n_lat];
                for qi in 0..n_q {
                    let q = qi as i64 - q_max as i64;
                    let col = (-q).rem_euclid(n_lon as i64) as usize;
                    for i in 0..n_lat {
                        hat[qi * n_lat + i] = w[i * n_lon + col] * (lat_w[i] * dl);
                    }
                }
                hat
            })
            .collect();

        // Legendre columns per left degree: [m + a][i].
        let table = self.transform.table();
        let legendre: Vec<Vec<f64>> = left_deg
            .iter()
            .map(|&a| {
                let mut p = vec![0.0; (2 * a + 1) * n_lat];
                for (mi, m) in (-(a as i64)..=a as i64).enumerate() {
                    for i in 0..n_lat {
                        p[mi * n_lat + i] = table.get_signed(i, a, m);
                    }
                }
                p
            })
            .collect();

        let weights = self.weights(side);
        let scale = self.scale;
        let blocks: Vec<(usize, usize, usize, Vec<Complex64>)> = keys
            .iter()
            .map(|(&(i, j), src)| {
                let (a, b) = (left_deg[i], left_deg[j]);
                let (ra, rb) = (2 * a + 1, 2 * b + 1);
                let hat = &w_hats[w_index[src]];
                let (pa, pb) = (&legendre[i], &legendre[j]);
                let mut data = vec![ZERO; ra * rb];
                data.par_chunks_mut(rb).enumerate().for_each(|(mi, row)| {
                    let m = mi as i64 - a as i64;
                    let wa = weights[sh_index(a, m)];
                    if wa == 0.0 {
                        return;
                    }
                    let lo = if i == j { mi } else { 0 };
                    let prow = &pa[mi * n_lat..(mi + 1) * n_lat];
                    for (mj, slot) in row.iter_mut().enumerate().skip(lo) {
                        let m2 = mj as i64 - b as i64;
                        let wb = weights[sh_index(b, m2)];
                        if wb == 0.0 {
                            continue;
                        }
                        let qi = (m2 - m + q_max as i64) as usize;
                        let h = &hat[qi * n_lat..(qi + 1) * n_lat];
                        let pcol = &pb[mj * n_lat..(mj + 1) * n_lat];
                        let mut acc = ZERO;
                        for t in 0..n_lat {
                            acc += h[t] * (prow[t] * pcol[t]);
                        }
                        *slot = acc * (scale * wa * wb);
                    }
                });
                if i == j {
                    for r in 0..ra {
                        for c in 0..r {
                            data[r * rb + c] = data[c * rb + r].conj();
                        }
                    }
                }
                (i, j, rb, data)
            })
            .collect();
        Ok(BlockHermitian {
            offsets: self.offsets(side),
            dim: self.band_dim(side),
            blocks,
        })
    }

    /// Highest-weight start on the band degree with the largest multiplier at `m = a`
    /// (ties go to the highest degree).
    fn highest_weight_start(&self, side: Side) -> Vec<Complex64> {
        let w = self.weights(side);
        let deg = self.degrees(side);
        let best = deg
            .iter()
            .enumerate()
            .max_by(|(_, &a), (_, &b)| w[sh_index(a, a as i64)].total_cmp(&w[sh_index(b, b as i64)]).then(a.cmp(&b)))
            .map(|(i, _)| i)
            .unwrap();
        let off = self.offsets(side);
        let a = deg[best];
        let mut x = vec![ZERO; self.band_dim(side)];
        x[off[best] + 2 * a] = Complex64::new(if a % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        x
    }

    fn random_start<R: Rng>(&self, side: Side, rng: &mut R) -> Vec<Complex64> {
        (0..self.band_dim(side))
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect()
    }

    /// Alternating maximization from `(u0, v0)`.
    pub fn alternate(&self, u0: &HarmonicField, v0: &HarmonicField, opts: &ExtremalOptions) -> Result<Extremum> {
        let mut u = self.compact(Side::U, &u0.with_k_max(self.k_max));
        let mut v = self.compact(Side::V, &v0.with_k_max(self.k_max));
        for x in [&mut u, &mut v] {
            let s = norm(x);
            if s == 0.0 {
                return Err(Error::InvalidParams("start field vanishes on the band".into()));
            }
            x.iter_mut().for_each(|c| *c /= s);
        }
        let mut history = Vec::new();
        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut prev = 0.0;
        for _ in 0..opts.max_iters {
            let gu = self.normal_operator(Side::U, &self.expand(Side::V, &v))?;
            let r = power_iteration(&gu, &u, opts.power)?;
            u = r.vector;
            let gv = self.normal_operator(Side::V, &self.expand(Side::U, &u))?;
            let r = power_iteration(&gv, &v, opts.power)?;
            v = r.vector;
            let q = r.eigenvalue.max(0.0).sqrt();
            history.push(q);
            residual = if q > 0.0 { (q - prev).abs() / q } else { 0.0 };
            prev = q;
            if residual < opts.tol {
                converged = true;
                break;
            }
        }
        Ok(Extremum {
            value: prev,
            u: self.expand(Side::U, &u),
            v: self.expand(Side::V, &v),
            rounds: history.len(),
            residual,
            converged,
            history,
        })
    }

    /// Warm start at highest-weight harmonics plus seeded random restarts; best value wins.
    pub fn maximize(&self, opts: &ExtremalOptions) -> Result<Maximum> {
        let mut starts = vec![(self.highest_weight_start(Side::U), self.highest_weight_start(Side::V))];
        for r in 0..opts.random_restarts {
            let mut rng = crate::rng::stream(opts.seed, 1000 + r as u64);
            let u = self.random_start(Side::U, &mut rng);
            let v = self.random_start(Side::V, &mut rng);
            starts.push((u, v));
        }
        let mut best: Option<Extremum> = None;
        let mut start_values = Vec::new();
        for (u, v) in starts {
            let (u, v) = (self.expand(Side::U, &u), self.expand(Side::V, &v));
            let e = match self.alternate(&u, &v, opts) {
                Ok(e) => e,
                // a start can vanish under zero multipliers; skip it
                Err(Error::InvalidParams(_)) => {
                    start_values.push(0.0);
                    continue;
                }
                Err(e) => return Err(e),
            };
            start_values.push(e.value);
            if best.as_ref().is_none_or(|b| e.value > b.value) {
                best = Some(e);
            }
        }
        let best = best.ok_or_else(|| Error::InvalidParams("every start vanished on the band".into()))?;
        Ok(Maximum { best, start_values })
    }
}
