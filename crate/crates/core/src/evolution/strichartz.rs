use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bilinear_estimates::GroupedBilinear;
use crate::harmonic_basis::{gauss_legendre, HarmonicField, SphereGrid, SphereTransform, TorusField, TorusTransform};
use crate::spectral_ops::{SpectrumKind, SpectrumModel};
use crate::{Error, Result};

/// Relative change under doubling the time nodes that flags an under-resolved value.
pub const TIME_RESOLUTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrichartzMethod {
    Quadrature,
    ParsevalExact,
}

/// `‖e^{itΔ}u₀ · e^{itΔ}v₀‖_{L²((0,T)×M)}` with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzSample {
    /// Highest degree (sphere) or lattice half-width (torus) carried by `u₀`.
    pub n: usize,
    /// Same for `v₀`.
    pub l: usize,
    pub t_final: f64,
    pub value: f64,
    pub method: StrichartzMethod,
    /// Time nodes used (0 for the exact sum).
    pub nt: usize,
    pub under_resolved: bool,
}

/// Time rule for `∫_0^T g(t) dt` of a trigonometric polynomial `g`.
#[derive(Debug, Clone)]
struct TimeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TimeRule {
    /// Rectangle rule on `[0, T)`: exact for frequencies below `nt · 2π / T` when `g`
    /// is `T`-periodic.
    fn periodic(t_final: f64, nt: usize) -> Self {
        let h = t_final / nt as f64;
        Self {
            nodes: (0..nt).map(|j| j as f64 * h).collect(),
            weights: vec![h; nt],
        }
    }

    /// Composite 8-point Gauss–Legendre with `ceil(nt / 8)` panels.
    fn panels(t_final: f64, nt: usize) -> Self {
        let (x, w) = gauss_legendre(8);
        let panels = nt.div_ceil(8).max(1);
        let h = t_final / panels as f64;
        let mut nodes = Vec::with_capacity(8 * panels);
        let mut weights = Vec::with_capacity(8 * panels);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * h * (1.0 + xi));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    fn integrate(&self, mut g: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(*t)?;
        }
        Ok(acc)
    }
}

/// Is `t` an integer multiple of `period`?
fn is_multiple(t: f64, period: f64) -> bool {
    let r = t / period;
    r >= 0.5 && (r - r.round()).abs() < 1e-12
}

struct Rules {
    base: TimeRule,
    doubled: TimeRule,
    nt: usize,
}

/// Default rules: exact periodic rectangle rule with twice the Nyquist count when `T`
/// covers whole periods, else Gauss–Legendre panels with `8 ω T / 2π` nodes.
fn rules(t_final: f64, omega: f64, period: Option<f64>, nt: Option<usize>) -> Rules {
    let cycles = omega * t_final / (2.0 * PI);
    match period {
        Some(p) if is_multiple(t_final, p) => {
            let nt = nt.unwrap_or(2 * (cycles.floor() as usize + 1)).max(2);
            Rules {
                base: TimeRule::periodic(t_final, nt),
                doubled: TimeRule::periodic(t_final, 2 * nt),
                nt,
            }
        }
        _ => {
            let nt = nt.unwrap_or((8.0 * cycles).ceil() as usize).max(16);
            let base = TimeRule::panels(t_final, nt);
            let nt = base.nodes.len();
            Rules {
                base,
                doubled: TimeRule::panels(t_final, 2 * nt),
                nt,
            }
        }
    }
}

/// Per-degree grid samples and a single eigenvalue per degree.
fn degree_components(
    f: &HarmonicField,
    t: &SphereTransform,
    spec: &SpectrumModel,
) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let mu = spec.sphere_modes(f.k_max())?;
    let mut out = Vec::new();
    for k in 0..=f.k_max() {
        if f.degree_norm_sqr(k) == 0.0 {
            continue;
        }
        let block = &mu[k * k..(k + 1) * (k + 1)];
        if block.iter().any(|&m| m != block[0]) {
            return Err(Error::InvalidParams(
                "time quadrature needs one eigenvalue per degree".into(),
            ));
        }
        let mut g = HarmonicField::zeros(f.k_max());
        g.degree_mut(k).copy_from_slice(f.degree(k));
        out.push((block[0], t.synthesize(&g)?));
    }
    Ok(out)
}

fn evolve_sum(comps: &[(f64, Vec<Complex64>)], t: f64, out: &mut [Complex64]) {
    out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for (mu, vals) in comps {
        let p = Complex64::from_polar(1.0, -mu * t);
        out.iter_mut().zip(vals).for_each(|(o, v)| *o += v * p);
    }
}

/// Time-and-space quadrature of the bilinear Schrödinger product on the sphere
/// (exact or clustered-and-rounded spectra).
pub fn bilinear_strichartz(
    u0: &HarmonicField,
    v0: &HarmonicField,
    t_final: f64,
    nt: Option<usize>,
    spec: &SpectrumModel,
) -> Result<StrichartzSample> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParams(format!("final time must be positive, got {t_final}")));
    }
    let (du, dv) = (u0.effective_degree(), v0.effective_degree());
    let k = u0.k_max().max(v0.k_max());
    let t = SphereTransform::new(SphereGrid::exact_for_degree(2 * (du + dv))?, k);
    let cu = degree_components(u0, &t, spec)?;
    let cv = degree_components(v0, &t, spec)?;
    let taus: Vec<f64> = cu.iter().flat_map(|a| cv.iter().map(move |b| a.0 + b.0)).collect();
    let omega = taus.iter().cloned().fold(f64::MIN, f64::max) - taus.iter().cloned().fold(f64::MAX, f64::min);
    let omega = if omega.is_finite() { omega } else { 0.0 };
    // k(k+1) is even, so the integrand has period π on the exact sphere
    let period = (spec.kind() == SpectrumKind::SphereExact).then_some(PI);
    let r = rules(t_final, omega, period, nt);
    let n = t.grid().len();
    let (mut a, mut b) = (vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]);
    let mut eval = |rule: &TimeRule| -> Result<f64> {
        rule.integrate(|time| {
            evolve_sum(&cu, time, &mut a);
            evolve_sum(&cv, time, &mut b);
            a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
            Ok(t.quadrature_norm_sqr(&a))
        })
    };
    let v1 = eval(&r.base)?.max(0.0).sqrt();
    let v2 = eval(&r.doubled)?.max(0.0).sqrt();
    let under = v2 > 0.0 && (v1 - v2).abs() / v2 > TIME_RESOLUTION_TOL;
    Ok(StrichartzSample {
        n: du,
        l: dv,
        t_final,
        value: v1,
        method: StrichartzMethod::Quadrature,
        nt: r.nt,
        under_resolved: under,
    })
}

/// `(Σ_τ ‖Σ_{k(k+1)+l(l+1)=τ} P_k u₀ P_l v₀‖²)^{1/2}` times `(2π)^{1/2}`: the exact value
/// over `[0, 2π]` on the round sphere.
pub fn strichartz_parseval_sphere(u0: &HarmonicField, v0: &HarmonicField) -> Result<StrichartzSample> {
    let support = |f: &HarmonicField| (0..=f.k_max()).filter(|&k| f.degree_norm_sqr(k) > 0.0).collect::<Vec<_>>();
    let (su, sv) = (support(u0), support(v0));
    let (n, l) = (u0.effective_degree(), v0.effective_degree());
    let value = if su.is_empty() || sv.is_empty() {
        0.0
    } else {
        GroupedBilinear::sphere_strichartz(su, sv)?.value(u0, v0)?
    };
    Ok(StrichartzSample {
        n,
        l,
        t_final: 2.0 * PI,
        value,
        method: StrichartzMethod::ParsevalExact,
        nt: 0,
        under_resolved: false,
    })
}

/// Time-and-space quadrature of the bilinear product on the unit torus with phases
/// `e^{2πit|n|²}` (integrand period 1).
pub fn bilinear_strichartz_torus(u0: &TorusField, v0: &TorusField, t_final: f64, nt: Option<usize>) -> Result<StrichartzSample> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParams(format!("final time must be positive, got {t_final}")));
    }
    let tr = TorusTransform::new(2 * (u0.half_width() + v0.half_width()) + 2)?;
    let active = |f: &TorusField| -> Vec<(usize, i64)> {
        f.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, _)| {
                let (n1, n2) = f.lattice_point(i);
                (i, n1 * n1 + n2 * n2)
            })
            .collect()
    };
    let (au, av) = (active(u0), active(v0));
    let sq: Vec<i64> = au.iter().flat_map(|x| av.iter().map(move |y| x.1 + y.1)).collect();
    let omega = 2.0 * PI * (sq.iter().max().unwrap_or(&0) - sq.iter().min().unwrap_or(&0)) as f64;
    let r = rules(t_final, omega, Some(1.0), nt);
    let evolve = |f: &TorusField, list: &[(usize, i64)], time: f64| -> Vec<Complex64> {
        let mut g = f.clone();
        for &(i, s) in list {
            // e^{2πi t s} with the angle reduced through the fractional part of t s
            let turns = time * s as f64;
            g.coeffs_mut()[i] *= Complex64::from_polar(1.0, 2.0 * PI * (turns - turns.round()));
        }
        tr.synthesize(&g)
    };
    let eval = |rule: &TimeRule| -> Result<f64> {
        rule.integrate(|time| {
            let mut x = evolve(u0, &au, time);
            let y = evolve(v0, &av, time);
            x.iter_mut().zip(&y).for_each(|(p, q)| *p *= q);
            Ok(tr.quadrature_norm_sqr(&x))
        })
    };
    let v1 = eval(&r.base)?.max(0.0).sqrt();
    let v2 = eval(&r.doubled)?.max(0.0).sqrt();
    Ok(StrichartzSample {
        n: u0.half_width(),
        l: v0.half_width(),
        t_final,
        value: v1,
        method: StrichartzMethod::Quadrature,
        nt: r.nt,
        under_resolved: v2 > 0.0 && (v1 - v2).abs() / v2 > TIME_RESOLUTION_TOL,
    })
}
