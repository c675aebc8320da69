use std::fmt::Write as _;

use rand::Rng;

use crate::harmonic_basis::{sh_index, sh_len};
use crate::{Error, Result};

/// Which eigenvalue map a [`SpectrumModel`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Round sphere: `μ = k(k+1)` on degree `k`.
    SphereExact,
    /// Unit flat torus with propagator phases `e^{2πi t |n|²}`: `μ = 2π|n|²`.
    TorusExact,
    /// Clustered spectrum with eigenvalues drawn in `I_k`.
    SyntheticZoll,
    /// Every cluster collapsed onto its center `(k + α/4)²`.
    Rounded,
}

/// Parameters of a clustered spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZollParams {
    pub alpha: u32,
    /// Cluster half-width `E`.
    pub half_width: f64,
    pub k_max: usize,
    pub seed: u64,
}

impl ZollParams {
    pub fn center(&self, k: usize) -> f64 {
        let c = k as f64 + self.alpha as f64 / 4.0;
        c * c
    }

    /// First cluster index from which consecutive clusters are disjoint.
    pub fn separation_index(&self) -> usize {
        // gap between consecutive centers is 2k + 1 + α/2
        let need = 2.0 * self.half_width - 1.0 - self.alpha as f64 / 2.0;
        if need < 0.0 {
            0
        } else {
            (need / 2.0).floor() as usize + 1
        }
    }
}

/// Eigenvalue map `(k, m) ↦ μ` for the Laplacian on the supported geometries.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel {
    kind: SpectrumKind,
    zoll: Option<ZollParams>,
    /// Per-mode eigenvalues in spherical-harmonic index order (clustered kinds only).
    modes: Vec<f64>,
}

impl SpectrumModel {
    pub fn sphere_exact() -> Self {
        Self {
            kind: SpectrumKind::SphereExact,
            zoll: None,
            modes: Vec::new(),
        }
    }

    pub fn torus_exact() -> Self {
        Self {
            kind: SpectrumKind::TorusExact,
            zoll: None,
            modes: Vec::new(),
        }
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn zoll_params(&self) -> Option<&ZollParams> {
        self.zoll.as_ref()
    }

    /// Largest degree with tabulated eigenvalues; `None` when unbounded.
    pub fn k_max(&self) -> Option<usize> {
        self.zoll.map(|z| z.k_max)
    }

    pub fn is_spherical(&self) -> bool {
        self.kind != SpectrumKind::TorusExact
    }

    /// Cluster center: `k(k+1)` on the sphere, `(k + α/4)²` for clustered spectra.
    pub fn cluster_center(&self, k: usize) -> f64 {
        match &self.zoll {
            Some(z) => z.center(k),
            None => (k * (k + 1)) as f64,
        }
    }

    /// Eigenvalue attached to the spherical mode `(k, m)`.
    pub fn eigenvalue(&self, k: usize, m: i64) -> Result<f64> {
        match self.kind {
            SpectrumKind::SphereExact => Ok((k * (k + 1)) as f64),
            SpectrumKind::TorusExact => Err(Error::InvalidParams(
                "torus spectrum has no spherical-harmonic modes".into(),
            )),
            SpectrumKind::SyntheticZoll | SpectrumKind::Rounded => {
                let k_max = self.zoll.map(|z| z.k_max).unwrap_or(0);
                if k > k_max {
                    return Err(Error::InvalidParams(format!(
                        "degree {k} beyond tabulated spectrum (k_max = {k_max})"
                    )));
                }
                Ok(self.modes[sh_index(k, m)])
            }
        }
    }

    /// Eigenvalues of all spherical modes up to `k_max`, in coefficient order.
    pub fn sphere_modes(&self, k_max: usize) -> Result<Vec<f64>> {
        match self.kind {
            SpectrumKind::SphereExact => Ok((0..=k_max)
                .flat_map(|k| std::iter::repeat_n((k * (k + 1)) as f64, 2 * k + 1))
                .collect()),
            SpectrumKind::TorusExact => self.eigenvalue(0, 0).map(|_| Vec::new()),
            _ => {
                let have = self.zoll.map(|z| z.k_max).unwrap_or(0);
                if k_max > have {
                    return Err(Error::InvalidParams(format!(
                        "band limit {k_max} beyond tabulated spectrum (k_max = {have})"
                    )));
                }
                Ok(self.modes[..sh_len(k_max)].to_vec())
            }
        }
    }

    /// Eigenvalues of cluster `k`, ordered by `m = -k..=k`.
    pub fn cluster(&self, k: usize) -> Result<Vec<f64>> {
        (-(k as i64)..=k as i64).map(|m| self.eigenvalue(k, m)).collect()
    }

    pub fn torus_eigenvalue(n1: i64, n2: i64) -> f64 {
        2.0 * std::f64::consts::PI * (n1 * n1 + n2 * n2) as f64
    }

    /// Plain-text form: a `#` header line then one `k m mu` line per mode.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match (&self.kind, &self.zoll) {
            (SpectrumKind::SphereExact, _) => out.push_str("#sphere\n"),
            (SpectrumKind::TorusExact, _) => out.push_str("#torus\n"),
            (kind, Some(z)) => {
                let _ = writeln!(out, "#zoll alpha={} E={} seed={}", z.alpha, z.half_width, z.seed);
                if *kind == SpectrumKind::Rounded {
                    out.push_str("#rounded\n");
                }
                for k in 0..=z.k_max {
                    for m in -(k as i64)..=k as i64 {
                        let _ = writeln!(out, "{k} {m} {}", self.modes[sh_index(k, m)]);
                    }
                }
            }
            (_, None) => unreachable!("clustered spectra always carry parameters"),
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty spectrum file".into(),
        })?;
        let header = header.trim();
        if header == "#sphere" {
            return Ok(Self::sphere_exact());
        }
        if header == "#torus" {
            return Ok(Self::torus_exact());
        }
        let rest = header.strip_prefix("#zoll").ok_or(Error::Parse {
            line: 1,
            msg: format!("unknown header `{header}`"),
        })?;
        let (mut alpha, mut e, mut seed) = (None, None, None);
        for kv in rest.split_whitespace() {
            let (key, val) = kv.split_once('=').ok_or(Error::Parse {
                line: 1,
                msg: format!("expected key=value, got `{kv}`"),
            })?;
            let bad = |_| Error::Parse {
                line: 1,
                msg: format!("bad value for {key}"),
            };
            match key {
                "alpha" => alpha = Some(val.parse::<u32>().map_err(|e| bad(e.to_string()))?),
                "E" => e = Some(val.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "seed" => seed = Some(val.parse::<u64>().map_err(|e| bad(e.to_string()))?),
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 1,
            msg: format!("header lacks {what}"),
        };
        let alpha = alpha.ok_or_else(|| missing("alpha"))?;
        let half_width = e.ok_or_else(|| missing("E"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;
        let mut kind = SpectrumKind::SyntheticZoll;
        let mut entries: Vec<(usize, i64, f64)> = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line == "#rounded" {
                kind = SpectrumKind::Rounded;
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut it = line.split_whitespace();
            let k = it.next().and_then(|v| v.parse::<usize>().ok()).ok_or_else(|| err("bad degree"))?;
            let m = it.next().and_then(|v| v.parse::<i64>().ok()).ok_or_else(|| err("bad order"))?;
            let mu = it.next().and_then(|v| v.parse::<f64>().ok()).ok_or_else(|| err("bad eigenvalue"))?;
            if it.next().is_some() || m.unsigned_abs() as usize > k {
                return Err(err("malformed mode line"));
            }
            entries.push((k, m, mu));
        }
        let k_max = entries.iter().map(|e| e.0).max().unwrap_or(0);
        if entries.len() != sh_len(k_max) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {} modes, found {}", sh_len(k_max), entries.len()),
            });
        }
        let mut modes = vec![f64::NAN; sh_len(k_max)];
        for (k, m, mu) in entries {
            modes[sh_index(k, m)] = mu;
        }
        if modes.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse {
                line: 0,
                msg: "duplicate mode lines".into(),
            });
        }
        Ok(Self {
            kind,
            zoll: Some(ZollParams {
                alpha,
                half_width,
                k_max,
                seed,
            }),
            modes,
        })
    }
}

/// Clustered spectrum: cluster `k` holds `2k+1` eigenvalues drawn uniformly from
/// `[(k+α/4)² − E, (k+α/4)² + E]`, clipped at zero.
pub fn make_zoll_spectrum(alpha: u32, half_width: f64, k_max: usize, seed: u64) -> Result<SpectrumModel> {
    if !(half_width >= 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidParams(format!("cluster half-width must be finite and nonnegative, got {half_width}")));
    }
    let params = ZollParams {
        alpha,
        half_width,
        k_max,
        seed,
    };
    let k0 = params.separation_index();
    if k0 > k_max {
        return Err(Error::InvalidParams(format!(
            "clusters with alpha={alpha}, E={half_width} only separate from k={k0}, beyond k_max={k_max}"
        )));
    }
    let mut rng = crate::rng::stream(seed, 0x5a11);
    let mut modes = Vec::with_capacity(sh_len(k_max));
    for k in 0..=k_max {
        let c = params.center(k);
        for _ in 0..(2 * k + 1) {
            let v = if half_width > 0.0 {
                c + rng.random_range(-half_width..=half_width)
            } else {
                c
            };
            modes.push(v.max(0.0));
        }
    }
    Ok(SpectrumModel {
        kind: SpectrumKind::SyntheticZoll,
        zoll: Some(params),
        modes,
    })
}

/// Replace every clustered eigenvalue by its cluster center.
pub fn round_spectrum(spec: &SpectrumModel) -> Result<SpectrumModel> {
    let z = match (spec.kind, spec.zoll) {
        (SpectrumKind::SyntheticZoll | SpectrumKind::Rounded, Some(z)) => z,
        _ => {
            return Err(Error::InvalidParams(
                "only clustered spectra can be rounded".into(),
            ))
        }
    };
    let modes = (0..=z.k_max)
        .flat_map(|k| std::iter::repeat_n(z.center(k), 2 * k + 1))
        .collect();
    Ok(SpectrumModel {
        kind: SpectrumKind::Rounded,
        zoll: Some(z),
        modes,
    })
}
