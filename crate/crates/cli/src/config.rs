//! Experiment configuration: one TOML file per invocation, one section per experiment.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BilinearScan,
    SoggeScan,
    LatticeScan,
    StrichartzScan,
    Evolve,
    XsbCheck,
    StabilityProbe,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::BilinearScan => "bilinear-scan",
            Self::SoggeScan => "sogge-scan",
            Self::LatticeScan => "lattice-scan",
            Self::StrichartzScan => "strichartz-scan",
            Self::Evolve => "evolve",
            Self::XsbCheck => "xsb-check",
            Self::StabilityProbe => "stability-probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    #[default]
    Sphere,
    Torus,
    Zoll,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sphere => "sphere",
            Self::Torus => "torus",
            Self::Zoll => "zoll",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Collocation,
    Rotation,
}

/// Synthetic Zoll spectrum used when `geometry = "zoll"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct ZollSection {
    pub alpha: u32,
    pub half_width: f64,
    /// Draws of the cluster eigenvalues; the run seed is used when absent.
    pub seed: Option<u64>,
    /// Use the rounded (degree-wise constant) spectrum instead of the raw draws.
    pub rounded: bool,
}

impl Default for ZollSection {
    fn default() -> Self {
        Self {
            alpha: 1,
            half_width: 0.5,
            seed: None,
            rounded: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct BilinearSection {
    /// Degrees `n` of the first band.
    pub degrees: Vec<usize>,
    /// Second band at degree `ratio · n` for each ratio.
    pub ratios: Vec<usize>,
    pub restarts: usize,
}

impl Default for BilinearSection {
    fn default() -> Self {
        Self {
            degrees: vec![8, 16, 32, 64],
            ratios: vec![1],
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct SoggeSection {
    pub degrees: Vec<usize>,
    pub p: f64,
}

impl Default for SoggeSection {
    fn default() -> Self {
        Self {
            degrees: vec![8, 16, 32, 64, 128],
            p: 4.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct LatticeSection {
    /// Dyadic sizes `N = L` for the sphere α counts.
    pub sizes: Vec<u64>,
    /// Half-widths `A` for the torus supremum counts.
    pub half_widths: Vec<i64>,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            sizes: (1..=10).map(|e| 1u64 << e).collect(),
            half_widths: vec![4, 8, 16, 32, 64],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct StrichartzSection {
    /// Band parameters `N`; defaults depend on the geometry.
    pub n_values: Option<Vec<usize>>,
    /// `L = ratio · N`.
    pub ratio: usize,
    /// Random restarts; defaults depend on the geometry.
    pub restarts: Option<usize>,
}

impl Default for StrichartzSection {
    fn default() -> Self {
        Self {
            n_values: None,
            ratio: 4,
            restarts: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct EvolveSection {
    pub k_max: usize,
    /// L² norm of the random initial datum.
    pub amplitude: f64,
    pub t_final: f64,
    pub dt: f64,
    pub stride: usize,
    pub s: f64,
    pub scheme: Scheme,
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            k_max: 16,
            amplitude: 2.0,
            t_final: 1.0,
            dt: 1e-3,
            stride: 10,
            s: 1.0,
            scheme: Scheme::Collocation,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct XsbSection {
    pub trajectories: usize,
    pub k_max: usize,
    pub n_t: usize,
    /// Window length; `2π` keeps integer spectra periodic over it.
    pub t_win: f64,
    pub b_l4: f64,
    pub b_linf: f64,
    /// Regularity pair of the Zoll equivalence check.
    pub s: f64,
    pub b: f64,
    pub equivalence_trials: usize,
}

impl Default for XsbSection {
    fn default() -> Self {
        Self {
            trajectories: 50,
            k_max: 8,
            n_t: 1024,
            t_win: 2.0 * std::f64::consts::PI,
            b_l4: 0.4,
            b_linf: 0.6,
            s: 0.0,
            b: 0.6,
            equivalence_trials: 50,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct ProbeSection {
    pub degrees: Vec<usize>,
    pub s: f64,
    pub amplitude: f64,
    pub delta: f64,
    pub t_final: f64,
    pub dt: f64,
    /// Extra degrees kept above `n`.
    pub padding: usize,
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            degrees: vec![8, 16, 32, 64],
            s: 0.2,
            amplitude: 1.0,
            delta: 0.01,
            t_final: 0.5,
            dt: 1e-3,
            padding: 8,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub zoll: ZollSection,
    #[serde(default)]
    pub bilinear_scan: BilinearSection,
    #[serde(default)]
    pub sogge_scan: SoggeSection,
    #[serde(default)]
    pub lattice_scan: LatticeSection,
    #[serde(default)]
    pub strichartz_scan: StrichartzSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub xsb_check: XsbSection,
    #[serde(default)]
    pub stability_probe: ProbeSection,
}

/// A rejected configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.msg)
    }
}

impl std::error::Error for ConfigError {}

fn reject(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(reject(field, format!("must be a positive finite number, got {v}")))
    }
}

fn non_empty<T>(field: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        Err(reject(field, "must not be empty"))
    } else {
        Ok(())
    }
}

fn at_least<T: PartialOrd + Copy + fmt::Display>(field: &str, v: &[T], lo: T) -> Result<(), ConfigError> {
    match v.iter().find(|&&x| x < lo) {
        Some(x) => Err(reject(field, format!("entries must be at least {lo}, got {x}"))),
        None => Ok(()),
    }
}

fn fit_points(field: &str, n: usize) -> Result<(), ConfigError> {
    if n < 4 {
        Err(reject(field, format!("a slope fit needs at least 4 entries, got {n}")))
    } else {
        Ok(())
    }
}

fn geometries(field: &str, g: Geometry, allowed: &[Geometry]) -> Result<(), ConfigError> {
    if allowed.contains(&g) {
        Ok(())
    } else {
        let names: Vec<String> = allowed.iter().map(|a| a.to_string()).collect();
        Err(reject(field, format!("`{g}` is not supported here; use one of {}", names.join(", "))))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = e
                .span()
                .and_then(|sp| text.get(sp))
                .map(|s| s.trim().to_string())
                .unwrap_or_else(|| "config".into());
            reject(&field, msg)
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| reject("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Check every parameter the selected experiment will use.
    pub fn validate(&self) -> Result<(), ConfigError> {
        use Geometry::*;
        if self.geometry == Zoll {
            let z = &self.zoll;
            if !(1..=3).contains(&z.alpha) {
                return Err(reject("zoll.alpha", format!("must be 1, 2 or 3, got {}", z.alpha)));
            }
            if !(z.half_width >= 0.0 && z.half_width < 1.0) {
                return Err(reject("zoll.half-width", format!("must lie in [0, 1), got {}", z.half_width)));
            }
        }
        match self.experiment {
            Experiment::BilinearScan => {
                let c = &self.bilinear_scan;
                geometries("geometry", self.geometry, &[Sphere, Zoll])?;
                non_empty("bilinear-scan.degrees", &c.degrees)?;
                at_least("bilinear-scan.degrees", &c.degrees, 1)?;
                non_empty("bilinear-scan.ratios", &c.ratios)?;
                at_least("bilinear-scan.ratios", &c.ratios, 1)?;
                fit_points("bilinear-scan.degrees", c.degrees.len())?;
                let top = c.degrees.iter().max().unwrap() * c.ratios.iter().max().unwrap();
                if top > 512 {
                    return Err(reject("bilinear-scan.degrees", format!("largest band degree {top} exceeds 512")));
                }
            }
            Experiment::SoggeScan => {
                let c = &self.sogge_scan;
                geometries("geometry", self.geometry, &[Sphere])?;
                non_empty("sogge-scan.degrees", &c.degrees)?;
                at_least("sogge-scan.degrees", &c.degrees, 1)?;
                if !(c.p >= 2.0) {
                    return Err(reject("sogge-scan.p", format!("must be at least 2, got {}", c.p)));
                }
                fit_points("sogge-scan.degrees", c.degrees.len())?;
            }
            Experiment::LatticeScan => {
                let c = &self.lattice_scan;
                geometries("geometry", self.geometry, &[Sphere, Torus])?;
                if self.geometry == Sphere {
                    non_empty("lattice-scan.sizes", &c.sizes)?;
                    at_least("lattice-scan.sizes", &c.sizes, 1)?;
                    fit_points("lattice-scan.sizes", c.sizes.len())?;
                } else {
                    non_empty("lattice-scan.half-widths", &c.half_widths)?;
                    at_least("lattice-scan.half-widths", &c.half_widths, 1)?;
                    fit_points("lattice-scan.half-widths", c.half_widths.len())?;
                }
            }
            Experiment::StrichartzScan => {
                let c = &self.strichartz_scan;
                geometries("geometry", self.geometry, &[Sphere, Torus])?;
                if let Some(ns) = &c.n_values {
                    fit_points("strichartz-scan.n-values", ns.len())?;
                    at_least("strichartz-scan.n-values", ns, 1)?;
                }
                if c.ratio < 1 {
                    return Err(reject("strichartz-scan.ratio", "must be at least 1"));
                }
            }
            Experiment::Evolve => {
                let c = &self.evolve;
                geometries("geometry", self.geometry, &[Sphere, Zoll])?;
                positive("evolve.dt", c.dt)?;
                positive("evolve.t-final", c.t_final)?;
                if !(c.amplitude >= 0.0 && c.amplitude.is_finite()) {
                    return Err(reject("evolve.amplitude", format!("must be non-negative, got {}", c.amplitude)));
                }
                if c.stride == 0 {
                    return Err(reject("evolve.stride", "must be at least 1"));
                }
                let steps = (c.t_final / c.dt).round().max(1.0) as usize;
                if steps % c.stride != 0 {
                    return Err(reject("evolve.stride", format!("must divide the {steps} time steps")));
                }
                if c.k_max > 128 {
                    return Err(reject("evolve.k-max", format!("at most 128, got {}", c.k_max)));
                }
            }
            Experiment::XsbCheck => {
                let c = &self.xsb_check;
                geometries("geometry", self.geometry, &[Sphere, Zoll])?;
                if c.trajectories == 0 {
                    return Err(reject("xsb-check.trajectories", "must be at least 1"));
                }
                if c.n_t < 4 || c.n_t % 2 != 0 {
                    return Err(reject("xsb-check.n-t", format!("must be an even number ≥ 4, got {}", c.n_t)));
                }
                positive("xsb-check.t-win", c.t_win)?;
                for (f, v) in [("xsb-check.b-l4", c.b_l4), ("xsb-check.b-linf", c.b_linf)] {
                    positive(f, v)?;
                }
                if c.b_l4 <= 0.25 {
                    return Err(reject("xsb-check.b-l4", "the L⁴ embedding needs b > 1/4"));
                }
                if c.b_linf <= 0.5 {
                    return Err(reject("xsb-check.b-linf", "the L^∞ embedding needs b > 1/2"));
                }
            }
            Experiment::StabilityProbe => {
                let c = &self.stability_probe;
                geometries("geometry", self.geometry, &[Sphere])?;
                non_empty("stability-probe.degrees", &c.degrees)?;
                if let Some(k) = c.degrees.iter().find(|&&k| k + c.padding > 128) {
                    return Err(reject("stability-probe.degrees", format!("degree {k} plus padding exceeds 128")));
                }
                at_least("stability-probe.degrees", &c.degrees, 1)?;
                positive("stability-probe.dt", c.dt)?;
                positive("stability-probe.t-final", c.t_final)?;
                if !(c.delta >= 0.0 && c.amplitude >= 0.0) {
                    return Err(reject("stability-probe.delta", "amplitude and delta must be non-negative"));
                }
                if c.amplitude > 0.0 && c.delta >= c.amplitude {
                    return Err(reject("stability-probe.delta", "must be smaller than the amplitude"));
                }
            }
        }
        Ok(())
    }

    /// Shrink the scan grids roughly fourfold.
    pub fn quick(&mut self) {
        fn shrink(v: &mut Vec<usize>) {
            let mut out: Vec<usize> = v.iter().map(|&x| (x / 4).max(1)).collect();
            out.dedup();
            *v = out;
        }
        shrink(&mut self.bilinear_scan.degrees);
        shrink(&mut self.sogge_scan.degrees);
        shrink(&mut self.stability_probe.degrees);
        let s = &mut self.lattice_scan.sizes;
        s.truncate(s.len().saturating_sub(2).max(4));
        let a = &mut self.lattice_scan.half_widths;
        a.truncate(a.len().saturating_sub(2).max(4));
        let st = &mut self.strichartz_scan;
        let ns = st.n_values.get_or_insert_with(|| match self.geometry {
            Geometry::Torus => vec![1, 2, 3, 4],
            _ => vec![2, 3, 4, 6],
        });
        ns.truncate(4);
        st.restarts = Some(st.restarts.unwrap_or(0).min(1));
        let x = &mut self.xsb_check;
        x.trajectories = x.trajectories.div_ceil(4);
        x.equivalence_trials = x.equivalence_trials.div_ceil(4);
        let e = &mut self.evolve;
        e.k_max = (e.k_max / 2).max(2);
        self.stability_probe.t_final *= 0.25;
    }
}
