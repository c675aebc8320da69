//! Trajectory dumps and spectral snapshots.
//!
//! A dump is a block of `# key=value` parameter lines followed by the CSV header
//! `t,mass,energy,hs_norm` and one row per sample. A snapshot is the spectrum text format
//! followed by `#field k_max=K` and one `k m re im` line per coefficient.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::nls::ConservationReport;
use crate::harmonic_basis::{sh_index, HarmonicField};
use crate::spectral_ops::SpectrumModel;
use crate::{Error, Result};

pub const TRAJECTORY_CSV_HEADER: &str = "t,mass,energy,hs_norm";

pub fn write_trajectory<W: Write>(out: &mut W, params: &[(&str, String)], report: &ConservationReport) -> Result<()> {
    let mut s = String::new();
    for (k, v) in params {
        let _ = writeln!(s, "# {k}={v}");
    }
    let _ = writeln!(s, "{TRAJECTORY_CSV_HEADER}");
    for i in 0..report.times.len() {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e}",
            report.times[i], report.mass[i], report.energy[i], report.hs_norm[i]
        );
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Parameters and `(t, mass, energy, hs_norm)` rows of a dump.
pub type TrajectoryDump = (Vec<(String, String)>, Vec<[f64; 4]>);

pub fn read_trajectory<R: BufRead>(input: R) -> Result<TrajectoryDump> {
    let mut params = Vec::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(kv) = line.strip_prefix('#') {
            let (k, v) = kv.trim().split_once('=').ok_or_else(|| err(format!("expected key=value, got `{kv}`")))?;
            params.push((k.trim().to_string(), v.trim().to_string()));
        } else if !seen_header {
            if line != TRAJECTORY_CSV_HEADER {
                return Err(err(format!("expected `{TRAJECTORY_CSV_HEADER}`")));
            }
            seen_header = true;
        } else {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(e.to_string()))?;
            let row: [f64; 4] = vals.try_into().map_err(|_| err("expected 4 columns".into()))?;
            rows.push(row);
        }
    }
    if !seen_header {
        return Err(Error::Parse {
            line: 0,
            msg: "missing column header".into(),
        });
    }
    Ok((params, rows))
}

pub fn snapshot_to_text(field: &HarmonicField, spec: &SpectrumModel) -> String {
    let mut s = spec.to_text();
    let _ = writeln!(s, "#field k_max={}", field.k_max());
    for k in 0..=field.k_max() {
        for m in -(k as i64)..=k as i64 {
            let c = field.get(k, m);
            let _ = writeln!(s, "{k} {m} {:e} {:e}", c.re, c.im);
        }
    }
    s
}

pub fn snapshot_from_text(text: &str) -> Result<(HarmonicField, SpectrumModel)> {
    let split = text
        .lines()
        .position(|l| l.trim_start().starts_with("#field"))
        .ok_or(Error::Parse {
            line: 0,
            msg: "missing #field marker".into(),
        })?;
    let lines: Vec<&str> = text.lines().collect();
    let spec = SpectrumModel::from_text(&lines[..split].join("\n"))?;
    let marker = lines[split].trim();
    let k_max = marker
        .strip_prefix("#field")
        .and_then(|r| r.trim().strip_prefix("k_max="))
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or(Error::Parse {
            line: split + 1,
            msg: format!("bad marker `{marker}`"),
        })?;
    let mut field = HarmonicField::zeros(k_max);
    let mut seen = vec![false; field.coeffs().len()];
    for (i, line) in lines.iter().enumerate().skip(split + 1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(err("expected `k m re im`"));
        }
        let k: usize = t[0].parse().map_err(|_| err("bad degree"))?;
        let m: i64 = t[1].parse().map_err(|_| err("bad order"))?;
        let re: f64 = t[2].parse().map_err(|_| err("bad real part"))?;
        let im: f64 = t[3].parse().map_err(|_| err("bad imaginary part"))?;
        if k > k_max || m.unsigned_abs() as usize > k {
            return Err(err("mode outside the band limit"));
        }
        let idx = sh_index(k, m);
        if seen[idx] {
            return Err(err("duplicate mode"));
        }
        seen[idx] = true;
        field.set(k, m, Complex64::new(re, im));
    }
    Ok((field, spec))
}
