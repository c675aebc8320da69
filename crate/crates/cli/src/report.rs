//! Report artifacts: flat summaries and static log-log plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use spectral_nls::bilinear_estimates::PowerFit;

/// `name=value` metrics, written sorted by name.
#[derive(Debug, Default, Clone)]
pub struct Summary {
    entries: BTreeMap<String, String>,
}

impl Summary {
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    /// Record a float, in exponent form when it is tiny or huge.
    pub fn setf(&mut self, key: impl Into<String>, x: f64) {
        let a = x.abs();
        if a != 0.0 && !(1e-4..1e15).contains(&a) {
            self.set(key, format!("{x:e}"));
        } else {
            self.set(key, x);
        }
    }

    /// Record a fit under `prefix`.
    pub fn fit(&mut self, prefix: &str, fit: &PowerFit) {
        self.setf(format!("{prefix}slope"), fit.slope);
        self.setf(format!("{prefix}prefactor"), fit.intercept.exp());
        self.setf(format!("{prefix}r2"), fit.r2);
    }

    /// Names of `*_pass` entries that are not `true`.
    pub fn failed_checks(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, v)| k.ends_with("_pass") && v.as_str() != "true")
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// One fitted series on a log-log plot.
pub struct Series<'a> {
    pub label: String,
    pub points: &'a [(f64, f64)],
    pub fit: &'a PowerFit,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Static SVG of `log y` against `log x` with each fitted line and, when given,
/// a dashed line of the reference slope through the first series' midpoint.
pub fn loglog_svg(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>], reference: Option<f64>) -> String {
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let d = if hi > lo { 0.08 * (hi - lo) } else { 0.5 };
        (lo - d, hi + d)
    };
    (x0, x1) = pad(x0, x1);
    (y0, y1) = pad(y0, y1);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log {}</text>"#,
        W / 2.0,
        H - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 18 {})">log {}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (i, t) in [(x0, y0), (x1, y1)].iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.3}</text>"#,
            px(t.0),
            H - MARGIN + 14.0,
            t.0.exp()
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{:.3}</text>"#,
            MARGIN - 4.0,
            py(if i == 0 { y0 } else { y1 }),
            t.1.exp()
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for &(x, y) in ser.points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, px(x.ln()), py(y.ln()));
        }
        let line = |x: f64| ser.fit.intercept + ser.fit.slope * x;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            px(x0),
            py(line(x0)),
            px(x1),
            py(line(x1))
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{} fit slope {:.4}</text>"#,
            MARGIN + 8.0,
            MARGIN + 16.0 * (i as f64 + 1.0),
            escape(&ser.label),
            ser.fit.slope
        );
    }
    if let (Some(r), Some(first)) = (reference, series.first()) {
        let pts: Vec<(f64, f64)> = first.points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
        if !pts.is_empty() {
            let xm = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let ym = first.fit.intercept + first.fit.slope * xm;
            let line = |x: f64| ym + r * (x - xm);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
                px(x0),
                py(line(x0)),
                px(x1),
                py(line(x1))
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="gray">reference slope {r}</text>"#,
                MARGIN + 8.0,
                MARGIN + 16.0 * (series.len() as f64 + 1.0)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
