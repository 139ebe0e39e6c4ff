// SPDX-License-Identifier: Apache-2.0

//! Minimal SVG line plots, built from the written CSV bytes only.

use std::fmt::Write;

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct PlotSpec {
    /// CSV file stem the plot reads.
    pub table: String,
    pub x: String,
    pub ys: Vec<String>,
    pub log: bool,
    pub title: String,
}

impl PlotSpec {
    pub fn log_log(table: &str, x: &str, ys: &[&str], title: impl Into<String>) -> Self {
        Self { table: table.into(), x: x.into(), ys: ys.iter().map(|s| s.to_string()).collect(), log: true, title: title.into() }
    }

    pub fn linear(table: &str, x: &str, ys: &[&str], title: impl Into<String>) -> Self {
        Self { log: false, ..Self::log_log(table, x, ys, title) }
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}.svg", self.table, self.ys.join("_"))
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 60.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

fn column(rdr: &[csv::StringRecord], headers: &csv::StringRecord, name: &str) -> Result<Vec<f64>, CliError> {
    let idx = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Io(format!("plot column `{name}` missing")))?;
    rdr.iter()
        .map(|r| r[idx].parse::<f64>().map_err(|e| CliError::Io(format!("column `{name}`: {e}"))))
        .collect()
}

pub fn render(spec: &PlotSpec, csv_bytes: &[u8]) -> Result<String, CliError> {
    let mut rdr = csv::Reader::from_reader(csv_bytes);
    let headers = rdr.headers().map_err(|e| CliError::Io(e.to_string()))?.clone();
    let records: Vec<csv::StringRecord> = rdr.records().collect::<Result<_, _>>().map_err(|e| CliError::Io(e.to_string()))?;
    let xs = column(&records, &headers, &spec.x)?;
    let tf = |v: f64| if spec.log { v.log10() } else { v };
    let keep = |v: f64| !spec.log || v > 0.0;

    let mut series = Vec::new();
    for name in &spec.ys {
        let ys = column(&records, &headers, name)?;
        let pts: Vec<(f64, f64)> =
            xs.iter().zip(&ys).filter(|(x, y)| keep(**x) && keep(**y)).map(|(x, y)| (tf(*x), tf(*y))).collect();
        series.push((name.clone(), pts));
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, escape(&spec.title));
    let _ = writeln!(
        s,
        r#"<path d="M{M} {M} L{M} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        b = H - M,
        r = W - M
    );
    let label = |v: f64| if spec.log { format!("1e{v:.1}") } else { format!("{v:.3e}") };
    for (v, anchor_x, anchor_y, anchor) in [
        (x0, px(x0), H - M + 16.0, "start"),
        (x1, px(x1), H - M + 16.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{anchor_x:.1}" y="{anchor_y:.1}" text-anchor="{anchor}">{}</text>"#, label(v));
    }
    for (v, y) in [(y0, py(y0)), (y1, py(y1))] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, M - 4.0, y + 4.0, label(v));
    }
    let axis = if spec.log { format!("log10 {}", spec.x) } else { spec.x.clone() };
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&axis));
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - M - 120.0,
            M + 14.0 * i as f64,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_and_skips_nonpositive_on_log_axes() {
        let csv = b"n,ratio\n1,1\n2,4\n4,0\n8,64\n";
        let svg = render(&PlotSpec::log_log("t", "n", &["ratio"], "r"), csv).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn missing_column_is_an_error() {
        assert!(render(&PlotSpec::linear("t", "n", &["nope"], "r"), b"n,a\n1,2\n").is_err());
    }
}
