// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


//! Static SVG renderers: log-log scatter/line plots and the regime map.

use std::fmt::Write;

use sirg_core::model::RegimeCase;

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Points,
    Line,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

/// Log-log plot with optional vertical markers.
#[derive(Debug, Clone, Default)]
pub struct LogLogPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// `(x, label)`: dashed vertical lines.
    pub markers: Vec<(f64, String)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn decade_range(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| *v > 0.0 && v.is_finite()) {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return None;
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    Some(if hi > lo { (lo, hi) } else { (lo, lo + 1.0) })
}

impl LogLogPlot {
    pub fn render(&self) -> String {
        let xs = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).chain(self.markers.iter().map(|m| m.0));
        let ys = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
        let (x0, x1) = decade_range(xs).unwrap_or((0.0, 1.0));
        let (y0, y1) = decade_range(ys).unwrap_or((0.0, 1.0));
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y.log10()) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, esc(&self.title));
        let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for e in (x0 as i64)..=(x1 as i64) {
            let x = sx(10f64.powi(e as i32));
            let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, TOP + ph);
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"#, TOP + ph + 18.0);
        }
        for e in (y0 as i64)..=(y1 as i64) {
            let y = sy(10f64.powi(e as i32));
            let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, LEFT - 6.0, y + 4.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 12.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );
        for (x, label) in &self.markers {
            if *x > 0.0 {
                let px = sx(*x);
                let _ = writeln!(
                    s,
                    r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{}" stroke="#2ca02c" stroke-dasharray="6,4" stroke-width="1.5"/>"##,
                    TOP + ph
                );
                let _ = writeln!(s, r##"<text x="{:.2}" y="{}" fill="#2ca02c">{}</text>"##, px + 4.0, TOP + 14.0, esc(label));
            }
        }
        for (i, ser) in self.series.iter().enumerate() {
            let c = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = ser.points.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
            match ser.style {
                Style::Points => {
                    for (x, y) in &pts {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, sx(*x), sy(*y));
                    }
                }
                Style::Line => {
                    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
                    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.8"/>"#, path.join(" "));
                }
            }
            let ly = TOP + 16.0 + 18.0 * i as f64;
            let lx = W - RIGHT + 12.0;
            let _ = writeln!(s, r#"<rect x="{lx}" y="{}" width="12" height="4" fill="{c}"/>"#, ly - 6.0);
            let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 18.0, esc(&ser.name));
        }
        s.push_str("</svg>\n");
        s
    }
}

pub fn case_color(case: Option<RegimeCase>) -> &'static str {
    match case {
        Some(RegimeCase::InverseLinear) => "#f4b6c2",
        Some(RegimeCase::CriticalLog) => "#b30000",
        Some(RegimeCase::Polynomial) => "#a6cee3",
        Some(RegimeCase::CriticalLogSquaredInverse) => "#1f3b99",
        Some(RegimeCase::Constant) => "#b2df8a",
        None => "#eeeeee",
    }
}

/// Regime map over `(a, beta)` with the boundary lines drawn on top.
pub fn phase_svg(cells: &[(f64, f64, Option<RegimeCase>)], a_range: (f64, f64), b_range: (f64, f64), res: usize) -> String {
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |a: f64| LEFT + (a - a_range.0) / (a_range.1 - a_range.0) * pw;
    let sy = |b: f64| TOP + (b_range.1 - b) / (b_range.1 - b_range.0) * ph;
    let cw = pw / res as f64;
    let ch = ph / res as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">Clustering regimes in (a, beta)</text>"#, LEFT + pw / 2.0);
    for &(a, b, case) in cells {
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            sx(a) - cw / 2.0,
            sy(b) - ch / 2.0,
            cw + 0.5,
            ch + 0.5,
            case_color(case)
        );
    }
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let lines: [(&str, f64, f64, &str); 4] = [
        ("beta = a + 3/2", 1.0, 1.5, "4,0"),
        ("beta = a + 1", 1.0, 1.0, "4,0"),
        ("beta = (a + 3)/2", 0.5, 1.5, "6,4"),
        ("beta = a + 2", 1.0, 2.0, "2,3"),
    ];
    for (i, (name, slope, off, dash)) in lines.iter().enumerate() {
        let (a0, a1) = a_range;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-dasharray="{dash}" clip-path="url(#plot)"/>"#,
            sx(a0),
            sy(slope * a0 + off),
            sx(a1),
            sy(slope * a1 + off)
        );
        let ly = TOP + 16.0 + 18.0 * (i + 6) as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, W - RIGHT + 12.0, esc(name));
    }
    let _ = writeln!(s, r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>"#);
    let names = [
        (Some(RegimeCase::InverseLinear), "INVERSE_LINEAR"),
        (Some(RegimeCase::CriticalLog), "CRITICAL_LOG"),
        (Some(RegimeCase::Polynomial), "POLYNOMIAL"),
        (Some(RegimeCase::CriticalLogSquaredInverse), "CRITICAL_LOGSQ_INV"),
        (Some(RegimeCase::Constant), "CONSTANT"),
        (None, "unsupported"),
    ];
    for (i, (c, n)) in names.iter().enumerate() {
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = W - RIGHT + 12.0;
        let _ = writeln!(s, r##"<rect x="{lx}" y="{}" width="12" height="12" fill="{}" stroke="#444"/>"##, ly - 10.0, case_color(*c));
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{n}</text>"#, lx + 18.0);
    }
    for i in 0..=4 {
        let a = a_range.0 + (a_range.1 - a_range.0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{:.2}</text>"#, sx(a), TOP + ph + 18.0, a);
        let b = b_range.0 + (b_range.1 - b_range.0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{:.2}</text>"#, LEFT - 6.0, sy(b) + 4.0, b);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">a</text>"#, LEFT + pw / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">beta</text>"#, TOP + ph / 2.0);
    s.push_str("</svg>\n");
    s
}
