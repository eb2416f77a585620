//! Minimal static SVG plots.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>, equal: bool) -> Frame {
        let (mut x, mut y) = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
        for (a, b) in points.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            x = (x.0.min(a), x.1.max(a));
            y = (y.0.min(b), y.1.max(b));
        }
        if !x.0.is_finite() {
            x = (0.0, 1.0);
            y = (0.0, 1.0);
        }
        let pad = |r: (f64, f64)| {
            let span = (r.1 - r.0).max(1e-12 * r.0.abs().max(1.0));
            (r.0 - 0.05 * span, r.1 + 0.05 * span)
        };
        let (mut x, mut y) = (pad(x), pad(y));
        if equal {
            let sx = (x.1 - x.0) / (W - LEFT - RIGHT);
            let sy = (y.1 - y.0) / (H - TOP - BOTTOM);
            let s = sx.max(sy);
            let grow = |r: (f64, f64), px: f64| {
                let c = 0.5 * (r.0 + r.1);
                (c - 0.5 * s * px, c + 0.5 * s * px)
            };
            x = grow(x, W - LEFT - RIGHT);
            y = grow(y, H - TOP - BOTTOM);
        }
        Frame { x, y }
    }

    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        (
            LEFT + (p.0 - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT),
            H - BOTTOM - (p.1 - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM),
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(s: &mut String, f: &Frame, title: &str, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let (x0, y0) = (LEFT, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let (xp, _) = f.px((xv, f.y.0));
        let (_, yp) = f.px((f.x.0, yv));
        let _ = writeln!(s, r#"<line x1="{xp:.2}" y1="{y0}" x2="{xp:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{xp:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick(xv));
        let _ = writeln!(s, r#"<line x1="{}" y1="{yp:.2}" x2="{x0}" y2="{yp:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, yp + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 10.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn polyline(s: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, markers: bool) {
    let coords: Vec<String> = pts
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .map(|&p| {
            let (x, y) = f.px(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
        coords.join(" ")
    );
    if markers {
        for c in &coords {
            let (x, y) = c.split_once(',').unwrap();
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
        }
    }
}

/// Line plot with markers, an optional dashed reference level and a legend.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], reference: Option<(f64, &str)>) -> String {
    let mut all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if let (Some((r, _)), Some(&(x, _))) = (reference, all.first()) {
        all.push((x, r));
    }
    let f = Frame::fit(all.into_iter(), false);
    let mut s = String::new();
    header(&mut s, &f, title, xlabel, ylabel);
    if let Some((r, label)) = reference {
        let (xa, y) = f.px((f.x.0, r));
        let (xb, _) = f.px((f.x.1, r));
        let _ = writeln!(
            s,
            r##"<line x1="{xa:.2}" y1="{y:.2}" x2="{xb:.2}" y2="{y:.2}" stroke="#555" stroke-dasharray="6 4"/>"##
        );
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#555">{}</text>"##, xb - 4.0, y - 4.0, escape(label));
    }
    for (k, se) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        polyline(&mut s, &f, &se.points, color, true);
        let ly = TOP + 16.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#, LEFT + 10.0, escape(&se.name));
    }
    s.push_str("</svg>\n");
    s
}

/// Curves drawn with equal axis scales, plus highlighted points.
pub fn curve_plot(title: &str, xlabel: &str, ylabel: &str, curves: &[Vec<(f64, f64)>], marks: &[(f64, f64)]) -> String {
    let f = Frame::fit(curves.iter().flatten().copied().chain(marks.iter().copied()), true);
    let mut s = String::new();
    header(&mut s, &f, title, xlabel, ylabel);
    for (k, c) in curves.iter().enumerate() {
        polyline(&mut s, &f, c, COLORS[k % COLORS.len()], false);
    }
    for &m in marks {
        let (x, y) = f.px(m);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="none" stroke="black" stroke-width="2"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plots_are_well_formed_and_deterministic() {
        let s = vec![Series {
            name: "a<b".into(),
            points: vec![(2.0, 1.6), (3.0, 1.8), (4.0, 1.9)],
        }];
        let a = line_plot("t", "x", "y", &s, Some((2.0, "target")));
        assert_eq!(a, line_plot("t", "x", "y", &s, Some((2.0, "target"))));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("a&lt;b"));
        assert_eq!(a.matches("<circle").count(), 3);
        let c = curve_plot("c", "u", "x3", &[vec![(0.0, 0.0), (1.0, 1.0)]], &[(0.5, 0.5)]);
        assert!(c.contains("<polyline"));
        let empty = line_plot("e", "x", "y", &[], None);
        assert!(empty.ends_with("</svg>\n"));
    }
}
