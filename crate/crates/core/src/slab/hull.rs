//! Planar convex hulls and their Line / Strip / HalfPlane / Plane reading.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// Fraction of the hull extent a support line must be touched along to count
/// as an edge of an unbounded region.
pub const TOUCH_FRACTION: f64 = 0.5;

pub const FINITE_SAMPLE_CAVEAT: &str =
    "classification is relative to the meshed truncation: unbounded kinds are inferred from samples lining the hull";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullKind {
    Line,
    Strip,
    HalfPlane,
    Plane,
}

/// The line `{p : normal · p = offset}`; the hull lies on the side
/// `normal · p ≤ offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportLine {
    pub normal: Point2,
    pub offset: f64,
}

impl SupportLine {
    /// Distance from `p` to the line, positive on the hull side.
    pub fn depth(&self, p: Point2) -> f64 {
        self.offset - dot(self.normal, p)
    }

    pub fn distance(&self, p: Point2) -> f64 {
        self.depth(p).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullClassification {
    pub kind: HullKind,
    /// `[across, along]`: the minimum-width direction and its perpendicular.
    pub axes: [Point2; 2],
    /// Minimum width of the hull; zero for `Line`.
    pub width: f64,
    /// Support lines lined by samples (two for `Strip`, one for `HalfPlane`,
    /// none for `Plane`, the fitted line itself for `Line`).
    pub boundary_lines: Vec<SupportLine>,
    /// Hull length along `axes[1]`.
    pub extent: f64,
    pub hull: Vec<Point2>,
    pub tol: f64,
    pub caveat: String,
}

impl HullClassification {
    /// Distance from `q` to the nearest boundary line, infinite if none.
    pub fn boundary_distance(&self, q: Point2) -> (f64, Option<usize>) {
        self.boundary_lines
            .iter()
            .enumerate()
            .map(|(i, l)| (l.distance(q), Some(i)))
            .fold((f64::INFINITY, None), |a, b| if b.0 < a.0 { b } else { a })
    }
}

fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Minimum width over hull edge directions and the unit outward edge normal
/// achieving it. Quadratic in the hull size, which stays small for meshes.
fn min_width(hull: &[Point2]) -> (f64, Point2) {
    let n = hull.len();
    let mut best = (f64::INFINITY, [1.0, 0.0]);
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        if len == 0.0 {
            continue;
        }
        let w = hull.iter().map(|&p| cross(a, b, p)).fold(0.0, f64::max) / len;
        if w < best.0 {
            best = (w, [(b[1] - a[1]) / len, -(b[0] - a[0]) / len]);
        }
    }
    best
}

/// Classifies the convex hull of `points`.
///
/// The hull is measured across its minimum-width direction `n`. A support
/// line counts as a boundary of an unbounded region when samples within
/// `tol` of it span at least [`TOUCH_FRACTION`] of the hull extent along the
/// line.
pub fn hull_classify(points: &[Point2], tol: f64) -> Result<HullClassification> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("hull tolerance must be positive, got {tol}")));
    }
    let hull = convex_hull(points);
    let (width, n) = if hull.len() < 3 {
        let (a, b) = (hull[0], *hull.last().unwrap());
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let n = if len > 0.0 {
            [-(b[1] - a[1]) / len, (b[0] - a[0]) / len]
        } else {
            [1.0, 0.0]
        };
        (0.0, n)
    } else {
        min_width(&hull)
    };
    let d = [-n[1], n[0]];
    let along: Vec<f64> = points.iter().map(|&p| dot(d, p)).collect();
    let s_min = along.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = along.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let extent = s_max - s_min;
    let top = points.iter().map(|&p| dot(n, p)).fold(f64::NEG_INFINITY, f64::max);
    let bottom = points.iter().map(|&p| dot(n, p)).fold(f64::INFINITY, f64::min);

    let mut out = HullClassification {
        kind: HullKind::Line,
        axes: [n, d],
        width,
        boundary_lines: Vec::new(),
        extent,
        hull,
        tol,
        caveat: FINITE_SAMPLE_CAVEAT.into(),
    };
    if width < tol {
        out.width = 0.0;
        out.boundary_lines.push(SupportLine {
            normal: n,
            offset: 0.5 * (top + bottom),
        });
        return Ok(out);
    }
    let candidates = [
        SupportLine { normal: n, offset: top },
        SupportLine {
            normal: [-n[0], -n[1]],
            offset: -bottom,
        },
    ];
    for line in candidates {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (p, &s) in points.iter().zip(&along) {
            if line.depth(*p) <= tol {
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        if hi - lo >= TOUCH_FRACTION * extent {
            out.boundary_lines.push(line);
        }
    }
    out.kind = match out.boundary_lines.len() {
        2 => HullKind::Strip,
        1 => HullKind::HalfPlane,
        _ => HullKind::Plane,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(nx: usize, ny: usize, w: f64, l: f64) -> Vec<Point2> {
        let mut v = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                v.push([w * i as f64 / nx as f64, l * j as f64 / ny as f64]);
            }
        }
        v
    }

    #[test]
    fn hull_of_square_grid() {
        let h = convex_hull(&grid(4, 4, 1.0, 1.0));
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn line_strip_and_plane() {
        let line: Vec<Point2> = (0..20).map(|i| [0.0, i as f64]).collect();
        let c = hull_classify(&line, 0.1).unwrap();
        assert_eq!(c.kind, HullKind::Line);
        assert_eq!(c.width, 0.0);

        let strip = hull_classify(&grid(10, 40, 3.0, 12.0), 0.3).unwrap();
        assert_eq!(strip.kind, HullKind::Strip);
        assert!((strip.width - 3.0).abs() < 1e-12);
        assert!(strip.axes[0][0].abs() > 0.999);

        let disk: Vec<Point2> = grid(40, 40, 2.0, 2.0)
            .into_iter()
            .map(|p| [p[0] - 1.0, p[1] - 1.0])
            .filter(|p| p[0].hypot(p[1]) <= 1.0)
            .collect();
        let c = hull_classify(&disk, 0.15).unwrap();
        assert_eq!(c.kind, HullKind::Plane);
        assert!((c.width - 2.0).abs() < 0.06);
    }

    #[test]
    fn half_disk_is_a_half_plane() {
        let pts: Vec<Point2> = grid(60, 30, 2.0, 1.0)
            .into_iter()
            .map(|p| [p[0] - 1.0, p[1]])
            .filter(|p| p[0].hypot(p[1]) <= 1.0)
            .collect();
        let c = hull_classify(&pts, 0.1).unwrap();
        assert_eq!(c.kind, HullKind::HalfPlane);
        let l = c.boundary_lines[0];
        assert!(l.distance([0.3, 0.0]) < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(hull_classify(&[[0.0, 0.0], [1.0, 0.0]], 0.1), Err(Error::TooFewPoints(2))));
    }

    proptest! {
        #[test]
        fn invariant_under_planar_motions(angle in 0.0..std::f64::consts::TAU, tx in -50.0..50.0f64, ty in -50.0..50.0f64) {
            let pts = grid(12, 30, 2.5, 10.0);
            let base = hull_classify(&pts, 0.2).unwrap();
            let (s, c) = angle.sin_cos();
            let moved: Vec<Point2> = pts.iter().map(|p| [c * p[0] - s * p[1] + tx, s * p[0] + c * p[1] + ty]).collect();
            let m = hull_classify(&moved, 0.2).unwrap();
            prop_assert_eq!(m.kind, base.kind);
            prop_assert!((m.width - base.width).abs() < 1e-9);
        }
    }
}
