//! Exact area of a triangle mesh inside a ball.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::mesh::{SurfaceMesh, Vec3};

/// Signed area of `disk(0, r) ∩ triangle(0, a, b)`.
fn wedge_area(a: [f64; 2], b: [f64; 2], r: f64) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    if qa == 0.0 {
        return 0.0;
    }
    let qb = a[0] * d[0] + a[1] * d[1];
    let qc = a[0] * a[0] + a[1] * a[1] - r * r;
    let mut cuts = vec![0.0];
    let disc = qb * qb - qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        for s in [(-qb - sq) / qa, (-qb + sq) / qa] {
            if s > 0.0 && s < 1.0 {
                cuts.push(s);
            }
        }
    }
    cuts.push(1.0);
    let at = |s: f64| [a[0] + s * d[0], a[1] + s * d[1]];
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (at(w[0]), at(w[1]));
        let m = at(0.5 * (w[0] + w[1]));
        let cross = p[0] * q[1] - p[1] * q[0];
        if m[0] * m[0] + m[1] * m[1] <= r * r {
            area += 0.5 * cross;
        } else {
            let dot = p[0] * q[0] + p[1] * q[1];
            area += 0.5 * r * r * cross.atan2(dot);
        }
    }
    area
}

fn triangle_ball_area(p: [Vec3; 3], center: &Vec3, r: f64) -> f64 {
    let r2 = r * r;
    if p.iter().all(|x| (x - center).norm_squared() <= r2) {
        return 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
    }
    let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let len = n.norm();
    if len == 0.0 {
        return 0.0;
    }
    let n = n / len;
    let dist = n.dot(&(center - p[0]));
    if dist.abs() >= r {
        return 0.0;
    }
    let rho = (r2 - dist * dist).sqrt();
    let c = center - dist * n;
    let u = (p[1] - p[0]).normalize();
    let v = n.cross(&u);
    let q = p.map(|x| {
        let d = x - c;
        [d.dot(&u), d.dot(&v)]
    });
    (wedge_area(q[0], q[1], rho) + wedge_area(q[1], q[2], rho) + wedge_area(q[2], q[0], rho)).abs()
}

/// `Area(Σ ∩ B_r(center))`.
pub fn ball_area(mesh: &SurfaceMesh, center: &Vec3, r: f64) -> f64 {
    mesh.triangles
        .iter()
        .map(|tri| {
            let p = tri.map(|v| mesh.vertices[v]);
            let lo = p[0].inf(&p[1]).inf(&p[2]);
            let hi = p[0].sup(&p[1]).sup(&p[2]);
            let gap = (lo - center).sup(&(center - hi)).sup(&Vec3::zeros());
            if gap.norm_squared() > r * r {
                0.0
            } else {
                triangle_ball_area(p, center, r)
            }
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaGrowth {
    /// `max Area(Σ ∩ B_R(x)) / R²`.
    pub ratio: f64,
    pub center: [f64; 3],
    pub radius: f64,
    /// Every `(center index, R, ratio)` evaluated.
    pub samples: Vec<(usize, f64, f64)>,
    /// `(center index, R)` pairs whose ball leaves the meshed region.
    pub clipped: Vec<(usize, f64)>,
}

/// Largest area ratio over the given centers and radii. Balls reaching
/// beyond the truncation region (or the bounding box when there is none)
/// are flagged as clipped.
pub fn area_growth_ratio(mesh: &SurfaceMesh, centers: &[Vec3], radii: &[f64]) -> AreaGrowth {
    let (lo, hi) = mesh.bbox();
    let room = |x: &Vec3| match &mesh.meta.truncation {
        Some(tr) => tr.clearance(x),
        None => (x - lo).inf(&(hi - x)).min().max(0.0),
    };
    let mut best = AreaGrowth {
        ratio: 0.0,
        center: [0.0; 3],
        radius: 0.0,
        samples: Vec::new(),
        clipped: Vec::new(),
    };
    for (ci, c) in centers.iter().enumerate() {
        let clearance = room(c);
        for &r in radii {
            if !(r > 0.0) {
                continue;
            }
            if r > clearance {
                best.clipped.push((ci, r));
            }
            let ratio = ball_area(mesh, c, r) / (r * r);
            best.samples.push((ci, r, ratio));
            if ratio > best.ratio {
                best.ratio = ratio;
                best.center = [c.x, c.y, c.z];
                best.radius = r;
            }
        }
    }
    best
}

/// Area of the unit disk, the ratio of a plane.
pub const PLANE_RATIO: f64 = PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_sphere, make_vertical_plane};

    #[test]
    fn wedge_cases() {
        // whole triangle inside
        assert!((wedge_area([1.0, 0.0], [0.0, 1.0], 5.0) - 0.5).abs() < 1e-15);
        // chord outside: quarter disk sector
        let a = wedge_area([3.0, 0.0], [0.0, 3.0], 1.0);
        assert!((a - PI / 4.0).abs() < 1e-12);
        // reversed orientation flips the sign
        assert!((wedge_area([0.0, 3.0], [3.0, 0.0], 1.0) + PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn plane_disk_area() {
        let m = make_vertical_plane(3.0, 0.3).unwrap();
        for &r in &[0.5, 1.0, 2.2] {
            let a = ball_area(&m, &Vec3::new(0.3, 0.1, -0.2), r);
            let rho2 = r * r - 0.09;
            assert!((a - PI * rho2).abs() < 1e-10 * r * r, "{a}");
        }
        assert_eq!(ball_area(&m, &Vec3::new(0.3, 0.0, 0.0), 0.25), 0.0);
        let g = area_growth_ratio(&m, &[Vec3::zeros()], &[0.5, 1.0, 2.0, 4.0]);
        assert!((g.ratio - PLANE_RATIO).abs() < 1e-10);
        assert_eq!(g.clipped, vec![(0, 4.0)]);
    }

    #[test]
    fn sphere_cap_area() {
        // cap of the unit sphere cut by a ball around the north pole
        let m = make_sphere(1.0, 5).unwrap();
        let r = 0.8;
        let exact = PI * r * r;
        let a = ball_area(&m, &Vec3::new(0.0, 0.0, 1.0), r);
        assert!((a - exact).abs() < 5e-3 * exact, "{a} vs {exact}");
    }
}
