//! The rotationally symmetric bowl.
//!
//! A radial graph `u(r)` is a translator iff
//! `u″/(1 + u′²) + u′/r = 1`. The `u′/r` term is singular at the pole, so
//! the profile starts from the series
//! `u = r²/4 + r⁴/128 + r⁶/4608 + O(r⁸)` up to `r = 10h` and continues with
//! classical RK4 on `(u, u′)`.

use std::f64::consts::PI;

use super::{params, DOWNWARD_GRAPH};
use crate::error::{invalid, Error, Result};
use crate::mesh::{HalfSpace, MeshMeta, Orientation, SurfaceMesh, Truncation, Vec3};

/// Relative step-doubling discrepancy accepted for the profile.
const STEP_DOUBLING_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct BowlProfile {
    pub radii: Vec<f64>,
    pub heights: Vec<f64>,
    pub slopes: Vec<f64>,
}

fn series(r: f64) -> (f64, f64) {
    let r2 = r * r;
    let u = r2 / 4.0 + r2 * r2 / 128.0 + r2 * r2 * r2 / 4608.0;
    let p = r / 2.0 + r * r2 / 32.0 + r * r2 * r2 / 768.0;
    (u, p)
}

fn slope_rate(r: f64, p: f64) -> f64 {
    (1.0 + p * p) * (1.0 - p / r)
}

fn rk4(r: f64, u: f64, p: f64, h: f64) -> (f64, f64) {
    let k1u = p;
    let k1p = slope_rate(r, p);
    let k2u = p + 0.5 * h * k1p;
    let k2p = slope_rate(r + 0.5 * h, p + 0.5 * h * k1p);
    let k3u = p + 0.5 * h * k2p;
    let k3p = slope_rate(r + 0.5 * h, p + 0.5 * h * k2p);
    let k4u = p + h * k3p;
    let k4p = slope_rate(r + h, p + h * k3p);
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

fn integrate(r_max: f64, h: f64) -> BowlProfile {
    let start_steps = 10usize;
    let mut radii = Vec::new();
    let mut heights = Vec::new();
    let mut slopes = Vec::new();
    let r_start = (start_steps as f64 * h).min(r_max);
    for i in 0..=start_steps {
        let r = r_start * i as f64 / start_steps as f64;
        let (u, p) = series(r);
        radii.push(r);
        heights.push(u);
        slopes.push(p);
    }
    let mut r = r_start;
    let (mut u, mut p) = series(r);
    while r < r_max - 1e-12 * r_max {
        let step = h.min(r_max - r);
        let (u1, p1) = rk4(r, u, p, step);
        r += step;
        u = u1;
        p = p1;
        radii.push(r);
        heights.push(u);
        slopes.push(p);
    }
    BowlProfile {
        radii,
        heights,
        slopes,
    }
}

/// Integrates the bowl profile on `[0, r_max]` with step `h < r_max/100`.
pub fn solve_bowl_profile(r_max: f64, h: f64) -> Result<BowlProfile> {
    if !(r_max > 0.0 && h > 0.0) {
        return Err(invalid("bowl profile needs positive r_max and step"));
    }
    if !(h < r_max / 100.0) {
        return Err(invalid(format!("step {h} must be below r_max/100 = {}", r_max / 100.0)));
    }
    let coarse = integrate(r_max, h);
    let fine = integrate(r_max, 0.5 * h);
    let uc = *coarse.heights.last().unwrap();
    let uf = *fine.heights.last().unwrap();
    let discrepancy = (uc - uf).abs() / uf.abs().max(1.0);
    if !(discrepancy < STEP_DOUBLING_TOL) {
        return Err(Error::StepSizeTooLarge { discrepancy });
    }
    Ok(coarse)
}

impl BowlProfile {
    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// `(u, u′)` at radius `r` by cubic Hermite interpolation.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r = r.abs();
        if r >= self.r_max() {
            let n = self.radii.len() - 1;
            return (self.heights[n], self.slopes[n]);
        }
        let i = match self.radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => return (self.heights[i], self.slopes[i]),
            Err(i) => i - 1,
        };
        let (r0, r1) = (self.radii[i], self.radii[i + 1]);
        let dr = r1 - r0;
        let t = (r - r0) / dr;
        let (u0, u1, p0, p1) = (self.heights[i], self.heights[i + 1], self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * u0
            + (t3 - 2.0 * t2 + t) * dr * p0
            + (-2.0 * t3 + 3.0 * t2) * u1
            + (t3 - t2) * dr * p1;
        let du = ((6.0 * t2 - 6.0 * t) * u0
            + (3.0 * t2 - 4.0 * t + 1.0) * dr * p0
            + (-6.0 * t2 + 6.0 * t) * u1
            + (3.0 * t2 - 2.0 * t) * dr * p1)
            / dr;
        (u, du)
    }

    /// Whether `u′` is strictly increasing on the samples.
    pub fn is_convex(&self) -> bool {
        self.slopes.windows(2).all(|w| w[1] > w[0])
    }
}

/// Bowl as a graph over the square lattice of step `h` clipped to the disk
/// `r ≤ r_max`. The pole is a lattice vertex with its six-triangle fan.
pub fn make_bowl(r_max: f64, h: f64) -> Result<SurfaceMesh> {
    if !(r_max > 0.0 && h > 0.0 && h < r_max / 4.0) {
        return Err(invalid("bowl mesh needs 0 < 4h < r_max"));
    }
    let profile = solve_bowl_profile(r_max, r_max / 1000.0)?;
    let half = (r_max / h).floor() as isize;
    let side = (2 * half + 1) as usize;
    let mut index = vec![usize::MAX; side * side];
    let mut vertices = Vec::new();
    for j in -half..=half {
        for i in -half..=half {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let r = x.hypot(y);
            if r <= r_max {
                index[((j + half) as usize) * side + (i + half) as usize] = vertices.len();
                vertices.push(Vec3::new(x, y, profile.eval(r).0));
            }
        }
    }
    let mut triangles = Vec::new();
    for j in 0..side - 1 {
        for i in 0..side - 1 {
            let v00 = index[j * side + i];
            let v10 = index[j * side + i + 1];
            let v01 = index[(j + 1) * side + i];
            let v11 = index[(j + 1) * side + i + 1];
            if v00 != usize::MAX && v10 != usize::MAX && v11 != usize::MAX {
                triangles.push([v00, v10, v11]);
            }
            if v00 != usize::MAX && v11 != usize::MAX && v01 != usize::MAX {
                triangles.push([v00, v11, v01]);
            }
        }
    }
    // Every point of the bowl below this height projects into the meshed
    // polygon (lattice cells within r_max − √2 h are complete).
    let covered = (r_max - 2f64.sqrt() * h).max(0.0);
    let cap = profile.eval(covered).0;
    let mut mesh = SurfaceMesh::new(vertices, triangles);
    mesh.orientation = Orientation::Reversed;
    mesh.meta = MeshMeta {
        generator: "bowl".into(),
        params: params(&[("r_max", r_max), ("h", h)]),
        height_cap: Some(cap),
        truncation: Some(Truncation {
            half_spaces: vec![HalfSpace::new(Vec3::z(), cap)],
            area_growth: 4.0 * PI,
        }),
        translator: true,
        simply_connected: true,
        strip_width: None,
        orientation_convention: DOWNWARD_GRAPH.into(),
    };
    Ok(mesh)
}
