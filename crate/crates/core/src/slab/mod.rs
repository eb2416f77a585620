//! Horizontal projection, hull classification and boundary-growth witnesses
//! for surfaces lying in slabs.

mod hull;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use hull::{convex_hull, hull_classify, HullClassification, HullKind, Point2, SupportLine, FINITE_SAMPLE_CAVEAT, TOUCH_FRACTION};

use crate::error::{invalid, Error, Result};
use crate::mesh::SurfaceMesh;
use crate::nodal::{plane_section, PlaneSpec, SNAP_TOL};

/// Shortest sequence accepted as an approach sequence.
pub const MIN_SEQUENCE_LEN: usize = 3;

/// Grid step of a mesh: the generator's `h` when recorded, otherwise the
/// mean edge length.
pub fn grid_step(mesh: &SurfaceMesh) -> f64 {
    match mesh.meta.params.get("h") {
        Some(&h) if h > 0.0 => h,
        _ => mesh.mean_edge_length(),
    }
}

/// Three grid cells.
pub fn default_tol(mesh: &SurfaceMesh) -> f64 {
    3.0 * grid_step(mesh)
}

/// Vertex projections `(x₁, x₂)`, first occurrence kept among points that
/// agree to `1e−6 h`.
pub fn project(mesh: &SurfaceMesh) -> Vec<Point2> {
    let eps = 1e-6 * grid_step(mesh);
    let mut seen = HashSet::with_capacity(mesh.vertices.len());
    mesh.vertices
        .iter()
        .filter(|v| seen.insert(((v.x / eps).round() as i64, (v.y / eps).round() as i64)))
        .map(|v| [v.x, v.y])
        .collect()
}

/// `hull_classify(project(mesh), tol)` with `tol` defaulting to three grid
/// cells.
pub fn classify_mesh(mesh: &SurfaceMesh, tol: Option<f64>) -> Result<HullClassification> {
    hull_classify(&project(mesh), tol.unwrap_or_else(|| default_tol(mesh)))
}

fn require_boundary(c: &HullClassification, allowed: &[HullKind]) -> Result<()> {
    if allowed.contains(&c.kind) {
        Ok(())
    } else {
        Err(invalid(format!("projection hull is {:?}; operation needs one of {allowed:?}", c.kind)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub q: Point2,
    pub kind: HullKind,
    /// Index into the classification's boundary lines.
    pub line: usize,
    pub distance: f64,
    pub rho: Vec<f64>,
    /// Highest vertex over `B_ρ(q)`, `None` when the disk holds no vertex.
    pub sup_x3: Vec<Option<f64>>,
    pub height_cap: Option<f64>,
    pub saturated: Vec<bool>,
}

/// Sup of x₃ over the vertices projecting into `B_ρ(q)` for each ρ, and
/// whether it reaches the mesh's height cap.
pub fn boundary_growth_profile(mesh: &SurfaceMesh, q: Point2, rho: &[f64], tol: Option<f64>) -> Result<GrowthProfile> {
    if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(invalid("radii must be positive and finite"));
    }
    if !(q[0].is_finite() && q[1].is_finite()) {
        return Err(invalid("q must be finite"));
    }
    let c = classify_mesh(mesh, tol)?;
    require_boundary(&c, &[HullKind::Strip, HullKind::HalfPlane])?;
    let (distance, line) = c.boundary_distance(q);
    if distance > c.tol {
        return Err(Error::NotOnBoundary { distance, tol: c.tol });
    }
    let sup_x3: Vec<Option<f64>> = rho
        .iter()
        .map(|&r| {
            mesh.vertices
                .iter()
                .filter(|v| (v.x - q[0]).hypot(v.y - q[1]) <= r)
                .map(|v| v.z)
                .reduce(f64::max)
        })
        .collect();
    let cap = mesh.meta.height_cap;
    let saturated = sup_x3
        .iter()
        .map(|s| match (s, cap) {
            (Some(s), Some(cap)) => *s >= cap - 1e-6 * cap.abs().max(1.0),
            _ => false,
        })
        .collect();
    Ok(GrowthProfile {
        q,
        kind: c.kind,
        line: line.unwrap(),
        distance,
        rho: rho.to_vec(),
        sup_x3,
        height_cap: cap,
        saturated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachSequence {
    pub line: usize,
    pub points: Vec<[f64; 3]>,
    /// Strictly increasing.
    pub x3: Vec<f64>,
    /// Distance of the projection to the boundary line, strictly decreasing.
    pub dist: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachReport {
    pub width: f64,
    pub boundary_lines: Vec<SupportLine>,
    pub sequences: Vec<ApproachSequence>,
}

/// Longest chain with strictly increasing x₃ and strictly decreasing
/// distance, over `(x3, dist, index)` triples.
fn longest_approach(mut pts: Vec<(f64, f64, usize)>) -> Vec<usize> {
    // ties in x₃ sorted by increasing distance cannot both enter the chain
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    let mut tails: Vec<usize> = Vec::new();
    let mut prev = vec![usize::MAX; pts.len()];
    for k in 0..pts.len() {
        let d = pts[k].1;
        let pos = tails.partition_point(|&t| pts[t].1 > d);
        if pos > 0 {
            prev[k] = tails[pos - 1];
        }
        if pos == tails.len() {
            tails.push(k);
        } else {
            tails[pos] = k;
        }
    }
    let mut chain = Vec::with_capacity(tails.len());
    let mut k = tails.last().copied().unwrap_or(usize::MAX);
    while k != usize::MAX {
        chain.push(pts[k].2);
        k = prev[k];
    }
    chain.reverse();
    chain
}

/// Section points of `mesh ∩ plane` climbing toward each wall of the strip.
///
/// Points are assigned to the wall they are closer to; for each wall the
/// longest chain with x₃ strictly increasing and wall distance strictly
/// decreasing is reported.
pub fn boundary_approach_sequences(mesh: &SurfaceMesh, plane: &PlaneSpec, tol: Option<f64>) -> Result<ApproachReport> {
    if !plane.is_vertical() {
        return Err(invalid("approach sequences need a vertical plane"));
    }
    let c = classify_mesh(mesh, tol)?;
    require_boundary(&c, &[HullKind::Strip])?;
    let pn = plane.normal();
    let horizontal = [pn.x, pn.y];
    let hn = horizontal[0].hypot(horizontal[1]);
    let wall = c.boundary_lines[0].normal;
    if (horizontal[0] * wall[1] - horizontal[1] * wall[0]).abs() < 1e-6 * hn {
        return Err(invalid("plane is parallel to the slab walls"));
    }
    let section = plane_section(mesh, plane, SNAP_TOL)?;
    let points: Vec<[f64; 3]> = section.arcs.iter().flat_map(|a| a.points.iter().copied()).collect();
    let mut sequences = Vec::with_capacity(2);
    for (i, line) in c.boundary_lines.iter().enumerate() {
        let other = &c.boundary_lines[1 - i];
        let near: Vec<(f64, f64, usize)> = points
            .iter()
            .enumerate()
            .filter_map(|(k, p)| {
                let d = line.depth([p[0], p[1]]).max(0.0);
                (d < other.depth([p[0], p[1]])).then_some((p[2], d, k))
            })
            .collect();
        let chain = longest_approach(near);
        if chain.len() < MIN_SEQUENCE_LEN {
            return Err(Error::NoMonotoneSubsequence(i));
        }
        let pts: Vec<[f64; 3]> = chain.iter().map(|&k| points[k]).collect();
        sequences.push(ApproachSequence {
            line: i,
            x3: pts.iter().map(|p| p[2]).collect(),
            dist: pts.iter().map(|p| line.depth([p[0], p[1]]).max(0.0)).collect(),
            points: pts,
        });
    }
    Ok(ApproachReport {
        width: c.width,
        boundary_lines: c.boundary_lines,
        sequences,
    })
}
