//! Generators for model translators and control surfaces.
//!
//! Every generator records in the mesh metadata what part of the complete
//! surface it represents (height cap, truncation half-spaces and an
//! area-growth constant) so that Gaussian integrals can bound the omitted
//! tail, and fixes the unit normal convention.

mod bowl;
mod grim_reaper;

use std::collections::BTreeMap;
use std::f64::consts::PI;

pub use bowl::{make_bowl, solve_bowl_profile, BowlProfile};
pub use grim_reaper::{make_grim_reaper, make_tilted_grim_reaper};

use crate::error::{invalid, Result};
use crate::mesh::{HalfSpace, MeshMeta, SurfaceMesh, Truncation, Vec3};

/// Truncation data for slab-type generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSpec {
    /// Width of the strip carrying the projection.
    pub width: f64,
    /// Half-length of the meshed piece along the invariant direction.
    pub extent: f64,
    /// Grid step.
    pub h: f64,
    /// Height cap for the unbounded direction.
    pub cap: f64,
}

impl StripSpec {
    pub fn new(width: f64, extent: f64, h: f64, cap: f64) -> Result<Self> {
        let s = StripSpec {
            width,
            extent,
            h,
            cap,
        };
        s.check()?;
        Ok(s)
    }

    /// Grim reaper strip (width π).
    pub fn grim_reaper(extent: f64, h: f64, cap: f64) -> Result<Self> {
        Self::new(PI, extent, h, cap)
    }

    fn check(&self) -> Result<()> {
        if !(self.width > 0.0 && self.extent > 0.0 && self.h > 0.0) {
            return Err(invalid(format!("strip spec needs positive width, extent and step: {self:?}")));
        }
        if !(self.h < self.width / 8.0) {
            return Err(invalid(format!("step {} must be below width/8 = {}", self.h, self.width / 8.0)));
        }
        if !self.cap.is_finite() {
            return Err(invalid("height cap must be finite"));
        }
        Ok(())
    }
}

pub const DOWNWARD_GRAPH: &str = "graph normal nu = (Du, -1)/sqrt(1+|Du|^2); H = -<nu,e3> > 0";

pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn steps(length: f64, h: f64) -> usize {
    ((length / h).ceil() as usize).max(1)
}

/// Structured grid with optional wrap-around in either parameter direction.
pub(crate) fn periodic_grid(
    nu: usize,
    nv: usize,
    wrap_u: bool,
    wrap_v: bool,
    mut position: impl FnMut(usize, usize) -> Vec3,
) -> SurfaceMesh {
    let mut vertices = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            vertices.push(position(i, j));
        }
    }
    let cells_u = if wrap_u { nu } else { nu - 1 };
    let cells_v = if wrap_v { nv } else { nv - 1 };
    let mut triangles = Vec::with_capacity(2 * cells_u * cells_v);
    for j in 0..cells_v {
        for i in 0..cells_u {
            let (i1, j1) = ((i + 1) % nu, (j + 1) % nv);
            let v00 = j * nu + i;
            let v10 = j * nu + i1;
            let v01 = j1 * nu + i;
            let v11 = j1 * nu + i1;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

/// The vertical plane `{x₁ = 0}` over `[−extent, extent]²` in `(x₂, x₃)`.
pub fn make_vertical_plane(extent: f64, h: f64) -> Result<SurfaceMesh> {
    if !(extent > 0.0 && h > 0.0) {
        return Err(invalid("vertical plane needs positive extent and step"));
    }
    let n = steps(2.0 * extent, h);
    let dh = 2.0 * extent / n as f64;
    let mesh = SurfaceMesh::from_grid(n + 1, n + 1, |i, j| {
        Vec3::new(0.0, -extent + i as f64 * dh, -extent + j as f64 * dh)
    });
    let e = extent;
    Ok(mesh.with_meta(MeshMeta {
        generator: "vertical-plane".into(),
        params: params(&[("extent", extent), ("h", h)]),
        height_cap: Some(extent),
        truncation: Some(Truncation {
            half_spaces: vec![
                HalfSpace::new(Vec3::y(), e),
                HalfSpace::new(-Vec3::y(), e),
                HalfSpace::new(Vec3::z(), e),
                HalfSpace::new(-Vec3::z(), e),
            ],
            area_growth: PI,
        }),
        translator: true,
        simply_connected: true,
        strip_width: Some(0.0),
        orientation_convention: "nu = +e1".into(),
    }))
}

/// Vertical round cylinder of radius `r` about the x₃-axis, `|x₃| ≤ height/2`,
/// outward normal. A control surface: it is not a translator.
pub fn make_round_cylinder(r: f64, height: f64, h: f64) -> Result<SurfaceMesh> {
    if !(r > 0.0 && height > 0.0 && h > 0.0) {
        return Err(invalid("cylinder needs positive radius, height and step"));
    }
    let ntheta = steps(2.0 * PI * r, h).max(8);
    let nz = steps(height, h);
    let dz = height / nz as f64;
    let mesh = periodic_grid(ntheta, nz + 1, true, false, |i, j| {
        let th = 2.0 * PI * i as f64 / ntheta as f64;
        Vec3::new(r * th.cos(), r * th.sin(), -0.5 * height + j as f64 * dz)
    });
    Ok(mesh.with_meta(MeshMeta {
        generator: "round-cylinder".into(),
        params: params(&[("r", r), ("height", height), ("h", h)]),
        height_cap: Some(0.5 * height),
        truncation: Some(Truncation {
            half_spaces: vec![
                HalfSpace::new(Vec3::z(), 0.5 * height),
                HalfSpace::new(-Vec3::z(), 0.5 * height),
            ],
            area_growth: 4.0 * PI,
        }),
        translator: false,
        simply_connected: false,
        strip_width: None,
        orientation_convention: "outward normal".into(),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaddleKind {
    /// `x₁² − x₂²`
    Quadratic,
    /// `Re((x₁ + i x₂)³)`
    Monkey,
}

/// Graph of a harmonic saddle over `[−extent, extent]²` with the origin as a vertex.
pub fn make_saddle_test(kind: SaddleKind, extent: f64, h: f64) -> Result<SurfaceMesh> {
    if !(extent > 0.0 && h > 0.0) {
        return Err(invalid("saddle needs positive extent and step"));
    }
    let half = steps(extent, h);
    let dh = extent / half as f64;
    let n = 2 * half + 1;
    let height = move |x: f64, y: f64| match kind {
        SaddleKind::Quadratic => x * x - y * y,
        SaddleKind::Monkey => x * x * x - 3.0 * x * y * y,
    };
    let mesh = SurfaceMesh::from_grid(n, n, |i, j| {
        let x = (i as f64 - half as f64) * dh;
        let y = (j as f64 - half as f64) * dh;
        Vec3::new(x, y, height(x, y))
    });
    let name = match kind {
        SaddleKind::Quadratic => "quadratic-saddle",
        SaddleKind::Monkey => "monkey-saddle",
    };
    Ok(mesh.with_meta(MeshMeta {
        generator: name.into(),
        params: params(&[("extent", extent), ("h", h)]),
        height_cap: None,
        truncation: None,
        translator: false,
        simply_connected: true,
        strip_width: None,
        orientation_convention: "upward graph normal".into(),
    }))
}

/// Geodesic sphere of radius `r` (outward normal), `subdivisions` rounds of
/// 4-to-1 refinement of an icosahedron.
pub fn make_sphere(r: f64, subdivisions: usize) -> Result<SurfaceMesh> {
    if !(r > 0.0) {
        return Err(invalid("sphere radius must be positive"));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid = std::collections::HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let mut mesh = SurfaceMesh::new(verts.into_iter().map(|v| v * r).collect(), tris);
    mesh.meta = MeshMeta {
        generator: "sphere".into(),
        params: params(&[("r", r), ("subdivisions", subdivisions as f64)]),
        truncation: Some(Truncation {
            half_spaces: vec![],
            area_growth: 4.0 * PI,
        }),
        simply_connected: true,
        orientation_convention: "outward normal".into(),
        ..MeshMeta::default()
    };
    Ok(mesh)
}

/// Torus of revolution about the x₃-axis with tube radius `r` < `big_r`.
/// A control surface that is not simply connected.
pub fn make_torus(big_r: f64, r: f64, h: f64) -> Result<SurfaceMesh> {
    if !(big_r > r && r > 0.0 && h > 0.0) {
        return Err(invalid("torus needs 0 < r < R and positive step"));
    }
    let nu = steps(2.0 * PI * big_r, h).max(8);
    let nv = steps(2.0 * PI * r, h).max(8);
    let mesh = periodic_grid(nu, nv, true, true, |i, j| {
        let u = 2.0 * PI * i as f64 / nu as f64;
        let v = 2.0 * PI * j as f64 / nv as f64;
        let rho = big_r + r * v.cos();
        Vec3::new(rho * u.cos(), rho * u.sin(), r * v.sin())
    });
    let mut mesh = mesh;
    mesh.meta = MeshMeta {
        generator: "torus".into(),
        params: params(&[("R", big_r), ("r", r), ("h", h)]),
        truncation: Some(Truncation {
            half_spaces: vec![],
            area_growth: 4.0 * PI,
        }),
        simply_connected: false,
        orientation_convention: "outward normal".into(),
        ..MeshMeta::default()
    };
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_diagnostics;

    #[test]
    fn strip_spec_invariants() {
        assert!(StripSpec::new(PI, 1.0, 0.5, 5.0).is_err());
        assert!(StripSpec::new(PI, 0.0, 0.1, 5.0).is_err());
        assert!(StripSpec::new(PI, 1.0, 0.1, 5.0).is_ok());
    }

    #[test]
    fn vertical_plane_is_a_translator() {
        let m = make_vertical_plane(1.0, 0.1).unwrap();
        let d = compute_diagnostics(&m).unwrap();
        for v in 0..m.vertex_count() {
            assert!(d.mean[v].abs() < 1e-9);
            assert!(d.residual[v].abs() < 1e-9);
        }
    }

    #[test]
    fn cylinder_is_not_a_translator() {
        let m = make_round_cylinder(1.0, 2.0, 0.05).unwrap();
        m.validate().unwrap();
        let d = compute_diagnostics(&m).unwrap();
        let interior: Vec<usize> = d.interior().collect();
        assert!(!interior.is_empty());
        for v in interior {
            assert!((d.residual[v] - 1.0).abs() < 5e-3, "{}", d.residual[v]);
            assert!(d.normal[v].z.abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_and_torus_are_closed_and_outward() {
        let s = make_sphere(2.0, 3).unwrap();
        s.validate().unwrap();
        let topo = s.topology();
        assert!(topo.boundary_vertex.iter().all(|b| !b));
        let n = s.vertex_normals();
        for (p, nv) in s.vertices.iter().zip(&n) {
            assert!(p.dot(nv) > 0.0);
        }
        let t = make_torus(2.0, 0.5, 0.2).unwrap();
        t.validate().unwrap();
        let n = t.vertex_normals();
        for (p, nv) in t.vertices.iter().zip(&n) {
            let axis = Vec3::new(p.x, p.y, 0.0).normalize() * 2.0;
            assert!((p - axis).dot(nv) > 0.0);
        }
    }

    #[test]
    fn saddle_origin_is_vertex() {
        let m = make_saddle_test(SaddleKind::Monkey, 1.0, 0.1).unwrap();
        assert!(m.vertices.iter().any(|v| v.norm() == 0.0));
    }
}
