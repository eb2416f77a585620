//! Per-vertex curvature by local quadratic fitting.
//!
//! At each vertex the 2-ring is expressed in a tangent frame built from an
//! estimated normal and a height function `w = aξ² + bξη + cη² + dξ + eη`
//! is fitted by least squares. The fitted gradient tilts the frame once and
//! the fit is repeated; the second fit yields ν and the shape operator.
//!
//! Sign convention: `H = κ₁ + κ₂` is positive where the surface bends away
//! from ν (a sphere with outward normal has `H = 2/r`), which makes the
//! translator equation read `H = −⟨ν, e₃⟩`.

use nalgebra::{Matrix2, SMatrix, SVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{e3, SurfaceMesh, Topology, Vec3};

/// Vertices within this many rings of the boundary are flagged.
pub const BOUNDARY_RINGS: usize = 2;

#[derive(Clone, Debug)]
pub struct ShapeDiagnostics {
    pub normal: Vec<Vec3>,
    pub mean: Vec<f64>,
    pub gauss: Vec<f64>,
    /// |A|², squared norm of the second fundamental form.
    pub a_norm_sq: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
    /// `H + ⟨ν, e₃⟩`.
    pub residual: Vec<f64>,
    pub boundary: Vec<bool>,
}

impl ShapeDiagnostics {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| !self.boundary[v])
    }

    pub fn max_interior_abs(&self, field: &[f64]) -> f64 {
        self.interior().map(|v| field[v].abs()).fold(0.0, f64::max)
    }

    pub fn max_interior_residual(&self) -> f64 {
        self.max_interior_abs(&self.residual)
    }

    /// Diagnostics of the oppositely oriented surface.
    pub fn flipped(&self) -> Self {
        let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<_>>();
        let normal: Vec<Vec3> = self.normal.iter().map(|n| -n).collect();
        let mean = neg(&self.mean);
        let residual = mean
            .iter()
            .zip(&normal)
            .map(|(h, n)| h + n.dot(&e3()))
            .collect();
        ShapeDiagnostics {
            kappa1: neg(&self.kappa2),
            kappa2: neg(&self.kappa1),
            gauss: self.gauss.clone(),
            a_norm_sq: self.a_norm_sq.clone(),
            normal,
            mean,
            residual,
            boundary: self.boundary.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct LocalShape {
    normal: Vec3,
    mean: f64,
    gauss: f64,
    a_norm_sq: f64,
    kappa1: f64,
    kappa2: f64,
}

impl LocalShape {
    fn flat(normal: Vec3) -> Self {
        LocalShape {
            normal,
            mean: 0.0,
            gauss: 0.0,
            a_norm_sq: 0.0,
            kappa1: 0.0,
            kappa2: 0.0,
        }
    }
}

pub fn compute_diagnostics(mesh: &SurfaceMesh) -> Result<ShapeDiagnostics> {
    mesh.validate()?;
    let topo = mesh.topology();
    compute_with_topology(mesh, &topo)
}

pub(crate) fn compute_with_topology(mesh: &SurfaceMesh, topo: &Topology) -> Result<ShapeDiagnostics> {
    let normals = mesh.vertex_normals();
    let shapes: Vec<Result<LocalShape>> = (0..mesh.vertices.len())
        .into_par_iter()
        .map(|v| {
            let boundary = topo.boundary_distance[v] <= BOUNDARY_RINGS;
            let mut ring = topo.ring(v, 2);
            match fit_vertex(mesh, v, &ring, normals[v]) {
                Some(s) => Ok(s),
                None if boundary => {
                    ring = topo.ring(v, 3);
                    Ok(fit_vertex(mesh, v, &ring, normals[v]).unwrap_or(LocalShape::flat(normals[v])))
                }
                None => Err(Error::DegenerateNeighborhood(v)),
            }
        })
        .collect();
    let n = mesh.vertices.len();
    let mut d = ShapeDiagnostics {
        normal: Vec::with_capacity(n),
        mean: Vec::with_capacity(n),
        gauss: Vec::with_capacity(n),
        a_norm_sq: Vec::with_capacity(n),
        kappa1: Vec::with_capacity(n),
        kappa2: Vec::with_capacity(n),
        residual: Vec::with_capacity(n),
        boundary: (0..n).map(|v| topo.boundary_distance[v] <= BOUNDARY_RINGS).collect(),
    };
    for s in shapes {
        let s = s?;
        d.normal.push(s.normal);
        d.mean.push(s.mean);
        d.gauss.push(s.gauss);
        d.a_norm_sq.push(s.a_norm_sq);
        d.kappa1.push(s.kappa1);
        d.kappa2.push(s.kappa2);
        d.residual.push(s.mean + s.normal.dot(&e3()));
    }
    Ok(d)
}

fn tangent_frame(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.6 {
        Vec3::x()
    } else if n.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let t1 = (helper - n * n.dot(&helper)).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

/// Least-squares coefficients `[a, b, c, d, e]` in unscaled coordinates.
fn fit_quadratic(p: &Vec3, pts: &[Vec3], n: &Vec3) -> Option<([f64; 5], (Vec3, Vec3))> {
    if pts.len() < 5 {
        return None;
    }
    let (t1, t2) = tangent_frame(n);
    let scale = pts.iter().map(|q| (q - p).norm()).sum::<f64>() / pts.len() as f64;
    if !(scale > 0.0) {
        return None;
    }
    let mut ata = SMatrix::<f64, 5, 5>::zeros();
    let mut atb = SVector::<f64, 5>::zeros();
    for q in pts {
        let d = (q - p) / scale;
        let (x, y, w) = (d.dot(&t1), d.dot(&t2), d.dot(n));
        let row = SVector::<f64, 5>::from([x * x, x * y, y * y, x, y]);
        ata += row * row.transpose();
        atb += row * w;
    }
    let eig = ata.symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(lo > 1e-10 * hi) {
        return None;
    }
    let sol = ata.cholesky()?.solve(&atb);
    Some((
        [sol[0] / scale, sol[1] / scale, sol[2] / scale, sol[3], sol[4]],
        (t1, t2),
    ))
}

fn fit_vertex(mesh: &SurfaceMesh, v: usize, ring: &[usize], normal: Vec3) -> Option<LocalShape> {
    if normal.norm() == 0.0 {
        return None;
    }
    let p = mesh.vertices[v];
    let pts: Vec<Vec3> = ring.iter().map(|&w| mesh.vertices[w]).collect();
    let (c, (t1, t2)) = fit_quadratic(&p, &pts, &normal)?;
    let tilted = (normal - t1 * c[3] - t2 * c[4]).normalize();
    let (c, (t1, t2)) = fit_quadratic(&p, &pts, &tilted)?;
    Some(shape_from_fit(&c, &tilted, &t1, &t2))
}

fn shape_from_fit(c: &[f64; 5], n: &Vec3, t1: &Vec3, t2: &Vec3) -> LocalShape {
    let g = nalgebra::Vector2::new(c[3], c[4]);
    let w = (1.0 + g.norm_squared()).sqrt();
    let hess = Matrix2::new(2.0 * c[0], c[1], c[1], 2.0 * c[2]);
    let first = Matrix2::identity() + g * g.transpose();
    // Shape operator with respect to the graph normal, sign flipped so that
    // bending away from ν counts positive.
    let second = hess / w;
    let shape = -(first.try_inverse().unwrap_or_else(Matrix2::identity) * second);
    let mean = shape.trace();
    let gauss = shape.determinant();
    let a_norm_sq = (shape * shape).trace();
    let disc = (0.25 * mean * mean - gauss).max(0.0).sqrt();
    let normal = (n - t1 * g.x - t2 * g.y) / w;
    LocalShape {
        normal,
        mean,
        gauss,
        a_norm_sq,
        kappa1: 0.5 * mean + disc,
        kappa2: 0.5 * mean - disc,
    }
}

/// Identity defect `max | |A|² + 2K − H² |` and quasiconformal slack
/// `max (|A|² + 2K − 1)` over interior vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiconformalDefect {
    pub identity_defect: f64,
    pub inequality_slack: f64,
}

pub fn quasiconformal_defect(diag: &ShapeDiagnostics) -> QuasiconformalDefect {
    let mut identity_defect = 0.0f64;
    let mut inequality_slack = f64::NEG_INFINITY;
    for v in diag.interior() {
        let a2 = diag.a_norm_sq[v];
        let k = diag.gauss[v];
        let h = diag.mean[v];
        identity_defect = identity_defect.max((a2 + 2.0 * k - h * h).abs());
        inequality_slack = inequality_slack.max(a2 + 2.0 * k - 1.0);
    }
    QuasiconformalDefect {
        identity_defect,
        inequality_slack,
    }
}
