//! Blow-downs, Huisken monotonicity and additivity of the entropy.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{entropy, EntropySearch, FValue, GaussianIntegrator, GaussianWeight};
use crate::error::{invalid, Error, Result};
use crate::geometry::{compute_diagnostics, scale_and_shift};
use crate::mesh::{e3, SurfaceMesh, Vec3};

/// Height cap needed at scale τ so that the image covers six Gaussian
/// widths around the origin.
pub fn blowdown_required_cap(tau: f64) -> f64 {
    tau * tau + 6.0 * tau
}

/// `F_{(0,1)}(Σ/τ − τe₃)` of an already built mesh.
pub fn blowdown_of_mesh(mesh: &SurfaceMesh, tau: f64) -> Result<FValue> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("blow-down scale must be positive, got {tau}")));
    }
    let required = blowdown_required_cap(tau);
    match mesh.meta.height_cap {
        Some(cap) if cap >= required => {}
        cap => {
            return Err(Error::GeneratorHeightInsufficient {
                cap: cap.unwrap_or(f64::NEG_INFINITY),
                required,
            })
        }
    }
    let image = scale_and_shift(mesh, tau, tau * e3());
    let w = GaussianWeight::new(Vec3::zeros(), 1.0)?;
    Ok(GaussianIntegrator::new(&image)?.eval(&w))
}

/// Builds a mesh from `generator(cap)` with the required cap and evaluates
/// its blow-down at scale τ.
pub fn blowdown_f(generator: impl Fn(f64) -> Result<SurfaceMesh>, tau: f64) -> Result<FValue> {
    let mesh = generator(blowdown_required_cap(tau))?;
    blowdown_of_mesh(&mesh, tau)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuiskenReport {
    pub taus: Vec<f64>,
    pub values: Vec<FValue>,
    /// Max interior translator residual, when checked.
    pub translator_residual: Option<f64>,
    pub warning: Option<String>,
}

impl HuiskenReport {
    /// Largest decrease between consecutive values (0 when nondecreasing).
    pub fn max_decrease(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[0].value - w[1].value).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.max_decrease() <= tol
    }
}

fn translator_warning(mesh: &SurfaceMesh, threshold: f64) -> Result<(Option<f64>, Option<String>)> {
    if !mesh.meta.translator {
        return Ok((None, Some(format!("{} is not flagged as a translator", mesh.meta.generator))));
    }
    let res = compute_diagnostics(mesh)?.max_interior_residual();
    let warning =
        (!(res < threshold)).then(|| format!("translator residual {res:.3e} exceeds {threshold:.1e}"));
    Ok((Some(res), warning))
}

/// `F` at `(y + τe₃, t + τ)` for each τ. The inequality behind the check
/// needs a translator; other surfaces get a warning attached.
pub fn huisken_monotonicity_check(
    mesh: &SurfaceMesh,
    y: Vec3,
    t: f64,
    taus: &[f64],
    residual_threshold: f64,
) -> Result<HuiskenReport> {
    mesh.validate()?;
    let integ = GaussianIntegrator::new(mesh)?;
    let (translator_residual, warning) = translator_warning(mesh, residual_threshold)?;
    let values = taus
        .iter()
        .map(|&tau| Ok(integ.eval(&GaussianWeight::new(y + tau * e3(), t + tau)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HuiskenReport {
        taus: taus.to_vec(),
        values,
        translator_residual,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_union: f64,
    /// `λ(m₁ ⊔ m₂) − λ(m₁) − λ(m₂)`.
    pub defect: f64,
    pub tail_bound: f64,
    pub argmax_t_union: f64,
    pub t_max: f64,
    pub warnings: Vec<String>,
    pub caveat: String,
}

pub fn check_additivity(
    m1: &SurfaceMesh,
    m2: &SurfaceMesh,
    search: &EntropySearch,
    residual_threshold: f64,
) -> Result<AdditivityReport> {
    let crossings = meshes_intersect(m1, m2);
    if crossings > 0 {
        return Err(Error::MeshesIntersect(crossings));
    }
    let mut warnings = Vec::new();
    for m in [m1, m2] {
        if let (_, Some(w)) = translator_warning(m, residual_threshold)? {
            warnings.push(w);
        }
    }
    let a = entropy(m1, search)?;
    let b = entropy(m2, search)?;
    let u = entropy(&m1.union(m2), search)?;
    Ok(AdditivityReport {
        lambda1: a.value,
        lambda2: b.value,
        lambda_union: u.value,
        defect: u.value - a.value - b.value,
        tail_bound: a.tail_bound + b.tail_bound + u.tail_bound,
        argmax_t_union: u.argmax.t0,
        t_max: u.t_range.1,
        warnings,
        caveat: "for disjoint unions the supremum is approached as t0 grows; the finite t_max bounds the achievable defect"
            .into(),
    })
}

fn segment_hits_triangle(p: &Vec3, q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> bool {
    let dir = q - p;
    let e1 = b - a;
    let e2 = c - a;
    let pv = dir.cross(&e2);
    let det = e1.dot(&pv);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let tv = p - a;
    let u = tv.dot(&pv) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = tv.cross(&e1);
    let v = dir.dot(&qv) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let s = e2.dot(&qv) * inv;
    (0.0..=1.0).contains(&s)
}

fn edge_triangle_crossings(edges_of: &SurfaceMesh, tris_of: &SurfaceMesh) -> usize {
    if edges_of.triangles.is_empty() || tris_of.triangles.is_empty() {
        return 0;
    }
    let cell = 2.0 * tris_of.mean_edge_length().max(1e-12);
    let key = |x: &Vec3| {
        (
            (x.x / cell).floor() as i64,
            (x.y / cell).floor() as i64,
            (x.z / cell).floor() as i64,
        )
    };
    let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (t, tri) in tris_of.triangles.iter().enumerate() {
        let pts = tri.map(|v| tris_of.vertices[v]);
        let lo = key(&pts.iter().fold(pts[0], |m, p| m.inf(p)));
        let hi = key(&pts.iter().fold(pts[0], |m, p| m.sup(p)));
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                for k in lo.2..=hi.2 {
                    buckets.entry((i, j, k)).or_default().push(t);
                }
            }
        }
    }
    let mut edges = std::collections::HashSet::new();
    for tri in &edges_of.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut hits = std::collections::HashSet::new();
    for (a, b) in edges {
        let (p, q) = (edges_of.vertices[a], edges_of.vertices[b]);
        let lo = key(&p.inf(&q));
        let hi = key(&p.sup(&q));
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                for k in lo.2..=hi.2 {
                    if let Some(list) = buckets.get(&(i, j, k)) {
                        for &t in list {
                            let [x, y, z] = tris_of.triangles[t].map(|v| tris_of.vertices[v]);
                            if segment_hits_triangle(&p, &q, &x, &y, &z) {
                                hits.insert((a, b, t));
                            }
                        }
                    }
                }
            }
        }
    }
    hits.len()
}

/// Number of edge/triangle crossings between the two meshes (coplanar
/// overlaps are not detected).
pub fn meshes_intersect(m1: &SurfaceMesh, m2: &SurfaceMesh) -> usize {
    edge_triangle_crossings(m1, m2) + edge_triangle_crossings(m2, m1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_motion, RigidMotion};
    use crate::models::{make_round_cylinder, make_vertical_plane};

    #[test]
    fn plane_blowdown_is_one() {
        let plane = |cap: f64| make_vertical_plane(cap, 0.1);
        for &tau in &[1.0, 2.0] {
            let f = blowdown_f(plane, tau).unwrap();
            assert!((f.value - 1.0).abs() < 1e-4 + f.tail_bound, "{f:?}");
        }
        let small = make_vertical_plane(5.0, 0.2).unwrap();
        assert!(matches!(
            blowdown_of_mesh(&small, 3.0),
            Err(Error::GeneratorHeightInsufficient { .. })
        ));
    }

    #[test]
    fn plane_monotonicity_is_constant_and_cylinder_is_flagged() {
        let plane = make_vertical_plane(12.0, 0.1).unwrap();
        let r = huisken_monotonicity_check(&plane, Vec3::zeros(), 0.5, &[0.0, 0.5, 1.0], 1e-6).unwrap();
        assert!(r.warning.is_none());
        for f in &r.values {
            assert!((f.value - 1.0).abs() < 1e-4);
        }
        let cyl = make_round_cylinder(1.0, 10.0, 0.1).unwrap();
        let r = huisken_monotonicity_check(&cyl, Vec3::zeros(), 0.5, &[0.0, 1.0], 1e-2).unwrap();
        assert!(r.warning.is_some());
    }

    #[test]
    fn intersection_detection() {
        let a = make_vertical_plane(1.0, 0.2).unwrap();
        let rot = RigidMotion::about_vertical_line(std::f64::consts::FRAC_PI_2, 0.0, 0.0);
        let b = apply_motion(&a, &rot);
        assert!(meshes_intersect(&a, &b) > 0);
        let c = apply_motion(&a, &RigidMotion::translation(Vec3::new(0.01, 0.0, 0.0)));
        assert_eq!(meshes_intersect(&a, &c), 0);
        let search = EntropySearch::default();
        assert!(matches!(check_additivity(&a, &b, &search, 1e-6), Err(Error::MeshesIntersect(_))));
    }
}
