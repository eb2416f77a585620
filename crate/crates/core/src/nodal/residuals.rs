//! Elliptic identities on translators:
//! `Δf + ⟨∇f, e₃⟩ = 0` for `f = ⟨V, x − p⟩` with horizontal `V`, and
//! `ΔH + ⟨∇H, e₃⟩ + |A|²H = 0`.

use serde::{Deserialize, Serialize};

use super::level_set::zero_set;
use super::{assemble, topology_and_h, NodalSet, PlaneSpec};
use crate::error::{invalid, Result};
use crate::geometry::{gradient_unchecked, laplacian_unchecked, ShapeDiagnostics, BOUNDARY_RINGS};
use crate::mesh::{e3, SurfaceMesh, Vec3};

/// Rings excluded around the region where the fitted fields are one-sided.
const H_EQUATION_MARGIN: usize = BOUNDARY_RINGS + 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalResidual {
    /// Max over interior vertices.
    pub max: f64,
    /// Host failed the translator check; the identity need not hold.
    pub flagged: bool,
}

/// Max interior `|Δf + ⟨∇f, e₃⟩|` for `f = ⟨V, x − p⟩`.
pub fn nodal_pde_residual(mesh: &SurfaceMesh, plane: &PlaneSpec) -> Result<NodalResidual> {
    mesh.validate()?;
    let (topo, _) = topology_and_h(mesh);
    let f: Vec<f64> = mesh.vertices.iter().map(|x| plane.eval(x)).collect();
    let lap = laplacian_unchecked(mesh, &f);
    let grad = gradient_unchecked(mesh, &f);
    let max = (0..mesh.vertices.len())
        .filter(|&v| topo.is_interior(v, BOUNDARY_RINGS))
        .map(|v| (lap[v] + grad[v].dot(&e3())).abs())
        .fold(0.0, f64::max);
    Ok(NodalResidual {
        max,
        flagged: !mesh.meta.translator,
    })
}

fn check_lengths(mesh: &SurfaceMesh, diag: &ShapeDiagnostics) -> Result<()> {
    if diag.len() != mesh.vertices.len() {
        return Err(invalid(format!(
            "diagnostics for {} vertices, mesh has {}",
            diag.len(),
            mesh.vertices.len()
        )));
    }
    mesh.validate()
}

/// Max of `|ΔH + ⟨∇H, e₃⟩ + |A|²H|` over vertices more than
/// `BOUNDARY_RINGS + 2` rings from the boundary.
pub fn h_equation_residual(mesh: &SurfaceMesh, diag: &ShapeDiagnostics) -> Result<f64> {
    check_lengths(mesh, diag)?;
    let (topo, _) = topology_and_h(mesh);
    let lap = laplacian_unchecked(mesh, &diag.mean);
    let grad = gradient_unchecked(mesh, &diag.mean);
    Ok((0..mesh.vertices.len())
        .filter(|&v| topo.is_interior(v, H_EQUATION_MARGIN))
        .map(|v| (lap[v] + grad[v].dot(&e3()) + diag.a_norm_sq[v] * diag.mean[v]).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HZeroReport {
    pub set: NodalSet,
    /// Total turning of ν along each component (sum of angle increments).
    pub normal_variation: Vec<f64>,
    /// Every component has numerically constant ν (or the set is empty).
    pub mean_convex_candidate: bool,
    /// `h_equation_residual` of the same fields, for judging trust.
    pub h_equation_residual: f64,
}

/// Zero set of the fitted `H` over triangles away from the boundary.
/// `tol` snaps `|H| < tol` to zero; `variation_tol` decides "constant ν".
pub fn extract_h_zero(mesh: &SurfaceMesh, diag: &ShapeDiagnostics, tol: f64, variation_tol: f64) -> Result<HZeroReport> {
    check_lengths(mesh, diag)?;
    let (topo, h) = topology_and_h(mesh);
    let mask: Vec<bool> = mesh
        .triangles
        .iter()
        .map(|tri| tri.iter().all(|&v| !diag.boundary[v]))
        .collect();
    let graph = zero_set(mesh, &topo, &diag.mean, tol, Some(&mask));
    let set = assemble(&graph, h);
    // ν at each graph node by interpolating the fitted normals.
    let node_normal: Vec<Vec3> = graph
        .keys
        .iter()
        .zip(&graph.params)
        .map(|(k, &s)| match *k {
            super::level_set::NodeKey::Vertex(v) => diag.normal[v],
            super::level_set::NodeKey::Edge(a, b) => (diag.normal[a] * (1.0 - s) + diag.normal[b] * s).normalize(),
        })
        .collect();
    let mut variation = vec![0.0; set.components.len()];
    let index: std::collections::HashMap<[u64; 3], usize> = graph
        .positions
        .iter()
        .enumerate()
        .map(|(i, p)| ([p.x.to_bits(), p.y.to_bits(), p.z.to_bits()], i))
        .collect();
    for (c, arcs) in set.components.iter().enumerate() {
        for &a in arcs {
            let pts = &set.arcs[a].points;
            for w in pts.windows(2) {
                let n0 = node_normal[index[&w[0].map(f64::to_bits)]];
                let n1 = node_normal[index[&w[1].map(f64::to_bits)]];
                variation[c] += n0.dot(&n1).clamp(-1.0, 1.0).acos();
            }
        }
    }
    let candidate = variation.iter().all(|&v| v < variation_tol);
    Ok(HZeroReport {
        set,
        normal_variation: variation,
        mean_convex_candidate: candidate,
        h_equation_residual: h_equation_residual(mesh, diag)?,
    })
}
