use crate::error::{Error, Result};
use crate::mesh::{SurfaceMesh, Vec3};

fn cot(a: &Vec3, b: &Vec3) -> f64 {
    a.dot(b) / a.cross(b).norm()
}

fn check_len(mesh: &SurfaceMesh, field: &[f64]) -> Result<()> {
    if field.len() != mesh.vertices.len() {
        return Err(Error::InvalidParameter(format!(
            "field has {} values, mesh has {} vertices",
            field.len(),
            mesh.vertices.len()
        )));
    }
    Ok(())
}

/// Cotangent Laplace–Beltrami operator divided by the barycentric vertex
/// area. Values at boundary vertices are one-sided and not meaningful.
pub fn surface_laplacian(mesh: &SurfaceMesh, field: &[f64]) -> Result<Vec<f64>> {
    mesh.validate()?;
    check_len(mesh, field)?;
    Ok(laplacian_unchecked(mesh, field))
}

pub(crate) fn laplacian_unchecked(mesh: &SurfaceMesh, field: &[f64]) -> Vec<f64> {
    let n = mesh.vertices.len();
    let mut acc = vec![0.0; n];
    let mut area = vec![0.0; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let a3 = mesh.triangle_area(t) / 3.0;
        for k in 0..3 {
            let i = tri[k];
            let j = tri[(k + 1) % 3];
            let o = tri[(k + 2) % 3];
            let po = mesh.vertices[o];
            let w = 0.5 * cot(&(mesh.vertices[i] - po), &(mesh.vertices[j] - po));
            let df = field[j] - field[i];
            acc[i] += w * df;
            acc[j] -= w * df;
            area[i] += a3;
        }
    }
    acc.iter().zip(&area).map(|(a, ar)| a / ar).collect()
}

/// Per-triangle tangential gradient averaged to vertices with area weights.
pub fn surface_gradient(mesh: &SurfaceMesh, field: &[f64]) -> Result<Vec<Vec3>> {
    mesh.validate()?;
    check_len(mesh, field)?;
    Ok(gradient_unchecked(mesh, field))
}

pub(crate) fn gradient_unchecked(mesh: &SurfaceMesh, field: &[f64]) -> Vec<Vec3> {
    let n = mesh.vertices.len();
    let mut acc = vec![Vec3::zeros(); n];
    let mut area = vec![0.0; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let cross = mesh.triangle_cross(t);
        let a2 = cross.norm();
        let unit = cross / a2;
        let mut g = Vec3::zeros();
        for k in 0..3 {
            let i = tri[k];
            let e = mesh.vertices[tri[(k + 2) % 3]] - mesh.vertices[tri[(k + 1) % 3]];
            g += unit.cross(&e) * field[i];
        }
        g /= a2;
        let a = 0.5 * a2;
        for &v in tri {
            acc[v] += g * a;
            area[v] += a;
        }
    }
    acc.iter().zip(&area).map(|(g, a)| g / *a).collect()
}
