use std::f64::consts::{FRAC_PI_2, PI};

use super::{params, StripSpec, DOWNWARD_GRAPH};
use crate::error::{invalid, Error, Result};
use crate::mesh::{HalfSpace, MeshMeta, Orientation, SurfaceMesh, Truncation, Vec3};

/// Area-growth bound used for tail estimates: a convex surface inside a ball
/// has less area than the bounding sphere.
const CONVEX_AREA_GROWTH: f64 = 4.0 * PI;

/// Builds the profile-graded mesh shared by the grim reaper generators.
///
/// The profile parameter σ runs uniformly over `[−σ_max, σ_max]`; for the
/// untilted profile `x = atan(sinh σ)` and `f = log cosh σ`, so σ is exactly
/// the arclength of the curve `x₃ = −log cos x`.
fn graded_cylinder(
    k: f64,
    sigma_max: f64,
    dsigma: f64,
    x1_center: f64,
    extent: f64,
    h: f64,
    slope2: f64,
) -> SurfaceMesh {
    let half = ((sigma_max / dsigma).ceil() as usize).max(2);
    let ds = sigma_max / half as f64;
    let n1 = 2 * half + 1;
    let n2 = ((2.0 * extent / h).ceil() as usize).max(2);
    let d2 = 2.0 * extent / n2 as f64;
    let mut mesh = SurfaceMesh::from_grid(n1, n2 + 1, |i, j| {
        let s = (i as f64 - half as f64) * ds;
        let x1 = x1_center + s.sinh().atan() / k;
        let x2 = -extent + j as f64 * d2;
        let f = s.cosh().ln() / (k * k);
        Vec3::new(x1, x2, f + x2 * slope2)
    });
    // ∂σ × ∂x₂ points up; the translator normal points down.
    mesh.orientation = Orientation::Reversed;
    mesh
}

/// Grim reaper cylinder `x₃ = −log cos(x₁ − shift + π/2)` over the strip
/// `shift − π < x₁ < shift`, invariant in x₂ ∈ [−extent, extent], capped at
/// `x₃ ≤ cap`. `shift = 0` reproduces the strip `(−π, 0)`.
pub fn make_grim_reaper(spec: &StripSpec, shift: f64) -> Result<SurfaceMesh> {
    spec.check()?;
    if (spec.width - PI).abs() > 1e-12 {
        return Err(invalid(format!("grim reaper strip width is π, got {}", spec.width)));
    }
    let min_cap = (2.0 * spec.h).cosh().ln();
    if !(spec.cap > min_cap) {
        return Err(Error::ClippedHeight {
            required: min_cap,
            cap: spec.cap,
        });
    }
    let sigma_max = spec.cap.exp().acosh();
    let mut mesh = graded_cylinder(1.0, sigma_max, spec.h, shift - FRAC_PI_2, spec.extent, spec.h, 0.0);
    mesh.meta = MeshMeta {
        generator: "grim-reaper".into(),
        params: params(&[
            ("extent", spec.extent),
            ("h", spec.h),
            ("cap", spec.cap),
            ("shift", shift),
        ]),
        height_cap: Some(spec.cap),
        truncation: Some(Truncation {
            half_spaces: vec![
                HalfSpace::new(Vec3::z(), spec.cap),
                HalfSpace::new(Vec3::y(), spec.extent),
                HalfSpace::new(-Vec3::y(), spec.extent),
            ],
            area_growth: CONVEX_AREA_GROWTH,
        }),
        translator: true,
        simply_connected: true,
        strip_width: Some(PI),
        orientation_convention: DOWNWARD_GRAPH.into(),
    };
    Ok(mesh)
}

/// Tilted grim reaper
/// `u(x₁, x₂) = sec²θ · (−log cos(x₁ cos θ)) + x₂ tan θ` over
/// `|x₁| < (π/2)/cos θ`, truncated to `x₃ ≤ cap`.
///
/// `spec.width` is ignored; the strip width is `π / cos θ`.
pub fn make_tilted_grim_reaper(theta: f64, spec: &StripSpec) -> Result<SurfaceMesh> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidAngle(theta));
    }
    let k = theta.cos();
    let spec = StripSpec {
        width: PI / k,
        ..*spec
    };
    spec.check()?;
    let tan = theta.tan();
    let profile_cap = spec.cap - spec.extent * tan;
    let min_cap = (2.0 * spec.h).cosh().ln() / (k * k);
    if !(profile_cap > min_cap) {
        return Err(Error::ClippedHeight {
            required: spec.extent * tan + min_cap,
            cap: spec.cap,
        });
    }
    let sigma_max = (k * k * profile_cap).exp().acosh();
    let mut mesh = graded_cylinder(k, sigma_max, spec.h * k * k, 0.0, spec.extent, spec.h, tan);
    mesh.meta = MeshMeta {
        generator: "tilted-grim-reaper".into(),
        params: params(&[
            ("theta", theta),
            ("extent", spec.extent),
            ("h", spec.h),
            ("cap", spec.cap),
        ]),
        height_cap: Some(spec.cap),
        truncation: Some(Truncation {
            half_spaces: vec![
                // x₃ − x₂ tan θ ≤ profile cap
                HalfSpace::new(Vec3::new(0.0, -tan, 1.0), profile_cap),
                HalfSpace::new(Vec3::y(), spec.extent),
                HalfSpace::new(-Vec3::y(), spec.extent),
            ],
            area_growth: CONVEX_AREA_GROWTH,
        }),
        translator: true,
        simply_connected: true,
        strip_width: Some(PI / k),
        orientation_convention: DOWNWARD_GRAPH.into(),
    };
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_diagnostics;

    #[test]
    fn profile_is_exact_and_inside_strip() {
        let spec = StripSpec::grim_reaper(0.5, 0.05, 6.0).unwrap();
        let m = make_grim_reaper(&spec, 0.0).unwrap();
        m.validate().unwrap();
        for v in &m.vertices {
            assert!(v.x > -PI && v.x < 0.0);
            let exact = -(v.x + FRAC_PI_2).cos().ln();
            assert!((v.z - exact).abs() < 1e-9 * (1.0 + exact), "{} vs {}", v.z, exact);
            assert!(v.z <= 6.0 + 1e-12);
        }
        let zmax = m.vertices.iter().map(|v| v.z).fold(0.0, f64::max);
        assert!((zmax - 6.0).abs() < 1e-9);
    }

    #[test]
    fn apex_has_unit_curvature_and_downward_normal() {
        let spec = StripSpec::grim_reaper(0.3, 0.02, 3.0).unwrap();
        let m = make_grim_reaper(&spec, 0.0).unwrap();
        let d = compute_diagnostics(&m).unwrap();
        let mut seen = 0;
        for v in d.interior() {
            if (m.vertices[v].x + FRAC_PI_2).abs() < 1e-12 {
                assert!(m.vertices[v].z.abs() < 1e-15);
                assert!((d.mean[v] - 1.0).abs() < 1e-3, "{}", d.mean[v]);
                assert!((d.normal[v] + Vec3::z()).norm() < 1e-6);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn untilted_limit_matches_grim_reaper() {
        let spec = StripSpec::grim_reaper(0.4, 0.05, 4.0).unwrap();
        let a = make_grim_reaper(&spec, FRAC_PI_2).unwrap();
        let b = make_tilted_grim_reaper(0.0, &spec).unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            assert!((p - q).norm() < 1e-12);
        }
        assert_eq!(a.triangles, b.triangles);
    }

    #[test]
    fn tilted_domain_and_errors() {
        let spec = StripSpec::grim_reaper(0.5, 0.05, 8.0).unwrap();
        let th = PI / 6.0;
        let m = make_tilted_grim_reaper(th, &spec).unwrap();
        let w = m.meta.strip_width.unwrap();
        assert!((w - 3.6276).abs() < 1e-4);
        for v in &m.vertices {
            assert!(v.x.abs() < 0.5 * w);
            assert!(v.z <= 8.0 + 1e-9);
        }
        assert!(matches!(
            make_tilted_grim_reaper(FRAC_PI_2, &spec),
            Err(Error::InvalidAngle(_))
        ));
        let tall = StripSpec::grim_reaper(20.0, 0.05, 5.0).unwrap();
        assert!(matches!(
            make_tilted_grim_reaper(th, &tall),
            Err(Error::ClippedHeight { .. })
        ));
        let bad = StripSpec::new(3.0, 1.0, 0.05, 5.0).unwrap();
        assert!(make_grim_reaper(&bad, 0.0).is_err());
    }
}
