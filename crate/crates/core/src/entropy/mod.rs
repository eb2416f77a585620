//! Gaussian density functional `F_{x₀,t₀}`, entropy search, blow-down
//! limits, monotonicity and additivity checks, and area growth.

mod area;
mod gauss;
mod limits;
mod search;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use area::{area_growth_ratio, ball_area, AreaGrowth, PLANE_RATIO};
pub use gauss::MidEdgeQuadrature;
pub use limits::{
    blowdown_f, blowdown_of_mesh, blowdown_required_cap, check_additivity, huisken_monotonicity_check,
    meshes_intersect, AdditivityReport, HuiskenReport,
};
pub use search::{entropy, EntropyResult, EntropySearch, TraceEntry};

use crate::error::{invalid, Error, Result};
use crate::mesh::{SurfaceMesh, Truncation, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianWeight {
    pub x0: [f64; 3],
    pub t0: f64,
}

impl GaussianWeight {
    pub fn new(x0: Vec3, t0: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) || !x0.iter().all(|v| v.is_finite()) {
            return Err(invalid(format!("Gaussian weight needs finite x0 and t0 > 0, got t0 = {t0}")));
        }
        Ok(GaussianWeight {
            x0: [x0.x, x0.y, x0.z],
            t0,
        })
    }

    pub fn center(&self) -> Vec3 {
        Vec3::from(self.x0)
    }
}

/// A quadrature value with a bound on the contribution of the surface
/// omitted by the truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Bound on `(4πt)⁻¹ ∫ e^{−|x−x₀|²/4t}` over the omitted surface, which lies
/// at distance ≥ `clearance(x₀)` and has area growth `C R²`:
/// `(C/π)(s₀ + 1)e^{−s₀}` with `s₀ = d²/4t`.
pub fn tail_bound(truncation: &Truncation, x0: &Vec3, t: f64) -> f64 {
    let d = truncation.clearance(x0);
    let s0 = d * d / (4.0 * t);
    truncation.area_growth / PI * (s0 + 1.0) * (-s0).exp()
}

/// Precomputed quadrature for repeated evaluation on one mesh.
#[derive(Clone, Debug)]
pub struct GaussianIntegrator {
    quad: MidEdgeQuadrature,
    truncation: Truncation,
}

impl GaussianIntegrator {
    pub fn new(mesh: &SurfaceMesh) -> Result<Self> {
        let truncation = mesh.meta.truncation.clone().ok_or(Error::MissingTruncationMetadata)?;
        Ok(GaussianIntegrator {
            quad: MidEdgeQuadrature::new(mesh),
            truncation,
        })
    }

    pub fn eval(&self, w: &GaussianWeight) -> FValue {
        let x0 = w.center();
        FValue {
            value: self.quad.f_value(&x0, w.t0),
            tail_bound: tail_bound(&self.truncation, &x0, w.t0),
        }
    }

    pub fn quadrature(&self) -> &MidEdgeQuadrature {
        &self.quad
    }
}

/// `F_{x₀,t₀}` of the mesh with its tail bound.
pub fn f_functional(mesh: &SurfaceMesh, w: &GaussianWeight) -> Result<FValue> {
    mesh.validate()?;
    Ok(GaussianIntegrator::new(mesh)?.eval(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_round_cylinder, make_vertical_plane};

    #[test]
    fn plane_values() {
        let m = make_vertical_plane(10.0, 0.1).unwrap();
        let t = 0.8;
        let f = f_functional(&m, &GaussianWeight::new(Vec3::new(0.0, 0.3, -0.2), t).unwrap()).unwrap();
        assert!((f.value - 1.0).abs() < 1e-4, "{f:?}");
        assert!(f.tail_bound < 1e-10);
        let d = 0.7;
        let f = f_functional(&m, &GaussianWeight::new(Vec3::new(d, 0.0, 0.0), t).unwrap()).unwrap();
        assert!((f.value - (-d * d / (4.0 * t)).exp()).abs() < 1e-4);
    }

    #[test]
    fn cylinder_closed_form() {
        let r = 1.0;
        let m = make_round_cylinder(r, 24.0, 0.04).unwrap();
        for &t in &[0.3, 0.5, 1.5] {
            let f = f_functional(&m, &GaussianWeight::new(Vec3::zeros(), t).unwrap()).unwrap();
            let exact = r * (PI / t).sqrt() * (-r * r / (4.0 * t)).exp();
            assert!((f.value - exact).abs() < 1e-3 + f.tail_bound, "t {t}: {} vs {exact}", f.value);
        }
    }

    #[test]
    fn requires_truncation_metadata() {
        let mut m = make_vertical_plane(1.0, 0.2).unwrap();
        m.meta.truncation = None;
        let w = GaussianWeight::new(Vec3::zeros(), 1.0).unwrap();
        assert!(matches!(f_functional(&m, &w), Err(Error::MissingTruncationMetadata)));
        assert!(GaussianWeight::new(Vec3::zeros(), 0.0).is_err());
    }
}
