use nalgebra::{Matrix3, Rotation3, Unit};

use crate::error::{invalid, Result};
use crate::mesh::{HalfSpace, SurfaceMesh, Vec3};

/// Orientation-preserving isometry `x ↦ Rx + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion {
    rotation: Matrix3<f64>,
    translation: Vec3,
}

impl RigidMotion {
    pub fn new(rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        let defect = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if defect > 1e-12 {
            return Err(invalid(format!("rotation is not orthogonal (|RᵀR − I| = {defect:e})")));
        }
        if rotation.determinant() < 0.0 {
            return Err(invalid("rotation has determinant −1"));
        }
        Ok(RigidMotion {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        RigidMotion {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn translation(b: Vec3) -> Self {
        RigidMotion {
            rotation: Matrix3::identity(),
            translation: b,
        }
    }

    /// Counterclockwise rotation by `angle` about the vertical line through
    /// `(x1, x2, ·)`.
    pub fn about_vertical_line(angle: f64, x1: f64, x2: f64) -> Self {
        let rotation = *Rotation3::from_axis_angle(&Unit::new_unchecked(Vec3::z()), angle).matrix();
        let c = Vec3::new(x1, x2, 0.0);
        RigidMotion {
            rotation,
            translation: c - rotation * c,
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation_part(&self) -> &Vec3 {
        &self.translation
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.rotation * x + self.translation
    }

    pub fn then(&self, next: &RigidMotion) -> RigidMotion {
        RigidMotion {
            rotation: next.rotation * self.rotation,
            translation: next.rotation * self.translation + next.translation,
        }
    }
}

pub fn apply_motion(mesh: &SurfaceMesh, m: &RigidMotion) -> SurfaceMesh {
    let mut out = mesh.clone();
    if *m == RigidMotion::identity() {
        return out;
    }
    for v in &mut out.vertices {
        *v = m.apply(v);
    }
    if let Some(tr) = &mut out.meta.truncation {
        for h in &mut tr.half_spaces {
            let n = m.rotation * h.normal();
            *h = HalfSpace::new(n, h.offset + n.dot(&m.translation));
        }
    }
    if let Some(cap) = &mut out.meta.height_cap {
        // Only vertical shifts keep the cap meaningful.
        if (m.rotation * Vec3::z() - Vec3::z()).norm() < 1e-12 {
            *cap += m.translation.z;
        }
    }
    out
}

/// Image of the mesh under `x ↦ x / scale − shift`, keeping metadata consistent.
pub fn scale_and_shift(mesh: &SurfaceMesh, scale: f64, shift: Vec3) -> SurfaceMesh {
    let mut out = mesh.clone();
    for v in &mut out.vertices {
        *v = *v / scale - shift;
    }
    if let Some(tr) = &mut out.meta.truncation {
        for h in &mut tr.half_spaces {
            let n = h.normal();
            *h = HalfSpace::new(n, h.offset / scale - n.dot(&shift));
        }
    }
    if let Some(cap) = &mut out.meta.height_cap {
        *cap = *cap / scale - shift.z;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reflections_and_shears() {
        let refl = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(RigidMotion::new(refl, Vec3::zeros()).is_err());
        let mut shear = Matrix3::identity();
        shear[(0, 1)] = 1e-6;
        assert!(RigidMotion::new(shear, Vec3::zeros()).is_err());
    }

    #[test]
    fn rotation_about_line_fixes_the_line() {
        let m = RigidMotion::about_vertical_line(0.7, 0.3, -1.2);
        let p = Vec3::new(0.3, -1.2, 5.0);
        assert!((m.apply(&p) - p).norm() < 1e-14);
        let q = Vec3::new(1.3, -1.2, 0.0);
        let r = m.apply(&q);
        assert!((r - Vec3::new(0.3 + 0.7f64.cos(), -1.2 + 0.7f64.sin(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn composition() {
        let a = RigidMotion::about_vertical_line(0.4, 1.0, 0.0);
        let b = RigidMotion::translation(Vec3::new(0.0, 0.0, 2.0));
        let x = Vec3::new(0.5, 0.25, -1.0);
        assert!((a.then(&b).apply(&x) - b.apply(&a.apply(&x))).norm() < 1e-14);
    }
}
