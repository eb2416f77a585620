//! Discrete differential geometry: curvature diagnostics, the surface
//! Laplacian and rigid motions.

mod diagnostics;
mod laplacian;
mod motion;

pub use diagnostics::{
    compute_diagnostics, quasiconformal_defect, QuasiconformalDefect, ShapeDiagnostics, BOUNDARY_RINGS,
};
pub use laplacian::{surface_gradient, surface_laplacian};
pub(crate) use laplacian::{gradient_unchecked, laplacian_unchecked};
pub use motion::{apply_motion, scale_and_shift, RigidMotion};
