//! Numerical laboratory for two-dimensional translating solitons of mean
//! curvature flow in ℝ³.
//!
//! * [`geometry`]: curvature diagnostics, surface Laplacian, rigid motions.
//! * [`models`]: vertical plane, (tilted) grim reaper, bowl and controls.
//! * [`pde`]: Newton solver for the translator graph equation and Δ-wings.
//! * [`entropy`]: Gaussian-weighted area, entropy search, blow-down limits.
//! * [`slab`]: projections, convex-hull classification, boundary growth.
//! * [`nodal`]: plane sections, nodal structure and the `{H = 0}` set.

pub mod entropy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod models;
pub mod nodal;
pub mod pde;
pub mod slab;

pub use error::{Error, Result};
pub use geometry::{apply_motion, compute_diagnostics, quasiconformal_defect, RigidMotion, ShapeDiagnostics};
pub use entropy::{entropy, f_functional, EntropyResult, EntropySearch, FValue, GaussianWeight};
pub use mesh::{e3, HalfSpace, MeshMeta, Orientation, SurfaceMesh, Truncation, Vec3};
pub use nodal::{plane_section, NodalSet, PlaneSpec};
pub use pde::{make_delta_wing, solve_translator_graph, DeltaWingSpec};
pub use slab::{hull_classify, project, HullClassification, HullKind};
