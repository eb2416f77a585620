//! Fixture meshes shared by the benchmarks.

use soliton_core::models::{make_bowl, make_grim_reaper, StripSpec};
use soliton_core::{Result, SurfaceMesh};

/// Grim reaper over `|x₂| ≤ 2` with step `h`, capped at 8.
pub fn grim_reaper(h: f64) -> Result<SurfaceMesh> {
    make_grim_reaper(&StripSpec::grim_reaper(2.0, h, 8.0)?, 0.0)
}

pub fn bowl(h: f64) -> Result<SurfaceMesh> {
    make_bowl(3.0, h)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_build() {
        assert!(super::grim_reaper(0.1).unwrap().validate().is_ok());
        assert!(super::bowl(0.1).unwrap().validate().is_ok());
    }
}
