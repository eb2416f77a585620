//! Δ-wing surrogates by continuation in the boundary level.
//!
//! The strip is `x₂ ∈ [−b/2, b/2]`, meshed over `x₁ ∈ [−0.6 b, 0.6 b]`.
//! The walls carry the level `M`. The two ends carry
//! `min(M, tilted grim reaper of width b lifted by |x₁| tan θ)`, the
//! asymptotic shape of the complete Δ-wing, so that stage solutions differ
//! by more than a constant.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{harmonic_extension, newton, GraphPatch, NewtonOptions, Rect, SolverReport};
use crate::error::{invalid, Error, Result};
use crate::mesh::{HalfSpace, SurfaceMesh, Truncation, Vec3};
use crate::models::params;

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaWingSpec {
    pub width: f64,
    /// Increasing boundary levels.
    pub schedule: Vec<f64>,
    pub h: f64,
    pub tol: f64,
    /// Half-length of the meshed piece along the strip.
    pub half_length: f64,
    /// Stage differences are measured this far from every side.
    pub interior_margin: f64,
}

impl DeltaWingSpec {
    pub fn new(width: f64, schedule: Vec<f64>, h: f64, tol: f64) -> Self {
        DeltaWingSpec {
            width,
            schedule,
            h,
            tol,
            half_length: 0.6 * width,
            interior_margin: 0.1 * width,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DeltaWing {
    pub patch: GraphPatch,
    pub mesh: SurfaceMesh,
    pub report: SolverReport,
    /// Interior sup-norm difference between consecutive stages.
    pub stage_differences: Vec<f64>,
}

/// Tilted grim reaper of width `b > π`, `sec²θ·(−log cos(x₂ cos θ)) + |x₁| tan θ`
/// with `cos θ = π/b`; `+∞` outside the open strip.
pub fn tilted_profile(b: f64, x1: f64, x2: f64) -> f64 {
    let k = PI / b;
    let tan = (1.0 - k * k).sqrt() / k;
    let arg = x2 * k;
    if arg.abs() >= FRAC_PI_2 {
        return f64::INFINITY;
    }
    -(arg.cos().ln()) / (k * k) + x1.abs() * tan
}

pub fn make_delta_wing(spec: &DeltaWingSpec) -> Result<DeltaWing> {
    let b = spec.width;
    if !(b > PI) {
        return Err(Error::WidthTooSmall(b));
    }
    if spec.schedule.is_empty() || spec.schedule.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(invalid("boundary schedule must hold positive finite levels"));
    }
    if spec.schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("boundary schedule must be strictly increasing"));
    }
    if !(spec.h > 0.0 && spec.tol > 0.0 && spec.half_length > 0.0) {
        return Err(invalid("Δ-wing needs positive step, tolerance and length"));
    }
    let domain = Rect::new(-spec.half_length, spec.half_length, -0.5 * b, 0.5 * b);
    let mut patch = GraphPatch::new(domain, spec.h);
    let data = |m: f64| {
        move |x1: f64, x2: f64| {
            if (x2.abs() - 0.5 * b).abs() < 1e-12 * b {
                m
            } else {
                tilted_profile(b, x1, x2).min(m)
            }
        }
    };
    let margin_i = (spec.interior_margin / patch.hx).ceil() as usize;
    let margin_j = (spec.interior_margin / patch.hy).ceil() as usize;
    let inner = |p: &GraphPatch| -> Vec<usize> {
        p.inner_nodes(0)
            .filter(|&(i, j)| i >= margin_i && i + margin_i < p.nx && j >= margin_j && j + margin_j < p.ny)
            .map(|(i, j)| p.idx(i, j))
            .collect()
    };
    let inner_idx = inner(&patch);

    let mut stages = Vec::new();
    let mut differences = Vec::new();
    let mut total_iterations = 0;
    let mut history = Vec::new();
    let mut last = None;
    let mut prev_u: Option<Vec<f64>> = None;
    for &m in &spec.schedule {
        // Warm start: previous solution plus the harmonic extension of the
        // change in boundary data.
        let mut bump = patch.clone();
        bump.u.iter_mut().for_each(|v| *v = 0.0);
        let old = patch.clone();
        patch.set_boundary(data(m));
        for k in 0..patch.u.len() {
            if patch.fixed[k] {
                bump.u[k] = patch.u[k] - if prev_u.is_some() { old.u[k] } else { 0.0 };
            }
        }
        harmonic_extension(&mut bump)?;
        for k in 0..patch.u.len() {
            if !patch.fixed[k] {
                patch.u[k] = if prev_u.is_some() { old.u[k] } else { 0.0 } + bump.u[k];
            }
        }
        let report = newton(&mut patch, NewtonOptions::new(spec.tol))?;
        total_iterations += report.iterations;
        history.extend_from_slice(&report.residual_history);
        stages.push((m, report.residual));
        if let Some(prev) = &prev_u {
            let d = inner_idx.iter().map(|&k| (patch.u[k] - prev[k]).abs()).fold(0.0, f64::max);
            differences.push(d);
        }
        prev_u = Some(patch.u.clone());
        last = Some(report);
    }
    let last = last.unwrap();
    let report = SolverReport {
        iterations: total_iterations,
        residual: last.residual,
        residual_history: history,
        stages,
    };

    let m_final = *spec.schedule.last().unwrap();
    let l = spec.half_length;
    // Below the lowest end value the meshed piece contains every point of
    // the surrogate over the box.
    let end_min = (0..patch.ny).map(|j| patch.u[patch.idx(0, j)]).fold(f64::INFINITY, f64::min);
    let mut mesh = patch.to_mesh();
    mesh.meta.generator = "delta-wing".into();
    mesh.meta.params = params(&[("width", b), ("h", spec.h), ("m_final", m_final), ("half_length", l)]);
    mesh.meta.height_cap = Some(m_final);
    mesh.meta.strip_width = Some(b);
    mesh.meta.truncation = Some(Truncation {
        half_spaces: vec![
            HalfSpace::new(Vec3::z(), end_min),
            HalfSpace::new(Vec3::x(), l),
            HalfSpace::new(-Vec3::x(), l),
        ],
        area_growth: 4.0 * PI,
    });
    Ok(DeltaWing {
        patch,
        mesh,
        report,
        stage_differences: differences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_must_exceed_pi() {
        let spec = DeltaWingSpec::new(PI, vec![5.0], 0.1, 1e-6);
        assert!(matches!(make_delta_wing(&spec), Err(Error::WidthTooSmall(_))));
        let spec = DeltaWingSpec::new(4.0, vec![5.0, 5.0], 0.1, 1e-6);
        assert!(make_delta_wing(&spec).is_err());
    }

    #[test]
    fn coarse_continuation_converges() {
        let b = 1.2 * PI;
        let spec = DeltaWingSpec::new(b, vec![3.0, 6.0, 12.0], b / 40.0, 1e-8);
        let dw = make_delta_wing(&spec).unwrap();
        assert!(dw.report.residual < 1e-8);
        assert_eq!(dw.report.stages.len(), 3);
        assert_eq!(dw.stage_differences.len(), 2);
        assert!(dw.stage_differences[1] < dw.stage_differences[0], "{:?}", dw.stage_differences);
        dw.mesh.validate().unwrap();
    }
}
