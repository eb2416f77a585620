//! Newton solver for translator graphs `div(Du/W) = 1/W` on rectangles.

mod banded;
mod delta_wing;
mod operator;
mod patch;

use serde::{Deserialize, Serialize};

pub use banded::{BandLu, BandMatrix};
pub use delta_wing::{make_delta_wing, tilted_profile, DeltaWing, DeltaWingSpec};
pub use patch::{GraphPatch, Rect};

use crate::error::{invalid, Error, Result};

/// Fewest free nodes per axis accepted by the solver.
pub const MIN_INTERIOR_NODES: usize = 16;

const MAX_BACKTRACKS: usize = 30;
const BACKTRACK_FACTOR: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    /// Max nodal residual at the returned solution.
    pub residual: f64,
    /// Residual 2-norm before each Newton step and at the end.
    pub residual_history: Vec<f64>,
    /// `(boundary level, final residual)` per continuation stage.
    pub stages: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl NewtonOptions {
    pub fn new(tol: f64) -> Self {
        NewtonOptions {
            tol,
            max_iterations: 60,
        }
    }
}

/// Residual of the discrete operator at every node (0 on fixed nodes).
pub fn residual_field(patch: &GraphPatch) -> Vec<f64> {
    let mut r = vec![0.0; patch.node_count()];
    for j in 1..patch.ny - 1 {
        for i in 1..patch.nx - 1 {
            let k = patch.idx(i, j);
            if !patch.fixed[k] {
                r[k] = operator::local(patch, i, j, false).value;
            }
        }
    }
    r
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Numbering of the free nodes with the shorter grid axis running fastest,
/// which keeps the bandwidth near the short side.
struct Numbering {
    /// Grid index of each unknown.
    nodes: Vec<usize>,
    /// Unknown number of each grid node (`usize::MAX` when fixed).
    unknown: Vec<usize>,
    band: usize,
}

impl Numbering {
    fn new(patch: &GraphPatch) -> Self {
        let (nx, ny) = (patch.nx, patch.ny);
        let mut nodes = Vec::new();
        if nx <= ny {
            for j in 0..ny {
                for i in 0..nx {
                    nodes.push(j * nx + i);
                }
            }
        } else {
            for i in 0..nx {
                for j in 0..ny {
                    nodes.push(j * nx + i);
                }
            }
        }
        nodes.retain(|&k| !patch.fixed[k]);
        let mut unknown = vec![usize::MAX; nx * ny];
        for (n, &k) in nodes.iter().enumerate() {
            unknown[k] = n;
        }
        let mut band = 0;
        for &k in &nodes {
            let (i, j) = (k % nx, k / nx);
            for dj in 0..3 {
                for di in 0..3 {
                    let o = (j + dj - 1) * nx + (i + di - 1);
                    if unknown[o] != usize::MAX {
                        band = band.max(unknown[o].abs_diff(unknown[k]));
                    }
                }
            }
        }
        Numbering { nodes, unknown, band }
    }

    fn gather(&self, field: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&k| field[k]).collect()
    }
}

fn check_patch(patch: &GraphPatch) -> Result<()> {
    if patch.nx < MIN_INTERIOR_NODES + 2 || patch.ny < MIN_INTERIOR_NODES + 2 {
        return Err(invalid(format!(
            "grid {}×{} resolves fewer than {MIN_INTERIOR_NODES} interior nodes per axis",
            patch.nx, patch.ny
        )));
    }
    if !(patch.hx > 0.0 && patch.hy > 0.0) {
        return Err(invalid("grid spacing must be positive"));
    }
    for j in 0..patch.ny {
        for i in 0..patch.nx {
            let k = patch.idx(i, j);
            let edge = i == 0 || j == 0 || i + 1 == patch.nx || j + 1 == patch.ny;
            if edge && !patch.fixed[k] {
                return Err(invalid("nodes on the outer ring must be fixed"));
            }
            if patch.fixed[k] && !patch.u[k].is_finite() {
                return Err(Error::NonFiniteBoundary);
            }
        }
    }
    Ok(())
}

fn free_residual(patch: &GraphPatch, num: &Numbering) -> Vec<f64> {
    num.nodes
        .iter()
        .map(|&k| operator::local(patch, k % patch.nx, k / patch.nx, false).value)
        .collect()
}

/// Newton Jacobian of the free-node residual, in band storage.
pub fn assemble_jacobian(patch: &GraphPatch) -> BandMatrix {
    let num = Numbering::new(patch);
    jacobian(patch, &num)
}

fn jacobian(patch: &GraphPatch, num: &Numbering) -> BandMatrix {
    let nx = patch.nx;
    let mut a = BandMatrix::zeros(num.nodes.len(), num.band, num.band);
    for (row, &k) in num.nodes.iter().enumerate() {
        let (i, j) = (k % nx, k / nx);
        let loc = operator::local(patch, i, j, true);
        for dj in 0..3 {
            for di in 0..3 {
                let col = num.unknown[(j + dj - 1) * nx + (i + di - 1)];
                if col != usize::MAX {
                    a.add(row, col, loc.grad[di][dj]);
                }
            }
        }
    }
    a
}

/// Replaces the free values by the discrete harmonic extension of the
/// fixed ones (5-point Laplacian).
pub fn harmonic_extension(patch: &mut GraphPatch) -> Result<()> {
    let num = Numbering::new(patch);
    if num.nodes.is_empty() {
        return Ok(());
    }
    let nx = patch.nx;
    let (cx, cy) = (1.0 / (patch.hx * patch.hx), 1.0 / (patch.hy * patch.hy));
    let mut a = BandMatrix::zeros(num.nodes.len(), num.band, num.band);
    let mut rhs = vec![0.0; num.nodes.len()];
    for (row, &k) in num.nodes.iter().enumerate() {
        a.add(row, row, -2.0 * (cx + cy));
        for (o, c) in [(k - 1, cx), (k + 1, cx), (k - nx, cy), (k + nx, cy)] {
            match num.unknown[o] {
                usize::MAX => rhs[row] -= c * patch.u[o],
                col => a.add(row, col, c),
            }
        }
    }
    a.factor()?.solve(&mut rhs);
    for (n, &k) in num.nodes.iter().enumerate() {
        patch.u[k] = rhs[n];
    }
    Ok(())
}

/// Damped Newton iteration from the current free values.
pub fn newton(patch: &mut GraphPatch, opts: NewtonOptions) -> Result<SolverReport> {
    check_patch(patch)?;
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let num = Numbering::new(patch);
    let norm2 = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut r = free_residual(patch, &num);
    let mut history = vec![norm2(&r)];
    let mut iterations = 0;
    loop {
        let rmax = max_abs(&r);
        if rmax < opts.tol {
            return Ok(SolverReport {
                iterations,
                residual: rmax,
                residual_history: history,
                stages: Vec::new(),
            });
        }
        if iterations == opts.max_iterations || !rmax.is_finite() {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: rmax,
            });
        }
        let lu = jacobian(patch, &num).factor().map_err(|_| Error::NewtonDiverged {
            iterations,
            residual: rmax,
        })?;
        let mut step: Vec<f64> = r.iter().map(|x| -x).collect();
        lu.solve(&mut step);
        let base = num.gather(&patch.u);
        let r0 = *history.last().unwrap();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            for (n, &k) in num.nodes.iter().enumerate() {
                patch.u[k] = base[n] + alpha * step[n];
            }
            let rt = free_residual(patch, &num);
            let nt = norm2(&rt);
            if nt.is_finite() && nt < (1.0 - 1e-4 * alpha) * r0 {
                accepted = Some((rt, nt));
                break;
            }
            alpha *= BACKTRACK_FACTOR;
        }
        iterations += 1;
        match accepted {
            Some((rt, nt)) => {
                r = rt;
                history.push(nt);
            }
            None => {
                for (n, &k) in num.nodes.iter().enumerate() {
                    patch.u[k] = base[n];
                }
                return Err(Error::NewtonDiverged {
                    iterations,
                    residual: rmax,
                });
            }
        }
    }
}

/// Solves the translator graph equation on `domain` with Dirichlet data
/// `boundary`, starting from the harmonic extension.
pub fn solve_translator_graph(
    domain: &Rect,
    boundary: impl Fn(f64, f64) -> f64,
    h: f64,
    tol: f64,
) -> Result<(GraphPatch, SolverReport)> {
    if !(h > 0.0 && domain.width() > 0.0 && domain.height() > 0.0) {
        return Err(invalid("solver needs a nonempty domain and positive step"));
    }
    let mut patch = GraphPatch::new(*domain, h);
    patch.set_boundary(boundary);
    check_patch(&patch)?;
    harmonic_extension(&mut patch)?;
    let report = newton(&mut patch, NewtonOptions::new(tol))?;
    Ok((patch, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn jacobian_matches_directional_differences() {
        let mut patch = GraphPatch::with_nodes(Rect::centered(1.0, 0.8), 19, 21);
        patch.fill(|x, y| 0.6 * x * x + 0.3 * x * y - 0.4 * y * y * y + x);
        let mut s = 11u64;
        for k in 0..patch.u.len() {
            patch.u[k] += 0.05 * lcg(&mut s);
        }
        let num = Numbering::new(&patch);
        let jac = jacobian(&patch, &num);
        for _ in 0..4 {
            let dir: Vec<f64> = (0..num.nodes.len()).map(|_| lcg(&mut s)).collect();
            let analytic = jac.mul_vec(&dir);
            let eps = 1e-6;
            let mut plus = patch.clone();
            let mut minus = patch.clone();
            for (n, &k) in num.nodes.iter().enumerate() {
                plus.u[k] += eps * dir[n];
                minus.u[k] -= eps * dir[n];
            }
            let rp = free_residual(&plus, &num);
            let rm = free_residual(&minus, &num);
            let fd: Vec<f64> = rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
            let num_err = fd.iter().zip(&analytic).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(num_err < 1e-6 * scale, "relative {}", num_err / scale);
        }
    }

    #[test]
    fn tilted_plane_is_not_a_translator() {
        let mut patch = GraphPatch::with_nodes(Rect::centered(1.0, 1.0), 20, 20);
        let (a, b) = (0.7, -0.2);
        patch.fill(|x, y| a * x + b * y + 3.0);
        let expected = -1.0 / (1.0 + a * a + b * b).sqrt();
        for (i, j) in patch.inner_nodes(1) {
            let r = residual_field(&patch)[patch.idx(i, j)];
            assert!((r - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_grim_reaper_has_second_order_residual() {
        let errs: Vec<f64> = [0.08, 0.04, 0.02]
            .iter()
            .map(|&h| {
                let mut patch = GraphPatch::new(Rect::centered(1.2, 0.5), h);
                patch.fill(|x, _| -x.cos().ln());
                max_abs(&residual_field(&patch))
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
    }

    #[test]
    fn grim_reaper_strip_is_reproduced() {
        let margin = 0.25;
        let dom = Rect::new(-FRAC_PI_2 + margin, FRAC_PI_2 - margin, -0.6, 0.6);
        let (patch, report) = solve_translator_graph(&dom, |x, _| -x.cos().ln(), 0.05, 1e-10).unwrap();
        assert!(report.residual < 1e-10);
        let err = patch
            .inner_nodes(0)
            .map(|(i, j)| (patch.u[patch.idx(i, j)] + patch.x(i).cos().ln()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
        for w in report.residual_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn zero_data_smoke_and_symmetry() {
        let (patch, report) = solve_translator_graph(&Rect::centered(1.0, 1.0), |_, _| 0.0, 0.1, 1e-11).unwrap();
        assert!(report.residual < 1e-11);
        let (nx, ny) = (patch.nx, patch.ny);
        let mut asym: f64 = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let v = patch.u[patch.idx(i, j)];
                asym = asym
                    .max((v - patch.u[patch.idx(nx - 1 - i, j)]).abs())
                    .max((v - patch.u[patch.idx(i, ny - 1 - j)]).abs())
                    .max((v - patch.u[patch.idx(j, i)]).abs());
            }
        }
        assert!(asym < 1e-10, "{asym}");
        assert!(patch.u.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let dom = Rect::centered(1.0, 1.0);
        assert!(matches!(
            solve_translator_graph(&dom, |x, _| if x > 0.9 { f64::NAN } else { 0.0 }, 0.1, 1e-8),
            Err(Error::NonFiniteBoundary)
        ));
        assert!(solve_translator_graph(&dom, |_, _| 0.0, 0.2, 1e-8).is_err());
        assert!(solve_translator_graph(&dom, |_, _| 0.0, 0.1, 0.0).is_err());
    }
}
