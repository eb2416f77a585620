//! `λ = sup F` by a coarse grid over centers and log-scales followed by
//! Nelder–Mead refinement from the best grid points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FValue, GaussianIntegrator, GaussianWeight};
use crate::error::{invalid, Error, Result};
use crate::mesh::{SurfaceMesh, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySearch {
    /// Grid points per spatial axis (one on flat axes).
    pub grid: usize,
    /// Grid points in log t₀.
    pub t_samples: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Relative inflation of the bounding box for centers.
    pub inflate: f64,
    /// Number of grid points refined by the simplex search.
    pub starts: usize,
    /// Evaluations shared by all simplex refinements.
    pub simplex_budget: usize,
    /// Largest accepted grid.
    pub max_grid_evaluations: usize,
    /// Raise t_min to (4 × mean edge length)² so the Gaussian is resolved.
    pub resolve_floor: bool,
}

impl Default for EntropySearch {
    fn default() -> Self {
        EntropySearch {
            grid: 5,
            t_samples: 9,
            t_min: 1e-2,
            t_max: 1e4,
            inflate: 0.2,
            starts: 5,
            simplex_budget: 500,
            max_grid_evaluations: 10_000,
            resolve_floor: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub weight: GaussianWeight,
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub value: f64,
    pub argmax: GaussianWeight,
    /// Tail bound at the argmax.
    pub tail_bound: f64,
    /// Largest tail bound over all evaluations.
    pub max_tail_bound: f64,
    /// Effective scale range searched.
    pub t_range: (f64, f64),
    pub search_trace: Vec<TraceEntry>,
}

/// Search box in normalized coordinates: each free axis maps `[0, 1]`
/// linearly onto its range; the last axis is log t₀.
struct Box4 {
    lo: [f64; 4],
    hi: [f64; 4],
}

impl Box4 {
    fn point(&self, z: &[f64; 4]) -> GaussianWeight {
        let mut p = [0.0; 4];
        for d in 0..4 {
            let s = z[d].clamp(0.0, 1.0);
            p[d] = self.lo[d] + s * (self.hi[d] - self.lo[d]);
        }
        GaussianWeight {
            x0: [p[0], p[1], p[2]],
            t0: p[3].exp(),
        }
    }

    fn free_axes(&self) -> Vec<usize> {
        (0..4).filter(|&d| self.hi[d] > self.lo[d]).collect()
    }
}

fn evaluate(integ: &GaussianIntegrator, w: GaussianWeight) -> TraceEntry {
    let FValue { value, tail_bound } = integ.eval(&w);
    TraceEntry {
        weight: w,
        value,
        tail_bound,
    }
}

fn axis_samples(n: usize) -> Vec<f64> {
    if n <= 1 {
        vec![0.5]
    } else {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }
}

/// Nelder–Mead maximization over the free axes, clamped to the unit box.
fn simplex_refine(
    integ: &GaussianIntegrator,
    bx: &Box4,
    start: [f64; 4],
    step: [f64; 4],
    budget: usize,
    trace: &mut Vec<TraceEntry>,
) {
    let axes = bx.free_axes();
    let n = axes.len();
    if n == 0 || budget == 0 {
        return;
    }
    let mut used = 0;
    let eval = |z: &[f64; 4], trace: &mut Vec<TraceEntry>| {
        let mut zc = *z;
        zc.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        let e = evaluate(integ, bx.point(&zc));
        trace.push(e);
        (zc, -e.value)
    };
    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(n + 1);
    simplex.push(eval(&start, trace));
    used += 1;
    for &a in &axes {
        let mut z = start;
        z[a] = if start[a] + step[a] <= 1.0 { start[a] + step[a] } else { start[a] - step[a] };
        simplex.push(eval(&z, trace));
        used += 1;
    }
    let combine = |a: &[f64; 4], b: &[f64; 4], s: f64| {
        let mut z = [0.0; 4];
        for d in 0..4 {
            z[d] = a[d] + s * (b[d] - a[d]);
        }
        z
    };
    while used + 2 <= budget {
        simplex.sort_by(|p, q| p.1.total_cmp(&q.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex
            .iter()
            .map(|(z, _)| axes.iter().map(|&a| (z[a] - simplex[0].0[a]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() < 1e-12 && size < 1e-6 {
            break;
        }
        let mut centroid = [0.0; 4];
        for (z, _) in &simplex[..n] {
            for d in 0..4 {
                centroid[d] += z[d] / n as f64;
            }
        }
        let worst = simplex[n];
        let refl = eval(&combine(&centroid, &worst.0, -1.0), trace);
        used += 1;
        if refl.1 < simplex[0].1 {
            let exp = eval(&combine(&centroid, &worst.0, -2.0), trace);
            used += 1;
            simplex[n] = if exp.1 < refl.1 { exp } else { refl };
        } else if refl.1 < simplex[n - 1].1 {
            simplex[n] = refl;
        } else {
            let contr = if refl.1 < worst.1 {
                eval(&combine(&centroid, &refl.0, 0.5), trace)
            } else {
                eval(&combine(&centroid, &worst.0, 0.5), trace)
            };
            used += 1;
            if contr.1 < worst.1.min(refl.1) {
                simplex[n] = contr;
            } else {
                if used + n > budget {
                    break;
                }
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    *v = eval(&combine(&best, &v.0, 0.5), trace);
                    used += 1;
                }
            }
        }
    }
}

/// Entropy search over the inflated bounding box and `log t₀`.
pub fn entropy(mesh: &SurfaceMesh, search: &EntropySearch) -> Result<EntropyResult> {
    mesh.validate()?;
    let integ = GaussianIntegrator::new(mesh)?;
    if !(search.t_min > 0.0 && search.t_max >= search.t_min && search.grid >= 1 && search.t_samples >= 1) {
        return Err(invalid(format!("bad entropy search configuration {search:?}")));
    }
    let mut t_min = search.t_min;
    if search.resolve_floor {
        t_min = t_min.max((4.0 * mesh.mean_edge_length()).powi(2));
    }
    let t_max = search.t_max.max(t_min);
    let (lo, hi) = mesh.bbox();
    let mut bx = Box4 {
        lo: [0.0, 0.0, 0.0, t_min.ln()],
        hi: [0.0, 0.0, 0.0, t_max.ln()],
    };
    for d in 0..3 {
        let c = 0.5 * (lo[d] + hi[d]);
        let half = 0.5 * (hi[d] - lo[d]) * (1.0 + search.inflate);
        bx.lo[d] = c - half;
        bx.hi[d] = c + half;
    }
    let counts: Vec<usize> = (0..4)
        .map(|d| {
            if bx.hi[d] <= bx.lo[d] {
                1
            } else if d == 3 {
                search.t_samples
            } else {
                search.grid
            }
        })
        .collect();
    let required: usize = counts.iter().product();
    if required > search.max_grid_evaluations {
        return Err(Error::SearchBudgetExceeded {
            required,
            budget: search.max_grid_evaluations,
        });
    }
    let samples: Vec<Vec<f64>> = counts.iter().map(|&n| axis_samples(n)).collect();
    let mut grid = Vec::with_capacity(required);
    for &a in &samples[0] {
        for &b in &samples[1] {
            for &c in &samples[2] {
                for &d in &samples[3] {
                    grid.push([a, b, c, d]);
                }
            }
        }
    }
    let mut trace: Vec<TraceEntry> = grid.par_iter().map(|z| evaluate(&integ, bx.point(z))).collect();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| trace[b].value.total_cmp(&trace[a].value).then(a.cmp(&b)));
    let starts: Vec<usize> = order.into_iter().take(search.starts).collect();
    let mut step = [0.0; 4];
    for d in 0..4 {
        step[d] = if counts[d] > 1 { 1.0 / (counts[d] - 1) as f64 } else { 0.0 };
    }
    let per_start = if starts.is_empty() { 0 } else { search.simplex_budget / starts.len() };
    // Refinements run in parallel; traces are appended in start order.
    let refined: Vec<Vec<TraceEntry>> = starts
        .par_iter()
        .map(|&s| {
            let mut local = Vec::new();
            simplex_refine(&integ, &bx, grid[s], step, per_start, &mut local);
            local
        })
        .collect();
    for r in refined {
        trace.extend(r);
    }

    let best = trace
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
        .map(|(_, e)| *e)
        .ok_or_else(|| invalid("empty entropy search"))?;
    let max_tail_bound = trace.iter().map(|e| e.tail_bound).fold(0.0, f64::max);
    Ok(EntropyResult {
        value: best.value,
        argmax: best.weight,
        tail_bound: best.tail_bound,
        max_tail_bound,
        t_range: (t_min, t_max),
        search_trace: trace,
    })
}

impl EntropyResult {
    pub fn argmax_center(&self) -> Vec3 {
        self.argmax.center()
    }
}
