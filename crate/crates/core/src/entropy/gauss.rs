//! Gaussian-weighted area by the 3-point mid-edge rule, accelerated with a
//! k-d tree of node clusters carrying mass, centroid and second moments.

use std::f64::consts::PI;

use crate::mesh::{SurfaceMesh, Vec3};

const LEAF_SIZE: usize = 16;
/// Second-order cluster expansion is used when the exponent varies by less
/// than this across the cluster.
const EXPANSION_SPREAD: f64 = 0.03;
/// Clusters whose largest possible weight is below this are skipped.
const NEGLIGIBLE: f64 = 1e-16;

#[derive(Clone, Debug)]
struct Cluster {
    lo: [f64; 3],
    hi: [f64; 3],
    start: usize,
    end: usize,
    mass: f64,
    centroid: [f64; 3],
    /// Σ w (x − c)(x − c)ᵀ as xx, yy, zz, xy, xz, yz.
    moment: [f64; 6],
    radius: f64,
    children: Option<(usize, usize)>,
}

/// Quadrature nodes (edge midpoints) with weights `Σ area/3` over the
/// triangles sharing the edge.
#[derive(Clone, Debug)]
pub struct MidEdgeQuadrature {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    clusters: Vec<Cluster>,
}

impl MidEdgeQuadrature {
    pub fn new(mesh: &SurfaceMesh) -> Self {
        let mut index = std::collections::HashMap::with_capacity(mesh.triangles.len() * 2);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let a3 = mesh.triangle_area(t) / 3.0;
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let n = *index.entry(key).or_insert_with(|| {
                    let m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
                    points.push([m.x, m.y, m.z]);
                    weights.push(0.0);
                    points.len() - 1
                });
                weights[n] += a3;
            }
        }
        let mut q = MidEdgeQuadrature {
            points,
            weights,
            clusters: Vec::new(),
        };
        if !q.points.is_empty() {
            let n = q.points.len();
            q.build(0, n);
        }
        q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        let mut mass = 0.0;
        let mut c = [0.0; 3];
        for k in start..end {
            let (p, w) = (self.points[k], self.weights[k]);
            mass += w;
            for d in 0..3 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
                c[d] += w * p[d];
            }
        }
        if mass > 0.0 {
            c.iter_mut().for_each(|v| *v /= mass);
        } else {
            c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0];
        }
        let mut m = [0.0; 6];
        let mut radius: f64 = 0.0;
        for k in start..end {
            let (p, w) = (self.points[k], self.weights[k]);
            let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
            m[0] += w * d[0] * d[0];
            m[1] += w * d[1] * d[1];
            m[2] += w * d[2] * d[2];
            m[3] += w * d[0] * d[1];
            m[4] += w * d[0] * d[2];
            m[5] += w * d[1] * d[2];
            radius = radius.max((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt());
        }
        let id = self.clusters.len();
        self.clusters.push(Cluster {
            lo,
            hi,
            start,
            end,
            mass,
            centroid: c,
            moment: m,
            radius,
            children: None,
        });
        if end - start > LEAF_SIZE {
            let axis = (0..3)
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap();
            let mid = (start + end) / 2;
            let mut order: Vec<usize> = (start..end).collect();
            order.select_nth_unstable_by(mid - start, |&a, &b| self.points[a][axis].total_cmp(&self.points[b][axis]));
            let pts: Vec<_> = order.iter().map(|&k| self.points[k]).collect();
            let ws: Vec<_> = order.iter().map(|&k| self.weights[k]).collect();
            self.points[start..end].copy_from_slice(&pts);
            self.weights[start..end].copy_from_slice(&ws);
            let l = self.build(start, mid);
            let r = self.build(mid, end);
            self.clusters[id].children = Some((l, r));
        }
        id
    }

    /// `∫ e^{−|x−x₀|²/4t} dμ` without the `(4πt)⁻¹` normalization,
    /// summing every node.
    pub fn direct_sum(&self, x0: &Vec3, t: f64) -> f64 {
        let inv = 1.0 / (4.0 * t);
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| {
                let d2 = (p[0] - x0.x).powi(2) + (p[1] - x0.y).powi(2) + (p[2] - x0.z).powi(2);
                w * (-d2 * inv).exp()
            })
            .sum()
    }

    /// Same integral through the cluster tree.
    pub fn tree_sum(&self, x0: &Vec3, t: f64) -> f64 {
        if self.clusters.is_empty() {
            return 0.0;
        }
        let x = [x0.x, x0.y, x0.z];
        let inv = 1.0 / (4.0 * t);
        let mut total = 0.0;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let c = &self.clusters[id];
            let mut dmin2 = 0.0;
            for d in 0..3 {
                let e = (c.lo[d] - x[d]).max(x[d] - c.hi[d]).max(0.0);
                dmin2 += e * e;
            }
            if c.mass * (-dmin2 * inv).exp() < NEGLIGIBLE * c.mass.max(1.0) {
                continue;
            }
            let y = [c.centroid[0] - x[0], c.centroid[1] - x[1], c.centroid[2] - x[2]];
            let ynorm = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            let spread = c.radius * (2.0 * ynorm + c.radius) * inv;
            if spread <= EXPANSION_SPREAD {
                // g(c)[m + ½ tr(Hess S)], Hess g = g (y yᵀ/(4t²) − I/(2t))
                let m = &c.moment;
                let yty = y[0] * y[0] * m[0]
                    + y[1] * y[1] * m[1]
                    + y[2] * y[2] * m[2]
                    + 2.0 * (y[0] * y[1] * m[3] + y[0] * y[2] * m[4] + y[1] * y[2] * m[5]);
                let tr = m[0] + m[1] + m[2];
                let g = (-ynorm * ynorm * inv).exp();
                total += g * (c.mass + 0.5 * (yty * 4.0 * inv * inv - tr * 2.0 * inv));
                continue;
            }
            match c.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for k in c.start..c.end {
                        let p = self.points[k];
                        let d2 = (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2);
                        total += self.weights[k] * (-d2 * inv).exp();
                    }
                }
            }
        }
        total
    }

    /// `F_{x₀,t}` of the meshed surface.
    pub fn f_value(&self, x0: &Vec3, t: f64) -> f64 {
        self.tree_sum(x0, t) / (4.0 * PI * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_round_cylinder, make_sphere};

    #[test]
    fn weights_sum_to_area() {
        let m = make_sphere(1.3, 3).unwrap();
        let q = MidEdgeQuadrature::new(&m);
        assert!((q.total_weight() - m.total_area()).abs() < 1e-12 * m.total_area());
    }

    #[test]
    fn tree_agrees_with_direct_sum() {
        let m = make_round_cylinder(1.0, 12.0, 0.05).unwrap();
        let q = MidEdgeQuadrature::new(&m);
        for &(x, t) in &[
            (Vec3::zeros(), 0.5),
            (Vec3::new(0.3, -0.2, 1.0), 0.01),
            (Vec3::new(2.0, 0.0, 3.0), 4.0),
            (Vec3::new(0.0, 0.0, 0.0), 1e4),
            (Vec3::new(0.9, 0.0, 5.9), 0.05),
        ] {
            let a = q.direct_sum(&x, t);
            let b = q.tree_sum(&x, t);
            assert!((a - b).abs() <= 1e-6 * a.max(1e-300) + 1e-14, "t {t}: {a} vs {b}");
        }
    }
}
