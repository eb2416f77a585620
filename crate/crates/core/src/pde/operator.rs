//! Finite-difference translator operator
//! `div(Du/W) − 1/W`, `W = √(1 + |Du|²)`, in divergence form.
//!
//! Fluxes live on the half-nodes. On the face between `(i, j)` and
//! `(i+1, j)` the normal derivative is the one-sided difference and the
//! tangential derivative is the average of the two central differences.

use super::patch::GraphPatch;

/// Nodal residual together with its derivatives with respect to the
/// nine stencil values, indexed `[di + 1][dj + 1]`.
pub(crate) struct Local {
    pub value: f64,
    pub grad: [[f64; 3]; 3],
}

#[inline]
fn flux(p: f64, q: f64) -> (f64, f64, f64) {
    let w2 = 1.0 + p * p + q * q;
    let w = w2.sqrt();
    let w3 = w2 * w;
    (p / w, (1.0 + q * q) / w3, -p * q / w3)
}

/// Residual at the free node `(i, j)`; derivatives only when `want_grad`.
#[inline]
pub(crate) fn local(patch: &GraphPatch, i: usize, j: usize, want_grad: bool) -> Local {
    let nx = patch.nx;
    let u = &patch.u;
    let at = |di: isize, dj: isize| u[(j as isize + dj) as usize * nx + (i as isize + di) as usize];
    let (hx, hy) = (patch.hx, patch.hy);
    let mut s = [[0.0; 3]; 3];
    for (dj, row) in (-1..=1).zip(0..3) {
        for (di, col) in (-1..=1).zip(0..3) {
            s[col][row] = at(di, dj);
        }
    }
    let mut g = [[0.0; 3]; 3];

    // x-faces: east (sgn = +1, cells 1→2) and west (sgn = −1, cells 0→1)
    let mut value = 0.0;
    for &(a, b, sgn) in &[(1usize, 2usize, 1.0), (0, 1, -1.0)] {
        let p = (s[b][1] - s[a][1]) / hx;
        let q = (s[a][2] + s[b][2] - s[a][0] - s[b][0]) / (4.0 * hy);
        let (f, fp, fq) = flux(p, q);
        value += sgn * f / hx;
        if want_grad {
            let cp = sgn * fp / (hx * hx);
            g[b][1] += cp;
            g[a][1] -= cp;
            let cq = sgn * fq / (hx * 4.0 * hy);
            g[a][2] += cq;
            g[b][2] += cq;
            g[a][0] -= cq;
            g[b][0] -= cq;
        }
    }
    // y-faces: north and south
    for &(a, b, sgn) in &[(1usize, 2usize, 1.0), (0, 1, -1.0)] {
        let q = (s[1][b] - s[1][a]) / hy;
        let p = (s[2][a] + s[2][b] - s[0][a] - s[0][b]) / (4.0 * hx);
        let (f, fq, fp) = flux(q, p);
        value += sgn * f / hy;
        if want_grad {
            let cq = sgn * fq / (hy * hy);
            g[1][b] += cq;
            g[1][a] -= cq;
            let cp = sgn * fp / (hy * 4.0 * hx);
            g[2][a] += cp;
            g[2][b] += cp;
            g[0][a] -= cp;
            g[0][b] -= cp;
        }
    }
    // source −1/W at the node
    let pc = (s[2][1] - s[0][1]) / (2.0 * hx);
    let qc = (s[1][2] - s[1][0]) / (2.0 * hy);
    let w2 = 1.0 + pc * pc + qc * qc;
    let w = w2.sqrt();
    value -= 1.0 / w;
    if want_grad {
        let w3 = w2 * w;
        let cp = pc / w3 / (2.0 * hx);
        let cq = qc / w3 / (2.0 * hy);
        g[2][1] += cp;
        g[0][1] -= cp;
        g[1][2] += cq;
        g[1][0] -= cq;
    }
    Local { value, grad: g }
}
