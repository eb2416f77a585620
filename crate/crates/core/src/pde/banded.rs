//! Banded LU factorization with partial pivoting.
//!
//! Column-major band storage as in LAPACK `gbtrf`: column `j` holds rows
//! `j − kl − ku ..= j + kl`, the top `kl` rows being room for pivoting fill.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ld,
            ab: vec![0.0; n * ld],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> usize {
        c * self.ld + self.kl + self.ku + r - c
    }

    /// Adds `v` to entry `(r, c)`, which must lie inside the band.
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r <= c + self.kl && c <= r + self.ku, "({r}, {c}) outside band");
        let s = self.slot(r, c);
        self.ab[s] += v;
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r > c + self.kl || c > r + self.ku {
            0.0
        } else {
            self.ab[self.slot(r, c)]
        }
    }

    /// `y = A x` using the unfactored band.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let lo = c.saturating_sub(self.ku);
            let hi = (c + self.kl).min(self.n - 1);
            for (r, yr) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yr += self.ab[self.slot(r, c)] * x[c];
            }
        }
        y
    }

    /// Factors in place, consuming the matrix.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku, ld) = (self.n, self.kl, self.ku, self.ld);
        let kv = kl + ku;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        let mut l = vec![0.0; kl + 1];
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ld + kv;
            let mut jp = 0;
            let mut best = self.ab[col].abs();
            for t in 1..=km {
                let a = self.ab[col + t].abs();
                if a > best {
                    best = a;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if !(best > 0.0) || !best.is_finite() {
                return Err(Error::InvalidParameter(format!("singular banded matrix at column {j}")));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = c * ld + kv + j - c;
                    self.ab.swap(a, a + jp);
                }
            }
            let piv = self.ab[col];
            for t in 1..=km {
                self.ab[col + t] /= piv;
                l[t] = self.ab[col + t];
            }
            if km == 0 {
                continue;
            }
            for c in j + 1..=ju {
                let base = c * ld + kv + j - c;
                let ajc = self.ab[base];
                if ajc != 0.0 {
                    let dst = &mut self.ab[base + 1..=base + km];
                    for (d, lt) in dst.iter_mut().zip(&l[1..=km]) {
                        *d -= lt * ajc;
                    }
                }
            }
        }
        Ok(BandLu { m: self, ipiv })
    }
}

#[derive(Clone, Debug)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let BandMatrix { n, kl, ku, ld, ref ab } = self.m;
        let kv = kl + ku;
        for j in 0..n {
            let jp = self.ipiv[j];
            if jp != j {
                b.swap(j, jp);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                let col = j * ld + kv;
                for t in 1..=km {
                    b[j + t] -= ab[col + t] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let col = j * ld + kv;
            b[j] /= ab[col];
            let bj = b[j];
            if bj != 0.0 {
                let lo = j.saturating_sub(kv);
                for r in lo..j {
                    b[r] -= ab[col + r - j] * bj;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn solves_random_band_systems_with_pivoting() {
        let mut s = 7u64;
        for &(n, kl, ku) in &[(1, 0, 0), (5, 1, 1), (40, 3, 2), (60, 7, 7), (30, 0, 4)] {
            let mut a = BandMatrix::zeros(n, kl, ku);
            let mut dense = vec![vec![0.0; n]; n];
            for r in 0..n {
                for c in r.saturating_sub(kl)..=(r + ku).min(n - 1) {
                    // weak diagonal forces row swaps
                    let v = lcg(&mut s) + if r == c { 0.01 } else { 0.0 };
                    a.add(r, c, v);
                    dense[r][c] = v;
                }
            }
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let b: Vec<f64> = (0..n).map(|r| (0..n).map(|c| dense[r][c] * x[c]).sum()).collect();
            for (p, q) in a.mul_vec(&x).iter().zip(&b) {
                assert!((p - q).abs() < 1e-12);
            }
            let lu = a.clone().factor().unwrap();
            let mut y = b.clone();
            lu.solve(&mut y);
            // backward error, independent of conditioning
            let back = a.mul_vec(&y);
            let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (p, q) in back.iter().zip(&b) {
                assert!((p - q).abs() < 1e-10 * scale, "n={n} kl={kl} ku={ku}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = BandMatrix::zeros(3, 1, 1);
        assert!(a.factor().is_err());
    }
}
