//! Banded real matrices and LU factorisation with partial pivoting.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A square matrix with `kl` sub- and `ku` super-diagonals, stored by
/// diagonals with `kl` extra rows for the fill-in of pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `kl + ku + i - j` of column `j` holds `a[i][j]`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix { n, kl, ku, data: vec![0.0; (2 * kl + ku + 1) * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        j * self.ldab() + self.kl + self.ku + i - j
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i <= j + self.kl && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Adds to an entry inside the band. Panics outside it.
    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += x;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// In-place LU with row interchanges (the band widens to `kl + ku`
    /// above the diagonal).
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = ku + kl;
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for i in j + 1..=last {
                let a = self.data[self.slot_wide(i, j)].abs();
                if a > best {
                    best = a;
                    p = i;
                }
            }
            piv[j] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularSystem(j));
            }
            let jend = (j + kv).min(n - 1);
            if p != j {
                for c in j..=jend {
                    let (a, b) = (self.slot_wide(j, c), self.slot_wide(p, c));
                    self.data.swap(a, b);
                }
            }
            let d = self.data[self.slot_wide(j, j)];
            for i in j + 1..=last {
                let s = self.slot_wide(i, j);
                self.data[s] /= d;
                let l = self.data[s];
                if l != 0.0 {
                    for c in j + 1..=jend {
                        let u = self.data[self.slot_wide(j, c)];
                        let t = self.slot_wide(i, c);
                        self.data[t] -= l * u;
                    }
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }

    /// Slot of `(i, j)` for `j - kl - ku <= i <= j + kl`.
    fn slot_wide(&self, i: usize, j: usize) -> usize {
        j * self.ldab() + self.kl + self.ku + i - j
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = &self.m;
        let (n, kl, kv) = (m.n, m.kl, m.kl + m.ku);
        let mut x = b.to_vec();
        for j in 0..n {
            x.swap(j, self.piv[j]);
            let xj = x[j];
            for i in j + 1..=(j + kl).min(n - 1) {
                x[i] -= m.data[m.slot_wide(i, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= m.data[m.slot_wide(j, j)];
            let xj = x[j];
            for i in j.saturating_sub(kv)..j {
                x[i] -= m.data[m.slot_wide(i, j)] * xj;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, kl, ku) in [(1, 0, 0), (5, 1, 1), (30, 4, 2), (40, 7, 7), (25, 0, 3)] {
            let mut a = BandMatrix::zeros(n, kl, ku);
            for i in 0..n {
                for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                    a.add(i, j, rng.random_range(-1.0..1.0));
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dense = a.to_dense();
            let want = dense.clone().lu().solve(&nalgebra::DVector::from_vec(b.clone())).unwrap();
            let got = a.clone().factor().unwrap().solve(&b);
            for k in 0..n {
                assert!((got[k] - want[k]).abs() <= 1e-9 * (1.0 + want[k].abs()), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        assert_eq!(a.factor().unwrap_err(), Error::SingularSystem(2));
    }
}
