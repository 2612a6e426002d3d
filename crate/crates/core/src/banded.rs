//! Nonsymmetric banded matrices and LU factorization with partial pivoting.
//!
//! Storage is row-major: row `i` keeps columns `i - kl ..= i + ku + kl`. The
//! extra `kl` superdiagonals hold the fill created by row interchanges, as in
//! LAPACK's `gbtrf`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn in_storage(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku + self.kl
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.n && j < self.n && self.in_storage(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band ({}, {})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku);
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.cols(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `x^T A x`
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.cols(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// In-place LU factorization with row partial pivoting.
    pub fn factorize(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let anorm = self.norm_inf();
        let tiny = f64::EPSILON * anorm;
        let mut pivots = vec![0usize; n];

        for c in 0..n {
            let last_row = (c + kl).min(n - 1);
            let mut p = c;
            let mut best = self.data[self.idx(c, c)].abs();
            for r in c + 1..=last_row {
                let v = self.data[self.idx(r, c)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            pivots[c] = p;
            if !(best > tiny) || best == 0.0 {
                return Err(Error::SingularPivot { index: c });
            }
            let last_col = (c + self.ku + kl).min(n - 1);
            if p != c {
                for j in c..=last_col {
                    let (a, b) = (self.idx(c, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(c, c)];
            for r in c + 1..=last_row {
                let ir = self.idx(r, c);
                let l = self.data[ir] / pivot;
                self.data[ir] = l;
                if l != 0.0 {
                    for j in c + 1..=last_col {
                        let u = self.data[self.idx(c, j)];
                        let k = self.idx(r, j);
                        self.data[k] -= l * u;
                    }
                }
            }
        }
        Ok(BandedLu {
            lu: self,
            pivots,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let kl = self.lu.kl;
        let mut x = rhs.to_vec();
        for c in 0..n {
            let p = self.pivots[c];
            if p != c {
                x.swap(c, p);
            }
            let xc = x[c];
            for r in c + 1..=(c + kl).min(n.saturating_sub(1)) {
                x[r] -= self.lu.data[self.lu.idx(r, c)] * xc;
            }
        }
        let reach = self.lu.ku + kl;
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.lu.data[self.lu.idx(i, j)] * x[j];
            }
            x[i] = s / self.lu.data[self.lu.idx(i, i)];
        }
        Ok(x)
    }
}

/// Matrix plus right-hand side of a discrete problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

impl BandedSystem {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `||A x - b||_inf`
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.matrix
            .matvec(x)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Factorizes and solves; the system is consumed.
pub fn solve(system: BandedSystem) -> Result<Vec<f64>> {
    let BandedSystem { matrix, rhs } = system;
    if matrix.dim() == 0 {
        return Ok(Vec::new());
    }
    matrix.factorize()?.solve(&rhs)
}
