//! Small dense symmetric solves for the normal equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    what: "matrix row",
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn singular_scale(&self) -> f64 {
        let diag = (0..self.n).fold(0.0, |m: f64, i| m.max(self.get(i, i).abs()));
        if diag > 0.0 {
            diag
        } else {
            self.max_abs()
        }
    }
}

/// Lower-triangular Cholesky factor `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
    /// The pivots `L_ii^2`, in elimination order.
    pub pivots: Vec<f64>,
}

impl Cholesky {
    /// Factors `a`, failing with [`Error::Singular`] if a pivot drops below
    /// `SINGULAR_RTOL` times the largest diagonal entry.
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.dim();
        let threshold = SINGULAR_RTOL * a.singular_scale();
        let mut l = Matrix::zeros(n);
        let mut pivots = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if d.is_nan() || d <= threshold {
                return Err(Error::Singular {
                    min_pivot: d,
                    index: j,
                    threshold,
                });
            }
            pivots.push(d);
            let ljj = d.sqrt();
            l.set(j, j, ljj);
            for i in j + 1..n {
                let mut v = a.get(i, j);
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, v / ljj);
            }
        }
        Ok(Self { l, pivots })
    }

    pub fn min_pivot(&self) -> f64 {
        self.pivots.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l.get(i, k) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.l.get(k, i) * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }
}

/// Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            what: "right-hand side",
            expected: n,
            found: b.len(),
        });
    }
    let threshold = SINGULAR_RTOL * a.singular_scale();
    let mut m = a.clone();
    let mut x = b.to_vec();
    let mut smallest = (f64::INFINITY, 0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m.get(i, col).abs().total_cmp(&m.get(j, col).abs()))
            .expect("non-empty range");
        let pivot = m.get(pivot_row, col);
        if pivot.abs() < smallest.0 {
            smallest = (pivot.abs(), col);
        }
        if pivot.is_nan() || pivot.abs() <= threshold {
            return Err(Error::Singular {
                min_pivot: pivot.abs(),
                index: col,
                threshold,
            });
        }
        if pivot_row != col {
            for k in 0..n {
                let (p, c) = (m.get(pivot_row, k), m.get(col, k));
                m.set(pivot_row, k, c);
                m.set(col, k, p);
            }
            x.swap(pivot_row, col);
        }
        for i in col + 1..n {
            let factor = m.get(i, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m.get(i, k) - factor * m.get(col, k);
                m.set(i, k, v);
            }
            x[i] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let tail: f64 = m.row(i)[i + 1..]
            .iter()
            .zip(&x[i + 1..])
            .map(|(a, b)| a * b)
            .sum();
        x[i] = (x[i] - tail) / m.get(i, i);
    }
    Ok(x)
}
