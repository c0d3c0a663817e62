//! Tridiagonal solvers.

use crate::error::{Error, Result};

/// A tridiagonal matrix stored by diagonals; `sub[0]` and `sup[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        assert!(sub.len() == diag.len() && sup.len() == diag.len());
        Self { sub, diag, sup }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i > 0 {
                m[(i, i - 1)] = self.sub[i];
            }
            if i + 1 < n {
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    /// LU factorization without pivoting (Thomas algorithm), reusable across solves.
    pub fn factor(&self) -> Result<TridiagonalLu> {
        let n = self.len();
        let mut pivot = vec![0.0; n];
        let mut lower = vec![0.0; n];
        pivot[0] = self.diag[0];
        for i in 1..n {
            if pivot[i - 1] == 0.0 || !pivot[i - 1].is_finite() {
                return Err(Error::Numeric(format!("zero pivot at row {}", i - 1)));
            }
            lower[i] = self.sub[i] / pivot[i - 1];
            pivot[i] = self.diag[i] - lower[i] * self.sup[i - 1];
        }
        if pivot[n - 1] == 0.0 || !pivot[n - 1].is_finite() {
            return Err(Error::Numeric(format!("zero pivot at row {}", n - 1)));
        }
        Ok(TridiagonalLu { lower, pivot, sup: self.sup.clone() })
    }
}

/// Factors of a tridiagonal LU decomposition.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    pivot: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalLu {
    /// Smallest pivot; all positive means the symmetric matrix is positive definite.
    pub fn min_pivot(&self) -> f64 {
        self.pivot.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.pivot.len();
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= self.lower[i] * y[i - 1];
        }
        y[n - 1] /= self.pivot[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = (y[i] - self.sup[i] * y[i + 1]) / self.pivot[i];
        }
        y
    }
}

/// One-shot tridiagonal solve.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = Tridiagonal::new(sub.to_vec(), diag.to_vec(), sup.to_vec());
    Ok(m.factor()?.solve(rhs))
}
