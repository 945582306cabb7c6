use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::linalg::{Matrix, Point};
use crate::Scalar;

/// Dense symmetric matrix. Both triangles are stored; every write is mirrored,
/// so `H[i][j] == H[j][i]` holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![T::one(); dim])
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from the upper triangle of `f(i, j)` (`i <= j`).
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows. Rows must be square and symmetric up to a
    /// relative round-off of `1e-12`; the stored matrix is the exact average.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return input("symmetric matrix rows must be square");
        }
        let scale = rows.iter().flatten().fold(T::one(), |m, &a| m.max(a.abs()));
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > T::lit(1e-12) * scale {
                    return input(format!("matrix not symmetric at ({i},{j})"));
                }
                m.set(i, j, (a + b) / T::lit(2.0));
            }
        }
        Ok(m)
    }

    /// Symmetric part `(A + Aᵀ)/2` of a square matrix.
    pub fn symmetrize(a: &Matrix<T>) -> Self {
        debug_assert_eq!(a.rows(), a.cols());
        Self::from_upper(a.rows(), |i, j| (a.get(i, j) + a.get(j, i)) / T::lit(2.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn diagonal(&self) -> Point<T> {
        Point::from_fn(self.dim, |i| self.get(i, i))
    }

    pub fn matvec(&self, x: &Point<T>) -> Point<T> {
        debug_assert_eq!(x.dim(), self.dim);
        let n = self.dim;
        Point::from_fn(n, |i| {
            self.data[i * n..(i + 1) * n].iter().zip(x.iter()).map(|(&a, &b)| a * b).sum()
        })
    }

    /// `xᵀ H x`
    pub fn quad_form(&self, x: &Point<T>) -> T {
        x.dot(&self.matvec(x))
    }

    /// `H + shift·I`
    pub fn shifted(&self, shift: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += shift;
        }
        m
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&a| a * alpha).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    /// `H + alpha·x xᵀ`
    pub fn rank_one_update(&mut self, alpha: T, x: &Point<T>) {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += alpha * x[i] * x[j];
            }
        }
    }

    /// `Qᵀ H Q` for a square `Q`.
    pub fn congruence(&self, q: &Matrix<T>) -> Self {
        let hq = self.to_matrix().matmul(q);
        Self::symmetrize(&q.transpose().matmul(&hq))
    }

    /// `Q diag(λ) Qᵀ`
    pub fn from_spectrum(q: &Matrix<T>, eigenvalues: &[T]) -> Self {
        let n = q.rows();
        Self::from_upper(n, |i, j| {
            (0..eigenvalues.len()).map(|k| q.get(i, k) * eigenvalues[k] * q.get(j, k)).sum()
        })
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }
}
