//! Symmetric eigendecomposition (Householder tridiagonalization followed by
//! implicit-shift QL) and the solves built on it.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{Matrix, Point, SymMatrix};
use crate::Scalar;

/// Residual bound for [`solve_shifted`]: `‖(H + shift·I)s + g‖ ≤ 1e-10·(1+‖g‖)`.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;
/// Reconstruction bound: `‖VΛVᵀ − H‖_max ≤ 1e-8·(1+‖H‖_max)`.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Orthonormality bound: `‖VᵀV − I‖_max ≤ 1e-10`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

const MAX_QL_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Orthonormal columns; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: Matrix<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn vector(&self, k: usize) -> Point<T> {
        self.eigenvectors.column(k)
    }

    /// Coordinates of `x` in the eigenbasis, `Vᵀ x`.
    pub fn to_eigen(&self, x: &Point<T>) -> Point<T> {
        self.eigenvectors.tmatvec(x)
    }

    /// `V y`
    pub fn from_eigen(&self, y: &Point<T>) -> Point<T> {
        self.eigenvectors.matvec(y)
    }

    pub fn reconstruct(&self) -> SymMatrix<T> {
        SymMatrix::from_spectrum(&self.eigenvectors, &self.eigenvalues)
    }

    /// `‖VᵀV − I‖_max`
    pub fn orthonormality_error(&self) -> T {
        let v = &self.eigenvectors;
        let vtv = v.transpose().matmul(v);
        let n = self.dim();
        let mut err = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { T::one() } else { T::zero() };
                err = err.max((vtv.get(i, j) - target).abs());
            }
        }
        err
    }

    /// `‖VΛVᵀ − H‖_max`
    pub fn reconstruction_error(&self, h: &SymMatrix<T>) -> T {
        let r = self.reconstruct();
        let n = self.dim();
        let mut err = T::zero();
        for i in 0..n {
            for j in 0..n {
                err = err.max((r.get(i, j) - h.get(i, j)).abs());
            }
        }
        err
    }
}

/// Full symmetric eigendecomposition with ascending eigenvalues. Each
/// eigenvector is sign-normalized so its first non-negligible coordinate is
/// positive, making the output deterministic.
pub fn sym_eig<T: Scalar>(h: &SymMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    if !h.is_finite() {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let mut v: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| h.get(i, j)).collect()).collect();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| v[i][order[j]]);

    let tiny = T::epsilon() * T::lit(1e3);
    for j in 0..n {
        if let Some(first) = (0..n).map(|i| vectors.get(i, j)).find(|x| x.abs() > tiny) {
            if first < T::zero() {
                for i in 0..n {
                    let x = vectors.get(i, j);
                    vectors.set(i, j, -x);
                }
            }
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors })
}

pub fn min_eigenvalue<T: Scalar>(h: &SymMatrix<T>) -> Result<T> {
    Ok(sym_eig(h)?.min())
}

/// Largest absolute eigenvalue.
pub fn spectral_norm<T: Scalar>(h: &SymMatrix<T>) -> Result<T> {
    let eig = sym_eig(h)?;
    Ok(eig.min().abs().max(eig.max().abs()))
}

/// Solves `(H + shift·I) s = −g`.
///
/// Fails with [`Error::Singular`] when the shifted spectrum has an
/// eigenvalue below `100·ε` relative to its largest magnitude.
pub fn solve_shifted<T: Scalar>(h: &SymMatrix<T>, shift: T, g: &Point<T>) -> Result<Point<T>> {
    check_dim(h.dim(), g.dim())?;
    if !g.is_finite() || !shift.is_finite() {
        return Err(Error::Input("non-finite right-hand side or shift".into()));
    }
    let eig = sym_eig(h)?;
    let shifted: Vec<T> = eig.eigenvalues.iter().map(|&l| l + shift).collect();
    let big = shifted.iter().fold(T::zero(), |m, &l| m.max(l.abs()));
    let small = shifted.iter().fold(T::infinity(), |m, &l| m.min(l.abs()));
    if big == T::zero() || small <= T::epsilon() * T::lit(100.0) * big {
        return Err(Error::Singular(format!(
            "shifted matrix has eigenvalue magnitude {} against spectral radius {}",
            small.to_f64_lossy(),
            big.to_f64_lossy()
        )));
    }
    let apply_inverse = |rhs: &Point<T>| {
        let c = eig.to_eigen(rhs);
        eig.from_eigen(&Point::from_fn(c.dim(), |i| -c[i] / shifted[i]))
    };
    let mut s = apply_inverse(g);
    // one step of iterative refinement
    let shifted_h = h.shifted(shift);
    let mut r = shifted_h.matvec(&s);
    r.axpy(T::one(), g);
    let correction = apply_inverse(&r);
    s.axpy(T::one(), &correction);
    Ok(s)
}

fn tridiagonalize<T: Scalar>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for &dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    v[n - 1][n - 1] = T::one();
    e[0] = zero;
}

fn ql_implicit<T: Scalar>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::Numerical(format!(
                        "QL iteration did not converge for eigenvalue {l} after {MAX_QL_SWEEPS} sweeps \
                         (off-diagonal {})",
                        e[l].to_f64_lossy()
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(h: &SymMatrix<f64>) -> EigenDecomposition<f64> {
        let eig = sym_eig(h).unwrap();
        assert!(eig.orthonormality_error() <= ORTHONORMALITY_TOL, "orthonormality");
        assert!(
            eig.reconstruction_error(h) <= RECONSTRUCTION_TOL * (1.0 + h.max_abs()),
            "reconstruction {}",
            eig.reconstruction_error(h)
        );
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        eig
    }

    #[test]
    fn identity_spectrum() {
        let eig = check_invariants(&SymMatrix::<f64>::identity(3));
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_and_vectors() {
        let eig = check_invariants(&SymMatrix::<f64>::from_diag(&[3.0, -1.0]));
        assert_eq!(eig.eigenvalues, vec![-1.0, 3.0]);
        assert_eq!(eig.vector(0).as_slice(), &[0.0, 1.0]);
        assert_eq!(eig.vector(1).as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn one_by_one() {
        let eig = check_invariants(&SymMatrix::<f64>::from_diag(&[-7.5]));
        assert_eq!(eig.eigenvalues, vec![-7.5]);
        assert_eq!(eig.vector(0).as_slice(), &[1.0]);
    }

    #[test]
    fn zero_matrix() {
        let eig = check_invariants(&SymMatrix::zeros(4));
        assert!(eig.eigenvalues.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn non_finite_rejected() {
        let mut h = SymMatrix::<f64>::identity(2);
        h.set(0, 1, f64::NAN);
        assert!(matches!(sym_eig(&h), Err(Error::Input(_))));
    }

    #[test]
    fn min_eigenvalue_diag() {
        assert_eq!(min_eigenvalue(&SymMatrix::<f64>::from_diag(&[-2.0, 5.0])).unwrap(), -2.0);
        assert_eq!(min_eigenvalue(&SymMatrix::<f64>::identity(4)).unwrap(), 1.0);
    }

    #[test]
    fn shifted_solves() {
        let s = solve_shifted(&SymMatrix::<f64>::identity(2), 0.0, &Point::from(vec![1.0, 0.0])).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-15 && s[1].abs() < 1e-15);
        let h = SymMatrix::<f64>::from_diag(&[1.0, 2.0]);
        let s = solve_shifted(&h, 1.0, &Point::from(vec![2.0, 3.0])).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-15 && (s[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_shift_detected() {
        let h = SymMatrix::<f64>::from_diag(&[-1.0, 2.0]);
        let err = solve_shifted(&h, 1.0, &Point::from(vec![1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn f32_decomposition() {
        let h = SymMatrix::from_rows(vec![vec![2.0_f32, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = sym_eig(&h).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-5);
        assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-5);
    }
}
