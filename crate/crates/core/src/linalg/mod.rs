//! Dense linear-algebra kernels used by the subsolver and the monitors.

mod eigen;
mod matrix;
mod sym;
mod vector;

pub use eigen::{
    min_eigenvalue, solve_shifted, spectral_norm, sym_eig, EigenDecomposition, ORTHONORMALITY_TOL,
    RECONSTRUCTION_TOL, SOLVE_RESIDUAL_TOL,
};
pub use matrix::Matrix;
pub use sym::SymMatrix;
pub use vector::Point;
