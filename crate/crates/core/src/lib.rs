//! Cubic-regularized Newton (CR) and proximal gradient descent-ascent with
//! Kurdyka-Łojasiewicz convergence-rate diagnostics.
//!
//! Solvers and oracles are generic over [`Scalar`] (`f32`/`f64`); the
//! `*64` aliases below fix the common double-precision instantiation.
//! Rate analysis in [`kl`] always works on `f64` sequences.

pub mod cr;
pub mod cubic;
pub mod error;
pub mod gda;
pub mod kl;
pub mod linalg;
pub mod prox;
mod scalar;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use cr::{run_cr, CRConfig, CRTrace, CRTraceRecord, Termination};
pub use cubic::{model_value, solve_cubic, verify_global_optimality, CubicModel, CubicSolution};
pub use gda::{run_prox_gda, GDAConfig, GDATrace, GDATraceRecord};
pub use linalg::{sym_eig, EigenDecomposition, Matrix, Point, SymMatrix};
pub use prox::{apply_prox, ProxOperator};
pub use zoo::{MinimaxOracle, SmoothOracle};

pub type Point64 = Point<f64>;
pub type SymMatrix64 = SymMatrix<f64>;
pub type Matrix64 = Matrix<f64>;
pub type CubicModel64 = CubicModel<f64>;
pub type CubicSolution64 = CubicSolution<f64>;
pub type CRConfig64 = CRConfig<f64>;
pub type CRTrace64 = CRTrace<f64>;
pub type GDAConfig64 = GDAConfig<f64>;
pub type GDATrace64 = GDATrace<f64>;

pub type ProxOperator64 = ProxOperator<f64>;
