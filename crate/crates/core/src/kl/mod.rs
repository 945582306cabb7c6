//! Rate analysis on observed error sequences: KŁ exponent estimation,
//! convergence classification, theory-indexed predictions and the KŁ
//! error bound. Works on `f64` data.

mod bound;
mod predict;
mod rate;
mod regression;
mod theta;

pub use bound::{error_bound_check, ErrorBoundFit};
pub use predict::{predict_rates, Family, PredictedRate};
pub use rate::{classify_rate, default_burn_in, superlinear_order, RateClass, RateReport, MIN_TAIL};
pub use regression::{fit_line, LineFit};
pub use theta::{estimate_theta, ThetaEstimate, THETA_FLOOR};

/// Entries at or below this value are treated as round-off.
pub const NOISE_FLOOR: f64 = 1e-13;
