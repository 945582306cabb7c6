use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kl::RateClass;

/// Which sequence a prediction is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// CR function values `r_k = f(x_k) − f*`.
    CrValue,
    /// CR iterates `‖x_k − x̄‖`.
    CrVariable,
    /// CR distance to the solution set.
    CrDistance,
    /// GDA Lyapunov values `H(z_t) − H*`.
    GdaValue,
    /// GDA iterates `‖x_t − x*‖`, `‖y_t − y*(x*)‖`.
    GdaVariable,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::CrValue, Family::CrVariable, Family::CrDistance, Family::GdaValue, Family::GdaVariable];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::CrValue => "cr_value",
            Family::CrVariable => "cr_variable",
            Family::CrDistance => "cr_distance",
            Family::GdaValue => "gda_value",
            Family::GdaVariable => "gda_variable",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown rate family '{s}'")))
    }
}

/// Class predicted by the theory, with the superlinear order or the
/// sublinear exponent where one applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedRate {
    pub theta: f64,
    pub family: Family,
    pub class: RateClass,
    /// Superlinear order `q` (`e_k ≲ e_{k−1}^q`).
    pub order: Option<f64>,
    /// Sublinear exponent `p` (`e_k ≲ k^{−p}`).
    pub exponent: Option<f64>,
}

/// CR families switch at `θ = 1/3`, GDA families at `θ = 1/2`; `θ = 1` is
/// finite-step. A threshold value maps to its boundary class.
pub fn predict_rates(theta: f64, family: Family) -> Result<PredictedRate> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Input(format!("theta must lie in (0, 1], got {theta}")));
    }
    let mut out = PredictedRate { theta, family, class: RateClass::FiniteStep, order: None, exponent: None };
    if theta == 1.0 {
        return Ok(out);
    }
    let cr = matches!(family, Family::CrValue | Family::CrVariable | Family::CrDistance);
    let threshold = if cr { 1.0 / 3.0 } else { 0.5 };
    // a tolerance of a few ulps lets 1.0/3.0 hit the boundary exactly
    let at_threshold = (theta - threshold).abs() <= 4.0 * f64::EPSILON;
    if at_threshold {
        out.class = RateClass::Linear;
    } else if theta > threshold {
        out.class = RateClass::Superlinear;
        out.order = Some(match family {
            Family::CrValue => 2.0 / (3.0 * (1.0 - theta)),
            Family::CrVariable => 2.0 * theta / (3.0 * (1.0 - theta)) + 2.0 / 3.0,
            Family::CrDistance => 2.0 * theta / (1.0 - theta),
            Family::GdaValue | Family::GdaVariable => 1.0 / (2.0 * (1.0 - theta)),
        });
    } else {
        out.class = RateClass::Sublinear;
        out.exponent = Some(match family {
            Family::CrValue => 2.0 / (1.0 - 3.0 * theta),
            Family::CrVariable | Family::CrDistance => 2.0 * theta / (1.0 - 3.0 * theta),
            Family::GdaValue => 1.0 / (1.0 - 2.0 * theta),
            Family::GdaVariable => theta / (1.0 - 2.0 * theta),
        });
    }
    Ok(out)
}
