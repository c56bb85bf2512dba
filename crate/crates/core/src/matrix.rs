//! Correlation-matrix measure for portfolios of two languages.
//!
//! Two fluent languages with correlation `ρ` (one minus their linguistic
//! distance) score `2 − ρ^r`: independent languages count twice, identical
//! ones once.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("correlation {0} is outside [0, 1]")]
    RhoOutOfRange(f64),
    #[error("family exponent must be > 0, got {0}")]
    NonPositiveExponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub rho: f64,
    #[serde(default = "default_exponent", rename = "r")]
    pub exponent_r: f64,
}

fn default_exponent() -> f64 {
    1.0
}

impl PairCorrelation {
    pub fn new(rho: f64, exponent_r: f64) -> Result<Self, MatrixError> {
        let corr = PairCorrelation { rho, exponent_r };
        corr.validate()?;
        Ok(corr)
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(MatrixError::RhoOutOfRange(self.rho));
        }
        if !(self.exponent_r > 0.0 && self.exponent_r.is_finite()) {
            return Err(MatrixError::NonPositiveExponent(self.exponent_r));
        }
        Ok(())
    }
}

/// `2 − ρ^r`, in `[1, 2]`.
pub fn matrix_lq(corr: &PairCorrelation) -> Result<f64, MatrixError> {
    corr.validate()?;
    Ok(2.0 - corr.rho.powf(corr.exponent_r))
}
