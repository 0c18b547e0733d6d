// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Variants are grouped by the exit class the CLI maps them to:
/// validation problems, accuracy problems, and violations of the
/// inequality or decomposition identity.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("quadrature did not converge: estimate {partial:e} with error {error_estimate:e}")]
    Accuracy { partial: f64, error_estimate: f64 },

    #[error("transform accuracy: {0}")]
    TransformAccuracy(String),

    #[error(
        "aliasing: frequency {frequency} exceeds a quarter of the Nyquist frequency {nyquist}"
    )]
    Aliasing { frequency: f64, nyquist: f64 },

    #[error("vacuum fluctuations vanish for this sensitivity; ratios are undefined")]
    ZeroVacuum,

    #[error("truncation capacity exceeded: top-level population {population:e} > {limit:e}")]
    Capacity { population: f64, limit: f64 },

    #[error("frequency grid does not cover the band [{missing_lo}, {missing_hi}]")]
    GridCoverage { missing_lo: f64, missing_hi: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("inequality violated: {0}")]
    InequalityViolation(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Coarse classification used for process exit codes.
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidParameter(_)
            | OutOfDomain { .. }
            | Domain(_)
            | Unsupported(_)
            | Shape(_)
            | Capacity { .. }
            | GridCoverage { .. }
            | NotHermitian { .. }
            | Parse { .. }
            | ZeroVacuum => ErrorClass::Validation,
            Integration(_) | Accuracy { .. } | TransformAccuracy(_) | Aliasing { .. } | Io(_) => {
                ErrorClass::Accuracy
            }
            InequalityViolation(_) | IdentityViolation(_) => ErrorClass::Violation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Accuracy,
    Violation,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
