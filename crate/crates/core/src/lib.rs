// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-inequality bounds on the reduction of electric-field vacuum
//! fluctuations, with a discrete-mode Fock-space model that verifies the
//! inequality from first principles.
//!
//! Everything numerical is generic over [`Real`] (`f32`/`f64`); the aliases
//! at the crate root fix the scalar to `f64`.

// Comparisons are written as `!(x > 0)` so NaN fails validation.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod bounds;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod verify;
pub mod weighting;

pub use error::{Error, ErrorClass, Result};
pub use scalar::{Cx, Real};

pub type Probe = weighting::ProbeFunction<f64>;
pub type Sensitivity = weighting::SensitivityFunction<f64>;
pub type BoundQuery = bounds::BoundQuery<f64>;
pub type BoundResult = bounds::BoundResult<f64>;
pub type LimitRow = bounds::LimitRow<f64>;
pub type ModeSet = fock::ModeSet<f64>;
pub type FockSpace = fock::FockSpace<f64>;
pub type Operator = fock::Operator<f64>;
pub type FieldState = fock::FieldState<f64>;
pub type StateSpec = fock::StateSpec<f64>;
pub type FrequencyProfile = spectral::FrequencyProfile<f64>;
pub type DecompositionReport = verify::DecompositionReport<f64>;
pub type InequalityScanReport = verify::InequalityScanReport<f64>;
