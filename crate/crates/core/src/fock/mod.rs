// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete-mode model of the quantized field on a truncated Fock space.
//!
//! The momentum integral `∫d³p a(p)` becomes `Σ_i √w_i a_i`, one oscillator
//! per (mode, polarization) pair. Oscillator `o = i·P + α` for mode `i` and
//! polarization `α < P`.

mod modes;
mod observables;
mod operator;
mod space;
mod state;

use serde::{Deserialize, Serialize};

pub use modes::{
    build_modes, cross, dot, norm3, polarization_basis, ModeLayout, ModeSet, Vec3,
    DEFAULT_MAX_OSCILLATORS,
};
pub use observables::{
    b_operator, default_chi, delta_operator, electric_field, energy_operator, expectation,
    field_amplitudes, magnetic_field, mean_field, number_operator, pointwise_square,
    quadrature_variances, smeared_delta_operator, smeared_square, BVariant, FieldComponent,
    PairSign,
};
pub use operator::{Letter, Operator, Word};
pub use space::{FockSpace, MAX_DIMENSION};
pub use state::{
    make_state, make_state_with, pair_vector, FieldState, Squeezer, StateSpec, CAPACITY_TOL,
};

/// Field species: the electromagnetic field carries two transverse
/// polarizations, the scalar field one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Electromagnetic,
    Scalar,
}

impl FieldKind {
    pub fn polarizations(self) -> usize {
        match self {
            FieldKind::Electromagnetic => 2,
            FieldKind::Scalar => 1,
        }
    }
}
