// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Right-hand side of the fluctuation inequality, vacuum normalization,
//! decibel reduction, and the narrow-band squeezing limits.
//!
//! With the sensitivity `μ` inserted into the momentum measure,
//!
//! ```text
//! ⟨Δ⟩_max = −(C/(2π)²) ∫₀^∞ dω ∫ d³p μ(p)² |ĝ(ω + |p|)|² |p|
//! ⟨E²⟩_Ω  = (1/(2π)³) ∫ d³p μ(p)² |p|
//! R       = 10·log₁₀((⟨Δ⟩_max + ⟨E²⟩_Ω) / ⟨E²⟩_Ω)
//! ```
//!
//! where `ĝ` is the transform of `√f` and `C` is 2 for the electromagnetic
//! field and 1 for a scalar field.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FieldKind;
use crate::quadrature::{integrate, integrate_semi_infinite, QuadOptions};
use crate::scalar::Real;
use crate::special::{erf, erfc};
use crate::weighting::{ProbeFunction, ProbeKind, SensitivityFunction, SensitivityKind};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundQuery<T> {
    pub probe: ProbeFunction<T>,
    pub sensitivity: SensitivityFunction<T>,
    pub field: FieldKind,
}

/// The triple `(⟨Δ⟩_max, ⟨E²⟩_Ω, R)` for one probe/sensitivity pair.
///
/// For a sharp-line sensitivity the band measure `∫μ² d³p` is normalized to
/// one, so `delta_max` and `vacuum_e2` are per unit band measure while their
/// ratio (and `r_db`) is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult<T> {
    pub delta_max: T,
    pub vacuum_e2: T,
    /// Reported for the electromagnetic field only.
    pub r_db: Option<T>,
    pub quadrature_error: T,
    pub unit_band_measure: bool,
}

/// `(1/(2π)³) ∫ μ(p)² ω_p d³p = (1/2π²) ∫₀^∞ μ(p)² p³ dp`.
pub fn vacuum_fluctuations<T: Real>(mu: &SensitivityFunction<T>) -> Result<T> {
    vacuum_fluctuations_with(mu, &QuadOptions::with_rel_tol(1e-12)).map(|(v, _)| v)
}

fn vacuum_fluctuations_with<T: Real>(
    mu: &SensitivityFunction<T>,
    opts: &QuadOptions,
) -> Result<(T, T)> {
    if mu.kind == SensitivityKind::SharpLine {
        return Err(Error::Unsupported(
            "vacuum fluctuations of a sharp line are resolved only inside ratios".into(),
        ));
    }
    let (lo, hi) = mu.support();
    if mu.bandwidth == T::zero() || hi <= lo {
        return Err(Error::ZeroVacuum);
    }
    let est = integrate(
        |p: T| {
            let m = mu.eval(p).unwrap_or(T::zero());
            m * m * p * p * p
        },
        lo,
        hi,
        opts,
    )?;
    if !(est.value > T::zero()) {
        return Err(Error::ZeroVacuum);
    }
    let pref = T::one() / (T::lit(2.0) * T::PI() * T::PI());
    Ok((pref * est.value, pref * est.error))
}

fn polarization_factor<T: Real>(field: FieldKind) -> T {
    T::from_count(field.polarizations())
}

/// `∫₀^∞ |ĝ(ω + p)|² dω`.
pub fn shifted_power<T: Real>(
    probe: &ProbeFunction<T>,
    p: T,
    opts: &QuadOptions,
) -> Result<(T, T)> {
    let t0 = probe.t0();
    let failure = RefCell::new(None);
    let est = integrate_semi_infinite(
        |w: T| match probe.sqrt_ft_sq(w + p) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::zero()
            }
        },
        T::zero(),
        t0.recip() / T::lit(2.0),
        opts,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((est.value, est.error))
}

/// Evaluates the fluctuation bound by nested adaptive quadrature.
pub fn qi_bound<T: Real>(q: &BoundQuery<T>, opts: &QuadOptions) -> Result<BoundResult<T>> {
    let c = polarization_factor::<T>(q.field);
    let two_pi = T::two_pi();
    let mu = &q.sensitivity;

    if mu.kind == SensitivityKind::SharpLine {
        // ∫μ² d³p cancels between ⟨Δ⟩_max and ⟨E²⟩_Ω; normalize it to one.
        let w0 = mu.omega0;
        let (inner, err) = shifted_power(&q.probe, w0, opts)?;
        let vacuum = w0 / (two_pi * two_pi * two_pi);
        let delta = -c / (two_pi * two_pi) * w0 * inner;
        let r_db = match q.field {
            FieldKind::Electromagnetic => Some(reduction_db(delta, vacuum)?),
            FieldKind::Scalar => None,
        };
        return Ok(BoundResult {
            delta_max: delta,
            vacuum_e2: vacuum,
            r_db,
            quadrature_error: c / (two_pi * two_pi) * w0 * err,
            unit_band_measure: true,
        });
    }

    let (vacuum, vac_err) = vacuum_fluctuations_with(mu, opts)?;
    let (lo, hi) = mu.support();
    let failure = RefCell::new(None);
    let worst_inner = RefCell::new(T::zero());
    let outer = integrate(
        |p: T| {
            let m = match mu.eval(p) {
                Ok(m) => m,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return T::zero();
                }
            };
            if m == T::zero() {
                return T::zero();
            }
            match shifted_power(&q.probe, p, opts) {
                Ok((v, e)) => {
                    if v > T::zero() {
                        let mut w = worst_inner.borrow_mut();
                        *w = w.max(e / v);
                    }
                    m * m * p * p * p * v
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    T::zero()
                }
            }
        },
        lo,
        hi,
        opts,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let pref = c * T::lit(4.0) * T::PI() / (two_pi * two_pi);
    let delta = -pref * outer.value;
    let err = pref * outer.error + delta.abs() * worst_inner.into_inner() + vac_err;
    let r_db = match q.field {
        FieldKind::Electromagnetic => Some(reduction_db(delta, vacuum)?),
        FieldKind::Scalar => None,
    };
    Ok(BoundResult {
        delta_max: delta,
        vacuum_e2: vacuum,
        r_db,
        quadrature_error: err,
        unit_band_measure: false,
    })
}

/// The same bound through the single-integral closed forms available for
/// the built-in probes:
///
/// * Lorentzian-squared: `−(C/(2π)²) ∫ μ² p³ e^(−2p t0) dp`, with an exact
///   antiderivative for rectangular bands;
/// * Gaussian: the `ω` integral done analytically,
///   `∫₀^∞ e^(−2(p+ω)²t0²) dω = √(π/8)·erfc(√2 p t0)/t0`.
pub fn closed_form_delta<T: Real>(q: &BoundQuery<T>) -> Result<T> {
    let c = polarization_factor::<T>(q.field);
    let mu = &q.sensitivity;
    if mu.kind == SensitivityKind::SharpLine {
        return Err(Error::Unsupported("closed forms need a finite band".into()));
    }
    let t0 = q.probe.t0();
    let two_pi = T::two_pi();
    let (lo, hi) = mu.support();
    let opts = QuadOptions::with_rel_tol(1e-13);
    match q.probe.kind() {
        ProbeKind::LorentzianSquared => {
            let a = T::lit(2.0) * t0;
            let integral = if mu.kind == SensitivityKind::RectBand {
                // ∫ p³ e^(−ap) dp = −e^(−ap)(p³/a + 3p²/a² + 6p/a³ + 6/a⁴)
                let anti = |p: T| {
                    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
                    -(-a * p).exp()
                        * (p * p * p / a
                            + T::lit(3.0) * p * p / a2
                            + T::lit(6.0) * p / a3
                            + T::lit(6.0) / a4)
                };
                anti(hi) - anti(lo)
            } else {
                integrate(
                    |p: T| {
                        let m = mu.eval(p).unwrap_or(T::zero());
                        m * m * p * p * p * (-a * p).exp()
                    },
                    lo,
                    hi,
                    &opts,
                )?
                .value
            };
            Ok(-c / (two_pi * two_pi) * integral)
        }
        ProbeKind::Gaussian => {
            let sqrt2 = T::SQRT_2();
            let integral = integrate(
                |p: T| {
                    let m = mu.eval(p).unwrap_or(T::zero());
                    m * m * p * p * p * erfc(sqrt2 * p * t0)
                },
                lo,
                hi,
                &opts,
            )?
            .value;
            let transform_amp = t0 / (T::PI() * two_pi.sqrt());
            let inner_amp = (T::PI() / T::lit(8.0)).sqrt() / t0;
            Ok(-c * T::lit(4.0) * T::PI() / (two_pi * two_pi)
                * transform_amp
                * inner_amp
                * integral)
        }
        ProbeKind::Tabulated => Err(Error::Unsupported(
            "no closed form for tabulated probes".into(),
        )),
    }
}

/// `10·log₁₀((δ + vac)/vac)`; returns `−∞` at total suppression.
pub fn reduction_db<T: Real>(delta: T, vac: T) -> Result<T> {
    if !(vac > T::zero()) {
        return Err(Error::ZeroVacuum);
    }
    let ratio = (delta + vac) / vac;
    if ratio < -T::lit(1e-12) {
        return Err(Error::InequalityViolation(format!(
            "reduction below total suppression: delta = {delta}, vacuum = {vac}"
        )));
    }
    if ratio <= T::zero() {
        return Ok(T::neg_infinity());
    }
    Ok(T::lit(10.0) * ratio.log10())
}

/// `10·log₁₀(erf(2√2 τ))`, the closed form as published.
pub fn squeezing_limit_paper<T: Real>(tau: T) -> Result<T> {
    if !(tau > T::zero()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    Ok(T::lit(10.0) * erf(T::lit(2.0) * T::SQRT_2() * tau).log10())
}

/// `10·log₁₀(1 − (4/√(2π)) ∫₀^∞ e^(−2(s+τ)²) ds)`, the narrow-band reduction
/// of the Gaussian-probe bound, evaluated by quadrature.
pub fn squeezing_limit_integral<T: Real>(tau: T) -> Result<T> {
    if !(tau >= T::zero()) {
        return Err(Error::Domain(format!("tau must be nonnegative, got {tau}")));
    }
    let opts = QuadOptions {
        rel_tol: 1e-14,
        abs_tol: 1e-15,
        max_intervals: 2000,
    };
    let est = integrate_semi_infinite(
        |s: T| {
            let x = s + tau;
            (-T::lit(2.0) * x * x).exp()
        },
        T::zero(),
        T::lit(0.25),
        &opts,
    )?;
    let arg = T::one() - T::lit(4.0) / T::two_pi().sqrt() * est.value;
    if arg <= T::zero() {
        return Ok(T::neg_infinity());
    }
    Ok(T::lit(10.0) * arg.log10())
}

/// `10·log₁₀(erf(√2 τ))`: the analytic value of [`squeezing_limit_integral`].
pub fn squeezing_limit_erf_reduction<T: Real>(tau: T) -> Result<T> {
    if !(tau > T::zero()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    Ok(T::lit(10.0) * erf(T::SQRT_2() * tau).log10())
}

/// `(4 t0/√(2π)) ∫₀^∞ e^(−2(p+ω)²t0²) dω`, which never exceeds one.
pub fn gaussian_aux_check<T: Real>(p: T, t0: T) -> Result<T> {
    if !(t0 > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "t0 must be positive, got {t0}"
        )));
    }
    if !(p >= T::zero()) {
        return Err(Error::Domain(format!("p must be nonnegative, got {p}")));
    }
    let opts = QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_intervals: 2000,
    };
    let est = integrate_semi_infinite(
        |w: T| {
            let x = (p + w) * t0;
            (-T::lit(2.0) * x * x).exp()
        },
        T::zero(),
        t0.recip() / T::lit(4.0),
        &opts,
    )?;
    Ok(T::lit(4.0) * t0 / T::two_pi().sqrt() * est.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMode {
    PaperErf,
    DirectIntegral,
}

impl LimitMode {
    pub fn label(self) -> &'static str {
        match self {
            LimitMode::PaperErf => "paper_erf",
            LimitMode::DirectIntegral => "direct_integral",
        }
    }

    pub fn evaluate<T: Real>(self, tau: T) -> Result<T> {
        match self {
            LimitMode::PaperErf => squeezing_limit_paper(tau),
            LimitMode::DirectIntegral => squeezing_limit_integral(tau),
        }
    }
}

/// One `(τ, R)` row; failed points carry the error message instead of a value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow<T> {
    pub tau: T,
    pub mode: LimitMode,
    pub r_db: Option<T>,
    pub error: Option<String>,
}

/// Evaluates one limit formula on each grid point, preserving input order.
pub fn sweep_limits<T: Real>(tau_grid: &[T], mode: LimitMode) -> Result<Vec<LimitRow<T>>> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter("tau grid is empty".into()));
    }
    Ok(tau_grid
        .iter()
        .map(|&tau| match mode.evaluate(tau) {
            Ok(v) => LimitRow {
                tau,
                mode,
                r_db: Some(v),
                error: None,
            },
            Err(e) => LimitRow {
                tau,
                mode,
                r_db: None,
                error: Some(e.to_string()),
            },
        })
        .collect())
}
