// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Error function and its complement.
//!
//! Rational approximations follow the SunPro `s_erf.c` scheme (FreeBSD msun):
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```
//!
//! The evaluation is generic over the scalar type; coefficients are `f64`
//! and are rounded into the target type. `erfc` keeps full relative accuracy
//! in the far tail, which the bound computations rely on for large `τ`.

use crate::scalar::Real;

const ERX: f64 = 8.45062911510467529297e-01;
const EFX: f64 = 1.28379167095512586316e-01;

const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 6] = [
    1.0,
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];
const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 7] = [
    1.0,
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];
const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 9] = [
    1.0,
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];
const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 8] = [
    1.0,
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

fn horner<T: Real>(coeffs: &[f64], x: T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * x + T::lit(c))
}

/// `erfc(x)` for `x ≥ 1.25`, via `exp(-x² - 0.5625 + R/S) / x`.
fn erfc_tail<T: Real>(x: T) -> T {
    let s = T::one() / (x * x);
    let (r, q) = if x < T::lit(1.0 / 0.35) {
        (horner(&RA, s), horner(&SA, s))
    } else {
        (horner(&RB, s), horner(&SB, s))
    };
    (-x * x - T::lit(0.5625) + r / q).exp() / x
}

/// Error function `erf(x) = 2/√π ∫₀ˣ e^(−t²) dt`.
pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let sign = if x < T::zero() { -T::one() } else { T::one() };
    let v = if ax < T::lit(0.84375) {
        if ax < T::lit(3.725_290_298_461_914e-9) {
            ax + T::lit(EFX) * ax
        } else {
            let z = ax * ax;
            ax + ax * horner(&PP, z) / horner(&QQ, z)
        }
    } else if ax < T::lit(1.25) {
        let s = ax - T::one();
        T::lit(ERX) + horner(&PA, s) / horner(&QA, s)
    } else if ax >= T::lit(6.0) {
        T::one()
    } else {
        T::one() - erfc_tail(ax)
    };
    sign * v
}

/// Complementary error function `erfc(x) = 1 − erf(x)`, accurate in relative
/// terms for large positive `x`.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let two = T::lit(2.0);
    let ax = x.abs();
    if ax < T::lit(0.84375) {
        let z = ax * ax;
        let y = horner(&PP, z) / horner(&QQ, z);
        let e = if ax < T::lit(0.25) {
            ax + ax * y
        } else {
            T::lit(0.5) + (ax * y + (ax - T::lit(0.5)))
        };
        return if x < T::zero() {
            T::one() + e
        } else {
            T::one() - e
        };
    }
    if ax < T::lit(1.25) {
        let s = ax - T::one();
        let e = T::lit(ERX) + horner(&PA, s) / horner(&QA, s);
        return if x < T::zero() {
            T::one() + e
        } else {
            T::one() - e
        };
    }
    if ax < T::lit(28.0) {
        let t = erfc_tail(ax);
        return if x < T::zero() { two - t } else { t };
    }
    if x < T::zero() {
        two
    } else {
        T::zero()
    }
}
