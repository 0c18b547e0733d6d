// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Numerical integration: globally adaptive Gauss–Kronrod (7/15) on finite
//! intervals, an exponential map for `[a, ∞)`, and fixed Gauss–Legendre
//! rules for panel quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let sum = f(center - dx) + f(center + dx);
        kronrod += T::lit(WGK[j]) * sum;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * sum;
        }
    }
    let value = kronrod * radius;
    let error = ((kronrod - gauss) * radius).abs();
    (value, error)
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// On failure to meet the tolerance within `max_intervals` subdivisions the
/// partial result and its error estimate are returned inside
/// [`Error::Accuracy`].
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: &QuadOptions,
) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Integration(
            "integration limits must be finite".into(),
        ));
    }
    let eps = T::epsilon();
    let rel_tol = T::lit(opts.rel_tol).max(eps * T::lit(50.0));
    let abs_tol = T::lit(opts.abs_tol);

    let (v0, e0) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v0, e0)];
    let mut total = v0;
    let mut total_err = e0;
    let mut evaluations = 15;

    loop {
        if !total.is_finite() {
            return Err(Error::Integration(
                "integrand produced a non-finite value".into(),
            ));
        }
        let tol = abs_tol.max(rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if intervals.len() >= opts.max_intervals {
            return Err(Error::Accuracy {
                partial: total.to_f64_lossy(),
                error_estimate: total_err.to_f64_lossy(),
            });
        }
        let (idx, _) =
            intervals
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |best, (i, iv)| {
                    if iv.3 > best.1 {
                        (i, iv.3)
                    } else {
                        best
                    }
                });
        let (lo, hi, v, e) = intervals.swap_remove(idx);
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval collapsed to machine resolution; accept what we have.
            intervals.push((lo, hi, v, e));
            let tol = abs_tol.max(rel_tol * total.abs());
            if total_err <= tol * T::lit(100.0) {
                break;
            }
            return Err(Error::Accuracy {
                partial: total.to_f64_lossy(),
                error_estimate: total_err.to_f64_lossy(),
            });
        }
        let (vl, el) = gk15(&mut f, lo, mid);
        let (vr, er) = gk15(&mut f, mid, hi);
        evaluations += 30;
        total += vl + vr - v;
        total_err += el + er - e;
        intervals.push((lo, mid, vl, el));
        intervals.push((mid, hi, vr, er));
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    let value = intervals.iter().map(|iv| iv.2).sum();
    let error = intervals.iter().map(|iv| iv.3).sum();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Integrates over `[a, ∞)` using `x = a − scale·ln u`, `u ∈ (0, 1]`.
///
/// `scale` should match the decay length of the integrand; any positive
/// value converges for exponentially decaying integrands.
pub fn integrate_semi_infinite<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    scale: T,
    opts: &QuadOptions,
) -> Result<Estimate<T>> {
    if !(scale > T::zero()) {
        return Err(Error::InvalidParameter(
            "semi-infinite scale must be positive".into(),
        ));
    }
    integrate(
        |u: T| {
            let x = a - scale * u.ln();
            let v = f(x);
            if v == T::zero() {
                T::zero()
            } else {
                v * scale / u
            }
        },
        T::zero(),
        T::one(),
        opts,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0_f64; n];
    let mut weights = vec![0.0_f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, 0.0_f64);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

/// Composite Gauss–Legendre nodes over a sequence of panels.
///
/// `breakpoints` must be increasing; each gap is split into equal panels no
/// wider than `max_width`.
pub fn panel_nodes<T: Real>(breakpoints: &[T], max_width: T, order: usize) -> Vec<(T, T)> {
    let (x, w) = gauss_legendre::<T>(order);
    let mut out = Vec::new();
    for pair in breakpoints.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi <= lo {
            continue;
        }
        let panels = ((hi - lo) / max_width)
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let width = (hi - lo) / T::from_count(panels);
        for k in 0..panels {
            let a = lo + width * T::from_count(k);
            let half = width * T::lit(0.5);
            let c = a + half;
            for (xi, wi) in x.iter().zip(&w) {
                out.push((c + half * *xi, half * *wi));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x: f64| x * x * x - 2.0 * x,
            0.0,
            2.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate_semi_infinite(
            |x: f64| (-3.0 * x).exp(),
            1.0,
            1.0,
            &QuadOptions::with_rel_tol(1e-12),
        )
        .unwrap();
        assert!((r.value - (-3.0_f64).exp() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 31] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // degree 2n-1 exactness
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(2 * n as i32 - 2))
                .sum();
            assert!((s - 2.0 / (2 * n - 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn non_convergence_reports_partial() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x: f64| 1.0 / x.sqrt(), 1e-300, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn works_in_single_precision() {
        let r = integrate(
            |x: f32| x.sin(),
            0.0,
            std::f32::consts::PI,
            &QuadOptions::with_rel_tol(1e-6),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-5);
    }
}
