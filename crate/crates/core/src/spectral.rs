// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Quadrature-based Fourier transforms under the convention
//! `ĥ(ω) = (1/2π) ∫ e^(−iωt) h(t) dt`.
//!
//! Transforms are trapezoid sums on a uniform sample grid plus an analytic
//! estimate of the tails beyond the sampled span. The tail model is fitted to
//! the last two samples at each end: a power law `|t − c|^(−p)` around the
//! peak `c`, or an exponential when the apparent exponent is very large.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cx, Cx, Real};
use crate::weighting::{ProbeFunction, ProbeKind};

/// Complex samples of a time function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    pub t_start: T,
    pub dt: T,
    pub values: Vec<Cx<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(t_start: T, dt: T, values: Vec<Cx<T>>) -> Self {
        Self {
            t_start,
            dt,
            values,
        }
    }

    pub fn from_fn(t_lo: T, t_hi: T, points: usize, mut f: impl FnMut(T) -> Cx<T>) -> Self {
        let dt = (t_hi - t_lo) / T::from_count(points - 1);
        let values = (0..points)
            .map(|i| f(t_lo + dt * T::from_count(i)))
            .collect();
        Self::new(t_lo, dt, values)
    }

    pub fn time(&self, i: usize) -> T {
        self.t_start + self.dt * T::from_count(i)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformOptions {
    /// Required ratio between the Nyquist frequency and the requested one.
    pub nyquist_margin: f64,
    /// Largest allowed `|h(edge)| / max |h|` before the tails are considered
    /// not to decay within the sampled span.
    pub decay_tol: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            nyquist_margin: 4.0,
            decay_tol: 1e-3,
        }
    }
}

/// `(1/2π) ∫ e^(−iwt) h(t) dt` with tail correction.
pub fn fourier_forward<T: Real>(
    h: &SampledFunction<T>,
    w: T,
    opts: &TransformOptions,
) -> Result<Cx<T>> {
    let n = h.len();
    if n < 4 {
        return Err(Error::InvalidParameter(
            "transform needs at least 4 samples".into(),
        ));
    }
    if !(h.dt > T::zero()) {
        return Err(Error::InvalidParameter(
            "sample spacing must be positive".into(),
        ));
    }
    let nyquist = T::PI() / h.dt;
    if w.abs() * T::lit(opts.nyquist_margin) > nyquist {
        return Err(Error::Aliasing {
            frequency: w.to_f64_lossy(),
            nyquist: nyquist.to_f64_lossy(),
        });
    }
    let (peak, max_abs) = h
        .values
        .iter()
        .enumerate()
        .fold((0, T::zero()), |acc, (i, v)| {
            if v.norm() > acc.1 {
                (i, v.norm())
            } else {
                acc
            }
        });
    if max_abs == T::zero() {
        return Ok(Cx::new(T::zero(), T::zero()));
    }
    let tol = T::lit(opts.decay_tol) * max_abs;
    if h.values[0].norm() > tol || h.values[n - 1].norm() > tol {
        return Err(Error::TransformAccuracy(format!(
            "samples do not decay within the span: edge/peak = {:e}, {:e}",
            (h.values[0].norm() / max_abs).to_f64_lossy(),
            (h.values[n - 1].norm() / max_abs).to_f64_lossy()
        )));
    }

    // Trapezoid sum with incremental phase rotation.
    let step = Cx::from_polar(T::one(), -w * h.dt);
    let mut phase = Cx::from_polar(T::one(), -w * h.t_start);
    let mut sum = Cx::new(T::zero(), T::zero());
    let half = T::lit(0.5);
    for (i, v) in h.values.iter().enumerate() {
        let weight = if i == 0 || i == n - 1 { half } else { T::one() };
        sum += *v * phase * weight;
        phase *= step;
        if i % 64 == 63 {
            // Re-anchor to bound accumulated rounding in the rotation.
            phase = Cx::from_polar(T::one(), -w * h.time(i + 1));
        }
    }
    let mut total = sum * h.dt;

    let center = h.time(peak);
    total += tail(h, n - 1, n - 2, center, w, false)?;
    total += tail(h, 0, 1, center, w, true)?;
    Ok(total / T::two_pi())
}

/// Contribution of `∫ e^(−iwt) h(t) dt` beyond one end of the samples.
fn tail<T: Real>(
    h: &SampledFunction<T>,
    edge: usize,
    inner: usize,
    center: T,
    w: T,
    left: bool,
) -> Result<Cx<T>> {
    let he = h.values[edge];
    let hi = h.values[inner];
    if he.norm() == T::zero() || hi.norm() == T::zero() {
        return Ok(Cx::new(T::zero(), T::zero()));
    }
    let te = h.time(edge);
    let dist = (te - center).abs();
    let ratio = hi.norm() / he.norm();
    if dist <= h.dt || ratio <= T::one() {
        return Err(Error::TransformAccuracy(
            "samples are not decaying towards the edge".into(),
        ));
    }
    let p = ratio.ln() / (dist / (dist - h.dt)).ln();
    if p > T::lit(40.0) {
        // Exponential tail h(t) = h_e·e^(−κ|t − t_e|).
        let kappa = ratio.ln() / h.dt;
        let phase = Cx::from_polar(T::one(), -w * te);
        let denom = if left { cx(kappa, -w) } else { cx(kappa, w) };
        return Ok(he * phase / denom);
    }
    if p <= T::one() {
        return Err(Error::TransformAccuracy(format!(
            "tail decays like |t|^(-{p}); not integrable"
        )));
    }
    // t = c ± dist·u, u ≥ 1.
    let a = if left { -w * dist } else { w * dist };
    let j = power_tail(a, p);
    Ok(he * Cx::from_polar(T::one(), -w * center) * j * dist)
}

/// `J(a, p) = ∫₁^∞ e^(−iau) u^(−p) du` for `p > 1`.
fn power_tail<T: Real>(a: T, p: T) -> Cx<T> {
    if a == T::zero() {
        return Cx::new(T::one() / (p - T::one()), T::zero());
    }
    let two = T::lit(2.0);
    let big_u = (T::lit(32.0) * (p + two) / a.abs()).max(T::one());
    let ia = Cx::new(T::zero(), a);
    let term = |u: T| Cx::from_polar(u.powf(-p), -a * u);

    // Numerical part on [1, U] in v = ln u, panels sized to the local phase rate.
    let (gx, gw) = gauss_legendre::<T>(16);
    let mut acc = Cx::new(T::zero(), T::zero());
    let v_end = big_u.ln();
    let mut v = T::zero();
    while v < v_end {
        let rate = a.abs() * v.exp();
        let width = (T::lit(0.25))
            .min(T::one() / rate.max(T::lit(1e-300)))
            .min(v_end - v);
        let c = v + width / two;
        for (x, wt) in gx.iter().zip(&gw) {
            let vv = c + width / two * *x;
            let u = vv.exp();
            acc += term(u) * (u * *wt * width / two);
        }
        v += width;
    }

    // Asymptotic integration by parts beyond U.
    let phi0 = big_u.powf(-p);
    let phi1 = -p * big_u.powf(-p - T::one());
    let phi2 = p * (p + T::one()) * big_u.powf(-p - two);
    let phi3 = -p * (p + T::one()) * (p + two) * big_u.powf(-p - T::lit(3.0));
    let ia2 = ia * ia;
    let series = Cx::new(phi0, T::zero()) / ia
        + Cx::new(phi1, T::zero()) / ia2
        + Cx::new(phi2, T::zero()) / (ia2 * ia)
        + Cx::new(phi3, T::zero()) / (ia2 * ia2);
    acc + Cx::from_polar(T::one(), -a * big_u) * series
}

/// Grid for [`sqrt_probe_transform`]: `points` frequencies on
/// `[−half_span/t0, half_span/t0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub half_span_t0: f64,
    pub points: usize,
}

impl Default for ProfileGrid {
    fn default() -> Self {
        // Odd count keeps ω = 0 on the grid.
        Self {
            half_span_t0: 8.0,
            points: 4097,
        }
    }
}

impl ProfileGrid {
    /// Default grid for a probe family. `|g|²` of the Lorentzian-squared
    /// probe is still `e^(−16)` at `8/t0`, so its grid is twice as wide at
    /// the same spacing.
    pub fn for_probe(kind: ProbeKind) -> Self {
        match kind {
            ProbeKind::LorentzianSquared => Self {
                half_span_t0: 16.0,
                points: 8193,
            },
            _ => Self::default(),
        }
    }
}

/// Complex spectrum on a uniform frequency grid, transform convention
/// `(1/2π) ∫ e^(−iωt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProfile<T> {
    pub w_start: T,
    pub dw: T,
    pub values: Vec<Cx<T>>,
}

impl<T: Real> FrequencyProfile<T> {
    pub const CONVENTION: &'static str = "one-over-two-pi-forward";

    pub fn frequency(&self, i: usize) -> T {
        self.w_start + self.dw * T::from_count(i)
    }

    pub fn w_end(&self) -> T {
        self.frequency(self.values.len() - 1)
    }

    /// Four-point cubic (Lagrange) interpolation; zero outside the grid.
    pub fn interpolate(&self, w: T) -> Cx<T> {
        let n = self.values.len();
        let x = (w - self.w_start) / self.dw;
        if x < T::zero() || x > T::from_count(n - 1) {
            return Cx::new(T::zero(), T::zero());
        }
        let base = x.floor().to_usize().unwrap_or(0).min(n - 2);
        let frac = x - T::from_count(base);
        if frac == T::zero() {
            return self.values[base];
        }
        let i0 = base.saturating_sub(1).min(n.saturating_sub(4));
        let mut out = Cx::new(T::zero(), T::zero());
        for j in 0..4.min(n) {
            let xj = T::from_count(i0 + j);
            let mut l = T::one();
            for k in 0..4.min(n) {
                if k != j {
                    let xk = T::from_count(i0 + k);
                    l = l * (x - xk) / (xj - xk);
                }
            }
            out += self.values[i0 + j] * l;
        }
        out
    }

    /// Largest `|g(p) − conj(g(−p))|` over the grid.
    pub fn conjugate_symmetry_defect(&self) -> T {
        let n = self.values.len();
        (0..n)
            .map(|i| (self.values[i] - self.values[n - 1 - i].conj()).norm())
            .fold(T::zero(), T::max)
    }

    /// `∫ |g|² dω` by the trapezoid rule.
    pub fn power(&self) -> T {
        let w = grid_weights::<T>(self.values.len());
        self.values
            .iter()
            .zip(&w)
            .map(|(v, w)| *w * v.norm_sqr())
            .sum::<T>()
            * self.dw
    }

    /// Three-column text `ω re im` for inspection.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# omega re im\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:e} {:e} {:e}", self.frequency(i), v.re, v.im);
        }
        out
    }
}

/// Composite Simpson weights (in units of the spacing) for an odd number
/// of points, trapezoid weights otherwise. With an odd count the centre
/// node, where the Lorentzian-squared profile has its kink, is a panel
/// boundary.
fn grid_weights<T: Real>(n: usize) -> Vec<T> {
    if n >= 3 && n % 2 == 1 {
        (0..n)
            .map(|i| {
                let w = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                T::lit(w / 3.0)
            })
            .collect()
    } else {
        (0..n)
            .map(|i| {
                if i == 0 || i + 1 == n {
                    T::lit(0.5)
                } else {
                    T::one()
                }
            })
            .collect()
    }
}

/// Numerical transform of `√f` on the profile grid.
pub fn sqrt_probe_transform<T: Real>(
    f: &ProbeFunction<T>,
    grid: &ProfileGrid,
) -> Result<FrequencyProfile<T>> {
    if grid.points < 4 {
        return Err(Error::InvalidParameter(
            "profile grid needs at least 4 points".into(),
        ));
    }
    let sampled = f.sampled(true)?;
    let half = T::lit(grid.half_span_t0) / f.t0();
    let dw = half * T::lit(2.0) / T::from_count(grid.points - 1);
    let opts = TransformOptions::default();
    let values = (0..grid.points)
        .map(|i| fourier_forward(&sampled, -half + dw * T::from_count(i), &opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyProfile {
        w_start: -half,
        dw,
        values,
    })
}

/// `|∫ g(p − ω) g(ω) dω − f̂(p)|`, with `g` the numerical transform of `√f`
/// and `f̂` the direct numerical transform of `f`.
pub fn convolution_identity_check<T: Real>(
    f: &ProbeFunction<T>,
    p: T,
    grid: &ProfileGrid,
) -> Result<T> {
    let g = sqrt_probe_transform(f, grid)?;
    convolution_residual(f, &g, p)
}

/// As [`convolution_identity_check`] but reusing a computed profile.
pub fn convolution_residual<T: Real>(
    f: &ProbeFunction<T>,
    g: &FrequencyProfile<T>,
    p: T,
) -> Result<T> {
    let n = g.values.len();
    let weights = grid_weights::<T>(n);
    let mut conv = Cx::new(T::zero(), T::zero());
    let (lo, hi) = (g.w_start, g.w_end());
    for i in 0..n {
        let w = g.frequency(i);
        let shifted = p - w;
        if shifted < lo || shifted > hi {
            continue;
        }
        conv += g.interpolate(shifted) * g.values[i] * weights[i];
    }
    conv *= g.dw;
    let direct = fourier_forward(&f.sampled(false)?, p, &TransformOptions::default())?;
    Ok((conv - direct).norm())
}
