// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-probe functions `f(t)` and detector sensitivity functions `μ(ω)`.
//!
//! Natural units (`ħ = c = 1`) are used throughout, so frequencies and
//! inverse times share one unit. The Fourier convention is
//! `f̂(ω) = (1/2π) ∫ e^(−iωt) f(t) dt`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{re, Cx, Real};
use crate::spectral::{fourier_forward, SampledFunction, TransformOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `f(t) = (2/π) t0³ / (t² + t0²)²`
    LorentzianSquared,
    /// `g(t) = e^(−t²/2t0²) / (t0 √(2π))`
    Gaussian,
    /// Sampled `(t, value)` data, renormalized to unit integral.
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
struct Table<T> {
    /// Uniformly spaced sample times.
    times: Vec<T>,
    /// Renormalized probe values.
    values: Vec<T>,
}

/// A nonnegative, unit-integral time weighting with scale `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFunction<T> {
    kind: ProbeKind,
    t0: T,
    table: Option<Table<T>>,
}

impl<T: Real> ProbeFunction<T> {
    pub fn lorentzian_squared(t0: T) -> Result<Self> {
        Self::builtin(ProbeKind::LorentzianSquared, t0)
    }

    pub fn gaussian(t0: T) -> Result<Self> {
        Self::builtin(ProbeKind::Gaussian, t0)
    }

    pub fn builtin(kind: ProbeKind, t0: T) -> Result<Self> {
        if kind == ProbeKind::Tabulated {
            return Err(Error::InvalidParameter(
                "tabulated probes are built from sample data".into(),
            ));
        }
        if !(t0 > T::zero() && t0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "probe scale t0 must be positive, got {t0}"
            )));
        }
        Ok(Self {
            kind,
            t0,
            table: None,
        })
    }

    /// Builds a tabulated probe from `(t, value)` samples.
    ///
    /// Times must be strictly increasing and values nonnegative. Non-uniform
    /// tables are linearly resampled at their smallest spacing. The table is
    /// divided by its trapezoid integral, and `t0` is set to the standard
    /// deviation of the normalized density.
    pub fn tabulated(samples: &[(T, T)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidParameter(
                "a tabulated probe needs at least 3 samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter(
                    "sample times must be strictly increasing".into(),
                ));
            }
        }
        for &(t, v) in samples {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::Integration(
                    "tabulated probe contains non-finite samples".into(),
                ));
            }
            if v < T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "probe value {v} at t={t} is negative"
                )));
            }
        }
        let (times, values) = resample_uniform(samples);
        let dt = times[1] - times[0];
        let total = trapezoid(&values, dt);
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::Integration(
                "tabulated probe has no finite positive integral".into(),
            ));
        }
        let values: Vec<T> = values.into_iter().map(|v| v / total).collect();
        let weighted = |p: i32| -> T {
            let m: Vec<T> = times
                .iter()
                .zip(&values)
                .map(|(t, v)| t.powi(p) * *v)
                .collect();
            trapezoid(&m, dt)
        };
        let mean = weighted(1);
        let var = weighted(2) - mean * mean;
        let t0 = if var > T::zero() { var.sqrt() } else { dt };
        Ok(Self {
            kind: ProbeKind::Tabulated,
            t0,
            table: Some(Table { times, values }),
        })
    }

    /// Parses two-column `time value` text; `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut cols = body.split_whitespace();
            let mut next = |name: &str| -> Result<T> {
                let tok = cols.next().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: format!("missing {name} column"),
                })?;
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("cannot parse {name} '{tok}'"),
                })?;
                Ok(T::lit(v))
            };
            let t = next("time")?;
            let v = next("value")?;
            if cols.next().is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "expected exactly two columns".into(),
                });
            }
            samples.push((t, v));
        }
        Self::tabulated(&samples)
    }

    pub fn load_table(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_table(&text)
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn is_builtin(&self) -> bool {
        self.table.is_none()
    }

    /// Sample span `[t_min, t_max]` of a tabulated probe.
    pub fn table_span(&self) -> Option<(T, T)> {
        self.table
            .as_ref()
            .map(|tab| (tab.times[0], *tab.times.last().expect("nonempty table")))
    }

    /// Evaluates `f(t)`.
    pub fn eval(&self, t: T) -> Result<T> {
        let t0 = self.t0;
        match self.kind {
            ProbeKind::LorentzianSquared => {
                let d = t * t + t0 * t0;
                Ok(T::lit(2.0) * T::FRAC_1_PI() * t0 * t0 * t0 / (d * d))
            }
            ProbeKind::Gaussian => {
                let x = t / t0;
                Ok((-(x * x) / T::lit(2.0)).exp() / (t0 * T::two_pi().sqrt()))
            }
            ProbeKind::Tabulated => {
                let tab = self.table.as_ref().expect("tabulated probe has a table");
                let (lo, hi) = (tab.times[0], *tab.times.last().unwrap());
                if t < lo || t > hi {
                    return Err(Error::OutOfDomain {
                        value: t.to_f64_lossy(),
                        lo: lo.to_f64_lossy(),
                        hi: hi.to_f64_lossy(),
                    });
                }
                let dt = tab.times[1] - tab.times[0];
                let x = (t - lo) / dt;
                let i = x.floor().to_usize().unwrap_or(0).min(tab.values.len() - 2);
                let frac = x - T::from_count(i);
                Ok(tab.values[i] * (T::one() - frac) + tab.values[i + 1] * frac)
            }
        }
    }

    /// `∫ f dt` by quadrature (trapezoid over the samples for tabulated data).
    pub fn norm(&self) -> Result<T> {
        match &self.table {
            Some(tab) => Ok(trapezoid(&tab.values, tab.times[1] - tab.times[0])),
            None => {
                // t = t0·s/(1−s²) maps ℝ onto (−1, 1) and tames the t⁻⁴ tail.
                let t0 = self.t0;
                let opts = QuadOptions::with_rel_tol(1e-13);
                let est = integrate(
                    |s: T| {
                        let d = T::one() - s * s;
                        if d <= T::zero() {
                            return T::zero();
                        }
                        let t = t0 * s / d;
                        let jac = t0 * (T::one() + s * s) / (d * d);
                        self.eval(t).unwrap_or(T::zero()) * jac
                    },
                    -T::one(),
                    T::one(),
                    &opts,
                )?;
                Ok(est.value)
            }
        }
    }

    /// Fourier transform `f̂(ω)` of the probe.
    pub fn ft(&self, w: T) -> Result<Cx<T>> {
        let t0 = self.t0;
        match self.kind {
            ProbeKind::LorentzianSquared => {
                let x = (w * t0).abs();
                Ok(re((T::one() + x) * (-x).exp() / T::two_pi()))
            }
            ProbeKind::Gaussian => {
                let x = w * t0;
                Ok(re((-(x * x) / T::lit(2.0)).exp() / T::two_pi()))
            }
            ProbeKind::Tabulated => {
                fourier_forward(&self.sampled(false)?, w, &TransformOptions::default())
            }
        }
    }

    /// Fourier transform of `√f`, written `g(ω)`; real and even for the
    /// built-in kinds.
    pub fn sqrt_ft(&self, w: T) -> Result<Cx<T>> {
        let t0 = self.t0;
        match self.kind {
            ProbeKind::LorentzianSquared => {
                Ok(re((t0 / T::two_pi()).sqrt() * (-(w * t0).abs()).exp()))
            }
            ProbeKind::Gaussian => {
                let amp = (t0 / (T::PI() * T::two_pi().sqrt())).sqrt();
                let x = w * t0;
                Ok(re(amp * (-(x * x)).exp()))
            }
            ProbeKind::Tabulated => {
                fourier_forward(&self.sampled(true)?, w, &TransformOptions::default())
            }
        }
    }

    /// `|FT(√f)(ω)|²`.
    pub fn sqrt_ft_sq(&self, w: T) -> Result<T> {
        let t0 = self.t0;
        match self.kind {
            ProbeKind::LorentzianSquared => {
                Ok(t0 / T::two_pi() * (-(T::lit(2.0)) * (w * t0).abs()).exp())
            }
            ProbeKind::Gaussian => {
                let x = w * t0;
                Ok(t0 / (T::PI() * T::two_pi().sqrt()) * (-(T::lit(2.0)) * x * x).exp())
            }
            ProbeKind::Tabulated => Ok(self.sqrt_ft(w)?.norm_sqr()),
        }
    }

    /// Half width at half maximum, by bisection on `f(t) = f(0)/2`.
    pub fn half_width(&self) -> Result<T> {
        if !self.is_builtin() {
            return Err(Error::Unsupported(
                "half width is defined for built-in probes only".into(),
            ));
        }
        let target = self.eval(T::zero())? / T::lit(2.0);
        let mut lo = T::zero();
        let mut hi = self.t0;
        while self.eval(hi)? > target {
            hi *= T::lit(2.0);
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) / T::lit(2.0))
    }

    /// Samples `f` (or `√f`) on a uniform grid suitable for numerical
    /// transforms up to frequency `8/t0` (Gaussian) or `16/t0`
    /// (Lorentzian-squared).
    pub fn sampled(&self, sqrt: bool) -> Result<SampledFunction<T>> {
        let map = |v: T| if sqrt { v.sqrt() } else { v };
        match &self.table {
            Some(tab) => {
                let dt = tab.times[1] - tab.times[0];
                Ok(SampledFunction::new(
                    tab.times[0],
                    dt,
                    tab.values.iter().map(|v| re(map(*v))).collect(),
                ))
            }
            None => {
                let span = match self.kind {
                    ProbeKind::Gaussian => T::lit(24.0),
                    _ => T::lit(256.0),
                } * self.t0;
                // The Lorentzian transform decays only exponentially, so its
                // profiles extend to 16/t0 and need the finer step.
                let dt = match self.kind {
                    ProbeKind::Gaussian => self.t0 / T::lit(16.0),
                    _ => self.t0 / T::lit(32.0),
                };
                let half = (span / dt).round().to_usize().unwrap_or(1);
                let values = (0..=2 * half)
                    .map(|i| {
                        let t = dt * (T::from_count(i) - T::from_count(half));
                        re(map(self.eval(t).unwrap_or(T::zero())))
                    })
                    .collect();
                Ok(SampledFunction::new(-dt * T::from_count(half), dt, values))
            }
        }
    }
}

fn trapezoid<T: Real>(values: &[T], dt: T) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    let inner: T = values[1..n - 1].iter().copied().sum();
    dt * (inner + (values[0] + values[n - 1]) / T::lit(2.0))
}

fn resample_uniform<T: Real>(samples: &[(T, T)]) -> (Vec<T>, Vec<T>) {
    let t_lo = samples[0].0;
    let t_hi = samples[samples.len() - 1].0;
    let min_dt = samples
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(T::infinity(), T::min);
    let mean_dt = (t_hi - t_lo) / T::from_count(samples.len() - 1);
    let uniform = samples
        .windows(2)
        .all(|w| ((w[1].0 - w[0].0) - mean_dt).abs() <= T::lit(1e-9) * mean_dt);
    if uniform {
        let times = (0..samples.len())
            .map(|i| t_lo + mean_dt * T::from_count(i))
            .collect();
        return (times, samples.iter().map(|s| s.1).collect());
    }
    let n = ((t_hi - t_lo) / min_dt)
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(2);
    let dt = (t_hi - t_lo) / T::from_count(n);
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut j = 0;
    for i in 0..=n {
        let t = if i == n {
            t_hi
        } else {
            t_lo + dt * T::from_count(i)
        };
        while j + 2 < samples.len() && samples[j + 1].0 < t {
            j += 1;
        }
        let (ta, va) = samples[j];
        let (tb, vb) = samples[j + 1];
        let frac = ((t - ta) / (tb - ta)).max(T::zero()).min(T::one());
        times.push(t);
        values.push(va + (vb - va) * frac);
    }
    (times, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityKind {
    RectBand,
    GaussianBand,
    SharpLine,
}

/// Detector frequency response `μ(ω)`.
///
/// `bandwidth` is the full width for [`SensitivityKind::RectBand`] and the
/// standard deviation for [`SensitivityKind::GaussianBand`]. A sharp line is
/// a symbolic narrow-band marker: it is never sampled pointwise, and the
/// bound code resolves it analytically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityFunction<T> {
    pub kind: SensitivityKind,
    pub omega0: T,
    pub bandwidth: T,
}

/// Largest `bandwidth / omega0` accepted where a narrow band is assumed.
pub const NARROW_BAND_LIMIT: f64 = 0.1;

impl<T: Real> SensitivityFunction<T> {
    pub fn new(kind: SensitivityKind, omega0: T, bandwidth: T) -> Result<Self> {
        if !(omega0 > T::zero() && omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        if !(bandwidth >= T::zero() && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be nonnegative, got {bandwidth}"
            )));
        }
        let bandwidth = if kind == SensitivityKind::SharpLine {
            T::zero()
        } else {
            bandwidth
        };
        Ok(Self {
            kind,
            omega0,
            bandwidth,
        })
    }

    pub fn rect_band(omega0: T, bandwidth: T) -> Result<Self> {
        Self::new(SensitivityKind::RectBand, omega0, bandwidth)
    }

    pub fn gaussian_band(omega0: T, sigma: T) -> Result<Self> {
        Self::new(SensitivityKind::GaussianBand, omega0, sigma)
    }

    pub fn sharp_line(omega0: T) -> Result<Self> {
        Self::new(SensitivityKind::SharpLine, omega0, T::zero())
    }

    /// Evaluates `μ(ω)` for `ω ≥ 0`.
    pub fn eval(&self, w: T) -> Result<T> {
        if w < T::zero() {
            return Err(Error::Domain(format!(
                "sensitivity evaluated at negative frequency {w}"
            )));
        }
        match self.kind {
            SensitivityKind::RectBand => {
                let half = self.bandwidth / T::lit(2.0);
                let inside = w >= self.omega0 - half && w <= self.omega0 + half;
                Ok(if inside && self.bandwidth > T::zero() {
                    T::one()
                } else {
                    T::zero()
                })
            }
            SensitivityKind::GaussianBand => {
                if self.bandwidth == T::zero() {
                    return Ok(T::zero());
                }
                let x = (w - self.omega0) / self.bandwidth;
                Ok((-(x * x) / T::lit(2.0)).exp())
            }
            SensitivityKind::SharpLine => Err(Error::Unsupported(
                "a sharp-line sensitivity cannot be sampled pointwise".into(),
            )),
        }
    }

    /// Frequency interval outside which `μ` is zero to working precision.
    pub fn support(&self) -> (T, T) {
        match self.kind {
            SensitivityKind::RectBand => {
                let half = self.bandwidth / T::lit(2.0);
                ((self.omega0 - half).max(T::zero()), self.omega0 + half)
            }
            SensitivityKind::GaussianBand => {
                let reach = T::lit(12.0) * self.bandwidth;
                ((self.omega0 - reach).max(T::zero()), self.omega0 + reach)
            }
            SensitivityKind::SharpLine => (self.omega0, self.omega0),
        }
    }

    /// Fails unless `bandwidth / omega0 ≤ 0.1`.
    pub fn require_narrow(&self) -> Result<()> {
        if self.bandwidth / self.omega0 > T::lit(NARROW_BAND_LIMIT) {
            return Err(Error::InvalidParameter(format!(
                "band is not narrow: bandwidth/omega0 = {} > {NARROW_BAND_LIMIT}",
                self.bandwidth / self.omega0
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn peak_values() {
        let t0 = 1.7;
        let l = ProbeFunction::lorentzian_squared(t0).unwrap();
        assert_relative_eq!(
            l.eval(0.0).unwrap(),
            2.0 / (std::f64::consts::PI * t0),
            max_relative = 1e-15
        );
        let g = ProbeFunction::gaussian(t0).unwrap();
        assert_relative_eq!(
            g.eval(0.0).unwrap(),
            1.0 / (t0 * (2.0 * std::f64::consts::PI).sqrt()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn builtin_norms() {
        for t0 in [1e-3_f64, 1.0, 3.7, 1e3] {
            for p in [
                ProbeFunction::lorentzian_squared(t0).unwrap(),
                ProbeFunction::gaussian(t0).unwrap(),
            ] {
                let n = p.norm().unwrap();
                assert!((n - 1.0).abs() < 1e-10, "{:?} t0={t0}: {n}", p.kind());
            }
        }
    }

    #[test]
    fn box_table_normalizes() {
        let a = 0.75;
        let samples: Vec<(f64, f64)> = (0..=300)
            .map(|i| (-a + 2.0 * a * i as f64 / 300.0, 1.0 / (2.0 * a)))
            .collect();
        let p = ProbeFunction::tabulated(&samples).unwrap();
        assert!((p.norm().unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(p.kind(), ProbeKind::Tabulated);
    }

    #[test]
    fn table_renormalizes_and_rejects_out_of_range() {
        let text = "# t  f\n-1 0\n0 2 # peak\n1 0\n";
        let p: ProbeFunction<f64> = ProbeFunction::parse_table(text).unwrap();
        assert!((p.eval(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(p.eval(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn table_parse_errors() {
        assert!(matches!(
            ProbeFunction::<f64>::parse_table("0 1\n1 x\n2 3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(ProbeFunction::<f64>::parse_table("0 1\n1 -1\n2 3\n").is_err());
        assert!(matches!(
            ProbeFunction::<f64>::parse_table("0 0\n1 0\n2 0\n"),
            Err(Error::Integration(_))
        ));
    }

    #[test]
    fn half_widths() {
        let l = ProbeFunction::lorentzian_squared(1.0).unwrap();
        assert_relative_eq!(
            l.half_width().unwrap(),
            (2.0_f64.sqrt() - 1.0).sqrt(),
            max_relative = 1e-12
        );
        let l5 = ProbeFunction::lorentzian_squared(5.0).unwrap();
        assert_relative_eq!(
            l5.half_width().unwrap(),
            5.0 * (2.0_f64.sqrt() - 1.0).sqrt(),
            max_relative = 1e-12
        );
        let g = ProbeFunction::gaussian(1.0).unwrap();
        assert_relative_eq!(
            g.half_width().unwrap(),
            (2.0 * 2.0_f64.ln()).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn closed_form_transforms() {
        let t0 = 0.8;
        let l = ProbeFunction::lorentzian_squared(t0).unwrap();
        let w = 1.3;
        assert_relative_eq!(
            l.sqrt_ft_sq(w).unwrap(),
            t0 / (2.0 * std::f64::consts::PI) * (-2.0 * w * t0).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            l.sqrt_ft(w).unwrap().norm_sqr(),
            l.sqrt_ft_sq(w).unwrap(),
            max_relative = 1e-14
        );
        let g = ProbeFunction::gaussian(t0).unwrap();
        assert_relative_eq!(
            g.sqrt_ft(w).unwrap().norm_sqr(),
            g.sqrt_ft_sq(w).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn sensitivity_values() {
        let r = SensitivityFunction::rect_band(1.0, 0.1).unwrap();
        assert_eq!(r.eval(1.0).unwrap(), 1.0);
        assert_eq!(r.eval(2.0).unwrap(), 0.0);
        let g = SensitivityFunction::gaussian_band(1.0, 0.1).unwrap();
        assert_eq!(g.eval(1.0).unwrap(), 1.0);
        let s = SensitivityFunction::sharp_line(1.0).unwrap();
        assert!(matches!(s.eval(1.0), Err(Error::Unsupported(_))));
        assert!(matches!(r.eval(-1.0), Err(Error::Domain(_))));
        assert!(SensitivityFunction::rect_band(0.0, 0.1).is_err());
        assert!(SensitivityFunction::rect_band(1.0, 0.5)
            .unwrap()
            .require_narrow()
            .is_err());
    }

    #[test]
    fn rejects_nonpositive_scale() {
        assert!(ProbeFunction::gaussian(0.0).is_err());
        assert!(ProbeFunction::lorentzian_squared(-1.0).is_err());
    }
}
