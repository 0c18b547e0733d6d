// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::FieldKind;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Vec3<T> = [T; 3];

pub fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

/// Mode-layout description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "layout",
    rename_all = "snake_case",
    bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub enum ModeLayout<T> {
    /// `n` modes along `direction` with frequencies `ω₀(1 + kδ)`,
    /// `k = −(n−1)/2, …, (n−1)/2`, each weighted by its midpoint cell
    /// width `ω₀δ`.
    Collinear {
        n: usize,
        omega0: T,
        delta: T,
        #[serde(default = "unit_z")]
        direction: Vec3<T>,
    },
    Explicit {
        momenta: Vec<Vec3<T>>,
        weights: Vec<T>,
    },
}

fn unit_z<T: Real>() -> Vec3<T> {
    [T::zero(), T::zero(), T::one()]
}

/// Discretized momentum measure with polarization frames.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet<T> {
    pub kind: FieldKind,
    pub momenta: Vec<Vec3<T>>,
    pub weights: Vec<T>,
    /// `polarizations[i][α]`; the scalar field uses a single placeholder
    /// vector that only ever enters through `e·e' = 1`.
    pub polarizations: Vec<Vec<Vec3<T>>>,
}

/// Default cap on the number of oscillators (modes × polarizations).
pub const DEFAULT_MAX_OSCILLATORS: usize = 8;

impl<T: Real> ModeSet<T> {
    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn polarization_count(&self) -> usize {
        self.kind.polarizations()
    }

    pub fn oscillators(&self) -> usize {
        self.len() * self.polarization_count()
    }

    pub fn frequency(&self, i: usize) -> T {
        norm3(&self.momenta[i])
    }

    /// `(mode, polarization)` of oscillator `o`.
    pub fn split(&self, o: usize) -> (usize, usize) {
        (o / self.polarization_count(), o % self.polarization_count())
    }

    pub fn osc_frequency(&self, o: usize) -> T {
        self.frequency(self.split(o).0)
    }

    pub fn osc_weight(&self, o: usize) -> T {
        self.weights[self.split(o).0]
    }

    pub fn osc_momentum(&self, o: usize) -> Vec3<T> {
        self.momenta[self.split(o).0]
    }

    pub fn osc_polarization(&self, o: usize) -> Vec3<T> {
        let (i, a) = self.split(o);
        self.polarizations[i][a]
    }

    /// `e_o·e_o'`, identically one for the scalar field.
    pub fn contraction(&self, o: usize, o2: usize) -> T {
        match self.kind {
            FieldKind::Scalar => T::one(),
            FieldKind::Electromagnetic => {
                dot(&self.osc_polarization(o), &self.osc_polarization(o2))
            }
        }
    }

    /// Polarization components that enter vector-valued operators: three for
    /// the electromagnetic field, one for the scalar field.
    pub fn components(&self) -> usize {
        match self.kind {
            FieldKind::Scalar => 1,
            FieldKind::Electromagnetic => 3,
        }
    }

    pub fn component(&self, o: usize, j: usize) -> T {
        match self.kind {
            FieldKind::Scalar => T::one(),
            FieldKind::Electromagnetic => self.osc_polarization(o)[j],
        }
    }

    pub fn max_frequency(&self) -> T {
        (0..self.len())
            .map(|i| self.frequency(i))
            .fold(T::zero(), T::max)
    }
}

/// Orthonormal transverse pair for momentum `p`: the first reference axis
/// among `x̂, ŷ` that is not nearly parallel to `p` is orthogonalized
/// against `p̂`, and the second vector is `p̂ × e¹`.
pub fn polarization_basis<T: Real>(p: &Vec3<T>) -> Result<[Vec3<T>; 2]> {
    let n = norm3(p);
    if !(n > T::zero()) {
        return Err(Error::InvalidParameter(
            "zero momentum has no transverse plane".into(),
        ));
    }
    let u = [p[0] / n, p[1] / n, p[2] / n];
    let x = [T::one(), T::zero(), T::zero()];
    let y = [T::zero(), T::one(), T::zero()];
    let reference = if dot(&u, &x).abs() < T::lit(0.9) {
        x
    } else {
        y
    };
    let c = dot(&reference, &u);
    let mut e1 = [
        reference[0] - c * u[0],
        reference[1] - c * u[1],
        reference[2] - c * u[2],
    ];
    let l = norm3(&e1);
    for v in &mut e1 {
        *v /= l;
    }
    // One re-orthogonalization pass keeps e·p at rounding level.
    let c2 = dot(&e1, &u);
    for k in 0..3 {
        e1[k] -= c2 * u[k];
    }
    let e2 = cross(&u, &e1);
    Ok([e1, e2])
}

pub fn build_modes<T: Real>(
    layout: &ModeLayout<T>,
    kind: FieldKind,
    max_oscillators: usize,
) -> Result<ModeSet<T>> {
    let (momenta, weights) = match layout {
        ModeLayout::Collinear {
            n,
            omega0,
            delta,
            direction,
        } => {
            if *n == 0 {
                return Err(Error::InvalidParameter(
                    "collinear layout needs at least one mode".into(),
                ));
            }
            if !(*omega0 > T::zero()) || !(*delta > T::zero()) {
                return Err(Error::InvalidParameter(
                    "omega0 and delta must be positive".into(),
                ));
            }
            let dn = norm3(direction);
            if !(dn > T::zero()) {
                return Err(Error::InvalidParameter(
                    "collinear direction must be nonzero".into(),
                ));
            }
            let dir = [direction[0] / dn, direction[1] / dn, direction[2] / dn];
            let centre = T::from_count(*n - 1) / T::lit(2.0);
            let mut momenta = Vec::with_capacity(*n);
            for k in 0..*n {
                let w = *omega0 * (T::one() + (T::from_count(k) - centre) * *delta);
                if !(w > T::zero()) {
                    return Err(Error::InvalidParameter(
                        "collinear layout reaches zero frequency; shrink delta".into(),
                    ));
                }
                momenta.push([dir[0] * w, dir[1] * w, dir[2] * w]);
            }
            (momenta, vec![*omega0 * *delta; *n])
        }
        ModeLayout::Explicit { momenta, weights } => {
            if momenta.len() != weights.len() {
                return Err(Error::Shape(format!(
                    "{} momenta but {} weights",
                    momenta.len(),
                    weights.len()
                )));
            }
            if momenta.is_empty() {
                return Err(Error::InvalidParameter("mode set is empty".into()));
            }
            (momenta.clone(), weights.clone())
        }
    };
    for (i, p) in momenta.iter().enumerate() {
        if p.iter().any(|v| !v.is_finite()) || !(norm3(p) > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "mode {i} has zero or non-finite momentum"
            )));
        }
        if !(weights[i] > T::zero()) || !weights[i].is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mode {i} weight must be positive"
            )));
        }
        if momenta[..i].iter().any(|q| q == p) {
            return Err(Error::InvalidParameter(format!(
                "mode {i} duplicates an earlier momentum"
            )));
        }
    }
    let count = momenta.len() * kind.polarizations();
    if count > max_oscillators {
        return Err(Error::InvalidParameter(format!(
            "{count} oscillators exceed the configured maximum {max_oscillators}"
        )));
    }
    let polarizations = match kind {
        FieldKind::Scalar => momenta.iter().map(|_| vec![unit_z()]).collect(),
        FieldKind::Electromagnetic => momenta
            .iter()
            .map(|p| polarization_basis(p).map(|b| b.to_vec()))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(ModeSet {
        kind,
        momenta,
        weights,
        polarizations,
    })
}
