// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::operator::{Letter, Operator};
use super::space::norm;
use super::FockSpace;
use crate::error::{Error, Result};
use crate::linalg::{components, DenseMatrix};
use crate::scalar::{re, Cx, Real};

/// Largest top-level population tolerated by truncation-sensitive states.
pub const CAPACITY_TOL: f64 = 1e-8;

const EXPM_TOL: f64 = 1e-13;

/// Squeeze operator acting on one or two oscillators, `z = r·e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Squeezer<T> {
    /// `exp(½(z̄ a² − z a†²))`.
    Single { osc: usize, r: T, theta: T },
    /// `exp(z̄ a b − z a† b†)`.
    Pair { a: usize, b: usize, r: T, theta: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec<T> {
    Vacuum,
    /// Product of coherent states, one amplitude per oscillator.
    Coherent {
        amplitudes: Vec<Cx<T>>,
    },
    /// Squeezers applied to the vacuum in list order.
    SqueezedVacuum {
        squeezers: Vec<Squeezer<T>>,
    },
    /// `N(|Ω⟩ + ε Σ_ij F_ij a_i† a_j† |Ω⟩)` with `F` symmetric over oscillators.
    PairSuperposition {
        epsilon: T,
        pairs: Vec<Vec<Cx<T>>>,
    },
    /// Arbitrary vector, normalized on construction.
    Custom {
        vector: Vec<Cx<T>>,
    },
}

impl<T> StateSpec<T> {
    pub fn label(&self) -> &'static str {
        match self {
            StateSpec::Vacuum => "vacuum",
            StateSpec::Coherent { .. } => "coherent",
            StateSpec::SqueezedVacuum { .. } => "squeezed_vacuum",
            StateSpec::PairSuperposition { .. } => "pair_superposition",
            StateSpec::Custom { .. } => "custom",
        }
    }
}

/// Normalized state vector together with the parameters that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub spec: StateSpec<T>,
    pub vector: Vec<Cx<T>>,
}

pub fn make_state<T: Real>(space: &FockSpace<T>, spec: &StateSpec<T>) -> Result<FieldState<T>> {
    make_state_with(space, spec, T::lit(CAPACITY_TOL))
}

pub fn make_state_with<T: Real>(
    space: &FockSpace<T>,
    spec: &StateSpec<T>,
    capacity_tol: T,
) -> Result<FieldState<T>> {
    let osc = space.oscillators();
    let check_osc = |o: usize| {
        if o >= osc {
            Err(Error::Shape(format!(
                "oscillator {o} out of range for {osc} oscillators"
            )))
        } else {
            Ok(())
        }
    };
    let vector = match spec {
        StateSpec::Vacuum => space.vacuum(),
        StateSpec::Coherent { amplitudes } => {
            if amplitudes.len() != osc {
                return Err(Error::Shape(format!(
                    "{} amplitudes for {osc} oscillators",
                    amplitudes.len()
                )));
            }
            let v = coherent_vector(space, amplitudes);
            let n = norm(&v);
            let v: Vec<_> = v.into_iter().map(|z| z / n).collect();
            check_capacity(space, &v, capacity_tol)?;
            v
        }
        StateSpec::SqueezedVacuum { squeezers } => {
            let mut v = space.vacuum();
            for s in squeezers {
                let (oscs, gen) = match *s {
                    Squeezer::Single { osc: o, r, theta } => {
                        check_osc(o)?;
                        check_r(r)?;
                        let z = Cx::from_polar(r, theta);
                        let mut g = Operator::zero();
                        g.add_term(vec![Letter::a(o), Letter::a(o)], z.conj() * T::lit(0.5));
                        g.add_term(vec![Letter::ad(o), Letter::ad(o)], -z * T::lit(0.5));
                        (vec![o], g)
                    }
                    Squeezer::Pair { a, b, r, theta } => {
                        check_osc(a)?;
                        check_osc(b)?;
                        check_r(r)?;
                        if a == b {
                            return Err(Error::InvalidParameter(
                                "pair squeezer needs two distinct oscillators".into(),
                            ));
                        }
                        let z = Cx::from_polar(r, theta);
                        let mut g = Operator::zero();
                        g.add_term(vec![Letter::a(a), Letter::a(b)], z.conj());
                        g.add_term(vec![Letter::ad(a), Letter::ad(b)], -z);
                        (vec![a, b], g)
                    }
                };
                v = apply_local_exponential(space, &v, &oscs, &gen)?;
            }
            check_capacity(space, &v, capacity_tol)?;
            v
        }
        StateSpec::PairSuperposition { epsilon, pairs } => {
            let pair = pair_vector(space, pairs)?;
            let mut v = space.vacuum();
            for (x, p) in v.iter_mut().zip(&pair) {
                *x += p * *epsilon;
            }
            let n = norm(&v);
            v.into_iter().map(|z| z / n).collect()
        }
        StateSpec::Custom { vector } => {
            space.check_vector(vector)?;
            let n = norm(vector);
            if !(n > T::zero()) || !n.is_finite() {
                return Err(Error::InvalidParameter(
                    "custom vector must have finite nonzero norm".into(),
                ));
            }
            vector.iter().map(|z| z / n).collect()
        }
    };
    Ok(FieldState {
        spec: spec.clone(),
        vector,
    })
}

fn check_r<T: Real>(r: T) -> Result<()> {
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "squeeze magnitude must be nonnegative, got {r}"
        )));
    }
    Ok(())
}

fn check_capacity<T: Real>(space: &FockSpace<T>, v: &[Cx<T>], tol: T) -> Result<()> {
    let top = space.top_population(v);
    if top > tol {
        return Err(Error::Capacity {
            population: top.to_f64_lossy(),
            limit: tol.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Unnormalized product of truncated Poisson amplitudes.
fn coherent_vector<T: Real>(space: &FockSpace<T>, alpha: &[Cx<T>]) -> Vec<Cx<T>> {
    let nmax = space.nmax();
    let tables: Vec<Vec<Cx<T>>> = alpha
        .iter()
        .map(|&a| {
            let mut t = Vec::with_capacity(nmax + 1);
            let mut c = re((-a.norm_sqr() / T::lit(2.0)).exp());
            t.push(c);
            for n in 1..=nmax {
                c = c * a / T::from_count(n).sqrt();
                t.push(c);
            }
            t
        })
        .collect();
    let mut occ = Vec::new();
    (0..space.dimension())
        .map(|idx| {
            space.occupations_into(idx, &mut occ);
            occ.iter()
                .zip(&tables)
                .fold(re(T::one()), |acc, (&n, t)| acc * t[n])
        })
        .collect()
}

/// `Σ_ij F_ij a_i† a_j† |Ω⟩` for symmetric `F`.
pub fn pair_vector<T: Real>(space: &FockSpace<T>, f: &[Vec<Cx<T>>]) -> Result<Vec<Cx<T>>> {
    let osc = space.oscillators();
    if f.len() != osc || f.iter().any(|r| r.len() != osc) {
        return Err(Error::Shape(format!(
            "pair coefficients must be {osc}×{osc}"
        )));
    }
    let scale = f.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max);
    for i in 0..osc {
        for j in 0..i {
            if (f[i][j] - f[j][i]).norm() > T::lit(1e-12) * scale.max(T::one()) {
                return Err(Error::InvalidParameter(
                    "pair coefficients must be symmetric".into(),
                ));
            }
        }
    }
    let mut op = Operator::zero();
    for (i, row) in f.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            op.add_term(vec![Letter::ad(i), Letter::ad(j)], *c);
        }
    }
    if space.nmax() < 2 && (0..osc).any(|i| !f[i][i].is_zero()) {
        return Err(Error::Capacity {
            population: 1.0,
            limit: CAPACITY_TOL,
        });
    }
    op.apply(space, &space.vacuum())
}

/// `exp(G) v` for a generator `G` acting only on `oscs`.
///
/// The generator's local matrix splits into connected components (parity
/// sectors for one oscillator, `n_a − n_b` sectors for two); each is
/// exponentiated densely and applied for every configuration of the
/// remaining oscillators.
pub(crate) fn apply_local_exponential<T: Real>(
    space: &FockSpace<T>,
    v: &[Cx<T>],
    oscs: &[usize],
    gen: &Operator<T>,
) -> Result<Vec<Cx<T>>> {
    space.check_vector(v)?;
    let base = space.nmax() + 1;
    let local_dim = base.pow(oscs.len() as u32);
    let to_full = |l: usize| -> usize {
        let mut rem = l;
        let mut idx = 0;
        for &o in oscs {
            idx += (rem % base) * space.stride(o);
            rem /= base;
        }
        idx
    };
    let to_local = |idx: usize| -> usize {
        let mut l = 0;
        let mut mult = 1;
        for &o in oscs {
            l += space.occupation(idx, o) * mult;
            mult *= base;
        }
        l
    };
    let mut entries = Vec::new();
    let (mut occ, mut col) = (Vec::new(), Vec::new());
    for l in 0..local_dim {
        gen.column(space, to_full(l), &mut occ, &mut col);
        for &(row, val) in &col {
            entries.push((to_local(row), l, val));
        }
    }
    let comps = components(local_dim, entries.iter().map(|e| (e.0, e.1)));
    let mut position = vec![(0usize, 0usize); local_dim];
    for (c, members) in comps.iter().enumerate() {
        for (k, &m) in members.iter().enumerate() {
            position[m] = (c, k);
        }
    }
    let mut blocks: Vec<DenseMatrix<T>> =
        comps.iter().map(|m| DenseMatrix::zeros(m.len())).collect();
    for &(row, c, val) in &entries {
        let (b, i) = position[row];
        let (_, j) = position[c];
        blocks[b][(i, j)] += val;
    }
    let unitaries: Vec<Option<DenseMatrix<T>>> = blocks
        .iter()
        .map(|b| {
            if b.max_abs() == T::zero() {
                None
            } else {
                Some(b.expm(T::lit(EXPM_TOL)))
            }
        })
        .collect();

    let mut out = v.to_vec();
    let offsets: Vec<usize> = (0..local_dim).map(to_full).collect();
    let mut gathered = Vec::new();
    for start in 0..space.dimension() {
        if oscs.iter().any(|&o| space.occupation(start, o) != 0) {
            continue;
        }
        for (members, u) in comps.iter().zip(&unitaries) {
            let Some(u) = u else { continue };
            gathered.clear();
            gathered.extend(members.iter().map(|&m| v[start + offsets[m]]));
            if gathered.iter().all(|z| z.is_zero()) {
                continue;
            }
            let res = u.matvec(&gathered);
            for (&m, z) in members.iter().zip(res) {
                out[start + offsets[m]] = z;
            }
        }
    }
    Ok(out)
}
