// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use num_traits::Zero;

use super::space::inner;
use super::FockSpace;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{re, Cx, Real};

/// A single ladder operator `a_o` or `a_o†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub osc: usize,
    pub dagger: bool,
}

impl Letter {
    pub fn a(osc: usize) -> Self {
        Self { osc, dagger: false }
    }

    pub fn ad(osc: usize) -> Self {
        Self { osc, dagger: true }
    }
}

/// Ordered product of ladder operators, read left to right.
///
/// Letters on different oscillators commute exactly even on the truncated
/// space, so words are stored with a stable sort by oscillator; the order of
/// letters on the same oscillator is kept because `a a† ≠ a† a` there.
pub type Word = Vec<Letter>;

fn canonical(mut w: Word) -> Word {
    w.sort_by_key(|l| l.osc);
    w
}

/// Linear combination of ladder words, applied matrix-free.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Operator<T> {
    terms: BTreeMap<Word, Cx<T>>,
}

impl<T: Real> Operator<T> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::term(Vec::new(), re(T::one()))
    }

    pub fn term(word: Word, c: Cx<T>) -> Self {
        let mut op = Self::zero();
        op.add_term(word, c);
        op
    }

    pub fn annihilate(o: usize) -> Self {
        Self::term(vec![Letter::a(o)], re(T::one()))
    }

    pub fn create(o: usize) -> Self {
        Self::term(vec![Letter::ad(o)], re(T::one()))
    }

    pub fn add_term(&mut self, word: Word, c: Cx<T>) {
        if c.is_zero() {
            return;
        }
        *self.terms.entry(canonical(word)).or_insert_with(Cx::zero) += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Cx<T>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn coefficient(&self, word: &[Letter]) -> Cx<T> {
        self.terms
            .get(&canonical(word.to_vec()))
            .copied()
            .unwrap_or_else(Cx::zero)
    }

    pub fn max_oscillator(&self) -> Option<usize> {
        self.terms
            .keys()
            .flat_map(|w| w.iter().map(|l| l.osc))
            .max()
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, re(T::one()));
    }

    pub fn add_scaled(&mut self, other: &Self, s: Cx<T>) {
        for (w, c) in &other.terms {
            *self.terms.entry(w.clone()).or_insert_with(Cx::zero) += c * s;
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, re(-T::one()));
        out
    }

    pub fn scaled(&self, s: Cx<T>) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    /// Symbolic adjoint: reverse each word, swap `a ↔ a†`, conjugate.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let adj: Word = w
                .iter()
                .rev()
                .map(|l| Letter {
                    osc: l.osc,
                    dagger: !l.dagger,
                })
                .collect();
            out.add_term(adj, c.conj());
        }
        out
    }

    pub fn max_coefficient(&self) -> T {
        self.terms
            .values()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest coefficient of `M − M†`.
    pub fn hermiticity_deviation(&self) -> T {
        self.difference(&self.adjoint()).max_coefficient()
    }

    fn check_space(&self, space: &FockSpace<T>) -> Result<()> {
        if let Some(o) = self.max_oscillator() {
            if o >= space.oscillators() {
                return Err(Error::Shape(format!(
                    "operator acts on oscillator {o} but the space has {}",
                    space.oscillators()
                )));
            }
        }
        Ok(())
    }

    /// `M v`.
    pub fn apply(&self, space: &FockSpace<T>, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        self.check_space(space)?;
        space.check_vector(v)?;
        let mut out = vec![Cx::zero(); v.len()];
        let mut occ = Vec::new();
        for (idx, &amp) in v.iter().enumerate() {
            if amp.is_zero() {
                continue;
            }
            space.occupations_into(idx, &mut occ);
            for (w, c) in &self.terms {
                if let Some((target, fac)) = act(space, w, &occ, idx) {
                    out[target] += c * amp * fac;
                }
            }
        }
        Ok(out)
    }

    /// `⟨v|M|v⟩` without any Hermiticity requirement.
    pub fn matrix_element(&self, space: &FockSpace<T>, u: &[Cx<T>], v: &[Cx<T>]) -> Result<Cx<T>> {
        space.check_vector(u)?;
        Ok(inner(u, &self.apply(space, v)?))
    }

    /// Nonzero entries of column `index`, merged and sorted by row.
    pub fn column(
        &self,
        space: &FockSpace<T>,
        index: usize,
        occ: &mut Vec<usize>,
        out: &mut Vec<(usize, Cx<T>)>,
    ) {
        out.clear();
        space.occupations_into(index, occ);
        for (w, c) in &self.terms {
            if let Some((target, fac)) = act(space, w, occ, index) {
                out.push((target, c * fac));
            }
        }
        out.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, Cx<T>)> = Vec::with_capacity(out.len());
        for &(r, v) in out.iter() {
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += v,
                _ => merged.push((r, v)),
            }
        }
        *out = merged;
    }

    /// Dense matrix on the truncated space; intended for small spaces.
    pub fn to_dense(&self, space: &FockSpace<T>) -> Result<DenseMatrix<T>> {
        self.check_space(space)?;
        let n = space.dimension();
        if n > 4096 {
            return Err(Error::InvalidParameter(format!(
                "dense form requested for dimension {n}"
            )));
        }
        let mut m = DenseMatrix::zeros(n);
        let (mut occ, mut col) = (Vec::new(), Vec::new());
        for j in 0..n {
            self.column(space, j, &mut occ, &mut col);
            for &(i, v) in &col {
                m[(i, j)] += v;
            }
        }
        Ok(m)
    }
}

/// Image of basis state `idx` (occupations `occ`) under `word`, or `None`
/// when a letter leaves the truncated range.
#[inline]
fn act<T: Real>(
    space: &FockSpace<T>,
    word: &[Letter],
    occ: &[usize],
    idx: usize,
) -> Option<(usize, T)> {
    let nmax = space.nmax();
    let mut target = idx;
    // Product of the occupation factors; one square root at the end keeps
    // products such as `a a†` exact.
    let mut prod: u128 = 1;
    for (k, l) in word.iter().enumerate().rev() {
        // Occupation of l.osc after the letters to the right have acted.
        let mut n = occ[l.osc] as isize;
        for r in &word[k + 1..] {
            if r.osc == l.osc {
                n += if r.dagger { 1 } else { -1 };
            }
        }
        let n = n as usize;
        if l.dagger {
            if n == nmax {
                return None;
            }
            prod = prod.saturating_mul(n as u128 + 1);
            target += space.stride(l.osc);
        } else {
            if n == 0 {
                return None;
            }
            prod = prod.saturating_mul(n as u128);
            target -= space.stride(l.osc);
        }
    }
    let fac = if prod == 1 {
        T::one()
    } else {
        T::from_u128(prod)
            .expect("occupation product representable")
            .sqrt()
    };
    Some((target, fac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_modes, FieldKind, ModeLayout};
    use crate::scalar::cx;

    fn space(n: usize, nmax: usize) -> FockSpace<f64> {
        let l = ModeLayout::Collinear {
            n,
            omega0: 1.0,
            delta: 0.1,
            direction: [0.0, 0.0, 1.0],
        };
        FockSpace::new(build_modes(&l, FieldKind::Scalar, 8).unwrap(), nmax).unwrap()
    }

    #[test]
    fn truncated_commutator() {
        let s = space(2, 4);
        for i in 0..2 {
            for j in 0..2 {
                let a = Operator::<f64>::annihilate(i);
                let ad = Operator::create(j);
                let comm = a.mul(&ad).difference(&ad.mul(&a)).to_dense(&s).unwrap();
                for col in 0..s.dimension() {
                    for row in 0..s.dimension() {
                        let expect = if i == j && row == col {
                            if s.occupation(col, i) == s.nmax() {
                                -(s.nmax() as f64)
                            } else {
                                1.0
                            }
                        } else {
                            0.0
                        };
                        assert_eq!(
                            comm[(row, col)],
                            cx(expect, 0.0),
                            "i={i} j={j} ({row},{col})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn annihilates_vacuum() {
        let s = space(3, 3);
        for o in 0..3 {
            let v = Operator::<f64>::annihilate(o)
                .apply(&s, &s.vacuum())
                .unwrap();
            assert!(v.iter().all(|z| z.is_zero()));
        }
    }

    #[test]
    fn canonical_words_merge() {
        let mut op = Operator::<f64>::zero();
        op.add_term(vec![Letter::a(1), Letter::ad(0)], re(1.0));
        op.add_term(vec![Letter::ad(0), Letter::a(1)], re(2.0));
        assert_eq!(op.len(), 1);
        assert_eq!(op.coefficient(&[Letter::ad(0), Letter::a(1)]), re(3.0));
    }

    #[test]
    fn adjoint_matches_dense() {
        let s = space(2, 3);
        let mut op = Operator::<f64>::zero();
        op.add_term(vec![Letter::a(0), Letter::a(1)], cx(0.3, -1.2));
        op.add_term(vec![Letter::ad(1), Letter::a(0)], cx(2.0, 0.5));
        op.add_term(vec![Letter::a(0), Letter::ad(0)], cx(0.7, 0.0));
        let d = op.to_dense(&s).unwrap().adjoint();
        let e = op.adjoint().to_dense(&s).unwrap();
        assert!(d.add(&e.scale(re(-1.0))).max_abs() < 1e-15);
        assert!(op.hermiticity_deviation() > 0.1);
        assert!(op.sum(&op.adjoint()).hermiticity_deviation() < 1e-15);
    }

    #[test]
    fn apply_matches_dense() {
        let s = space(2, 3);
        let op = Operator::<f64>::create(0)
            .mul(&Operator::annihilate(1))
            .sum(&Operator::create(1).scaled(cx(0.0, 2.0)));
        let v: Vec<Cx<f64>> = (0..s.dimension())
            .map(|k| cx(k as f64 * 0.1, 1.0 - k as f64 * 0.03))
            .collect();
        let a = op.apply(&s, &v).unwrap();
        let b = op.to_dense(&s).unwrap().matvec(&v);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
