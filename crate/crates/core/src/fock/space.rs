// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use super::ModeSet;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Largest total dimension a [`FockSpace`] may have.
pub const MAX_DIMENSION: usize = 200_000;

/// Tensor product of per-oscillator spaces truncated at occupation `nmax`.
///
/// Basis index `n = Σ_o n_o·(nmax+1)^o`, so oscillator 0 varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace<T> {
    modes: ModeSet<T>,
    nmax: usize,
    dim: usize,
    strides: Vec<usize>,
}

impl<T: Real> FockSpace<T> {
    pub fn new(modes: ModeSet<T>, nmax: usize) -> Result<Self> {
        if nmax == 0 {
            return Err(Error::InvalidParameter("nmax must be at least 1".into()));
        }
        let osc = modes.oscillators();
        let mut dim: usize = 1;
        let mut strides = Vec::with_capacity(osc);
        for _ in 0..osc {
            strides.push(dim);
            dim = dim
                .checked_mul(nmax + 1)
                .filter(|&d| d <= MAX_DIMENSION)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "(nmax+1)^{osc} = {}^{osc} exceeds the dimension cap {MAX_DIMENSION}",
                        nmax + 1
                    ))
                })?;
        }
        Ok(Self {
            modes,
            nmax,
            dim,
            strides,
        })
    }

    pub fn modes(&self) -> &ModeSet<T> {
        &self.modes
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn oscillators(&self) -> usize {
        self.strides.len()
    }

    pub fn stride(&self, o: usize) -> usize {
        self.strides[o]
    }

    pub fn occupation(&self, index: usize, o: usize) -> usize {
        (index / self.strides[o]) % (self.nmax + 1)
    }

    pub fn occupations_into(&self, mut index: usize, out: &mut Vec<usize>) {
        out.clear();
        for _ in 0..self.oscillators() {
            out.push(index % (self.nmax + 1));
            index /= self.nmax + 1;
        }
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let mut v = Vec::new();
        self.occupations_into(index, &mut v);
        v
    }

    pub fn index_of(&self, occ: &[usize]) -> Result<usize> {
        if occ.len() != self.oscillators() {
            return Err(Error::Shape(format!(
                "{} occupations for {} oscillators",
                occ.len(),
                self.oscillators()
            )));
        }
        if let Some(&n) = occ.iter().find(|&&n| n > self.nmax) {
            return Err(Error::InvalidParameter(format!(
                "occupation {n} exceeds nmax {}",
                self.nmax
            )));
        }
        Ok(occ.iter().zip(&self.strides).map(|(n, s)| n * s).sum())
    }

    pub fn total_number(&self, index: usize) -> usize {
        let mut idx = index;
        let mut total = 0;
        for _ in 0..self.oscillators() {
            total += idx % (self.nmax + 1);
            idx /= self.nmax + 1;
        }
        total
    }

    /// True when no oscillator sits at the truncation level.
    pub fn is_interior(&self, index: usize) -> bool {
        let mut idx = index;
        for _ in 0..self.oscillators() {
            if idx % (self.nmax + 1) == self.nmax {
                return false;
            }
            idx /= self.nmax + 1;
        }
        true
    }

    pub fn vacuum(&self) -> Vec<Cx<T>> {
        let mut v = vec![Cx::new(T::zero(), T::zero()); self.dim];
        v[0] = Cx::new(T::one(), T::zero());
        v
    }

    pub fn check_vector(&self, v: &[Cx<T>]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector of length {} on a space of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Largest probability, over oscillators, of occupying the top level.
    pub fn top_population(&self, v: &[Cx<T>]) -> T {
        let mut per = vec![T::zero(); self.oscillators()];
        for (idx, a) in v.iter().enumerate() {
            let p = a.norm_sqr();
            if p == T::zero() {
                continue;
            }
            for (o, slot) in per.iter_mut().enumerate() {
                if self.occupation(idx, o) == self.nmax {
                    *slot += p;
                }
            }
        }
        per.into_iter().fold(T::zero(), T::max)
    }

    /// Probability of an odd total photon number.
    pub fn odd_population(&self, v: &[Cx<T>]) -> T {
        v.iter()
            .enumerate()
            .filter(|(i, _)| self.total_number(*i) % 2 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

pub(crate) fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm<T: Real>(a: &[Cx<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}
