// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex matrices and the matrix exponential.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

/// Square, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Cx::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = re(T::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Cx<T>>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix rows must all have length n".into()));
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `exp(self)` by scaling and squaring with a Taylor series; the series
    /// is truncated once a term falls below `tol` relative to the partial sum.
    pub fn expm(&self, tol: T) -> Self {
        let n = self.n;
        let norm = self.norm1();
        let half = T::lit(0.5);
        let mut squarings = 0u32;
        let mut scaled_norm = norm;
        while scaled_norm > half {
            scaled_norm *= half;
            squarings += 1;
        }
        let a = self.scale(re(T::lit(2.0).powi(-(squarings as i32))));
        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..64 {
            term = term.mul(&a).scale(re(T::from_count(k).recip()));
            sum = sum.add(&term);
            if term.norm1() <= tol * sum.norm1() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Cx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Connected components of the graph whose edges are the nonzero entries
/// `(i, j)`; each component is returned sorted, components ordered by their
/// smallest vertex.
pub fn components(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn expm_of_rotation_generator() {
        let th = 0.7_f64;
        let g = DenseMatrix::from_rows(&[vec![re(0.0), re(-th)], vec![re(th), re(0.0)]]).unwrap();
        let u = g.expm(1e-15);
        assert!((u[(0, 0)].re - th.cos()).abs() < 1e-14);
        assert!((u[(1, 0)].re - th.sin()).abs() < 1e-14);
        assert!((u[(0, 1)].re + th.sin()).abs() < 1e-14);
    }

    #[test]
    fn expm_large_norm_is_unitary() {
        let n = 12;
        let mut g = DenseMatrix::<f64>::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = cx(
                    ((i * 7 + j * 3) % 5) as f64 - 2.0,
                    ((i + 2 * j) % 3) as f64 - 1.0,
                );
                g[(i, j)] += v * 3.0;
                g[(j, i)] -= v.conj() * 3.0;
            }
        }
        let u = g.expm(1e-14);
        let d = u
            .adjoint()
            .mul(&u)
            .add(&DenseMatrix::identity(n).scale(re(-1.0)));
        assert!(d.max_abs() < 1e-11, "{}", d.max_abs());
    }

    #[test]
    fn component_grouping() {
        let c = components(6, [(0, 2), (2, 4), (1, 5)]);
        assert_eq!(c, vec![vec![0, 2, 4], vec![1, 5], vec![3]]);
    }
}
