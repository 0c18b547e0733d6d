// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use qibound_core::fock::{
    b_operator, build_modes, default_chi, delta_operator, expectation, make_state, mean_field,
    pair_vector, quadrature_variances, smeared_delta_operator, BVariant, FieldKind, Letter,
    ModeLayout, PairSign, Squeezer,
};
use qibound_core::quadrature::gauss_legendre;
use qibound_core::verify::{frequency_grid, GridOptions};
use qibound_core::{FockSpace, Operator, Probe, StateSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn collinear(n: usize, kind: FieldKind, nmax: usize) -> FockSpace {
    let layout = ModeLayout::Collinear {
        n,
        omega0: 1.0,
        delta: 0.05,
        direction: [0.0, 0.0, 1.0],
    };
    FockSpace::new(build_modes(&layout, kind, 8).unwrap(), nmax).unwrap()
}

/// Row-major dense matrix built straight from occupation numbers.
#[derive(Clone)]
struct Dense {
    n: usize,
    d: Vec<C>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Dense {
            n,
            d: vec![C::new(0.0, 0.0); n * n],
        }
    }
    fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = C::new(1.0, 0.0);
        }
        m
    }
    fn annihilator(space: &FockSpace, o: usize) -> Self {
        let mut m = Self::zeros(space.dimension());
        for j in 0..space.dimension() {
            let mut occ = space.occupations(j);
            if occ[o] > 0 {
                let amp = (occ[o] as f64).sqrt();
                occ[o] -= 1;
                let i = space.index_of(&occ).unwrap();
                m.d[i * m.n + j] = C::new(amp, 0.0);
            }
        }
        m
    }
    fn dag(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.d[j * self.n + i] = self.d[i * self.n + j].conj();
            }
        }
        m
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.d[i * n + k];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m.d[i * n + j] += a * o.d[k * n + j];
                }
            }
        }
        m
    }
    fn axpy(&mut self, s: C, o: &Self) {
        for (a, b) in self.d.iter_mut().zip(&o.d) {
            *a += s * b;
        }
    }
    fn max_diff(&self, o: &Self) -> f64 {
        self.d
            .iter()
            .zip(&o.d)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
    fn from_op(op: &Operator, space: &FockSpace) -> Self {
        let n = space.dimension();
        let mut m = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![C::new(0.0, 0.0); n];
            e[j] = C::new(1.0, 0.0);
            let col = op.apply(space, &e).unwrap();
            for i in 0..n {
                m.d[i * n + j] = col[i];
            }
        }
        m
    }
}

/// Projector onto states with oscillator `o` at the truncation level.
fn top_projector(space: &FockSpace, o: usize) -> Dense {
    let mut m = Dense::zeros(space.dimension());
    for j in 0..space.dimension() {
        if space.occupation(j, o) == space.nmax() {
            m.d[j * m.n + j] = C::new(1.0, 0.0);
        }
    }
    m
}

#[test]
fn truncated_commutators_are_exact() {
    let space = collinear(2, FieldKind::Scalar, 4);
    let id = Dense::identity(space.dimension());
    for o in 0..space.oscillators() {
        let a = Dense::annihilator(&space, o);
        let lib = Dense::from_op(&Operator::annihilate(o), &space);
        assert_eq!(a.max_diff(&lib), 0.0);
        let comm = {
            let mut c = a.mul(&a.dag());
            c.axpy(C::new(-1.0, 0.0), &a.dag().mul(&a));
            c
        };
        let mut expected = id.clone();
        expected.axpy(
            C::new(-(space.nmax() as f64 + 1.0), 0.0),
            &top_projector(&space, o),
        );
        assert!(comm.max_diff(&expected) < 1e-14);
        let other = Dense::annihilator(&space, 1 - o);
        let mut cross = a.mul(&other.dag());
        cross.axpy(C::new(-1.0, 0.0), &other.dag().mul(&a));
        assert!(cross.d.iter().all(|z| z.norm() < 1e-15));
    }
}

/// `S(z)|0⟩` from its power series in `|2n⟩`.
fn squeezed_series(r: f64, theta: f64, nmax: usize) -> Vec<C> {
    let ratio = -C::from_polar(r.tanh(), theta);
    let mut out = vec![C::new(0.0, 0.0); nmax + 1];
    let mut c = C::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0;
    while 2 * n <= nmax {
        out[2 * n] = c;
        let k = n as f64;
        c *= ratio * ((2.0 * k + 1.0) * (2.0 * k + 2.0)).sqrt() / (2.0 * (k + 1.0));
        n += 1;
    }
    out
}

fn series_variance(v: &[C], theta: f64) -> f64 {
    let nmax = v.len() - 1;
    let (mut a, mut a2, mut num) = (C::new(0.0, 0.0), C::new(0.0, 0.0), 0.0);
    for n in 0..=nmax {
        num += n as f64 * v[n].norm_sqr();
        if n >= 1 {
            a += v[n - 1].conj() * v[n] * (n as f64).sqrt();
        }
        if n >= 2 {
            a2 += v[n - 2].conj() * v[n] * ((n * (n - 1)) as f64).sqrt();
        }
    }
    let rot = C::from_polar(1.0, -theta);
    let mean = (a * rot).re;
    let sq = 0.25 * (2.0 * (a2 * rot * rot).re + 2.0 * num + 1.0);
    sq - mean * mean
}

#[test]
fn squeezed_vacuum_matches_series() {
    let nmax = 72;
    let space = collinear(1, FieldKind::Scalar, nmax);
    for r in [0.2, 0.5, 1.0] {
        let st = make_state(
            &space,
            &StateSpec::SqueezedVacuum {
                squeezers: vec![Squeezer::Single {
                    osc: 0,
                    r,
                    theta: 0.0,
                }],
            },
        )
        .unwrap();
        let series = squeezed_series(r, 0.0, nmax);
        // Truncation only disturbs the levels near the top.
        for n in 0..=nmax / 2 {
            assert!((st.vector[n] - series[n]).norm() < 1e-9, "r {r} n {n}");
        }
        let l2: f64 = st
            .vector
            .iter()
            .zip(&series)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!(l2.sqrt() < 1e-4);
        let (v1, v2) = quadrature_variances(&space, &st, 0, 0.0).unwrap();
        assert!((v1 - (-2.0 * r).exp() / 4.0).abs() < 1e-6, "r {r}: {v1}");
        assert!((v2 - (2.0 * r).exp() / 4.0).abs() < 1e-6, "r {r}: {v2}");
        assert!((v1 - series_variance(&series, 0.0)).abs() < 1e-7);
        assert!((v2 - series_variance(&series, PI / 2.0)).abs() < 1e-7);
    }
}

#[test]
fn rotated_squeezing_moves_the_quiet_axis() {
    let space = collinear(1, FieldKind::Scalar, 60);
    let (r, theta) = (0.7, 1.1);
    let st = make_state(
        &space,
        &StateSpec::SqueezedVacuum {
            squeezers: vec![Squeezer::Single { osc: 0, r, theta }],
        },
    )
    .unwrap();
    let (v1, v2) = quadrature_variances(&space, &st, 0, theta / 2.0).unwrap();
    assert!((v1 - (-2.0 * r).exp() / 4.0).abs() < 1e-6);
    assert!((v2 - (2.0 * r).exp() / 4.0).abs() < 1e-6);
}

fn sample_states(space: &FockSpace, strength: f64) -> Vec<StateSpec> {
    let osc = space.oscillators();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = vec![
        StateSpec::Vacuum,
        StateSpec::Coherent {
            amplitudes: (0..osc)
                .map(|o| C::from_polar(0.3 + 0.1 * o as f64, o as f64))
                .collect(),
        },
        StateSpec::SqueezedVacuum {
            squeezers: vec![
                Squeezer::Single {
                    osc: 0,
                    r: 0.6 * strength,
                    theta: 0.4,
                },
                Squeezer::Pair {
                    a: 0,
                    b: osc - 1,
                    r: 0.3 * strength,
                    theta: -0.8,
                },
            ],
        },
    ];
    let mut f = vec![vec![C::new(0.0, 0.0); osc]; osc];
    for i in 0..osc {
        for j in 0..=i {
            let z = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f[i][j] = z;
            f[j][i] = z;
        }
    }
    out.push(StateSpec::PairSuperposition {
        epsilon: 0.8,
        pairs: f,
    });
    out
}

#[test]
fn uncertainty_product_over_phases() {
    let space = collinear(2, FieldKind::Scalar, 40);
    for spec in sample_states(&space, 1.0) {
        let st = make_state(&space, &spec).unwrap();
        for o in 0..space.oscillators() {
            for k in 0..32 {
                let (v1, v2) =
                    quadrature_variances(&space, &st, o, 2.0 * PI * k as f64 / 32.0).unwrap();
                assert!(
                    v1 * v2 >= 1.0 / 16.0 - 1e-10,
                    "{}: {}",
                    spec.label(),
                    v1 * v2
                );
            }
        }
    }
}

#[test]
fn even_states_have_zero_mean_field() {
    for kind in [FieldKind::Scalar, FieldKind::Electromagnetic] {
        let (nmax, strength) = if kind == FieldKind::Scalar {
            (40, 1.0)
        } else {
            (10, 0.25)
        };
        let space = collinear(2, kind, nmax);
        for spec in sample_states(&space, strength)
            .into_iter()
            .filter(|s| s.label() != "coherent")
        {
            let st = make_state(&space, &spec).unwrap();
            assert!(space.odd_population(&st.vector) < 1e-24);
            for (x, t) in [([0.0, 0.0, 0.0], 0.0), ([0.3, -0.2, 1.7], 2.5)] {
                let e = mean_field(&space, &st, &x, t).unwrap();
                assert!(e.iter().all(|c| c.abs() < 1e-12), "{}: {e:?}", spec.label());
            }
        }
    }
}

/// `E(t, x)` of the classical field with amplitudes `α`.
fn classical_field(space: &FockSpace, alpha: &[C], x: &[f64; 3], t: f64) -> [f64; 3] {
    let modes = space.modes();
    let mut e = [0.0; 3];
    for (o, a) in alpha.iter().enumerate() {
        let (i, _) = modes.split(o);
        let p = modes.momenta[i];
        let w = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let phase = p[0] * x[0] + p[1] * x[1] + p[2] * x[2] - w * t;
        let amp =
            C::new(0.0, 1.0) * C::from_polar(1.0, phase) * a * (modes.weights[i] * w / 2.0).sqrt()
                / (2.0 * PI).powf(1.5);
        let pol = modes.osc_polarization(o);
        for j in 0..3 {
            e[j] += 2.0 * amp.re * pol[j];
        }
    }
    e
}

#[test]
fn coherent_state_reproduces_classical_field() {
    let space = collinear(2, FieldKind::Electromagnetic, 9);
    let alpha: Vec<C> = (0..4)
        .map(|o| C::from_polar(0.25 + 0.05 * o as f64, 0.7 * o as f64))
        .collect();
    let st = make_state(
        &space,
        &StateSpec::Coherent {
            amplitudes: alpha.clone(),
        },
    )
    .unwrap();
    let f = Probe::gaussian(1.5).unwrap();
    let (nodes, weights) = gauss_legendre::<f64>(40);
    for (x, t) in [([0.0, 0.0, 0.0], 0.0), ([0.4, 0.1, -1.3], 0.9)] {
        let e = mean_field(&space, &st, &x, t).unwrap();
        let cl = classical_field(&space, &alpha, &x, t);
        for j in 0..3 {
            assert!((e[j] - cl[j]).abs() < 1e-10, "{e:?} vs {cl:?}");
        }
        // ∫ f(t' − t) E_cl(t')² dt' on 48 panels of width t0/2.
        let mut smeared = 0.0;
        for panel in 0..48 {
            let a = t + (panel as f64 - 24.0) * 0.75;
            for (u, w) in nodes.iter().zip(&weights) {
                let tp = a + 0.375 * (u + 1.0);
                let ec = classical_field(&space, &alpha, &x, tp);
                let sq = ec[0] * ec[0] + ec[1] * ec[1] + ec[2] * ec[2];
                smeared += 0.375 * w * f.eval(tp - t).unwrap() * sq;
            }
        }
        let d = smeared_delta_operator(&space, &f, &x, None, t).unwrap();
        let got = expectation(&space, &st, &d).unwrap();
        assert!(got >= 0.0);
        assert!(
            (got - smeared).abs() < 1e-10 * smeared.max(1e-6),
            "{got} vs {smeared}"
        );
    }
}

#[test]
fn pair_superposition_delta_is_rational_in_epsilon() {
    let space = collinear(2, FieldKind::Electromagnetic, 4);
    let f = Probe::lorentzian_squared(1.0).unwrap();
    let d = smeared_delta_operator(&space, &f, &[0.0, 0.0, 0.0], None, 0.0).unwrap();
    let pairs = match &sample_states(&space, 1.0)[3] {
        StateSpec::PairSuperposition { pairs, .. } => pairs.clone(),
        _ => unreachable!(),
    };
    let n: f64 = pair_vector(&space, &pairs)
        .unwrap()
        .iter()
        .map(|z| z.norm_sqr())
        .sum();
    let scaled = |eps: f64| {
        let st = make_state(
            &space,
            &StateSpec::PairSuperposition {
                epsilon: eps,
                pairs: pairs.clone(),
            },
        )
        .unwrap();
        expectation(&space, &st, &d).unwrap() * (1.0 + n * eps * eps)
    };
    // Through the origin: y = c1 ε + c2 ε², fitted from ε = ±1.
    let (yp, ym) = (scaled(1.0), scaled(-1.0));
    let (c1, c2) = ((yp - ym) / 2.0, (yp + ym) / 2.0);
    assert!(c2 >= 0.0);
    for eps in [-3.0, -0.4, 0.1, 0.5, 2.0, 5.0] {
        let y = scaled(eps);
        assert!(
            (y - c1 * eps - c2 * eps * eps).abs() < 1e-10 * (1.0 + y.abs()),
            "eps {eps}"
        );
    }
    assert!(scaled(0.0).abs() < 1e-16);
}

/// `Σ_ω w_ω B†B` assembled densely, compared with `Δ + c − K` built from the
/// transform and the truncated commutator.
fn dense_decomposition(space: &FockSpace, f: &Probe, chi: &[C], variant: BVariant) -> f64 {
    let modes = space.modes();
    let dim = space.dimension();
    let osc = space.oscillators();
    let sign = variant.pair_sign(modes.kind);
    let s = if sign == PairSign::Plus { 1.0 } else { -1.0 };
    let comps = if modes.kind == FieldKind::Electromagnetic {
        3
    } else {
        1
    };
    let pol = |o: usize, j: usize| {
        if comps == 1 {
            1.0
        } else {
            modes.osc_polarization(o)[j]
        }
    };
    let a: Vec<Dense> = (0..osc).map(|o| Dense::annihilator(space, o)).collect();
    let ad: Vec<Dense> = a.iter().map(Dense::dag).collect();

    let grid = frequency_grid(space, f.t0(), &GridOptions::default()).unwrap();
    let mut lhs = Dense::zeros(dim);
    let mut kappa = vec![0.0; osc];
    for &(w, wt) in &grid {
        for j in 0..comps {
            let mut b = Dense::zeros(dim);
            for o in 0..osc {
                let (i, _) = modes.split(o);
                let (wi, amp) = (modes.frequency(i), modes.weights[i].sqrt() * pol(o, j));
                let alpha = f.sqrt_ft(w - wi).unwrap().conj() * chi[i] * amp;
                let beta = f.sqrt_ft(w + wi).unwrap().conj() * chi[i].conj() * amp * s;
                b.axpy(alpha, &a[o]);
                b.axpy(beta, &ad[o]);
                kappa[o] += wt * beta.norm_sqr();
            }
            lhs.axpy(C::new(wt, 0.0), &b.dag().mul(&b));
        }
    }

    let mut rhs = Dense::identity(dim);
    for d in rhs.d.iter_mut() {
        *d *= kappa.iter().sum::<f64>();
    }
    for o in 0..osc {
        rhs.axpy(
            C::new(-(space.nmax() as f64 + 1.0) * kappa[o], 0.0),
            &top_projector(space, o),
        );
        let (i, _) = modes.split(o);
        for o2 in 0..osc {
            let (k, _) = modes.split(o2);
            let ee: f64 = (0..comps).map(|j| pol(o, j) * pol(o2, j)).sum();
            let amp = (modes.weights[i] * modes.weights[k]).sqrt() * ee;
            let (wi, wk) = (modes.frequency(i), modes.frequency(k));
            let normal = chi[i].conj() * chi[k] * f.ft(wk - wi).unwrap() * amp;
            rhs.axpy(normal, &ad[o].mul(&a[o2]));
            let pair = chi[i] * chi[k] * f.ft(wk + wi).unwrap() * (0.5 * s * amp);
            rhs.axpy(pair, &a[o].mul(&a[o2]));
            rhs.axpy(pair.conj(), &ad[o2].mul(&ad[o]));
        }
    }
    // The library Δ must equal the dense one.
    let lib = Dense::from_op(&delta_operator(space, f, chi, sign).unwrap(), space);
    let mut dense_delta = Dense::zeros(dim);
    for o in 0..osc {
        for o2 in 0..osc {
            let (i, k) = (modes.split(o).0, modes.split(o2).0);
            let ee: f64 = (0..comps).map(|j| pol(o, j) * pol(o2, j)).sum();
            let amp = (modes.weights[i] * modes.weights[k]).sqrt() * ee;
            let (wi, wk) = (modes.frequency(i), modes.frequency(k));
            dense_delta.axpy(
                chi[i].conj() * chi[k] * f.ft(wk - wi).unwrap() * amp,
                &ad[o].mul(&a[o2]),
            );
            let pair = chi[i] * chi[k] * f.ft(wk + wi).unwrap() * (0.5 * s * amp);
            dense_delta.axpy(pair, &a[o].mul(&a[o2]));
            dense_delta.axpy(pair.conj(), &ad[o2].mul(&ad[o]));
        }
    }
    assert!(lib.max_diff(&dense_delta) < 1e-17);
    // And each library B must match the dense assembly at one node.
    let w = grid[grid.len() / 2].0;
    let lib_b = b_operator(space, f, chi, w, variant).unwrap();
    assert_eq!(lib_b.len(), comps);
    for (j, op) in lib_b.iter().enumerate() {
        for o in 0..osc {
            let (i, _) = modes.split(o);
            let amp = modes.weights[i].sqrt() * pol(o, j);
            let alpha = f.sqrt_ft(w - modes.frequency(i)).unwrap().conj() * chi[i] * amp;
            assert!((op.coefficient(&[Letter::a(o)]) - alpha).norm() < 1e-18);
        }
    }
    lhs.max_diff(&rhs)
}

fn random_chi(n: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    (0..n)
        .map(|_| C::from_polar(rng.gen_range(0.05..0.3), rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

#[test]
fn dense_decomposition_with_random_couplings() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let probes = [
        Probe::gaussian(1.3).unwrap(),
        Probe::lorentzian_squared(0.8).unwrap(),
    ];
    for f in &probes {
        let scalar = collinear(3, FieldKind::Scalar, 3);
        for variant in [BVariant::Plus, BVariant::Tilde] {
            let chi = random_chi(3, &mut rng);
            let r = dense_decomposition(&scalar, f, &chi, variant);
            assert!(r < 1e-14, "scalar {variant:?}: {r}");
        }
        let em = collinear(2, FieldKind::Electromagnetic, 2);
        let chi = random_chi(2, &mut rng);
        let r = dense_decomposition(&em, f, &chi, BVariant::Plus);
        assert!(r < 1e-14, "electromagnetic: {r}");
    }
}

#[test]
fn default_chi_is_phase_shifted_by_time() {
    let space = collinear(3, FieldKind::Scalar, 1);
    let x = [0.2, 0.0, 0.5];
    let c0 = default_chi(space.modes(), None, &x, 0.0).unwrap();
    let c1 = default_chi(space.modes(), None, &x, 0.7).unwrap();
    for i in 0..3 {
        let w = space.modes().frequency(i);
        assert!((c1[i] - c0[i] * C::from_polar(1.0, -w * 0.7)).norm() < 1e-15);
    }
}

fn word_strategy(osc: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0..osc, any::<bool>()), 0..4)
}

type Word = (Vec<(usize, bool)>, f64, f64);

fn build_op(words: &[Word]) -> Operator {
    let mut op = Operator::zero();
    for (w, re, im) in words {
        let letters = w
            .iter()
            .map(|&(o, d)| if d { Letter::ad(o) } else { Letter::a(o) })
            .collect();
        op.add_term(letters, C::new(*re, *im));
    }
    op
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_algebra_matches_dense(
        x in prop::collection::vec((word_strategy(2), -1.0f64..1.0, -1.0f64..1.0), 1..4),
        y in prop::collection::vec((word_strategy(2), -1.0f64..1.0, -1.0f64..1.0), 1..4),
    ) {
        let space = collinear(2, FieldKind::Scalar, 3);
        let (a, b) = (build_op(&x), build_op(&y));
        let (da, db) = (Dense::from_op(&a, &space), Dense::from_op(&b, &space));
        prop_assert!(Dense::from_op(&a.mul(&b), &space).max_diff(&da.mul(&db)) < 1e-12);
        prop_assert!(Dense::from_op(&a.adjoint(), &space).max_diff(&da.dag()) < 1e-14);
        let mut sum = da.clone();
        sum.axpy(C::new(1.0, 0.0), &db);
        prop_assert!(Dense::from_op(&a.sum(&b), &space).max_diff(&sum) < 1e-14);
    }

    #[test]
    fn delta_expectation_is_real_for_random_vectors(seed in any::<u64>()) {
        let space = collinear(2, FieldKind::Electromagnetic, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<C> = (0..space.dimension()).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let st = make_state(&space, &StateSpec::Custom { vector: v }).unwrap();
        let f = Probe::gaussian(1.0).unwrap();
        let d = smeared_delta_operator(&space, &f, &[0.1, 0.0, 0.0], None, 0.3).unwrap();
        prop_assert!(expectation(&space, &st, &d).is_ok());
    }
}
