// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use proptest::prelude::*;
use qibound_core::spectral::{
    convolution_identity_check, convolution_residual, fourier_forward, sqrt_probe_transform,
    ProfileGrid, SampledFunction, TransformOptions,
};
use qibound_core::weighting::{ProbeFunction, ProbeKind};
use qibound_core::Probe;
use qibound_core::{Cx, Error};

fn builtins(t0: f64) -> [ProbeFunction<f64>; 2] {
    [
        Probe::lorentzian_squared(t0).unwrap(),
        Probe::gaussian(t0).unwrap(),
    ]
}

#[test]
fn gaussian_closed_form_matches_numerical_transform() {
    let f = Probe::gaussian(1.7).unwrap();
    let s = f.sampled(true).unwrap();
    for x in [0.0, 0.5, 1.0, 2.0] {
        let w = x / f.t0();
        let numeric = fourier_forward(&s, w, &TransformOptions::default())
            .unwrap()
            .norm_sqr();
        let closed = f.sqrt_ft_sq(w).unwrap();
        assert!(
            (numeric / closed - 1.0).abs() < 1e-8,
            "w·t0 = {x}: {numeric} vs {closed}"
        );
    }
}

#[test]
fn gaussian_profile_at_zero() {
    let f = Probe::gaussian(1.0).unwrap();
    let g = sqrt_probe_transform(&f, &ProfileGrid::default()).unwrap();
    let mid = g.values.len() / 2;
    assert!(g.frequency(mid).abs() < 1e-15);
    let expect = 1.0 / (PI * (2.0 * PI).sqrt());
    assert!((g.values[mid].norm_sqr() - expect).abs() < 1e-8);
}

#[test]
fn lorentzian_profile_matches_closed_form() {
    let f = Probe::lorentzian_squared(2.0).unwrap();
    let g =
        sqrt_probe_transform(&f, &ProfileGrid::for_probe(ProbeKind::LorentzianSquared)).unwrap();
    for (i, v) in g.values.iter().enumerate() {
        let w = g.frequency(i);
        if w.abs() <= 3.0 {
            let expect = 2.0 / (2.0 * PI) * (-4.0 * w.abs()).exp();
            assert!((v.norm_sqr() - expect).abs() < 1e-6, "w = {w}");
        }
    }
}

#[test]
fn profiles_are_conjugate_symmetric_and_satisfy_parseval() {
    for f in builtins(0.8) {
        let g = sqrt_probe_transform(&f, &ProfileGrid::for_probe(f.kind())).unwrap();
        assert!(g.conjugate_symmetry_defect() <= 1e-9);
        // ∫|√f|² dt = ∫ f dt = 1 = 2π ∫|g|² dω
        assert!((2.0 * PI * g.power() - 1.0).abs() < 1e-6, "{:?}", f.kind());
    }
}

#[test]
fn convolution_identity_examples() {
    let grid = ProfileGrid::default();
    assert!(
        convolution_identity_check(&Probe::gaussian(1.0).unwrap(), 0.0, &grid).unwrap() <= 1e-6
    );
    let lor = Probe::lorentzian_squared(1.0).unwrap();
    let lgrid = ProfileGrid::for_probe(ProbeKind::LorentzianSquared);
    assert!(convolution_identity_check(&lor, 1.3, &lgrid).unwrap() <= 1e-6);
}

#[test]
fn convolution_identity_across_band() {
    for t0 in [0.5, 2.0] {
        for f in builtins(t0) {
            let g = sqrt_probe_transform(&f, &ProfileGrid::for_probe(f.kind())).unwrap();
            for k in -20..=20 {
                let p = 0.25 * k as f64 / t0 + 0.003 / t0;
                let r = convolution_residual(&f, &g, p).unwrap();
                assert!(r <= 1e-6, "{:?} t0={t0} p={p}: {r:e}", f.kind());
            }
            let a = convolution_residual(&f, &g, 0.75 / t0).unwrap();
            let b = convolution_residual(&f, &g, -0.75 / t0).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn transform_is_linear() {
    let n = 801;
    let h1 = SampledFunction::from_fn(-8.0, 8.0, n, |t: f64| Cx::new((-t * t).exp(), 0.0));
    let h2 = SampledFunction::from_fn(-8.0, 8.0, n, |t: f64| {
        Cx::new(0.0, (-(t - 0.5).powi(2)).exp() * t)
    });
    let (a, b) = (Cx::new(0.3, -1.1), Cx::new(2.0, 0.4));
    let mix = SampledFunction::new(
        h1.t_start,
        h1.dt,
        h1.values
            .iter()
            .zip(&h2.values)
            .map(|(x, y)| a * x + b * y)
            .collect(),
    );
    let opts = TransformOptions::default();
    for w in [0.0, 0.7, 3.1] {
        let lhs = fourier_forward(&mix, w, &opts).unwrap();
        let rhs = a * fourier_forward(&h1, w, &opts).unwrap()
            + b * fourier_forward(&h2, w, &opts).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn box_table_fails_the_decay_check() {
    let a = 0.5;
    let samples: Vec<(f64, f64)> = (0..=100)
        .map(|i| (-a + 2.0 * a * i as f64 / 100.0, 1.0 / (2.0 * a)))
        .collect();
    let f = Probe::tabulated(&samples).unwrap();
    assert!((f.norm().unwrap() - 1.0).abs() < 1e-6);
    assert!(matches!(
        f.sqrt_ft_sq(1.0),
        Err(Error::TransformAccuracy(_))
    ));
}

#[test]
fn tabulated_gaussian_tracks_builtin() {
    let t0 = 1.3;
    let reference = Probe::gaussian(t0).unwrap();
    let samples: Vec<(f64, f64)> = (0..=1200)
        .map(|i| {
            let t = -12.0 * t0 + 24.0 * t0 * i as f64 / 1200.0;
            (t, reference.eval(t).unwrap())
        })
        .collect();
    let f = Probe::tabulated(&samples).unwrap();
    assert!((f.t0() / t0 - 1.0).abs() < 1e-6);
    for w in [0.0, 0.4, 1.0] {
        let a = f.sqrt_ft_sq(w).unwrap();
        let b = reference.sqrt_ft_sq(w).unwrap();
        assert!((a - b).abs() < 1e-8 * b.max(1e-3), "w = {w}");
    }
}

proptest! {
    #[test]
    fn builtin_probes_are_even_and_nonnegative(t in -50.0f64..50.0, t0 in 1e-2f64..1e2) {
        for f in builtins(t0) {
            let a = f.eval(t).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, f.eval(-t).unwrap());
        }
    }

    #[test]
    fn sqrt_ft_sq_scaling_law(w in -12.0f64..12.0, t0 in 1e-2f64..1e2) {
        for kind in [ProbeKind::LorentzianSquared, ProbeKind::Gaussian] {
            let f = Probe::builtin(kind, t0).unwrap();
            let unit = Probe::builtin(kind, 1.0).unwrap();
            let lhs = f.sqrt_ft_sq(w / t0).unwrap();
            let rhs = t0 * unit.sqrt_ft_sq(w).unwrap();
            prop_assert!(lhs >= 0.0);
            // Rounding in w/t0·t0 is amplified by the exponent, up to 2w².
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + 4.0 * w * w) * rhs);
            prop_assert_eq!(f.sqrt_ft_sq(w).unwrap(), f.sqrt_ft_sq(-w).unwrap());
        }
    }
}
