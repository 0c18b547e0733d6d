// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::modes::{cross, dot, Vec3};
use super::operator::{Letter, Operator};
use super::{FieldKind, FieldState, FockSpace, ModeSet};
use crate::error::{Error, Result};
use crate::scalar::{cx, re, Cx, Real};
use crate::weighting::{ProbeFunction, SensitivityFunction};

/// Per-mode coupling `χ_i = μ(ω_i)·e^{i(p_i·x − ω_i t)}·√ω_i/(2π)`.
///
/// The time `t` moves the probe centre: smearing with `f(t' − t)` is the
/// same as smearing with `f` after this phase change.
pub fn default_chi<T: Real>(
    modes: &ModeSet<T>,
    mu: Option<&SensitivityFunction<T>>,
    x: &Vec3<T>,
    t: T,
) -> Result<Vec<Cx<T>>> {
    (0..modes.len())
        .map(|i| {
            let w = modes.frequency(i);
            let m = match mu {
                Some(mu) => mu.eval(w)?,
                None => T::one(),
            };
            let phase = dot(&modes.momenta[i], x) - w * t;
            Ok(Cx::from_polar(m * w.sqrt() / T::two_pi(), phase))
        })
        .collect()
}

/// Sign `s` of the pair term `½·s·χχ f̂(ω+ω') a a` in the smeared square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSign {
    Plus,
    Minus,
}

impl PairSign {
    fn value<T: Real>(self) -> T {
        match self {
            PairSign::Plus => T::one(),
            PairSign::Minus => -T::one(),
        }
    }

    /// The sign carried by the field's own normal-ordered square.
    pub fn canonical(kind: FieldKind) -> Self {
        match kind {
            FieldKind::Scalar => PairSign::Plus,
            FieldKind::Electromagnetic => PairSign::Minus,
        }
    }
}

/// Sign convention of `B(ω)`: `Plus` is the field kind's own sign
/// (`+` scalar, `−` electromagnetic), `Tilde` the flipped one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BVariant {
    Plus,
    Tilde,
}

impl BVariant {
    pub fn pair_sign(self, kind: FieldKind) -> PairSign {
        match (self, PairSign::canonical(kind)) {
            (BVariant::Plus, s) => s,
            (BVariant::Tilde, PairSign::Plus) => PairSign::Minus,
            (BVariant::Tilde, PairSign::Minus) => PairSign::Plus,
        }
    }
}

fn check_chi<T: Real>(space: &FockSpace<T>, chi: &[Cx<T>]) -> Result<()> {
    if chi.len() != space.modes().len() {
        return Err(Error::Shape(format!(
            "{} couplings for {} modes",
            chi.len(),
            space.modes().len()
        )));
    }
    Ok(())
}

/// `Δ = Σ √(w w')(e·e')[½χ̄χ' f̂(ω'−ω) a†a' + ½ s χχ' f̂(ω+ω') a a'] + h.c.`
pub fn delta_operator<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    chi: &[Cx<T>],
    sign: PairSign,
) -> Result<Operator<T>> {
    check_chi(space, chi)?;
    let modes = space.modes();
    let n = space.oscillators();
    let s = sign.value::<T>();
    let half = T::lit(0.5);
    let mut op = Operator::zero();
    for o in 0..n {
        let (i, _) = modes.split(o);
        for o2 in 0..n {
            let (k, _) = modes.split(o2);
            let ee = modes.contraction(o, o2);
            if ee == T::zero() {
                continue;
            }
            let amp = (modes.weights[i] * modes.weights[k]).sqrt() * ee;
            let (wi, wk) = (modes.frequency(i), modes.frequency(k));
            let normal = chi[i].conj() * chi[k] * f.ft(wk - wi)? * amp;
            op.add_term(vec![Letter::ad(o), Letter::a(o2)], normal);
            let pair = chi[i] * chi[k] * f.ft(wk + wi)? * (amp * half * s);
            op.add_term(vec![Letter::a(o), Letter::a(o2)], pair);
            op.add_term(vec![Letter::ad(o2), Letter::ad(o)], pair.conj());
        }
    }
    Ok(op)
}

/// Smeared normal-ordered square with the default coupling and the field's
/// own pair sign.
pub fn smeared_delta_operator<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    x: &Vec3<T>,
    mu: Option<&SensitivityFunction<T>>,
    t_offset: T,
) -> Result<Operator<T>> {
    let norm = f.norm()?;
    if (norm - T::one()).abs() > T::lit(1e-6) {
        return Err(Error::InvalidParameter(format!(
            "probe integrates to {norm}, not 1"
        )));
    }
    let chi = default_chi(space.modes(), mu, x, t_offset)?;
    delta_operator(space, f, &chi, PairSign::canonical(space.modes().kind))
}

/// `B^j(ω) = Σ_o √w e^j_o [ḡ(ω−ω_o)χ a_o + σ ḡ(ω+ω_o)χ̄ a_o†]`, one operator
/// per component (three for the electromagnetic field, one for scalar).
pub fn b_operator<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    chi: &[Cx<T>],
    omega: T,
    variant: BVariant,
) -> Result<Vec<Operator<T>>> {
    check_chi(space, chi)?;
    let modes = space.modes();
    let sigma = variant.pair_sign(modes.kind).value::<T>();
    let mut g_minus = Vec::with_capacity(modes.len());
    let mut g_plus = Vec::with_capacity(modes.len());
    for i in 0..modes.len() {
        let w = modes.frequency(i);
        let amp = modes.weights[i].sqrt();
        g_minus.push(f.sqrt_ft(omega - w)?.conj() * chi[i] * amp);
        g_plus.push(f.sqrt_ft(omega + w)?.conj() * chi[i].conj() * (amp * sigma));
    }
    Ok((0..modes.components())
        .map(|j| {
            let mut op = Operator::zero();
            for o in 0..space.oscillators() {
                let (i, _) = modes.split(o);
                let e = modes.component(o, j);
                if e == T::zero() {
                    continue;
                }
                op.add_term(vec![Letter::a(o)], g_minus[i] * e);
                op.add_term(vec![Letter::ad(o)], g_plus[i] * e);
            }
            op
        })
        .collect())
}

/// `⟨v|M|v⟩` for Hermitian `M`; rejects non-Hermitian operators and checks
/// that the result is real.
pub fn expectation<T: Real>(
    space: &FockSpace<T>,
    state: &FieldState<T>,
    op: &Operator<T>,
) -> Result<T> {
    let scale = op.max_coefficient().max(T::one());
    let dev = op.hermiticity_deviation();
    if dev > T::lit(1e-12) * scale {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    let z = op.matrix_element(space, &state.vector, &state.vector)?;
    if z.im.abs() > T::lit(1e-12) * z.re.abs().max(scale) {
        return Err(Error::NotHermitian {
            deviation: z.im.abs().to_f64_lossy(),
        });
    }
    Ok(z.re)
}

fn check_osc<T: Real>(space: &FockSpace<T>, o: usize) -> Result<()> {
    if o >= space.oscillators() {
        return Err(Error::Shape(format!(
            "oscillator {o} out of range for {} oscillators",
            space.oscillators()
        )));
    }
    Ok(())
}

/// `E₁(θ) = (a e^{−iθ} + a† e^{iθ})/2` on oscillator `o`.
fn quadrature<T: Real>(o: usize, theta: T) -> Operator<T> {
    let half = T::lit(0.5);
    let mut op = Operator::zero();
    op.add_term(vec![Letter::a(o)], Cx::from_polar(half, -theta));
    op.add_term(vec![Letter::ad(o)], Cx::from_polar(half, theta));
    op
}

/// Variances of `E₁(θ)` and `E₂(θ) = E₁(θ + π/2)`; the vacuum gives `(¼, ¼)`.
pub fn quadrature_variances<T: Real>(
    space: &FockSpace<T>,
    state: &FieldState<T>,
    osc: usize,
    theta: T,
) -> Result<(T, T)> {
    check_osc(space, osc)?;
    let var = |th: T| -> Result<T> {
        let q = quadrature(osc, th);
        let mean = expectation(space, state, &q)?;
        let sq = expectation(space, state, &q.mul(&q))?;
        Ok((sq - mean * mean).max(T::zero()))
    };
    Ok((var(theta)?, var(theta + T::FRAC_PI_2())?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldComponent {
    Electric,
    Magnetic,
    /// The scalar field `φ`, carried in component 0.
    Scalar,
}

/// Coefficient vectors `V_o` of `a_o` in the field at `(t, x)`; the
/// coefficient of `a_o†` is `V̄_o`.
///
/// * electric: `i (2π)^{−3/2} √(wω/2) e_o e^{i(p·x − ωt)}`
/// * magnetic: `i (2π)^{−3/2} √(w/(2ω)) (p × e_o) e^{i(p·x − ωt)}`
/// * scalar:   `(2π)^{−3/2} √(w/(2ω)) e^{i(p·x − ωt)}`
pub fn field_amplitudes<T: Real>(
    modes: &ModeSet<T>,
    component: FieldComponent,
    x: &Vec3<T>,
    t: T,
) -> Result<Vec<[Cx<T>; 3]>> {
    let em = modes.kind == FieldKind::Electromagnetic;
    match component {
        FieldComponent::Electric | FieldComponent::Magnetic if !em => {
            return Err(Error::Unsupported(
                "vector fields need an electromagnetic mode set".into(),
            ))
        }
        FieldComponent::Scalar if em => {
            return Err(Error::Unsupported(
                "scalar field needs a scalar mode set".into(),
            ))
        }
        _ => {}
    }
    let norm = T::two_pi().powf(T::lit(-1.5));
    let i_unit = cx(T::zero(), T::one());
    Ok((0..modes.oscillators())
        .map(|o| {
            let (i, _) = modes.split(o);
            let p = modes.momenta[i];
            let w = modes.frequency(i);
            let wt = modes.weights[i];
            let phase = Cx::from_polar(norm, dot(&p, x) - w * t);
            let zero = Cx::zero();
            match component {
                FieldComponent::Electric => {
                    let e = modes.osc_polarization(o);
                    let c = i_unit * phase * (wt * w / T::lit(2.0)).sqrt();
                    [c * e[0], c * e[1], c * e[2]]
                }
                FieldComponent::Magnetic => {
                    let b = cross(&p, &modes.osc_polarization(o));
                    let c = i_unit * phase * (wt / (T::lit(2.0) * w)).sqrt();
                    [c * b[0], c * b[1], c * b[2]]
                }
                FieldComponent::Scalar => [phase * (wt / (T::lit(2.0) * w)).sqrt(), zero, zero],
            }
        })
        .collect())
}

fn linear_forms<T: Real>(amps: &[[Cx<T>; 3]], components: usize) -> Vec<Operator<T>> {
    (0..components)
        .map(|j| {
            let mut op = Operator::zero();
            for (o, v) in amps.iter().enumerate() {
                op.add_term(vec![Letter::a(o)], v[j]);
                op.add_term(vec![Letter::ad(o)], v[j].conj());
            }
            op
        })
        .collect()
}

pub fn electric_field<T: Real>(
    space: &FockSpace<T>,
    x: &Vec3<T>,
    t: T,
) -> Result<Vec<Operator<T>>> {
    Ok(linear_forms(
        &field_amplitudes(space.modes(), FieldComponent::Electric, x, t)?,
        3,
    ))
}

pub fn magnetic_field<T: Real>(
    space: &FockSpace<T>,
    x: &Vec3<T>,
    t: T,
) -> Result<Vec<Operator<T>>> {
    Ok(linear_forms(
        &field_amplitudes(space.modes(), FieldComponent::Magnetic, x, t)?,
        3,
    ))
}

/// `⟨E(t, x)⟩` for the electromagnetic field, `(⟨φ(t, x)⟩, 0, 0)` for the
/// scalar field.
pub fn mean_field<T: Real>(
    space: &FockSpace<T>,
    state: &FieldState<T>,
    x: &Vec3<T>,
    t: T,
) -> Result<Vec3<T>> {
    let modes = space.modes();
    let (component, n) = match modes.kind {
        FieldKind::Electromagnetic => (FieldComponent::Electric, 3),
        FieldKind::Scalar => (FieldComponent::Scalar, 1),
    };
    let forms = linear_forms(&field_amplitudes(modes, component, x, t)?, n);
    let mut out = [T::zero(); 3];
    for (j, op) in forms.iter().enumerate() {
        out[j] = expectation(space, state, op)?;
    }
    Ok(out)
}

fn vdot<T: Real>(a: &[Cx<T>; 3], b: &[Cx<T>; 3]) -> Cx<T> {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn vdot_conj<T: Real>(a: &[Cx<T>; 3], b: &[Cx<T>; 3]) -> Cx<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

/// `Σ 2K(ω'−ω)(V̄·V') a†a' + (K(ω+ω')(V·V') a a' + h.c.)`, the normal-ordered
/// square of a field with amplitudes `V` after weighting each frequency
/// component `e^{−iνt}` by `K(ν)`.
fn normal_square<T: Real>(
    modes: &ModeSet<T>,
    amps: &[[Cx<T>; 3]],
    mut kernel: impl FnMut(T) -> Result<Cx<T>>,
) -> Result<Operator<T>> {
    let two = T::lit(2.0);
    let mut op = Operator::zero();
    for (o, v) in amps.iter().enumerate() {
        let w = modes.osc_frequency(o);
        for (o2, v2) in amps.iter().enumerate() {
            let w2 = modes.osc_frequency(o2);
            let n = vdot_conj(v, v2);
            if !n.is_zero() {
                op.add_term(
                    vec![Letter::ad(o), Letter::a(o2)],
                    n * kernel(w2 - w)? * two,
                );
            }
            let p = vdot(v, v2);
            if !p.is_zero() {
                let c = p * kernel(w + w2)?;
                op.add_term(vec![Letter::a(o), Letter::a(o2)], c);
                op.add_term(vec![Letter::ad(o2), Letter::ad(o)], c.conj());
            }
        }
    }
    Ok(op)
}

/// `∫ f(t' − t) :F(t', x)²: dt'` for the chosen field.
pub fn smeared_square<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    component: FieldComponent,
    x: &Vec3<T>,
    t: T,
) -> Result<Operator<T>> {
    let amps = field_amplitudes(space.modes(), component, x, t)?;
    normal_square(space.modes(), &amps, |nu| Ok(f.ft(nu)? * T::two_pi()))
}

/// `:F(t, x)²:` at a single spacetime point.
pub fn pointwise_square<T: Real>(
    space: &FockSpace<T>,
    component: FieldComponent,
    x: &Vec3<T>,
    t: T,
) -> Result<Operator<T>> {
    let amps = field_amplitudes(space.modes(), component, x, t)?;
    normal_square(space.modes(), &amps, |_| Ok(re(T::one())))
}

pub fn number_operator<T: Real>(space: &FockSpace<T>) -> Operator<T> {
    let mut op = Operator::zero();
    for o in 0..space.oscillators() {
        op.add_term(vec![Letter::ad(o), Letter::a(o)], re(T::one()));
    }
    op
}

/// `Σ_o ω_o a_o† a_o`.
pub fn energy_operator<T: Real>(space: &FockSpace<T>) -> Operator<T> {
    let mut op = Operator::zero();
    for o in 0..space.oscillators() {
        op.add_term(
            vec![Letter::ad(o), Letter::a(o)],
            re(space.modes().osc_frequency(o)),
        );
    }
    op
}
