// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! First-principles checks of the discrete inequality.
//!
//! On the truncated space the decomposition reads
//!
//! ```text
//! Σ_ω w_ω Σ_j B_j(ω)† B_j(ω) = Δ + c·1 − K,
//! K = (nmax+1) Σ_o κ_o P_top,o,      κ_o = Σ_ω w_ω Σ_j |β^j_o(ω)|²
//! ```
//!
//! where `β^j_o` is the coefficient of `a_o†` in `B_j` and `P_top,o`
//! projects onto the top occupation of oscillator `o`. `K` is the only
//! trace of the truncation; it vanishes between states that keep every
//! oscillator below `nmax` and is positive semidefinite, so
//! `⟨Δ⟩ ≥ −c` holds exactly for every truncated state.

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::shifted_power;
use crate::error::{Error, Result};
use crate::fock::{
    b_operator, cross, default_chi, delta_operator, dot, energy_operator, expectation, make_state,
    pair_vector, pointwise_square, polarization_basis, smeared_delta_operator, smeared_square,
    BVariant, FieldComponent, FieldKind, FieldState, FockSpace, Operator, PairSign, Squeezer,
    StateSpec, Vec3,
};
use crate::quadrature::{panel_nodes, QuadOptions};
use crate::scalar::{cx, re, Cx, Real};
use crate::weighting::{ProbeFunction, SensitivityFunction};

/// Which smeared square and `B` sign pair is being decomposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionKind {
    ScalarA,
    ScalarATilde,
    Electromagnetic,
}

impl DecompositionKind {
    pub const ALL: [DecompositionKind; 3] = [
        DecompositionKind::ScalarA,
        DecompositionKind::ScalarATilde,
        DecompositionKind::Electromagnetic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DecompositionKind::ScalarA => "scalar_A",
            DecompositionKind::ScalarATilde => "scalar_A_tilde",
            DecompositionKind::Electromagnetic => "electromagnetic",
        }
    }

    pub fn field(self) -> FieldKind {
        match self {
            DecompositionKind::Electromagnetic => FieldKind::Electromagnetic,
            _ => FieldKind::Scalar,
        }
    }

    fn variant(self) -> BVariant {
        match self {
            DecompositionKind::ScalarATilde => BVariant::Tilde,
            _ => BVariant::Plus,
        }
    }
}

/// Gauss–Legendre panels on `[0, ω_max]` with breaks at each mode frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// `ω_max = max ω_i + span_t0/t0`.
    pub span_t0: f64,
    /// Panel width in units of `1/t0`.
    pub panel_width_t0: f64,
    pub order: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            span_t0: 40.0,
            panel_width_t0: 0.5,
            order: 16,
        }
    }
}

/// Minimum coverage beyond the highest mode, in units of `1/t0`.
pub const MIN_SPAN_T0: f64 = 8.0;

pub fn frequency_grid<T: Real>(
    space: &FockSpace<T>,
    t0: T,
    opts: &GridOptions,
) -> Result<Vec<(T, T)>> {
    let top = space.modes().max_frequency();
    let needed = top + T::lit(MIN_SPAN_T0) / t0;
    let omega_max = top + T::lit(opts.span_t0) / t0;
    if omega_max < needed {
        return Err(Error::GridCoverage {
            missing_lo: omega_max.to_f64_lossy(),
            missing_hi: needed.to_f64_lossy(),
        });
    }
    if !(opts.panel_width_t0 > 0.0) || opts.order < 2 {
        return Err(Error::InvalidParameter(
            "grid needs positive panel width and order ≥ 2".into(),
        ));
    }
    let mut breaks: Vec<T> = vec![T::zero(), omega_max];
    breaks.extend((0..space.modes().len()).map(|i| space.modes().frequency(i)));
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite frequencies"));
    breaks.dedup();
    Ok(panel_nodes(
        &breaks,
        T::lit(opts.panel_width_t0) / t0,
        opts.order,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport<T> {
    pub kind: DecompositionKind,
    /// Max-norm of `Σ w B†B − Δ − c·1 + K` over the whole truncated space.
    pub operator_residual: T,
    /// Max-norm of `Σ w B†B − Δ − c·1` between states below the truncation level.
    pub interior_residual: T,
    /// `c` by adaptive quadrature of `Σ_o w|χ|² ∫₀^∞ |g(ω+ω_o)|² dω`.
    pub residue_constant: T,
    /// The same double sum on the decomposition grid.
    pub residue_grid: T,
    /// `⟨Ω| Σ w B†B |Ω⟩`.
    pub residue_operator: T,
    pub residue_relative_gap: T,
    pub grid_nodes: usize,
    pub omega_max: T,
    pub dimension: usize,
}

/// `Σ_o w_o |χ_o|² ∫₀^∞ |g(ω+ω_o)|² dω`, summed over polarizations.
pub fn residue_constant<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    chi: &[Cx<T>],
) -> Result<T> {
    let modes = space.modes();
    if chi.len() != modes.len() {
        return Err(Error::Shape(format!(
            "{} couplings for {} modes",
            chi.len(),
            modes.len()
        )));
    }
    let opts = QuadOptions::with_rel_tol(1e-13);
    let mut c = T::zero();
    for i in 0..modes.len() {
        let (p, _) = shifted_power(f, modes.frequency(i), &opts)?;
        c += modes.weights[i] * chi[i].norm_sqr() * p * T::from_count(modes.polarization_count());
    }
    Ok(c)
}

pub fn decomposition_check<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    chi: &[Cx<T>],
    kind: DecompositionKind,
    grid: &GridOptions,
) -> Result<DecompositionReport<T>> {
    let modes = space.modes();
    if modes.kind != kind.field() {
        return Err(Error::InvalidParameter(format!(
            "{} decomposition needs a {:?} mode set",
            kind.label(),
            kind.field()
        )));
    }
    let variant = kind.variant();
    let sign: PairSign = variant.pair_sign(modes.kind);
    let nodes = frequency_grid(space, f.t0(), grid)?;
    let omega_max = nodes.last().map(|n| n.0).unwrap_or_else(T::zero);

    let delta = delta_operator(space, f, chi, sign)?;
    let mut sum = Operator::zero();
    let mut kappa = vec![T::zero(); space.oscillators()];
    for &(w, weight) in &nodes {
        for b in b_operator(space, f, chi, w, variant)? {
            sum.add_scaled(&b.adjoint().mul(&b), re(weight));
            for (word, c) in b.terms() {
                if word[0].dagger {
                    kappa[word[0].osc] += weight * c.norm_sqr();
                }
            }
        }
    }
    let c_direct = residue_constant(space, f, chi)?;
    let c_grid: T = kappa.iter().copied().sum();
    let c_op = sum
        .matrix_element(space, &space.vacuum(), &space.vacuum())?
        .re;

    let mut diff = sum.difference(&delta);
    diff.add_term(Vec::new(), re(-c_direct));
    let top_weight = T::from_count(space.nmax() + 1);
    let (mut full, mut interior) = (T::zero(), T::zero());
    let (mut occ, mut col) = (Vec::new(), Vec::new());
    for j in 0..space.dimension() {
        diff.column(space, j, &mut occ, &mut col);
        let k_diag: T = (0..space.oscillators())
            .filter(|&o| occ[o] == space.nmax())
            .map(|o| kappa[o])
            .sum::<T>()
            * top_weight;
        let col_interior = space.is_interior(j);
        let mut diag_seen = false;
        for &(i, v) in &col {
            let with_k = if i == j {
                diag_seen = true;
                v + k_diag
            } else {
                v
            };
            full = full.max(with_k.norm());
            if col_interior && space.is_interior(i) {
                interior = interior.max(v.norm());
            }
        }
        if !diag_seen {
            full = full.max(k_diag);
        }
    }
    let rel = (c_op - c_direct).abs() / c_direct.abs().max(T::min_positive_value());
    Ok(DecompositionReport {
        kind,
        operator_residual: full,
        interior_residual: interior,
        residue_constant: c_direct,
        residue_grid: c_grid,
        residue_operator: c_op,
        residue_relative_gap: rel,
        grid_nodes: nodes.len(),
        omega_max,
        dimension: space.dimension(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow<T> {
    /// Position in the input list.
    pub index: usize,
    pub state: String,
    pub delta: T,
    pub bound: T,
    pub margin: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityScanReport<T> {
    /// Sorted by ascending margin.
    pub rows: Vec<ScanRow<T>>,
    pub bound: T,
    pub min_margin: T,
}

/// Margins more negative than this are violations.
pub const MARGIN_TOL: f64 = 1e-9;

pub fn inequality_scan<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    mu: Option<&SensitivityFunction<T>>,
    states: &[StateSpec<T>],
) -> Result<InequalityScanReport<T>> {
    let built = states
        .iter()
        .map(|s| make_state(space, s))
        .collect::<Result<Vec<_>>>()?;
    inequality_scan_states(space, f, mu, &built)
}

pub fn inequality_scan_states<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    mu: Option<&SensitivityFunction<T>>,
    states: &[FieldState<T>],
) -> Result<InequalityScanReport<T>> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("no states to scan".into()));
    }
    let origin = [T::zero(); 3];
    let delta = smeared_delta_operator(space, f, &origin, mu, T::zero())?;
    let chi = default_chi(space.modes(), mu, &origin, T::zero())?;
    let bound = -residue_constant(space, f, &chi)?;
    let mut rows = Vec::with_capacity(states.len());
    for (index, st) in states.iter().enumerate() {
        let d = expectation(space, st, &delta)?;
        rows.push(ScanRow {
            index,
            state: describe(&st.spec),
            delta: d,
            bound,
            margin: d - bound,
        });
    }
    rows.sort_by(|a, b| {
        a.margin
            .partial_cmp(&b.margin)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });
    let min_margin = rows[0].margin;
    if min_margin < -T::lit(MARGIN_TOL) {
        return Err(Error::InequalityViolation(format!(
            "state {} ({}) has margin {:e} below the discrete bound {:e}",
            rows[0].index, rows[0].state, min_margin, bound
        )));
    }
    Ok(InequalityScanReport {
        rows,
        bound,
        min_margin,
    })
}

fn describe<T: Real>(spec: &StateSpec<T>) -> String {
    match spec {
        StateSpec::Vacuum => "vacuum".into(),
        StateSpec::Coherent { amplitudes } => {
            let n: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
            format!("coherent(|alpha|^2={:.6})", n.to_f64_lossy())
        }
        StateSpec::SqueezedVacuum { squeezers } => {
            let parts: Vec<String> = squeezers
                .iter()
                .map(|s| match s {
                    Squeezer::Single { osc, r, theta } => {
                        format!(
                            "s{osc}(r={:.6},theta={:.6})",
                            r.to_f64_lossy(),
                            theta.to_f64_lossy()
                        )
                    }
                    Squeezer::Pair { a, b, r, theta } => {
                        format!(
                            "s{a}{b}(r={:.6},theta={:.6})",
                            r.to_f64_lossy(),
                            theta.to_f64_lossy()
                        )
                    }
                })
                .collect();
            format!("squeezed_vacuum[{}]", parts.join(";"))
        }
        StateSpec::PairSuperposition { epsilon, .. } => {
            format!("pair_superposition(epsilon={:.6})", epsilon.to_f64_lossy())
        }
        StateSpec::Custom { .. } => "custom".into(),
    }
}

/// Minimizer of the normalized `⟨Δ⟩(ε)` over pair superpositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonOptimum<T> {
    pub eps_star: T,
    pub delta_min: T,
    /// `c₁ = 0`: the pair term does not couple to the vacuum through `Δ`.
    pub degenerate: bool,
    /// `⟨Δ⟩(ε) = (2bε + dε²)/(1 + nε²)`.
    pub b: T,
    pub d: T,
    pub n: T,
}

impl<T: Real> EpsilonOptimum<T> {
    pub fn objective(&self, eps: T) -> T {
        objective(self.b, self.d, self.n, eps)
    }
}

fn objective<T: Real>(b: T, d: T, n: T, eps: T) -> T {
    (T::lit(2.0) * b * eps + d * eps * eps) / (T::one() + n * eps * eps)
}

/// Golden-section minimum of a unimodal function on `[lo, hi]`.
fn golden_section<T: Real>(mut lo: T, mut hi: T, tol: T, f: impl Fn(T) -> T) -> (T, T) {
    let r = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (hi - lo).abs() > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = (lo + hi) / T::lit(2.0);
    (x, f(x))
}

/// Minimizes the exact normalized expectation of `Δ` in
/// `N(|Ω⟩ + ε Σ F_ij a_i†a_j† |Ω⟩)` by golden-section search on each
/// half-line, where the objective is unimodal.
pub fn optimize_epsilon<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    mu: Option<&SensitivityFunction<T>>,
    pairs: &[Vec<Cx<T>>],
) -> Result<EpsilonOptimum<T>> {
    let origin = [T::zero(); 3];
    let delta = smeared_delta_operator(space, f, &origin, mu, T::zero())?;
    let pair = pair_vector(space, pairs)?;
    let vac = space.vacuum();
    let n: T = pair.iter().map(|z| z.norm_sqr()).sum();
    let b = delta.matrix_element(space, &vac, &pair)?.re;
    let d = delta.matrix_element(space, &pair, &pair)?.re;
    let scale = delta.max_coefficient().max(T::min_positive_value()) * n.sqrt();
    if n == T::zero() || b.abs() <= T::lit(1e-14) * scale {
        return Ok(EpsilonOptimum {
            eps_star: T::zero(),
            delta_min: T::zero(),
            degenerate: true,
            b,
            d,
            n,
        });
    }
    let mut e_max = T::lit(10.0) / n.sqrt();
    let obj = |e: T| objective(b, d, n, e);
    loop {
        let tol = e_max * T::lit(1e-12);
        let (xp, fp) = golden_section(T::zero(), e_max, tol, obj);
        let (xm, fm) = golden_section(-e_max, T::zero(), tol, obj);
        let (x, fx) = if fp <= fm { (xp, fp) } else { (xm, fm) };
        if x.abs() < e_max * T::lit(0.999) || e_max > T::lit(1e12) / n.sqrt() {
            return Ok(EpsilonOptimum {
                eps_star: x,
                delta_min: fx,
                degenerate: false,
                b,
                d,
                n,
            });
        }
        e_max *= T::lit(10.0);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint<T> {
    pub t: T,
    pub x: Vec3<T>,
    pub rho: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyScan<T> {
    pub points: Vec<EnergyPoint<T>>,
    pub min_rho: T,
    /// `Σ_o ω_o ⟨n_o⟩`.
    pub total_energy: T,
}

/// Pointwise `ρ = ½⟨:E²: + :B²:⟩` on the product grid, `t` varying fastest.
pub fn energy_density_scan<T: Real>(
    space: &FockSpace<T>,
    state: &FieldState<T>,
    x_grid: &[Vec3<T>],
    t_grid: &[T],
) -> Result<EnergyScan<T>> {
    if space.modes().kind != FieldKind::Electromagnetic {
        return Err(Error::Unsupported(
            "energy density needs an electromagnetic mode set".into(),
        ));
    }
    if x_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParameter("energy scan grid is empty".into()));
    }
    let half = T::lit(0.5);
    let mut points = Vec::with_capacity(x_grid.len() * t_grid.len());
    for x in x_grid {
        for &t in t_grid {
            let mut op = pointwise_square(space, FieldComponent::Electric, x, t)?;
            op.add_assign(&pointwise_square(space, FieldComponent::Magnetic, x, t)?);
            let rho = expectation(space, state, &op)? * half;
            points.push(EnergyPoint { t, x: *x, rho });
        }
    }
    let min_rho = points.iter().map(|p| p.rho).fold(T::infinity(), T::min);
    let total_energy = expectation(space, state, &energy_operator(space))?;
    Ok(EnergyScan {
        points,
        min_rho,
        total_energy,
    })
}

/// `|[k×e(k)]·[p×e(p)] − ω_k ω_p e(k)·e(p)| / (ω_k ω_p)` for
/// `k = (q, 0, kx)`, `p = (−q, q, kx)`, using the first polarization of each.
pub fn paraxial_factor_check<T: Real>(kx: T, q: T) -> Result<T> {
    if !(q > T::zero()) || !(kx > T::zero()) {
        return Err(Error::InvalidParameter("kx and q must be positive".into()));
    }
    if q >= kx {
        return Err(Error::InvalidParameter(format!(
            "transverse scale {q} must be below kx = {kx}"
        )));
    }
    paraxial_deviation(&[q, T::zero(), kx], &[-q, q, kx])
}

fn paraxial_deviation<T: Real>(k: &Vec3<T>, p: &Vec3<T>) -> Result<T> {
    let ek = polarization_basis(k)?[0];
    let ep = polarization_basis(p)?[0];
    let wk = dot(k, k).sqrt();
    let wp = dot(p, p).sqrt();
    let lhs = dot(&cross(k, &ek), &cross(p, &ep));
    Ok((lhs - wk * wp * dot(&ek, &ep)).abs() / (wk * wp))
}

/// Least-squares slope of `log(deviation)` against `log(kx)`.
pub fn paraxial_slope<T: Real>(q: T, ratios: &[T]) -> Result<T> {
    if ratios.len() < 2 {
        return Err(Error::InvalidParameter(
            "slope fit needs at least two points".into(),
        ));
    }
    let pts = ratios
        .iter()
        .map(|&r| Ok(((r * q).ln(), paraxial_factor_check(r * q, q)?.ln())))
        .collect::<Result<Vec<(T, T)>>>()?;
    let m = T::from_count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / m;
    let my = pts.iter().map(|p| p.1).sum::<T>() / m;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Smeared `(⟨:E²:⟩, ⟨:B²:⟩)` at the origin.
pub fn magnetic_vs_electric<T: Real>(
    space: &FockSpace<T>,
    f: &ProbeFunction<T>,
    state: &FieldState<T>,
) -> Result<(T, T)> {
    let origin = [T::zero(); 3];
    let e = smeared_square(space, f, FieldComponent::Electric, &origin, T::zero())?;
    let b = smeared_square(space, f, FieldComponent::Magnetic, &origin, T::zero())?;
    Ok((
        expectation(space, state, &e)?,
        expectation(space, state, &b)?,
    ))
}

/// Parameters of the randomized state families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomStateOptions {
    pub r_max: f64,
    pub alpha_max: f64,
    pub epsilon_max: f64,
}

impl Default for RandomStateOptions {
    fn default() -> Self {
        Self {
            r_max: 1.0,
            alpha_max: 1.5,
            epsilon_max: 3.0,
        }
    }
}

fn gauss<T: Real, R: Rng>(rng: &mut R) -> T {
    // Box–Muller; the `1 − u` keeps the logarithm finite.
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    T::lit((-2.0 * (1.0 - u).ln()).sqrt() * (std::f64::consts::TAU * v).cos())
}

fn random_squeezers<T: Real, R: Rng>(
    space: &FockSpace<T>,
    rng: &mut R,
    r_max: f64,
) -> Vec<Squeezer<T>> {
    let osc = space.oscillators();
    let r = T::lit(rng.gen_range(0.0..=r_max));
    let theta = T::lit(rng.gen_range(0.0..std::f64::consts::TAU));
    if osc >= 2 && rng.gen_bool(0.5) {
        let a = rng.gen_range(0..osc);
        let mut b = rng.gen_range(0..osc - 1);
        if b >= a {
            b += 1;
        }
        vec![Squeezer::Pair { a, b, r, theta }]
    } else {
        vec![Squeezer::Single {
            osc: rng.gen_range(0..osc),
            r,
            theta,
        }]
    }
}

/// Random symmetric pair coefficients of unit Frobenius norm.
pub fn random_pairs<T: Real, R: Rng>(osc: usize, rng: &mut R) -> Vec<Vec<Cx<T>>> {
    let mut f = vec![vec![Cx::zero(); osc]; osc];
    for i in 0..osc {
        for j in 0..=i {
            let z = cx(gauss::<T, _>(rng), gauss::<T, _>(rng));
            f[i][j] = z;
            f[j][i] = z;
        }
    }
    let n = f.iter().flatten().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    for z in f.iter_mut().flatten() {
        *z /= n;
    }
    f
}

/// `count` states cycling through coherent, squeezed, pair-superposition
/// and random even-sector families. Draws that exceed the truncation
/// capacity are redrawn.
pub fn random_states<T: Real, R: Rng>(
    space: &FockSpace<T>,
    count: usize,
    opts: &RandomStateOptions,
    rng: &mut R,
) -> Result<Vec<FieldState<T>>> {
    let osc = space.oscillators();
    let mut out = Vec::with_capacity(count);
    let mut failures = 0usize;
    while out.len() < count {
        let spec = match out.len() % 4 {
            0 => StateSpec::Coherent {
                amplitudes: (0..osc)
                    .map(|_| {
                        let m = rng.gen_range(0.0..=opts.alpha_max) / (osc as f64).sqrt();
                        Cx::from_polar(T::lit(m), T::lit(rng.gen_range(0.0..std::f64::consts::TAU)))
                    })
                    .collect(),
            },
            1 => StateSpec::SqueezedVacuum {
                squeezers: random_squeezers(space, rng, opts.r_max),
            },
            2 => StateSpec::PairSuperposition {
                epsilon: T::lit(rng.gen_range(-opts.epsilon_max..=opts.epsilon_max)),
                pairs: random_pairs(osc, rng),
            },
            _ => StateSpec::Custom {
                vector: (0..space.dimension())
                    .map(|i| {
                        if space.total_number(i) % 2 == 0 {
                            cx(gauss::<T, _>(rng), gauss::<T, _>(rng))
                        } else {
                            Cx::zero()
                        }
                    })
                    .collect(),
            },
        };
        match make_state(space, &spec) {
            Ok(s) => out.push(s),
            Err(Error::Capacity { .. }) if failures < 10 * count + 100 => failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_modes, ModeLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(n: usize, kind: FieldKind, nmax: usize) -> FockSpace<f64> {
        let l = ModeLayout::Collinear {
            n,
            omega0: 1.0,
            delta: 0.1,
            direction: [0.0, 0.0, 1.0],
        };
        FockSpace::new(build_modes(&l, kind, 8).unwrap(), nmax).unwrap()
    }

    #[test]
    fn single_mode_scalar_decomposition() {
        let s = space(1, FieldKind::Scalar, 6);
        let f = ProbeFunction::gaussian(1.0).unwrap();
        let chi = default_chi(s.modes(), None, &[0.0; 3], 0.0).unwrap();
        for kind in [DecompositionKind::ScalarA, DecompositionKind::ScalarATilde] {
            let r = decomposition_check(&s, &f, &chi, kind, &GridOptions::default()).unwrap();
            assert!(r.operator_residual < 1e-12, "{r:?}");
            assert!(r.interior_residual < 1e-12, "{r:?}");
            assert!(r.residue_relative_gap < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn grid_coverage_error() {
        let s = space(1, FieldKind::Scalar, 2);
        let f = ProbeFunction::gaussian(1.0).unwrap();
        let chi = default_chi(s.modes(), None, &[0.0; 3], 0.0).unwrap();
        let opts = GridOptions {
            span_t0: 4.0,
            ..Default::default()
        };
        let e = decomposition_check(&s, &f, &chi, DecompositionKind::ScalarA, &opts);
        assert!(matches!(e, Err(Error::GridCoverage { .. })));
        let e = decomposition_check(
            &s,
            &f,
            &chi,
            DecompositionKind::Electromagnetic,
            &GridOptions::default(),
        );
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn vacuum_row_margin_is_bound() {
        let s = space(2, FieldKind::Scalar, 4);
        let f = ProbeFunction::lorentzian_squared(1.0).unwrap();
        let r = inequality_scan(&s, &f, None, &[StateSpec::Vacuum]).unwrap();
        assert!((r.rows[0].margin + r.bound).abs() < 1e-15);
        assert!(r.bound < 0.0);
    }

    #[test]
    fn epsilon_degenerate_and_symmetric() {
        let s = space(2, FieldKind::Scalar, 4);
        let f = ProbeFunction::gaussian(1.0).unwrap();
        let zero = vec![vec![Cx::zero(); 2]; 2];
        let o = optimize_epsilon(&s, &f, None, &zero).unwrap();
        assert!(o.degenerate && o.eps_star == 0.0 && o.delta_min == 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_pairs::<f64, _>(2, &mut rng);
        let neg: Vec<Vec<Cx<f64>>> = p.iter().map(|r| r.iter().map(|z| -z).collect()).collect();
        let a = optimize_epsilon(&s, &f, None, &p).unwrap();
        let b = optimize_epsilon(&s, &f, None, &neg).unwrap();
        assert!((a.eps_star + b.eps_star).abs() < 1e-8 * a.eps_star.abs().max(1.0));
        assert!((a.delta_min - b.delta_min).abs() < 1e-15);
        assert!(a.delta_min < 0.0);
    }

    #[test]
    fn paraxial_limits() {
        assert!(paraxial_factor_check(1.0, 2.0).is_err());
        let d1 = paraxial_factor_check(10.0_f64, 1.0).unwrap();
        let d2 = paraxial_factor_check(20.0, 1.0).unwrap();
        assert!(d1 > 0.0 && (d1 / d2 - 4.0).abs() < 0.3);
        let same = paraxial_deviation(&[0.0, 0.0, 3.0], &[0.0, 0.0, 3.0]).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn random_states_are_normalized_and_even_where_promised() {
        let s = space(2, FieldKind::Scalar, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let states = random_states(&s, 12, &RandomStateOptions::default(), &mut rng).unwrap();
        assert_eq!(states.len(), 12);
        for st in &states {
            let n: f64 = st.vector.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
            if !matches!(st.spec, StateSpec::Coherent { .. }) {
                assert!(s.odd_population(&st.vector) < 1e-12);
            }
        }
    }
}
