// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a TOML document overlaid with command-line flags and
//! resolved into a [`Plan`] before any numerical work starts.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qibound_core::fock::{build_modes, FieldKind, ModeLayout, Squeezer, DEFAULT_MAX_OSCILLATORS};
use qibound_core::verify::{DecompositionKind, GridOptions, RandomStateOptions};
use qibound_core::weighting::{ProbeKind, SensitivityKind};
use qibound_core::{Error, FockSpace, Probe, Result, Sensitivity, StateSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Bound,
    Limit,
    Verify,
    Decompose,
    Energy,
    Sweep,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Limit => "limit",
            Command::Verify => "verify",
            Command::Decompose => "decompose",
            Command::Energy => "energy",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "qibound",
    version,
    about = "Quantum-inequality bounds on field squeezing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CliCommand {
    /// Bound on the smeared, normal-ordered field square for one detector.
    Bound,
    /// Maximal squeezing in dB against τ = ω₀t₀, both formulas side by side.
    Limit,
    /// Scan states in the discrete model against the discrete bound.
    Verify,
    /// Check the sum-of-squares identity behind the bound.
    Decompose,
    /// Energy density of a pair superposition on a space-time grid.
    Energy,
    /// Bound over a grid of τ, bandwidths and probes.
    Sweep,
}

impl From<CliCommand> for Command {
    fn from(c: CliCommand) -> Self {
        match c {
            CliCommand::Bound => Command::Bound,
            CliCommand::Limit => Command::Limit,
            CliCommand::Verify => Command::Verify,
            CliCommand::Decompose => Command::Decompose,
            CliCommand::Energy => Command::Energy,
            CliCommand::Sweep => Command::Sweep,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML configuration file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// lorentzian | gaussian | table:PATH
    #[arg(long, global = true)]
    pub probe: Option<String>,
    #[arg(long, global = true)]
    pub t0: Option<f64>,
    #[arg(long, global = true)]
    pub omega0: Option<f64>,
    #[arg(long, global = true)]
    pub bandwidth: Option<f64>,
    /// Repeatable.
    #[arg(long, global = true)]
    pub tau: Vec<f64>,
    /// Number of collinear modes.
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub kind: Option<String>,
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    pub kind: Option<SensitivityKind>,
    pub omega0: Option<f64>,
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quad_rel_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Bandwidths relative to `omega0`.
    pub rel_bandwidth: Option<Vec<f64>>,
    /// Probe specs in the `--probe` syntax.
    pub probes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    pub points: Option<Vec<[f64; 3]>>,
    pub t_points: Option<usize>,
    pub t_span: Option<f64>,
}

/// The configuration document. Every field is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub subcommand: Option<Command>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tau: Option<Vec<f64>>,
    pub probe: Option<ProbeConfig>,
    pub sensitivity: Option<SensitivityConfig>,
    pub field: Option<FieldKind>,
    pub modes: Option<ModeLayout<f64>>,
    pub nmax: Option<usize>,
    /// Explicit states for `verify` (all) and `energy` (the first).
    pub states: Option<Vec<StateSpec>>,
    pub random_states: Option<usize>,
    pub random: Option<RandomStateOptions>,
    /// Couple the sensitivity into the discrete-mode model.
    pub mode_sensitivity: Option<bool>,
    pub kinds: Option<Vec<DecompositionKind>>,
    pub grid: Option<GridOptions>,
    pub tolerances: Option<Tolerances>,
    pub sweep: Option<SweepConfig>,
    pub energy: Option<EnergyConfig>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_RANDOM_STATES: usize = 200;

/// A probe together with the spec string that produced it.
#[derive(Debug, Clone)]
pub struct NamedProbe {
    pub spec: String,
    pub probe: Probe,
}

/// Parses `lorentzian | gaussian | table:PATH`.
pub fn parse_probe(spec: &str, t0: f64) -> Result<NamedProbe> {
    let probe = match spec {
        "lorentzian" | "lorentzian_squared" => Probe::builtin(ProbeKind::LorentzianSquared, t0)?,
        "gaussian" => Probe::builtin(ProbeKind::Gaussian, t0)?,
        s => match s.strip_prefix("table:") {
            Some(path) if !path.is_empty() => Probe::load_table(path)?,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown probe '{s}'; expected lorentzian, gaussian or table:PATH"
                )))
            }
        },
    };
    Ok(NamedProbe {
        spec: spec.to_string(),
        probe,
    })
}

/// Fully validated run description.
#[derive(Debug, Clone)]
pub struct Plan {
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub probe: NamedProbe,
    pub sensitivity: Sensitivity,
    pub field: FieldKind,
    pub layout: ModeLayout<f64>,
    pub nmax: usize,
    pub taus: Vec<f64>,
    pub states: Vec<StateSpec>,
    pub random_states: usize,
    pub random: RandomStateOptions,
    pub mode_sensitivity: bool,
    pub kinds: Vec<DecompositionKind>,
    pub grid: GridOptions,
    pub tolerances: Tolerances,
    pub sweep_bandwidths: Vec<f64>,
    pub sweep_probes: Vec<String>,
    pub energy_points: Vec<[f64; 3]>,
    pub energy_times: Vec<f64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl Plan {
    /// Merges the file and the flags, then checks everything a run needs.
    pub fn resolve(command: Command, file: FileConfig, flags: &Flags) -> Result<Self> {
        let probe_cfg = file.probe.clone().unwrap_or_default();
        let sens_cfg = file.sensitivity.clone().unwrap_or_default();

        let t0 = positive("t0", flags.t0.or(probe_cfg.t0).unwrap_or(1.0))?;
        let probe_spec = flags
            .probe
            .clone()
            .or(probe_cfg.kind)
            .unwrap_or_else(|| "lorentzian".into());
        let probe = parse_probe(&probe_spec, t0)?;

        let omega0 = positive("omega0", flags.omega0.or(sens_cfg.omega0).unwrap_or(1.0))?;
        let bandwidth = flags
            .bandwidth
            .or(sens_cfg.bandwidth)
            .unwrap_or(0.1 * omega0);
        let sensitivity = Sensitivity::new(
            sens_cfg.kind.unwrap_or(SensitivityKind::RectBand),
            omega0,
            bandwidth,
        )?;

        let field = file.field.unwrap_or(FieldKind::Electromagnetic);
        let layout = match (flags.modes, file.modes.clone()) {
            (Some(n), _) => ModeLayout::Collinear {
                n,
                omega0,
                delta: 0.05,
                direction: [0.0, 0.0, 1.0],
            },
            (None, Some(l)) => l,
            (None, None) => ModeLayout::Collinear {
                n: 2,
                omega0,
                delta: 0.05,
                direction: [0.0, 0.0, 1.0],
            },
        };
        let nmax = flags.nmax.or(file.nmax).unwrap_or(8);

        let taus = if !flags.tau.is_empty() {
            flags.tau.clone()
        } else if let Some(t) = file.tau.clone() {
            t
        } else if command == Command::Sweep {
            vec![0.01, 0.1, 1.0, 10.0]
        } else {
            vec![0.01, 0.1, 1.0]
        };
        if taus.is_empty() {
            return Err(Error::InvalidParameter("tau grid is empty".into()));
        }
        for &t in &taus {
            positive("tau", t)?;
        }

        let tolerances = file.tolerances.unwrap_or_default();
        positive("quad_rel_tol", tolerances.quad_rel_tol)?;
        positive("residual_tol", tolerances.residual_tol)?;

        let random = file.random.unwrap_or(RandomStateOptions {
            r_max: 0.5,
            alpha_max: 1.0,
            epsilon_max: 3.0,
        });
        for (name, v) in [
            ("r_max", random.r_max),
            ("alpha_max", random.alpha_max),
            ("epsilon_max", random.epsilon_max),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        let random_states = file.random_states.unwrap_or(DEFAULT_RANDOM_STATES);
        if random_states == 0 {
            return Err(Error::InvalidParameter(
                "random_states must be at least 1".into(),
            ));
        }

        let kinds = file
            .kinds
            .clone()
            .unwrap_or_else(|| DecompositionKind::ALL.to_vec());
        if kinds.is_empty() {
            return Err(Error::InvalidParameter("no decomposition kinds".into()));
        }
        let grid = file.grid.unwrap_or_default();

        let sweep = file.sweep.clone().unwrap_or_default();
        let sweep_bandwidths = sweep
            .rel_bandwidth
            .unwrap_or_else(|| vec![bandwidth / omega0]);
        if sweep_bandwidths.is_empty() {
            return Err(Error::InvalidParameter(
                "sweep bandwidth list is empty".into(),
            ));
        }
        for &b in &sweep_bandwidths {
            positive("sweep bandwidth", b)?;
        }
        let sweep_probes = sweep.probes.unwrap_or_else(|| vec![probe_spec.clone()]);
        if sweep_probes.is_empty() {
            return Err(Error::InvalidParameter("sweep probe list is empty".into()));
        }

        let energy = file.energy.clone().unwrap_or_default();
        let energy_points = energy
            .points
            .unwrap_or_else(|| (0..5).map(|k| [0.0, 0.0, 0.5 * k as f64]).collect());
        let t_points = energy.t_points.unwrap_or(64);
        let t_span = positive(
            "t_span",
            energy.t_span.unwrap_or(std::f64::consts::TAU / omega0),
        )?;
        if energy_points.is_empty() || t_points == 0 {
            return Err(Error::InvalidParameter("energy grid is empty".into()));
        }
        let energy_times = (0..t_points)
            .map(|k| t_span * k as f64 / t_points as f64)
            .collect();

        let plan = Plan {
            command,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: flags.format.or(file.format).unwrap_or(Format::Table),
            out: flags.out.clone().or(file.out),
            probe,
            sensitivity,
            field,
            layout,
            nmax,
            taus,
            states: file.states.unwrap_or_default(),
            random_states,
            random,
            mode_sensitivity: file.mode_sensitivity.unwrap_or(false),
            kinds,
            grid,
            tolerances,
            sweep_bandwidths,
            sweep_probes,
            energy_points,
            energy_times,
        };
        plan.check_command()?;
        Ok(plan)
    }

    /// Builds the Fock space for `kind`.
    pub fn space(&self, kind: FieldKind) -> Result<FockSpace> {
        let modes = build_modes(&self.layout, kind, DEFAULT_MAX_OSCILLATORS)?;
        FockSpace::new(modes, self.nmax)
    }

    pub fn sweep_probe(&self, spec: &str, t0: f64) -> Result<NamedProbe> {
        parse_probe(spec, t0)
    }

    /// Command-specific checks that need built objects but no numerics.
    fn check_command(&self) -> Result<()> {
        match self.command {
            Command::Bound | Command::Limit => Ok(()),
            Command::Sweep => {
                for spec in &self.sweep_probes {
                    self.sweep_probe(spec, 1.0)?;
                }
                Ok(())
            }
            Command::Verify => {
                let space = self.space(self.field)?;
                self.check_sensitivity_in_modes()?;
                for s in &self.states {
                    check_state(&space, s)?;
                }
                Ok(())
            }
            Command::Decompose => {
                self.check_sensitivity_in_modes()?;
                for kind in &self.kinds {
                    self.space(kind.field())?;
                }
                Ok(())
            }
            Command::Energy => {
                if self.field != FieldKind::Electromagnetic {
                    return Err(Error::Unsupported(
                        "energy density needs the electromagnetic field".into(),
                    ));
                }
                let space = self.space(self.field)?;
                self.check_sensitivity_in_modes()?;
                if let Some(s) = self.states.first() {
                    check_state(&space, s)?;
                } else if space.nmax() < 2 {
                    return Err(Error::InvalidParameter(
                        "the built-in pair superposition needs nmax ≥ 2".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn check_sensitivity_in_modes(&self) -> Result<()> {
        if self.mode_sensitivity && self.sensitivity.kind == SensitivityKind::SharpLine {
            return Err(Error::Unsupported(
                "a sharp-line sensitivity cannot weight discrete modes".into(),
            ));
        }
        Ok(())
    }

    pub fn mode_mu(&self) -> Option<&Sensitivity> {
        self.mode_sensitivity.then_some(&self.sensitivity)
    }
}

fn finite(z: &Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Shape checks on a state spec; capacity is only known after building it.
pub fn check_state(space: &FockSpace, spec: &StateSpec) -> Result<()> {
    let osc = space.oscillators();
    let bad = |msg: String| Err(Error::Shape(msg));
    match spec {
        StateSpec::Vacuum => Ok(()),
        StateSpec::Coherent { amplitudes } => {
            if amplitudes.len() != osc {
                return bad(format!(
                    "{} amplitudes for {osc} oscillators",
                    amplitudes.len()
                ));
            }
            if !amplitudes.iter().all(finite) {
                return Err(Error::InvalidParameter("non-finite amplitude".into()));
            }
            Ok(())
        }
        StateSpec::SqueezedVacuum { squeezers } => {
            for s in squeezers {
                let (oscs, r) = match *s {
                    Squeezer::Single { osc: o, r, .. } => (vec![o], r),
                    Squeezer::Pair { a, b, r, .. } => (vec![a, b], r),
                };
                if let Some(o) = oscs.iter().find(|&&o| o >= osc) {
                    return bad(format!("oscillator {o} out of range for {osc} oscillators"));
                }
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "squeezing r must be nonnegative, got {r}"
                    )));
                }
            }
            Ok(())
        }
        StateSpec::PairSuperposition { epsilon, pairs } => {
            if pairs.len() != osc || pairs.iter().any(|r| r.len() != osc) {
                return bad(format!("pair coefficients must be {osc}×{osc}"));
            }
            if !epsilon.is_finite() || !pairs.iter().flatten().all(finite) {
                return Err(Error::InvalidParameter("non-finite pair state".into()));
            }
            Ok(())
        }
        StateSpec::Custom { vector } => {
            if vector.len() != space.dimension() {
                return bad(format!(
                    "custom vector has {} entries, space has {}",
                    vector.len(),
                    space.dimension()
                ));
            }
            if !vector.iter().all(finite) {
                return Err(Error::InvalidParameter("non-finite state vector".into()));
            }
            Ok(())
        }
    }
}
