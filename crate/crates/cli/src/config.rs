//! Flat key-value run configurations with section headers.
//!
//! One scenario per file, no nested structures:
//!
//! ```text
//! [scenario]
//! name = adpf
//!
//! [channels]
//! gamma = 0.5
//! p = 0.3333333333333333
//! q = 0
//!
//! [state]
//! kind = max_coherent
//! delta_rho = 0
//!
//! [control]
//! phi = 0.5
//! alpha = 0
//!
//! [measurement]
//! mode = fixed
//! phi_m = 0.5
//! alpha_m = 0
//!
//! [sweep]
//! variable = delta_rho
//! from = -1
//! to = 1
//! count = 401
//!
//! [output]
//! dir = out
//!
//! [run]
//! seed = 42
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::{CliError, CliResult};

/// Raw parsed file: (section, key) → (value, line number).
pub type Flat = BTreeMap<(String, String), (String, usize)>;

pub fn parse_flat(text: &str) -> CliResult<Flat> {
    let mut flat = Flat::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| CliError::Parse {
                line,
                message: "unterminated section header".into(),
            })?;
            section = name.trim().to_string();
            if section.is_empty() {
                return Err(CliError::Parse {
                    line,
                    message: "empty section name".into(),
                });
            }
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| CliError::Parse {
            line,
            message: format!("expected `key = value`, got `{trimmed}`"),
        })?;
        if section.is_empty() {
            return Err(CliError::Parse {
                line,
                message: "key before any [section] header".into(),
            });
        }
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Parse {
                line,
                message: "empty key".into(),
            });
        }
        let prev = flat.insert(
            (section.clone(), key.clone()),
            (value.trim().to_string(), line),
        );
        if prev.is_some() {
            return Err(CliError::Parse {
                line,
                message: format!("duplicate key `{key}` in [{section}]"),
            });
        }
    }
    Ok(flat)
}

/// Which channel pair and Hamiltonian a run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    DepolQubit,
    DepolDdim { d: usize, energies: Vec<f64> },
    Thermal { beta: f64 },
    Adpf { gamma: f64, p: f64, q: f64 },
    Custom {
        a: ChannelSpec,
        b: ChannelSpec,
        energies: Vec<f64>,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::DepolQubit => "depol_qubit",
            Scenario::DepolDdim { .. } => "depol_ddim",
            Scenario::Thermal { .. } => "thermal",
            Scenario::Adpf { .. } => "adpf",
            Scenario::Custom { .. } => "custom",
        }
    }
}

/// One channel of a custom pair.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Identity,
    Depolarizing,
    Thermalizing { beta: f64 },
    Gad { p: f64, gamma: f64 },
    PhaseFlip { q: f64 },
}

/// Initial state of the work medium.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// ρ₁₂ = √(ρ₁₁ρ₂₂) at the given imbalance (pure).
    MaxCoherent { delta_rho: f64 },
    /// Explicit populations and coherence.
    Populations { delta_rho: f64, coherence: C64 },
    /// Gibbs state at β_in.
    Thermal { beta_in: f64 },
    /// Row-major 2d² floats (re, im pairs).
    Matrix { entries: Vec<f64> },
    /// Seeded random pure state per sweep index.
    RandomPure,
    /// Seeded random mixed state per sweep index.
    RandomMixed,
}

impl StateSpec {
    fn kind(&self) -> &'static str {
        match self {
            StateSpec::MaxCoherent { .. } => "max_coherent",
            StateSpec::Populations { .. } => "populations",
            StateSpec::Thermal { .. } => "thermal",
            StateSpec::Matrix { .. } => "matrix",
            StateSpec::RandomPure => "random_pure",
            StateSpec::RandomMixed => "random_mixed",
        }
    }
}

/// Control measurement strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementMode {
    Fixed { phi_m: f64, alpha_m: f64 },
    Optimize,
}

/// Sweep variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    DeltaRho,
    Beta,
    BetaIn,
    StateIndex,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::DeltaRho => "delta_rho",
            SweepVar::Beta => "beta",
            SweepVar::BetaIn => "beta_in",
            SweepVar::StateIndex => "state_index",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.variable == SweepVar::StateIndex {
            return (0..self.count).map(|k| k as f64).collect();
        }
        if self.count == 1 {
            return vec![self.from];
        }
        (0..self.count)
            .map(|k| self.from + (self.to - self.from) * k as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub state: StateSpec,
    pub control_phi: f64,
    pub control_alpha: f64,
    pub measurement: MeasurementMode,
    pub sweep: Option<SweepAxis>,
    pub sweep2: Option<SweepAxis>,
    pub out_dir: String,
    pub seed: u64,
}

struct Reader {
    flat: Flat,
    used: std::collections::BTreeSet<(String, String)>,
}

impl Reader {
    fn new(flat: Flat) -> Self {
        Self {
            flat,
            used: Default::default(),
        }
    }

    fn key_err(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::Key {
            section: section.into(),
            key: key.into(),
            message: message.into(),
        }
    }

    fn get(&mut self, section: &str, key: &str) -> Option<String> {
        let id = (section.to_string(), key.to_string());
        let value = self.flat.get(&id).map(|(v, _)| v.clone());
        if value.is_some() {
            self.used.insert(id);
        }
        value
    }

    fn require(&mut self, section: &str, key: &str) -> CliResult<String> {
        self.get(section, key)
            .ok_or_else(|| self.key_err(section, key, "missing required key"))
    }

    fn f64_of(&self, section: &str, key: &str, value: &str) -> CliResult<f64> {
        value
            .parse::<f64>()
            .map_err(|_| self.key_err(section, key, format!("`{value}` is not a number")))
    }

    fn require_f64(&mut self, section: &str, key: &str) -> CliResult<f64> {
        let v = self.require(section, key)?;
        self.f64_of(section, key, &v)
    }

    fn optional_f64(&mut self, section: &str, key: &str, default: f64) -> CliResult<f64> {
        match self.get(section, key) {
            Some(v) => self.f64_of(section, key, &v),
            None => Ok(default),
        }
    }

    fn float_list(&self, section: &str, key: &str, value: &str) -> CliResult<Vec<f64>> {
        value
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| self.key_err(section, key, format!("`{tok}` is not a number")))
            })
            .collect()
    }

    fn finish(self) -> CliResult<()> {
        for ((section, key), (_, line)) in &self.flat {
            if !self.used.contains(&(section.clone(), key.clone())) {
                return Err(CliError::Parse {
                    line: *line,
                    message: format!("unknown key `{key}` in [{section}]"),
                });
            }
        }
        Ok(())
    }
}

fn unit_interval(r: &Reader, section: &str, key: &str, value: f64) -> CliResult<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(r.key_err(section, key, format!("{value} outside [0, 1]")));
    }
    Ok(value)
}

fn channel_spec(r: &mut Reader, prefix: &str) -> CliResult<ChannelSpec> {
    let kind = r.require("channels", &format!("{prefix}_kind"))?;
    match kind.as_str() {
        "identity" => Ok(ChannelSpec::Identity),
        "depolarizing" => Ok(ChannelSpec::Depolarizing),
        "thermalizing" => {
            let beta = r.require_f64("channels", &format!("{prefix}_beta"))?;
            Ok(ChannelSpec::Thermalizing { beta })
        }
        "gad" => {
            let p = r.require_f64("channels", &format!("{prefix}_p"))?;
            let gamma = r.require_f64("channels", &format!("{prefix}_gamma"))?;
            Ok(ChannelSpec::Gad {
                p: unit_interval(r, "channels", &format!("{prefix}_p"), p)?,
                gamma: unit_interval(r, "channels", &format!("{prefix}_gamma"), gamma)?,
            })
        }
        "phase_flip" => {
            let q = r.require_f64("channels", &format!("{prefix}_q"))?;
            Ok(ChannelSpec::PhaseFlip {
                q: unit_interval(r, "channels", &format!("{prefix}_q"), q)?,
            })
        }
        other => Err(r.key_err(
            "channels",
            &format!("{prefix}_kind"),
            format!("unknown channel kind `{other}`"),
        )),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let flat = parse_flat(text)?;
        Self::from_flat(flat)
    }

    pub fn from_flat(flat: Flat) -> CliResult<Self> {
        let mut r = Reader::new(flat);

        let name = r.require("scenario", "name")?;
        let scenario = match name.as_str() {
            "depol_qubit" => Scenario::DepolQubit,
            "depol_ddim" => {
                let d_raw = r.require("channels", "d")?;
                let d: usize = d_raw
                    .parse()
                    .map_err(|_| r.key_err("channels", "d", "not an integer"))?;
                if !(2..=16).contains(&d) {
                    return Err(r.key_err("channels", "d", "d must be in 2..=16"));
                }
                let energies = match r.get("channels", "energies") {
                    Some(v) => r.float_list("channels", "energies", &v)?,
                    None => (0..d).map(|k| k as f64).collect(),
                };
                if energies.len() != d {
                    return Err(r.key_err("channels", "energies", "length must equal d"));
                }
                if energies.windows(2).any(|w| w[0] > w[1]) {
                    return Err(r.key_err("channels", "energies", "must be ascending"));
                }
                Scenario::DepolDdim { d, energies }
            }
            "thermal" => {
                let beta = r.require_f64("channels", "beta")?;
                if beta.is_nan() || beta < 0.0 {
                    return Err(r.key_err("channels", "beta", "must be ≥ 0"));
                }
                Scenario::Thermal { beta }
            }
            "adpf" => {
                let gamma = r.require_f64("channels", "gamma")?;
                let p = r.require_f64("channels", "p")?;
                let q = r.require_f64("channels", "q")?;
                Scenario::Adpf {
                    gamma: unit_interval(&r, "channels", "gamma", gamma)?,
                    p: unit_interval(&r, "channels", "p", p)?,
                    q: unit_interval(&r, "channels", "q", q)?,
                }
            }
            "custom" => {
                let a = channel_spec(&mut r, "a")?;
                let b = channel_spec(&mut r, "b")?;
                let energies = match r.get("channels", "energies") {
                    Some(v) => r.float_list("channels", "energies", &v)?,
                    None => vec![0.0, 1.0],
                };
                Scenario::Custom { a, b, energies }
            }
            other => {
                return Err(r.key_err("scenario", "name", format!("unknown scenario `{other}`")))
            }
        };

        let state_kind = r
            .get("state", "kind")
            .unwrap_or_else(|| "max_coherent".to_string());
        let state = match state_kind.as_str() {
            "max_coherent" => StateSpec::MaxCoherent {
                delta_rho: r.optional_f64("state", "delta_rho", 0.0)?,
            },
            "populations" => {
                let delta_rho = r.optional_f64("state", "delta_rho", 0.0)?;
                let re = r.optional_f64("state", "coherence_re", 0.0)?;
                let im = r.optional_f64("state", "coherence_im", 0.0)?;
                StateSpec::Populations {
                    delta_rho,
                    coherence: C64::new(re, im),
                }
            }
            "thermal" => StateSpec::Thermal {
                beta_in: r.require_f64("state", "beta_in")?,
            },
            "matrix" => {
                let raw = r.require("state", "matrix")?;
                StateSpec::Matrix {
                    entries: r.float_list("state", "matrix", &raw)?,
                }
            }
            "random_pure" => StateSpec::RandomPure,
            "random_mixed" => StateSpec::RandomMixed,
            other => return Err(r.key_err("state", "kind", format!("unknown state kind `{other}`"))),
        };

        let control_phi = r.optional_f64("control", "phi", 0.5)?;
        let control_alpha = r.optional_f64("control", "alpha", 0.0)?;
        unit_interval(&r, "control", "phi", control_phi)?;
        if !(0.0..std::f64::consts::TAU).contains(&control_alpha) {
            return Err(r.key_err("control", "alpha", "must be in [0, 2π)"));
        }

        let mode = r
            .get("measurement", "mode")
            .unwrap_or_else(|| "fixed".to_string());
        let measurement = match mode.as_str() {
            "fixed" => {
                let phi_m = r.optional_f64("measurement", "phi_m", 0.5)?;
                let alpha_m = r.optional_f64("measurement", "alpha_m", 0.0)?;
                unit_interval(&r, "measurement", "phi_m", phi_m)?;
                if !(0.0..std::f64::consts::TAU).contains(&alpha_m) {
                    return Err(r.key_err("measurement", "alpha_m", "must be in [0, 2π)"));
                }
                MeasurementMode::Fixed { phi_m, alpha_m }
            }
            "optimize" => MeasurementMode::Optimize,
            other => {
                return Err(r.key_err(
                    "measurement",
                    "mode",
                    format!("unknown measurement mode `{other}` (fixed | optimize)"),
                ))
            }
        };

        let sweep = Self::sweep_axis(&mut r, "sweep")?;
        let sweep2 = Self::sweep_axis(&mut r, "sweep2")?;
        if sweep.is_none() && sweep2.is_some() {
            return Err(r.key_err("sweep2", "variable", "[sweep2] requires [sweep]"));
        }

        let out_dir = r.get("output", "dir").unwrap_or_else(|| "out".to_string());
        let seed = match r.get("run", "seed") {
            Some(v) => v
                .parse::<u64>()
                .map_err(|_| r.key_err("run", "seed", "not a non-negative integer"))?,
            None => 42,
        };

        let config = RunConfig {
            scenario,
            state,
            control_phi,
            control_alpha,
            measurement,
            sweep,
            sweep2,
            out_dir,
            seed,
        };
        config.validate_cross_keys(&r)?;
        r.finish()?;
        Ok(config)
    }

    fn sweep_axis(r: &mut Reader, section: &str) -> CliResult<Option<SweepAxis>> {
        let variable = match r.get(section, "variable") {
            None => return Ok(None),
            Some(v) if v == "none" => return Ok(None),
            Some(v) => v,
        };
        let variable = match variable.as_str() {
            "delta_rho" => SweepVar::DeltaRho,
            "beta" => SweepVar::Beta,
            "beta_in" => SweepVar::BetaIn,
            "state_index" => SweepVar::StateIndex,
            other => {
                return Err(r.key_err(section, "variable", format!("unknown sweep variable `{other}`")))
            }
        };
        let count_raw = r.require(section, "count")?;
        let count: usize = count_raw
            .parse()
            .map_err(|_| r.key_err(section, "count", "not a positive integer"))?;
        if count == 0 {
            return Err(r.key_err(section, "count", "must be ≥ 1"));
        }
        let (from, to) = if variable == SweepVar::StateIndex {
            (0.0, (count - 1) as f64)
        } else {
            (r.require_f64(section, "from")?, r.require_f64(section, "to")?)
        };
        Ok(Some(SweepAxis {
            variable,
            from,
            to,
            count,
        }))
    }

    fn validate_cross_keys(&self, r: &Reader) -> CliResult<()> {
        let dim = self.dim();
        let qubit = dim == 2;
        for axis in [self.sweep.as_ref(), self.sweep2.as_ref()].into_iter().flatten() {
            match axis.variable {
                SweepVar::DeltaRho => {
                    if !qubit {
                        return Err(r.key_err("sweep", "variable", "delta_rho sweeps need a qubit"));
                    }
                    if !matches!(
                        self.state,
                        StateSpec::MaxCoherent { .. } | StateSpec::Populations { .. }
                    ) {
                        return Err(r.key_err(
                            "sweep",
                            "variable",
                            "delta_rho sweeps need state kind max_coherent or populations",
                        ));
                    }
                }
                SweepVar::Beta => {
                    if !matches!(self.scenario, Scenario::Thermal { .. }) {
                        return Err(r.key_err("sweep", "variable", "beta sweeps need the thermal scenario"));
                    }
                }
                SweepVar::BetaIn => {
                    if !matches!(self.state, StateSpec::Thermal { .. }) {
                        return Err(r.key_err("sweep", "variable", "beta_in sweeps need state kind thermal"));
                    }
                }
                SweepVar::StateIndex => {
                    if !matches!(self.state, StateSpec::RandomPure | StateSpec::RandomMixed) {
                        return Err(r.key_err(
                            "sweep",
                            "variable",
                            "state_index sweeps need state kind random_pure or random_mixed",
                        ));
                    }
                }
            }
        }
        if let StateSpec::Matrix { ref entries } = self.state {
            if entries.len() != 2 * dim * dim {
                return Err(r.key_err(
                    "state",
                    "matrix",
                    format!("expected {} floats (re, im pairs) for d = {dim}", 2 * dim * dim),
                ));
            }
        }
        Ok(())
    }

    /// System dimension of the scenario.
    pub fn dim(&self) -> usize {
        match &self.scenario {
            Scenario::DepolDdim { d, .. } => *d,
            Scenario::Custom { energies, .. } => energies.len(),
            _ => 2,
        }
    }

    /// Canonical flat text; parsing it reproduces the configuration.
    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        let mut line = |s: &str| {
            out.push_str(s);
            out.push('\n');
        };
        line("[scenario]");
        line(&format!("name = {}", self.scenario.name()));
        line("");
        line("[channels]");
        match &self.scenario {
            Scenario::DepolQubit => {}
            Scenario::DepolDdim { d, energies } => {
                line(&format!("d = {d}"));
                let joined: Vec<String> = energies.iter().map(|e| format!("{e}")).collect();
                line(&format!("energies = {}", joined.join(" ")));
            }
            Scenario::Thermal { beta } => line(&format!("beta = {beta}")),
            Scenario::Adpf { gamma, p, q } => {
                line(&format!("gamma = {gamma}"));
                line(&format!("p = {p}"));
                line(&format!("q = {q}"));
            }
            Scenario::Custom { a, b, energies } => {
                for (prefix, spec) in [("a", a), ("b", b)] {
                    match spec {
                        ChannelSpec::Identity => line(&format!("{prefix}_kind = identity")),
                        ChannelSpec::Depolarizing => line(&format!("{prefix}_kind = depolarizing")),
                        ChannelSpec::Thermalizing { beta } => {
                            line(&format!("{prefix}_kind = thermalizing"));
                            line(&format!("{prefix}_beta = {beta}"));
                        }
                        ChannelSpec::Gad { p, gamma } => {
                            line(&format!("{prefix}_kind = gad"));
                            line(&format!("{prefix}_p = {p}"));
                            line(&format!("{prefix}_gamma = {gamma}"));
                        }
                        ChannelSpec::PhaseFlip { q } => {
                            line(&format!("{prefix}_kind = phase_flip"));
                            line(&format!("{prefix}_q = {q}"));
                        }
                    }
                }
                let joined: Vec<String> = energies.iter().map(|e| format!("{e}")).collect();
                line(&format!("energies = {}", joined.join(" ")));
            }
        }
        line("");
        line("[state]");
        line(&format!("kind = {}", self.state.kind()));
        match &self.state {
            StateSpec::MaxCoherent { delta_rho } => line(&format!("delta_rho = {delta_rho}")),
            StateSpec::Populations {
                delta_rho,
                coherence,
            } => {
                line(&format!("delta_rho = {delta_rho}"));
                line(&format!("coherence_re = {}", coherence.re));
                line(&format!("coherence_im = {}", coherence.im));
            }
            StateSpec::Thermal { beta_in } => line(&format!("beta_in = {beta_in}")),
            StateSpec::Matrix { entries } => {
                let mut s = String::from("matrix =");
                for e in entries {
                    let _ = write!(s, " {e}");
                }
                line(&s);
            }
            StateSpec::RandomPure | StateSpec::RandomMixed => {}
        }
        line("");
        line("[control]");
        line(&format!("phi = {}", self.control_phi));
        line(&format!("alpha = {}", self.control_alpha));
        line("");
        line("[measurement]");
        match self.measurement {
            MeasurementMode::Fixed { phi_m, alpha_m } => {
                line("mode = fixed");
                line(&format!("phi_m = {phi_m}"));
                line(&format!("alpha_m = {alpha_m}"));
            }
            MeasurementMode::Optimize => line("mode = optimize"),
        }
        for (section, axis) in [("sweep", self.sweep.as_ref()), ("sweep2", self.sweep2.as_ref())] {
            if let Some(axis) = axis {
                line("");
                line(&format!("[{section}]"));
                line(&format!("variable = {}", axis.variable.name()));
                if axis.variable != SweepVar::StateIndex {
                    line(&format!("from = {}", axis.from));
                    line(&format!("to = {}", axis.to));
                }
                line(&format!("count = {}", axis.count));
            }
        }
        line("");
        line("[output]");
        line(&format!("dir = {}", self.out_dir));
        line("");
        line("[run]");
        line(&format!("seed = {}", self.seed));
        out
    }

    /// Flat `section.key → value` map for the JSON envelope.
    pub fn echo_map(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut section = String::new();
        for raw in self.to_ini().lines() {
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                section = name.trim_end_matches(']').to_string();
                continue;
            }
            if let Some((key, value)) = trimmed.split_once('=') {
                map.insert(
                    format!("{section}.{}", key.trim()),
                    value.trim().to_string(),
                );
            }
        }
        map
    }
}
