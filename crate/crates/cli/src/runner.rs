//! Sweep execution: build the scenario per grid point, run the pipeline,
//! and emit `results.csv` + `results.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use ergoswitch_core::channels::{
    depolarizing, gad, gibbs, phase_flip, thermalizing, Hamiltonian, KrausChannel,
};
use ergoswitch_core::ergotropy::{daemonic_ergotropy, optimize_measurement, DaemonicReport};
use ergoswitch_core::matcore::{ComplexMatrix, DensityMatrix};
use ergoswitch_core::sampling;
use ergoswitch_core::scenarios;
use ergoswitch_core::switch::{conditional_states, ControlSpec, MeasureSpec};

use crate::config::{
    ChannelSpec, MeasurementMode, RunConfig, Scenario, StateSpec, SweepVar,
};
use crate::{fmt_g17, CliError, CliResult};

/// Residuals above this gate fail the run with exit code 3.
pub const RESIDUAL_GATE: f64 = 1e-8;

/// One computed grid point.
#[derive(Debug, Clone)]
pub struct PointRecord {
    /// Sweep coordinates, outer axis first.
    pub axes: Vec<(&'static str, f64)>,
    pub p_plus: f64,
    pub p_minus: f64,
    pub report: DaemonicReport,
    /// |oracle − pipeline| where a closed form applies, NaN otherwise.
    pub residual_oracle: f64,
}

/// Everything a run produces, before it is written out.
pub struct RunOutput {
    pub records: Vec<PointRecord>,
    pub csv: String,
    pub envelope: Value,
    /// Largest non-NaN oracle residual, if any oracle applied.
    pub max_residual: Option<f64>,
}

/// Values a sweep variable can override at one grid point.
#[derive(Debug, Clone, Copy, Default)]
struct Overrides {
    delta_rho: Option<f64>,
    beta: Option<f64>,
    beta_in: Option<f64>,
    state_index: Option<usize>,
}

fn apply_override(overrides: &mut Overrides, var: SweepVar, value: f64) {
    match var {
        SweepVar::DeltaRho => overrides.delta_rho = Some(value),
        SweepVar::Beta => overrides.beta = Some(value),
        SweepVar::BetaIn => overrides.beta_in = Some(value),
        SweepVar::StateIndex => overrides.state_index = Some(value as usize),
    }
}

fn build_channel(spec: &ChannelSpec, h: &Hamiltonian) -> CliResult<KrausChannel> {
    Ok(match spec {
        ChannelSpec::Identity => KrausChannel::identity(h.dim()),
        ChannelSpec::Depolarizing => depolarizing(h.dim())?,
        ChannelSpec::Thermalizing { beta } => thermalizing(h, *beta)?,
        ChannelSpec::Gad { p, gamma } => gad(*p, *gamma)?,
        ChannelSpec::PhaseFlip { q } => phase_flip(*q)?,
    })
}

fn build_pair(
    config: &RunConfig,
    overrides: &Overrides,
) -> CliResult<(KrausChannel, KrausChannel, Hamiltonian)> {
    Ok(match &config.scenario {
        Scenario::DepolQubit => {
            let h = Hamiltonian::qubit();
            (depolarizing(2)?, depolarizing(2)?, h)
        }
        Scenario::DepolDdim { d, energies } => {
            let h = Hamiltonian::from_energies(energies.clone())?;
            (depolarizing(*d)?, depolarizing(*d)?, h)
        }
        Scenario::Thermal { beta } => {
            let beta = overrides.beta.unwrap_or(*beta);
            let h = Hamiltonian::qubit();
            let t = thermalizing(&h, beta)?;
            (t.clone(), t, h)
        }
        Scenario::Adpf { gamma, p, q } => {
            let h = Hamiltonian::qubit();
            (gad(*p, *gamma)?, phase_flip(*q)?, h)
        }
        Scenario::Custom { a, b, energies } => {
            let h = Hamiltonian::from_energies(energies.clone())?;
            (build_channel(a, &h)?, build_channel(b, &h)?, h)
        }
    })
}

fn build_state(
    config: &RunConfig,
    h: &Hamiltonian,
    overrides: &Overrides,
) -> CliResult<DensityMatrix> {
    Ok(match &config.state {
        StateSpec::MaxCoherent { delta_rho } => {
            let dr = overrides.delta_rho.unwrap_or(*delta_rho);
            DensityMatrix::qubit_max_coherent(dr)?
        }
        StateSpec::Populations {
            delta_rho,
            coherence,
        } => {
            let dr = overrides.delta_rho.unwrap_or(*delta_rho);
            DensityMatrix::qubit((1.0 + dr) / 2.0, *coherence)?
        }
        StateSpec::Thermal { beta_in } => {
            let beta_in = overrides.beta_in.unwrap_or(*beta_in);
            gibbs(h, beta_in)
        }
        StateSpec::Matrix { entries } => {
            let d = h.dim();
            let complex: Vec<num_complex::Complex64> = entries
                .chunks(2)
                .map(|pair| num_complex::Complex64::new(pair[0], pair[1]))
                .collect();
            DensityMatrix::new(ComplexMatrix::from_entries(d, complex)?)?
        }
        StateSpec::RandomPure | StateSpec::RandomMixed => {
            let index = overrides.state_index.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(index as u64 + 1);
            if matches!(config.state, StateSpec::RandomPure) {
                sampling::random_pure(&mut rng, h.dim())
            } else {
                sampling::random_density(&mut rng, h.dim())
            }
        }
    })
}

fn is_balanced_control(config: &RunConfig) -> bool {
    config.control_phi == 0.5 && config.control_alpha == 0.0
}

fn oracle_residual(
    config: &RunConfig,
    rho: &DensityMatrix,
    h: &Hamiltonian,
    overrides: &Overrides,
    report: &DaemonicReport,
) -> CliResult<f64> {
    if !is_balanced_control(config) {
        return Ok(f64::NAN);
    }
    let fixed_balanced = matches!(
        config.measurement,
        MeasurementMode::Fixed { phi_m, alpha_m } if phi_m == 0.5 && alpha_m == 0.0
    );
    let optimize = matches!(config.measurement, MeasurementMode::Optimize);
    if !fixed_balanced && !optimize {
        return Ok(f64::NAN);
    }
    Ok(match &config.scenario {
        Scenario::DepolQubit => {
            let oracle = scenarios::depol_qubit_oracle(rho)?;
            if fixed_balanced {
                (report.wd - oracle.wd)
                    .abs()
                    .max((report.wd_incoherent - oracle.wd_incoherent).abs())
                    .max((report.wd_coherent - oracle.wd_coherent).abs())
            } else {
                (report.wd - oracle.wd).abs()
            }
        }
        Scenario::DepolDdim { .. } => {
            let oracle = scenarios::depol_ddim_oracle(rho, h)?;
            if fixed_balanced {
                (report.wd - oracle.wd)
                    .abs()
                    .max((report.wd_incoherent - oracle.wd_incoherent).abs())
            } else {
                (report.wd - oracle.wd).abs()
            }
        }
        Scenario::Thermal { beta } => {
            let beta = overrides.beta.unwrap_or(*beta);
            let mut residual = f64::NAN;
            if fixed_balanced {
                let oracle = scenarios::thermal_oracle(beta, rho)?;
                residual = (report.wd_incoherent - oracle.wd_incoherent).abs();
            }
            if let StateSpec::Thermal { beta_in } = &config.state {
                let beta_in = overrides.beta_in.unwrap_or(*beta_in);
                let closed = scenarios::thermal_input_gain(beta, beta_in);
                let diff = (report.gain - closed).abs();
                residual = if residual.is_nan() {
                    diff
                } else {
                    residual.max(diff)
                };
            }
            residual
        }
        Scenario::Adpf { gamma, p, q } => {
            if fixed_balanced {
                let params = scenarios::AdpfParams::new(*gamma, *p, *q)?;
                let oracle = scenarios::adpf_oracle(&params, rho)?;
                (report.gain_incoherent - oracle.gain_incoherent).abs()
            } else {
                f64::NAN
            }
        }
        Scenario::Custom { .. } => f64::NAN,
    })
}

fn compute_point(config: &RunConfig, axes: &[(&'static str, f64)]) -> CliResult<PointRecord> {
    let mut overrides = Overrides::default();
    let mut axis_vars: Vec<SweepVar> = Vec::new();
    if let Some(axis) = &config.sweep {
        axis_vars.push(axis.variable);
    }
    if let Some(axis) = &config.sweep2 {
        axis_vars.push(axis.variable);
    }
    for (var, (_, value)) in axis_vars.iter().zip(axes) {
        apply_override(&mut overrides, *var, *value);
    }

    let (a, b, h) = build_pair(config, &overrides)?;
    let rho = build_state(config, &h, &overrides)?;
    let control = ControlSpec::new(config.control_phi, config.control_alpha)?;

    let (measure, report) = match config.measurement {
        MeasurementMode::Fixed { phi_m, alpha_m } => {
            let m = MeasureSpec::new(phi_m, alpha_m)?;
            (m, daemonic_ergotropy(&a, &b, &rho, &control, &m, &h)?)
        }
        MeasurementMode::Optimize => optimize_measurement(&a, &b, &rho, &control, &h)?,
    };
    let pair = conditional_states(&a, &b, &rho, &control, &measure)?;
    let residual = oracle_residual(config, &rho, &h, &overrides, &report)?;

    Ok(PointRecord {
        axes: axes.to_vec(),
        p_plus: pair.p_plus,
        p_minus: pair.p_minus,
        report,
        residual_oracle: residual,
    })
}

/// Axis values, with the damping/phase-flip special points (window edges and
/// the trivial imbalance 1 − 2p) injected into imbalance sweeps: the sharpest
/// claims live exactly there.
fn axis_values(config: &RunConfig, axis: &crate::config::SweepAxis) -> Vec<f64> {
    let mut values = axis.values();
    if axis.variable == SweepVar::DeltaRho {
        if let Scenario::Adpf { gamma, p, q } = config.scenario {
            if let Ok(params) = scenarios::AdpfParams::new(gamma, p, q) {
                let window = scenarios::adpf_window(&params);
                let lo = axis.from.min(axis.to);
                let hi = axis.from.max(axis.to);
                for special in [-window.x_minus, window.x_plus, 1.0 - 2.0 * p] {
                    if (lo..=hi).contains(&special) {
                        values.push(special);
                    }
                }
                values.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
                values.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
            }
        }
    }
    values
}

fn grid(config: &RunConfig) -> Vec<Vec<(&'static str, f64)>> {
    match (&config.sweep, &config.sweep2) {
        (None, _) => vec![vec![]],
        (Some(axis), None) => axis_values(config, axis)
            .into_iter()
            .map(|v| vec![(axis.variable.name(), v)])
            .collect(),
        (Some(axis1), Some(axis2)) => {
            let inner = axis_values(config, axis2);
            axis_values(config, axis1)
                .into_iter()
                .flat_map(|v1| {
                    inner.iter().map(move |&v2| {
                        vec![(axis1.variable.name(), v1), (axis2.variable.name(), v2)]
                    })
                })
                .collect()
        }
    }
}

/// CSV header for this configuration.
fn csv_header(config: &RunConfig) -> String {
    let mut cols: Vec<&str> = Vec::new();
    if let Some(axis) = &config.sweep {
        cols.push(axis.variable.name());
    }
    if let Some(axis) = &config.sweep2 {
        cols.push(axis.variable.name());
    }
    cols.extend([
        "p_plus",
        "p_minus",
        "W_class",
        "WD",
        "dW",
        "dW_i",
        "dW_c",
        "residual_oracle",
        "phi_opt",
        "alpha_opt",
    ]);
    cols.join(",")
}

fn csv_row(record: &PointRecord) -> String {
    let mut fields: Vec<String> = record.axes.iter().map(|(_, v)| fmt_g17(*v)).collect();
    let r = &record.report;
    for value in [
        record.p_plus,
        record.p_minus,
        r.w_class,
        r.wd,
        r.gain,
        r.gain_incoherent,
        r.gain_coherent,
        record.residual_oracle,
        r.measure.phi_m,
        r.measure.alpha_m,
    ] {
        fields.push(fmt_g17(value));
    }
    fields.join(",")
}

fn record_json(record: &PointRecord) -> Value {
    let mut map = Map::new();
    for (name, value) in &record.axes {
        map.insert((*name).to_string(), json!(value));
    }
    let r = &record.report;
    map.insert("p_plus".into(), json!(record.p_plus));
    map.insert("p_minus".into(), json!(record.p_minus));
    map.insert("w_class".into(), json!(r.w_class));
    map.insert("w_class_incoherent".into(), json!(r.w_class_incoherent));
    map.insert("w_class_coherent".into(), json!(r.w_class_coherent));
    map.insert("wd".into(), json!(r.wd));
    map.insert("wd_incoherent".into(), json!(r.wd_incoherent));
    map.insert("wd_coherent".into(), json!(r.wd_coherent));
    map.insert("gain".into(), json!(r.gain));
    map.insert("gain_incoherent".into(), json!(r.gain_incoherent));
    map.insert("gain_coherent".into(), json!(r.gain_coherent));
    map.insert(
        "residual_oracle".into(),
        if record.residual_oracle.is_nan() {
            Value::Null
        } else {
            json!(record.residual_oracle)
        },
    );
    map.insert("phi_opt".into(), json!(r.measure.phi_m));
    map.insert("alpha_opt".into(), json!(r.measure.alpha_m));
    Value::Object(map)
}

/// Run the configured sweep. Grid points evaluate in parallel (bounded by
/// the rayon pool); records stay ordered by the sweep coordinates.
pub fn execute(config: &RunConfig) -> CliResult<RunOutput> {
    let points = grid(config);
    let records: Vec<PointRecord> = points
        .par_iter()
        .map(|axes| compute_point(config, axes))
        .collect::<CliResult<Vec<_>>>()?;

    // Ledger closure is re-checked at emission.
    for record in &records {
        let r = &record.report;
        if (r.gain - r.gain_incoherent - r.gain_coherent).abs() > 1e-10 {
            return Err(CliError::Key {
                section: "emit".into(),
                key: "ledger".into(),
                message: format!(
                    "dW ledger violated at {:?}: {} vs {} + {}",
                    record.axes, r.gain, r.gain_incoherent, r.gain_coherent
                ),
            });
        }
    }

    let mut csv = String::new();
    csv.push_str(&csv_header(config));
    csv.push('\n');
    for record in &records {
        csv.push_str(&csv_row(record));
        csv.push('\n');
    }

    let residuals: Vec<f64> = records
        .iter()
        .map(|r| r.residual_oracle)
        .filter(|r| !r.is_nan())
        .collect();
    let max_residual = residuals.into_iter().fold(None, |acc: Option<f64>, r| {
        Some(acc.map_or(r, |a| a.max(r)))
    });

    let envelope = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config": config.echo_map().into_iter().collect::<BTreeMap<String, String>>(),
        "records": records.iter().map(record_json).collect::<Vec<_>>(),
        "max_oracle_residual": max_residual,
    });

    Ok(RunOutput {
        records,
        csv,
        envelope,
        max_residual,
    })
}

/// Execute and write `results.csv` and `results.json` under `out_dir`.
/// Returns the two paths and the`max_residual` gate value.
pub fn run_to_files(config: &RunConfig, out_dir: &Path) -> CliResult<(PathBuf, PathBuf, Option<f64>)> {
    let output = execute(config)?;
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("results.csv");
    let json_path = out_dir.join("results.json");
    fs::write(&csv_path, output.csv.as_bytes())?;
    let mut json_text = serde_json::to_string_pretty(&output.envelope).expect("serializable");
    json_text.push('\n');
    fs::write(&json_path, json_text.as_bytes())?;
    Ok((csv_path, json_path, output.max_residual))
}
