//! Seeded verification suites over the library invariants. The report is
//! plain text, one line per check, and is byte-identical for identical
//! seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergoswitch_core::channels::{
    apply_raw, compose, depolarizing, gad, gibbs, phase_flip, thermalizing, validate_cptp,
    Hamiltonian, KrausChannel,
};
use ergoswitch_core::ergotropy::{
    daemonic_ergotropy, is_passive, qubit_closed_form, split_ergotropy,
};
use ergoswitch_core::matcore::{partial_trace_q, ComplexMatrix};
use ergoswitch_core::sampling;
use ergoswitch_core::scenarios::{
    adpf_residual, adpf_window, depol_ddim_residual, depol_qubit_residual, fig2_sweep,
    thermal_input_gain, thermal_residual, AdpfParams, SweepMeasurement,
};
use ergoswitch_core::switch::{
    chi_nc, classical_output, conditional_states, cross_map, switch_apply, switch_apply_kraus,
    switch_kraus, ControlSpec, MeasureSpec, NcSign,
};
use ergoswitch_core::tol;

use crate::CliResult;

/// One verification line.
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

pub const SUITES: [&str; 5] = ["cptp", "switch", "ergotropy", "oracles", "all"];

fn cptp_suite() -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let h = Hamiltonian::qubit();

    let mut depol_deficit = 0.0_f64;
    for d in 2..=5 {
        depol_deficit = depol_deficit.max(validate_cptp(&depolarizing(d)?).deficit_norm);
    }
    checks.push(Check {
        name: "cptp.depolarizing_d2_to_d5",
        residual: depol_deficit,
        threshold: tol::COMPLETENESS,
    });

    let mut thermal_deficit = 0.0_f64;
    for beta in [0.0, 0.5, 1.0, 5.0] {
        thermal_deficit = thermal_deficit.max(validate_cptp(&thermalizing(&h, beta)?).deficit_norm);
    }
    let h3 = Hamiltonian::from_energies(vec![0.0, 1.0, 2.0])?;
    thermal_deficit = thermal_deficit.max(validate_cptp(&thermalizing(&h3, 0.7)?).deficit_norm);
    checks.push(Check {
        name: "cptp.thermalizing_beta_grid",
        residual: thermal_deficit,
        threshold: tol::COMPLETENESS,
    });

    let mut gad_deficit = 0.0_f64;
    let mut pf_deficit = 0.0_f64;
    for &x in &[0.0, 0.3, 0.7, 1.0] {
        pf_deficit = pf_deficit.max(validate_cptp(&phase_flip(x)?).deficit_norm);
        for &y in &[0.0, 0.3, 0.7, 1.0] {
            gad_deficit = gad_deficit.max(validate_cptp(&gad(x, y)?).deficit_norm);
        }
    }
    checks.push(Check {
        name: "cptp.gad_parameter_grid",
        residual: gad_deficit,
        threshold: tol::COMPLETENESS,
    });
    checks.push(Check {
        name: "cptp.phase_flip_parameter_grid",
        residual: pf_deficit,
        threshold: tol::COMPLETENESS,
    });
    checks.push(Check {
        name: "cptp.identity",
        residual: validate_cptp(&KrausChannel::identity(2)).deficit_norm,
        threshold: tol::COMPLETENESS,
    });
    Ok(checks)
}

fn switch_suite(seed: u64) -> CliResult<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Hamiltonian::qubit();

    let mut completeness = 0.0_f64;
    let mut block_vs_kraus = 0.0_f64;
    let mut prob_sum = 0.0_f64;
    let mut trace_identity = 0.0_f64;
    let mut decomposition = 0.0_f64;
    let mut collapse = 0.0_f64;
    let mut gain_identity = 0.0_f64;

    for _ in 0..40 {
        let (a, b) = sampling::random_zoo_pair(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = sampling::random_control(&mut rng);
        let measure = sampling::random_measure(&mut rng);

        let kraus = switch_kraus(&a, &b)?;
        let mut sum = ComplexMatrix::zeros(4);
        for k in &kraus {
            sum = sum.add(&k.adjoint().mul(k));
        }
        completeness =
            completeness.max(sum.sub(&ComplexMatrix::identity(4)).frobenius_norm());

        let joint = switch_apply(&a, &b, &rho, &control)?;
        let ket = control.ket();
        let rho_q = ComplexMatrix::outer(&ket, &ket);
        block_vs_kraus = block_vs_kraus
            .max(joint.max_abs_diff(&switch_apply_kraus(&a, &b, &rho, &rho_q)?));

        let pair = conditional_states(&a, &b, &rho, &control, &measure)?;
        prob_sum = prob_sum.max((pair.p_plus + pair.p_minus - 1.0).abs());

        let class = classical_output(&a, &b, &rho, control.phi)?;
        trace_identity = trace_identity
            .max(partial_trace_q(&joint)?.sub(class.matrix()).frobenius_norm());

        let ab = apply_raw(&compose(&a, &b)?, rho.matrix());
        let chi = cross_map(&a, &b, &rho)?;
        let nc_minus = chi_nc(&a, &b, &rho, NcSign::Minus)?;
        let nc_plus = chi_nc(&a, &b, &rho, NcSign::Plus)?;
        decomposition = decomposition
            .max(chi.max_abs_diff(&ab.add(&nc_minus)))
            .max(chi.max_abs_diff(&ab.scale_re(-1.0).add(&nc_plus)));

        // p±ρ± = ρ_class/2 ± Ĝ
        let gain =
            ergoswitch_core::switch::gain_operator(&a, &b, &rho, &control, &measure)?;
        if let Some(state) = pair.rho_plus.state() {
            gain_identity = gain_identity.max(
                state
                    .matrix()
                    .scale_re(pair.p_plus)
                    .sub(&class.matrix().scale_re(0.5).add(&gain))
                    .frobenius_norm(),
            );
        }

        // identity-paired channels collapse onto the classical output
        let id = KrausChannel::identity(2);
        let id_pair = conditional_states(&id, &b, &rho, &control, &measure)?;
        let id_class = apply_raw(&compose(&id, &b)?, rho.matrix());
        for cond in [&id_pair.rho_plus, &id_pair.rho_minus] {
            if let Some(state) = cond.state() {
                collapse = collapse.max(state.matrix().max_abs_diff(&id_class));
            }
        }
    }

    Ok(vec![
        Check {
            name: "switch.supermap_completeness",
            residual: completeness,
            threshold: tol::COMPLETENESS,
        },
        Check {
            name: "switch.block_form_vs_kraus_sum",
            residual: block_vs_kraus,
            threshold: 1e-10,
        },
        Check {
            name: "switch.branch_probability_sum",
            residual: prob_sum,
            threshold: 1e-10,
        },
        Check {
            name: "switch.partial_trace_identity",
            residual: trace_identity,
            threshold: 1e-10,
        },
        Check {
            name: "switch.cross_map_decomposition",
            residual: decomposition,
            threshold: 1e-10,
        },
        Check {
            name: "switch.gain_operator_identity",
            residual: gain_identity,
            threshold: 1e-10,
        },
        Check {
            name: "switch.kraus_commuting_collapse",
            residual: collapse,
            threshold: 1e-10,
        },
    ])
}

fn ergotropy_suite(seed: u64) -> CliResult<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Hamiltonian::qubit();

    let mut ledger = 0.0_f64;
    let mut daemonic_ledger = 0.0_f64;
    let mut negative_gain = 0.0_f64;
    let mut negative_incoherent = 0.0_f64;
    let mut closed_form = 0.0_f64;
    let mut passive_failures = 0.0_f64;
    let mut gibbs_work = 0.0_f64;

    for trial in 0..200 {
        let dim = 2 + (trial % 3);
        let energies: Vec<f64> = (0..dim).map(|k| k as f64).collect();
        let hd = Hamiltonian::from_energies(energies)?;
        let rho = sampling::random_density(&mut rng, dim);
        let rep = split_ergotropy(&rho, &hd)?;
        ledger = ledger.max((rep.total - rep.incoherent - rep.coherent).abs());
        if !is_passive(&rep.passive_state, &hd, tol::PASSIVITY)? {
            passive_failures += 1.0;
        }
        gibbs_work = gibbs_work.max(
            split_ergotropy(&gibbs(&hd, rng.gen_range(0.0..3.0)), &hd)?
                .total
                .abs(),
        );
    }

    for _ in 0..200 {
        let (a, b) = sampling::random_zoo_pair(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = sampling::random_control(&mut rng);
        let measure = sampling::random_measure(&mut rng);
        let rep = daemonic_ergotropy(&a, &b, &rho, &control, &measure, &h)?;
        daemonic_ledger =
            daemonic_ledger.max((rep.gain - rep.gain_incoherent - rep.gain_coherent).abs());
        negative_gain = negative_gain.max(-rep.gain);
        negative_incoherent = negative_incoherent.max(-rep.gain_incoherent);
        let closed = qubit_closed_form(&a, &b, &rho, &control, &measure)?;
        closed_form = closed_form
            .max((rep.wd - closed.wd).abs())
            .max((rep.wd_incoherent - closed.wd_incoherent).abs())
            .max((rep.w_class - closed.w_class).abs())
            .max((rep.gain - closed.gain).abs());
    }

    Ok(vec![
        Check {
            name: "ergotropy.split_ledger_closure",
            residual: ledger,
            threshold: 1e-10,
        },
        Check {
            name: "ergotropy.daemonic_ledger_closure",
            residual: daemonic_ledger,
            threshold: 1e-10,
        },
        Check {
            name: "ergotropy.gain_nonnegativity",
            residual: negative_gain,
            threshold: 1e-10,
        },
        Check {
            name: "ergotropy.incoherent_gain_nonnegativity",
            residual: negative_incoherent,
            threshold: 1e-10,
        },
        Check {
            name: "ergotropy.closed_form_vs_eigensolver",
            residual: closed_form,
            threshold: 1e-10,
        },
        Check {
            name: "ergotropy.passive_states_pass_is_passive",
            residual: passive_failures,
            threshold: 0.5,
        },
        Check {
            name: "ergotropy.gibbs_zero_work",
            residual: gibbs_work,
            threshold: 1e-10,
        },
    ])
}

fn oracles_suite(seed: u64) -> CliResult<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Hamiltonian::qubit();

    let mut depol_qubit = 0.0_f64;
    let mut depol_pure = 0.0_f64;
    for _ in 0..100 {
        depol_qubit = depol_qubit.max(depol_qubit_residual(&sampling::random_density(&mut rng, 2))?);
    }
    for _ in 0..50 {
        let rho = sampling::random_pure(&mut rng, 2);
        let rep = daemonic_ergotropy(
            &depolarizing(2)?,
            &depolarizing(2)?,
            &rho,
            &ControlSpec::balanced(),
            &MeasureSpec::balanced(),
            &h,
        )?;
        depol_pure = depol_pure.max((rep.wd - 0.125).abs());
    }

    let mut ddim = 0.0_f64;
    for d in [3usize, 4] {
        let energies: Vec<f64> = (0..d).map(|k| k as f64).collect();
        let hd = Hamiltonian::from_energies(energies)?;
        for _ in 0..25 {
            ddim = ddim.max(depol_ddim_residual(&sampling::random_density(&mut rng, d), &hd)?);
        }
        let pure = sampling::random_pure(&mut rng, d);
        let rep = daemonic_ergotropy(
            &depolarizing(d)?,
            &depolarizing(d)?,
            &pure,
            &ControlSpec::balanced(),
            &MeasureSpec::balanced(),
            &hd,
        )?;
        let expect = (d as f64 - 1.0) / (2.0 * (d * d) as f64);
        ddim = ddim.max((rep.wd - expect).abs());
    }

    let mut thermal = 0.0_f64;
    for beta in [0.0, 0.4, 1.0, 2.0] {
        for _ in 0..15 {
            thermal = thermal.max(thermal_residual(beta, &sampling::random_density(&mut rng, 2))?);
        }
    }

    let mut thermal_input = 0.0_f64;
    for _ in 0..30 {
        let beta = rng.gen_range(0.0..1.5);
        let beta_in = rng.gen_range(0.0..3.0);
        let rho = gibbs(&h, beta_in);
        let t = thermalizing(&h, beta)?;
        let rep = daemonic_ergotropy(
            &t,
            &t,
            &rho,
            &ControlSpec::balanced(),
            &MeasureSpec::balanced(),
            &h,
        )?;
        thermal_input = thermal_input.max((rep.gain - thermal_input_gain(beta, beta_in)).abs());
    }

    let mut adpf = 0.0_f64;
    for _ in 0..60 {
        let params = AdpfParams::new(
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
        )?;
        adpf = adpf.max(adpf_residual(&params, &sampling::random_density(&mut rng, 2))?);
    }

    // Structural window check on the canonical sweep parameters.
    let params = AdpfParams::new(0.5, 1.0 / 3.0, 0.0)?;
    let window = adpf_window(&params);
    let records = fig2_sweep(&params, 101, SweepMeasurement::Balanced)?;
    let mut window_residual = 0.0_f64;
    for record in &records {
        if window.contains(record.delta_rho) {
            window_residual = window_residual.max(record.gain_incoherent.abs());
        }
        window_residual = window_residual.max(-record.gain);
    }

    Ok(vec![
        Check {
            name: "oracles.depol_qubit",
            residual: depol_qubit,
            threshold: 1e-10,
        },
        Check {
            name: "oracles.depol_qubit_pure_plateau",
            residual: depol_pure,
            threshold: 1e-10,
        },
        Check {
            name: "oracles.depol_ddim",
            residual: ddim,
            threshold: 1e-10,
        },
        Check {
            name: "oracles.thermal_piecewise",
            residual: thermal,
            threshold: 1e-10,
        },
        Check {
            name: "oracles.thermal_input_gain",
            residual: thermal_input,
            threshold: 1e-10,
        },
        Check {
            name: "oracles.adpf_incoherent_gain",
            residual: adpf,
            threshold: 1e-10,
        },
        Check {
            name: "oracles.fig2_window_structure",
            residual: window_residual,
            threshold: 1e-10,
        },
    ])
}

/// Run a verification suite and render the deterministic report.
/// Returns the report text and whether every check passed.
pub fn run_suite(suite: &str, seed: u64) -> CliResult<(String, bool)> {
    let mut checks = Vec::new();
    match suite {
        "cptp" => checks.extend(cptp_suite()?),
        "switch" => checks.extend(switch_suite(seed)?),
        "ergotropy" => checks.extend(ergotropy_suite(seed)?),
        "oracles" => checks.extend(oracles_suite(seed)?),
        "all" => {
            checks.extend(cptp_suite()?);
            checks.extend(switch_suite(seed)?);
            checks.extend(ergotropy_suite(seed)?);
            checks.extend(oracles_suite(seed)?);
        }
        other => {
            return Err(crate::CliError::Key {
                section: "verify".into(),
                key: "suite".into(),
                message: format!("unknown suite `{other}` (expected one of {SUITES:?})"),
            })
        }
    }

    let mut report = format!(
        "ergoswitch verify v{} suite={suite} seed={seed}\n",
        env!("CARGO_PKG_VERSION")
    );
    let mut failed = 0usize;
    for check in &checks {
        if !check.passed() {
            failed += 1;
        }
        report.push_str(&format!(
            "{} {} residual={:.3e} threshold={:.1e}\n",
            if check.passed() { "PASS" } else { "FAIL" },
            check.name,
            check.residual,
            check.threshold,
        ));
    }
    report.push_str(&format!(
        "SUMMARY checks={} passed={} failed={}\n",
        checks.len(),
        checks.len() - failed,
        failed
    ));
    Ok((report, failed == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_with_default_seed() {
        for suite in ["cptp", "switch", "ergotropy", "oracles"] {
            let (report, ok) = run_suite(suite, 42).unwrap();
            assert!(ok, "suite {suite} failed:\n{report}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let (a, _) = run_suite("all", 42).unwrap();
        let (b, _) = run_suite("all", 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 1).is_err());
    }
}
