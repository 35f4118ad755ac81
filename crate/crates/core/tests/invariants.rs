//! Property-style invariants over randomized inputs: spectral round-trips,
//! channel structure preservation, switch consistency identities, and the
//! work-ledger laws.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ergoswitch_core::channels::{
    apply, apply_raw, compose, depolarizing, gad, phase_flip, thermalizing, validate_cptp,
    Hamiltonian, KrausChannel,
};
use ergoswitch_core::ergotropy::{
    daemonic_ergotropy, is_passive, split_ergotropy, zero_gain_check,
};
use ergoswitch_core::matcore::{
    hermitian_eig, partial_trace_q, project_q, tensor_with_qubit, ComplexMatrix, DensityMatrix,
};
use ergoswitch_core::sampling;
use ergoswitch_core::switch::{
    branch_probabilities_from_chi, chi_nc, classical_output, conditional_states, cross_map,
    switch_apply, switch_kraus, ControlSpec, MeasureSpec, NcSign,
};
use ergoswitch_core::tol;

fn hermitian_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im)),
        dim * dim,
    )
    .prop_map(move |entries| {
        let g = ComplexMatrix::from_entries(dim, entries).unwrap();
        g.add(&g.adjoint()).scale_re(0.5)
    })
}

fn density_strategy(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    proptest::collection::vec(
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im)),
        dim * dim,
    )
    .prop_map(move |entries| {
        let g = ComplexMatrix::from_entries(dim, entries).unwrap();
        let psd = g.mul(&g.adjoint());
        let tr = psd.trace().re;
        DensityMatrix::new(psd.scale_re(1.0 / tr)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs_random_hermitian(dim in 2usize..=8, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = g.add(&g.adjoint()).scale_re(0.5);
        let dec = hermitian_eig(&m).unwrap();
        prop_assert!(dec.reconstruct().sub(&m).frobenius_norm() < tol::RECONSTRUCTION);
        prop_assert!(dec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_trace_inverts_tensor_product(s in hermitian_strategy(3), q in hermitian_strategy(2)) {
        let traced = partial_trace_q(&tensor_with_qubit(&s, &q)).unwrap();
        let expect = s.scale(q.trace());
        prop_assert!(traced.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn projection_probabilities_complete(rho in density_strategy(4), phi_m in 0.0..1.0f64, alpha_m in 0.0..std::f64::consts::TAU) {
        let q = ComplexMatrix::from_diagonal(&[0.6, 0.4]);
        let joint = tensor_with_qubit(rho.matrix(), &q);
        let m = MeasureSpec::new(phi_m, alpha_m).unwrap();
        let (pp, _) = project_q(&joint, &m.ket_plus()).unwrap();
        let (pm, _) = project_q(&joint, &m.ket_minus()).unwrap();
        prop_assert!((pp + pm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn channel_application_preserves_state_structure(
        rho in density_strategy(2),
        p in 0.0..1.0f64,
        gamma in 0.0..1.0f64,
        q in 0.0..1.0f64,
        beta in 0.0..3.0f64,
    ) {
        let h = Hamiltonian::qubit();
        for chan in [
            gad(p, gamma).unwrap(),
            phase_flip(q).unwrap(),
            thermalizing(&h, beta).unwrap(),
            depolarizing(2).unwrap(),
        ] {
            prop_assert!(validate_cptp(&chan).ok);
            let out = apply(&chan, &rho).unwrap();
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(out.matrix().hermiticity_deviation() < 1e-12);
            let eig = hermitian_eig(out.matrix()).unwrap();
            prop_assert!(eig.eigenvalues.iter().all(|&v| v >= -1e-10));
        }
    }

    #[test]
    fn switch_identities_hold_for_zoo_pairs(
        seed in any::<u64>(),
        phi in 0.0..1.0f64,
        alpha in 0.0..std::f64::consts::TAU,
        phi_m in 0.0..1.0f64,
        alpha_m in 0.0..std::f64::consts::TAU,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let h = Hamiltonian::qubit();
        let (a, b) = sampling::random_zoo_pair(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = ControlSpec::new(phi, alpha).unwrap();
        let measure = MeasureSpec::new(phi_m, alpha_m).unwrap();

        // Supermap completeness.
        let kraus = switch_kraus(&a, &b).unwrap();
        let mut sum = ComplexMatrix::zeros(4);
        for k in &kraus {
            sum = sum.add(&k.adjoint().mul(k));
        }
        prop_assert!(sum.sub(&ComplexMatrix::identity(4)).frobenius_norm() < tol::COMPLETENESS);

        // Block identity against the Kraus sum.
        let joint = switch_apply(&a, &b, &rho, &control).unwrap();
        let ket = control.ket();
        let rho_q = ComplexMatrix::outer(&ket, &ket);
        let via_kraus = ergoswitch_core::switch::switch_apply_kraus(&a, &b, &rho, &rho_q).unwrap();
        prop_assert!(joint.max_abs_diff(&via_kraus) < 1e-10);

        // Partial trace reproduces the classical output.
        let traced = partial_trace_q(&joint).unwrap();
        let class = classical_output(&a, &b, &rho, phi).unwrap();
        prop_assert!(traced.max_abs_diff(class.matrix()) < 1e-10);

        // Probabilities complete and match the printed formula.
        let pair = conditional_states(&a, &b, &rho, &control, &measure).unwrap();
        prop_assert!((pair.p_plus + pair.p_minus - 1.0).abs() < 1e-10);
        let chi = cross_map(&a, &b, &rho).unwrap();
        let (pp, pm) = branch_probabilities_from_chi(&chi, &control, &measure);
        prop_assert!((pp - pair.p_plus).abs() < 1e-10);
        prop_assert!((pm - pair.p_minus).abs() < 1e-10);

        // Cross-map decomposition, both signs simultaneously.
        let ab = apply_raw(&compose(&a, &b).unwrap(), rho.matrix());
        let nc_minus = chi_nc(&a, &b, &rho, NcSign::Minus).unwrap();
        let nc_plus = chi_nc(&a, &b, &rho, NcSign::Plus).unwrap();
        prop_assert!(chi.max_abs_diff(&ab.add(&nc_minus)) < 1e-10);
        prop_assert!(chi.max_abs_diff(&ab.scale_re(-1.0).add(&nc_plus)) < 1e-10);
    }

    #[test]
    fn work_ledger_closes_and_gains_are_signed(
        seed in any::<u64>(),
        phi in 0.0..1.0f64,
        alpha in 0.0..std::f64::consts::TAU,
        phi_m in 0.0..1.0f64,
        alpha_m in 0.0..std::f64::consts::TAU,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let h = Hamiltonian::qubit();
        let (a, b) = sampling::random_zoo_pair(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = ControlSpec::new(phi, alpha).unwrap();
        let measure = MeasureSpec::new(phi_m, alpha_m).unwrap();
        let rep = daemonic_ergotropy(&a, &b, &rho, &control, &measure, &h).unwrap();

        prop_assert!((rep.wd - rep.wd_incoherent - rep.wd_coherent).abs() < 1e-10);
        prop_assert!((rep.gain - (rep.wd - rep.w_class)).abs() < 1e-12);
        prop_assert!(rep.gain >= -1e-10);
        prop_assert!(rep.gain_incoherent >= -1e-10);
    }

    #[test]
    fn ergotropy_report_laws(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let rho = sampling::random_density(&mut rng, dim);
        let energies: Vec<f64> = (0..dim).map(|k| k as f64).collect();
        let h = Hamiltonian::from_energies(energies).unwrap();
        let rep = split_ergotropy(&rho, &h).unwrap();
        prop_assert!((rep.total - rep.incoherent - rep.coherent).abs() < 1e-10);
        prop_assert!(rep.total >= -1e-10);
        prop_assert!(rep.incoherent >= -1e-10);
        prop_assert!(rep.coherent >= -1e-10);
        prop_assert!(is_passive(&rep.passive_state, &h, tol::PASSIVITY).unwrap());
        // W = 0 iff passive.
        let passive = is_passive(&rho, &h, tol::PASSIVITY).unwrap();
        if passive {
            prop_assert!(rep.total.abs() < 1e-8);
        } else {
            prop_assert!(rep.total > 0.0);
        }
    }
}

#[test]
fn ergotropy_invariant_under_energy_basis_relabeling() {
    // Conjugating both the state and the Hamiltonian by the same permutation
    // leaves the ergotropy untouched: the ascending-ε pairing is preserved.
    let mut rng = StdRng::seed_from_u64(99);
    let energies = vec![0.0, 0.7, 1.9];
    let h = Hamiltonian::from_energies(energies.clone()).unwrap();
    // permutation (2, 0, 1) as a unitary
    let perm = [2usize, 0, 1];
    let mut p = ComplexMatrix::zeros(3);
    for (from, &to) in perm.iter().enumerate() {
        p.set(to, from, C64::new(1.0, 0.0));
    }
    let h_perm = Hamiltonian::from_matrix(&p.mul(&h.matrix()).mul(&p.adjoint())).unwrap();
    for _ in 0..20 {
        let rho = sampling::random_density(&mut rng, 3);
        let rho_perm =
            DensityMatrix::new(p.mul(rho.matrix()).mul(&p.adjoint())).unwrap();
        let w = split_ergotropy(&rho, &h).unwrap();
        let w_perm = split_ergotropy(&rho_perm, &h_perm).unwrap();
        assert!((w.total - w_perm.total).abs() < 1e-10);
        assert!((w.incoherent - w_perm.incoherent).abs() < 1e-10);
    }
}

#[test]
fn kraus_commuting_short_circuit() {
    // A_iB_j = B_jA_i for all i,j forces both conditional states onto the
    // consecutive-order output, for any control and measurement.
    let mut rng = StdRng::seed_from_u64(101);
    let h = Hamiltonian::qubit();
    let id = KrausChannel::identity(2);
    for _ in 0..20 {
        let other = sampling::random_zoo_channel(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = sampling::random_control(&mut rng);
        let measure = sampling::random_measure(&mut rng);
        let ab = apply_raw(&compose(&id, &other).unwrap(), rho.matrix());
        let pair = conditional_states(&id, &other, &rho, &control, &measure).unwrap();
        for cond in [&pair.rho_plus, &pair.rho_minus] {
            if let Some(state) = cond.state() {
                assert!(state.matrix().max_abs_diff(&ab) < 1e-10);
            }
        }
        let rep = daemonic_ergotropy(&id, &other, &rho, &control, &measure, &h).unwrap();
        assert!(rep.gain.abs() < 1e-10);
    }
}

#[test]
fn gain_nonnegativity_up_to_dimension_four() {
    // 1000 seeded trials over d ∈ {2, 3, 4} with zoo channels: the daemonic
    // gain and its incoherent part never go negative.
    let mut rng = StdRng::seed_from_u64(107);
    for trial in 0..1000 {
        let dim = 2 + trial % 3;
        let energies: Vec<f64> = (0..dim).map(|k| k as f64).collect();
        let h = Hamiltonian::from_energies(energies).unwrap();
        let (a, b) = if dim == 2 {
            sampling::random_zoo_pair(&mut rng, &h)
        } else {
            (
                sampling::random_zoo_channel_ddim(&mut rng, &h),
                sampling::random_zoo_channel_ddim(&mut rng, &h),
            )
        };
        let rho = sampling::random_density(&mut rng, dim);
        let control = sampling::random_control(&mut rng);
        let measure = sampling::random_measure(&mut rng);
        let rep = daemonic_ergotropy(&a, &b, &rho, &control, &measure, &h).unwrap();
        assert!(rep.gain >= -1e-10, "d={dim}: gain {}", rep.gain);
        assert!(
            rep.gain_incoherent >= -1e-10,
            "d={dim}: incoherent gain {}",
            rep.gain_incoherent
        );
    }
}

#[test]
fn closed_form_route_agrees_on_thousand_draws() {
    use ergoswitch_core::ergotropy::qubit_closed_form;
    let mut rng = StdRng::seed_from_u64(109);
    let h = Hamiltonian::qubit();
    for _ in 0..1000 {
        let (a, b) = sampling::random_zoo_pair(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = sampling::random_control(&mut rng);
        let measure = sampling::random_measure(&mut rng);
        let generic = daemonic_ergotropy(&a, &b, &rho, &control, &measure, &h).unwrap();
        let closed = qubit_closed_form(&a, &b, &rho, &control, &measure).unwrap();
        for (lhs, rhs) in [
            (generic.wd, closed.wd),
            (generic.wd_incoherent, closed.wd_incoherent),
            (generic.wd_coherent, closed.wd_coherent),
            (generic.w_class, closed.w_class),
            (generic.gain, closed.gain),
            (generic.gain_incoherent, closed.gain_incoherent),
            (generic.gain_coherent, closed.gain_coherent),
        ] {
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn commutative_pairs_attain_the_optimal_incoherent_gain_formula() {
    use ergoswitch_core::ergotropy::{optimal_incoherent_gain, optimal_incoherent_measurement};
    let mut rng = StdRng::seed_from_u64(111);
    let h = Hamiltonian::qubit();
    let pairs: Vec<(KrausChannel, KrausChannel)> = vec![
        (gad(0.3, 0.7).unwrap(), phase_flip(0.2).unwrap()),
        (depolarizing(2).unwrap(), depolarizing(2).unwrap()),
        (thermalizing(&h, 0.9).unwrap(), thermalizing(&h, 0.9).unwrap()),
        (phase_flip(0.6).unwrap(), phase_flip(0.15).unwrap()),
        (gad(0.8, 0.4).unwrap(), gad(0.8, 0.4).unwrap()),
    ];
    for (a, b) in &pairs {
        assert!(ergoswitch_core::channels::maps_commute(a, b, 1e-10).unwrap());
        for _ in 0..10 {
            let rho = sampling::random_density(&mut rng, 2);
            let control = sampling::random_control(&mut rng);
            let m_star = optimal_incoherent_measurement(a, b, &rho, &control).unwrap();
            let rep = daemonic_ergotropy(a, b, &rho, &control, &m_star, &h).unwrap();
            let expect = optimal_incoherent_gain(a, b, &rho, &control).unwrap();
            assert!(
                (rep.gain_incoherent - expect).abs() < 1e-10,
                "{} vs {expect}",
                rep.gain_incoherent
            );
        }
    }
}

#[test]
fn zero_gain_predictions_are_sound() {
    // Whenever the checker predicts zero on a random instance, the measured
    // gain at that measurement vanishes.
    let mut rng = StdRng::seed_from_u64(103);
    let h = Hamiltonian::qubit();
    let mut predicted = 0usize;
    for _ in 0..300 {
        let (a, b) = sampling::random_zoo_pair(&mut rng, &h);
        let rho = sampling::random_density(&mut rng, 2);
        let control = sampling::random_control(&mut rng);
        let measure = sampling::random_measure(&mut rng);
        let check = zero_gain_check(&a, &b, &rho, &control, &measure, &h).unwrap();
        if check.predicted_zero {
            predicted += 1;
            let rep = daemonic_ergotropy(&a, &b, &rho, &control, &measure, &h).unwrap();
            assert!(
                rep.gain.abs() <= 1e-8,
                "predicted zero but gain = {} ({:?})",
                rep.gain,
                check.details
            );
        }
    }
    // The identity-containing pairs alone make this non-vacuous.
    assert!(predicted > 10, "only {predicted} zero predictions");
}
