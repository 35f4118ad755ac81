//! Ergotropy, passive states, and daemonic work extraction.
//!
//! Ergotropy is the maximal work extractable from a state via cyclic unitary
//! driving: W = Tr\[Hρ\] − Σ_k ε_k r_k, with the eigenvalues r_k of ρ sorted
//! descending against the energies ε_k sorted ascending. It splits into an
//! incoherent part (ergotropy of the state dephased in the energy eigenbasis)
//! and a coherence-consuming remainder.
//!
//! Measuring the switch's control qubit and extracting work from the
//! conditional states yields the daemonic ergotropy; its excess over the
//! classical (control-discarded) ergotropy is the daemonic gain.

use serde::Serialize;

use crate::channels::{apply_raw, compose, Hamiltonian, KrausChannel};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, DensityMatrix};
use crate::switch::{
    assemble_joint, conditional_states_of_joint, cross_map, gain_operator_from_parts,
    ControlSpec, MeasureSpec,
};
use crate::tol;

/// Work content of a single state: total ergotropy, its incoherent/coherent
/// split (W = W_i + W_c), and the passive state left behind.
#[derive(Debug, Clone)]
pub struct ErgotropyReport {
    /// W, in units of ε₂ for the qubit convention.
    pub total: f64,
    /// W_i: extractable without consuming coherence.
    pub incoherent: f64,
    /// W_c = W − W_i.
    pub coherent: f64,
    /// Σ_k r_k |ε_k⟩⟨ε_k|.
    pub passive_state: DensityMatrix,
}

/// Daemonic ergotropy of a switched channel pair under a fixed control
/// measurement, with the classical baseline and the gain family
/// δW = W^D − W^class (and likewise for the i/c components).
#[derive(Debug, Clone, Serialize)]
pub struct DaemonicReport {
    pub measure: MeasureSpec,
    pub wd: f64,
    pub wd_incoherent: f64,
    pub wd_coherent: f64,
    pub w_class: f64,
    pub w_class_incoherent: f64,
    pub w_class_coherent: f64,
    pub gain: f64,
    pub gain_incoherent: f64,
    pub gain_coherent: f64,
}

fn ensure_state_matches(h: &Hamiltonian, rho: &DensityMatrix) -> Result<()> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: rho.dim(),
        });
    }
    Ok(())
}

/// Full ergotropy report for a state: W, the W_i/W_c split, and the passive
/// state. W_i is the ergotropy of the dephased state (off-diagonals in the H
/// eigenbasis zeroed); this is the unique population reshuffle that leaves
/// quantum coherence untouched, and for a qubit it reproduces the closed
/// forms W_i = max{0, δρ}, W_c = (η − √(η² − 4|ρ₁₂|²))/2 with η = √(2P−1).
pub fn split_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<ErgotropyReport> {
    ensure_state_matches(h, rho)?;
    let energies = h.energies();
    let populations = h.populations(rho.matrix());
    let energy: f64 = energies
        .iter()
        .zip(&populations)
        .map(|(e, q)| e * q)
        .sum();

    // Total: eigenvalues descending against energies ascending.
    let dec = hermitian_eig(rho.matrix())?;
    let passive_energy: f64 = energies
        .iter()
        .zip(&dec.eigenvalues)
        .map(|(e, r)| e * r)
        .sum();
    let total = energy - passive_energy;

    let mut passive = ComplexMatrix::zeros(h.dim());
    for (r, v) in dec.eigenvalues.iter().zip(h.eigenvectors()) {
        passive = passive.add(&ComplexMatrix::outer(v, v).scale_re(*r));
    }

    // Incoherent: same extraction on the dephased populations.
    let mut sorted = populations.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite populations"));
    let dephased_passive: f64 = energies.iter().zip(&sorted).map(|(e, q)| e * q).sum();
    let incoherent = energy - dephased_passive;

    Ok(ErgotropyReport {
        total,
        incoherent,
        coherent: total - incoherent,
        passive_state: DensityMatrix::new(passive)?,
    })
}

/// Maximal cyclically extractable work W(ρ) with the passive state; same
/// computation as [`split_ergotropy`], kept as the primary entry point.
pub fn ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<ErgotropyReport> {
    split_ergotropy(rho, h)
}

/// Smallest slack of the blockwise population ordering: populations are
/// sorted descending inside each degenerate energy block (reordering there is
/// a zero-work unitary), then adjacent blocks must not increase. Returns
/// +∞ when a single block covers everything.
fn blockwise_ordering_margin(populations: &[f64], energies: &[f64]) -> f64 {
    let n = populations.len();
    let mut blocks: Vec<Vec<f64>> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && energies[end] - energies[end - 1] <= tol::ENERGY_DEGENERATE {
            end += 1;
        }
        let mut block: Vec<f64> = populations[start..end].to_vec();
        block.sort_by(|a, b| b.partial_cmp(a).expect("finite populations"));
        blocks.push(block);
        start = end;
    }
    let mut margin = f64::INFINITY;
    for pair in blocks.windows(2) {
        let prev_min = *pair[0].last().expect("non-empty block");
        let next_max = pair[1][0];
        margin = margin.min(prev_min - next_max);
    }
    margin
}

/// Passivity test: ρ commutes with H within `tolerance` and its populations
/// are non-increasing with energy, degenerate energy blocks exempt from the
/// internal ordering.
pub fn is_passive(rho: &DensityMatrix, h: &Hamiltonian, tolerance: f64) -> Result<bool> {
    ensure_state_matches(h, rho)?;
    let comm = rho.matrix().commutator(&h.matrix()).frobenius_norm();
    if comm > tolerance {
        return Ok(false);
    }
    let populations = h.populations(rho.matrix());
    Ok(blockwise_ordering_margin(&populations, h.energies()) >= -tolerance)
}

fn ergotropy_triplet_of_branch(
    p: f64,
    cond: &crate::matcore::ConditionalState,
    h: &Hamiltonian,
) -> Result<(f64, f64, f64)> {
    match cond.state() {
        // Degenerate branches (p ≤ p_floor) contribute zero.
        None => Ok((0.0, 0.0, 0.0)),
        Some(state) => {
            let rep = split_ergotropy(state, h)?;
            Ok((p * rep.total, p * rep.incoherent, p * rep.coherent))
        }
    }
}

/// Daemonic ergotropy of the switched pair (A, B) on `rho_in` for a fixed
/// control preparation and control measurement, with the classical baseline
/// and gain components.
pub fn daemonic_ergotropy(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
    h: &Hamiltonian,
) -> Result<DaemonicReport> {
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let chi = cross_map(a, b, rho_in)?;
    daemonic_from_parts(&ab, &ba, &chi, control, measure, h)
}

/// Daemonic report from precomputed (A∘B)\[ρ\], (B∘A)\[ρ\] and χ\[ρ\].
pub fn daemonic_from_parts(
    ab: &ComplexMatrix,
    ba: &ComplexMatrix,
    chi: &ComplexMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
    h: &Hamiltonian,
) -> Result<DaemonicReport> {
    let class = DensityMatrix::new(
        ab.scale_re(control.phi)
            .add(&ba.scale_re(1.0 - control.phi)),
    )?;
    let class_rep = split_ergotropy(&class, h)?;

    let joint = assemble_joint(ab, ba, chi, control);
    let pair = conditional_states_of_joint(&joint, measure)?;
    let (wp, wip, wcp) = ergotropy_triplet_of_branch(pair.p_plus, &pair.rho_plus, h)?;
    let (wm, wim, wcm) = ergotropy_triplet_of_branch(pair.p_minus, &pair.rho_minus, h)?;

    let wd = wp + wm;
    let wd_incoherent = wip + wim;
    let wd_coherent = wcp + wcm;
    Ok(DaemonicReport {
        measure: *measure,
        wd,
        wd_incoherent,
        wd_coherent,
        w_class: class_rep.total,
        w_class_incoherent: class_rep.incoherent,
        w_class_coherent: class_rep.coherent,
        gain: wd - class_rep.total,
        gain_incoherent: wd_incoherent - class_rep.incoherent,
        gain_coherent: wd_coherent - class_rep.coherent,
    })
}

/// Daemonic ergotropy (total only) of a prebuilt joint state; the objective
/// evaluated inside the measurement optimizer.
fn wd_of_joint(joint: &ComplexMatrix, measure: &MeasureSpec, h: &Hamiltonian) -> Result<f64> {
    let pair = conditional_states_of_joint(joint, measure)?;
    let mut wd = 0.0;
    for (p, cond) in [
        (pair.p_plus, &pair.rho_plus),
        (pair.p_minus, &pair.rho_minus),
    ] {
        if let Some(state) = cond.state() {
            wd += p * split_ergotropy(state, h)?.total;
        }
    }
    Ok(wd)
}

/// Number of grid points per axis in the measurement optimizer's coarse scan.
const GRID_POINTS: usize = 65;
/// Simplex-size convergence threshold of the derivative-free refinement.
const REFINE_TOL: f64 = 1e-6;
const REFINE_MAX_ITER: usize = 300;

/// Maximize the daemonic ergotropy over projective control measurements
/// (φ′, α′).
///
/// Deterministic: a 65×65 grid over \[0,1\]×[0,2π) (ties broken toward smaller
/// φ′, then smaller α′) seeds a Nelder–Mead refinement down to parameter
/// tolerance 1e-6. No randomness in the path.
pub fn optimize_measurement(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    h: &Hamiltonian,
) -> Result<(MeasureSpec, DaemonicReport)> {
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let chi = cross_map(a, b, rho_in)?;
    let joint = assemble_joint(&ab, &ba, &chi, control);

    let eval = |phi_m: f64, alpha_m: f64| -> f64 {
        let spec = clamp_measure(phi_m, alpha_m);
        wd_of_joint(&joint, &spec, h).unwrap_or(f64::NEG_INFINITY)
    };

    let mut best = (0.0_f64, 0.0_f64);
    let mut best_wd = f64::NEG_INFINITY;
    for i in 0..GRID_POINTS {
        let phi_m = i as f64 / (GRID_POINTS - 1) as f64;
        for j in 0..GRID_POINTS {
            let alpha_m = std::f64::consts::TAU * j as f64 / GRID_POINTS as f64;
            let wd = eval(phi_m, alpha_m);
            if wd > best_wd {
                best_wd = wd;
                best = (phi_m, alpha_m);
            }
        }
    }

    let step = (
        1.0 / (2.0 * (GRID_POINTS - 1) as f64),
        std::f64::consts::TAU / (2.0 * GRID_POINTS as f64),
    );
    let (refined, refined_wd) = nelder_mead_max(&eval, best, step);
    if refined_wd > best_wd {
        best = refined;
    }

    let measure = clamp_measure(best.0, best.1);
    let report = daemonic_from_parts(&ab, &ba, &chi, control, &measure, h)?;
    Ok((measure, report))
}

fn clamp_measure(phi_m: f64, alpha_m: f64) -> MeasureSpec {
    let phi = phi_m.clamp(0.0, 1.0);
    let mut alpha = alpha_m.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can return the modulus itself when the input is a tiny
    // negative number.
    if alpha >= std::f64::consts::TAU {
        alpha = 0.0;
    }
    MeasureSpec { phi_m: phi, alpha_m: alpha }
}

/// Two-dimensional Nelder–Mead ascent (reflection 1, expansion 2,
/// contraction ½, shrink ½) with a wrap-aware objective.
fn nelder_mead_max(
    f: &dyn Fn(f64, f64) -> f64,
    start: (f64, f64),
    step: (f64, f64),
) -> ((f64, f64), f64) {
    let mut simplex = [
        (start.0, start.1),
        (start.0 + step.0, start.1),
        (start.0, start.1 + step.1),
    ];
    let mut values = simplex.map(|(x, y)| f(x, y));

    for _ in 0..REFINE_MAX_ITER {
        // descending by value: best first
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite objective"));
        simplex = [simplex[order[0]], simplex[order[1]], simplex[order[2]]];
        values = [values[order[0]], values[order[1]], values[order[2]]];

        let size = simplex
            .iter()
            .skip(1)
            .map(|p| ((p.0 - simplex[0].0).powi(2) + (p.1 - simplex[0].1).powi(2)).sqrt())
            .fold(0.0_f64, f64::max);
        if size < REFINE_TOL {
            break;
        }

        let centroid = (
            (simplex[0].0 + simplex[1].0) / 2.0,
            (simplex[0].1 + simplex[1].1) / 2.0,
        );
        let worst = simplex[2];
        let reflect = (
            centroid.0 + (centroid.0 - worst.0),
            centroid.1 + (centroid.1 - worst.1),
        );
        let f_reflect = f(reflect.0, reflect.1);

        if f_reflect > values[0] {
            let expand = (
                centroid.0 + 2.0 * (centroid.0 - worst.0),
                centroid.1 + 2.0 * (centroid.1 - worst.1),
            );
            let f_expand = f(expand.0, expand.1);
            if f_expand > f_reflect {
                simplex[2] = expand;
                values[2] = f_expand;
            } else {
                simplex[2] = reflect;
                values[2] = f_reflect;
            }
        } else if f_reflect > values[1] {
            simplex[2] = reflect;
            values[2] = f_reflect;
        } else {
            let contract = (
                centroid.0 + 0.5 * (worst.0 - centroid.0),
                centroid.1 + 0.5 * (worst.1 - centroid.1),
            );
            let f_contract = f(contract.0, contract.1);
            if f_contract > values[2] {
                simplex[2] = contract;
                values[2] = f_contract;
            } else {
                for k in 1..3 {
                    simplex[k] = (
                        simplex[0].0 + 0.5 * (simplex[k].0 - simplex[0].0),
                        simplex[0].1 + 0.5 * (simplex[k].1 - simplex[0].1),
                    );
                    values[k] = f(simplex[k].0, simplex[k].1);
                }
            }
        }
    }

    let mut best = 0;
    for k in 1..3 {
        if values[k] > values[best] {
            best = k;
        }
    }
    (simplex[best], values[best])
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Causal part of the incoherent daemonic gain of a qubit,
/// ½(1 − sign(δρ^{AB}) sign(δρ^{BA})) · min{φ|δρ^{AB}|, (1−φ)|δρ^{BA}|}:
/// the work recoverable from plain which-order information when the two
/// orders bias the populations in opposite directions. Zero for commuting
/// maps. Energies in units of ε₂ (qubit convention ε₁ = 0, ε₂ = 1).
pub fn causal_incoherent_gain(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    phi: f64,
) -> Result<f64> {
    if a.dim() != 2 || b.dim() != 2 || rho_in.dim() != 2 {
        return Err(Error::NotQubit { dim: a.dim().max(b.dim()).max(rho_in.dim()) });
    }
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let d_ab = ab.get(1, 1).re - ab.get(0, 0).re;
    let d_ba = ba.get(1, 1).re - ba.get(0, 0).re;
    Ok(0.5
        * (1.0 - sign(d_ab) * sign(d_ba))
        * (phi * d_ab.abs()).min((1.0 - phi) * d_ba.abs()))
}

/// Diagnostics of the zero-gain check.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroGainDetails {
    /// H ∝ 𝟙: no cycle can lower the internal energy.
    pub degenerate_hamiltonian: bool,
    /// φ ∈ {0, 1}: the joint state is a product, every outcome returns the
    /// classical output.
    pub definite_order: bool,
    /// ρ_class ≅ 𝟙/d: the degenerate criterion (Ĝ ∝ 𝟙 for every basis)
    /// applies.
    pub degenerate_classical_output: bool,
    /// Some spectral gap of ρ_class is below [`tol::NEAR_DEGENERATE`] without
    /// full degeneracy; no verdict is attempted.
    pub indeterminate: bool,
    /// Residual of the printed per-measurement commutator condition
    /// √(φ′(1−φ′)/(φ(1−φ))) [ρ_class, e^{−i(α−α′)}χ + h.c.] − (2φ′−1)[(A∘B)\[ρ\], (B∘A)\[ρ\]]
    /// at the given (φ′, α′). Zero means this particular basis gains nothing
    /// through condition (a).
    pub commutator_residual: f64,
    /// Per-measurement slack of 2|G_kk − G_{k+1,k+1}| ≤ r_k − r_{k+1} in the
    /// ρ_class eigenbasis (descending) at the given basis; ≥ 0 when it holds.
    pub ordering_margin: f64,
    /// Worst commutator ‖[ρ_class, ·]‖ over the three Hermitian generators
    /// that span Ĝ(φ′, α′) for every measurement.
    pub sup_commutator_residual: f64,
    /// Measurement-independent ordering slack: min over adjacent levels of
    /// Δr_k − √(ΔS′² + φ(1−φ)(ΔH₁² + ΔH₂²)), the exact worst case of
    /// 2|ΔG_kk| over all bases.
    pub sup_ordering_margin: f64,
    /// Largest traceless generator norm for the fully degenerate classical
    /// output case (every basis must leave Ĝ ∝ 𝟙).
    pub gain_flatness_residual: f64,
}

/// Result of the zero-gain condition check.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroGainReport {
    /// No projective control measurement can beat the classical ergotropy:
    /// the optimized daemonic gain vanishes.
    pub predicted_zero: bool,
    pub details: ZeroGainDetails,
}

/// Predict whether the daemonic gain vanishes for every projective control
/// measurement, without running the optimizer.
///
/// The gain operator is linear in three Hermitian generators,
/// Ĝ = u·S′ + v·H₁ + w·H₂ with S′ = φ(A∘B)\[ρ\] − (1−φ)(B∘A)\[ρ\],
/// H₁ = χ + χ†, H₂ = i(χ† − χ), and (u, v, w) confined to the measurement
/// ellipsoid u² + (v² + w²)/(φ(1−φ)) = ¼. Zero gain for all bases therefore
/// reduces to: every generator commutes with ρ_class, and for each adjacent
/// eigenvalue pair √(ΔS′² + φ(1−φ)(ΔH₁² + ΔH₂²)) ≤ Δr (the exact supremum
/// of 2|ΔG| over the ellipsoid; for a qubit this is precisely the optimal
/// incoherent-gain condition). The two extreme cases come first: a fully
/// degenerate Hamiltonian (always zero) and a fully degenerate classical
/// output (zero iff every generator is ∝ 𝟙). Near-degenerate classical
/// spectra report "indeterminate" rather than guessing. The printed
/// per-measurement residuals at the given (φ′, α′) are reported alongside
/// in the details.
pub fn zero_gain_check(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
    h: &Hamiltonian,
) -> Result<ZeroGainReport> {
    let mut details = ZeroGainDetails {
        degenerate_hamiltonian: false,
        definite_order: false,
        degenerate_classical_output: false,
        indeterminate: false,
        commutator_residual: f64::NAN,
        ordering_margin: f64::NAN,
        sup_commutator_residual: f64::NAN,
        sup_ordering_margin: f64::NAN,
        gain_flatness_residual: f64::NAN,
    };

    if h.is_fully_degenerate() {
        details.degenerate_hamiltonian = true;
        return Ok(ZeroGainReport {
            predicted_zero: true,
            details,
        });
    }

    let phi = control.phi;
    let dim = a.dim();
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let chi = cross_map(a, b, rho_in)?;
    let gain = gain_operator_from_parts(&ab, &ba, &chi, control, measure);

    if phi * (1.0 - phi) <= tol::P_FLOOR {
        details.definite_order = true;
        return Ok(ZeroGainReport {
            predicted_zero: true,
            details,
        });
    }

    // The three Hermitian generators of Ĝ over all measurement bases.
    let s_gen = ab.scale_re(phi).sub(&ba.scale_re(1.0 - phi));
    let h1 = chi.plus_adjoint();
    let h2 = chi
        .adjoint()
        .sub(&chi)
        .scale(num_complex::Complex64::new(0.0, 1.0));

    let class = ab.scale_re(phi).add(&ba.scale_re(1.0 - phi));
    let dec = hermitian_eig(&class)?;
    let spread = dec.eigenvalues[0] - dec.eigenvalues[dec.eigenvalues.len() - 1];

    if spread <= tol::NEAR_DEGENERATE {
        // ρ_class ≅ 𝟙/d: every basis is an eigenbasis, so the gain vanishes
        // iff Ĝ stays ∝ 𝟙 for every measurement, i.e. every generator does.
        details.degenerate_classical_output = true;
        let traceless = |m: &ComplexMatrix| {
            let shift = m.trace().re / dim as f64;
            m.sub(&ComplexMatrix::identity(dim).scale_re(shift))
                .frobenius_norm()
        };
        let residual = traceless(&s_gen).max(traceless(&h1)).max(traceless(&h2));
        details.gain_flatness_residual = residual;
        return Ok(ZeroGainReport {
            predicted_zero: residual <= tol::ZERO_GAIN,
            details,
        });
    }

    if dec
        .eigenvalues
        .windows(2)
        .any(|w| w[0] - w[1] < tol::NEAR_DEGENERATE)
    {
        details.indeterminate = true;
        return Ok(ZeroGainReport {
            predicted_zero: false,
            details,
        });
    }

    // Per-measurement residuals at the given basis, in the printed
    // normalization (diagnostic only).
    let phi_m = measure.phi_m;
    let herm = chi
        .scale(num_complex::Complex64::new(0.0, -(control.alpha - measure.alpha_m)).exp())
        .plus_adjoint();
    let ratio = ((phi_m * (1.0 - phi_m)) / (phi * (1.0 - phi))).sqrt();
    details.commutator_residual = class
        .commutator(&herm)
        .scale_re(ratio)
        .sub(&ab.commutator(&ba).scale_re(2.0 * phi_m - 1.0))
        .frobenius_norm();
    let g_diag: Vec<f64> = dec
        .eigenvectors
        .iter()
        .map(|v| gain.expectation(v).re)
        .collect();
    let mut given_margin = f64::INFINITY;
    for k in 0..dim - 1 {
        given_margin = given_margin.min(
            dec.eigenvalues[k] - dec.eigenvalues[k + 1] - 2.0 * (g_diag[k] - g_diag[k + 1]).abs(),
        );
    }
    details.ordering_margin = given_margin;

    // Measurement-independent conditions.
    let sup_commutator = class
        .commutator(&s_gen)
        .frobenius_norm()
        .max(class.commutator(&h1).frobenius_norm())
        .max(class.commutator(&h2).frobenius_norm());
    details.sup_commutator_residual = sup_commutator;

    let diag_of = |m: &ComplexMatrix| -> Vec<f64> {
        dec.eigenvectors.iter().map(|v| m.expectation(v).re).collect()
    };
    let s_diag = diag_of(&s_gen);
    let h1_diag = diag_of(&h1);
    let h2_diag = diag_of(&h2);
    let mut sup_margin = f64::INFINITY;
    for k in 0..dim - 1 {
        let ds = s_diag[k] - s_diag[k + 1];
        let d1 = h1_diag[k] - h1_diag[k + 1];
        let d2 = h2_diag[k] - h2_diag[k + 1];
        let worst = (ds * ds + phi * (1.0 - phi) * (d1 * d1 + d2 * d2)).sqrt();
        sup_margin = sup_margin.min(dec.eigenvalues[k] - dec.eigenvalues[k + 1] - worst);
    }
    details.sup_ordering_margin = sup_margin;

    Ok(ZeroGainReport {
        predicted_zero: sup_commutator <= tol::ZERO_GAIN && sup_margin >= -tol::ZERO_GAIN,
        details,
    })
}

/// Population imbalances δρ^{AB}, δρ^{BA} of the two composition orders and
/// the classical mixture δρ_class = φδρ^{AB} + (1−φ)δρ^{BA} (qubit only).
pub fn order_imbalances(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    phi: f64,
) -> Result<(f64, f64, f64)> {
    if a.dim() != 2 {
        return Err(Error::NotQubit { dim: a.dim() });
    }
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let d_ab = ab.get(1, 1).re - ab.get(0, 0).re;
    let d_ba = ba.get(1, 1).re - ba.get(0, 0).re;
    Ok((d_ab, d_ba, phi * d_ab + (1.0 - phi) * d_ba))
}

/// Imbalance ζ = χ\[ρ\]₂₂ − χ\[ρ\]₁₁ of the cross-map diagonal in the energy
/// basis (qubit only).
pub fn zeta(a: &KrausChannel, b: &KrausChannel, rho_in: &DensityMatrix) -> Result<num_complex::Complex64> {
    if a.dim() != 2 {
        return Err(Error::NotQubit { dim: a.dim() });
    }
    let chi = cross_map(a, b, rho_in)?;
    Ok(chi.get(1, 1) - chi.get(0, 0))
}

/// Gain-operator imbalance δG = G₂₂ − G₁₁ in its scalar form,
/// δG = ½(2φ′−1)(φδρ^{AB} − (1−φ)δρ^{BA}) + 2√(φφ′(1−φ)(1−φ′)) Re[e^{−i(α−α′)}ζ].
pub fn qubit_delta_g(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
) -> Result<f64> {
    let (d_ab, d_ba, _) = order_imbalances(a, b, rho_in, control.phi)?;
    let z = zeta(a, b, rho_in)?;
    let phi = control.phi;
    let phi_m = measure.phi_m;
    let rotated = num_complex::Complex64::new(0.0, -(control.alpha - measure.alpha_m)).exp() * z;
    Ok(0.5 * (2.0 * phi_m - 1.0) * (phi * d_ab - (1.0 - phi) * d_ba)
        + 2.0 * (phi * phi_m * (1.0 - phi) * (1.0 - phi_m)).max(0.0).sqrt() * rotated.re)
}

/// Measurement basis maximizing the incoherent daemonic gain of a qubit:
/// α′ = α − arg ζ and
/// φ′ = ½(1 + D/√(D² + 4φ(1−φ)|ζ|²)) with D = φδρ^{AB} − (1−φ)δρ^{BA}.
/// Falls back to the balanced basis when the measurement cannot matter
/// (D = ζ = 0).
pub fn optimal_incoherent_measurement(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
) -> Result<MeasureSpec> {
    let (d_ab, d_ba, _) = order_imbalances(a, b, rho_in, control.phi)?;
    let z = zeta(a, b, rho_in)?;
    let phi = control.phi;
    let dd = phi * d_ab - (1.0 - phi) * d_ba;
    let denom = (dd * dd + 4.0 * phi * (1.0 - phi) * z.norm_sqr()).sqrt();
    if denom <= tol::P_FLOOR {
        return Ok(clamp_measure(0.5, control.alpha));
    }
    let phi_m = 0.5 * (1.0 + dd / denom);
    let alpha_m = control.alpha - z.arg();
    Ok(clamp_measure(phi_m, alpha_m))
}

/// Incoherent daemonic gain at the optimal basis of
/// [`optimal_incoherent_measurement`]:
/// δW_i = ½ max{0, √(D² + 4φ(1−φ)|ζ|²) − |δρ_class|}.
pub fn optimal_incoherent_gain(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
) -> Result<f64> {
    let (d_ab, d_ba, d_class) = order_imbalances(a, b, rho_in, control.phi)?;
    let z = zeta(a, b, rho_in)?;
    let phi = control.phi;
    let dd = phi * d_ab - (1.0 - phi) * d_ba;
    let root = (dd * dd + 4.0 * phi * (1.0 - phi) * z.norm_sqr()).sqrt();
    Ok(0.5 * (root - d_class.abs()).max(0.0))
}

/// Work triple of an un-normalized qubit operator u (positive, trace ≤ 1)
/// under H = diag(0, 1), by homogeneity of the ergotropy:
/// W = (δ + √(δ² + 4|u₀₁|²))/2, W_i = max{0, δ}, W_c = W − W_i.
fn qubit_work_unnorm(delta: f64, offdiag: num_complex::Complex64) -> (f64, f64, f64) {
    let s = (delta * delta + 4.0 * offdiag.norm_sqr()).sqrt();
    let w = 0.5 * (delta + s);
    let wi = delta.max(0.0);
    (w, wi, w - wi)
}

/// Daemonic report of a qubit pair via the closed-form route: conditional
/// states assembled algebraically as ρ_class/2 ± Ĝ and every ergotropy
/// evaluated from the 2×2 scalar formulas, with no eigensolver involved.
/// Independent cross-check of [`daemonic_ergotropy`]. Requires the qubit
/// energy convention H = diag(0, 1).
pub fn qubit_closed_form(
    a: &KrausChannel,
    b: &KrausChannel,
    rho_in: &DensityMatrix,
    control: &ControlSpec,
    measure: &MeasureSpec,
) -> Result<DaemonicReport> {
    if a.dim() != 2 || rho_in.dim() != 2 {
        return Err(Error::NotQubit {
            dim: a.dim().max(rho_in.dim()),
        });
    }
    let ab = apply_raw(&compose(a, b)?, rho_in.matrix());
    let ba = apply_raw(&compose(b, a)?, rho_in.matrix());
    let chi = cross_map(a, b, rho_in)?;
    let phi = control.phi;
    let class = ab.scale_re(phi).add(&ba.scale_re(1.0 - phi));
    let gain = gain_operator_from_parts(&ab, &ba, &chi, control, measure);

    let d_class = class.get(1, 1).re - class.get(0, 0).re;
    let c12 = class.get(0, 1);
    let d_g = gain.get(1, 1).re - gain.get(0, 0).re;
    let g12 = gain.get(0, 1);

    let (w_class, w_class_i, w_class_c) = qubit_work_unnorm(d_class, c12);

    let mut wd = 0.0;
    let mut wd_i = 0.0;
    let mut wd_c = 0.0;
    for sgn in [1.0, -1.0] {
        let (w, wi, wc) = qubit_work_unnorm(0.5 * d_class + sgn * d_g, c12.scale(0.5) + g12 * sgn);
        wd += w;
        wd_i += wi;
        wd_c += wc;
    }

    Ok(DaemonicReport {
        measure: *measure,
        wd,
        wd_incoherent: wd_i,
        wd_coherent: wd_c,
        w_class,
        w_class_incoherent: w_class_i,
        w_class_coherent: w_class_c,
        gain: wd - w_class,
        gain_incoherent: wd_i - w_class_i,
        gain_coherent: wd_c - w_class_c,
    })
}
