//! Seeded random states, specs and channel pairs for the verification
//! suites. All draws go through a caller-provided RNG so identical seeds
//! reproduce identical instances.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::channels::{depolarizing, gad, phase_flip, thermalizing, Hamiltonian, KrausChannel};
use crate::matcore::{ComplexMatrix, DensityMatrix};
use crate::switch::{ControlSpec, MeasureSpec};

/// Random density matrix from the Ginibre ensemble: GG†/Tr(GG†).
pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let psd = g.mul(&g.adjoint());
    let tr = psd.trace().re;
    DensityMatrix::new(psd.scale_re(1.0 / tr)).expect("Ginibre draw is a density matrix")
}

/// Random pure state |ψ⟩⟨ψ| with Gaussian-like amplitudes.
pub fn random_pure(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let mut ket: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = ket.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut ket {
        *c /= norm;
    }
    DensityMatrix::from_pure(&ket).expect("normalized ket")
}

pub fn random_control(rng: &mut impl Rng) -> ControlSpec {
    ControlSpec::new(
        rng.gen_range(0.0..1.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
    .expect("in range")
}

pub fn random_measure(rng: &mut impl Rng) -> MeasureSpec {
    MeasureSpec::new(
        rng.gen_range(0.0..1.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
    .expect("in range")
}

/// One random qubit channel from the zoo (identity, depolarizing,
/// thermalizing, generalized amplitude damping, phase flip).
pub fn random_zoo_channel(rng: &mut impl Rng, h: &Hamiltonian) -> KrausChannel {
    match rng.gen_range(0..5) {
        0 => KrausChannel::identity(2),
        1 => depolarizing(2).expect("d = 2"),
        2 => thermalizing(h, rng.gen_range(0.0..3.0)).expect("β in range"),
        3 => gad(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)).expect("params in range"),
        _ => phase_flip(rng.gen_range(0.0..1.0)).expect("q in range"),
    }
}

/// A random qubit channel pair drawn from the zoo.
pub fn random_zoo_pair(rng: &mut impl Rng, h: &Hamiltonian) -> (KrausChannel, KrausChannel) {
    (random_zoo_channel(rng, h), random_zoo_channel(rng, h))
}

/// One random channel from the dimension-generic part of the zoo
/// (identity, depolarizing, thermalizing).
pub fn random_zoo_channel_ddim(rng: &mut impl Rng, h: &Hamiltonian) -> KrausChannel {
    match rng.gen_range(0..3) {
        0 => KrausChannel::identity(h.dim()),
        1 => depolarizing(h.dim()).expect("d ≥ 2"),
        _ => thermalizing(h, rng.gen_range(0.0..3.0)).expect("β in range"),
    }
}
