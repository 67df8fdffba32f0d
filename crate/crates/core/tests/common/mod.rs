#![allow(dead_code)]

use std::sync::Arc;

use meanfield_core::fock::{FockBasis, ManyBodyState};
use meanfield_core::lattice::{
    Interaction, LatticeSpace, Model, OneBodyField, PotentialSchedule, Switch,
};
use meanfield_core::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_field(r: &mut ChaCha8Rng, m: usize) -> OneBodyField {
    OneBodyField::normalized(random_vec(r, m)).unwrap()
}

pub fn random_state(r: &mut ChaCha8Rng, n: usize, m: usize) -> ManyBodyState {
    let basis = Arc::new(FockBasis::new(n, m).unwrap());
    let mut s = ManyBodyState::new(basis.clone(), random_vec(r, basis.dim())).unwrap();
    s.normalize();
    s
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_matrix(r, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Random two-body kernel symmetric under slot exchange.
pub fn random_exchange_symmetric(r: &mut ChaCha8Rng, m: usize) -> CMatrix {
    let a = random_hermitian(r, m * m);
    let swap = CMatrix::from_fn(m * m, m * m, |i, j| {
        let (x, y) = (i / m, i % m);
        if j == y * m + x {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    (&a + &swap * &a * &swap) * c(0.5, 0.0)
}

/// Soft-Coulomb ring with a trap switched off over `tau`.
pub fn quench_model(m: usize, length: f64, strength: f64, tau: f64) -> Model {
    let space = LatticeSpace::new(m, length).unwrap();
    let schedule =
        PotentialSchedule::harmonic_trap(&space, 2.0, Switch::SmoothOff { tau }).unwrap();
    let v = Interaction::soft_coulomb(&space, strength, 1.0).unwrap();
    Model::new(space, schedule, v).unwrap()
}

/// Soft-Coulomb ring with a static trap.
pub fn static_model(m: usize, length: f64, strength: f64) -> Model {
    let space = LatticeSpace::new(m, length).unwrap();
    let schedule = PotentialSchedule::harmonic_trap(&space, 2.0, Switch::Static).unwrap();
    let v = Interaction::soft_coulomb(&space, strength, 1.0).unwrap();
    Model::new(space, schedule, v).unwrap()
}

pub fn matrix_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
