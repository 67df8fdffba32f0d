//! Symmetric N-boson Fock sector on the lattice modes and everything that
//! acts on it.

mod basis;
mod density;
mod hamiltonian;
pub mod operators;
mod propagate;
mod rotation;
mod sectors;
mod state;

pub use basis::{enumerate_basis, sector_dimension, FockBasis, DEFAULT_DIMENSION_CAP};
pub use density::reduced_density;
pub use hamiltonian::{
    counting_derivative_terms, difference_pair_kernel, full_pair_kernel, tilde_pair_kernel,
    CountingTerms, HamiltonianBuilder,
};
pub use operators::{
    annihilate, create, product_state, second_quantize_one_body, second_quantize_pair_sum,
    second_quantize_two_body, OperatorPattern, QuadraticPattern, Transitions,
};
pub(crate) use propagate::step_count as step_count_pub;
pub use propagate::{ground_state, propagate, step, PropagationReport, PropagatorOptions};
pub use rotation::ModeRotation;
pub use sectors::{
    counting_expectation_weight, counting_operator, parity_projectors, sector_projector,
    SectorResolution, WeightFunction,
};
pub use state::ManyBodyState;
