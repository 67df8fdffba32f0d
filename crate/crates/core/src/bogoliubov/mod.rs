//! Excitation vectors `χ = (χ^(k))_k` around a condensate, the exact
//! finite-`N` hierarchy generated by `H̃`, its `N → ∞` limit (the
//! Bogoliubov hierarchy) and the equivalent pair equations for `(γ, α)`.
//!
//! Each `χ^(k)` is stored as a `k`-boson Fock vector over the lattice
//! modes, orthogonal to `φ` in every slot.

mod excitation;
mod hierarchy;
mod pair;

pub use excitation::{
    excitation_decompose, symmetric_reconstruct, ExcitationSpace, ExcitationVector,
};
pub use hierarchy::{
    bogoliubov_rhs, evolve_finite_hierarchy, evolve_hierarchy, finite_hierarchy_rhs, HierarchyKind,
    HierarchyOptions, HierarchySolution,
};
pub use pair::{
    correlations_from_chi, evolve_pair, pair_rhs, purity_defect, CorrelationPair, PairSolution,
};
