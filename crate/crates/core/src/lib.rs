//! Numerical core for mean-field boson dynamics on a periodic lattice.
//!
//! Exact N-body propagation in the bosonic Fock sector, the Hartree flow,
//! the excitation (Bogoliubov) hierarchy and the pair equations, together
//! with the counting-operator calculus used to compare them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

mod prelude;

pub mod bogoliubov;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod hartree;
pub mod lattice;
pub mod linalg;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
