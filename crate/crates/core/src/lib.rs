//! Entanglement spectra of the AKLT state and bulk-edge diagnostics for the
//! bilinear-biquadratic (BBH) spin-1 chain.
//!
//! The crate is organised bottom-up:
//!
//! - [`spin_ops`]: spin-1 operators and the BBH Hamiltonian as a matrix-free
//!   operator on the `3^N` product basis (optionally restricted to one total
//!   `S^z` sector).
//! - [`mps`]: the bond-dimension-2 AKLT tensors, their transfer matrix,
//!   explicit periodic states and boundary-block states with their Gram
//!   matrices.
//! - [`analytic`]: closed-form entanglement spectra for contiguous and
//!   non-contiguous bipartitions, entanglement-Hamiltonian couplings and the
//!   four-spin Heisenberg identification.
//! - [`ed`]: Lanczos exact diagonalization, reduced density matrices of
//!   arbitrary site subsets, entanglement gaps, fidelities and degeneracy
//!   profiles.
//! - [`sop`]: the string order parameter by expectation value, by transfer
//!   matrices, and in closed form, plus the dressed-operator identities.
//! - [`fit`]: exponential-decay fits for gaps and string order.
//! - [`cli`]: the `haldane` command-line surface.
//!
//! Basis conventions used everywhere: the local spin-1 index `k = 0, 1, 2`
//! is `m = +1, 0, -1`, and site 1 is the slowest-varying digit of a product
//! basis index.

pub mod analytic;
pub mod cli;
pub mod ed;
pub mod error;
pub mod fit;
pub(crate) mod linalg;
pub mod mps;
pub mod sop;
pub mod spin_ops;

pub use error::{Error, Result};

/// Largest subleading transfer-matrix eigenvalue of the AKLT state.
pub const GAMMA: f64 = -1.0 / 3.0;
