//! Closed-form entanglement spectra of the AKLT state, coupling extraction
//! for the entanglement Hamiltonian, and the structure of its ground state.

mod chi;
mod couplings;
mod spectra;

pub use chi::{
    chi_ratio, chi_ratio_transfer, coefficients_from_chi, heisenberg_gs_overlap, heisenberg_overlap,
    heisenberg_reference, transformed_qubit_state, ChiMethod, ChiReport,
};
pub use couplings::{
    eh_couplings_contiguous, eh_couplings_noncontiguous, fit_ring_couplings, heisenberg_ring_energies,
    CouplingFit,
};
pub use spectra::{
    contiguous_lambdas, noncontiguous_lambdas, noncontiguous_lambdas_gram,
    noncontiguous_lambdas_half_infinite, ContiguousSpectrum, FourBlockGrams, Intermediates,
    NonContiguousSpectrum,
};
