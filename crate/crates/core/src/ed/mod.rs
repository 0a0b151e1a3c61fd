//! Exact diagonalization of the BBH chain and the entanglement quantities
//! derived from its eigenstates.

mod bulk_edge;
mod lanczos;
mod rdm;

pub use crate::spin_ops::LinearOperator;
pub use bulk_edge::{
    ent_gap, ent_gap_with, ent_levels, ent_spectrum_block, fidelity, fidelity_with, periodic_ground_state,
    physical_gap, physical_gap_with, physical_levels, FidelityReport, GapKind, GapPoint, DEGENERACY_TOL,
    MAX_RING_SITES,
};
pub use lanczos::{lowest_eigenpairs, lowest_eigenpairs_with, EigenResult, LanczosConfig};
pub use rdm::{
    degeneracy_profile, ent_spectrum_numeric, reduced_density_matrix, spectrum_report, Partition,
    SpectrumReport, MAX_KEPT_SITES, PROFILE_TOL, ZERO_EIGENVALUE,
};
