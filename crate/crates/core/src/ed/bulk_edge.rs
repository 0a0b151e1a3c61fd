//! Physical versus entanglement spectra of the BBH chain: gaps, low-lying
//! levels and ground-state fidelity.
//!
//! Entanglement quantities always use a contiguous block of `l` sites cut out
//! of the ground state of a periodic ring with `N_P = 2l` sites; the physical
//! counterpart is the open chain with `N_O = l`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::lanczos::{lowest_eigenpairs_with, LanczosConfig};
use super::rdm::{ent_spectrum_numeric, reduced_density_matrix, Partition, SpectrumReport, MAX_KEPT_SITES};
use crate::error::{Error, Result};
use crate::spin_ops::{build_bbh, build_bbh_sector, HamiltonianSpec, LinearOperator};

/// Largest periodic ring diagonalized for entanglement quantities.
pub const MAX_RING_SITES: usize = 14;

/// Energies closer than this count as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    Phy,
    Ent,
}

impl std::fmt::Display for GapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GapKind::Phy => "phy",
            GapKind::Ent => "ent",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapPoint {
    pub theta: f64,
    /// `N_O` for physical gaps, `l` for entanglement gaps.
    pub size: usize,
    pub gap: f64,
    pub kind: GapKind,
}

/// `e₁ − e₀` of the open chain, computed in the `S^z_tot = 0` sector (every
/// multiplet of the low-lying spectrum has a member there).
pub fn physical_gap(theta: f64, n_open: usize) -> Result<GapPoint> {
    physical_gap_with(theta, n_open, &LanczosConfig::default())
}

pub fn physical_gap_with(theta: f64, n_open: usize, cfg: &LanczosConfig) -> Result<GapPoint> {
    if n_open % 2 != 0 {
        return Err(Error::invalid(format!("open chain length must be even, got {n_open}")));
    }
    let h = build_bbh_sector(HamiltonianSpec::open(theta, n_open)?, 0)?;
    let r = lowest_eigenpairs_with(&h, 2, cfg)?;
    Ok(GapPoint {
        theta,
        size: n_open,
        gap: (r.values[1] - r.values[0]).max(0.0),
        kind: GapKind::Phy,
    })
}

/// Ground state of the periodic ring, lifted to the full `3^N` space.
/// Fails if the ground state is not unique.
pub fn periodic_ground_state(theta: f64, n: usize, cfg: &LanczosConfig) -> Result<(f64, Vec<f64>)> {
    if n > MAX_RING_SITES {
        return Err(Error::capacity("periodic ring sites", n, MAX_RING_SITES));
    }
    let h = build_bbh_sector(HamiltonianSpec::periodic(theta, n)?, 0)?;
    let r = lowest_eigenpairs_with(&h, 2.min(h.dim()), cfg)?;
    if r.values.len() > 1 && r.values[1] - r.values[0] < DEGENERACY_TOL {
        return Err(Error::Degenerate {
            what: "periodic ground state",
            multiplicity: 2,
        });
    }
    Ok((r.values[0], h.embed(&r.vectors[0])))
}

/// Entanglement spectrum of sites `1..=l` of the periodic ground state with
/// `N_P = 2l`.
pub fn ent_spectrum_block(theta: f64, l: usize, cfg: &LanczosConfig) -> Result<SpectrumReport> {
    if 2 * l > MAX_RING_SITES {
        return Err(Error::capacity("periodic ring sites", 2 * l, MAX_RING_SITES));
    }
    if l > MAX_KEPT_SITES {
        return Err(Error::capacity("kept sites", l, MAX_KEPT_SITES));
    }
    let (_, psi) = periodic_ground_state(theta, 2 * l, cfg)?;
    let rho = reduced_density_matrix(&psi, &Partition::block(l, 2 * l)?)?;
    Ok(ent_spectrum_numeric(&rho))
}

pub fn ent_gap(theta: f64, l: usize) -> Result<GapPoint> {
    ent_gap_with(theta, l, &LanczosConfig::default())
}

pub fn ent_gap_with(theta: f64, l: usize, cfg: &LanczosConfig) -> Result<GapPoint> {
    let rep = ent_spectrum_block(theta, l, cfg)?;
    Ok(GapPoint {
        theta,
        size: l,
        gap: rep.gap,
        kind: GapKind::Ent,
    })
}

/// `k` lowest levels of the open chain (full space, all multiplets).
pub fn physical_levels(theta: f64, n_open: usize, k: usize, cfg: &LanczosConfig) -> Result<Vec<f64>> {
    let h = build_bbh(HamiltonianSpec::open(theta, n_open)?)?;
    Ok(lowest_eigenpairs_with(&h, k, cfg)?.values)
}

/// `k` lowest entanglement energies of a block of `l` sites (`N_P = 2l`).
pub fn ent_levels(theta: f64, l: usize, k: usize, cfg: &LanczosConfig) -> Result<Vec<f64>> {
    let rep = ent_spectrum_block(theta, l, cfg)?;
    if rep.ent_energies.len() < k {
        return Err(Error::invalid(format!(
            "only {} nonzero entanglement levels, {k} requested",
            rep.ent_energies.len()
        )));
    }
    Ok(rep.ent_energies[..k].to_vec())
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub theta: f64,
    pub l: usize,
    pub value: f64,
    /// Dimension of the open-chain ground-state subspace projected onto.
    pub gs_degeneracy_used: usize,
    /// Multiplicity of the largest reduced-density-matrix eigenvalue.
    pub rdm_top_multiplicity: usize,
}

/// `|⟨ψ₀^{phy}|ψ₀^{ent}⟩|²` between the open-chain ground state (`N_O = l`)
/// and the dominant eigenvector of the block density matrix (`N_P = 2l`).
///
/// Degenerate spaces on either side are handled by the largest singular
/// value squared of `Gᵀ Q` (`G`: ground-state basis, `Q`: top RDM
/// eigenspace), which is basis independent.
pub fn fidelity(theta: f64, l: usize) -> Result<FidelityReport> {
    fidelity_with(theta, l, &LanczosConfig::default())
}

pub fn fidelity_with(theta: f64, l: usize, cfg: &LanczosConfig) -> Result<FidelityReport> {
    if l < 2 {
        return Err(Error::invalid("fidelity needs a block of at least 2 sites"));
    }
    if 2 * l > 12 {
        return Err(Error::capacity("periodic ring sites for fidelity", 2 * l, 12));
    }
    let (_, psi) = periodic_ground_state(theta, 2 * l, cfg)?;
    let rho = reduced_density_matrix(&psi, &Partition::block(l, 2 * l)?)?;
    let (vals, vecs) = crate::linalg::sym_eigen_ascending(rho);
    let d = vals.len();
    let top = vals[d - 1];
    let top_mult = vals.iter().rev().take_while(|&&v| top - v <= DEGENERACY_TOL * top).count();
    let q = vecs.columns(d - top_mult, top_mult).into_owned();

    let h = build_bbh(HamiltonianSpec::open(theta, l)?)?;
    let k = 8.min(h.dim());
    let r = lowest_eigenpairs_with(&h, k, cfg)?;
    let gs = r.values.iter().take_while(|&&e| e - r.values[0] < DEGENERACY_TOL).count();
    let g = DMatrix::from_fn(d, gs, |i, j| r.vectors[j][i]);

    let overlap = g.transpose() * q;
    let sv = overlap.singular_values();
    let s = sv.iter().fold(0.0f64, |m, &x| m.max(x));
    Ok(FidelityReport {
        theta,
        l,
        value: (s * s).min(1.0),
        gs_degeneracy_used: gs,
        rdm_top_multiplicity: top_mult,
    })
}
