//! Reduced density matrices of arbitrary site subsets and their spectra.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest kept subsystem (`3^8 = 6561` states).
pub const MAX_KEPT_SITES: usize = 8;

/// Eigenvalues below this are treated as exact zeros.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

/// Kept sites (1-based, strictly ascending) of a chain of `n_sites`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    kept: Vec<usize>,
    n_sites: usize,
}

impl Partition {
    pub fn new(kept: Vec<usize>, n_sites: usize) -> Result<Self> {
        if kept.is_empty() || kept.len() >= n_sites {
            return Err(Error::invalid("kept sites must be a non-empty proper subset"));
        }
        if kept.windows(2).any(|w| w[0] >= w[1]) || kept[0] == 0 || *kept.last().unwrap() > n_sites {
            return Err(Error::invalid(format!(
                "kept sites must be strictly ascending within 1..={n_sites}, got {kept:?}"
            )));
        }
        Ok(Self { kept, n_sites })
    }

    /// Sites `1..=l`.
    pub fn block(l: usize, n_sites: usize) -> Result<Self> {
        Self::new((1..=l).collect(), n_sites)
    }

    /// `A₁ B₁ A₂ B₂` on a ring of `2(la + lb)` sites, keeping `A₁ ∪ A₂`.
    pub fn two_blocks(la: usize, lb: usize) -> Result<Self> {
        let n = 2 * (la + lb);
        let kept = (1..=la).chain(la + lb + 1..=2 * la + lb).collect();
        Self::new(kept, n)
    }

    pub fn kept_sites(&self) -> &[usize] {
        &self.kept
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

/// `ρ = Tr_B |ψ⟩⟨ψ| / ⟨ψ|ψ⟩`, kept basis ordered by ascending site index
/// (first kept site slowest).
pub fn reduced_density_matrix(state: &[f64], partition: &Partition) -> Result<DMatrix<f64>> {
    let n = partition.n_sites;
    let k = partition.kept.len();
    if k > MAX_KEPT_SITES {
        return Err(Error::capacity("kept sites", k, MAX_KEPT_SITES));
    }
    let dim = 3usize.pow(n as u32);
    if state.len() != dim {
        return Err(Error::invalid(format!(
            "state has {} amplitudes, expected 3^{n} = {dim}",
            state.len()
        )));
    }
    let norm2: f64 = crate::linalg::dot(state, state);
    if norm2 == 0.0 {
        return Err(Error::invalid("zero state"));
    }
    let rows = 3usize.pow(k as u32);
    let cols = dim / rows;
    let mut is_kept = vec![false; n];
    for &s in &partition.kept {
        is_kept[s - 1] = true;
    }
    // place weights of each site in the (kept, traced) reshape
    let mut place = vec![(false, 0usize); n];
    let (mut wk, mut wt) = (1usize, 1usize);
    for site in (0..n).rev() {
        if is_kept[site] {
            place[site] = (true, wk);
            wk *= 3;
        } else {
            place[site] = (false, wt);
            wt *= 3;
        }
    }
    let mut psi = DMatrix::zeros(rows, cols);
    let mut digits = vec![0usize; n];
    let (mut r, mut c) = (0usize, 0usize);
    for &amp in state {
        psi[(r, c)] = amp;
        // odometer increment, last site fastest
        for site in (0..n).rev() {
            let (kept, w) = place[site];
            digits[site] += 1;
            if digits[site] < 3 {
                if kept { r += w } else { c += w }
                break;
            }
            digits[site] = 0;
            if kept { r -= 2 * w } else { c -= 2 * w }
        }
    }
    let rho = &psi * psi.transpose() / norm2;
    Ok((&rho + rho.transpose()) * 0.5)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Descending, including (numerical) zeros.
    pub lambdas: Vec<f64>,
    /// `−ln λ` of the nonzero eigenvalues, ascending.
    pub ent_energies: Vec<f64>,
    /// `e₁ − e₀`; zero when fewer than two levels survive.
    pub gap: f64,
    pub degeneracy_profile: Vec<usize>,
    /// Number of eigenvalues below [`ZERO_EIGENVALUE`].
    pub rank_deficit: usize,
}

/// Relative tolerance of the degeneracy grouping in [`ent_spectrum_numeric`].
pub const PROFILE_TOL: f64 = 1e-6;

pub fn ent_spectrum_numeric(rdm: &DMatrix<f64>) -> SpectrumReport {
    let (mut lambdas, _) = crate::linalg::sym_eigen_ascending(rdm.clone());
    lambdas.reverse();
    spectrum_report(lambdas, PROFILE_TOL)
}

/// Build a report from descending eigenvalues.
pub fn spectrum_report(lambdas: Vec<f64>, rel_tol: f64) -> SpectrumReport {
    let ent_energies: Vec<f64> = lambdas
        .iter()
        .filter(|&&l| l > ZERO_EIGENVALUE)
        .map(|l| -l.ln())
        .collect();
    let rank_deficit = lambdas.len() - ent_energies.len();
    let gap = if ent_energies.len() > 1 {
        (ent_energies[1] - ent_energies[0]).max(0.0)
    } else {
        0.0
    };
    SpectrumReport {
        degeneracy_profile: degeneracy_profile(&ent_energies, rel_tol),
        lambdas,
        ent_energies,
        gap,
        rank_deficit,
    }
}

/// Multiplicities of consecutive groups: a value joins the current group if
/// it lies within `rel_tol` (relative to the group's first member; absolute
/// when that member is zero) of it.
pub fn degeneracy_profile(values: &[f64], rel_tol: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut first = f64::NAN;
    for &v in values {
        let scale = if first == 0.0 { 1.0 } else { first.abs() };
        if !out.is_empty() && (v - first).abs() <= rel_tol * scale {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
            first = v;
        }
    }
    out
}
