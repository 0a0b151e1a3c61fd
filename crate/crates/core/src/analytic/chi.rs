//! Structure of the dominant two-block entanglement eigenvector and its
//! identification with the four-site spin-1/2 Heisenberg ground state.

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use super::spectra::FourBlockGrams;
use crate::ed::{reduced_density_matrix, Partition};
use crate::error::{Error, Result};
use crate::mps::{
    aklt_tensors, auxiliary_label_map, block_states, ortho_label_coefficients, periodic_state_vector,
    BlockLength,
};

/// Relative splitting below which the top eigenvalue counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    /// Explicit ring state and its reduced density matrix.
    BruteForce,
    /// Gram matrices from transfer-matrix powers.
    Transfer,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiReport {
    pub l: usize,
    /// Coefficient of `φ₊ ⊗ φ₊`.
    pub chi1: f64,
    /// Coefficient of `φ₋ ⊗ φ₋` (equal to those of `φ₀₁ ⊗ φ₁₀`, `φ₁₀ ⊗ φ₀₁`).
    pub chi2: f64,
    pub ratio: f64,
    /// The same ratio with the unnormalized `φ±` as expansion vectors.
    pub raw_ratio: f64,
    /// `χ₁² + 3χ₂²`.
    pub norm: f64,
    /// Full expansion `c[(p, q)]` on `{φ₊, φ₋, φ₀₁, φ₁₀}^{⊗2}`.
    #[serde(skip)]
    pub coefficients: Matrix4<f64>,
    pub method: ChiMethod,
}

fn report(l: usize, mut c: Matrix4<f64>, method: ChiMethod) -> ChiReport {
    if c[(0, 0)] < 0.0 {
        c.neg_mut();
    }
    let (chi1, chi2) = (c[(0, 0)], c[(1, 1)]);
    let g = crate::GAMMA.powi(l as i32);
    // squared norms of the unnormalized φ₊ and φ₋ are (1+3γ^l)/2 and (1−γ^l)/2
    let (np, nm) = ((1.0 + 3.0 * g) / 2.0, (1.0 - g) / 2.0);
    ChiReport {
        l,
        chi1,
        chi2,
        ratio: chi1 / chi2,
        raw_ratio: (chi1 / np) / (chi2 / nm),
        norm: chi1 * chi1 + 3.0 * chi2 * chi2,
        coefficients: c,
        method,
    }
}

fn check_top(values_desc: &[f64]) -> Result<()> {
    let top = values_desc[0];
    let mult = values_desc
        .iter()
        .take_while(|&&v| (top - v) <= DEGENERACY_TOL * top)
        .count();
    if mult > 1 {
        return Err(Error::Degenerate {
            what: "two-block entanglement ground state",
            multiplicity: mult,
        });
    }
    Ok(())
}

/// `χ₁, χ₂` from the explicit ring of `4l` sites (`l ≤ 3`).
pub fn chi_ratio(l: usize) -> Result<ChiReport> {
    let (c, _) = brute_force_coefficients(l)?;
    Ok(report(l, c, ChiMethod::BruteForce))
}

fn brute_force_coefficients(l: usize) -> Result<(Matrix4<f64>, Vec<f64>)> {
    if l == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    if 4 * l > 12 {
        return Err(Error::capacity("ring sites for the explicit chi route", 4 * l, 12));
    }
    let t = aklt_tensors();
    let psi = periodic_state_vector(&t, 4 * l)?;
    let rho = reduced_density_matrix(&psi, &Partition::two_blocks(l, l)?)?;
    let (mut values, vectors) = crate::linalg::sym_eigen_ascending(rho);
    values.reverse();
    check_top(&values)?;
    let top = vectors.column(vectors.ncols() - 1);
    let fam = block_states(&t, l)?;
    let d = fam.states[0].len();
    let c = Matrix4::from_fn(|p, q| {
        let (u, v) = (&fam.orthonormal[p], &fam.orthonormal[q]);
        let mut acc = 0.0;
        for i in 0..d {
            if u[i] == 0.0 {
                continue;
            }
            let row = &top.as_slice()[i * d..(i + 1) * d];
            acc += u[i] * crate::linalg::dot(v, row);
        }
        acc
    });
    Ok((c, values))
}

/// `χ₁, χ₂` from block Gram matrices; works for any `l` with a unique top
/// eigenvector (even `l`).
pub fn chi_ratio_transfer(l: usize) -> Result<ChiReport> {
    if l == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    let b = BlockLength::Finite(l);
    let grams = FourBlockGrams::new(b, b, b, b);
    let (m, root) = grams.symmetric_rdm();
    let (mut values, vectors) = crate::linalg::sym_eigen_ascending(m);
    values.reverse();
    check_top(&values)?;
    let y = vectors.column(15).into_owned();
    let g = &grams.a1.g;
    let units: Vec<_> = ortho_label_coefficients()
        .iter()
        .map(|c| {
            let n2 = (c.transpose() * g * c)[(0, 0)];
            if n2 > 1e-24 {
                c / n2.sqrt()
            } else {
                c * 0.0
            }
        })
        .collect();
    let c = Matrix4::from_fn(|p, q| {
        let u = DMatrix::from_fn(16, 1, |i, _| {
            let (a, cc, bb, d) = (i >> 3, (i >> 2) & 1, (i >> 1) & 1, i & 1);
            units[p][2 * a + cc] * units[q][2 * bb + d]
        });
        ((&root * u).transpose() * &y)[(0, 0)]
    });
    Ok(report(l, c, ChiMethod::Transfer))
}

/// Ground state of the four-site spin-1/2 Heisenberg ring on qubits
/// `(α, γ, β, δ)`, index `8α + 4γ + 2β + δ`.
pub fn heisenberg_reference() -> [f64; 16] {
    let a = 1.0 / 3f64.sqrt();
    let b = -1.0 / (2.0 * 3f64.sqrt());
    let mut v = [0.0; 16];
    v[0b0101] = a;
    v[0b1010] = a;
    for i in [0b0110, 0b1001, 0b0011, 0b1100] {
        v[i] = b;
    }
    v
}

/// Coefficients of the ideal form `χ₁ φ₊φ₊ + χ₂(φ₋φ₋ + φ₀₁φ₁₀ + φ₁₀φ₀₁)`.
pub fn coefficients_from_chi(chi1: f64, chi2: f64) -> Matrix4<f64> {
    let mut c = Matrix4::zeros();
    c[(0, 0)] = chi1;
    c[(1, 1)] = chi2;
    c[(2, 3)] = chi2;
    c[(3, 2)] = chi2;
    c
}

/// Map an expansion on `{φ₊, φ₋, φ₀₁, φ₁₀}^{⊗2}` through the auxiliary
/// relabeling on both factors, reading each `φ̃_{αβ}` as the qubit pair
/// `|αβ⟩`.
pub fn transformed_qubit_state(c: &Matrix4<f64>) -> [f64; 16] {
    let m = auxiliary_label_map();
    let w: Vec<_> = ortho_label_coefficients().iter().map(|u| m * u).collect();
    let mut out = [0.0; 16];
    for (i, o) in out.iter_mut().enumerate() {
        let (first, second) = (i >> 2, i & 3);
        for p in 0..4 {
            for q in 0..4 {
                *o += c[(p, q)] * w[p][first] * w[q][second];
            }
        }
    }
    out
}

/// Squared overlap of the transformed state with [`heisenberg_reference`].
pub fn heisenberg_overlap(c: &Matrix4<f64>) -> f64 {
    let psi = transformed_qubit_state(c);
    let r = heisenberg_reference();
    let ov: f64 = psi.iter().zip(&r).map(|(a, b)| a * b).sum();
    ov * ov
}

/// Squared overlap for the explicit `4l`-site ring (`l ≤ 3`).
pub fn heisenberg_gs_overlap(l: usize) -> Result<f64> {
    let (c, _) = brute_force_coefficients(l)?;
    Ok(heisenberg_overlap(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ideal_ratio_gives_heisenberg_state() {
        let chi2 = 1.0 / (2.0 * 3f64.sqrt());
        let c = coefficients_from_chi(3.0 * chi2, chi2);
        let psi = transformed_qubit_state(&c);
        for (a, b) in psi.iter().zip(heisenberg_reference()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(heisenberg_overlap(&c), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn routes_agree_at_l2() {
        let b = chi_ratio(2).unwrap();
        let t = chi_ratio_transfer(2).unwrap();
        assert!((b.coefficients - t.coefficients).norm() < 1e-12);
        assert_abs_diff_eq!(b.ratio, 3.126275, epsilon = 1e-6);
        assert_abs_diff_eq!(b.norm, 1.0, epsilon = 1e-12);
        // only the four structural entries are populated
        let ideal = coefficients_from_chi(b.chi1, b.chi2);
        assert!((b.coefficients - ideal).norm() < 1e-12);
    }

    #[test]
    fn odd_blocks_are_degenerate() {
        assert!(matches!(chi_ratio(1), Err(Error::Degenerate { .. })));
        assert!(matches!(chi_ratio(3), Err(Error::Degenerate { .. })));
        assert!(matches!(chi_ratio_transfer(3), Err(Error::Degenerate { .. })));
        assert!(matches!(chi_ratio(4), Err(Error::Capacity { .. })));
    }

    #[test]
    fn transfer_ratio_approaches_three() {
        let r: Vec<f64> = [2, 4, 6, 8].iter().map(|&l| chi_ratio_transfer(l).unwrap().ratio).collect();
        for w in r.windows(2) {
            assert!((w[1] - 3.0).abs() < (w[0] - 3.0).abs());
        }
        assert!((r[3] - 3.0).abs() < 1e-6);
    }
}
