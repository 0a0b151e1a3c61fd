//! String order parameter `⟨S^z_i exp(−iπ Σ_{k=i+1}^{i+l} S^z_k) S^z_{i+l+1}⟩`.
//!
//! Three routes: the expectation value in an explicit state, transfer
//! matrices with dressed operators (AKLT only), and the closed form at the
//! AKLT point.

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::Serialize;

use crate::ed::{lowest_eigenpairs_with, LanczosConfig, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::mps::{aklt_tensors, canonical_vectors, BlockLength, SiteTensors};
use crate::spin_ops::{build_bbh_sector, magnetization, Boundary, HamiltonianSpec, STRING_PHASE};

#[derive(Debug, Clone, Serialize)]
pub struct SopPoint {
    pub theta: Option<f64>,
    pub n_sites: usize,
    /// Number of string sites between the two end operators.
    pub string_length: usize,
    pub value: f64,
    pub normalized: bool,
}

/// Expectation value in `state` (normalized internally). Sites are 1-based;
/// the string runs over `i+1..=i+l`.
pub fn sop_ed(state: &[f64], n: usize, i: usize, l: usize) -> Result<SopPoint> {
    if i == 0 || i + l + 1 > n {
        return Err(Error::invalid(format!(
            "string from site {i} of length {l} does not fit in {n} sites"
        )));
    }
    if state.len() != 3usize.pow(n as u32) {
        return Err(Error::invalid("state length is not 3^n"));
    }
    let weight = |site: usize| 3usize.pow((n - site) as u32);
    let (wi, wj) = (weight(i), weight(i + l + 1));
    let string: Vec<usize> = (i + 1..=i + l).map(weight).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for (idx, &a) in state.iter().enumerate() {
        let p = a * a;
        den += p;
        if p == 0.0 {
            continue;
        }
        let end = magnetization((idx / wi) % 3) * magnetization((idx / wj) % 3);
        if end == 0 {
            continue;
        }
        let sign: f64 = string.iter().map(|w| STRING_PHASE[(idx / w) % 3]).product();
        num += p * end as f64 * sign;
    }
    Ok(SopPoint {
        theta: None,
        n_sites: n,
        string_length: l,
        value: num / den,
        normalized: true,
    })
}

/// End-to-end string order (sites 1 and `n`) in the ground state of the BBH
/// chain, taken from the `S^z_tot = 0` sector.
pub fn sop_bbh(theta: f64, n: usize, boundary: Boundary, cfg: &LanczosConfig) -> Result<SopPoint> {
    let h = build_bbh_sector(HamiltonianSpec::new(theta, n, boundary)?, 0)?;
    let r = lowest_eigenpairs_with(&h, 2, cfg)?;
    if r.values[1] - r.values[0] < DEGENERACY_TOL {
        return Err(Error::Degenerate {
            what: "ground state for the string order parameter",
            multiplicity: 2,
        });
    }
    let psi = h.embed(&r.vectors[0]);
    let mut p = sop_ed(&psi, n, 1, n - 2)?;
    p.theta = Some(theta);
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct DressedOperators {
    /// `Σ_{kk′} (A_k ⊗ A_{k′}) ⟨k|S^z|k′⟩`.
    pub s_z_hat: Matrix4<f64>,
    /// `Σ_k (A_k ⊗ A_k) ⟨k|e^{−iπS^z}|k⟩`.
    pub e_tilde: Matrix4<f64>,
    pub gammas_tilde: [f64; 4],
    pub right_tilde: [Vector4<f64>; 4],
    pub left_tilde: [Vector4<f64>; 4],
}

fn sz_real() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 0.0, -1.0))
}

fn string_real() -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::from(STRING_PHASE))
}

/// Dressed operators and the eigendata of `Ẽ`, whose eigenvectors are the
/// transfer-matrix ones with the first two swapped: `R̃₀ = R₁`, `R̃₁ = R₀`.
pub fn dressed_operators(t: &SiteTensors) -> Result<DressedOperators> {
    let s_z_hat = t.dressed(&sz_real());
    let e_tilde = t.dressed(&string_real());
    let c = canonical_vectors();
    let right_tilde = [c[1], c[0], c[2], c[3]];
    let mut gammas_tilde = [0.0; 4];
    for (g, r) in gammas_tilde.iter_mut().zip(&right_tilde) {
        *g = r.dot(&(e_tilde * r));
        if (e_tilde * r - r * *g).norm() > 1e-14 {
            return Err(Error::invalid("string transfer matrix has non-canonical eigenvectors"));
        }
    }
    Ok(DressedOperators {
        s_z_hat,
        e_tilde,
        gammas_tilde,
        right_tilde,
        left_tilde: right_tilde,
    })
}

/// `Tr(E^{N−l−2} Ŝ^z Ẽ^l Ŝ^z)` for the AKLT ring, divided by `Tr(E^N)` when
/// `normalized`.
pub fn sop_transfer_aklt(l: usize, n: usize, normalized: bool) -> Result<SopPoint> {
    if l + 2 > n {
        return Err(Error::invalid(format!("string of length {l} does not fit in {n} sites")));
    }
    let t = aklt_tensors();
    let d = dressed_operators(&t)?;
    let e = t.transfer();
    let m = e.pow((n - l - 2) as u32) * d.s_z_hat * d.e_tilde.pow(l as u32) * d.s_z_hat;
    let mut value = m.trace();
    if normalized {
        value /= e.pow(n as u32).trace();
    }
    Ok(SopPoint {
        theta: Some(crate::spin_ops::THETA_AKLT),
        n_sites: n,
        string_length: l,
        value,
        normalized,
    })
}

/// `−(2/3)² − (2/3)²(−1/3)^{N−2}` (unnormalized transfer value), `−4/9` at
/// infinite size.
pub fn sop_asymptotic(n: BlockLength) -> Result<f64> {
    let c = 4.0 / 9.0;
    match n {
        BlockLength::Infinite => Ok(-c),
        BlockLength::Finite(n) if n < 2 => Err(Error::invalid("need at least 2 sites")),
        BlockLength::Finite(n) => Ok(-c - c * crate::GAMMA.powi(n as i32 - 2)),
    }
}

/// Frobenius norms of `T̂ Ŝ − Ŝ E` and `E Ŝ − Ŝ T̂`.
pub fn intertwining_residuals_for(e: &Matrix4<f64>, t_hat: &Matrix4<f64>, s_hat: &Matrix4<f64>) -> (f64, f64) {
    ((t_hat * s_hat - s_hat * e).norm(), (e * s_hat - s_hat * t_hat).norm())
}

/// Residuals of `Ẽ Ŝ^z = Ŝ^z E` and `E Ŝ^z = Ŝ^z Ẽ`.
pub fn intertwining_residuals(t: &SiteTensors) -> (f64, f64) {
    intertwining_residuals_for(&t.transfer(), &t.dressed(&string_real()), &t.dressed(&sz_real()))
}

/// Generalized condition for a pair of on-site operators: string operator
/// `t_op`, end operator `s_op`.
pub fn generalized_sop_residuals(t: &SiteTensors, s_op: &Matrix3<f64>, t_op: &Matrix3<f64>) -> (f64, f64) {
    intertwining_residuals_for(&t.transfer(), &t.dressed(t_op), &t.dressed(s_op))
}
