//! Bond-dimension-2 AKLT matrix product state.
//!
//! Two-copy (transfer-matrix) space uses the index `2α + α′` for `|α α′⟩`,
//! i.e. `E = Σ_k A_k ⊗ A_k` with the standard Kronecker layout. All tensors
//! are real, so `A*_k = A_k`.
//!
//! Block states `|φ^l_{αβ}⟩ = Σ ⟨α|A_{i₁}⋯A_{i_l}|β⟩ |i₁⋯i_l⟩` are stored in
//! label order `2α + β`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Longest periodic chain built explicitly (`3^14` amplitudes).
pub const MAX_STATE_SITES: usize = 14;
/// Longest block built explicitly (`3^9` amplitudes per label).
pub const MAX_BLOCK_SITES: usize = 9;

/// Label index of `(α, β)`.
#[inline]
pub fn label(alpha: usize, beta: usize) -> usize {
    2 * alpha + beta
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteTensors {
    /// `A_k` for local index `k` (`m = 1 - k`).
    pub a: [Matrix2<f64>; 3],
}

impl SiteTensors {
    pub fn bond_dimension(&self) -> usize {
        2
    }

    /// Frobenius norms of `Σ A A† − I` and `Σ A† A − I`.
    pub fn canonical_residuals(&self) -> (f64, f64) {
        let id = Matrix2::identity();
        let right: Matrix2<f64> = self.a.iter().map(|a| a * a.transpose()).sum();
        let left: Matrix2<f64> = self.a.iter().map(|a| a.transpose() * a).sum();
        ((right - id).norm(), (left - id).norm())
    }

    /// `Σ_k A_k ⊗ A_k`.
    pub fn transfer(&self) -> Matrix4<f64> {
        self.a.iter().map(|a| a.kronecker(a)).sum()
    }

    /// `Σ_k A_k ⊗ A_k ⟨k|O|k′⟩`-style dressing with a real site operator:
    /// `Σ_{kk′} O_{kk′} A_k ⊗ A_{k′}`.
    pub fn dressed(&self, op: &nalgebra::Matrix3<f64>) -> Matrix4<f64> {
        let mut out = Matrix4::zeros();
        for k in 0..3 {
            for kp in 0..3 {
                if op[(k, kp)] != 0.0 {
                    out += self.a[k].kronecker(&self.a[kp]) * op[(k, kp)];
                }
            }
        }
        out
    }
}

pub fn aklt_tensors() -> SiteTensors {
    let s23 = (2.0f64 / 3.0).sqrt();
    let s13 = (1.0f64 / 3.0).sqrt();
    SiteTensors {
        a: [
            Matrix2::new(0.0, s23, 0.0, 0.0),
            Matrix2::new(-s13, 0.0, 0.0, s13),
            Matrix2::new(0.0, 0.0, -s23, 0.0),
        ],
    }
}

/// The four canonical eigenvectors `(|00⟩+|11⟩)/√2, (|00⟩−|11⟩)/√2, |01⟩, |10⟩`.
pub fn canonical_vectors() -> [Vector4<f64>; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        Vector4::new(r, 0.0, 0.0, r),
        Vector4::new(r, 0.0, 0.0, -r),
        Vector4::new(0.0, 1.0, 0.0, 0.0),
        Vector4::new(0.0, 0.0, 1.0, 0.0),
    ]
}

#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub e: Matrix4<f64>,
    pub gammas: [f64; 4],
    pub right: [Vector4<f64>; 4],
    pub left: [Vector4<f64>; 4],
}

impl TransferMatrix {
    /// `Σ γ_i |R_i⟩⟨L_i|`.
    pub fn reconstruct(&self) -> Matrix4<f64> {
        (0..4)
            .map(|i| self.right[i] * self.left[i].transpose() * self.gammas[i])
            .sum()
    }

    /// `E^l` built from the eigendata, so `γ^l` enters exactly as `powi`.
    pub fn power(&self, l: usize) -> Matrix4<f64> {
        (0..4)
            .map(|i| self.right[i] * self.left[i].transpose() * self.gammas[i].powi(l as i32))
            .sum()
    }

    /// `lim E^l = |R₀⟩⟨L₀|` (the other eigenvalues have modulus < 1).
    pub fn power_infinite(&self) -> Matrix4<f64> {
        self.right[0] * self.left[0].transpose()
    }

    pub fn power_of(&self, l: BlockLength) -> Matrix4<f64> {
        match l {
            BlockLength::Finite(l) => self.power(l),
            BlockLength::Infinite => self.power_infinite(),
        }
    }
}

/// Eigendecomposition of the transfer matrix of symmetric (`E = Eᵀ`) tensors.
///
/// Eigenvectors are fixed by projecting the canonical vectors onto the
/// eigenspaces, so degenerate eigenvalues get the conventional basis rather
/// than whatever rotation the dense solver returns. The leading pair is
/// listed first.
pub fn transfer_matrix(t: &SiteTensors) -> Result<TransferMatrix> {
    let e = t.transfer();
    if (e - e.transpose()).norm() > 1e-14 {
        return Err(Error::invalid("transfer matrix is not symmetric"));
    }
    let eig = nalgebra::SymmetricEigen::new(e);
    let mut right = [Vector4::zeros(); 4];
    let mut gammas = [0.0; 4];
    for (i, c) in canonical_vectors().iter().enumerate() {
        // projector onto the eigenspace of the eigenvalue c is closest to
        let g = (c.transpose() * e * c)[(0, 0)];
        let mut p = Vector4::zeros();
        for j in 0..4 {
            if (eig.eigenvalues[j] - g).abs() < 1e-10 {
                let v = eig.eigenvectors.column(j);
                p += v * v.dot(c);
            }
        }
        if p.norm() < 0.5 {
            return Err(Error::invalid(
                "transfer matrix eigenvectors are not the canonical ones",
            ));
        }
        gammas[i] = g;
        let p = p.normalize();
        // keep the exact canonical vector when the projection reproduces it
        right[i] = if (p - c).norm() < 1e-12 { *c } else { p };
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| gammas[b].abs().total_cmp(&gammas[a].abs()));
    let mut tm = TransferMatrix {
        e,
        gammas: order.map(|i| gammas[i]),
        right: order.map(|i| right[i]),
        left: order.map(|i| right[i]),
    };
    // with a stable sort the AKLT order R0..R3 survives; restore exact γ
    for g in tm.gammas.iter_mut() {
        for exact in [1.0, crate::GAMMA] {
            if (*g - exact).abs() < 1e-14 {
                *g = exact;
            }
        }
    }
    Ok(tm)
}

/// Products `A_{i₁}⋯A_{i_l}` for every configuration, in product-basis order.
fn chain_products(t: &SiteTensors, l: usize) -> Vec<Matrix2<f64>> {
    let mut prods = vec![Matrix2::identity()];
    for _ in 0..l {
        prods = prods
            .iter()
            .flat_map(|p| t.a.iter().map(move |a| p * a))
            .collect();
    }
    prods
}

/// Unnormalized periodic MPS `Tr(A_{i₁}⋯A_{i_N})` on `3^n` amplitudes.
pub fn periodic_state_vector(t: &SiteTensors, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("periodic state needs at least one site"));
    }
    if n > MAX_STATE_SITES {
        return Err(Error::capacity("periodic state sites", n, MAX_STATE_SITES));
    }
    // split the ring into a left half (slow digits) and a right half
    let h = n / 2;
    let left = chain_products(t, h);
    let right = chain_products(t, n - h);
    let width = right.len();
    let mut psi = vec![0.0; left.len() * width];
    psi.par_chunks_mut(width)
        .zip(left.par_iter())
        .for_each(|(row, p)| {
            for (out, s) in row.iter_mut().zip(&right) {
                *out = (p * s).trace();
            }
        });
    Ok(psi)
}

/// Block length that may be the `l → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLength {
    Finite(usize),
    Infinite,
}

impl BlockLength {
    /// `γ^l`, zero for the infinite block.
    pub fn gamma_pow(self) -> f64 {
        match self {
            BlockLength::Finite(l) => crate::GAMMA.powi(l as i32),
            BlockLength::Infinite => 0.0,
        }
    }
}

impl std::fmt::Display for BlockLength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockLength::Finite(l) => write!(f, "{l}"),
            BlockLength::Infinite => f.write_str("inf"),
        }
    }
}

impl From<usize> for BlockLength {
    fn from(l: usize) -> Self {
        BlockLength::Finite(l)
    }
}

/// Overlaps `g[(2α+β, 2α′+β′)] = ⟨φ_{αβ}|φ_{α′β′}⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub l: BlockLength,
    pub g: Matrix4<f64>,
}

/// Gram matrix of the AKLT block states from `⟨φ_{αβ}|φ_{α′β′}⟩ = (E^l)[2α′+α, 2β′+β]`.
pub fn block_overlap_gram(l: BlockLength) -> GramMatrix {
    let tm = transfer_matrix(&aklt_tensors()).expect("AKLT transfer matrix");
    gram_from_power(l, &tm.power_of(l))
}

fn gram_from_power(l: BlockLength, el: &Matrix4<f64>) -> GramMatrix {
    let mut g = Matrix4::zeros();
    for (a, b, ap, bp) in labels4() {
        g[(label(a, b), label(ap, bp))] = el[(2 * ap + a, 2 * bp + b)];
    }
    GramMatrix { l, g }
}

fn labels4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|n| (n >> 3, (n >> 2) & 1, (n >> 1) & 1, n & 1))
}

/// Order of the orthonormal block basis.
pub const ORTHO_NAMES: [&str; 4] = ["plus", "minus", "01", "10"];

/// Coefficients of `φ₊, φ₋, φ₀₁, φ₁₀` (before normalization) on the labels.
pub fn ortho_label_coefficients() -> [Vector4<f64>; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        Vector4::new(r, 0.0, 0.0, r),
        Vector4::new(r, 0.0, 0.0, -r),
        Vector4::new(0.0, 1.0, 0.0, 0.0),
        Vector4::new(0.0, 0.0, 1.0, 0.0),
    ]
}

#[derive(Debug, Clone)]
pub struct BlockStateFamily {
    pub l: usize,
    /// `|φ_{αβ}⟩` at index `2α + β`.
    pub states: [Vec<f64>; 4],
    /// Normalized `φ₊, φ₋, φ₀₁, φ₁₀`. A member that vanishes identically
    /// (`φ₊` at `l = 1`) is stored as the zero vector.
    pub orthonormal: [Vec<f64>; 4],
    /// Squared norms of `φ₊, φ₋, φ₀₁, φ₁₀` before normalization.
    pub norms_sq: [f64; 4],
}

impl BlockStateFamily {
    pub fn phi(&self, alpha: usize, beta: usize) -> &[f64] {
        &self.states[label(alpha, beta)]
    }

    fn from_states(l: usize, states: [Vec<f64>; 4]) -> Self {
        let dim = states[0].len();
        let coeffs = ortho_label_coefficients();
        let mut norms_sq = [0.0; 4];
        let orthonormal = std::array::from_fn(|p| {
            let mut v = vec![0.0; dim];
            for (lab, c) in coeffs[p].iter().enumerate() {
                if *c != 0.0 {
                    crate::linalg::axpy(*c, &states[lab], &mut v);
                }
            }
            let n2 = dot(&v, &v);
            norms_sq[p] = n2;
            if n2 > 1e-24 {
                crate::linalg::scale(1.0 / n2.sqrt(), &mut v);
            } else {
                v.iter_mut().for_each(|x| *x = 0.0);
            }
            v
        });
        Self {
            l,
            states,
            orthonormal,
            norms_sq,
        }
    }

    /// Explicit Gram matrix (inner products of the stored vectors).
    pub fn gram(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| dot(&self.states[i], &self.states[j]))
    }
}

pub fn block_states(t: &SiteTensors, l: usize) -> Result<BlockStateFamily> {
    if l == 0 {
        return Err(Error::invalid("block length must be positive"));
    }
    if l > MAX_BLOCK_SITES {
        return Err(Error::capacity("block sites", l, MAX_BLOCK_SITES));
    }
    let prods = chain_products(t, l);
    let states = std::array::from_fn(|lab| {
        let (a, b) = (lab / 2, lab % 2);
        prods.iter().map(|p| p[(a, b)]).collect()
    });
    Ok(BlockStateFamily::from_states(l, states))
}

/// Label-space form of the auxiliary relabeling: if `c` are coefficients on
/// `φ_{αβ}`, the result holds the same state's coefficients on `φ̃_{αβ}`,
/// where `φ_{α,0} = φ̃_{α,1}` and `φ_{α,1} = −φ̃_{α,0}`.
pub fn auxiliary_label_map() -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for a in 0..2 {
        m[(label(a, 1), label(a, 0))] = 1.0;
        m[(label(a, 0), label(a, 1))] = -1.0;
    }
    m
}

/// Relabel a family into the rotated auxiliary basis `|β̃⟩ ∝ |1−β⟩`.
///
/// Under this map `φ₊ = (φ̃₀₁ − φ̃₁₀)/√2`, `φ₋ = (φ̃₀₁ + φ̃₁₀)/√2`,
/// `φ₀₁ = −φ̃₀₀` and `φ₁₀ = φ̃₁₁`. Applying it twice gives minus the
/// original family.
pub fn auxiliary_basis_transform(family: &BlockStateFamily) -> BlockStateFamily {
    let s = &family.states;
    let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<_>>();
    let states = [neg(&s[1]), s[0].clone(), neg(&s[3]), s[2].clone()];
    BlockStateFamily::from_states(family.l, states)
}
