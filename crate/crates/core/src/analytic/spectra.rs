//! Closed-form reduced-density-matrix spectra of the periodic AKLT state.

use nalgebra::{DMatrix, SMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mps::{block_overlap_gram, BlockLength, GramMatrix};
use crate::GAMMA;

/// Spectrum of a contiguous block of `l` sites in a ring of `n` sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContiguousSpectrum {
    pub l: usize,
    #[serde(serialize_with = "ser_len")]
    pub n: BlockLength,
    /// `λ₀` (singlet) followed by the threefold `λ₁ = λ₂ = λ₃`.
    pub lambdas: [f64; 4],
    pub normalized: bool,
}

fn ser_len<S: serde::Serializer>(l: &BlockLength, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(l)
}

impl ContiguousSpectrum {
    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// `e₁ − e₀` of the entanglement energies `−ln λ`. Zero at odd `l`,
    /// where the triplet is on top.
    pub fn entanglement_gap(&self) -> f64 {
        let d = self.lambdas[0].ln() - self.lambdas[1].ln();
        d.max(0.0)
    }
}

pub fn contiguous_lambdas(l: usize, n: BlockLength, normalized: bool) -> Result<ContiguousSpectrum> {
    if l == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    let (rest, total) = match n {
        BlockLength::Finite(n) if l >= n => {
            return Err(Error::invalid(format!("block length {l} must be below ring size {n}")))
        }
        BlockLength::Finite(n) => (GAMMA.powi((n - l) as i32), GAMMA.powi(n as i32)),
        BlockLength::Infinite => (0.0, 0.0),
    };
    let gl = GAMMA.powi(l as i32);
    let l0 = (1.0 + 3.0 * gl) * (1.0 + 3.0 * rest) / 4.0;
    let l1 = (1.0 - gl) * (1.0 - rest) / 4.0;
    let norm = if normalized { 1.0 + 3.0 * total } else { 1.0 };
    Ok(ContiguousSpectrum {
        l,
        n,
        lambdas: [l0 / norm, l1 / norm, l1 / norm, l1 / norm],
        normalized,
    })
}

/// Auxiliary quantities behind the quadratic-root eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Intermediates {
    Ring { r: f64, s: f64 },
    HalfInfinite { zeta: [f64; 4] },
}

/// Sixteen eigenvalues of the two-block reduced density matrix, stored in
/// index order `λ₁..λ₁₆` and grouped by index classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonContiguousSpectrum {
    pub la: usize,
    #[serde(serialize_with = "ser_len")]
    pub lb: BlockLength,
    pub lambdas: [f64; 16],
    /// `(first index, length)` of each index class (0-based).
    pub classes: Vec<(usize, usize)>,
    pub intermediates: Intermediates,
    pub normalized: bool,
}

impl NonContiguousSpectrum {
    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// One value per index class with its multiplicity.
    pub fn class_values(&self) -> Vec<(f64, usize)> {
        self.classes.iter().map(|&(i, n)| (self.lambdas[i], n)).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.1).collect()
    }

    pub fn sorted_descending(&self) -> Vec<f64> {
        let mut v = self.lambdas.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

const RING_CLASSES: [(usize, usize); 6] = [(0, 5), (5, 3), (8, 1), (9, 3), (12, 3), (15, 1)];
const HALF_CLASSES: [(usize, usize); 6] = [(0, 5), (5, 3), (8, 3), (11, 3), (14, 1), (15, 1)];

fn fill(classes: &[(usize, usize)], values: [f64; 6]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (&(start, len), v) in classes.iter().zip(values) {
        out[start..start + len].iter_mut().for_each(|x| *x = v);
    }
    out
}

/// Two `A` blocks of `la` sites separated by two `B` blocks of `lb` sites on
/// a ring of `2(la + lb)` sites. The unnormalized values sum to `1 + 3γ^N`.
pub fn noncontiguous_lambdas(la: usize, lb: usize, normalized: bool) -> Result<NonContiguousSpectrum> {
    if la == 0 || lb == 0 {
        return Err(Error::invalid("block lengths must be at least 1"));
    }
    let ga = GAMMA.powi(la as i32);
    let gb = GAMMA.powi(lb as i32);
    let (pa, ma) = (1.0 + 3.0 * ga, 1.0 - ga);
    let (pb, mb) = (1.0 + 3.0 * gb, 1.0 - gb);
    let v1 = ma * ma * mb * mb / 16.0;
    let v6 = ma * ma * pb * mb / 16.0;
    let v10 = pa * ma * mb * mb / 16.0;
    let v13 = pa * ma * pb * mb / 16.0;
    let s = v13 * v13;
    let r = (pa * pa * pb * pb + 3.0 * pa * pa * mb * mb + 3.0 * ma * ma * pb * pb + ma * ma * mb * mb) / 64.0;
    let d = (r * r - 4.0 * s).max(0.0).sqrt();
    let mut lambdas = fill(&RING_CLASSES, [v1, v6, 0.5 * (r - d), v10, v13, 0.5 * (r + d)]);
    if normalized {
        let total: f64 = lambdas.iter().sum();
        lambdas.iter_mut().for_each(|x| *x /= total);
    }
    Ok(NonContiguousSpectrum {
        la,
        lb: BlockLength::Finite(lb),
        lambdas,
        classes: RING_CLASSES.to_vec(),
        intermediates: Intermediates::Ring { r, s },
        normalized,
    })
}

/// Variant where one of the two `B` blocks is infinitely long. These values
/// sum to one without rescaling.
pub fn noncontiguous_lambdas_half_infinite(la: usize, lb: usize) -> Result<NonContiguousSpectrum> {
    if la == 0 || lb == 0 {
        return Err(Error::invalid("block lengths must be at least 1"));
    }
    let ga = GAMMA.powi(la as i32);
    let gb = GAMMA.powi(lb as i32);
    let (pa, ma) = (1.0 + 3.0 * ga, 1.0 - ga);
    let (pb, mb) = (1.0 + 3.0 * gb, 1.0 - gb);
    let z1 = (1.0 + ga) * ma * (1.0 + gb);
    let z2 = pa * ma.powi(3) * pb * mb;
    let z3 = pa * pa + ma * ma * (1.0 + 2.0 * gb);
    let z4 = pa * pa * ma * ma * pb * mb;
    let d1 = (z1 * z1 - z2).max(0.0).sqrt();
    let d3 = (z3 * z3 - 4.0 * z4).max(0.0).sqrt();
    let lambdas = fill(
        &HALF_CLASSES,
        [
            ma * ma * mb / 16.0,
            pa * ma * mb / 16.0,
            (z1 + d1) / 16.0,
            (z1 - d1) / 16.0,
            (z3 + d3) / 32.0,
            (z3 - d3) / 32.0,
        ],
    );
    Ok(NonContiguousSpectrum {
        la,
        lb: BlockLength::Finite(lb),
        lambdas,
        classes: HALF_CLASSES.to_vec(),
        intermediates: Intermediates::HalfInfinite { zeta: [z1, z2, z3, z4] },
        normalized: true,
    })
}

/// Ring-of-four-blocks Gram matrices: `A₁, B₁, A₂, B₂` in ring order.
#[derive(Debug, Clone)]
pub struct FourBlockGrams {
    pub a1: GramMatrix,
    pub b1: GramMatrix,
    pub a2: GramMatrix,
    pub b2: GramMatrix,
}

impl FourBlockGrams {
    pub fn new(a1: BlockLength, b1: BlockLength, a2: BlockLength, b2: BlockLength) -> Self {
        Self {
            a1: block_overlap_gram(a1),
            b1: block_overlap_gram(b1),
            a2: block_overlap_gram(a2),
            b2: block_overlap_gram(b2),
        }
    }

    /// Gram matrices of the sixteen products `φ^{A₁}_{αγ}φ^{A₂}_{βδ}` and
    /// `φ^{B₁}_{γβ}φ^{B₂}_{δα}`, index `8α + 4γ + 2β + δ`.
    pub fn product_grams(&self) -> (SMatrix<f64, 16, 16>, SMatrix<f64, 16, 16>) {
        let split = |i: usize| (i >> 3, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        let (a1, a2, b1, b2) = (&self.a1.g, &self.a2.g, &self.b1.g, &self.b2.g);
        let ga = SMatrix::<f64, 16, 16>::from_fn(|i, j| {
            let (a, c, b, d) = split(i);
            let (ap, cp, bp, dp) = split(j);
            a1[(2 * a + c, 2 * ap + cp)] * a2[(2 * b + d, 2 * bp + dp)]
        });
        let gb = SMatrix::<f64, 16, 16>::from_fn(|i, j| {
            let (a, c, b, d) = split(i);
            let (ap, cp, bp, dp) = split(j);
            b1[(2 * c + b, 2 * cp + bp)] * b2[(2 * d + a, 2 * dp + ap)]
        });
        (ga, gb)
    }

    /// Symmetric form `Ga^{1/2} Gbᵀ Ga^{1/2}` of the reduced density matrix
    /// (unnormalized) and the square root `Ga^{1/2}`.
    pub fn symmetric_rdm(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let (ga, gb) = self.product_grams();
        let ga = DMatrix::from_iterator(16, 16, ga.iter().copied());
        let gb = DMatrix::from_iterator(16, 16, gb.iter().copied());
        let eig = nalgebra::SymmetricEigen::new(ga);
        let sqrt_w = eig.eigenvalues.map(|w| w.max(0.0).sqrt());
        let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_w) * eig.eigenvectors.transpose();
        let m = &root * gb.transpose() * &root;
        ((&m + m.transpose()) * 0.5, root)
    }
}

/// Reduced-density-matrix spectrum of `A₁ ∪ A₂` for arbitrary block lengths
/// (any of which may be infinite), computed from transfer-matrix Gram
/// matrices only. Unnormalized, descending.
pub fn noncontiguous_lambdas_gram(grams: &FourBlockGrams) -> Vec<f64> {
    let (m, _) = grams.symmetric_rdm();
    let (mut v, _) = crate::linalg::sym_eigen_ascending(m);
    v.reverse();
    v
}
