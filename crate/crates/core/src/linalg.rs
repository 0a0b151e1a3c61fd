//! Small vector kernels shared by the eigensolver and the RDM code.
//!
//! Reductions split the input into fixed-size chunks and add the partial sums
//! in chunk order, so results are bit-identical for any rayon thread count.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

const CHUNK: usize = 4096;
const PAR_THRESHOLD: usize = 1 << 15;

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < PAR_THRESHOLD {
        return chunked_dot(x, y);
    }
    let partial: Vec<f64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

fn chunked_dot(x: &[f64], y: &[f64]) -> f64 {
    x.chunks(CHUNK)
        .zip(y.chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += a * x`
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    if y.len() < PAR_THRESHOLD {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
    } else {
        y.par_iter_mut()
            .zip(x.par_iter())
            .with_min_len(CHUNK)
            .for_each(|(yi, xi)| *yi += a * xi);
    }
}

pub(crate) fn scale(a: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= a);
}

/// Eigen-decomposition of a real symmetric matrix with eigenvalues sorted
/// ascending; column `i` of the returned matrix belongs to value `i`.
pub(crate) fn sym_eigen_ascending(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Flip the sign of a vector so that its largest-magnitude entry is positive.
/// Gives reproducible eigenvector signs.
pub(crate) fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() + 1e-12 {
            best = x;
        }
    }
    if best < 0.0 {
        v.neg_mut();
    }
}
