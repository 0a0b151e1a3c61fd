//! Lowest eigenpairs of a real symmetric operator.
//!
//! One eigenpair is found at a time by restarted Lanczos with full
//! reorthogonalization; converged vectors are locked and projected out of
//! every later Krylov space, which is how degenerate multiplets are resolved.
//! Small problems go straight to a dense solver.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, scale, sym_eigen_ascending};
use crate::spin_ops::LinearOperator;

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    /// Ascending.
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
    /// `‖H v − e v‖` per pair.
    pub residual_norms: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LanczosConfig {
    /// Required residual norm per eigenpair.
    pub tol: f64,
    /// Krylov dimension per cycle; 0 picks one from a ~256 MB budget.
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
    /// Operators up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
    /// Extra pairs computed beyond the request and discarded, so the last
    /// requested level is checked against its successor.
    pub buffer: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_basis: 0,
            max_restarts: 200,
            seed: 0x5eed_1a2c,
            dense_threshold: 800,
            buffer: 1,
        }
    }
}

impl LanczosConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

/// `k` lowest eigenpairs with the default configuration and tolerance `tol`.
pub fn lowest_eigenpairs<H: LinearOperator + ?Sized>(h: &H, k: usize, tol: f64) -> Result<EigenResult> {
    lowest_eigenpairs_with(h, k, &LanczosConfig::with_tol(tol))
}

pub fn lowest_eigenpairs_with<H: LinearOperator + ?Sized>(
    h: &H,
    k: usize,
    cfg: &LanczosConfig,
) -> Result<EigenResult> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(Error::invalid(format!("cannot compute {k} eigenpairs of a {dim}-dimensional operator")));
    }
    let want = (k + cfg.buffer).min(dim);
    let mut res = if dim <= cfg.dense_threshold {
        dense(h, want)
    } else {
        locked_lanczos(h, want, cfg)?
    };
    res.values.truncate(k);
    res.vectors.truncate(k);
    res.residual_norms.truncate(k);
    if let Some(&worst) = res.residual_norms.iter().max_by(|a, b| a.total_cmp(b)) {
        if worst > cfg.tol {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: worst,
            });
        }
    }
    Ok(res)
}

fn residual_norm<H: LinearOperator + ?Sized>(h: &H, v: &[f64], e: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    h.apply(v, &mut hv);
    axpy(-e, v, &mut hv);
    norm(&hv)
}

fn dense<H: LinearOperator + ?Sized>(h: &H, k: usize) -> EigenResult {
    let dim = h.dim();
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        h.apply(&e, &mut col);
        e[j] = 0.0;
        m.column_mut(j).copy_from_slice(&col);
    }
    let m = (&m + m.transpose()) * 0.5;
    let (values, vecs) = sym_eigen_ascending(m);
    let vectors: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut v = vecs.column(i).into_owned();
            crate::linalg::fix_sign(&mut v);
            v.as_slice().to_vec()
        })
        .collect();
    let residual_norms = vectors.iter().zip(&values).map(|(v, &e)| residual_norm(h, v, e)).collect();
    EigenResult {
        values: values[..k].to_vec(),
        vectors,
        residual_norms,
    }
}

/// Remove components along `basis` (classical Gram–Schmidt, applied twice).
fn project_out(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, w);
            axpy(-c, b, w);
        }
    }
}

fn random_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.random::<f64>() - 0.5).collect()
}

fn locked_lanczos<H: LinearOperator + ?Sized>(h: &H, k: usize, cfg: &LanczosConfig) -> Result<EigenResult> {
    let dim = h.dim();
    let budget = (256usize << 20) / (8 * dim);
    let max_basis = if cfg.max_basis > 0 { cfg.max_basis } else { budget.clamp(24, 100) };
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let mut residual_norms = Vec::with_capacity(k);
    let mut total_iters = 0;

    for j in 0..k {
        let mut start = random_vector(dim, cfg.seed.wrapping_add(j as u64 * 0x9e37_79b9));
        let m_max = max_basis.min(dim - locked.len());
        let mut best = f64::INFINITY;
        let mut converged = None;
        for _ in 0..cfg.max_restarts {
            let (x, e, r, iters) = lanczos_cycle(h, &locked, &start, m_max, cfg.tol)?;
            total_iters += iters;
            best = best.min(r);
            if r <= cfg.tol {
                converged = Some((x, e, r));
                break;
            }
            start = x;
        }
        let Some((mut x, _, _)) = converged else {
            return Err(Error::NoConvergence {
                iterations: total_iters,
                residual: best,
            });
        };
        project_out(&locked, &mut x);
        let n = norm(&x);
        scale(1.0 / n, &mut x);
        let mut hx = vec![0.0; dim];
        h.apply(&x, &mut hx);
        let e = dot(&x, &hx);
        axpy(-e, &x, &mut hx);
        values.push(e);
        residual_norms.push(norm(&hx));
        locked.push(x);
    }

    // locking finds levels in ascending order up to round-off; sort anyway
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(EigenResult {
        values: order.iter().map(|&i| values[i]).collect(),
        residual_norms: order.iter().map(|&i| residual_norms[i]).collect(),
        vectors: order.iter().map(|&i| std::mem::take(&mut locked[i])).collect(),
    })
}

/// One Lanczos cycle in the complement of `locked`. Returns the lowest Ritz
/// pair, its true residual norm and the number of matvecs.
fn lanczos_cycle<H: LinearOperator + ?Sized>(
    h: &H,
    locked: &[Vec<f64>],
    start: &[f64],
    m_max: usize,
    tol: f64,
) -> Result<(Vec<f64>, f64, f64, usize)> {
    let dim = h.dim();
    let mut v0 = start.to_vec();
    project_out(locked, &mut v0);
    let n0 = norm(&v0);
    if n0 == 0.0 {
        return Err(Error::invalid("start vector lies in the locked subspace"));
    }
    scale(1.0 / n0, &mut v0);

    let mut basis = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut ritz: Option<(f64, Vec<f64>)> = None;

    for i in 0..m_max {
        h.apply(&basis[i], &mut w);
        let a = dot(&basis[i], &w);
        axpy(-a, &basis[i], &mut w);
        if i > 0 {
            axpy(-beta[i - 1], &basis[i - 1], &mut w);
        }
        project_out(locked, &mut w);
        project_out(&basis, &mut w);
        alpha.push(a);
        let b = norm(&w);

        let m = alpha.len();
        let last = i + 1 == m_max || b <= 1e-13 * a.abs().max(1.0);
        if last || (m >= 8 && m % 4 == 0) {
            let t = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let (vals, vecs) = sym_eigen_ascending(t);
            let s = vecs.column(0).into_owned();
            let estimate = (b * s[m - 1]).abs();
            ritz = Some((vals[0], s.as_slice().to_vec()));
            if estimate < 0.1 * tol || last {
                break;
            }
        }
        beta.push(b);
        let mut next = std::mem::take(&mut w);
        scale(1.0 / b, &mut next);
        basis.push(next);
        w = vec![0.0; dim];
    }

    let (theta, s) = ritz.expect("at least one Ritz evaluation");
    let mut x = vec![0.0; dim];
    for (c, v) in s.iter().zip(&basis) {
        axpy(*c, v, &mut x);
    }
    let nx = norm(&x);
    scale(1.0 / nx, &mut x);
    let r = residual_norm(h, &x, theta);
    Ok((x, theta, r, s.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_ops::{build_bbh, build_bbh_sector, HamiltonianSpec, THETA_AKLT};
    use approx::assert_abs_diff_eq;

    fn lanczos_only() -> LanczosConfig {
        LanczosConfig {
            dense_threshold: 0,
            ..LanczosConfig::default()
        }
    }

    #[test]
    fn aklt_ring_ground_energy() {
        let h = build_bbh(HamiltonianSpec::periodic(THETA_AKLT, 6).unwrap()).unwrap();
        let r = lowest_eigenpairs_with(&h, 2, &lanczos_only()).unwrap();
        assert_abs_diff_eq!(r.values[0], -12.0 / 10f64.sqrt(), epsilon = 1e-9);
        assert!(r.values[1] - r.values[0] > 0.1, "ground state is unique");
    }

    #[test]
    fn open_aklt_fourfold() {
        let h = build_bbh(HamiltonianSpec::open(THETA_AKLT, 4).unwrap()).unwrap();
        let r = lowest_eigenpairs_with(&h, 5, &lanczos_only()).unwrap();
        for v in &r.values[..4] {
            assert_abs_diff_eq!(*v, -6.0 / 10f64.sqrt(), epsilon = 1e-9);
        }
        assert!(r.values[4] - r.values[3] > 0.1);
        for i in 0..5 {
            for j in 0..5 {
                let d = dot(&r.vectors[i], &r.vectors[j]);
                assert_abs_diff_eq!(d, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn singlet_bond() {
        let h = build_bbh(HamiltonianSpec::open(0.0, 2).unwrap()).unwrap();
        let r = lowest_eigenpairs(&h, 1, 1e-10).unwrap();
        assert_abs_diff_eq!(r.values[0], -2.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_dense_spectrum() {
        for theta in [-0.5, 0.0, 0.2, 0.9] {
            let spec = HamiltonianSpec::open(theta, 6).unwrap();
            let h = build_bbh_sector(spec, 0).unwrap();
            let dense = sym_eigen_ascending(h.to_dense().unwrap()).0;
            let r = lowest_eigenpairs_with(&h, 6, &lanczos_only()).unwrap();
            for (a, b) in r.values.iter().zip(&dense) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
            }
            assert!(r.values[0] >= dense[0] - 1e-12);
        }
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let h = build_bbh_sector(HamiltonianSpec::periodic(0.2, 8).unwrap(), 0).unwrap();
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| lowest_eigenpairs_with(&h, 2, &lanczos_only()).unwrap())
        };
        let (a, b) = (run(1), run(3));
        assert_eq!(a.values[0].to_bits(), b.values[0].to_bits());
        assert_eq!(a.vectors[1], b.vectors[1]);
    }
}
