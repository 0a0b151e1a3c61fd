//! Spin operators and the bilinear-biquadratic Hamiltonian
//! `H = Σ_i cos θ S_i·S_{i+1} + sin θ (S_i·S_{i+1})²` as a matrix-free
//! operator.
//!
//! Product-basis index of a configuration `(k_1, …, k_N)` is
//! `Σ_j k_j 3^{N-j}` (site 1 slowest). Local index `k` carries magnetization
//! `m = 1 - k`. Every matrix element of the BBH chain is real in this basis,
//! so the operator acts on `f64` vectors.
//!
//! `apply` is written in gather form (each output entry is produced by one
//! closure with a fixed summation order), so it is bit-reproducible for any
//! number of rayon threads.

use nalgebra::{Complex, DMatrix, Matrix2, Matrix3, SMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// One bond term in the two-site basis `3 a + b`.
pub type BondMatrix = SMatrix<f64, 9, 9>;

/// `arctan(1/3)`, where the BBH chain has the AKLT state as ground state.
pub const THETA_AKLT: f64 = 0.321_750_554_396_642_2;

/// Largest chain handled by [`build_bbh`]; `3^16` doubles is ~344 MB per vector.
pub const MAX_SITES: usize = 16;

/// `exp(-iπ S^z)` in the site basis, `diag(-1, 1, -1)`.
pub const STRING_PHASE: [f64; 3] = [-1.0, 1.0, -1.0];

/// Magnetization `m` of local basis index `k`.
#[inline]
pub fn magnetization(k: usize) -> i32 {
    1 - k as i32
}

#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    pub sx: Matrix3<C64>,
    pub sy: Matrix3<C64>,
    pub sz: Matrix3<C64>,
    pub pauli_x: Matrix2<C64>,
    pub pauli_y: Matrix2<C64>,
    pub pauli_z: Matrix2<C64>,
}

pub fn spin1_matrices() -> SpinOperatorSet {
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ir = C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    SpinOperatorSet {
        sx: Matrix3::new(z, r, z, r, z, r, z, r, z),
        sy: Matrix3::new(z, -ir, z, ir, z, -ir, z, ir, z),
        sz: Matrix3::new(one, z, z, z, z, z, z, z, -one),
        pauli_x: Matrix2::new(z, one, one, z),
        pauli_y: Matrix2::new(z, -i, i, z),
        pauli_z: Matrix2::new(one, z, z, -one),
    }
}

fn kron3(a: &Matrix3<C64>, b: &Matrix3<C64>) -> SMatrix<C64, 9, 9> {
    let mut out = SMatrix::<C64, 9, 9>::zeros();
    for (i, j, k, l) in itertools4() {
        out[(3 * i + k, 3 * j + l)] = a[(i, j)] * b[(k, l)];
    }
    out
}

fn itertools4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..81).map(|n| (n / 27, (n / 9) % 3, (n / 3) % 3, n % 3))
}

/// The two-site Heisenberg coupling `S_1·S_2` as a real 9×9 matrix.
pub fn heisenberg_bond() -> BondMatrix {
    let s = spin1_matrices();
    let m = kron3(&s.sx, &s.sx) + kron3(&s.sy, &s.sy) + kron3(&s.sz, &s.sz);
    debug_assert!(m.iter().all(|c| c.im.abs() < 1e-15));
    m.map(|c| c.re)
}

/// `cos θ M + sin θ M²` with `M = S_1·S_2`.
pub fn bbh_bond_matrix(theta: f64) -> BondMatrix {
    let m = heisenberg_bond();
    let h = m * theta.cos() + (m * m) * theta.sin();
    // symmetrize away rounding in M²
    (h + h.transpose()) * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub theta: f64,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    pub fn new(theta: f64, n_sites: usize, boundary: Boundary) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid(format!("chain needs at least 2 sites, got {n_sites}")));
        }
        if boundary == Boundary::Periodic && n_sites < 3 {
            return Err(Error::invalid("a periodic chain needs at least 3 sites"));
        }
        Ok(Self {
            theta,
            n_sites,
            boundary,
        })
    }

    pub fn open(theta: f64, n_sites: usize) -> Result<Self> {
        Self::new(theta, n_sites, Boundary::Open)
    }

    pub fn periodic(theta: f64, n_sites: usize) -> Result<Self> {
        Self::new(theta, n_sites, Boundary::Periodic)
    }

    /// Site pairs `(i, j)` (0-based) carrying a bond term.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut b: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((n - 1, 0));
        }
        b
    }
}

/// Basis states of one total-`S^z` sector.
#[derive(Debug, Clone)]
pub struct Sector {
    pub magnetization: i32,
    /// Full-space indices in ascending order.
    pub states: Vec<u32>,
    /// Full index → position in `states`, `u32::MAX` outside the sector.
    lookup: Vec<u32>,
}

impl Sector {
    pub fn new(n_sites: usize, magnetization: i32) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 3usize.pow(n_sites as u32);
        let mut lookup = vec![u32::MAX; dim];
        let mut states = Vec::new();
        for (full, slot) in lookup.iter_mut().enumerate() {
            if total_magnetization(full, n_sites) == magnetization {
                *slot = states.len() as u32;
                states.push(full as u32);
            }
        }
        if states.is_empty() {
            return Err(Error::invalid(format!(
                "no states with total S^z = {magnetization} on {n_sites} sites"
            )));
        }
        Ok(Self {
            magnetization,
            states,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, full: usize) -> Option<usize> {
        match self.lookup.get(full) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }
}

pub fn total_magnetization(mut index: usize, n_sites: usize) -> i32 {
    let mut m = 0;
    for _ in 0..n_sites {
        m += magnetization(index % 3);
        index /= 3;
    }
    m
}

fn check_sites(n: usize) -> Result<()> {
    if n > MAX_SITES {
        Err(Error::capacity("chain length", n, MAX_SITES))
    } else {
        Ok(())
    }
}

/// Anything the Krylov solver can multiply a vector by. Implementations must
/// be real symmetric.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Matrix-free BBH operator, optionally restricted to a magnetization sector.
#[derive(Debug, Clone)]
pub struct HamiltonianHandle {
    pub spec: HamiltonianSpec,
    pub bond_matrix: BondMatrix,
    /// Row `r` of the bond matrix as `(column, value)` pairs.
    rows: Vec<Vec<(usize, f64)>>,
    bonds: Vec<(usize, usize)>,
    /// `3^(N-1-j)`: weight of site `j` in a product-basis index.
    weights: Vec<usize>,
    sector: Option<Sector>,
}

/// Full-space operator: dimension `3^N`.
pub fn build_bbh(spec: HamiltonianSpec) -> Result<HamiltonianHandle> {
    HamiltonianHandle::new(spec, None)
}

/// Operator restricted to total `S^z = magnetization`.
pub fn build_bbh_sector(spec: HamiltonianSpec, magnetization: i32) -> Result<HamiltonianHandle> {
    let sector = Sector::new(spec.n_sites, magnetization)?;
    HamiltonianHandle::new(spec, Some(sector))
}

impl HamiltonianHandle {
    fn new(spec: HamiltonianSpec, sector: Option<Sector>) -> Result<Self> {
        check_sites(spec.n_sites)?;
        let bond_matrix = bbh_bond_matrix(spec.theta);
        let rows = (0..9)
            .map(|r| {
                (0..9)
                    .filter_map(|c| {
                        let v = bond_matrix[(r, c)];
                        (v.abs() > 1e-15).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        let n = spec.n_sites;
        let weights = (0..n).map(|j| 3usize.pow((n - 1 - j) as u32)).collect();
        Ok(Self {
            bonds: spec.bonds(),
            spec,
            bond_matrix,
            rows,
            weights,
            sector,
        })
    }

    pub fn full_dimension(&self) -> usize {
        3usize.pow(self.spec.n_sites as u32)
    }

    pub fn sector(&self) -> Option<&Sector> {
        self.sector.as_ref()
    }

    /// Lift a (sector) vector to the full `3^N` space.
    pub fn embed(&self, v: &[f64]) -> Vec<f64> {
        match &self.sector {
            None => v.to_vec(),
            Some(s) => {
                let mut out = vec![0.0; self.full_dimension()];
                for (&full, &x) in s.states.iter().zip(v) {
                    out[full as usize] = x;
                }
                out
            }
        }
    }

    /// `(H x)[row]` for the basis state with full index `full`.
    #[inline]
    fn row_value(&self, full: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(i, j) in &self.bonds {
            let (wi, wj) = (self.weights[i], self.weights[j]);
            let a = (full / wi) % 3;
            let b = (full / wj) % 3;
            let base = full - a * wi - b * wj;
            for &(c, h) in &self.rows[3 * a + b] {
                let target = base + (c / 3) * wi + (c % 3) * wj;
                let col = match &self.sector {
                    None => target,
                    Some(s) => s.lookup[target] as usize,
                };
                acc += h * x[col];
            }
        }
        acc
    }

    /// Dense matrix of the operator (small chains only, used as an oracle).
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        if dim > 6561 {
            return Err(Error::capacity("dense Hamiltonian dimension", dim, 6561));
        }
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for j in 0..dim {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            m.set_column(j, &nalgebra::DVector::from_column_slice(&col));
        }
        Ok(m)
    }
}

impl LinearOperator for HamiltonianHandle {
    fn dim(&self) -> usize {
        match &self.sector {
            None => self.full_dimension(),
            Some(s) => s.len(),
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        match &self.sector {
            None => y
                .par_iter_mut()
                .enumerate()
                .with_min_len(1024)
                .for_each(|(r, out)| *out = self.row_value(r, x)),
            Some(s) => y
                .par_iter_mut()
                .zip(s.states.par_iter())
                .with_min_len(1024)
                .for_each(|(out, &full)| *out = self.row_value(full as usize, x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigen_ascending;
    use approx::assert_abs_diff_eq;

    fn spectrum9(m: &BondMatrix) -> Vec<f64> {
        let d = DMatrix::from_iterator(9, 9, m.iter().copied());
        sym_eigen_ascending(d).0
    }

    #[test]
    fn theta_aklt_constant() {
        assert_eq!(THETA_AKLT, (1.0f64 / 3.0).atan());
    }

    #[test]
    fn spin_algebra() {
        let s = spin1_matrices();
        let i = C64::new(0.0, 1.0);
        let comm = s.sx * s.sy - s.sy * s.sx - s.sz * i;
        assert!(comm.norm() < 1e-15);
        let comm = s.sy * s.sz - s.sz * s.sy - s.sx * i;
        assert!(comm.norm() < 1e-15);
        let comm = s.sz * s.sx - s.sx * s.sz - s.sy * i;
        assert!(comm.norm() < 1e-15);
        let casimir = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz - Matrix3::identity() * C64::new(2.0, 0.0);
        assert!(casimir.norm() < 1e-15);
        for k in 0..3 {
            assert_eq!(s.sz[(k, k)].re, magnetization(k) as f64);
            // exp(-iπ m) is real
            let phase = (-std::f64::consts::PI * magnetization(k) as f64 * i).exp();
            assert_abs_diff_eq!(phase.re, STRING_PHASE[k], epsilon = 1e-15);
            assert_abs_diff_eq!(phase.im, 0.0, epsilon = 1e-15);
        }
        let p = s.pauli_x * s.pauli_y - s.pauli_y * s.pauli_x - s.pauli_z * (i * 2.0);
        assert!(p.norm() < 1e-15);
    }

    #[test]
    fn bond_spectra() {
        let ev = spectrum9(&bbh_bond_matrix(0.0));
        let expected = [-2.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-13);
        }
        let ev = spectrum9(&bbh_bond_matrix(THETA_AKLT));
        let s10 = 10f64.sqrt();
        for (i, v) in ev.iter().enumerate() {
            let want = if i < 4 { -2.0 / s10 } else { 4.0 / s10 };
            assert_abs_diff_eq!(*v, want, epsilon = 1e-13);
        }
        let ev = spectrum9(&bbh_bond_matrix(std::f64::consts::FRAC_PI_2));
        for (i, v) in ev.iter().enumerate() {
            assert_abs_diff_eq!(*v, if i < 8 { 1.0 } else { 4.0 }, epsilon = 1e-13);
        }
    }

    #[test]
    fn bond_matrix_symmetric() {
        for theta in [-0.7, 0.0, 0.2, THETA_AKLT, 1.3] {
            let h = bbh_bond_matrix(theta);
            assert!((h - h.transpose()).norm() == 0.0);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(HamiltonianSpec::open(0.0, 1).is_err());
        assert!(HamiltonianSpec::periodic(0.0, 2).is_err());
        let spec = HamiltonianSpec::open(0.0, 17).unwrap();
        assert!(matches!(build_bbh(spec), Err(Error::Capacity { .. })));
    }

    #[test]
    fn sector_dimensions() {
        // trinomial central coefficients
        assert_eq!(Sector::new(4, 0).unwrap().len(), 19);
        assert_eq!(Sector::new(6, 0).unwrap().len(), 141);
        assert_eq!(Sector::new(6, 6).unwrap().len(), 1);
        let total: usize = (-4..=4).map(|m| Sector::new(4, m).unwrap().len()).sum();
        assert_eq!(total, 81);
    }

    #[test]
    fn sector_operator_matches_full_block() {
        let spec = HamiltonianSpec::periodic(0.4, 5).unwrap();
        let full = build_bbh(spec).unwrap().to_dense().unwrap();
        let h = build_bbh_sector(spec, 1).unwrap();
        let block = h.to_dense().unwrap();
        let states = &h.sector().unwrap().states;
        for (a, &fa) in states.iter().enumerate() {
            for (b, &fb) in states.iter().enumerate() {
                assert_eq!(block[(a, b)], full[(fa as usize, fb as usize)]);
            }
        }
    }
}
