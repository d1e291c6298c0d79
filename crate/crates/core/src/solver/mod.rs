//! Ground-state solvers for qubit Hamiltonians.

mod fci;

pub use fci::fci_oracle;

use std::collections::HashMap;

use log::debug;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::qubit::QubitHamiltonian;

pub const MAX_QUBITS: usize = 24;
/// Largest subspace the dense path will diagonalize.
pub const MAX_DENSE_DIM: usize = 4096;
const LANCZOS_TOL: f64 = 1e-10;
const MAX_LANCZOS_STEPS: usize = 400;

/// Particle number and `2·S_z` (α on even qubits, β on odd qubits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub n_electrons: usize,
    pub twice_sz: i32,
}

impl Sector {
    pub fn singlet(n_electrons: usize) -> Self {
        Self {
            n_electrons,
            twice_sz: 0,
        }
    }

    fn contains(&self, b: u64) -> bool {
        const EVEN: u64 = 0x5555_5555_5555_5555;
        let na = (b & EVEN).count_ones() as i32;
        let nb = (b & !EVEN).count_ones() as i32;
        (na + nb) as usize == self.n_electrons && na - nb == self.twice_sz
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Lanczos,
    Dense,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundState {
    pub energy: f64,
    pub n_qubits: usize,
    /// `None` means the full Fock space was searched.
    pub sector: Option<Sector>,
    pub dimension: usize,
    pub iterations: usize,
}

/// `H` restricted to a set of computational basis states. Pauli terms are
/// grouped by their X mask, so each group maps a basis state to one partner.
struct SectorOperator {
    basis: Vec<u64>,
    groups: Vec<(u64, Vec<(u64, f64)>)>,
    /// Row-compressed copy of the matrix when it fits in `CSR_BUDGET` entries.
    csr: Option<Csr>,
}

struct Csr {
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<f64>,
}

/// Upper bound on `dimension × x-groups` for caching the sparse matrix.
const CSR_BUDGET: usize = 1 << 26;

impl SectorOperator {
    fn new(h: &QubitHamiltonian, sector: Option<Sector>) -> Result<Self> {
        let n = h.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::SpaceTooLarge(format!("{n} qubits exceed the limit of {MAX_QUBITS}")));
        }
        let mut groups: Vec<(u64, Vec<(u64, f64)>)> = Vec::new();
        let mut slot: HashMap<u64, usize> = HashMap::new();
        for &(p, c) in &h.terms {
            let ny = p.n_y();
            if ny % 2 == 1 {
                return Err(Error::ComplexHamiltonian(p.label(n)));
            }
            // Y = i X Z, so a word with n_Y (even) Y factors is (−1)^{n_Y/2} X^x Z^z.
            let c = if ny % 4 == 0 { c } else { -c };
            let g = *slot.entry(p.x).or_insert_with(|| {
                groups.push((p.x, Vec::new()));
                groups.len() - 1
            });
            groups[g].1.push((p.z, c));
        }
        let basis: Vec<u64> = match sector {
            None => (0..1u64 << n).collect(),
            Some(s) => (0..1u64 << n).filter(|&b| s.contains(b)).collect(),
        };
        if basis.is_empty() {
            let s = sector.expect("full space is never empty");
            return Err(Error::EmptySector {
                n_qubits: n,
                n_electrons: s.n_electrons,
                sz: s.twice_sz,
            });
        }
        let mut op = Self {
            basis,
            groups,
            csr: None,
        };
        if op.dim().saturating_mul(op.groups.len()) <= CSR_BUDGET && op.dim() <= u32::MAX as usize {
            op.csr = Some(op.compress());
        }
        Ok(op)
    }

    fn compress(&self) -> Csr {
        let rows: Vec<Vec<(u32, f64)>> = (0..self.dim())
            .into_par_iter()
            .map(|i| self.row(i).filter(|e| e.1 != 0.0).map(|(j, v)| (j as u32, v)).collect())
            .collect();
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        for r in rows {
            for (j, v) in r {
                columns.push(j);
                values.push(v);
            }
            offsets.push(columns.len());
        }
        Csr {
            offsets,
            columns,
            values,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `⟨b_i| X^x Z^z |b_j⟩` summed over the group, for `b_j = b_i ⊕ x`.
    #[inline]
    fn group_element(zs: &[(u64, f64)], bj: u64) -> f64 {
        zs.iter()
            .map(|&(z, c)| if (z & bj).count_ones() % 2 == 0 { c } else { -c })
            .sum()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let bi = self.basis[i];
        self.groups.iter().filter_map(move |(x, zs)| {
            let bj = bi ^ x;
            let j = self.basis.binary_search(&bj).ok()?;
            Some((j, Self::group_element(zs, bj)))
        })
    }

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let w: Vec<f64> = match &self.csr {
            Some(m) => (0..self.dim())
                .into_par_iter()
                .map(|i| {
                    let r = m.offsets[i]..m.offsets[i + 1];
                    m.columns[r.clone()]
                        .iter()
                        .zip(&m.values[r])
                        .map(|(&j, &hij)| hij * v[j as usize])
                        .sum()
                })
                .collect(),
            None => (0..self.dim())
                .into_par_iter()
                .map(|i| self.row(i).map(|(j, hij)| hij * v[j]).sum())
                .collect(),
        };
        DVector::from_vec(w)
    }

    fn diagonal(&self) -> Vec<f64> {
        let zs = self.groups.iter().find(|g| g.0 == 0).map(|g| g.1.as_slice()).unwrap_or(&[]);
        self.basis.iter().map(|&b| Self::group_element(zs, b)).collect()
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, hij) in self.row(i) {
                m[(i, j)] += hij;
            }
        }
        m
    }
}

/// Lowest eigenvalue by Lanczos with full reorthogonalization.
pub fn ground_state(h: &QubitHamiltonian, sector: Option<Sector>) -> Result<GroundState> {
    ground_state_with(h, sector, Method::Lanczos)
}

pub fn ground_state_with(h: &QubitHamiltonian, sector: Option<Sector>, method: Method) -> Result<GroundState> {
    let op = SectorOperator::new(h, sector)?;
    let (energy, iterations) = match method {
        Method::Dense => {
            if op.dim() > MAX_DENSE_DIM {
                return Err(Error::SpaceTooLarge(format!(
                    "dense diagonalization of dimension {} (limit {MAX_DENSE_DIM})",
                    op.dim()
                )));
            }
            (eigh(&op.dense()).0[0], 1)
        }
        Method::Lanczos => lanczos(&op)?,
    };
    Ok(GroundState {
        energy,
        n_qubits: h.n_qubits,
        sector,
        dimension: op.dim(),
        iterations,
    })
}

/// Smallest diagonal element of `H` in the searched space (an upper bound on
/// the ground-state energy).
pub fn lowest_diagonal(h: &QubitHamiltonian, sector: Option<Sector>) -> Result<f64> {
    let op = SectorOperator::new(h, sector)?;
    Ok(op.diagonal().into_iter().fold(f64::INFINITY, f64::min))
}

fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let (vals, vecs) = eigh(&t);
    (vals[0], vecs[(k - 1, 0)])
}

fn lanczos(op: &SectorOperator) -> Result<(f64, usize)> {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut v = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    v /= v.norm();

    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let max_steps = n.min(MAX_LANCZOS_STEPS);
    let mut residual = f64::INFINITY;

    for k in 0..max_steps {
        let mut w = op.apply(&v);
        let a = v.dot(&w);
        alpha.push(a);
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&w);
                w.axpy(-proj, q, 1.0);
            }
        }
        let b = w.norm();
        let (theta, last) = lowest_ritz(&alpha, &beta);
        residual = (b * last).abs();
        debug!("lanczos step {k}: theta = {theta:.12}, residual = {residual:.2e}");
        if residual < LANCZOS_TOL * theta.abs().max(1.0) || b < 1e-14 || k + 1 == n {
            return Ok((theta, k + 1));
        }
        beta.push(b);
        v = w / b;
    }
    Err(Error::EigensolverNotConverged(residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_z() {
        let h = QubitHamiltonian::from_labels(1, &[("Z", -1.0)]).unwrap();
        for m in [Method::Lanczos, Method::Dense] {
            assert!((ground_state_with(&h, None, m).unwrap().energy + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn y_pair_phase() {
        // YY on |01⟩,|10⟩ has eigenvalues ±1; XX + YY has −2 in the one-particle sector.
        let h = QubitHamiltonian::from_labels(2, &[("XX", 1.0), ("YY", 1.0)]).unwrap();
        let d = h.to_dense().unwrap();
        assert_eq!(d[(1, 2)], 2.0);
        // A lone α electron can only sit on qubit 0, so XX + YY cannot act.
        let gs = ground_state_with(&h, Some(Sector { n_electrons: 1, twice_sz: 1 }), Method::Dense).unwrap();
        assert_eq!((gs.dimension, gs.energy), (1, 0.0));
        let any = ground_state_with(&h, None, Method::Dense).unwrap();
        assert!((any.energy + 2.0).abs() < 1e-12);
    }

    #[test]
    fn odd_y_is_complex() {
        let h = QubitHamiltonian::from_labels(2, &[("XY", 1.0)]).unwrap();
        assert!(matches!(ground_state(&h, None), Err(Error::ComplexHamiltonian(_))));
    }

    #[test]
    fn empty_sector() {
        let h = QubitHamiltonian::from_labels(2, &[("ZZ", 1.0)]).unwrap();
        let err = ground_state(&h, Some(Sector::singlet(3))).unwrap_err();
        assert!(matches!(err, Error::EmptySector { n_electrons: 3, .. }));
    }

    #[test]
    fn too_many_qubits() {
        let h = QubitHamiltonian::from_labels(25, &[(&"Z".repeat(25), 1.0)]).unwrap();
        assert!(matches!(ground_state(&h, None), Err(Error::SpaceTooLarge(_))));
    }
}
