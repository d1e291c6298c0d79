//! MO integral transform, second quantization and the Jordan–Wigner mapping.
//!
//! Spin orbitals are interleaved: spin orbital `2p` is the α partner of spatial
//! orbital `p`, `2p + 1` the β partner. Qubit `j` carries spin orbital `j`.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::EriTensor;

/// Pauli coefficients below this magnitude are dropped after combination.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Largest imaginary part tolerated (and discarded) on a mapped coefficient.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// One- and two-electron integrals over `M` orbitals. `g` is stored in
/// chemists' notation, `(pq|rs)` at `((p·M + q)·M + r)·M + s`.
#[derive(Clone, Debug)]
pub struct MOIntegrals {
    pub h: DMatrix<f64>,
    pub g: Vec<f64>,
    pub n_orbitals: usize,
    pub core_constant: f64,
}

impl MOIntegrals {
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let m = self.n_orbitals;
        self.g[((p * m + q) * m + r) * m + s]
    }
}

/// Contracts index `axis` of a dense rank-4 tensor of shape `dims` with `c`
/// (`new[.., b, ..] = Σ_a c[a, b] old[.., a, ..]`).
fn transform_axis(t: &[f64], dims: [usize; 4], axis: usize, c: &DMatrix<f64>) -> (Vec<f64>, [usize; 4]) {
    let mut out_dims = dims;
    out_dims[axis] = c.ncols();
    let stride = |d: &[usize; 4], k: usize| d[k + 1..].iter().product::<usize>();
    let in_stride = stride(&dims, axis);
    let out_stride = stride(&out_dims, axis);
    let outer: usize = dims[..axis].iter().product();
    let n_in = dims[axis];
    let n_out = out_dims[axis];
    let block_out = n_out * out_stride;

    let mut out = vec![0.0; outer * block_out];
    out.par_chunks_mut(block_out).enumerate().for_each(|(o, chunk)| {
        let base = o * n_in * in_stride;
        for b in 0..n_out {
            let dst = &mut chunk[b * out_stride..(b + 1) * out_stride];
            for a in 0..n_in {
                let w = c[(a, b)];
                if w == 0.0 {
                    continue;
                }
                let src = &t[base + a * in_stride..base + (a + 1) * in_stride];
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += w * s);
            }
        }
    });
    (out, out_dims)
}

/// `h = Cᵀ h_ao C` and the ERI transformed one index at a time.
pub fn mo_transform(h_ao: &DMatrix<f64>, eri: &EriTensor, c: &DMatrix<f64>, core_constant: f64) -> MOIntegrals {
    let k = eri.n();
    let mut t = eri.to_dense();
    let mut dims = [k; 4];
    for axis in 0..4 {
        let (next, d) = transform_axis(&t, dims, axis, c);
        t = next;
        dims = d;
    }
    let h = c.transpose() * h_ao * c;
    MOIntegrals {
        h: (&h + h.transpose()) * 0.5,
        g: t,
        n_orbitals: c.ncols(),
        core_constant,
    }
}

/// A product of ladder operators, `(mode, is_creation)` left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coeff: f64,
    pub ops: Vec<(usize, bool)>,
}

#[derive(Clone, Debug, Default)]
pub struct FermionOperator {
    pub n_modes: usize,
    pub constant: f64,
    pub terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| FermionTerm {
                coeff: t.coeff,
                ops: t.ops.iter().rev().map(|&(p, d)| (p, !d)).collect(),
            })
            .collect();
        Self {
            n_modes: self.n_modes,
            constant: self.constant,
            terms,
        }
    }

    /// Canonical form of a normal-ordered operator: creators sorted
    /// descending, then annihilators sorted descending, like terms summed.
    /// Terms that are not normal ordered are rejected.
    pub fn canonical(&self) -> Result<HashMap<Vec<(usize, bool)>, f64>> {
        let mut out: HashMap<Vec<(usize, bool)>, f64> = HashMap::new();
        for t in &self.terms {
            let split = t.ops.iter().take_while(|o| o.1).count();
            if t.ops[split..].iter().any(|o| o.1) {
                return Err(Error::InvalidOperator("term is not normal ordered".into()));
            }
            let (mut cre, mut ann): (Vec<usize>, Vec<usize>) = (
                t.ops[..split].iter().map(|o| o.0).collect(),
                t.ops[split..].iter().map(|o| o.0).collect(),
            );
            let sign = match (sort_desc_with_sign(&mut cre), sort_desc_with_sign(&mut ann)) {
                (Some(a), Some(b)) => a * b,
                _ => continue,
            };
            let key: Vec<(usize, bool)> = cre
                .into_iter()
                .map(|p| (p, true))
                .chain(ann.into_iter().map(|p| (p, false)))
                .collect();
            *out.entry(key).or_insert(0.0) += sign * t.coeff;
        }
        out.retain(|_, v| v.abs() >= PRUNE_THRESHOLD);
        Ok(out)
    }
}

/// Bubble sort descending; `None` if an index repeats (the product vanishes).
fn sort_desc_with_sign(v: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] < v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// `H = Σ h_pq a_p† a_q + ½ Σ ⟨pq|rs⟩ a_p† a_q† a_s a_r + const` over
/// spin orbitals, with `⟨pq|rs⟩ = (pr|qs)` and spin conserved per electron.
pub fn second_quantize(mo: &MOIntegrals) -> FermionOperator {
    let m = mo.n_orbitals;
    let mut terms = Vec::new();
    for p in 0..m {
        for q in 0..m {
            let h = mo.h[(p, q)];
            if h == 0.0 {
                continue;
            }
            for s in 0..2 {
                terms.push(FermionTerm {
                    coeff: h,
                    ops: vec![(2 * p + s, true), (2 * q + s, false)],
                });
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let v = 0.5 * mo.g(p, r, q, s);
                    if v == 0.0 {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            let (pa, qb, sb, ra) = (2 * p + a, 2 * q + b, 2 * s + b, 2 * r + a);
                            if pa == qb || sb == ra {
                                continue;
                            }
                            terms.push(FermionTerm {
                                coeff: v,
                                ops: vec![(pa, true), (qb, true), (sb, false), (ra, false)],
                            });
                        }
                    }
                }
            }
        }
    }
    FermionOperator {
        n_modes: 2 * m,
        constant: mo.core_constant,
        terms,
    }
}

/// A Pauli word over at most 64 qubits. Qubit `j` is `X` if only bit `j` of
/// `x` is set, `Z` if only bit `j` of `z` is set and `Y` if both are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: Self = Self { x: 0, z: 0 };

    pub fn label(&self, n: usize) -> String {
        (0..n)
            .map(|j| match ((self.x >> j) & 1, (self.z >> j) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }

    pub fn parse(label: &str) -> Result<Self> {
        let mut p = Self::IDENTITY;
        for (j, ch) in label.chars().enumerate() {
            if j >= 64 {
                return Err(Error::Config("Pauli words are limited to 64 qubits".into()));
            }
            let (x, z) = match ch {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                _ => return Err(Error::Config(format!("bad Pauli character `{ch}`"))),
            };
            p.x |= x << j;
            p.z |= z << j;
        }
        Ok(p)
    }

    pub fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitHamiltonian {
    pub n_qubits: usize,
    /// Sorted by Pauli label; the identity term (if any) holds the constant.
    pub terms: Vec<(PauliString, f64)>,
}

impl QubitHamiltonian {
    /// Builds from labelled terms, summing duplicates and pruning.
    pub fn from_labels(n_qubits: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut acc: HashMap<PauliString, f64> = HashMap::new();
        for (l, c) in terms {
            if l.len() != n_qubits {
                return Err(Error::Config(format!("Pauli word `{l}` does not have {n_qubits} qubits")));
            }
            *acc.entry(PauliString::parse(l)?).or_insert(0.0) += c;
        }
        Ok(Self::from_map(n_qubits, acc))
    }

    fn from_map(n_qubits: usize, acc: HashMap<PauliString, f64>) -> Self {
        let mut terms: Vec<(PauliString, f64)> = acc.into_iter().filter(|(_, c)| c.abs() >= PRUNE_THRESHOLD).collect();
        terms.sort_by_cached_key(|(p, _)| p.label(n_qubits));
        Self { n_qubits, terms }
    }

    /// Coefficient of the identity word.
    pub fn constant(&self) -> f64 {
        self.terms
            .iter()
            .find(|(p, _)| *p == PauliString::IDENTITY)
            .map_or(0.0, |t| t.1)
    }

    /// Dense matrix in the computational basis (bit `j` of the row index is
    /// qubit `j`, set = occupied). Only for a handful of qubits.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for &(p, c) in &self.terms {
            let ny = p.n_y();
            if ny % 2 == 1 {
                return Err(Error::ComplexHamiltonian(p.label(self.n_qubits)));
            }
            let phase = if ny % 4 == 0 { c } else { -c };
            for b in 0..dim {
                let sign = if (p.z & b as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[(b ^ p.x as usize, b)] += phase * sign;
            }
        }
        Ok(m)
    }

    pub fn to_export(&self) -> HamiltonianExport {
        HamiltonianExport {
            n_qubits: self.n_qubits,
            constant: self.constant(),
            terms: self
                .terms
                .iter()
                .map(|(p, c)| PauliTerm {
                    pauli: p.label(self.n_qubits),
                    coeff: *c,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_export())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let e: HamiltonianExport = serde_json::from_str(text)?;
        let terms: Vec<(&str, f64)> = e.terms.iter().map(|t| (t.pauli.as_str(), t.coeff)).collect();
        Self::from_labels(e.n_qubits, &terms)
    }
}

impl fmt::Display for QubitHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in &self.terms {
            writeln!(f, "{:+.12} {}", c, p.label(self.n_qubits))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PauliTerm {
    pub pauli: String,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianExport {
    pub n_qubits: usize,
    pub constant: f64,
    pub terms: Vec<PauliTerm>,
}

/// Number of Pauli terms, identity included.
pub fn term_count(h: &QubitHamiltonian) -> usize {
    h.terms.len()
}

/// Products are tracked in `X^x Z^z` form where every coefficient is real:
/// `a_p = ½(X_p − X_p Z_p) Z_{<p}`, `a_p† = ½(X_p + X_p Z_p) Z_{<p}`.
type XzWord = (u64, u64);

fn ladder(p: usize, creation: bool) -> [(XzWord, f64); 2] {
    let below = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let s = if creation { 0.5 } else { -0.5 };
    [((bit, below), 0.5), ((bit, below | bit), s)]
}

/// `(X^{x1} Z^{z1})(X^{x2} Z^{z2}) = (−1)^{|z1 ∧ x2|} X^{x1⊕x2} Z^{z1⊕z2}`
#[inline]
fn multiply(a: XzWord, b: XzWord) -> (XzWord, f64) {
    let sign = if (a.1 & b.0).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    ((a.0 ^ b.0, a.1 ^ b.1), sign)
}

pub fn jordan_wigner(op: &FermionOperator) -> Result<QubitHamiltonian> {
    if op.n_modes > 64 {
        return Err(Error::SpaceTooLarge(format!("{} spin orbitals exceed the 64-qubit word size", op.n_modes)));
    }
    let mut acc: HashMap<XzWord, f64> = HashMap::new();
    acc.insert((0, 0), op.constant);
    let mut current: Vec<(XzWord, f64)> = Vec::with_capacity(16);
    let mut next: Vec<(XzWord, f64)> = Vec::with_capacity(16);
    for t in &op.terms {
        current.clear();
        current.push(((0, 0), t.coeff));
        for &(p, d) in &t.ops {
            next.clear();
            for &(w, c) in &current {
                for (lw, lc) in ladder(p, d) {
                    let (nw, s) = multiply(w, lw);
                    next.push((nw, c * lc * s));
                }
            }
            std::mem::swap(&mut current, &mut next);
        }
        for &(w, c) in &current {
            *acc.entry(w).or_insert(0.0) += c;
        }
    }

    // X^x Z^z = (−i)^{n_Y} · (Pauli word with Y where both bits are set)
    let mut out: HashMap<PauliString, f64> = HashMap::new();
    for ((x, z), c) in acc {
        let p = PauliString { x, z };
        let ny = p.n_y();
        if ny % 2 == 1 {
            if c.abs() > IMAGINARY_TOLERANCE {
                return Err(Error::NonHermitian(c.abs(), p.label(op.n_modes)));
            }
            continue;
        }
        out.insert(p, if ny % 4 == 0 { c } else { -c });
    }
    Ok(QubitHamiltonian::from_map(op.n_modes, out))
}
