//! Determinant-space FCI used as an independent cross-check of the qubit route.
//!
//! Orbitals are the Löwdin-orthogonalized AOs. Spin orbitals are blocked
//! (α orbitals `0..K`, β orbitals `K..2K`), matrix elements follow the
//! Slater–Condon rules with phases taken from explicit ladder-operator action.

use nalgebra::DMatrix;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::geometry::{nuclear_repulsion, Molecule};
use crate::integrals::IntegralSet;
use crate::linalg::{eigh, sym_power};

pub const MAX_FCI_ORBITALS: usize = 8;

struct SpinIntegrals {
    k: usize,
    h: DMatrix<f64>,
    /// Spatial `(pq|rs)`, chemists' notation.
    g: Vec<f64>,
}

impl SpinIntegrals {
    fn h(&self, p: usize, q: usize) -> f64 {
        if (p < self.k) != (q < self.k) {
            return 0.0;
        }
        self.h[(p % self.k, q % self.k)]
    }

    /// `⟨pq|rs⟩ = (pr|qs)` over spin orbitals.
    fn phys(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let k = self.k;
        if (p < k) != (r < k) || (q < k) != (s < k) {
            return 0.0;
        }
        let (p, q, r, s) = (p % k, q % k, r % k, s % k);
        self.g[((p * k + r) * k + q) * k + s]
    }

    fn anti(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.phys(p, q, r, s) - self.phys(p, q, s, r)
    }
}

/// Applies `a_p` (`create = false`) or `a_p†` to a determinant.
fn ladder(det: u64, p: usize, create: bool) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    if (det & bit != 0) == create {
        return None;
    }
    let sign = if (det & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((det ^ bit, sign))
}

fn apply(det: u64, ops: &[(usize, bool)]) -> Option<(u64, f64)> {
    ops.iter().rev().try_fold((det, 1.0), |(d, s), &(p, c)| {
        ladder(d, p, c).map(|(nd, ns)| (nd, s * ns))
    })
}

fn bits(d: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| d >> i & 1 == 1)
}

fn matrix_element(ints: &SpinIntegrals, bra: u64, ket: u64) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = bits(ket).collect();
            let mut e = 0.0;
            for (n, &i) in occ.iter().enumerate() {
                e += ints.h(i, i);
                for &j in &occ[..n] {
                    e += ints.anti(i, j, i, j);
                }
            }
            e
        }
        2 => {
            let i = (ket & diff).trailing_zeros() as usize;
            let a = (bra & diff).trailing_zeros() as usize;
            let (_, sign) = apply(ket, &[(a, true), (i, false)]).expect("single excitation");
            let mut e = ints.h(a, i);
            for j in bits(ket & bra) {
                e += ints.anti(a, j, i, j);
            }
            sign * e
        }
        4 => {
            let mut holes = bits(ket & diff);
            let (i, j) = (holes.next().unwrap(), holes.next().unwrap());
            let mut parts = bits(bra & diff);
            let (a, b) = (parts.next().unwrap(), parts.next().unwrap());
            let (_, sign) = apply(ket, &[(a, true), (b, true), (j, false), (i, false)]).expect("double excitation");
            sign * ints.anti(a, b, i, j)
        }
        _ => 0.0,
    }
}

fn brute_force_transform(x: &DMatrix<f64>, ints: &IntegralSet) -> SpinIntegrals {
    let k = x.nrows();
    let h = x.transpose() * &ints.h_core * x;
    let mut g = vec![0.0; k * k * k * k];
    for p in 0..k {
        for q in 0..k {
            for r in 0..k {
                for s in 0..k {
                    let mut v = 0.0;
                    for a in 0..k {
                        for b in 0..k {
                            let xab = x[(a, p)] * x[(b, q)];
                            if xab == 0.0 {
                                continue;
                            }
                            for c in 0..k {
                                for d in 0..k {
                                    v += xab * x[(c, r)] * x[(d, s)] * ints.eri.get(a, b, c, d);
                                }
                            }
                        }
                    }
                    g[((p * k + q) * k + r) * k + s] = v;
                }
            }
        }
    }
    SpinIntegrals { k, h, g }
}

/// Closed-shell (`S_z = 0`) FCI ground-state total energy.
pub fn fci_oracle(mol: &Molecule, basis: &BasisSet, ints: &IntegralSet) -> Result<f64> {
    let k = basis.len();
    if k > MAX_FCI_ORBITALS {
        return Err(Error::SpaceTooLarge(format!(
            "FCI oracle is limited to {MAX_FCI_ORBITALS} orbitals, got {k}"
        )));
    }
    let n_half = mol.n_electrons() / 2;
    let x = sym_power(&ints.overlap, -0.5);
    let spin = brute_force_transform(&x, ints);

    let strings: Vec<u64> = (0..1u64 << k).filter(|s| s.count_ones() as usize == n_half).collect();
    let dets: Vec<u64> = strings
        .iter()
        .flat_map(|&a| strings.iter().map(move |&b| a | (b << k)))
        .collect();
    let n = dets.len();
    let mut hmat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = matrix_element(&spin, dets[i], dets[j]);
            hmat[(i, j)] = v;
            hmat[(j, i)] = v;
        }
    }
    Ok(eigh(&hmat).0[0] + nuclear_repulsion(mol)?)
}
