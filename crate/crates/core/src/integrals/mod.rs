//! One- and two-electron integrals over contracted Cartesian Gaussians,
//! evaluated with McMurchie–Davidson Hermite expansions.

mod boys;
mod eri;

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::{BasisFunction, BasisSet};
use crate::error::Result;
use crate::geometry::Molecule;

pub use boys::boys;
pub use eri::EriTensor;

/// AO-basis integrals for one geometry.
#[derive(Clone, Debug)]
pub struct IntegralSet {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    pub h_core: DMatrix<f64>,
    pub eri: EriTensor,
}

impl IntegralSet {
    pub fn compute(basis: &BasisSet, mol: &Molecule) -> Result<Self> {
        let overlap = overlap_matrix(basis);
        let kinetic = kinetic_matrix(basis);
        let nuclear = nuclear_attraction_matrix(basis, mol)?;
        let h_core = &kinetic + &nuclear;
        let eri = eri_tensor(basis)?;
        Ok(Self {
            overlap,
            kinetic,
            nuclear,
            h_core,
            eri,
        })
    }

    pub fn n_ao(&self) -> usize {
        self.overlap.nrows()
    }

    /// Writes S, h_core and the unique ERIs as whitespace-separated index/value
    /// triplets (quintuplets for the ERIs), one section per matrix.
    pub fn write_debug_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.n_ao();
        writeln!(out, "# n_ao {n}")?;
        for (name, m) in [("overlap", &self.overlap), ("h_core", &self.h_core)] {
            writeln!(out, "# {name} row col value")?;
            for i in 0..n {
                for j in 0..n {
                    writeln!(out, "{i} {j} {:.16e}", m[(i, j)])?;
                }
            }
        }
        writeln!(out, "# eri i j k l value (chemists' notation, i>=j, k>=l, ij>=kl)")?;
        for i in 0..n {
            for j in 0..=i {
                for k in 0..=i {
                    let lmax = if k == i { j } else { k };
                    for l in 0..=lmax {
                        writeln!(out, "{i} {j} {k} {l} {:.16e}", self.eri.get(i, j, k, l))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Hermite expansion coefficient `E_t^{ij}` for one Cartesian axis.
/// `qx` is the separation `A_x − B_x` of the two centres.
fn hermite_e(i: i32, j: i32, t: i32, qx: f64, a: f64, b: f64) -> f64 {
    let p = a + b;
    let q = a * b / p;
    if t < 0 || t > i + j || i < 0 || j < 0 {
        0.0
    } else if i == 0 && j == 0 && t == 0 {
        (-q * qx * qx).exp()
    } else if j == 0 {
        hermite_e(i - 1, j, t - 1, qx, a, b) / (2.0 * p) - (q * qx / a) * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) as f64 * hermite_e(i - 1, j, t + 1, qx, a, b)
    } else {
        hermite_e(i, j - 1, t - 1, qx, a, b) / (2.0 * p)
            + (q * qx / b) * hermite_e(i, j - 1, t, qx, a, b)
            + (t + 1) as f64 * hermite_e(i, j - 1, t + 1, qx, a, b)
    }
}

/// Hermite Coulomb integral `R_{tuv}^n(p, PC)`; `boys_table[m] = F_m(p|PC|²)`.
fn hermite_r(t: i32, u: i32, v: i32, n: usize, p: f64, pc: [f64; 3], boys_table: &[f64]) -> f64 {
    if t < 0 || u < 0 || v < 0 {
        return 0.0;
    }
    if t == 0 && u == 0 && v == 0 {
        return (-2.0 * p).powi(n as i32) * boys_table[n];
    }
    if t > 0 {
        (t - 1) as f64 * hermite_r(t - 2, u, v, n + 1, p, pc, boys_table)
            + pc[0] * hermite_r(t - 1, u, v, n + 1, p, pc, boys_table)
    } else if u > 0 {
        (u - 1) as f64 * hermite_r(t, u - 2, v, n + 1, p, pc, boys_table)
            + pc[1] * hermite_r(t, u - 1, v, n + 1, p, pc, boys_table)
    } else {
        (v - 1) as f64 * hermite_r(t, u, v - 2, n + 1, p, pc, boys_table)
            + pc[2] * hermite_r(t, u, v - 1, n + 1, p, pc, boys_table)
    }
}

fn boys_table(max_n: usize, t: f64) -> Result<Vec<f64>> {
    (0..=max_n).map(|n| boys(n, t)).collect()
}

fn gaussian_product(a: f64, ra: &[f64; 3], b: f64, rb: &[f64; 3]) -> [f64; 3] {
    let p = a + b;
    [0, 1, 2].map(|k| (a * ra[k] + b * rb[k]) / p)
}

fn powers(f: &BasisFunction) -> [i32; 3] {
    f.powers.map(|x| x as i32)
}

fn primitive_overlap(a: f64, la: [i32; 3], ra: &[f64; 3], b: f64, lb: [i32; 3], rb: &[f64; 3]) -> f64 {
    let p = a + b;
    let mut s = (PI / p).powf(1.5);
    for k in 0..3 {
        s *= hermite_e(la[k], lb[k], 0, ra[k] - rb[k], a, b);
    }
    s
}

fn primitive_kinetic(a: f64, la: [i32; 3], ra: &[f64; 3], b: f64, lb: [i32; 3], rb: &[f64; 3]) -> f64 {
    let shifted = |k: usize, d: i32| {
        let mut l = lb;
        l[k] += d;
        if l[k] < 0 {
            0.0
        } else {
            primitive_overlap(a, la, ra, b, l, rb)
        }
    };
    let ltot = (lb[0] + lb[1] + lb[2]) as f64;
    let mut t = b * (2.0 * ltot + 3.0) * primitive_overlap(a, la, ra, b, lb, rb);
    for k in 0..3 {
        t -= 2.0 * b * b * shifted(k, 2);
        t -= 0.5 * (lb[k] * (lb[k] - 1)) as f64 * shifted(k, -2);
    }
    t
}

fn primitive_nuclear(
    a: f64,
    la: [i32; 3],
    ra: &[f64; 3],
    b: f64,
    lb: [i32; 3],
    rb: &[f64; 3],
    rc: &[f64; 3],
) -> Result<f64> {
    let p = a + b;
    let rp = gaussian_product(a, ra, b, rb);
    let pc = [0, 1, 2].map(|k| rp[k] - rc[k]);
    let r2 = pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2];
    let lsum: usize = (0..3).map(|k| (la[k] + lb[k]) as usize).sum();
    let table = boys_table(lsum, p * r2)?;
    let mut v = 0.0;
    for t in 0..=la[0] + lb[0] {
        let ex = hermite_e(la[0], lb[0], t, ra[0] - rb[0], a, b);
        for u in 0..=la[1] + lb[1] {
            let ey = hermite_e(la[1], lb[1], u, ra[1] - rb[1], a, b);
            for w in 0..=la[2] + lb[2] {
                let ez = hermite_e(la[2], lb[2], w, ra[2] - rb[2], a, b);
                v += ex * ey * ez * hermite_r(t, u, w, 0, p, pc, &table);
            }
        }
    }
    Ok(2.0 * PI / p * v)
}

fn contract_one<F>(fa: &BasisFunction, fb: &BasisFunction, mut prim: F) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for (a, ca) in fa.exponents.iter().zip(&fa.coefficients) {
        for (b, cb) in fb.exponents.iter().zip(&fb.coefficients) {
            acc += ca * cb * prim(*a, *b)?;
        }
    }
    Ok(acc)
}

fn one_electron_matrix<F>(basis: &BasisSet, f: F) -> Result<DMatrix<f64>>
where
    F: Fn(&BasisFunction, &BasisFunction) -> Result<f64>,
{
    let n = basis.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = f(&basis.functions[i], &basis.functions[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// AO overlap matrix `S_{μν} = ⟨φ_μ|φ_ν⟩`.
pub fn overlap_matrix(basis: &BasisSet) -> DMatrix<f64> {
    one_electron_matrix(basis, |fa, fb| {
        contract_one(fa, fb, |a, b| {
            Ok(primitive_overlap(a, powers(fa), &fa.center, b, powers(fb), &fb.center))
        })
    })
    .expect("overlap evaluation is infallible")
}

pub fn kinetic_matrix(basis: &BasisSet) -> DMatrix<f64> {
    one_electron_matrix(basis, |fa, fb| {
        contract_one(fa, fb, |a, b| {
            Ok(primitive_kinetic(a, powers(fa), &fa.center, b, powers(fb), &fb.center))
        })
    })
    .expect("kinetic evaluation is infallible")
}

pub fn nuclear_attraction_matrix(basis: &BasisSet, mol: &Molecule) -> Result<DMatrix<f64>> {
    one_electron_matrix(basis, |fa, fb| {
        let mut v = 0.0;
        for atom in mol.atoms() {
            v -= atom.z as f64
                * contract_one(fa, fb, |a, b| {
                    primitive_nuclear(a, powers(fa), &fa.center, b, powers(fb), &fb.center, &atom.position)
                })?;
        }
        Ok(v)
    })
}

/// `h_core = T + V`.
pub fn core_hamiltonian(basis: &BasisSet, mol: &Molecule) -> Result<DMatrix<f64>> {
    Ok(kinetic_matrix(basis) + nuclear_attraction_matrix(basis, mol)?)
}

struct PairData {
    p: f64,
    center: [f64; 3],
    coef: f64,
    /// Hermite coefficients per axis, index t.
    e: [Vec<f64>; 3],
}

fn pair_data(fa: &BasisFunction, fb: &BasisFunction) -> Vec<PairData> {
    let la = powers(fa);
    let lb = powers(fb);
    let mut out = Vec::with_capacity(fa.exponents.len() * fb.exponents.len());
    for (a, ca) in fa.exponents.iter().zip(&fa.coefficients) {
        for (b, cb) in fb.exponents.iter().zip(&fb.coefficients) {
            let e = [0, 1, 2].map(|k| {
                (0..=la[k] + lb[k])
                    .map(|t| hermite_e(la[k], lb[k], t, fa.center[k] - fb.center[k], *a, *b))
                    .collect::<Vec<_>>()
            });
            out.push(PairData {
                p: a + b,
                center: gaussian_product(*a, &fa.center, *b, &fb.center),
                coef: ca * cb,
                e,
            });
        }
    }
    out
}

fn contracted_eri(bra: &[PairData], ket: &[PairData]) -> Result<f64> {
    let mut acc = 0.0;
    for x in bra {
        for y in ket {
            let p = x.p;
            let q = y.p;
            let alpha = p * q / (p + q);
            let pq = [0, 1, 2].map(|k| x.center[k] - y.center[k]);
            let r2 = pq[0] * pq[0] + pq[1] * pq[1] + pq[2] * pq[2];
            let lmax = x.e.iter().chain(y.e.iter()).map(|v| v.len() - 1).sum::<usize>();
            let table = boys_table(lmax, alpha * r2)?;
            let mut sum = 0.0;
            for (t, ext) in x.e[0].iter().enumerate() {
                for (u, eyu) in x.e[1].iter().enumerate() {
                    for (v, ezv) in x.e[2].iter().enumerate() {
                        let ebra = ext * eyu * ezv;
                        if ebra == 0.0 {
                            continue;
                        }
                        for (tau, exk) in y.e[0].iter().enumerate() {
                            for (nu, eyk) in y.e[1].iter().enumerate() {
                                for (phi, ezk) in y.e[2].iter().enumerate() {
                                    let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
                                    sum += ebra
                                        * sign
                                        * exk
                                        * eyk
                                        * ezk
                                        * hermite_r(
                                            (t + tau) as i32,
                                            (u + nu) as i32,
                                            (v + phi) as i32,
                                            0,
                                            alpha,
                                            pq,
                                            &table,
                                        );
                                }
                            }
                        }
                    }
                }
            }
            acc += x.coef * y.coef * 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * sum;
        }
    }
    Ok(acc)
}

/// All unique `(μν|λσ)` in chemists' notation.
pub fn eri_tensor(basis: &BasisSet) -> Result<EriTensor> {
    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let pair_prims: Vec<Vec<PairData>> = pairs
        .iter()
        .map(|&(i, j)| pair_data(&basis.functions[i], &basis.functions[j]))
        .collect();
    let rows: Vec<Vec<f64>> = (0..pairs.len())
        .into_par_iter()
        .map(|ij| {
            (0..=ij)
                .map(|kl| contracted_eri(&pair_prims[ij], &pair_prims[kl]))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(EriTensor::from_packed(n, rows.into_iter().flatten().collect()))
}
