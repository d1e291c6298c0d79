/// Two-electron repulsion integrals `(μν|λσ)` packed by 8-fold symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct EriTensor {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

impl EriTensor {
    /// `data[ij*(ij+1)/2 + kl]` for compound indices `ij >= kl`.
    pub(crate) fn from_packed(n: usize, data: Vec<f64>) -> Self {
        let npair = n * (n + 1) / 2;
        assert_eq!(data.len(), npair * (npair + 1) / 2);
        Self { n, data }
    }

    /// Packs a dense row-major `n⁴` array, keeping the canonical element of
    /// each symmetry orbit.
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n.pow(4));
        let npair = n * (n + 1) / 2;
        let mut data = vec![0.0; npair * (npair + 1) / 2];
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        let ij = pair_index(i, j);
                        let kl = pair_index(k, l);
                        if ij >= kl {
                            data[ij * (ij + 1) / 2 + kl] = dense[((i * n + j) * n + k) * n + l];
                        }
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let ij = pair_index(i, j);
        let kl = pair_index(k, l);
        self.data[pair_index(ij, kl)]
    }

    /// Row-major dense copy, element `((i*n + j)*n + k)*n + l`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out[((i * n + j) * n + k) * n + l] = self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_roundtrip_preserves_symmetric_tensor() {
        let n = 3;
        let mut dense = vec![0.0; 81];
        // Build a symmetric tensor from a symmetric pair matrix.
        let f = |i: usize, j: usize| (i.max(j) * 10 + i.min(j)) as f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        dense[((i * n + j) * n + k) * n + l] = f(i, j) * f(k, l) + f(i, j) + f(k, l);
                    }
                }
            }
        }
        let t = EriTensor::from_dense(n, &dense);
        assert_eq!(t.to_dense(), dense);
    }
}
