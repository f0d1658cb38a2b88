use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

/// Position of `(ij|kl)` in the packed array; identical for all 8 permutational images.
fn quad_index(i: usize, j: usize, k: usize, l: usize) -> usize {
    pair_index(pair_index(i, j), pair_index(k, l))
}

/// Active-space Hamiltonian over orthonormal orbitals, in Hartree.
///
/// Two-electron integrals use chemist notation `(ij|kl)` and are stored once
/// per canonical index quadruple, so real 8-fold symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    n_orbitals: usize,
    core_energy: f64,
    h: DMatrix<f64>,
    eri: Vec<f64>,
}

impl IntegralSet {
    pub fn zeros(n_orbitals: usize) -> Self {
        let npair = n_orbitals * (n_orbitals + 1) / 2;
        Self {
            n_orbitals,
            core_energy: 0.0,
            h: DMatrix::zeros(n_orbitals, n_orbitals),
            eri: vec![0.0; npair * (npair + 1) / 2],
        }
    }

    /// Builds from a one-electron matrix, which must be symmetric within `1e-12`.
    pub fn with_one_body(h: DMatrix<f64>, core_energy: f64) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::domain("one-electron matrix must be square"));
        }
        let n = h.nrows();
        for i in 0..n {
            for j in 0..i {
                if (h[(i, j)] - h[(j, i)]).abs() > 1e-12 {
                    return Err(Error::validation(format!(
                        "one-electron matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut out = Self::zeros(n);
        out.h = h;
        out.core_energy = core_energy;
        Ok(out)
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn set_core_energy(&mut self, value: f64) {
        self.core_energy = value;
    }

    pub fn one_body(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.h[(i, j)]
    }

    /// Sets `h_ij` and `h_ji`.
    pub fn set_h(&mut self, i: usize, j: usize, value: f64) {
        self.h[(i, j)] = value;
        self.h[(j, i)] = value;
    }

    /// `(ij|kl)`.
    pub fn eri(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.eri[quad_index(i, j, k, l)]
    }

    /// Sets `(ij|kl)` together with its 7 symmetry images.
    pub fn set_eri(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        self.eri[quad_index(i, j, k, l)] = value;
    }

    /// Nonzero two-electron integrals, one per canonical quadruple `i≥j, k≥l, ij≥kl`.
    pub fn nonzero_eri(&self) -> Vec<((usize, usize, usize, usize), f64)> {
        let n = self.n_orbitals;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..=i {
                for k in 0..=i {
                    let lmax = if k == i { j } else { k };
                    for l in 0..=lmax {
                        let v = self.eri(i, j, k, l);
                        if v != 0.0 {
                            out.push(((i, j, k, l), v));
                        }
                    }
                }
            }
        }
        out
    }

    /// Re-expresses the integrals over orbitals `φ'_μ = Σ_ν c[(ν, μ)] φ_ν`.
    pub fn transform(&self, c: &DMatrix<f64>) -> Result<IntegralSet> {
        let n = self.n_orbitals;
        if c.nrows() != n || c.ncols() != n {
            return Err(Error::domain(format!(
                "transformation is {}x{}, integrals have {n} orbitals",
                c.nrows(),
                c.ncols()
            )));
        }
        let mut out = IntegralSet::zeros(n);
        out.core_energy = self.core_energy;
        let h = c.transpose() * &self.h * c;
        // symmetrize against rounding in the triple product
        for i in 0..n {
            for j in 0..=i {
                out.set_h(i, j, 0.5 * (h[(i, j)] + h[(j, i)]));
            }
        }

        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let mut t0 = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        t0[idx(a, b, cc, d)] = self.eri(a, b, cc, d);
                    }
                }
            }
        }
        // four quarter transformations, one index at a time
        let mut t1 = vec![0.0; t0.len()];
        for p in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        t1[idx(p, b, cc, d)] = (0..n).map(|a| c[(a, p)] * t0[idx(a, b, cc, d)]).sum();
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        t0[idx(p, q, cc, d)] = (0..n).map(|b| c[(b, q)] * t1[idx(p, b, cc, d)]).sum();
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for d in 0..n {
                        t1[idx(p, q, r, d)] = (0..n).map(|cc| c[(cc, r)] * t0[idx(p, q, cc, d)]).sum();
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        t0[idx(p, q, r, s)] = (0..n).map(|d| c[(d, s)] * t1[idx(p, q, r, d)]).sum();
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                for k in 0..=i {
                    for l in 0..=k {
                        out.set_eri(i, j, k, l, t0[idx(i, j, k, l)]);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_fold_symmetry() {
        let mut ints = IntegralSet::zeros(3);
        ints.set_eri(0, 1, 2, 1, 0.3);
        for (i, j, k, l) in [
            (0, 1, 2, 1),
            (1, 0, 2, 1),
            (0, 1, 1, 2),
            (1, 0, 1, 2),
            (2, 1, 0, 1),
            (1, 2, 0, 1),
            (2, 1, 1, 0),
            (1, 2, 1, 0),
        ] {
            assert_eq!(ints.eri(i, j, k, l), 0.3);
        }
        assert_eq!(ints.eri(0, 2, 1, 1), 0.0);
        assert_eq!(ints.nonzero_eri().len(), 1);
    }

    #[test]
    fn packed_indices_are_distinct() {
        let n = 4;
        let ints = IntegralSet::zeros(n);
        let mut seen = std::collections::HashSet::new();
        for i in 0..n {
            for j in 0..=i {
                for k in 0..=i {
                    let lmax = if k == i { j } else { k };
                    for l in 0..=lmax {
                        assert!(seen.insert(quad_index(i, j, k, l)));
                    }
                }
            }
        }
        assert_eq!(seen.len(), ints.eri.len());
    }

    #[test]
    fn rejects_asymmetric_one_body() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(IntegralSet::with_one_body(h, 0.0).is_err());
    }

    #[test]
    fn transform_by_identity_and_swap() {
        let mut ints = IntegralSet::zeros(2);
        ints.set_h(0, 0, -1.0);
        ints.set_h(0, 1, 0.2);
        ints.set_eri(0, 0, 0, 0, 0.7);
        ints.set_eri(0, 0, 1, 1, 0.4);
        let same = ints.transform(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(same, ints);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let t = ints.transform(&swap).unwrap();
        assert_eq!(t.h(1, 1), -1.0);
        assert_eq!(t.eri(1, 1, 1, 1), 0.7);
        assert_eq!(t.eri(1, 1, 0, 0), 0.4);
    }
}
