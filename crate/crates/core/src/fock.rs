//! Dense Fock-space reference implementation over a handful of orthonormal modes.
//!
//! States are plain vectors indexed by occupation bitstrings; fermionic signs
//! come from the Jordan–Wigner ordering of modes. Nothing here touches the
//! determinant or Slater–Condon code paths, which is what makes it usable as
//! an independent cross-check for them.
//!
//! Spin-orbital numbering for `n` spatial orbitals: alpha orbital `i` is mode
//! `i`, beta orbital `i` is mode `n + i`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest mode count accepted; the dense dimension is `2^modes`.
pub const MAX_MODES: usize = 12;

/// Fock space over `n_modes` orthonormal fermionic modes.
#[derive(Clone, Copy, Debug)]
pub struct FockSpace {
    n_modes: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes > MAX_MODES {
            return Err(Error::Resource(format!(
                "dense Fock space limited to {MAX_MODES} modes, requested {n_modes}"
            )));
        }
        Ok(Self { n_modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn vacuum(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[0] = 1.0;
        v
    }

    fn jw_sign(occ: usize, mode: usize) -> f64 {
        if (occ & ((1 << mode) - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `a†_mode |state⟩`.
    pub fn create(&self, mode: usize, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (occ, &amp) in state.iter().enumerate() {
            if amp != 0.0 && occ & (1 << mode) == 0 {
                out[occ | (1 << mode)] += Self::jw_sign(occ, mode) * amp;
            }
        }
        out
    }

    /// `a_mode |state⟩`.
    pub fn annihilate(&self, mode: usize, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (occ, &amp) in state.iter().enumerate() {
            if amp != 0.0 && occ & (1 << mode) != 0 {
                out[occ & !(1 << mode)] += Self::jw_sign(occ, mode) * amp;
            }
        }
        out
    }

    /// `Σ_m weights[m] a†_m |state⟩`: creation of a non-elementary orbital.
    pub fn create_combination(&self, weights: &[f64], state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (mode, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.create(mode, state)) {
                *o += w * x;
            }
        }
        out
    }

    /// `a†_{m1} a†_{m2} … a†_{mk} |vac⟩` with the leftmost operator `orbitals[0]`.
    ///
    /// Each orbital is given by its weights over the modes.
    pub fn product_state(&self, orbitals: &[Vec<f64>]) -> Vec<f64> {
        let mut state = self.vacuum();
        for weights in orbitals.iter().rev() {
            state = self.create_combination(weights, &state);
        }
        state
    }

    /// Dense matrix of `a†_p a_q`.
    pub fn hopping(&self, p: usize, q: usize) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut e = vec![0.0; dim];
            e[col] = 1.0;
            let v = self.create(p, &self.annihilate(q, &e));
            for (row, x) in v.into_iter().enumerate() {
                m[(row, col)] = x;
            }
        }
        m
    }
}

/// Spin-summed electronic Hamiltonian on `2n` modes:
///
/// `H = core + Σ_{pq,σ} h_pq a†_pσ a_qσ + ½ Σ_{pqrs,στ} (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
pub fn dense_hamiltonian(
    h: &DMatrix<f64>,
    eri: impl Fn(usize, usize, usize, usize) -> f64,
    core: f64,
) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    let fock = FockSpace::new(2 * n)?;
    let dim = fock.dim();
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut ket = vec![0.0; dim];
        ket[col] = 1.0;
        let mut acc = vec![0.0; dim];
        acc[col] += core;
        for s1 in 0..2 {
            for p in 0..n {
                for q in 0..n {
                    let v = h[(p, q)];
                    if v != 0.0 {
                        let t = fock.create(p + s1 * n, &fock.annihilate(q + s1 * n, &ket));
                        acc.iter_mut().zip(t).for_each(|(a, x)| *a += v * x);
                    }
                }
            }
            for s2 in 0..2 {
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for s in 0..n {
                                let v = eri(p, q, r, s);
                                if v == 0.0 {
                                    continue;
                                }
                                let t = fock.annihilate(q + s1 * n, &ket);
                                let t = fock.annihilate(s + s2 * n, &t);
                                let t = fock.create(r + s2 * n, &t);
                                let t = fock.create(p + s1 * n, &t);
                                acc.iter_mut().zip(t).for_each(|(a, x)| *a += 0.5 * v * x);
                            }
                        }
                    }
                }
            }
        }
        for (row, x) in acc.into_iter().enumerate() {
            out[(row, col)] = x;
        }
    }
    Ok(out)
}

/// Fock-space index of the determinant with the given alpha and beta masks over `n` orbitals.
pub fn determinant_index(n: usize, alpha: u64, beta: u64) -> usize {
    (alpha as usize) | ((beta as usize) << n)
}
