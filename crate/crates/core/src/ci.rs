//! Determinant-basis Hamiltonian construction and ground-state extraction.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::civector::{BasisKind, CIVector};
use crate::determinant::{excitation, excitation_degree, mask_indices, DeterminantSpace, OccupationString};
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;

/// Default cap on the dense Hamiltonian dimension.
pub const DEFAULT_MAX_DETERMINANTS: usize = 20_000;

/// Eigenvalues closer than this to the lowest one count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

fn same_spin_diagonal(h: &IntegralSet, occ: &[usize]) -> f64 {
    let mut e = 0.0;
    for (a, &i) in occ.iter().enumerate() {
        e += h.h(i, i);
        for &j in &occ[..a] {
            e += h.eri(i, i, j, j) - h.eri(i, j, j, i);
        }
    }
    e
}

/// Single substitution `hole → particle` in spin block `same`, with `other` the opposite-spin occupation.
fn single_element(ints: &IntegralSet, hole: usize, particle: usize, same: u64, other: u64) -> f64 {
    let mut v = ints.h(particle, hole);
    for j in mask_indices(same) {
        v += ints.eri(particle, hole, j, j) - ints.eri(particle, j, j, hole);
    }
    for j in mask_indices(other) {
        v += ints.eri(particle, hole, j, j);
    }
    v
}

/// `⟨bra|H|ket⟩` by the Slater–Condon rules under the canonical phase convention.
pub fn slater_condon_element(bra: &OccupationString, ket: &OccupationString, ints: &IntegralSet) -> Result<f64> {
    if bra.n_orbitals() != ints.n_orbitals() || ket.n_orbitals() != ints.n_orbitals() {
        return Err(Error::domain(format!(
            "determinants over {}/{} orbitals, integrals over {}",
            bra.n_orbitals(),
            ket.n_orbitals(),
            ints.n_orbitals()
        )));
    }
    if excitation_degree(bra, ket) > 2 {
        // still validate electron counts
        if bra.n_alpha() != ket.n_alpha() || bra.n_beta() != ket.n_beta() {
            return Err(Error::domain("determinants with different electron counts"));
        }
        return Ok(0.0);
    }
    let ex = excitation(bra, ket)?;
    let sign = f64::from(ex.sign);
    let value = match (ex.alpha.degree(), ex.beta.degree()) {
        (0, 0) => {
            let a = ket.alpha_indices();
            let b = ket.beta_indices();
            let mut e = ints.core_energy() + same_spin_diagonal(ints, &a) + same_spin_diagonal(ints, &b);
            for &i in &a {
                for &j in &b {
                    e += ints.eri(i, i, j, j);
                }
            }
            e
        }
        (1, 0) => {
            let h = ex.alpha.holes.trailing_zeros() as usize;
            let p = ex.alpha.particles.trailing_zeros() as usize;
            sign * single_element(ints, h, p, ket.alpha_mask(), ket.beta_mask())
        }
        (0, 1) => {
            let h = ex.beta.holes.trailing_zeros() as usize;
            let p = ex.beta.particles.trailing_zeros() as usize;
            sign * single_element(ints, h, p, ket.beta_mask(), ket.alpha_mask())
        }
        (2, 0) | (0, 2) => {
            let spin = if ex.alpha.degree() == 2 { ex.alpha } else { ex.beta };
            let h = spin.hole_indices();
            let p = spin.particle_indices();
            sign * (ints.eri(p[0], h[0], p[1], h[1]) - ints.eri(p[0], h[1], p[1], h[0]))
        }
        (1, 1) => {
            let ha = ex.alpha.holes.trailing_zeros() as usize;
            let pa = ex.alpha.particles.trailing_zeros() as usize;
            let hb = ex.beta.holes.trailing_zeros() as usize;
            let pb = ex.beta.particles.trailing_zeros() as usize;
            sign * ints.eri(pa, ha, pb, hb)
        }
        _ => unreachable!("degree checked above"),
    };
    Ok(value)
}

/// Dense Hamiltonian over `space`. Rows are built in parallel on the current rayon pool;
/// the lower triangle is mirrored from the upper so the result is exactly symmetric.
pub fn build_hamiltonian(
    space: &DeterminantSpace,
    ints: &IntegralSet,
    max_determinants: usize,
) -> Result<DMatrix<f64>> {
    if space.n_orbitals() != ints.n_orbitals() {
        return Err(Error::domain(format!(
            "space has {} orbitals, integrals have {}",
            space.n_orbitals(),
            ints.n_orbitals()
        )));
    }
    let n = space.len();
    if n > max_determinants {
        return Err(Error::Resource(format!(
            "{n} determinants exceed the dense Hamiltonian cap of {max_determinants}"
        )));
    }
    let dets: Vec<OccupationString> = space.iter().collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| slater_condon_element(&dets[i], &dets[j], ints))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut h = DMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (offset, v) in row.into_iter().enumerate() {
            let j = i + offset;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Lowest eigenpair of a determinant-space Hamiltonian.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub coefficients: DVector<f64>,
    /// Number of eigenvalues within [`DEGENERACY_TOL`] of the lowest one.
    pub degeneracy: usize,
    /// Distance to the next distinct level, if any.
    pub gap: Option<f64>,
    /// `‖H v − E v‖∞`.
    pub residual: f64,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy > 1
    }

    pub fn into_civector(self, space: DeterminantSpace) -> Result<CIVector> {
        CIVector::new(space, BasisKind::Mo, self.coefficients)
    }
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is positive.
fn fix_sign(v: &mut DVector<f64>) {
    let max = v.amax();
    if let Some(x) = v.iter().find(|x| x.abs() >= max - 1e-12) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

/// Lowest eigenpair by dense symmetric diagonalization.
///
/// For a degenerate lowest level the returned vector is the normalized
/// projection of the lowest-index unit vector with non-negligible weight in
/// the degenerate eigenspace, which does not depend on how the eigensolver
/// happens to rotate that subspace.
pub fn ground_state(h: &DMatrix<f64>) -> Result<GroundState> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::domain("Hamiltonian must be a non-empty square matrix"));
    }
    let n = h.nrows();
    let scale = h.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (h[(i, j)] - h[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::domain(format!("Hamiltonian not symmetric at ({i},{j})")));
            }
        }
    }
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let tol = DEGENERACY_TOL * scale;
    let degenerate: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&k| eig.eigenvalues[k] - e0 <= tol)
        .collect();
    let gap = order.get(degenerate.len()).map(|&k| eig.eigenvalues[k] - e0);

    let mut v = if degenerate.len() == 1 {
        eig.eigenvectors.column(order[0]).into_owned()
    } else {
        // weight of each unit vector inside the degenerate eigenspace
        let weight = |i: usize| -> f64 { degenerate.iter().map(|&k| eig.eigenvectors[(i, k)].powi(2)).sum() };
        let pivot = (0..n).find(|&i| weight(i) > 1e-8).unwrap_or(0);
        let mut p = DVector::zeros(n);
        for &k in &degenerate {
            let col = eig.eigenvectors.column(k);
            p.axpy(col[pivot], &col, 1.0);
        }
        p
    };
    v.normalize_mut();
    fix_sign(&mut v);
    let energy = v.dot(&(h * &v));
    let residual = (h * &v - &v * energy).amax();
    Ok(GroundState {
        energy,
        coefficients: v,
        degeneracy: degenerate.len(),
        gap,
        residual,
    })
}

/// Builds the Hamiltonian and returns the ground state as an MO-basis CI vector.
pub fn solve(space: &DeterminantSpace, ints: &IntegralSet, max_determinants: usize) -> Result<(GroundState, CIVector)> {
    let h = build_hamiltonian(space, ints, max_determinants)?;
    let gs = ground_state(&h)?;
    let civ = CIVector::new(space.clone(), BasisKind::Mo, gs.coefficients.clone())?;
    Ok((gs, civ))
}

/// `⟨S²⟩` of a state over orthonormal orbitals, via `S² = S₋S₊ + S_z + S_z²`.
pub fn spin_squared(civec: &CIVector) -> Result<f64> {
    if civec.basis() != BasisKind::Mo {
        return Err(Error::domain(
            "⟨S²⟩ is evaluated over orthonormal (MO) determinants only",
        ));
    }
    let space = civec.space();
    let sz = 0.5 * (space.n_alpha() as f64 - space.n_beta() as f64);
    let n_alpha = space.n_alpha() as u32;
    // S₊ = Σ_i a†_{iα} a_{iβ}; its image lives in the (n_alpha + 1, n_beta − 1) space.
    let mut raised: HashMap<(u64, u64), f64> = HashMap::new();
    for (det, &c) in space.iter().zip(civec.coefficients().iter()) {
        if c == 0.0 {
            continue;
        }
        let (a, b) = (det.alpha_mask(), det.beta_mask());
        for i in mask_indices(b & !a) {
            let below = (1u64 << i) - 1;
            // a_{iβ} passes all alpha electrons and the beta ones below i;
            // a†_{iα} then passes the alpha ones below i.
            let passes = n_alpha + (b & below).count_ones() + (a & below).count_ones();
            let sign = if passes.is_multiple_of(2) { 1.0 } else { -1.0 };
            *raised.entry((a | (1 << i), b & !(1 << i))).or_insert(0.0) += sign * c;
        }
    }
    let lowered_norm: f64 = raised.values().map(|x| x * x).sum();
    Ok(lowered_norm + sz + sz * sz)
}
