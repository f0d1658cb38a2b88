#![allow(dead_code)]

use deloc_core::fock::FockSpace;
use deloc_core::model::solve_generalized_eigen;
use deloc_core::{BasisKind, CIVector, DeterminantSpace, MOCoefficients};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random SPD matrix with unit diagonal and off-diagonal overlaps of moderate size.
pub fn random_overlap(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    loop {
        let mut s = DMatrix::identity(n, n);
        for i in 0..n {
            for j in 0..i {
                let v = rng.random_range(-0.45..0.45);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        let min = s.clone().symmetric_eigenvalues().min();
        if min > 0.05 {
            return s;
        }
    }
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

/// MO coefficients orthonormal in the metric `s`, from a random one-electron operator.
pub fn random_mo(s: &DMatrix<f64>, rng: &mut impl Rng) -> MOCoefficients {
    let h = random_symmetric(s.nrows(), rng);
    let eig = solve_generalized_eigen(&h, s).unwrap();
    MOCoefficients::new(eig.vectors, s, 1e-10).unwrap()
}

pub fn random_unit_vector(len: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.random_range(-1.0..1.0)).normalize()
}

pub fn random_mo_state(space: &DeterminantSpace, rng: &mut impl Rng) -> CIVector {
    CIVector::new(space.clone(), BasisKind::Mo, random_unit_vector(space.len(), rng)).unwrap()
}

/// AO-basis coefficients of an MO-basis state, read off an explicit Fock-space
/// expansion in which the AOs are treated as formal modes.
pub fn fock_mo_to_ao(civec: &CIVector, c: &DMatrix<f64>) -> DVector<f64> {
    let space = civec.space();
    let n = space.n_orbitals();
    let fock = FockSpace::new(2 * n).unwrap();
    let orbital = |mu: usize, beta: bool| -> Vec<f64> {
        let mut w = vec![0.0; 2 * n];
        for nu in 0..n {
            w[nu + if beta { n } else { 0 }] = c[(nu, mu)];
        }
        w
    };
    let mut total = vec![0.0; fock.dim()];
    for (det, &lam) in space.iter().zip(civec.coefficients().iter()) {
        let mut orbs: Vec<Vec<f64>> = det.alpha_indices().into_iter().map(|m| orbital(m, false)).collect();
        orbs.extend(det.beta_indices().into_iter().map(|m| orbital(m, true)));
        for (t, v) in total.iter_mut().zip(fock.product_state(&orbs)) {
            *t += lam * v;
        }
    }
    DVector::from_iterator(
        space.len(),
        space
            .iter()
            .map(|d| total[deloc_core::fock::determinant_index(n, d.alpha_mask(), d.beta_mask())]),
    )
}
