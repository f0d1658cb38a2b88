//! Determinant Gram matrices, density representations, and l1 superposition measures.
//!
//! For a state `|Ψ⟩ = Σ_i λ_i |c_i⟩` over nonorthogonal determinants with
//! overlaps `S_ij = ⟨c_i|c_j⟩`:
//!
//! * `ρ = λλᵀ` is the coefficient matrix of `|Ψ⟩⟨Ψ|` in the `|c_i⟩⟨c_j|` frame;
//! * `ρ_BO = ρ·S` has entries `⟨c_i^⊥|Ψ⟩⟨Ψ|c_j⟩` with the dual states `c^⊥`;
//! * `tr(ρ·S) = ⟨Ψ|Ψ⟩ = 1`;
//! * `l1[M] = Σ_{i≠j} |M_ij|` applied to `ρ` measures inter-basis
//!   superposition and applied to `ρ_BO` the full (genuine) superposition,
//!   which also counts what the overlaps themselves carry.

use nalgebra::{DMatrix, DVector};

use crate::civector::{BasisKind, CIVector};
use crate::determinant::{mask_indices, DeterminantSpace, SpinStrings};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::{self, Spectrum};

/// Largest `|tr(ρ·S) − 1|` tolerated before the inputs are declared inconsistent.
pub const DEFAULT_INTEGRITY_TOL: f64 = 1e-6;

/// Overlap matrix of the AO determinant basis.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    s: DMatrix<f64>,
    normalized: bool,
    raw_diagonal: DVector<f64>,
    spectrum: Spectrum,
}

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// Squared norms `⟨c_k|c_k⟩` of the unnormalized determinants.
    pub fn raw_diagonal(&self) -> &DVector<f64> {
        &self.raw_diagonal
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.min
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectrum.max
    }

    pub fn condition_number(&self) -> f64 {
        self.spectrum.condition_number()
    }

    /// Coefficients over unit-norm determinants: `λ_k ← λ_k · √⟨c_k|c_k⟩`.
    ///
    /// Identity when the Gram matrix was not normalized.
    pub fn rescale(&self, civec: &CIVector) -> Result<CIVector> {
        if civec.len() != self.dim() {
            return Err(Error::domain(format!(
                "{} coefficients for a {}-dimensional Gram matrix",
                civec.len(),
                self.dim()
            )));
        }
        if !self.normalized {
            return Ok(civec.clone());
        }
        let c = civec.coefficients().component_mul(&self.raw_diagonal.map(f64::sqrt));
        Ok(civec.with_coefficients(c))
    }
}

fn spin_overlap_table(s: &DMatrix<f64>, strings: &SpinStrings) -> DMatrix<f64> {
    let lists: Vec<Vec<usize>> = strings.masks().iter().map(|&m| mask_indices(m)).collect();
    let n = lists.len();
    let mut t = DMatrix::zeros(n, n);
    for k in 0..n {
        for m in 0..=k {
            let v = linalg::minor(s, &lists[k], &lists[m]);
            t[(k, m)] = v;
            t[(m, k)] = v;
        }
    }
    t
}

fn unit_diagonal(t: &DMatrix<f64>) -> DMatrix<f64> {
    let n = t.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            t[(i, j)] / (t[(i, i)] * t[(j, j)]).sqrt()
        }
    })
}

/// Determinant overlaps `S_km = det s[α_k, α_m] · det s[β_k, β_m]` over `space`.
///
/// Opposite-spin orbitals never overlap, so `S` is the Kronecker product of
/// per-spin tables under alpha-major ordering. With `normalize`, each
/// determinant is scaled to unit norm; the per-spin factorization carries
/// over because `S_kk` factorizes too. The spectrum is the set of products
/// of the per-spin spectra.
pub fn gram_matrix(space: &DeterminantSpace, ao_overlap: &DMatrix<f64>, normalize: bool) -> Result<GramMatrix> {
    let n = space.n_orbitals();
    if ao_overlap.nrows() != n || ao_overlap.ncols() != n {
        return Err(Error::domain(format!(
            "AO overlap is {}x{}, determinant space has {n} orbitals",
            ao_overlap.nrows(),
            ao_overlap.ncols()
        )));
    }
    linalg::cholesky_upper(ao_overlap)?;

    let raw_a = spin_overlap_table(ao_overlap, space.alpha_strings());
    let raw_b = spin_overlap_table(ao_overlap, space.beta_strings());
    let raw_diagonal = raw_a.diagonal().kronecker(&raw_b.diagonal());
    let (ta, tb) = if normalize {
        (unit_diagonal(&raw_a), unit_diagonal(&raw_b))
    } else {
        (raw_a, raw_b)
    };
    let sa = Spectrum::of(&ta);
    let sb = Spectrum::of(&tb);
    let s = ta.kronecker(&tb);
    Ok(GramMatrix {
        s,
        normalized: normalize,
        raw_diagonal,
        spectrum: Spectrum {
            min: sa.min * sb.min,
            max: sa.max * sb.max,
        },
    })
}

/// Coefficient matrix `ρ_ij` of a state in a nonorthogonal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityRep {
    pub rho: DMatrix<f64>,
}

/// Pure-state `ρ = λλᵀ` of an AO-basis CI vector.
pub fn density_nonorthogonal(civec: &CIVector) -> Result<DensityRep> {
    if civec.basis() != BasisKind::Ao {
        return Err(Error::domain(
            "the nonorthogonal density is built from an AO-basis CI vector",
        ));
    }
    let l = civec.coefficients();
    Ok(DensityRep { rho: l * l.transpose() })
}

/// Biorthogonal representation `ρ_BO = ρ·S` with its consistency diagnostics.
#[derive(Clone, Debug)]
pub struct BiorthogonalRep {
    pub rho_bo: DMatrix<f64>,
    pub trace: f64,
    /// `max|ρ_BO² − ρ_BO|`; zero exactly for pure states in exact arithmetic.
    pub idempotency_residual: f64,
    /// Ascending eigenvalues, obtained from the similar symmetric matrix `X ρ Xᵀ` with `XᵀX = S`.
    pub eigenvalues: Vec<f64>,
}

/// `tr(ρ·S)`.
pub fn trace_check(rho: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<f64> {
    if rho.shape() != s.shape() || !rho.is_square() {
        return Err(Error::domain(format!(
            "ρ is {}x{}, S is {}x{}",
            rho.nrows(),
            rho.ncols(),
            s.nrows(),
            s.ncols()
        )));
    }
    // Σ_ij ρ_ij S_ji without forming the product
    Ok(rho.component_mul(&s.transpose()).sum())
}

/// `ρ_BO = ρ·S`, refusing traces further than `integrity_tol` from one.
pub fn biorthogonal_density(rho: &DensityRep, gram: &GramMatrix, integrity_tol: f64) -> Result<BiorthogonalRep> {
    let s = gram.matrix();
    let trace = trace_check(&rho.rho, s)?;
    if (trace - 1.0).abs() > integrity_tol {
        return Err(Error::Integrity(format!(
            "tr(ρS) = {trace:.12} deviates from 1 by more than {integrity_tol:e}; the CI vector, MO coefficients and overlap are inconsistent"
        )));
    }
    let rho_bo = &rho.rho * s;
    let idempotency_residual = (&rho_bo * &rho_bo - &rho_bo).amax();
    let x = linalg::cholesky_upper(s)?;
    let sym = &x * &rho.rho * x.transpose();
    let sym = DMatrix::from_fn(sym.nrows(), sym.ncols(), |i, j| 0.5 * (sym[(i, j)] + sym[(j, i)]));
    let eigenvalues = linalg::symmetric_eigenvalues(&sym);
    Ok(BiorthogonalRep {
        rho_bo,
        trace,
        idempotency_residual,
        eigenvalues,
    })
}

/// `Σ_{i≠j} |M_ij|`.
pub fn l1_measure(m: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                total += m[(i, j)].abs();
            }
        }
    }
    total
}

/// Limits of [`oracle_rho_bo`]: dense Fock space over `2 · 4` modes.
pub const ORACLE_MAX_ORBITALS: usize = 4;
pub const ORACLE_MAX_ELECTRONS: usize = 4;

/// Reference `ρ̄_ij = ⟨c_i^⊥|Ψ⟩⟨Ψ|c_j⟩` computed from explicit many-electron vectors.
///
/// Each AO is written in an orthonormal frame through the Cholesky
/// embedding, every AO determinant is built by applying creation operators
/// in the Fock space, the duals come from an explicit inverse of the vector
/// Gram matrix, and all inner products are plain dot products. No minors,
/// Kronecker factorization, or `ρ·S` product is involved. Intended for
/// cross-checking small systems only.
pub fn oracle_rho_bo(civec: &CIVector, ao_overlap: &DMatrix<f64>, normalize: bool) -> Result<DMatrix<f64>> {
    let space = civec.space();
    let n = space.n_orbitals();
    if n > ORACLE_MAX_ORBITALS || space.n_electrons() > ORACLE_MAX_ELECTRONS {
        return Err(Error::Resource(format!(
            "oracle limited to {ORACLE_MAX_ORBITALS} orbitals and {ORACLE_MAX_ELECTRONS} electrons"
        )));
    }
    if civec.basis() != BasisKind::Ao {
        return Err(Error::domain("oracle expects an AO-basis CI vector"));
    }
    if ao_overlap.nrows() != n || ao_overlap.ncols() != n {
        return Err(Error::domain("AO overlap does not match the determinant space"));
    }
    let x = crate::transform::orthonormal_embedding(ao_overlap)?;
    let fock = FockSpace::new(2 * n)?;
    // spin-orbital (ν, σ) in the 2n-mode orthonormal frame
    let spin_orbital = |nu: usize, beta: bool| -> Vec<f64> {
        let mut w = vec![0.0; 2 * n];
        for m in 0..n {
            w[m + if beta { n } else { 0 }] = x[(m, nu)];
        }
        w
    };
    let mut basis: Vec<DVector<f64>> = space
        .iter()
        .map(|det| {
            let mut orbitals: Vec<Vec<f64>> = det
                .alpha_indices()
                .into_iter()
                .map(|nu| spin_orbital(nu, false))
                .collect();
            orbitals.extend(det.beta_indices().into_iter().map(|nu| spin_orbital(nu, true)));
            DVector::from_vec(fock.product_state(&orbitals))
        })
        .collect();
    if normalize {
        for v in &mut basis {
            let norm = v.norm();
            *v /= norm;
        }
    }
    let d = basis.len();
    let gram = DMatrix::from_fn(d, d, |i, j| basis[i].dot(&basis[j]));
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::domain("determinant vectors are linearly dependent"))?;
    let duals: Vec<DVector<f64>> = (0..d)
        .map(|i| (0..d).fold(DVector::zeros(fock.dim()), |acc, j| acc + &basis[j] * inv[(j, i)]))
        .collect();
    let psi = (0..d).fold(DVector::zeros(fock.dim()), |acc, j| {
        acc + &basis[j] * civec.coefficients()[j]
    });
    Ok(DMatrix::from_fn(d, d, |i, j| duals[i].dot(&psi) * psi.dot(&basis[j])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dimer_overlap(sigma: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, sigma, sigma, 1.0])
    }

    fn one_electron_state(coeffs: &[f64]) -> CIVector {
        let space = DeterminantSpace::enumerate(coeffs.len(), 1, 0).unwrap();
        CIVector::new(space, BasisKind::Ao, DVector::from_column_slice(coeffs)).unwrap()
    }

    #[test]
    fn identity_overlap_gives_identity_gram() {
        let space = DeterminantSpace::enumerate(4, 2, 1).unwrap();
        let g = gram_matrix(&space, &DMatrix::identity(4, 4), false).unwrap();
        assert_eq!(*g.matrix(), DMatrix::identity(space.len(), space.len()));
        assert_eq!(g.condition_number(), 1.0);
    }

    #[test]
    fn same_spin_pair_overlap() {
        let s = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.2 });
        let space = DeterminantSpace::enumerate(3, 2, 0).unwrap();
        let raw = gram_matrix(&space, &s, false).unwrap();
        // dets {0,1} (rank 0) and {0,2} (rank 1)
        assert_abs_diff_eq!(raw.matrix()[(0, 1)], 0.16, epsilon = 1e-15);
        let norm = gram_matrix(&space, &s, true).unwrap();
        assert_abs_diff_eq!(norm.matrix()[(0, 1)], 0.16 / 0.96, epsilon = 1e-15);
        assert!(norm.matrix().diagonal().iter().all(|&d| d == 1.0));
    }

    #[test]
    fn opposite_spin_overlap_factorizes() {
        let sigma = 0.3;
        let space = DeterminantSpace::enumerate(2, 1, 1).unwrap();
        let g = gram_matrix(&space, &dimer_overlap(sigma), false).unwrap();
        let a = space
            .rank(&crate::OccupationString::new(2, &[0], &[1]).unwrap())
            .unwrap();
        let b = space
            .rank(&crate::OccupationString::new(2, &[1], &[0]).unwrap())
            .unwrap();
        assert_abs_diff_eq!(g.matrix()[(a, b)], sigma * sigma, epsilon = 1e-15);
    }

    #[test]
    fn gram_rejects_non_spd_overlap() {
        let space = DeterminantSpace::enumerate(2, 1, 0).unwrap();
        assert!(matches!(
            gram_matrix(&space, &dimer_overlap(1.1), true),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn density_examples() {
        let rho = density_nonorthogonal(&one_electron_state(&[1.0, 0.0])).unwrap();
        assert_eq!(rho.rho, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let c = 1.0 / 3f64.sqrt();
        let rho = density_nonorthogonal(&one_electron_state(&[c, c])).unwrap();
        assert_abs_diff_eq!(rho.rho, DMatrix::from_element(2, 2, 1.0 / 3.0), epsilon = 1e-15);
        assert_eq!(rho.rho, rho.rho.transpose());
    }

    #[test]
    fn dimer_bonding_and_antibonding() {
        let space = DeterminantSpace::enumerate(2, 1, 0).unwrap();
        let g = gram_matrix(&space, &dimer_overlap(0.5), true).unwrap();
        let c = 1.0 / 3f64.sqrt();
        let rho = density_nonorthogonal(&one_electron_state(&[c, c])).unwrap();
        let bo = biorthogonal_density(&rho, &g, DEFAULT_INTEGRITY_TOL).unwrap();
        assert_abs_diff_eq!(bo.rho_bo, DMatrix::from_element(2, 2, 0.5), epsilon = 1e-15);
        assert_abs_diff_eq!(bo.trace, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l1_measure(&bo.rho_bo), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l1_measure(&rho.rho), 2.0 / 3.0, epsilon = 1e-15);

        let anti = density_nonorthogonal(&one_electron_state(&[1.0, -1.0])).unwrap();
        let bo = biorthogonal_density(&anti, &g, DEFAULT_INTEGRITY_TOL).unwrap();
        assert_abs_diff_eq!(
            bo.rho_bo,
            DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(bo.eigenvalues[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bo.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthonormal_limit() {
        let space = DeterminantSpace::enumerate(2, 1, 0).unwrap();
        let g = gram_matrix(&space, &DMatrix::identity(2, 2), true).unwrap();
        let rho = density_nonorthogonal(&one_electron_state(&[0.6, 0.8])).unwrap();
        let bo = biorthogonal_density(&rho, &g, DEFAULT_INTEGRITY_TOL).unwrap();
        assert_eq!(bo.rho_bo, rho.rho);
    }

    #[test]
    fn trace_examples() {
        let space = DeterminantSpace::enumerate(2, 1, 0).unwrap();
        let g = gram_matrix(&space, &dimer_overlap(0.5), true).unwrap();
        let single = density_nonorthogonal(&one_electron_state(&[1.0, 0.0])).unwrap();
        assert_eq!(trace_check(&single.rho, g.matrix()).unwrap(), 1.0);
        let c = 1.0 / 3f64.sqrt();
        let bonding = one_electron_state(&[c, c]);
        let rho = density_nonorthogonal(&bonding).unwrap();
        assert_abs_diff_eq!(trace_check(&rho.rho, g.matrix()).unwrap(), 1.0, epsilon = 1e-15);
        let doubled = density_nonorthogonal(&bonding.scaled(2.0)).unwrap();
        assert_abs_diff_eq!(trace_check(&doubled.rho, g.matrix()).unwrap(), 4.0, epsilon = 1e-14);
        assert!(matches!(
            biorthogonal_density(&doubled, &g, DEFAULT_INTEGRITY_TOL),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn l1_of_diagonal_is_zero() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, -0.3, 0.5]));
        assert_eq!(l1_measure(&m), 0.0);
    }

    #[test]
    fn oracle_matches_dimer() {
        let c = 1.0 / 3f64.sqrt();
        let civ = one_electron_state(&[c, c]);
        let oracle = oracle_rho_bo(&civ, &dimer_overlap(0.5), true).unwrap();
        assert_abs_diff_eq!(oracle, DMatrix::from_element(2, 2, 0.5), epsilon = 1e-12);
    }

    #[test]
    fn oracle_refuses_large_systems() {
        let space = DeterminantSpace::enumerate(5, 1, 0).unwrap();
        let civ = CIVector::new(space, BasisKind::Ao, DVector::from_element(5, 0.0)).unwrap();
        assert!(matches!(
            oracle_rho_bo(&civ, &DMatrix::identity(5, 5), true),
            Err(Error::Resource(_))
        ));
    }
}
