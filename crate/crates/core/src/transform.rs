//! Change of one-particle basis for determinant expansions, and dual-basis construction.
//!
//! An MO determinant `a†(ψ_A1) … a†(ψ_Ak)|vac⟩` with `ψ_μ = Σ_ν C[ν, μ] p_ν`
//! expands over ascending AO subsets `R` with weight `det C[R, A]`. Spins
//! factorize, so the AO coefficient of `(R_α, R_β)` is
//! `Σ λ(A, B) · det C[R_α, A] · det C[R_β, B]`.

use nalgebra::DMatrix;

use crate::civector::{BasisKind, CIVector};
use crate::determinant::{mask_indices, SpinStrings};
use crate::error::{Error, Result};
use crate::linalg::{self, Spectrum};

/// Default bound on `max|Cᵀ s C − I|`.
pub const DEFAULT_ORTHONORMALITY_TOL: f64 = 1e-6;

/// Default cap on the Gram-matrix condition number.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Validated MO coefficient matrix; rows index AOs, columns index MOs.
#[derive(Clone, Debug, PartialEq)]
pub struct MOCoefficients {
    c: DMatrix<f64>,
    condition_number: f64,
    orthonormality_residual: f64,
}

impl MOCoefficients {
    /// Accepts `c` when it is square, invertible, and orthonormal in the metric `ao_overlap`.
    pub fn new(c: DMatrix<f64>, ao_overlap: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::domain(format!(
                "MO coefficient matrix is {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        if ao_overlap.shape() != c.shape() {
            return Err(Error::domain(format!(
                "AO overlap is {}x{}, MO coefficients {}x{}",
                ao_overlap.nrows(),
                ao_overlap.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        let condition_number = linalg::condition_number_general(&c);
        if !condition_number.is_finite() {
            return Err(Error::domain("MO coefficient matrix is singular"));
        }
        let n = c.nrows();
        let residual = (c.transpose() * ao_overlap * &c - DMatrix::identity(n, n)).amax();
        if residual > tol {
            return Err(Error::validation(format!(
                "MO coefficients are not orthonormal in the AO metric: max|CᵀsC − I| = {residual:.3e} > {tol:.1e}"
            )));
        }
        Ok(Self {
            c,
            condition_number,
            orthonormality_residual: residual,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn n_orbitals(&self) -> usize {
        self.c.nrows()
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn orthonormality_residual(&self) -> f64 {
        self.orthonormality_residual
    }
}

/// `table[(r, a)] = det t[rows_r, cols_a]` over target strings `r` and source strings `a`.
fn minor_table(t: &DMatrix<f64>, strings: &SpinStrings) -> DMatrix<f64> {
    let lists: Vec<Vec<usize>> = strings.masks().iter().map(|&m| mask_indices(m)).collect();
    DMatrix::from_fn(lists.len(), lists.len(), |r, a| linalg::minor(t, &lists[r], &lists[a]))
}

/// Re-expands `civec` for orbitals `φ_src_a = Σ_r t[(r, a)] φ_dst_r`.
fn expand(civec: &CIVector, t: &DMatrix<f64>, target: BasisKind, drop_threshold: f64) -> Result<CIVector> {
    let space = civec.space();
    if t.nrows() != space.n_orbitals() || t.ncols() != space.n_orbitals() {
        return Err(Error::domain(format!(
            "orbital transformation is {}x{}, determinant space has {} orbitals",
            t.nrows(),
            t.ncols(),
            space.n_orbitals()
        )));
    }
    let ma = minor_table(t, space.alpha_strings());
    let mb = minor_table(t, space.beta_strings());
    let na = space.alpha_strings().len();
    let nb = space.beta_strings().len();
    // alpha-major ordering makes the coefficient vector a row-major na×nb matrix
    let lambda = DMatrix::from_row_slice(na, nb, civec.coefficients().as_slice());
    let out = &ma * lambda * mb.transpose();
    let mut coeffs = nalgebra::DVector::from_iterator(
        na * nb,
        (0..na)
            .flat_map(|a| (0..nb).map(move |b| (a, b)))
            .map(|(a, b)| out[(a, b)]),
    );
    if drop_threshold > 0.0 {
        coeffs
            .iter_mut()
            .filter(|x| x.abs() < drop_threshold)
            .for_each(|x| *x = 0.0);
    }
    CIVector::new(space.clone(), target, coeffs)
}

/// Expresses an MO-basis state over AO determinants.
///
/// `drop_threshold` zeroes AO coefficients below it in magnitude; 0 keeps everything.
pub fn mo_to_ao(civec: &CIVector, mo: &MOCoefficients, drop_threshold: f64) -> Result<CIVector> {
    if civec.basis() != BasisKind::Mo {
        return Err(Error::domain("mo_to_ao expects an MO-basis CI vector"));
    }
    expand(civec, mo.matrix(), BasisKind::Ao, drop_threshold)
}

/// Inverse of [`mo_to_ao`], through minors of `C⁻¹`.
pub fn ao_to_mo(civec: &CIVector, mo: &MOCoefficients) -> Result<CIVector> {
    if civec.basis() != BasisKind::Ao {
        return Err(Error::domain("ao_to_mo expects an AO-basis CI vector"));
    }
    let inv = mo
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::domain("MO coefficient matrix is singular"))?;
    expand(civec, &inv, BasisKind::Mo, 0.0)
}

/// Dual-basis expansion coefficients `D = S⁻¹`, with `|c_i^⊥⟩ = Σ_j D[j, i] |c_j⟩`.
#[derive(Clone, Debug)]
pub struct DualBasis {
    pub d: DMatrix<f64>,
    /// `max|S·D − I|`.
    pub residual: f64,
    pub condition_number: f64,
    pub min_eigenvalue: f64,
}

/// Inverts an SPD Gram matrix by Cholesky, refusing condition numbers above `condition_cap`.
pub fn dual_basis(s: &DMatrix<f64>, condition_cap: f64) -> Result<DualBasis> {
    let spectrum = Spectrum::of(s);
    let condition = spectrum.condition_number();
    if condition > condition_cap {
        return Err(Error::IllConditioned {
            condition,
            cap: condition_cap,
            smallest_eigenvalue: spectrum.min,
        });
    }
    let d = linalg::spd_inverse(s)?;
    let n = s.nrows();
    let residual = (s * &d - DMatrix::identity(n, n)).amax();
    Ok(DualBasis {
        d,
        residual,
        condition_number: condition,
        min_eigenvalue: spectrum.min,
    })
}

/// Upper-triangular `X` with `XᵀX = s`: column `ν` of `X` is AO `ν` written in an orthonormal frame.
pub fn orthonormal_embedding(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    linalg::cholesky_upper(s)
}
