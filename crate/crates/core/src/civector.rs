use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::determinant::DeterminantSpace;
use crate::error::{Error, Result};

/// Which one-particle basis the determinants of a [`CIVector`] are built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    /// Orthonormal molecular orbitals.
    #[serde(rename = "MO")]
    Mo,
    /// Nonorthogonal atomic orbitals.
    #[serde(rename = "AO")]
    Ao,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Mo => f.write_str("MO"),
            BasisKind::Ao => f.write_str("AO"),
        }
    }
}

/// Expansion coefficients of a state over a canonically ordered determinant space.
#[derive(Clone, Debug, PartialEq)]
pub struct CIVector {
    space: DeterminantSpace,
    basis: BasisKind,
    coefficients: DVector<f64>,
}

impl CIVector {
    pub fn new(space: DeterminantSpace, basis: BasisKind, coefficients: DVector<f64>) -> Result<Self> {
        if coefficients.len() != space.len() {
            return Err(Error::domain(format!(
                "{} coefficients supplied for a space of {} determinants",
                coefficients.len(),
                space.len()
            )));
        }
        Ok(Self {
            space,
            basis,
            coefficients,
        })
    }

    pub fn space(&self) -> &DeterminantSpace {
        &self.space
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> DVector<f64> {
        self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Euclidean norm; the physical norm only for orthonormal determinants.
    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    /// `λᵀ S λ` for a determinant Gram matrix `S`.
    pub fn metric_norm_squared(&self, gram: &DMatrix<f64>) -> Result<f64> {
        if gram.nrows() != self.len() || gram.ncols() != self.len() {
            return Err(Error::domain(format!(
                "Gram matrix {}x{} does not match {} coefficients",
                gram.nrows(),
                gram.ncols(),
                self.len()
            )));
        }
        Ok(self.coefficients.dot(&(gram * &self.coefficients)))
    }

    /// Rejects MO-basis vectors whose Euclidean norm deviates from one by more than `tol`.
    pub fn check_unit_norm(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::validation(format!(
                "{} CI vector has norm {norm:.12}, expected 1 within {tol:e}",
                self.basis
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> CIVector {
        CIVector {
            space: self.space.clone(),
            basis: self.basis,
            coefficients: &self.coefficients * factor,
        }
    }

    pub(crate) fn with_coefficients(&self, coefficients: DVector<f64>) -> CIVector {
        debug_assert_eq!(coefficients.len(), self.len());
        CIVector {
            space: self.space.clone(),
            basis: self.basis,
            coefficients,
        }
    }
}
