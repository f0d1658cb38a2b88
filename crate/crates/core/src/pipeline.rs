//! End-to-end evaluation: MO-basis CI vector → AO determinants → `ρ`, `ρ_BO` → both l1 measures.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ci::{self, GroundState, DEFAULT_MAX_DETERMINANTS};
use crate::civector::{BasisKind, CIVector};
use crate::determinant::DeterminantSpace;
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::measures::{self, DEFAULT_INTEGRITY_TOL};
use crate::transform::{self, MOCoefficients, DEFAULT_CONDITION_CAP, DEFAULT_ORTHONORMALITY_TOL};

/// How AO determinants are scaled before the measures are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Determinants rescaled to unit norm (unit-diagonal Gram matrix).
    UnitDiagonal,
    /// Products of normalized AOs as they are.
    Raw,
}

impl Normalization {
    pub fn from_flag(normalize: bool) -> Self {
        if normalize {
            Normalization::UnitDiagonal
        } else {
            Normalization::Raw
        }
    }

    pub fn is_normalized(self) -> bool {
        self == Normalization::UnitDiagonal
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::UnitDiagonal => "unit_diagonal",
            Normalization::Raw => "raw",
        }
    }
}

/// Numerical thresholds of the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|tr(ρS) − 1|` accepted for a finished result.
    pub trace: f64,
    /// `|tr(ρS) − 1|` beyond which the inputs are declared inconsistent.
    pub integrity: f64,
    /// `max|ρ_BO² − ρ_BO|` expected of pure states.
    pub idempotency: f64,
    /// Largest accepted Gram-matrix condition number.
    pub condition_cap: f64,
    /// `max|CᵀsC − I|` accepted for MO coefficients.
    pub orthonormality: f64,
    /// `|‖λ‖ − 1|` accepted for MO-basis CI vectors.
    pub mo_norm: f64,
    /// AO coefficients below this magnitude are dropped; 0 keeps all.
    pub drop_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trace: 1e-10,
            integrity: DEFAULT_INTEGRITY_TOL,
            idempotency: 1e-8,
            condition_cap: DEFAULT_CONDITION_CAP,
            orthonormality: DEFAULT_ORTHONORMALITY_TOL,
            mo_norm: 1e-10,
            drop_threshold: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureOptions {
    pub normalization: Normalization,
    pub tolerances: Tolerances,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            normalization: Normalization::UnitDiagonal,
            tolerances: Tolerances::default(),
        }
    }
}

/// Everything computed by [`measure`].
#[derive(Clone, Debug)]
pub struct Measurement {
    pub l1_nonorthogonal: f64,
    pub l1_biorthogonal: f64,
    pub trace: f64,
    pub n_determinants: usize,
    pub normalization: Normalization,
    pub gram_condition_number: f64,
    pub gram_min_eigenvalue: f64,
    pub idempotency_residual: f64,
    /// Eigenvalues of `ρ_BO`, ascending.
    pub bo_eigenvalues: Vec<f64>,
    /// The state over (possibly rescaled) AO determinants.
    pub ao_civector: CIVector,
    pub rho: DMatrix<f64>,
    pub rho_bo: DMatrix<f64>,
}

/// Runs the measurement pipeline on an MO-basis ground state.
pub fn measure(
    civec: &CIVector,
    mo: &MOCoefficients,
    ao_overlap: &DMatrix<f64>,
    opts: &MeasureOptions,
) -> Result<Measurement> {
    let tol = &opts.tolerances;
    if civec.basis() != BasisKind::Mo {
        return Err(Error::domain("measure expects an MO-basis CI vector"));
    }
    let n = civec.space().n_orbitals();
    if mo.n_orbitals() != n || ao_overlap.nrows() != n || ao_overlap.ncols() != n {
        return Err(Error::validation(format!(
            "inconsistent dimensions: CI vector over {n} orbitals, MO coefficients {}x{0}, overlap {}x{}",
            mo.n_orbitals(),
            ao_overlap.nrows(),
            ao_overlap.ncols()
        )));
    }
    civec.check_unit_norm(tol.mo_norm)?;

    let ao = transform::mo_to_ao(civec, mo, tol.drop_threshold)?;
    let gram = measures::gram_matrix(civec.space(), ao_overlap, opts.normalization.is_normalized())?;
    let condition = gram.condition_number();
    if condition > tol.condition_cap {
        return Err(Error::IllConditioned {
            condition,
            cap: tol.condition_cap,
            smallest_eigenvalue: gram.min_eigenvalue(),
        });
    }
    let ao = gram.rescale(&ao)?;
    let rho = measures::density_nonorthogonal(&ao)?;
    let bo = measures::biorthogonal_density(&rho, &gram, tol.integrity)?;
    if (bo.trace - 1.0).abs() > tol.trace {
        return Err(Error::Integrity(format!(
            "tr(ρS) = {:.15} misses 1 by {:.3e} (tolerance {:e})",
            bo.trace,
            (bo.trace - 1.0).abs(),
            tol.trace
        )));
    }
    if bo.idempotency_residual > tol.idempotency {
        log::warn!(
            "ρ_BO idempotency residual {:.3e} exceeds {:e}",
            bo.idempotency_residual,
            tol.idempotency
        );
    }
    Ok(Measurement {
        l1_nonorthogonal: measures::l1_measure(&rho.rho),
        l1_biorthogonal: measures::l1_measure(&bo.rho_bo),
        trace: bo.trace,
        n_determinants: ao.len(),
        normalization: opts.normalization,
        gram_condition_number: condition,
        gram_min_eigenvalue: gram.min_eigenvalue(),
        idempotency_residual: bo.idempotency_residual,
        bo_eigenvalues: bo.eigenvalues,
        ao_civector: ao,
        rho: rho.rho,
        rho_bo: bo.rho_bo,
    })
}

/// Ground state of the MO-basis Hamiltonian together with `⟨S²⟩`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub ground: GroundState,
    pub civector: CIVector,
    pub spin_squared: f64,
}

pub fn solve(ints: &IntegralSet, n_alpha: usize, n_beta: usize, max_determinants: Option<usize>) -> Result<Solution> {
    let space = DeterminantSpace::enumerate(ints.n_orbitals(), n_alpha, n_beta)?;
    let (ground, civector) = ci::solve(&space, ints, max_determinants.unwrap_or(DEFAULT_MAX_DETERMINANTS))?;
    let spin_squared = ci::spin_squared(&civector)?;
    if ground.is_degenerate() {
        log::warn!(
            "ground level is {}-fold degenerate; picked the state built on the lowest-index determinant",
            ground.degeneracy
        );
    }
    Ok(Solution {
        ground,
        civector,
        spin_squared,
    })
}
