//! Ring models with nearest-neighbour overlap: a self-contained source of
//! `(AO overlap, integrals, MO coefficients)` triples for desk-scale studies.
//!
//! Heteroatoms are represented by onsite-energy shifts and by the electron
//! count, not by extra basis functions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::determinant::MAX_ORBITALS;
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::linalg;
use crate::transform::{MOCoefficients, DEFAULT_ORTHONORMALITY_TOL};

/// Largest nearest-neighbour overlap accepted by [`RingModelSpec`].
pub const MAX_BOND_OVERLAP: f64 = 0.9;

/// A per-site or per-bond parameter: one value for all, or one value each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Uniform(f64),
    PerItem(Vec<f64>),
}

impl Param {
    fn expand(&self, count: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Param::Uniform(v) => Ok(vec![*v; count]),
            Param::PerItem(v) if v.len() == count => Ok(v.clone()),
            Param::PerItem(v) => Err(Error::validation(format!(
                "{what} lists {} values, expected {count}",
                v.len()
            ))),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Uniform(v)
    }
}

impl From<Vec<f64>> for Param {
    fn from(v: Vec<f64>) -> Self {
        Param::PerItem(v)
    }
}

/// Parameters of a monocyclic π model. Bond `k` joins sites `k` and `k + 1 mod n`;
/// a two-site ring has a single bond.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingModelSpec {
    pub n_sites: usize,
    /// Onsite energies `α_ν`.
    pub onsite: Param,
    /// Hopping `β` per bond.
    pub hopping: Param,
    /// AO overlap `σ` per bond, in `[0, 0.9]`.
    pub overlap: Param,
    /// Onsite repulsion `U_ν`, stored as `(νν|νν)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hubbard_u: Option<Param>,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl RingModelSpec {
    pub fn uniform(
        n_sites: usize,
        onsite: f64,
        hopping: f64,
        overlap: f64,
        hubbard_u: Option<f64>,
        n_alpha: usize,
        n_beta: usize,
    ) -> Self {
        Self {
            n_sites,
            onsite: onsite.into(),
            hopping: hopping.into(),
            overlap: overlap.into(),
            hubbard_u: hubbard_u.map(Param::from),
            n_alpha,
            n_beta,
        }
    }

    pub fn bonds(&self) -> Vec<(usize, usize)> {
        match self.n_sites {
            0 | 1 => Vec::new(),
            2 => vec![(0, 1)],
            n => (0..n).map(|k| (k, (k + 1) % n)).collect(),
        }
    }
}

/// Output of [`build_ring`].
#[derive(Clone, Debug)]
pub struct RingModel {
    pub ao_overlap: DMatrix<f64>,
    /// Hamiltonian over the (nonorthogonal) site orbitals.
    pub ao_integrals: IntegralSet,
    pub mo: MOCoefficients,
    pub orbital_energies: DVector<f64>,
    /// The same Hamiltonian over the orthonormal MOs; this is what the CI solver consumes.
    pub mo_integrals: IntegralSet,
    pub n_alpha: usize,
    pub n_beta: usize,
}

/// Solution of `h C = s C ε` with `Cᵀ s C = I`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct GeneralizedEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
    /// `max|h C − s C ε|`.
    pub residual: f64,
}

/// Solves the generalized symmetric-definite eigenproblem through the Cholesky embedding of `s`.
///
/// Each eigenvector is signed so that its first largest-magnitude entry is positive.
pub fn solve_generalized_eigen(h: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<GeneralizedEigen> {
    if h.shape() != s.shape() || !h.is_square() {
        return Err(Error::domain("h and s must be square matrices of equal size"));
    }
    let n = h.nrows();
    let x = linalg::cholesky_upper(s)?;
    let xi = linalg::upper_triangular_inverse(&x);
    let a = xi.transpose() * h * &xi;
    let a = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v = &xi * eig.eigenvectors.column(k);
        let max = v.amax();
        if let Some(first) = v.iter().find(|x| x.abs() >= max - 1e-10) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(col, &v);
    }
    let residual = (h * &vectors - s * &vectors * DMatrix::from_diagonal(&values)).amax();
    Ok(GeneralizedEigen {
        values,
        vectors,
        residual,
    })
}

/// Builds overlap, integrals, and MOs for a ring model.
pub fn build_ring(spec: &RingModelSpec) -> Result<RingModel> {
    let n = spec.n_sites;
    if n == 0 || n > MAX_ORBITALS {
        return Err(Error::validation(format!(
            "ring must have 1..={MAX_ORBITALS} sites, got {n}"
        )));
    }
    if spec.n_alpha > n || spec.n_beta > n {
        return Err(Error::validation(format!(
            "{} alpha / {} beta electrons do not fit on {n} sites",
            spec.n_alpha, spec.n_beta
        )));
    }
    let bonds = spec.bonds();
    let onsite = spec.onsite.expand(n, "onsite")?;
    let hopping = spec.hopping.expand(bonds.len(), "hopping")?;
    let sigma = spec.overlap.expand(bonds.len(), "overlap")?;
    let u = match &spec.hubbard_u {
        Some(p) => p.expand(n, "hubbard_u")?,
        None => vec![0.0; n],
    };
    if let Some(bad) = onsite
        .iter()
        .chain(&hopping)
        .chain(&sigma)
        .chain(&u)
        .find(|v| !v.is_finite())
    {
        return Err(Error::validation(format!("non-finite model parameter {bad}")));
    }

    let mut s = DMatrix::identity(n, n);
    let mut h = DMatrix::from_diagonal(&DVector::from_vec(onsite));
    for (&(a, b), (&beta, &sig)) in bonds.iter().zip(hopping.iter().zip(&sigma)) {
        s[(a, b)] = sig;
        s[(b, a)] = sig;
        h[(a, b)] = beta;
        h[(b, a)] = beta;
    }
    let smallest = linalg::symmetric_eigenvalues(&s)[0];
    if smallest <= 0.0 {
        return Err(Error::domain(format!(
            "ring overlap matrix is not positive definite: smallest eigenvalue {smallest:.6}"
        )));
    }
    if let Some(bad) = sigma.iter().find(|&&v| !(0.0..=MAX_BOND_OVERLAP).contains(&v)) {
        return Err(Error::validation(format!(
            "bond overlap {bad} outside [0, {MAX_BOND_OVERLAP}]"
        )));
    }

    let mut ao_integrals = IntegralSet::with_one_body(h.clone(), 0.0)?;
    for (nu, &value) in u.iter().enumerate() {
        if value != 0.0 {
            ao_integrals.set_eri(nu, nu, nu, nu, value);
        }
    }
    let eig = solve_generalized_eigen(&h, &s)?;
    let mo = MOCoefficients::new(eig.vectors.clone(), &s, DEFAULT_ORTHONORMALITY_TOL)?;
    let mo_integrals = ao_integrals.transform(mo.matrix())?;
    Ok(RingModel {
        ao_overlap: s,
        ao_integrals,
        mo,
        orbital_energies: eig.values,
        mo_integrals,
        n_alpha: spec.n_alpha,
        n_beta: spec.n_beta,
    })
}
