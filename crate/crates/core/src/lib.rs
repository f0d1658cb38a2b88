//! Electron delocalization as quantum superposition over nonorthogonal atomic orbitals.
//!
//! The crate solves a small CI problem over orthonormal molecular-orbital
//! determinants, re-expresses the ground state over the nonorthogonal
//! atomic-orbital determinants, and evaluates two l1 measures on it: one on the
//! coefficient matrix `ρ` (inter-basis superposition) and one on the
//! biorthogonal representation `ρ_BO = ρ·S` (genuine superposition, including
//! what the determinant overlaps carry).
//!
//! ```
//! use deloc_core::{model, pipeline};
//!
//! let spec = model::RingModelSpec::uniform(4, 0.0, -1.0, 0.2, Some(1.0), 2, 2);
//! let ring = model::build_ring(&spec).unwrap();
//! let sol = pipeline::solve(&ring.mo_integrals, 2, 2, None).unwrap();
//! let m = pipeline::measure(&sol.civector, &ring.mo, &ring.ao_overlap, &Default::default()).unwrap();
//! assert!((m.trace - 1.0).abs() < 1e-10);
//! assert!(m.l1_biorthogonal > m.l1_nonorthogonal);
//! ```

pub mod ci;
pub mod civector;
pub mod determinant;
pub mod error;
pub mod fock;
pub mod integrals;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod pipeline;
pub mod transform;

pub use ci::{build_hamiltonian, ground_state, slater_condon_element, GroundState};
pub use civector::{BasisKind, CIVector};
pub use determinant::{excitation, DeterminantSpace, ExcitationInfo, OccupationString};
pub use error::{Error, Result};
pub use integrals::IntegralSet;
pub use io::{Diagnostics, ReportDocument};
pub use measures::{
    biorthogonal_density, density_nonorthogonal, gram_matrix, l1_measure, oracle_rho_bo, trace_check, BiorthogonalRep,
    DensityRep, GramMatrix,
};
pub use model::{build_ring, RingModel, RingModelSpec};
pub use pipeline::{measure, MeasureOptions, Measurement, Normalization, Tolerances};
pub use transform::{dual_basis, mo_to_ao, orthonormal_embedding, DualBasis, MOCoefficients};
