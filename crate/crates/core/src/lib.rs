//! qalab-core: dense complex linear algebra, operator-annulus membership
//! oracles, explicit dilation constructions (disc, row, doubly commuting,
//! annulus), inner functions on the annulus, and a spectral-constant search.
//!
//! Everything is deterministic: randomness always flows through a caller-owned
//! seed and the pinned ChaCha8 generator in [`random`].

pub mod annulus;
pub mod dc;
pub mod decomp;
pub mod disc;
pub mod fourier;
pub mod inner;
pub mod kappa;
pub mod matrix;
pub mod membership;
pub mod qa;
pub mod random;
pub mod row;
pub mod suite;

pub use matrix::{ComplexMatrix, C64};

use serde::{Deserialize, Serialize};

/// Shared tolerance knobs. The defaults are used throughout the test suite.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Tolerance for exact linear-algebra identities (unitarity, reassembly).
    pub algebraic_tol: f64,
    /// Gap threshold below which eigenvalues are merged into one cluster.
    pub cluster_tol: f64,
    /// Tolerance for identities that hold only up to quadrature error.
    pub quadrature_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            algebraic_tol: 1e-10,
            cluster_tol: 1e-8,
            quadrature_tol: 1e-6,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), matrix::LinalgError> {
        if self.algebraic_tol > 0.0 && self.cluster_tol > 0.0 && self.quadrature_tol > 0.0 {
            Ok(())
        } else {
            Err(matrix::LinalgError::InvalidArgument(
                "tolerances must be strictly positive".into(),
            ))
        }
    }
}
