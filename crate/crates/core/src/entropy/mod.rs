//! Mahler measures and the entropies of rank-two sub-actions.

mod equivalence;
mod exact;
mod mahler;
mod relation;
mod sublattice;

pub use equivalence::{compare_results, entropy_equivalent, EquivalenceReport, EquivalenceRow, RowVerdict, Verdict};
pub use mahler::{
    direct_circle_oracle, direct_double_integral_oracle, mahler_1d_jensen, mahler_2d, mahler_2d_cx, MahlerValue,
    QuadratureConfig,
};
pub use relation::{g_twisted_relation, norm_product, ROUNDING_RESIDUAL};
pub use sublattice::{generic_relation, sublattice_entropy, EntropyResult};

use thiserror::Error;

use crate::laurent::LaurentError;
use crate::lattice::LatticeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("operation needs a nonzero polynomial")]
    ZeroPolynomial,
    #[error("expected a polynomial in {expected} variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("invalid quadrature configuration: {0}")]
    Config(String),
    #[error("{stage}: coefficient rounding residual {residual:e} after escalation")]
    Rounding { stage: &'static str, residual: f64 },
    #[error("{stage}: spot check deviates by {deviation:e}")]
    SpotCheck { stage: &'static str, deviation: f64 },
    #[error("system {0} is not ET")]
    NotEt(String),
    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<EntropyError> },
}

impl EntropyError {
    pub(crate) fn at(self, stage: &'static str) -> EntropyError {
        EntropyError::Stage { stage, source: Box::new(self) }
    }
}
