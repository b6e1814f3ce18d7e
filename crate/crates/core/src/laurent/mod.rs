//! Sparse Laurent polynomials in up to three variables, over the integers and
//! over complex balls.

pub mod ball;
mod bivariate;
pub mod dd;
mod newton;
mod parse;
mod poly;
mod roots;

pub use ball::{Ball, BallScalar, DdBall};
pub use bivariate::bivariate_square_free;
pub use newton::{newton_polygon, NewtonPolytope};
pub use parse::{parse_poly, parse_poly_named};
pub use poly::{
    reexpress_exponent, CxLaurentPoly, Exponent, IntLaurentPoly, RingOp, Twist, MAX_ARITY,
};
pub use roots::{
    isolate_roots, univariate_roots, Root, RootConfig, RootSet, DEFAULT_ROOT_RADIUS,
};

pub(crate) use roots::{fast_log_mahler, refine_root_dd, univariate_gcd};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("non-integer coefficient at byte {offset}")]
    NonIntegerCoefficient { offset: usize },
    #[error("variable u{index} at byte {offset} exceeds arity {arity}")]
    VariableOutOfRange { index: usize, offset: usize, arity: usize },
    #[error("arity must be between 1 and 3, got {0}")]
    BadArity(usize),
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("operation needs a nonzero polynomial")]
    ZeroPolynomial,
    #[error("exponent {exponent:?} lies outside the lattice spanned by the basis")]
    OutsideLattice { exponent: Vec<i64> },
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("twist scalar for variable u{0} is zero")]
    ZeroTwist(usize),
    #[error("root refinement reached radius {achieved:e}, requested {requested:e}")]
    RootRadius { achieved: f64, requested: f64 },
    #[error("root iteration did not converge")]
    RootNoConvergence,
    #[error("{0}")]
    Unsupported(String),
}
