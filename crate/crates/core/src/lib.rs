//! Exact symbolic engine for the derived-bracket calculus of graded
//! differential geometry: free graded commutative algebras over the
//! rationals, derived brackets of Lie brackets, Cartan calculus on
//! polynomial charts, the big bracket on Lambda(E + E*), Lie algebroids in
//! local coordinates, and Courant brackets with closed 3-form background.
//!
//! The kernel is generic over the coefficient field via [`scalar::Scalar`];
//! everything shipped on top instantiates it at arbitrary-precision
//! rationals ([`Rat`]), so all identity checks are exact.

pub mod error;
pub mod gca;
pub mod report;
pub mod rng;
pub mod scalar;

pub mod derived;
pub mod operator;

pub mod algebroid;
pub mod background;
pub mod bigbracket;
pub mod cartan;

pub use error::{Error, Result};
pub use report::{CheckReport, Witness};
pub use rng::Rng;
pub use scalar::{ExactScalar, Rat, Scalar};

/// Canonical rational instantiations of the kernel types.
pub type Element = gca::GcaElement<Rat>;
pub type Derivation = gca::Derivation<Rat>;
pub type Bracket = gca::BracketStructure<Rat>;
pub type Operator = operator::Operator<Rat>;
pub type Manifold = cartan::Manifold<Rat>;
pub type LieAlgebra = bigbracket::LieAlgebra<Rat>;
pub type Algebroid = algebroid::Algebroid<Rat>;
