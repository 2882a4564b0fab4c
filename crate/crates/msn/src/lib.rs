//! Exact workbench for finite-dimensional multi-seminormed spaces: seminorm
//! calculus, distortion certificates, amalgamation pushouts, finite Fraïssé
//! tower stages and Ramsey-property experiments.
//!
//! The primitives in [`exact`] are generic over any [`exact::Scalar`]; the
//! space-level modules are instantiated at [`Rational`].

pub mod amalgam;
pub mod error;
pub mod exact;
pub mod format;
pub mod maps;
pub mod ramsey;
pub mod rng;
pub mod seminorm;
pub mod space;
pub mod tower;

pub use error::{Error, Result, Witness};

/// Arbitrary-precision rational, the scalar of every space-level object.
pub type Rational = num_rational::BigRational;
pub type Matrix = exact::Matrix<Rational>;
pub type Polytope = exact::Polytope<Rational>;
pub type Halfspace = exact::Halfspace<Rational>;
pub type LinearProgram = exact::LinearProgram<Rational>;
pub type LpSolution = exact::LpSolution<Rational>;
pub type Vector = Vec<Rational>;
