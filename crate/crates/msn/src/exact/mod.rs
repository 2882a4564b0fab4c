//! Exact arithmetic, linear algebra, linear programming and polytope
//! conversion, generic over the scalar field.

pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod scalar;

pub use linalg::{subspace_ops, Matrix, SubspaceReport};
pub use lp::{solve, Constraint, LinearProgram, LpError, LpSolution, Relation, Sense};
pub use polytope::{dd_convert, Halfspace, Polytope};
pub use scalar::Scalar;
