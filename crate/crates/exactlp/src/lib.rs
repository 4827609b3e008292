//! Exact rational linear programming.
//!
//! Everything here is computed over [`Rational`]; there is no floating
//! point anywhere. Each solve returns an [`LpOutcome`] whose certificate
//! (dual solution, Farkas multipliers, or improving ray) can be re-checked
//! independently with [`LinearProgram::verify`].

mod hull;
mod outcome;
mod problem;
pub mod rational;
mod simplex;

pub use hull::{in_convex_hull, HullError, HullMembership};
pub use outcome::{
    CertificateError, FarkasCertificate, LpOutcome, OptimalSolution, Status,
    UnboundedCertificate,
};
pub use problem::{Constraint, Direction, LinearProgram, LpError, Relation, VarBound};
pub use rational::{format_rational, int, parse_rational, ratio, Rational};
pub use simplex::lp_solve;
