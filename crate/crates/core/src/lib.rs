//! Exact computations in Lipschitz-free spaces over finite pointed metric
//! spaces.
//!
//! Everything is carried out over arbitrary-precision rationals, and every
//! optimisation result ships with a certificate that can be re-checked
//! independently of the solver.
//!
//! ```
//! use std::sync::Arc;
//! use exactlp::int;
//! use freelip::{free_norm, FiniteMetricSpace, FreeElement};
//!
//! let space = Arc::new(FiniteMetricSpace::on_line(&[int(0), int(1), int(2)]).unwrap());
//! let m = FreeElement::from_coeffs(space, vec![int(0), int(2), int(-1)]).unwrap();
//! assert_eq!(free_norm(&m).unwrap().value, int(2));
//! ```

pub mod choquet;
pub mod corpus;
pub mod deleeuw;
pub mod error;
pub mod extremality;
pub mod free;
pub mod metric;
pub mod registry;

pub use choquet::*;
pub use deleeuw::*;
pub use error::{Error, Result};
pub use extremality::*;
pub use free::*;
pub use metric::*;
pub use registry::{
    extremality_classifiers, norm_solvers, precedence_deciders, ExtremalityClassifier, NormSolver,
    PrecedenceDecider, Registry, Strategy,
};

pub use exactlp;
pub use exactlp::Rational;
