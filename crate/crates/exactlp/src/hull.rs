//! Convex-hull membership with certificates on both sides.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::outcome::LpOutcome;
use crate::problem::{dot, Direction, LinearProgram, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error("generator list is empty")]
    NoGenerators,
    #[error("vector {index} has dimension {found}, expected {expected}")]
    Dimension {
        index: usize,
        found: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum HullMembership {
    /// Convex weights, one per generator, reproducing the point.
    Inside { weights: Vec<Rational> },
    /// `functional · g ≤ threshold < functional · point` for every generator `g`.
    Outside {
        functional: Vec<Rational>,
        threshold: Rational,
    },
}

impl HullMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, HullMembership::Inside { .. })
    }

    /// Checks the attached certificate against the inputs exactly.
    pub fn verify(&self, point: &[Rational], generators: &[Vec<Rational>]) -> bool {
        match self {
            HullMembership::Inside { weights } => {
                if weights.len() != generators.len()
                    || weights.iter().any(|w| w < &Rational::zero())
                    || weights.iter().sum::<Rational>() != Rational::one()
                {
                    return false;
                }
                (0..point.len()).all(|k| {
                    let combo: Rational = weights
                        .iter()
                        .zip(generators)
                        .map(|(w, g)| w * &g[k])
                        .sum();
                    combo == point[k]
                })
            }
            HullMembership::Outside {
                functional,
                threshold,
            } => {
                dot(functional, point) > *threshold
                    && generators.iter().all(|g| dot(functional, g) <= *threshold)
            }
        }
    }
}

/// Decides whether `point` is a convex combination of `generators`.
///
/// Solves the feasibility program `Σ w_i g_i = point, Σ w_i = 1, w ≥ 0`.
/// On infeasibility the Farkas multipliers `(a, β)` satisfy
/// `a·g_i + β ≤ 0` and `a·point + β > 0`, which is turned into the
/// separating pair `(a, -β)`.
pub fn in_convex_hull(
    point: &[Rational],
    generators: &[Vec<Rational>],
) -> Result<HullMembership, HullError> {
    if generators.is_empty() {
        return Err(HullError::NoGenerators);
    }
    let dim = point.len();
    for (index, g) in generators.iter().enumerate() {
        if g.len() != dim {
            return Err(HullError::Dimension {
                index,
                found: g.len(),
                expected: dim,
            });
        }
    }
    let k = generators.len();
    let mut lp = LinearProgram::new(Direction::Minimize, vec![Rational::zero(); k]);
    for coord in 0..dim {
        let row = generators.iter().map(|g| g[coord].clone()).collect();
        lp.add_constraint(row, Relation::Eq, point[coord].clone())
            .expect("row length matches generator count");
    }
    lp.add_constraint(vec![Rational::one(); k], Relation::Eq, Rational::one())
        .expect("row length matches generator count");

    let outcome = lp.solve().expect("well-formed membership program");
    Ok(match outcome {
        LpOutcome::Optimal(sol) => HullMembership::Inside {
            weights: sol.primal,
        },
        LpOutcome::Infeasible(cert) => {
            let mut y = cert.multipliers;
            let beta = y.pop().expect("convexity row multiplier");
            HullMembership::Outside {
                functional: y,
                threshold: -beta,
            }
        }
        LpOutcome::Unbounded(_) => unreachable!("zero objective cannot be unbounded"),
    })
}
