use num_traits::Zero;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Sense of a constraint row: `row · x ⋄ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("objective has {objective} entries but {bounds} variable bounds were given")]
    BoundsLength { objective: usize, bounds: usize },
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("sparse entry refers to variable {index} but the problem has {num_vars}")]
    VariableOutOfRange { index: usize, num_vars: usize },
}

/// A linear program over exact rationals.
///
/// ```
/// use exactlp::{int, Direction, LinearProgram, Relation, LpOutcome};
///
/// let mut lp = LinearProgram::new(Direction::Maximize, vec![int(1)]);
/// lp.add_constraint(vec![int(1)], Relation::Le, int(1)).unwrap();
/// match lp.solve().unwrap() {
///     LpOutcome::Optimal(sol) => assert_eq!(sol.value, int(1)),
///     other => panic!("unexpected {other:?}"),
/// }
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// All variables start out nonnegative.
    pub fn new(direction: Direction, objective: Vec<Rational>) -> Self {
        let bounds = vec![VarBound::NonNegative; objective.len()];
        LinearProgram {
            direction,
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_bound(&mut self, var: usize, bound: VarBound) {
        self.bounds[var] = bound;
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<usize, LpError> {
        if coeffs.len() != self.num_vars() {
            return Err(LpError::RowLength {
                row: self.constraints.len(),
                found: coeffs.len(),
                expected: self.num_vars(),
            });
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Adds a row given as `(variable, coefficient)` pairs; repeated
    /// variables accumulate.
    pub fn add_sparse_constraint<I>(
        &mut self,
        entries: I,
        relation: Relation,
        rhs: Rational,
    ) -> Result<usize, LpError>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let n = self.num_vars();
        let mut coeffs = vec![Rational::zero(); n];
        for (index, value) in entries {
            if index >= n {
                return Err(LpError::VariableOutOfRange { index, num_vars: n });
            }
            coeffs[index] += value;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.bounds.len() != self.objective.len() {
            return Err(LpError::BoundsLength {
                objective: self.objective.len(),
                bounds: self.bounds.len(),
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars() {
                return Err(LpError::RowLength {
                    row,
                    found: c.coeffs.len(),
                    expected: self.num_vars(),
                });
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// `Σ_i y_i · A_{i,var}`.
    pub fn column_dot(&self, y: &[Rational], var: usize) -> Rational {
        self.constraints
            .iter()
            .zip(y)
            .filter(|(_, yi)| !yi.is_zero())
            .map(|(c, yi)| &c.coeffs[var] * yi)
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .fold(Rational::zero(), |acc, v| acc + v)
}
