use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::problem::{dot, Direction, LinearProgram, Relation, VarBound};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Optimal primal/dual pair.
///
/// Dual sign convention (the dual of the problem *as stated*):
///
/// | direction | `≤` row   | `≥` row   | nonneg var `j`          |
/// |-----------|-----------|-----------|-------------------------|
/// | minimize  | `y_i ≤ 0` | `y_i ≥ 0` | `c_j - yᵀA_j ≥ 0`       |
/// | maximize  | `y_i ≥ 0` | `y_i ≤ 0` | `c_j - yᵀA_j ≤ 0`       |
///
/// Equality rows have free multipliers, free variables need
/// `c_j = yᵀA_j`, and `bᵀy` equals the optimal value in both cases.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution {
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
    pub value: Rational,
}

/// Farkas multipliers `y` proving that no `x` satisfies the constraints:
/// `y_i ≤ 0` on `≤` rows, `y_i ≥ 0` on `≥` rows, `yᵀA_j ≤ 0` for
/// nonnegative variables, `yᵀA_j = 0` for free ones, and `yᵀb > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

/// A feasible point together with a recession direction along which the
/// objective improves without bound.
#[derive(Debug, Clone, PartialEq)]
pub struct UnboundedCertificate {
    pub point: Vec<Rational>,
    pub ray: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedCertificate),
}

impl LpOutcome {
    pub fn status(&self) -> Status {
        match self {
            LpOutcome::Optimal(_) => Status::Optimal,
            LpOutcome::Infeasible(_) => Status::Infeasible,
            LpOutcome::Unbounded(_) => Status::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }

    pub fn into_optimal(self) -> Option<OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("vector has length {found}, expected {expected}")]
    Length { found: usize, expected: usize },
    #[error("primal point violates constraint {0}")]
    PrimalRow(usize),
    #[error("primal point violates the bound of variable {0}")]
    PrimalBound(usize),
    #[error("reported objective value does not match the primal point")]
    ObjectiveMismatch,
    #[error("dual multiplier of row {0} has the wrong sign")]
    DualSign(usize),
    #[error("reduced cost of variable {0} violates dual feasibility")]
    DualColumn(usize),
    #[error("dual objective differs from the primal value")]
    DualityGap,
    #[error("complementary slackness fails at {0}")]
    Slackness(String),
    #[error("Farkas combination has yᵀb ≤ 0")]
    FarkasRhs,
    #[error("ray violates constraint {0}")]
    RayRow(usize),
    #[error("ray does not improve the objective")]
    RayObjective,
}

fn check_len(v: &[Rational], expected: usize) -> Result<(), CertificateError> {
    if v.len() != expected {
        Err(CertificateError::Length {
            found: v.len(),
            expected,
        })
    } else {
        Ok(())
    }
}

impl LinearProgram {
    pub fn is_feasible_point(&self, x: &[Rational]) -> Result<(), CertificateError> {
        check_len(x, self.num_vars())?;
        for (j, (xj, bound)) in x.iter().zip(&self.bounds).enumerate() {
            if *bound == VarBound::NonNegative && xj.is_negative() {
                return Err(CertificateError::PrimalBound(j));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = c.activity(x);
            let ok = match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            };
            if !ok {
                return Err(CertificateError::PrimalRow(i));
            }
        }
        Ok(())
    }

    /// Re-verifies every claim carried by `outcome` by direct substitution.
    pub fn verify(&self, outcome: &LpOutcome) -> Result<(), CertificateError> {
        match outcome {
            LpOutcome::Optimal(sol) => self.verify_optimal(sol),
            LpOutcome::Infeasible(cert) => self.verify_farkas(cert),
            LpOutcome::Unbounded(cert) => self.verify_unbounded(cert),
        }
    }

    fn verify_optimal(&self, sol: &OptimalSolution) -> Result<(), CertificateError> {
        self.is_feasible_point(&sol.primal)?;
        if self.objective_value(&sol.primal) != sol.value {
            return Err(CertificateError::ObjectiveMismatch);
        }
        check_len(&sol.dual, self.num_constraints())?;
        let maximize = self.direction == Direction::Maximize;
        for (i, (c, yi)) in self.constraints.iter().zip(&sol.dual).enumerate() {
            let wrong = match (c.relation, maximize) {
                (Relation::Eq, _) => false,
                (Relation::Le, false) | (Relation::Ge, true) => yi.is_positive(),
                (Relation::Ge, false) | (Relation::Le, true) => yi.is_negative(),
            };
            if wrong {
                return Err(CertificateError::DualSign(i));
            }
            if !yi.is_zero() && c.activity(&sol.primal) != c.rhs {
                return Err(CertificateError::Slackness(format!("row {i}")));
            }
        }
        for j in 0..self.num_vars() {
            let reduced = &self.objective[j] - self.column_dot(&sol.dual, j);
            let ok = match (self.bounds[j], maximize) {
                (VarBound::Free, _) => reduced.is_zero(),
                (VarBound::NonNegative, false) => !reduced.is_negative(),
                (VarBound::NonNegative, true) => !reduced.is_positive(),
            };
            if !ok {
                return Err(CertificateError::DualColumn(j));
            }
            if !reduced.is_zero() && !sol.primal[j].is_zero() {
                return Err(CertificateError::Slackness(format!("variable {j}")));
            }
        }
        let rhs: Vec<Rational> = self.constraints.iter().map(|c| c.rhs.clone()).collect();
        if dot(&rhs, &sol.dual) != sol.value {
            return Err(CertificateError::DualityGap);
        }
        Ok(())
    }

    fn verify_farkas(&self, cert: &FarkasCertificate) -> Result<(), CertificateError> {
        let y = &cert.multipliers;
        check_len(y, self.num_constraints())?;
        for (i, (c, yi)) in self.constraints.iter().zip(y).enumerate() {
            let wrong = match c.relation {
                Relation::Eq => false,
                Relation::Le => yi.is_positive(),
                Relation::Ge => yi.is_negative(),
            };
            if wrong {
                return Err(CertificateError::DualSign(i));
            }
        }
        for j in 0..self.num_vars() {
            let col = self.column_dot(y, j);
            let ok = match self.bounds[j] {
                VarBound::Free => col.is_zero(),
                VarBound::NonNegative => !col.is_positive(),
            };
            if !ok {
                return Err(CertificateError::DualColumn(j));
            }
        }
        let rhs: Vec<Rational> = self.constraints.iter().map(|c| c.rhs.clone()).collect();
        if !dot(&rhs, y).is_positive() {
            return Err(CertificateError::FarkasRhs);
        }
        Ok(())
    }

    fn verify_unbounded(&self, cert: &UnboundedCertificate) -> Result<(), CertificateError> {
        self.is_feasible_point(&cert.point)?;
        check_len(&cert.ray, self.num_vars())?;
        for (j, (dj, bound)) in cert.ray.iter().zip(&self.bounds).enumerate() {
            if *bound == VarBound::NonNegative && dj.is_negative() {
                return Err(CertificateError::PrimalBound(j));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = c.activity(&cert.ray);
            let ok = match c.relation {
                Relation::Le => !lhs.is_positive(),
                Relation::Eq => lhs.is_zero(),
                Relation::Ge => !lhs.is_negative(),
            };
            if !ok {
                return Err(CertificateError::RayRow(i));
            }
        }
        let gain = self.objective_value(&cert.ray);
        let improves = match self.direction {
            Direction::Minimize => gain.is_negative(),
            Direction::Maximize => gain.is_positive(),
        };
        if !improves {
            return Err(CertificateError::RayObjective);
        }
        Ok(())
    }
}
