//! Two-phase dense tableau simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, ties in the
//! ratio test broken by lowest basic index), so every run terminates.

use num_traits::{One, Signed, Zero};

use crate::outcome::{FarkasCertificate, LpOutcome, OptimalSolution, UnboundedCertificate};
use crate::problem::{Direction, LinearProgram, LpError, Relation, VarBound};
use crate::rational::Rational;

/// Where an original variable lives in standard form.
#[derive(Debug, Clone, Copy)]
struct VarMap {
    plus: usize,
    minus: Option<usize>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_Bᵀ B⁻¹ A_j` for the active phase.
    reduced: Vec<Rational>,
    /// Active-phase cost vector.
    cost: Vec<Rational>,
    /// Columns with index `>= first_artificial` are artificial.
    first_artificial: usize,
    /// For each row, a column that was a unit vector `e_i` initially.
    unit_col: Vec<usize>,
}

enum RunResult {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.cost.len()
    }

    fn reset_costs(&mut self, cost: Vec<Rational>) {
        let mut reduced = cost.clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(row) {
                if !a.is_zero() {
                    *r -= cb * a;
                }
            }
        }
        self.cost = cost;
        self.reduced = reduced;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        if !inv.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let support: Vec<usize> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, _)| j)
            .collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &factor * &pivot_rhs;
            }
        }
        let factor = self.reduced[c].clone();
        if !factor.is_zero() {
            for &j in &support {
                self.reduced[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs simplex iterations letting only columns `< enter_limit` enter.
    fn run(&mut self, enter_limit: usize) -> RunResult {
        loop {
            let entering = (0..enter_limit).find(|&j| self.reduced[j].is_negative());
            let Some(c) = entering else {
                return RunResult::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return RunResult::Unbounded(c),
            }
        }
    }

    /// Simplex multipliers `y = c_Bᵀ B⁻¹`, read off the unit columns.
    fn multipliers(&self) -> Vec<Rational> {
        self.unit_col
            .iter()
            .map(|&j| &self.cost[j] - &self.reduced[j])
            .collect()
    }

    fn basic_solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }

    /// Pivots artificial columns out of the basis where a non-artificial
    /// replacement exists. Rows where none exists are redundant.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            if let Some(c) = (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                self.pivot(i, c);
            }
        }
    }
}

pub(crate) fn solve(problem: &LinearProgram) -> Result<LpOutcome, LpError> {
    problem.validate()?;
    let m = problem.num_constraints();

    let mut maps = Vec::with_capacity(problem.num_vars());
    let mut next = 0usize;
    for bound in &problem.bounds {
        let plus = next;
        next += 1;
        let minus = match bound {
            VarBound::Free => {
                next += 1;
                Some(next - 1)
            }
            VarBound::NonNegative => None,
        };
        maps.push(VarMap { plus, minus });
    }
    let num_structural = next;

    // Rows are negated so that every slack-bearing row can start basic
    // whenever its right-hand side allows it.
    let signs: Vec<bool> = problem
        .constraints
        .iter()
        .map(|c| c.rhs.is_negative() || (c.relation == Relation::Ge && c.rhs.is_zero()))
        .collect();
    let num_slack = problem
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    // A row needs an artificial unless its slack already reads +e_i.
    let needs_artificial: Vec<bool> = problem
        .constraints
        .iter()
        .zip(&signs)
        .map(|(c, &neg)| match c.relation {
            Relation::Eq => true,
            Relation::Le => neg,
            Relation::Ge => !neg,
        })
        .collect();
    let num_artificial = needs_artificial.iter().filter(|&&b| b).count();
    let first_artificial = num_structural + num_slack;
    let ncols = first_artificial + num_artificial;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut unit_col = Vec::with_capacity(m);
    let mut slack_idx = num_structural;
    let mut art_idx = first_artificial;
    for (i, c) in problem.constraints.iter().enumerate() {
        let flip = signs[i];
        let mut row = vec![Rational::zero(); ncols];
        for (j, map) in maps.iter().enumerate() {
            let a = &c.coeffs[j];
            if a.is_zero() {
                continue;
            }
            let a = if flip { -a } else { a.clone() };
            if let Some(minus) = map.minus {
                row[minus] = -a.clone();
            }
            row[map.plus] = a;
        }
        let mut slack_col = None;
        if c.relation != Relation::Eq {
            let coeff = if c.relation == Relation::Le { 1 } else { -1 };
            let coeff = if flip { -coeff } else { coeff };
            row[slack_idx] = Rational::from_integer(coeff.into());
            if coeff == 1 {
                slack_col = Some(slack_idx);
            }
            slack_idx += 1;
        }
        let unit = if needs_artificial[i] {
            row[art_idx] = Rational::one();
            art_idx += 1;
            art_idx - 1
        } else {
            slack_col.expect("slack with +1 coefficient")
        };
        rows.push(row);
        rhs.push(if flip { -c.rhs.clone() } else { c.rhs.clone() });
        basis.push(unit);
        unit_col.push(unit);
    }

    let mut tableau = Tableau {
        rows,
        rhs,
        basis,
        reduced: Vec::new(),
        cost: Vec::new(),
        first_artificial,
        unit_col,
    };

    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter()
            .zip(&signs)
            .map(|(v, &neg)| if neg { -v } else { v })
            .collect()
    };

    if num_artificial > 0 {
        let mut phase_one = vec![Rational::zero(); ncols];
        for cost in phase_one.iter_mut().skip(first_artificial) {
            *cost = Rational::one();
        }
        tableau.reset_costs(phase_one);
        match tableau.run(ncols) {
            RunResult::Optimal => {}
            RunResult::Unbounded(_) => unreachable!("phase one objective is bounded below by 0"),
        }
        let infeasibility: Rational = tableau
            .basis
            .iter()
            .zip(&tableau.rhs)
            .filter(|(&b, _)| b >= first_artificial)
            .map(|(_, v)| v.clone())
            .fold(Rational::zero(), |a, b| a + b);
        if infeasibility.is_positive() {
            let y = unflip(tableau.multipliers());
            return Ok(LpOutcome::Infeasible(FarkasCertificate { multipliers: y }));
        }
        tableau.drive_out_artificials();
    }

    let negate = problem.direction == Direction::Maximize;
    let mut phase_two = vec![Rational::zero(); ncols];
    for (j, map) in maps.iter().enumerate() {
        let c = &problem.objective[j];
        let c = if negate { -c } else { c.clone() };
        if let Some(minus) = map.minus {
            phase_two[minus] = -c.clone();
        }
        phase_two[map.plus] = c;
    }
    tableau.reset_costs(phase_two);

    let to_original = |std: &[Rational]| -> Vec<Rational> {
        maps.iter()
            .map(|map| match map.minus {
                Some(minus) => &std[map.plus] - &std[minus],
                None => std[map.plus].clone(),
            })
            .collect()
    };

    match tableau.run(first_artificial) {
        RunResult::Optimal => {
            let primal = to_original(&tableau.basic_solution());
            let mut dual = unflip(tableau.multipliers());
            if negate {
                for v in dual.iter_mut() {
                    *v = -v.clone();
                }
            }
            let value = problem.objective_value(&primal);
            Ok(LpOutcome::Optimal(OptimalSolution {
                primal,
                dual,
                value,
            }))
        }
        RunResult::Unbounded(c) => {
            let point = to_original(&tableau.basic_solution());
            let mut direction = vec![Rational::zero(); ncols];
            direction[c] = Rational::one();
            for (i, &b) in tableau.basis.iter().enumerate() {
                if !tableau.rows[i][c].is_zero() {
                    direction[b] = -tableau.rows[i][c].clone();
                }
            }
            let ray = to_original(&direction);
            Ok(LpOutcome::Unbounded(UnboundedCertificate { point, ray }))
        }
    }
}

impl LinearProgram {
    /// Solves the program exactly and returns a certified outcome.
    ///
    /// Every returned certificate passes [`LinearProgram::verify`].
    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        let outcome = solve(self)?;
        debug_assert_eq!(self.verify(&outcome), Ok(()), "uncertified LP outcome");
        Ok(outcome)
    }
}

/// Free-function form of [`LinearProgram::solve`].
pub fn lp_solve(problem: &LinearProgram) -> Result<LpOutcome, LpError> {
    problem.solve()
}
