//! Elements of the Lipschitz-free space over a finite pointed metric space.
//!
//! An element is the coefficient vector of `Σ a_x δ(x)`; the base point's
//! coordinate is pinned to zero because `δ(0) = 0`. The norm is computed by
//! the transport-style primal LP over ordered pairs, whose simplex
//! multipliers form a 1-Lipschitz dual witness.

use std::collections::BTreeSet;
use std::sync::Arc;

use exactlp::{Direction, LinearProgram, LpOutcome, Rational, Relation, VarBound};
use num_traits::{One, Zero};

use crate::deleeuw::DeLeeuwMeasure;
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Pair};

pub type Space = Arc<FiniteMetricSpace>;

pub(crate) fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeElement {
    space: Space,
    coeffs: Vec<Rational>,
}

impl FreeElement {
    pub fn zero(space: Space) -> Self {
        let n = space.len();
        FreeElement {
            space,
            coeffs: vec![Rational::zero(); n],
        }
    }

    /// Coefficients for every point; the base entry must be zero.
    pub fn from_coeffs(space: Space, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != space.len() {
            return Err(Error::TableLength {
                found: coeffs.len(),
                expected: space.len(),
            });
        }
        if !coeffs[0].is_zero() {
            return Err(Error::NonzeroAtBase);
        }
        Ok(FreeElement { space, coeffs })
    }

    /// Coefficients for every point, silently dropping the base coordinate.
    pub(crate) fn from_coeffs_dropping_base(space: Space, mut coeffs: Vec<Rational>) -> Self {
        debug_assert_eq!(coeffs.len(), space.len());
        coeffs[0] = Rational::zero();
        FreeElement { space, coeffs }
    }

    /// `δ(x)`; equals zero for the base point.
    pub fn delta(space: Space, x: usize) -> Result<Self> {
        space.check_point(x)?;
        let mut e = FreeElement::zero(space);
        if x != 0 {
            e.coeffs[x] = Rational::one();
        }
        Ok(e)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, x: usize) -> &Rational {
        &self.coeffs[x]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Points with a nonzero coefficient. The `δ(x)` are linearly
    /// independent at finite scale, so this is the support proper.
    pub fn support(&self) -> BTreeSet<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(x, _)| x)
            .collect()
    }

    pub fn plus(&self, other: &FreeElement) -> Result<FreeElement> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FreeElement {
            space: self.space.clone(),
            coeffs,
        })
    }

    pub fn minus(&self, other: &FreeElement) -> Result<FreeElement> {
        self.plus(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, factor: &Rational) -> FreeElement {
        FreeElement {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// `⟨f, m⟩ = Σ a_x f(x)`.
    pub fn pair_with(&self, f: &PointFunction) -> Result<Rational> {
        if !same_space(&self.space, &f.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&f.values)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum())
    }
}

/// An element of `Lip₀(M)`: a value per point, zero at the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointFunction {
    space: Space,
    values: Vec<Rational>,
}

impl PointFunction {
    pub fn new(space: Space, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::TableLength {
                found: values.len(),
                expected: space.len(),
            });
        }
        if !values[0].is_zero() {
            return Err(Error::NonzeroAtBase);
        }
        Ok(PointFunction { space, values })
    }

    pub fn zero(space: Space) -> Self {
        let n = space.len();
        PointFunction {
            space,
            values: vec![Rational::zero(); n],
        }
    }

    /// `d(·, y) - d(0, y)`, a 1-Lipschitz function vanishing at the base.
    pub fn distance_to(space: Space, y: usize) -> Result<Self> {
        space.check_point(y)?;
        let shift = space.distance(0, y).clone();
        let values = (0..space.len())
            .map(|x| space.distance(x, y) - &shift)
            .collect();
        Ok(PointFunction { space, values })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.values[x]
    }

    pub fn plus(&self, other: &PointFunction) -> Result<PointFunction> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(PointFunction {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// `(f(x) - f(y)) / d(x, y)`.
pub(crate) fn slope(f: &PointFunction, x: usize, y: usize) -> Rational {
    (&f.values[x] - &f.values[y]) / f.space.distance(x, y)
}

/// Lipschitz constant of `f` with one ordered pair attaining it. On a
/// single-point space the value is 0 and no pair exists.
pub fn lipschitz_norm(f: &PointFunction) -> (Rational, Option<Pair>) {
    let mut best: Option<(Rational, Pair)> = None;
    for (x, y) in f.space.pairs() {
        let s = slope(f, x, y);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, (x, y)));
        }
    }
    match best {
        Some((v, p)) => (v, Some(p)),
        None => (Rational::zero(), None),
    }
}

/// `m_{xy} = (δ(x) - δ(y)) / d(x, y)`.
pub fn molecule(space: &Space, x: usize, y: usize) -> Result<FreeElement> {
    space.check_point(x)?;
    space.check_point(y)?;
    if x == y {
        return Err(Error::NotDistinct(vec![x, y]));
    }
    let mut e = FreeElement::zero(space.clone());
    let inv = Rational::one() / space.distance(x, y);
    e.coeffs[x] += &inv;
    e.coeffs[y] -= &inv;
    e.coeffs[0] = Rational::zero();
    Ok(e)
}

/// Norm of an element with both LP witnesses attached.
#[derive(Debug, Clone, PartialEq)]
pub struct NormCertificate {
    pub value: Rational,
    /// Optimal 1-Lipschitz `f` with `⟨f, m⟩ = value`.
    pub dual: PointFunction,
    /// Optimal representation: `μ ≥ 0`, `Φ*μ = m`, total mass `value`.
    pub primal: DeLeeuwMeasure,
}

impl NormCertificate {
    /// Re-checks both witnesses against `m` without trusting the solver.
    pub fn verify(&self, m: &FreeElement) -> Result<()> {
        let (lip, _) = lipschitz_norm(&self.dual);
        if lip > Rational::one() {
            return Err(Error::Certificate("dual witness is not 1-Lipschitz".into()));
        }
        if m.pair_with(&self.dual)? != self.value {
            return Err(Error::Certificate("dual witness does not attain the norm".into()));
        }
        if !self.primal.is_positive() || self.primal.total_mass() != self.value {
            return Err(Error::Certificate("primal witness has the wrong mass".into()));
        }
        if crate::deleeuw::phi_adjoint(&self.primal) != *m {
            return Err(Error::Certificate("primal witness does not represent m".into()));
        }
        Ok(())
    }
}

/// Points that carry mass in `m`, together with the base point.
fn support_with_base(m: &FreeElement) -> Vec<usize> {
    let mut points = m.support();
    points.insert(0);
    points.into_iter().collect()
}

/// Builds the balance LP `min Σ μ` s.t. `Φ*μ = m`, `μ ≥ 0` over the ordered
/// pairs of `points`, one row per non-base point of `points`.
fn balance_program(m: &FreeElement, points: &[usize]) -> (LinearProgram, Vec<Pair>) {
    let space = &m.space;
    let columns: Vec<Pair> = points
        .iter()
        .flat_map(|&x| points.iter().filter(move |&&y| y != x).map(move |&y| (x, y)))
        .collect();
    let mut lp = LinearProgram::new(Direction::Minimize, vec![Rational::one(); columns.len()]);
    for &z in points.iter().filter(|&&z| z != 0) {
        let entries: Vec<(usize, Rational)> = columns
            .iter()
            .enumerate()
            .filter_map(|(k, &(x, y))| {
                if x == z {
                    Some((k, Rational::one() / space.distance(x, y)))
                } else if y == z {
                    Some((k, -(Rational::one() / space.distance(x, y))))
                } else {
                    None
                }
            })
            .collect();
        lp.add_sparse_constraint(entries, Relation::Eq, m.coeffs[z].clone())
            .expect("column indices are in range");
    }
    (lp, columns)
}

/// `‖m‖`, with an optimal representation and an optimal 1-Lipschitz
/// function as certificates. Both sides are verified before returning.
///
/// The representation only uses pairs of points in `supp(m) ∪ {0}`, and
/// the dual function is the largest 1-Lipschitz extension of its values
/// on that set.
pub fn free_norm(m: &FreeElement) -> Result<NormCertificate> {
    let space = &m.space;
    if m.is_zero() {
        return Ok(NormCertificate {
            value: Rational::zero(),
            dual: PointFunction::zero(space.clone()),
            primal: DeLeeuwMeasure::zero(space.clone()),
        });
    }
    let points = support_with_base(m);
    let (lp, columns) = balance_program(m, &points);
    let sol = match lp.solve()? {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(Error::Certificate(format!(
                "norm LP returned {:?}",
                other.status()
            )))
        }
    };
    let mut on_support = vec![(0, Rational::zero())];
    on_support.extend(points[1..].iter().copied().zip(sol.dual));
    let values = (0..space.len())
        .map(|z| {
            on_support
                .iter()
                .map(|(s, f)| f + space.distance(*s, z))
                .min()
                .expect("base point is always present")
        })
        .collect();
    let dual = PointFunction::new(space.clone(), values)?;
    let primal = DeLeeuwMeasure::from_entries(
        space.clone(),
        columns.into_iter().zip(sol.primal).filter(|(_, w)| !w.is_zero()),
    )?;
    let cert = NormCertificate {
        value: sol.value,
        dual,
        primal,
    };
    cert.verify(m)?;
    Ok(cert)
}

/// `max {⟨f, m⟩ : Lip(f) ≤ 1}` solved directly over the function values.
/// Independent of [`free_norm`]'s primal solve; used to cross-check it.
pub fn lipschitz_dual_value(m: &FreeElement) -> Result<(Rational, PointFunction)> {
    let space = &m.space;
    let n = space.len();
    if n == 1 {
        return Ok((Rational::zero(), PointFunction::zero(space.clone())));
    }
    // variable k is f(k + 1)
    let objective = m.coeffs[1..].to_vec();
    let mut lp = LinearProgram::new(Direction::Maximize, objective);
    for k in 0..n - 1 {
        lp.set_bound(k, VarBound::Free);
    }
    for (x, y) in space.pairs() {
        let mut entries = Vec::new();
        if x != 0 {
            entries.push((x - 1, Rational::one()));
        }
        if y != 0 {
            entries.push((y - 1, -Rational::one()));
        }
        lp.add_sparse_constraint(entries, Relation::Le, space.distance(x, y).clone())?;
    }
    let sol = lp
        .solve()?
        .into_optimal()
        .ok_or_else(|| Error::Certificate("Lipschitz dual LP is not optimal".into()))?;
    let mut values = vec![Rational::zero()];
    values.extend(sol.primal);
    Ok((sol.value, PointFunction::new(space.clone(), values)?))
}

/// Re-expresses `m` over the same points with `new_base` as base point:
/// `δ(x) ↦ δ'(x) - δ'(0)`. Norm-preserving.
pub fn rebase(m: &FreeElement, new_base: usize) -> Result<FreeElement> {
    let (space, position) = m.space.rebased(new_base)?;
    let space = Arc::new(space);
    let mut coeffs = vec![Rational::zero(); space.len()];
    let old_base = position[0];
    for (x, a) in m.coeffs.iter().enumerate().skip(1) {
        if a.is_zero() {
            continue;
        }
        coeffs[position[x]] += a;
        coeffs[old_base] -= a;
    }
    Ok(FreeElement::from_coeffs_dropping_base(space, coeffs))
}

/// `S_c m = m / c`, living over `(M, c·d)`.
pub fn scale_metric(m: &FreeElement, c: &Rational) -> Result<FreeElement> {
    let space = Arc::new(m.space.scaled(c)?);
    Ok(FreeElement {
        space,
        coeffs: m.coeffs.iter().map(|a| a / c).collect(),
    })
}

/// Pairwise Lipschitz constant of a point map between spaces.
pub fn map_lipschitz_constant(source: &FiniteMetricSpace, target: &FiniteMetricSpace, map: &[usize]) -> Rational {
    source
        .pairs()
        .map(|(x, y)| target.distance(map[x], map[y]) / source.distance(x, y))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Linearisation of a base-preserving map: `Σ a_x δ(x) ↦ Σ a_x δ'(map[x])`.
pub fn pushforward(m: &FreeElement, target: &Space, map: &[usize]) -> Result<FreeElement> {
    if map.len() != m.space.len() {
        return Err(Error::MapLength {
            found: map.len(),
            expected: m.space.len(),
        });
    }
    for &t in map {
        target.check_point(t)?;
    }
    if map[0] != 0 {
        return Err(Error::NotBasePreserving);
    }
    let mut coeffs = vec![Rational::zero(); target.len()];
    for (x, a) in m.coeffs.iter().enumerate() {
        if !a.is_zero() {
            coeffs[map[x]] += a;
        }
    }
    Ok(FreeElement::from_coeffs_dropping_base(target.clone(), coeffs))
}
