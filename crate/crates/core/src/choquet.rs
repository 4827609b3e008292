//! The cone `G`, the quasi-order `≼` and minimal representations.
//!
//! `G` is cut out by one inequality per ordered triple of distinct points,
//! `d(x,y)g(x,y) ≤ d(x,u)g(x,u) + d(u,y)g(u,y)`. Writing each inequality as
//! `⟨t, g⟩ ≥ 0` for a *triangle move* `t`, Farkas' lemma gives
//! `μ ≼ ν  ⟺  ν - μ ∈ cone{t}`, which is what [`precedes`] decides. The
//! weight `g₀ = 1/(1+d)` strictly increases along every move, so the
//! down-set of a measure has a unique `g₀`-minimiser; that LP replaces the
//! Zorn's-lemma argument in [`minimal_below`].

use std::collections::BTreeMap;

use exactlp::{Direction, LinearProgram, LpOutcome, Rational, Relation, VarBound};
use num_traits::{One, Signed, Zero};

use crate::deleeuw::{is_optimal, optimal_representation, phi_adjoint, DeLeeuwMeasure, EdgeFunction};
use crate::error::{Error, Result};
use crate::free::{FreeElement, Space};
use crate::metric::FiniteMetricSpace;

/// `(x, u, y)`: split the pair `(x, y)` through `u`.
pub type Triple = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleMove {
    pub triple: Triple,
    /// Entries `d(x,u)` at `(x,u)`, `d(u,y)` at `(u,y)`, `-d(x,y)` at `(x,y)`.
    pub entries: [((usize, usize), Rational); 3],
}

impl TriangleMove {
    pub fn new(space: &FiniteMetricSpace, x: usize, u: usize, y: usize) -> Self {
        TriangleMove {
            triple: (x, u, y),
            entries: [
                ((x, u), space.distance(x, u).clone()),
                ((u, y), space.distance(u, y).clone()),
                ((x, y), -space.distance(x, y).clone()),
            ],
        }
    }

    /// `⟨t, g⟩`.
    pub fn pair_with(&self, g: &EdgeFunction) -> Rational {
        self.entries
            .iter()
            .map(|((a, b), w)| w * g.get(*a, *b))
            .sum()
    }
}

/// Every triangle move, ordered lexicographically by `(x, u, y)`.
pub fn triangle_moves(space: &FiniteMetricSpace) -> Vec<TriangleMove> {
    let n = space.len();
    let mut moves = Vec::with_capacity(n * n.saturating_sub(1) * n.saturating_sub(2));
    for x in 0..n {
        for u in 0..n {
            for y in 0..n {
                if x != u && u != y && x != y {
                    moves.push(TriangleMove::new(space, x, u, y));
                }
            }
        }
    }
    moves
}

/// First triple whose inequality `g` violates, or `None` if `g ∈ G`.
pub fn cone_violation(g: &EdgeFunction) -> Option<Triple> {
    let space = g.space();
    triangle_moves(space)
        .into_iter()
        .find(|t| t.pair_with(g).is_negative())
        .map(|t| t.triple)
}

pub fn in_cone_g(g: &EdgeFunction) -> bool {
    cone_violation(g).is_none()
}

/// `g = τ ∘ d` from a table of `τ` values on the distances of the space.
///
/// `t ↦ tτ(t)` must be increasing and subadditive; both are checked on every
/// combination the cone inequalities can touch: `a ≤ b` for monotonicity
/// and `a ≤ s + t` for subadditivity, with `a, b, s, t` distance values.
pub fn tau_edge_function(space: &Space, tau: &BTreeMap<Rational, Rational>) -> Result<EdgeFunction> {
    let values = space.distance_values();
    let mut weighted = Vec::with_capacity(values.len());
    for t in &values {
        let tv = tau.get(t).ok_or_else(|| Error::TauMissing(t.clone()))?;
        weighted.push((t.clone(), t * tv));
    }
    for (i, (a, fa)) in weighted.iter().enumerate() {
        for (b, fb) in &weighted[i..] {
            if fa > fb {
                return Err(Error::TauNotIncreasing(a.clone(), b.clone()));
            }
        }
    }
    for (a, fa) in &weighted {
        for (i, (s, fs)) in weighted.iter().enumerate() {
            for (t, ft) in &weighted[i..] {
                if a <= &(s + t) && *fa > fs + ft {
                    return Err(Error::TauNotSubadditive(a.clone(), s.clone(), t.clone()));
                }
            }
        }
    }
    let s = space.clone();
    Ok(EdgeFunction::from_fn(space.clone(), |x, y| {
        tau[s.distance(x, y)].clone()
    }))
}

/// Tabulates a rule for `τ` on the distances of `space`.
pub fn tau_table(space: &FiniteMetricSpace, rule: impl Fn(&Rational) -> Rational) -> BTreeMap<Rational, Rational> {
    space
        .distance_values()
        .into_iter()
        .map(|t| {
            let v = rule(&t);
            (t, v)
        })
        .collect()
}

/// Nonnegative weights on triangle moves with `ν - μ = Σ λₜ t`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrecedenceCertificate {
    pub weights: BTreeMap<Triple, Rational>,
}

impl PrecedenceCertificate {
    /// `Σ λₜ t` as a measure.
    pub fn combination(&self, space: &Space) -> Result<DeLeeuwMeasure> {
        let mut entries = Vec::new();
        for (&(x, u, y), lambda) in &self.weights {
            for (pair, w) in TriangleMove::new(space, x, u, y).entries {
                entries.push((pair, w * lambda));
            }
        }
        DeLeeuwMeasure::from_entries(space.clone(), entries)
    }

    pub fn verify(&self, mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<bool> {
        if self.weights.values().any(|w| w.is_negative()) {
            return Ok(false);
        }
        Ok(nu.minus(mu)? == self.combination(mu.space())?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Precedence {
    Precedes(PrecedenceCertificate),
    /// `g ∈ G` with `⟨g, μ⟩ > ⟨g, ν⟩`.
    Separated(EdgeFunction),
}

impl Precedence {
    pub fn holds(&self) -> bool {
        matches!(self, Precedence::Precedes(_))
    }
}

fn require_positive(mu: &DeLeeuwMeasure) -> Result<()> {
    match mu.first_negative() {
        Some((x, y)) => Err(Error::SignedMeasure(x, y)),
        None => Ok(()),
    }
}

fn require_same(mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<()> {
    if crate::free::same_space(mu.space(), nu.space()) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Decides `μ ≼ ν` by LP feasibility over triangle moves. A negative answer
/// carries a separating `g ∈ G` built from the Farkas multipliers.
pub fn precedes(mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<Precedence> {
    require_same(mu, nu)?;
    require_positive(mu)?;
    require_positive(nu)?;
    let space = mu.space().clone();
    let moves = triangle_moves(&space);
    let target = nu.minus(mu)?.to_dense();

    let mut lp = LinearProgram::new(Direction::Minimize, vec![Rational::zero(); moves.len()]);
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); space.num_pairs()];
    for (k, t) in moves.iter().enumerate() {
        for ((a, b), w) in &t.entries {
            rows[space.pair_index(*a, *b)].push((k, w.clone()));
        }
    }
    for (row, rhs) in rows.into_iter().zip(target) {
        lp.add_sparse_constraint(row, Relation::Eq, rhs)?;
    }
    match lp.solve()? {
        LpOutcome::Optimal(sol) => {
            let weights = moves
                .iter()
                .zip(sol.primal)
                .filter(|(_, l)| !l.is_zero())
                .map(|(t, l)| (t.triple, l))
                .collect();
            Ok(Precedence::Precedes(PrecedenceCertificate { weights }))
        }
        LpOutcome::Infeasible(cert) => {
            let values = cert.multipliers.iter().map(|y| -y).collect();
            let g = EdgeFunction::new(space, values)?;
            if !in_cone_g(&g) || mu.integrate(&g)? <= nu.integrate(&g)? {
                return Err(Error::Certificate("separating function is invalid".into()));
            }
            Ok(Precedence::Separated(g))
        }
        LpOutcome::Unbounded(_) => unreachable!("feasibility LP has a zero objective"),
    }
}

/// Independent route for `μ ≼ ν`: minimise `⟨g, ν - μ⟩` over
/// `g ∈ G, -1 ≤ g ≤ 1` directly. Returns the minimum (always `≤ 0`) and a
/// minimiser; `μ ≼ ν` iff the minimum is zero.
pub fn precedence_gap(mu: &DeLeeuwMeasure, nu: &DeLeeuwMeasure) -> Result<(Rational, EdgeFunction)> {
    require_same(mu, nu)?;
    let space = mu.space().clone();
    let diff = nu.minus(mu)?.to_dense();
    let p = space.num_pairs();
    let mut lp = LinearProgram::new(Direction::Minimize, diff);
    for k in 0..p {
        lp.set_bound(k, VarBound::Free);
        lp.add_sparse_constraint([(k, Rational::one())], Relation::Le, Rational::one())?;
        lp.add_sparse_constraint([(k, Rational::one())], Relation::Ge, -Rational::one())?;
    }
    for t in triangle_moves(&space) {
        let entries = t
            .entries
            .iter()
            .map(|((a, b), w)| (space.pair_index(*a, *b), w.clone()));
        lp.add_sparse_constraint(entries, Relation::Ge, Rational::zero())?;
    }
    let sol = lp
        .solve()?
        .into_optimal()
        .ok_or_else(|| Error::Certificate("bounded cone LP is not optimal".into()))?;
    Ok((sol.value, EdgeFunction::new(space, sol.primal)?))
}

/// Checks `⟨g₀, t⟩ > 0` for every triangle move of `space`.
pub fn check_g0_strictness(space: &Space) -> Result<()> {
    let g0 = EdgeFunction::inverse_one_plus_distance(space.clone());
    for t in triangle_moves(space) {
        if !t.pair_with(&g0).is_positive() {
            let (x, u, y) = t.triple;
            return Err(Error::NonStrictMove(x, u, y));
        }
    }
    Ok(())
}

/// The `g₀`-minimiser of `{ν ≥ 0 : ν ≼ μ}`.
///
/// Solved as one LP in `(ν, λ)`: `ν + Σ λₜ t = μ`, `ν, λ ≥ 0`, minimising
/// `⟨g₀, ν⟩`. Strict positivity of `⟨g₀, t⟩` (checked first) makes the
/// result `≼`-minimal. Other `≼`-minimal measures may also lie below `μ`.
pub fn minimal_below(mu: &DeLeeuwMeasure) -> Result<DeLeeuwMeasure> {
    require_positive(mu)?;
    let space = mu.space().clone();
    if mu.is_zero() {
        return Ok(mu.clone());
    }
    check_g0_strictness(&space)?;
    let p = space.num_pairs();
    let g0 = EdgeFunction::inverse_one_plus_distance(space.clone());
    let moves = triangle_moves(&space);
    let mut objective = g0.values().to_vec();
    objective.extend(std::iter::repeat_n(Rational::zero(), moves.len()));
    let mut lp = LinearProgram::new(Direction::Minimize, objective);
    let mut rows: Vec<Vec<(usize, Rational)>> = (0..p).map(|k| vec![(k, Rational::one())]).collect();
    for (k, t) in moves.iter().enumerate() {
        for ((a, b), w) in &t.entries {
            rows[space.pair_index(*a, *b)].push((p + k, w.clone()));
        }
    }
    for (row, rhs) in rows.into_iter().zip(mu.to_dense()) {
        lp.add_sparse_constraint(row, Relation::Eq, rhs)?;
    }
    let sol = lp
        .solve()?
        .into_optimal()
        .ok_or_else(|| Error::Certificate("minimality LP is not optimal".into()))?;
    let nu = DeLeeuwMeasure::from_dense(space, &sol.primal[..p]);
    if phi_adjoint(&nu) != phi_adjoint(mu) {
        return Err(Error::Certificate("minimal measure represents a different element".into()));
    }
    Ok(nu)
}

/// `μ` is minimal iff it is its own `g₀`-minimiser.
pub fn is_minimal(mu: &DeLeeuwMeasure) -> Result<bool> {
    Ok(minimal_below(mu)? == *mu)
}

/// Splitting `m = m_c + m_d` into a convex integral of molecules and a
/// diagonal part.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalDecomposition {
    pub molecular: FreeElement,
    pub diagonal: FreeElement,
    /// Optimal and `≼`-minimal representation of `m`, concentrated on
    /// actual pairs.
    pub certificate: DeLeeuwMeasure,
}

/// With finitely many points there is no diagonal, so the split is always
/// `(m, 0)`; the certificate is an optimal minimal representation.
pub fn diagonal_decompose(m: &FreeElement) -> Result<DiagonalDecomposition> {
    let mu = minimal_below(&optimal_representation(m)?)?;
    if !is_optimal(&mu)? {
        return Err(Error::Certificate("minimal representation lost optimality".into()));
    }
    Ok(DiagonalDecomposition {
        molecular: m.clone(),
        diagonal: FreeElement::zero(m.space().clone()),
        certificate: mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::PointFunction;
    use crate::deleeuw::phi;
    use exactlp::{int, ratio};
    use std::sync::Arc;

    fn half_grid() -> Space {
        Arc::new(FiniteMetricSpace::on_line(&[int(0), ratio(1, 2), int(1)]).unwrap())
    }

    fn concave3() -> Space {
        Arc::new(
            FiniteMetricSpace::from_matrix(vec![
                vec![int(0), int(1), ratio(3, 2)],
                vec![int(1), int(0), int(1)],
                vec![ratio(3, 2), int(1), int(0)],
            ])
            .unwrap(),
        )
    }

    fn nu(s: &Space) -> DeLeeuwMeasure {
        DeLeeuwMeasure::from_entries(s.clone(), [((2, 1), ratio(1, 2)), ((1, 0), ratio(1, 2))])
            .unwrap()
    }

    #[test]
    fn cone_membership_examples() {
        let s = concave3();
        assert!(in_cone_g(&EdgeFunction::constant(s.clone(), int(1))));
        let f = PointFunction::new(s.clone(), vec![int(0), ratio(1, 3), int(-1)]).unwrap();
        assert!(in_cone_g(&phi(&f)));
        assert!(cone_violation(&EdgeFunction::constant(s, int(-1))).is_some());
    }

    #[test]
    fn tau_examples() {
        let s = Arc::new(FiniteMetricSpace::on_line(&[int(0), int(1), int(2)]).unwrap());
        let one = tau_table(&s, |_| int(1));
        assert!(in_cone_g(&tau_edge_function(&s, &one).unwrap()));
        let g0 = tau_table(&s, |t| Rational::one() / (Rational::one() + t));
        assert_eq!(
            tau_edge_function(&s, &g0).unwrap(),
            EdgeFunction::inverse_one_plus_distance(s.clone())
        );
        let square = tau_table(&s, |t| t.clone());
        assert!(matches!(
            tau_edge_function(&s, &square),
            Err(Error::TauNotSubadditive(..))
        ));
    }

    #[test]
    fn splitting_example_precedence() {
        let s = half_grid();
        let delta = DeLeeuwMeasure::dirac(s.clone(), 2, 0).unwrap();
        let n = nu(&s);
        let Precedence::Precedes(cert) = precedes(&delta, &n).unwrap() else {
            panic!("expected precedence")
        };
        assert_eq!(cert.weights, BTreeMap::from([((2, 1, 0), int(1))]));
        assert!(cert.verify(&delta, &n).unwrap());

        let back = precedes(&n, &delta).unwrap();
        let Precedence::Separated(g) = back else {
            panic!("expected separation")
        };
        assert!(in_cone_g(&g));
        assert!(n.integrate(&g).unwrap() > delta.integrate(&g).unwrap());

        assert_eq!(
            precedes(&n, &n).unwrap(),
            Precedence::Precedes(PrecedenceCertificate::default())
        );
    }

    #[test]
    fn signed_input_rejected() {
        let s = half_grid();
        let bad = DeLeeuwMeasure::from_entries(s.clone(), [((1, 0), int(-1))]).unwrap();
        assert!(matches!(precedes(&bad, &bad), Err(Error::SignedMeasure(1, 0))));
        assert!(matches!(minimal_below(&bad), Err(Error::SignedMeasure(1, 0))));
    }

    #[test]
    fn minimal_examples() {
        let s = half_grid();
        let delta = DeLeeuwMeasure::dirac(s.clone(), 2, 0).unwrap();
        assert_eq!(minimal_below(&nu(&s)).unwrap(), delta);
        assert!(is_minimal(&delta).unwrap());
        assert!(!is_minimal(&nu(&s)).unwrap());
        assert!(is_minimal(&DeLeeuwMeasure::zero(s.clone())).unwrap());

        let c = concave3();
        let d = DeLeeuwMeasure::dirac(c.clone(), 0, 2).unwrap();
        assert_eq!(minimal_below(&d).unwrap(), d);
    }

    #[test]
    fn diagonal_examples() {
        let s = half_grid();
        let m = crate::free::molecule(&s, 1, 2).unwrap();
        let dd = diagonal_decompose(&m).unwrap();
        assert_eq!(dd.molecular, m);
        assert!(dd.diagonal.is_zero());
        assert_eq!(dd.certificate, DeLeeuwMeasure::dirac(s.clone(), 1, 2).unwrap());
        let z = diagonal_decompose(&FreeElement::zero(s)).unwrap();
        assert!(z.certificate.is_zero());
    }

    #[test]
    fn g0_is_strict() {
        check_g0_strictness(&half_grid()).unwrap();
        check_g0_strictness(&concave3()).unwrap();
    }
}
