//! The De Leeuw transform and measures on the finite pair set.
//!
//! With finitely many points the pair set `{(x, y) : x ≠ y}` is already
//! compact, so a representation is just a finitely supported mass table on
//! ordered pairs and never charges anything outside of them.

use std::collections::{BTreeMap, BTreeSet};

use exactlp::Rational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::free::{free_norm, molecule, same_space, slope, FreeElement, PointFunction, Space};
use crate::metric::Pair;

pub type PairSet = BTreeSet<Pair>;

/// A rational value on every ordered pair, stored densely in
/// [`crate::FiniteMetricSpace::pairs`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeFunction {
    space: Space,
    values: Vec<Rational>,
}

impl EdgeFunction {
    pub fn new(space: Space, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.num_pairs() {
            return Err(Error::TableLength {
                found: values.len(),
                expected: space.num_pairs(),
            });
        }
        Ok(EdgeFunction { space, values })
    }

    pub fn from_fn(space: Space, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let values = space.pairs().map(|(x, y)| f(x, y)).collect();
        EdgeFunction { space, values }
    }

    pub fn constant(space: Space, c: Rational) -> Self {
        let n = space.num_pairs();
        EdgeFunction {
            space,
            values: vec![c; n],
        }
    }

    /// `g₀(x, y) = 1 / (1 + d(x, y))`.
    pub fn inverse_one_plus_distance(space: Space) -> Self {
        let s = space.clone();
        Self::from_fn(space, |x, y| Rational::one() / (Rational::one() + s.distance(x, y)))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> &Rational {
        &self.values[self.space.pair_index(x, y)]
    }

    pub fn sup_abs(&self) -> Rational {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// A signed measure on ordered pairs; zero masses are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeLeeuwMeasure {
    space: Space,
    masses: BTreeMap<Pair, Rational>,
}

impl DeLeeuwMeasure {
    pub fn zero(space: Space) -> Self {
        DeLeeuwMeasure {
            space,
            masses: BTreeMap::new(),
        }
    }

    /// Repeated pairs are merged by summing their masses.
    pub fn from_entries<I>(space: Space, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Pair, Rational)>,
    {
        let mut masses: BTreeMap<Pair, Rational> = BTreeMap::new();
        for ((x, y), m) in entries {
            space.check_point(x)?;
            space.check_point(y)?;
            if x == y {
                return Err(Error::NotDistinct(vec![x, y]));
            }
            *masses.entry((x, y)).or_insert_with(Rational::zero) += m;
        }
        masses.retain(|_, m| !m.is_zero());
        Ok(DeLeeuwMeasure { space, masses })
    }

    pub fn dirac(space: Space, x: usize, y: usize) -> Result<Self> {
        Self::from_entries(space, [((x, y), Rational::one())])
    }

    /// From a dense mass vector in pair order.
    pub fn from_dense(space: Space, dense: &[Rational]) -> Self {
        let masses = dense
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(k, m)| (space.pair_at(k), m.clone()))
            .collect();
        DeLeeuwMeasure { space, masses }
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut dense = vec![Rational::zero(); self.space.num_pairs()];
        for (&(x, y), m) in &self.masses {
            dense[self.space.pair_index(x, y)] = m.clone();
        }
        dense
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn mass(&self, x: usize, y: usize) -> Rational {
        self.masses.get(&(x, y)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Pair, &Rational)> {
        self.masses.iter().map(|(&p, m)| (p, m))
    }

    pub fn is_zero(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.masses.values().all(|m| m.is_positive())
    }

    /// First pair carrying negative mass, if any.
    pub fn first_negative(&self) -> Option<Pair> {
        self.masses
            .iter()
            .find(|(_, m)| m.is_negative())
            .map(|(&p, _)| p)
    }

    /// Signed total `Σ μ(x, y)`.
    pub fn total_mass(&self) -> Rational {
        self.masses.values().sum()
    }

    /// `Σ |μ(x, y)|`, the measure norm.
    pub fn total_variation(&self) -> Rational {
        self.masses.values().map(|m| m.abs()).sum()
    }

    pub fn support(&self) -> PairSet {
        self.masses.keys().copied().collect()
    }

    /// `⟨g, μ⟩ = Σ g(x, y) μ(x, y)`.
    pub fn integrate(&self, g: &EdgeFunction) -> Result<Rational> {
        if !same_space(&self.space, &g.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .masses
            .iter()
            .map(|(&(x, y), m)| g.get(x, y) * m)
            .sum())
    }

    pub fn plus(&self, other: &DeLeeuwMeasure) -> Result<DeLeeuwMeasure> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Self::from_entries(
            self.space.clone(),
            self.masses
                .iter()
                .chain(&other.masses)
                .map(|(&p, m)| (p, m.clone())),
        )
    }

    pub fn minus(&self, other: &DeLeeuwMeasure) -> Result<DeLeeuwMeasure> {
        self.plus(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, factor: &Rational) -> DeLeeuwMeasure {
        let masses = self
            .masses
            .iter()
            .map(|(&p, m)| (p, m * factor))
            .filter(|(_, m)| !m.is_zero())
            .collect();
        DeLeeuwMeasure {
            space: self.space.clone(),
            masses,
        }
    }

    /// Entrywise `self ≤ other`.
    pub fn dominated_by(&self, other: &DeLeeuwMeasure) -> bool {
        let pairs: PairSet = self.support().union(&other.support()).copied().collect();
        pairs
            .into_iter()
            .all(|(x, y)| self.mass(x, y) <= other.mass(x, y))
    }
}

/// `Φf(x, y) = (f(x) - f(y)) / d(x, y)`.
pub fn phi(f: &PointFunction) -> EdgeFunction {
    let space = f.space().clone();
    EdgeFunction::from_fn(space, |x, y| slope(f, x, y))
}

/// `Φ*μ = Σ μ(x, y) m_{xy}`.
pub fn phi_adjoint(mu: &DeLeeuwMeasure) -> FreeElement {
    let space = mu.space.clone();
    let mut coeffs = vec![Rational::zero(); space.len()];
    for (&(x, y), m) in &mu.masses {
        let w = m / space.distance(x, y);
        coeffs[x] += &w;
        coeffs[y] -= &w;
    }
    FreeElement::from_coeffs_dropping_base(space, coeffs)
}

/// Positive with total mass equal to the norm of what it represents.
pub fn is_optimal(mu: &DeLeeuwMeasure) -> Result<bool> {
    if !mu.is_positive() {
        return Ok(false);
    }
    let norm = free_norm(&phi_adjoint(mu))?.value;
    Ok(mu.total_mass() == norm)
}

/// A positive representation of `m` with total mass `‖m‖`.
pub fn optimal_representation(m: &FreeElement) -> Result<DeLeeuwMeasure> {
    Ok(free_norm(m)?.primal)
}

/// `m = Σ wᵢ m_{pairᵢ}` with `wᵢ > 0` and `Σ wᵢ = ‖m‖`, read off an
/// optimal representation.
pub fn convex_integral(m: &FreeElement) -> Result<Vec<(Rational, Pair)>> {
    let mu = optimal_representation(m)?;
    Ok(mu.masses.into_iter().map(|(p, w)| (w, p)).collect())
}

/// `Σ wᵢ m_{pairᵢ}`.
pub fn sum_of_molecules(space: &Space, terms: &[(Rational, Pair)]) -> Result<FreeElement> {
    let mut acc = FreeElement::zero(space.clone());
    for (w, (x, y)) in terms {
        acc = acc.plus(&molecule(space, *x, *y)?.scaled(w))?;
    }
    Ok(acc)
}

/// `μ↾A`.
pub fn restrict(mu: &DeLeeuwMeasure, subset: &PairSet) -> DeLeeuwMeasure {
    let masses = mu
        .masses
        .iter()
        .filter(|(p, _)| subset.contains(p))
        .map(|(&p, m)| (p, m.clone()))
        .collect();
    DeLeeuwMeasure {
        space: mu.space.clone(),
        masses,
    }
}

/// Every ordered pair of the space not in `subset`.
pub fn complement(space: &Space, subset: &PairSet) -> PairSet {
    space.pairs().filter(|p| !subset.contains(p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// Density for [`weight`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weighting {
    /// `h ∘ p₁`: one value per point.
    First(Vec<Rational>),
    /// `h ∘ p₂`: one value per point.
    Second(Vec<Rational>),
    /// A value per ordered pair.
    Pair(EdgeFunction),
}

/// `dλ = h dμ`. Any rational `h` is accepted; integrability is automatic
/// for finitely supported measures.
pub fn weight(mu: &DeLeeuwMeasure, h: &Weighting) -> Result<DeLeeuwMeasure> {
    let n = mu.space.len();
    let check = |v: &Vec<Rational>| {
        if v.len() == n {
            Ok(())
        } else {
            Err(Error::TableLength {
                found: v.len(),
                expected: n,
            })
        }
    };
    match h {
        Weighting::First(v) | Weighting::Second(v) => check(v)?,
        Weighting::Pair(g) => {
            if !same_space(&mu.space, &g.space) {
                return Err(Error::SpaceMismatch);
            }
        }
    }
    let entries = mu.masses.iter().map(|(&(x, y), m)| {
        let factor = match h {
            Weighting::First(v) => &v[x],
            Weighting::Second(v) => &v[y],
            Weighting::Pair(g) => g.get(x, y),
        };
        ((x, y), m * factor)
    });
    DeLeeuwMeasure::from_entries(mu.space.clone(), entries)
}

/// `(pᵢ)♯μ` as a mass per point.
pub fn marginal(mu: &DeLeeuwMeasure, axis: Axis) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); mu.space.len()];
    for (&(x, y), m) in &mu.masses {
        let z = match axis {
            Axis::First => x,
            Axis::Second => y,
        };
        out[z] += m;
    }
    out
}

/// `p₁(A) ∪ p₂(A)`.
pub fn shadow(subset: &PairSet) -> BTreeSet<usize> {
    subset.iter().flat_map(|&(x, y)| [x, y]).collect()
}

/// Norm-additive splitting of an element along a partition of the pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// The optimal representation that was cut up.
    pub representation: DeLeeuwMeasure,
    pub parts: Vec<FreeElement>,
    pub norms: Vec<Rational>,
    pub total_norm: Rational,
}

/// `mₖ = Φ*(μ↾partₖ)` for one optimal `μ` of `m`; then `Σ mₖ = m` and
/// `Σ ‖mₖ‖ = ‖m‖`.
pub fn decompose(m: &FreeElement, parts: &[PairSet]) -> Result<Decomposition> {
    check_partition(m.space(), parts)?;
    decompose_with(&optimal_representation(m)?, parts)
}

/// Like [`decompose`] but cuts up a caller-supplied optimal representation.
pub fn decompose_with(mu: &DeLeeuwMeasure, parts: &[PairSet]) -> Result<Decomposition> {
    check_partition(mu.space(), parts)?;
    if !is_optimal(mu)? {
        return Err(Error::Certificate("representation is not optimal".into()));
    }
    let total_norm = mu.total_mass();
    let mut pieces = Vec::with_capacity(parts.len());
    let mut norms = Vec::with_capacity(parts.len());
    for part in parts {
        let piece = phi_adjoint(&restrict(mu, part));
        norms.push(free_norm(&piece)?.value);
        pieces.push(piece);
    }
    let sum_norms: Rational = norms.iter().sum();
    if sum_norms != total_norm {
        return Err(Error::Certificate("part norms do not add up".into()));
    }
    Ok(Decomposition {
        representation: mu.clone(),
        parts: pieces,
        norms,
        total_norm,
    })
}

fn check_partition(space: &Space, parts: &[PairSet]) -> Result<()> {
    let mut seen = PairSet::new();
    for part in parts {
        for &(x, y) in part {
            if x >= space.len() || y >= space.len() || x == y || !seen.insert((x, y)) {
                return Err(Error::NotAPartition);
            }
        }
    }
    if seen.len() != space.num_pairs() {
        return Err(Error::NotAPartition);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use exactlp::{int, ratio};
    use std::sync::Arc;

    fn half_grid() -> Space {
        Arc::new(FiniteMetricSpace::on_line(&[int(0), ratio(1, 2), int(1)]).unwrap())
    }

    fn line3() -> Space {
        Arc::new(FiniteMetricSpace::on_line(&[int(0), int(1), int(2)]).unwrap())
    }

    /// `½(δ_(1,½) + δ_(½,0))`; point 1 is ½, point 2 is 1.
    fn nu(s: &Space) -> DeLeeuwMeasure {
        DeLeeuwMeasure::from_entries(s.clone(), [((2, 1), ratio(1, 2)), ((1, 0), ratio(1, 2))])
            .unwrap()
    }

    #[test]
    fn phi_examples() {
        let s = line3();
        assert_eq!(
            phi(&PointFunction::zero(s.clone())),
            EdgeFunction::constant(s.clone(), int(0))
        );
        let f = PointFunction::distance_to(s.clone(), 0).unwrap();
        let g = phi(&f);
        for (x, y) in s.pairs() {
            let expected = if x > y { int(1) } else { int(-1) };
            assert_eq!(*g.get(x, y), expected);
        }
    }

    #[test]
    fn phi_adjoint_examples() {
        let s = half_grid();
        assert_eq!(
            phi_adjoint(&DeLeeuwMeasure::dirac(s.clone(), 2, 1).unwrap()),
            molecule(&s, 2, 1).unwrap()
        );
        assert_eq!(
            phi_adjoint(&nu(&s)),
            FreeElement::delta(s.clone(), 2).unwrap()
        );
        let cancel =
            DeLeeuwMeasure::from_entries(s.clone(), [((1, 2), int(1)), ((2, 1), int(1))]).unwrap();
        assert!(phi_adjoint(&cancel).is_zero());
    }

    #[test]
    fn optimality_examples() {
        let s = half_grid();
        assert!(is_optimal(&DeLeeuwMeasure::dirac(s.clone(), 2, 0).unwrap()).unwrap());
        assert!(is_optimal(&nu(&s)).unwrap());
        let wasteful =
            DeLeeuwMeasure::from_entries(s.clone(), [((2, 0), int(1)), ((0, 2), int(1))]).unwrap();
        assert!(!is_optimal(&wasteful).unwrap());
    }

    #[test]
    fn optimal_representation_examples() {
        let s = line3();
        let mu = optimal_representation(&molecule(&s, 2, 0).unwrap()).unwrap();
        assert_eq!(mu.total_mass(), int(1));
        let m = FreeElement::from_coeffs(s.clone(), vec![int(0), int(1), int(1)]).unwrap();
        let mu = optimal_representation(&m).unwrap();
        assert_eq!(mu.total_mass(), int(3));
        assert_eq!(phi_adjoint(&mu), m);
        assert!(optimal_representation(&FreeElement::zero(s)).unwrap().is_zero());
    }

    #[test]
    fn convex_integral_examples() {
        let s = half_grid();
        let m = FreeElement::delta(s.clone(), 2).unwrap();
        let terms = convex_integral(&m).unwrap();
        let total: Rational = terms.iter().map(|(w, _)| w.clone()).sum();
        assert_eq!(total, int(1));
        assert_eq!(sum_of_molecules(&s, &terms).unwrap(), m);
        let mol = molecule(&s, 1, 2).unwrap();
        assert_eq!(convex_integral(&mol).unwrap(), vec![(int(1), (1, 2))]);
    }

    #[test]
    fn restriction_examples() {
        let s = half_grid();
        let mu = nu(&s);
        let all: PairSet = s.pairs().collect();
        assert_eq!(restrict(&mu, &all), mu);
        assert!(restrict(&mu, &PairSet::new()).is_zero());
        let a = PairSet::from([(2, 1)]);
        let part = restrict(&mu, &a);
        assert_eq!(part, DeLeeuwMeasure::from_entries(s.clone(), [((2, 1), ratio(1, 2))]).unwrap());
        assert!(is_optimal(&part).unwrap());
        let rest = restrict(&mu, &complement(&s, &a));
        let n1 = free_norm(&phi_adjoint(&part)).unwrap().value;
        let n2 = free_norm(&phi_adjoint(&rest)).unwrap().value;
        assert_eq!(n1, ratio(1, 2));
        assert_eq!(n1 + n2, int(1));
    }

    #[test]
    fn weighting_examples() {
        let s = line3();
        let mu =
            DeLeeuwMeasure::from_entries(s.clone(), [((1, 0), int(1)), ((2, 0), int(1))]).unwrap();
        assert_eq!(weight(&mu, &Weighting::First(vec![int(1); 3])).unwrap(), mu);
        let indicator = Weighting::First(vec![int(0), int(1), int(0)]);
        assert_eq!(
            weight(&mu, &indicator).unwrap(),
            DeLeeuwMeasure::dirac(s.clone(), 1, 0).unwrap()
        );
        assert!(weight(&mu, &Weighting::Second(vec![int(1)])).is_err());
    }

    #[test]
    fn marginals_and_shadows() {
        let s = half_grid();
        let d = DeLeeuwMeasure::dirac(s.clone(), 2, 0).unwrap();
        assert_eq!(marginal(&d, Axis::First), vec![int(0), int(0), int(1)]);
        assert_eq!(marginal(&d, Axis::Second), vec![int(1), int(0), int(0)]);
        assert_eq!(
            marginal(&nu(&s), Axis::First),
            vec![int(0), ratio(1, 2), ratio(1, 2)]
        );
        assert_eq!(shadow(&PairSet::from([(1, 0)])), BTreeSet::from([0, 1]));
        assert!(shadow(&PairSet::new()).is_empty());
        assert_eq!(shadow(&nu(&s).support()), BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn decompose_examples() {
        let s = half_grid();
        let m = FreeElement::delta(s.clone(), 2).unwrap();
        let all: PairSet = s.pairs().collect();
        let single = decompose(&m, std::slice::from_ref(&all)).unwrap();
        assert_eq!(single.parts, vec![m.clone()]);
        assert!(matches!(
            decompose(&m, &[PairSet::from([(2, 1)])]),
            Err(Error::NotAPartition)
        ));
        let a = PairSet::from([(2, 1)]);
        let halves = [a.clone(), complement(&s, &a)];
        let split = decompose(&m, &halves).unwrap();
        let sum = split.parts[0].plus(&split.parts[1]).unwrap();
        assert_eq!(sum, m);
        assert_eq!(split.norms.iter().sum::<Rational>(), int(1));

        let split = decompose_with(&nu(&s), &halves).unwrap();
        assert_eq!(split.norms, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(split.parts[0].plus(&split.parts[1]).unwrap(), m);
    }
}
