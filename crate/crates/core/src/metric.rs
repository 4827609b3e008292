//! Finite pointed metric spaces.
//!
//! Points are stored by index; index 0 is always the base point. Distances
//! are exact rationals and every metric axiom is checked at construction.

use std::collections::BTreeSet;
use std::fmt;

use exactlp::Rational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Ordered pair `(x, y)` of distinct point indices.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    Asymmetry(usize, usize),
    NonzeroDiagonal(usize),
    NonpositiveDistance(usize, usize),
    /// `d(i, k) > d(i, j) + d(j, k)`.
    TriangleViolation(usize, usize, usize),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Asymmetry(i, j) => write!(f, "d({i},{j}) != d({j},{i})"),
            AxiomViolation::NonzeroDiagonal(i) => write!(f, "d({i},{i}) != 0"),
            AxiomViolation::NonpositiveDistance(i, j) => write!(f, "d({i},{j}) <= 0"),
            AxiomViolation::TriangleViolation(i, j, k) => {
                write!(f, "d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    /// Validates `matrix` against the metric axioms. On failure the error
    /// lists every violation found, not just the first.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::NoPoints);
        }
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::MatrixShape {
                labels: n,
                rows: matrix.len(),
                cols: matrix.iter().map(Vec::len).max().unwrap_or(0),
            });
        }
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let violations = axiom_violations(&matrix);
        if !violations.is_empty() {
            return Err(Error::Axioms(violations));
        }
        Ok(FiniteMetricSpace {
            labels,
            dist: matrix,
        })
    }

    /// Labels default to `"0"`, `"1"`, ...
    pub fn from_matrix(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::new(labels, matrix)
    }

    /// Points of `ℝ` with the usual metric; the first coordinate is the base.
    pub fn on_line(coords: &[Rational]) -> Result<Self> {
        let matrix = coords
            .iter()
            .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::from_matrix(matrix)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn distance(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn check_point(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    /// Number of ordered pairs of distinct points.
    pub fn num_pairs(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1)
    }

    /// Dense index of `(x, y)`, `x != y`, in row-major order.
    pub fn pair_index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x != y);
        x * (self.len() - 1) + if y < x { y } else { y - 1 }
    }

    pub fn pair_at(&self, index: usize) -> Pair {
        let m = self.len() - 1;
        let x = index / m;
        let r = index % m;
        (x, if r < x { r } else { r + 1 })
    }

    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        let n = self.len();
        (0..n).flat_map(move |x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
    }

    /// Distinct nonzero distance values, ascending.
    pub fn distance_values(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self.pairs().map(|(x, y)| self.dist[x][y].clone()).collect();
        set.into_iter().collect()
    }

    /// True iff `d(x,p) + d(p,y) = d(x,y)`.
    pub fn is_between(&self, x: usize, p: usize, y: usize) -> Result<bool> {
        for &i in &[x, p, y] {
            self.check_point(i)?;
        }
        if x == p || p == y || x == y {
            return Err(Error::NotDistinct(vec![x, p, y]));
        }
        Ok(self.between_unchecked(x, p, y))
    }

    pub(crate) fn between_unchecked(&self, x: usize, p: usize, y: usize) -> bool {
        &self.dist[x][p] + &self.dist[p][y] == self.dist[x][y]
    }

    /// First point strictly between `x` and `y`, scanning by index.
    pub fn intermediate_point(&self, x: usize, y: usize) -> Option<usize> {
        (0..self.len()).find(|&p| p != x && p != y && self.between_unchecked(x, p, y))
    }

    /// First triple `(x, p, y)` (with `x < y`) where `p` lies between `x`
    /// and `y`, or `None` if the space is concave.
    pub fn concavity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in x + 1..n {
                if let Some(p) = self.intermediate_point(x, y) {
                    return Some((x, p, y));
                }
            }
        }
        None
    }

    pub fn is_concave(&self) -> bool {
        self.concavity_witness().is_none()
    }

    /// The same points with `new_base` moved to index 0, the rest keeping
    /// their relative order. Also returns `old index -> new index`.
    pub fn rebased(&self, new_base: usize) -> Result<(FiniteMetricSpace, Vec<usize>)> {
        self.check_point(new_base)?;
        let mut order = vec![new_base];
        order.extend((0..self.len()).filter(|&i| i != new_base));
        let mut position = vec![0; self.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        Ok((FiniteMetricSpace { labels, dist }, position))
    }

    /// `(M, c·d)`.
    pub fn scaled(&self, c: &Rational) -> Result<FiniteMetricSpace> {
        if !c.is_positive() {
            return Err(Error::NonPositiveScale(c.clone()));
        }
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|v| v * c).collect())
            .collect();
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist,
        })
    }

    /// Relabels and reorders points so that old point `i` lands at
    /// `perm[i]`. `perm` must send 0 to 0 for the base to stay put; other
    /// permutations move the base point accordingly.
    pub fn permuted(&self, perm: &[usize]) -> Result<FiniteMetricSpace> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::MapLength {
                found: perm.len(),
                expected: n,
            });
        }
        let mut inverse = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n || inverse[new] != usize::MAX {
                return Err(Error::InvalidDilation("not a bijection".into()));
            }
            inverse[new] = old;
        }
        let labels = inverse.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = inverse
            .iter()
            .map(|&i| inverse.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        Ok(FiniteMetricSpace { labels, dist })
    }
}

fn axiom_violations(d: &[Vec<Rational>]) -> Vec<AxiomViolation> {
    let n = d.len();
    let mut out = Vec::new();
    for (i, row) in d.iter().enumerate() {
        if !row[i].is_zero() {
            out.push(AxiomViolation::NonzeroDiagonal(i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] != d[j][i] {
                out.push(AxiomViolation::Asymmetry(i, j));
            }
            if !d[i][j].is_positive() || !d[j][i].is_positive() {
                out.push(AxiomViolation::NonpositiveDistance(i, j));
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                if d[i][k] > &d[i][j] + &d[j][k] {
                    out.push(AxiomViolation::TriangleViolation(i, j, k));
                }
            }
        }
    }
    out
}

/// A bijection `π` with `d'(π(x), π(y)) = c · d(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dilation {
    pub factor: Rational,
    /// `map[x] = π(x)`.
    pub map: Vec<usize>,
}

impl Dilation {
    pub fn identity(n: usize) -> Self {
        Dilation {
            factor: Rational::one(),
            map: (0..n).collect(),
        }
    }

    pub fn verify(&self, from: &FiniteMetricSpace, to: &FiniteMetricSpace) -> Result<()> {
        let n = from.len();
        if to.len() != n || self.map.len() != n {
            return Err(Error::InvalidDilation("cardinality mismatch".into()));
        }
        if !self.factor.is_positive() {
            return Err(Error::InvalidDilation("factor must be positive".into()));
        }
        let mut hit = vec![false; n];
        for &t in &self.map {
            if t >= n || hit[t] {
                return Err(Error::InvalidDilation("map is not a bijection".into()));
            }
            hit[t] = true;
        }
        for (x, y) in from.pairs() {
            if *to.distance(self.map[x], self.map[y]) != &self.factor * from.distance(x, y) {
                return Err(Error::InvalidDilation(format!(
                    "distance between {x} and {y} is not scaled by {}",
                    self.factor
                )));
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Dilation) -> Dilation {
        Dilation {
            factor: &self.factor * &other.factor,
            map: self.map.iter().map(|&x| other.map[x]).collect(),
        }
    }
}

/// Every dilation from `from` onto `to`, in lexicographic order of the map.
///
/// The factor is forced to be `max d' / max d`; candidates are pruned by
/// comparing each point's sorted distance profile before the exhaustive
/// backtracking search.
pub fn find_dilations(from: &FiniteMetricSpace, to: &FiniteMetricSpace) -> Vec<Dilation> {
    let n = from.len();
    if n != to.len() {
        return Vec::new();
    }
    if n == 1 {
        return vec![Dilation::identity(1)];
    }
    let max_from = from.distance_values().pop().expect("at least one pair");
    let max_to = to.distance_values().pop().expect("at least one pair");
    let factor = max_to / max_from;

    let profile = |space: &FiniteMetricSpace, x: usize, scale: &Rational| {
        let mut row: Vec<Rational> = (0..n)
            .filter(|&y| y != x)
            .map(|y| space.distance(x, y) * scale)
            .collect();
        row.sort();
        row
    };
    let from_profiles: Vec<_> = (0..n).map(|x| profile(from, x, &factor)).collect();
    let to_profiles: Vec<_> = (0..n).map(|x| profile(to, x, &Rational::one())).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&t| from_profiles[x] == to_profiles[t])
                .collect()
        })
        .collect();

    let mut found = Vec::new();
    let mut map = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend_dilation(from, to, &factor, &candidates, &mut map, &mut used, &mut found);
    found
}

fn extend_dilation(
    from: &FiniteMetricSpace,
    to: &FiniteMetricSpace,
    factor: &Rational,
    candidates: &[Vec<usize>],
    map: &mut Vec<usize>,
    used: &mut [bool],
    found: &mut Vec<Dilation>,
) {
    let x = map.len();
    if x == from.len() {
        found.push(Dilation {
            factor: factor.clone(),
            map: map.clone(),
        });
        return;
    }
    for &t in &candidates[x] {
        if used[t] {
            continue;
        }
        let consistent = (0..x).all(|y| *to.distance(t, map[y]) == factor * from.distance(x, y));
        if !consistent {
            continue;
        }
        used[t] = true;
        map.push(t);
        extend_dilation(from, to, factor, candidates, map, used, found);
        map.pop();
        used[t] = false;
    }
}
