//! Extreme points of the unit ball of the free space.
//!
//! A molecule `m_{xy}` is extreme exactly when no third point lies
//! metrically between `x` and `y`. [`classify_molecule`] applies that
//! criterion; [`vertex_oracle`] answers the same question from scratch by
//! testing hull membership against every other molecule, and the two are
//! expected to agree everywhere.

use std::collections::BTreeSet;
use std::sync::Arc;

use exactlp::{in_convex_hull, Direction, HullMembership, LinearProgram, Rational, Relation, VarBound};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::free::{free_norm, lipschitz_norm, molecule, pushforward, rebase, scale_metric, FreeElement, PointFunction, Space};
use crate::metric::{Dilation, FiniteMetricSpace, Pair};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExposingFunctional {
    pub function: PointFunction,
    /// `1 - max_{(u,v) ≠ (x,y)} ⟨f, m_{uv}⟩`.
    pub margin: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Extreme(ExposingFunctional),
    NotExtreme { between: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalityVerdict {
    pub pair: Pair,
    pub verdict: Verdict,
}

impl ExtremalityVerdict {
    pub fn is_extreme(&self) -> bool {
        matches!(self.verdict, Verdict::Extreme(_))
    }

    /// Re-checks the attached witness exactly.
    pub fn verify(&self, space: &Space) -> Result<bool> {
        let (x, y) = self.pair;
        match &self.verdict {
            Verdict::NotExtreme { between } => {
                Ok(*between != x && *between != y && space.is_between(x, *between, y)?)
            }
            Verdict::Extreme(exposing) => verify_exposing(space, x, y, exposing),
        }
    }
}

fn check_pair(space: &FiniteMetricSpace, x: usize, y: usize) -> Result<()> {
    space.check_point(x)?;
    space.check_point(y)?;
    if x == y {
        return Err(Error::NotDistinct(vec![x, y]));
    }
    Ok(())
}

/// Betweenness criterion with a witness either way: an intermediate point,
/// or an exposing functional with positive margin.
pub fn classify_molecule(space: &Space, x: usize, y: usize) -> Result<ExtremalityVerdict> {
    check_pair(space, x, y)?;
    let verdict = match space.intermediate_point(x, y) {
        Some(p) => Verdict::NotExtreme { between: p },
        None => Verdict::Extreme(max_margin_functional(space, x, y)?),
    };
    Ok(ExtremalityVerdict {
        pair: (x, y),
        verdict,
    })
}

fn molecule_vector(space: &Space, x: usize, y: usize) -> Vec<Rational> {
    molecule(space, x, y).expect("distinct points").coeffs()[1..].to_vec()
}

/// Hull-membership test of `m_{xy}` against the other molecules, with the
/// LP certificate (convex weights or a separating functional).
pub fn vertex_oracle_certificate(space: &Space, x: usize, y: usize) -> Result<HullMembership> {
    check_pair(space, x, y)?;
    let point = molecule_vector(space, x, y);
    let others: Vec<Vec<Rational>> = space
        .pairs()
        .filter(|&p| p != (x, y))
        .map(|(u, v)| molecule_vector(space, u, v))
        .collect();
    in_convex_hull(&point, &others).map_err(|e| Error::Certificate(e.to_string()))
}

/// True iff `m_{xy}` is not a convex combination of the other molecules.
pub fn vertex_oracle(space: &Space, x: usize, y: usize) -> Result<bool> {
    Ok(!vertex_oracle_certificate(space, x, y)?.is_inside())
}

/// Classification of every ordered pair.
pub fn extreme_points(space: &Space) -> Result<Vec<ExtremalityVerdict>> {
    if space.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    space
        .pairs()
        .map(|(x, y)| classify_molecule(space, x, y))
        .collect()
}

/// Extreme pairs by the betweenness criterion alone (no LP).
pub fn extreme_pairs(space: &FiniteMetricSpace) -> BTreeSet<Pair> {
    space
        .pairs()
        .filter(|&(x, y)| space.intermediate_point(x, y).is_none())
        .collect()
}

/// Maximises the margin by which `⟨f, m_{uv}⟩` stays below 1 on every other
/// molecule, subject to `⟨f, m_{xy}⟩ = 1`.
fn max_margin_functional(space: &Space, x: usize, y: usize) -> Result<ExposingFunctional> {
    let n = space.len();
    // variables: f(1..n) free, then the margin s ≥ 0
    let s = n - 1;
    let mut objective = vec![Rational::zero(); n];
    objective[s] = Rational::one();
    let mut lp = LinearProgram::new(Direction::Maximize, objective);
    for k in 0..n - 1 {
        lp.set_bound(k, VarBound::Free);
    }
    let slope_entries = |u: usize, v: usize| {
        let inv = Rational::one() / space.distance(u, v);
        let mut e = Vec::new();
        if u != 0 {
            e.push((u - 1, inv.clone()));
        }
        if v != 0 {
            e.push((v - 1, -inv));
        }
        e
    };
    lp.add_sparse_constraint(slope_entries(x, y), Relation::Eq, Rational::one())?;
    for (u, v) in space.pairs().filter(|&p| p != (x, y)) {
        let mut e = slope_entries(u, v);
        e.push((s, Rational::one()));
        lp.add_sparse_constraint(e, Relation::Le, Rational::one())?;
    }
    let sol = lp
        .solve()?
        .into_optimal()
        .ok_or_else(|| Error::Certificate("margin LP is not optimal".into()))?;
    let mut values = vec![Rational::zero()];
    values.extend(sol.primal[..n - 1].iter().cloned());
    Ok(ExposingFunctional {
        function: PointFunction::new(space.clone(), values)?,
        margin: sol.primal[s].clone(),
    })
}

fn verify_exposing(space: &Space, x: usize, y: usize, e: &ExposingFunctional) -> Result<bool> {
    let f = &e.function;
    if !e.margin.is_positive() || lipschitz_norm(f).0 != Rational::one() {
        return Ok(false);
    }
    if molecule(space, x, y)?.pair_with(f)? != Rational::one() {
        return Ok(false);
    }
    let bound = Rational::one() - &e.margin;
    let mut worst: Option<Rational> = None;
    for (u, v) in space.pairs().filter(|&p| p != (x, y)) {
        let value = molecule(space, u, v)?.pair_with(f)?;
        if worst.as_ref().is_none_or(|w| value > *w) {
            worst = Some(value);
        }
    }
    Ok(worst.is_none_or(|w| w == bound))
}

/// A functional exposing `m_{xy}`; errors when the molecule is not extreme.
pub fn exposing_functional(space: &Space, x: usize, y: usize) -> Result<ExposingFunctional> {
    check_pair(space, x, y)?;
    if space.intermediate_point(x, y).is_some() {
        return Err(Error::NotExtreme(x, y));
    }
    let e = max_margin_functional(space, x, y)?;
    if !verify_exposing(space, x, y, &e)? {
        return Err(Error::Certificate("exposing functional failed verification".into()));
    }
    Ok(e)
}

/// Outcome of checking `T = (1/c) J_{π(0)} ∘ π̂` for a dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct BanachStoneReport {
    /// Coefficient matrix of `T`: rows are the non-base points of the
    /// target, columns the non-base points of the source.
    pub matrix: Vec<Vec<Rational>>,
    /// `T m_{xy} = m'_{uv}` for each source pair.
    pub molecule_images: Vec<(Pair, Pair)>,
    pub norm_checks: usize,
    pub norm_preserving: bool,
    pub molecules_bijective: bool,
    pub extreme_set_preserved: bool,
}

impl BanachStoneReport {
    pub fn passed(&self) -> bool {
        self.norm_preserving && self.molecules_bijective && self.extreme_set_preserved
    }
}

/// Re-indexes an element onto a space with the same labels in another order.
fn reindex(m: &FreeElement, target: &Space) -> Result<FreeElement> {
    let mut coeffs = vec![Rational::zero(); target.len()];
    for (i, a) in m.coeffs().iter().enumerate() {
        if !a.is_zero() {
            coeffs[target.index_of(m.space().label(i))?] = a.clone();
        }
    }
    FreeElement::from_coeffs(target.clone(), coeffs)
}

/// Applies `T = J_{π(0)} ∘ π̂ ∘ S_c` to one element of `F(M)`.
pub fn dilation_isometry(from: &Space, to: &Space, dilation: &Dilation, m: &FreeElement) -> Result<FreeElement> {
    let scaled = scale_metric(m, &dilation.factor)?;
    let (shifted, position) = to.rebased(dilation.map[0])?;
    let shifted = Arc::new(shifted);
    let map: Vec<usize> = (0..from.len()).map(|x| position[dilation.map[x]]).collect();
    let pushed = pushforward(&scaled, &shifted, &map)?;
    let back = rebase(&pushed, shifted.index_of(to.label(0))?)?;
    reindex(&back, to)
}

pub fn verify_banach_stone(from: &Space, to: &Space, dilation: &Dilation) -> Result<BanachStoneReport> {
    dilation.verify(from, to)?;
    let n = from.len();

    let mut columns = Vec::with_capacity(n.saturating_sub(1));
    let mut basis_images = Vec::new();
    for x in 1..n {
        let image = dilation_isometry(from, to, dilation, &FreeElement::delta(from.clone(), x)?)?;
        columns.push(image.coeffs()[1..].to_vec());
        basis_images.push((FreeElement::delta(from.clone(), x)?, image));
    }
    let matrix: Vec<Vec<Rational>> = (0..to.len().saturating_sub(1))
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect();
    let apply = |m: &FreeElement| -> Result<FreeElement> {
        let mut coeffs = vec![Rational::zero(); to.len()];
        for (r, row) in matrix.iter().enumerate() {
            coeffs[r + 1] = row
                .iter()
                .zip(&m.coeffs()[1..])
                .map(|(t, a)| t * a)
                .sum();
        }
        FreeElement::from_coeffs(to.clone(), coeffs)
    };

    let mut norm_checks = 0;
    let mut norm_preserving = true;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut samples: Vec<FreeElement> = basis_images.into_iter().map(|(m, _)| m).collect();
    for _ in 0..4 {
        samples.push(crate::corpus::random_element(&mut rng, from));
    }
    for m in &samples {
        norm_checks += 1;
        if free_norm(m)?.value != free_norm(&apply(m)?)?.value {
            norm_preserving = false;
        }
    }

    let mut molecule_images = Vec::with_capacity(from.num_pairs());
    for (x, y) in from.pairs() {
        let image = apply(&molecule(from, x, y)?)?;
        let found = to
            .pairs()
            .find(|&(u, v)| molecule(to, u, v).map(|mm| mm == image).unwrap_or(false));
        if let Some(target) = found {
            molecule_images.push(((x, y), target));
        }
    }
    let targets: BTreeSet<Pair> = molecule_images.iter().map(|(_, t)| *t).collect();
    let molecules_bijective = molecule_images.len() == from.num_pairs()
        && targets.len() == to.num_pairs();

    let source_extreme = extreme_pairs(from);
    let image_of_extreme: BTreeSet<Pair> = molecule_images
        .iter()
        .filter(|(p, _)| source_extreme.contains(p))
        .map(|(_, t)| *t)
        .collect();
    let extreme_set_preserved =
        molecules_bijective && image_of_extreme == extreme_pairs(to);

    Ok(BanachStoneReport {
        matrix,
        molecule_images,
        norm_checks,
        norm_preserving,
        molecules_bijective,
        extreme_set_preserved,
    })
}
