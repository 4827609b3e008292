//! Seeded random instances for property runs.
//!
//! Spaces are drawn as symmetric tables of small-denominator rationals and
//! then repaired into metrics by taking shortest-path distances, which also
//! produces plenty of exact betweenness relations.

use std::sync::Arc;

use exactlp::{ratio, Rational};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::deleeuw::{DeLeeuwMeasure, PairSet};
use crate::free::{FreeElement, Space};
use crate::metric::FiniteMetricSpace;

pub type CorpusRng = ChaCha8Rng;

const DENOMINATORS: [i64; 4] = [1, 2, 3, 4];

fn small_positive(rng: &mut impl Rng) -> Rational {
    let den = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
    ratio(rng.gen_range(1..=4 * den), den)
}

fn small_signed(rng: &mut impl Rng) -> Rational {
    let den = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
    ratio(rng.gen_range(-3 * den..=3 * den), den)
}

/// Shortest-path closure of a symmetric positive table.
pub fn metric_completion(mut d: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn random_space(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = small_positive(rng);
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    FiniteMetricSpace::from_matrix(metric_completion(d)).expect("completion is a metric")
}

/// All distances lie in `[1, 2)`, so every triangle inequality is strict.
pub fn random_concave_space(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = ratio(8 + rng.gen_range(0..8), 8);
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    FiniteMetricSpace::from_matrix(d).expect("distances in [1,2) form a metric")
}

pub fn random_element(rng: &mut impl Rng, space: &Space) -> FreeElement {
    let coeffs = (0..space.len())
        .map(|x| {
            if x == 0 || rng.gen_bool(0.25) {
                Rational::zero()
            } else {
                small_signed(rng)
            }
        })
        .collect();
    FreeElement::from_coeffs(space.clone(), coeffs).expect("base coefficient is zero")
}

/// Up to `max_terms` positive point masses on random pairs.
pub fn random_positive_measure(rng: &mut impl Rng, space: &Space, max_terms: usize) -> DeLeeuwMeasure {
    if space.num_pairs() == 0 {
        return DeLeeuwMeasure::zero(space.clone());
    }
    let terms = rng.gen_range(0..=max_terms);
    let entries: Vec<_> = (0..terms)
        .map(|_| {
            let pair = space.pair_at(rng.gen_range(0..space.num_pairs()));
            (pair, small_positive(rng) / ratio(4, 1))
        })
        .collect();
    DeLeeuwMeasure::from_entries(space.clone(), entries).expect("pairs are valid")
}

pub fn random_pair_subset(rng: &mut impl Rng, space: &FiniteMetricSpace) -> PairSet {
    space.pairs().filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random partition of the ordered pairs into `parts` (possibly empty) sets.
pub fn random_pair_partition(rng: &mut impl Rng, space: &FiniteMetricSpace, parts: usize) -> Vec<PairSet> {
    let mut out = vec![PairSet::new(); parts.max(1)];
    let k = out.len();
    for p in space.pairs() {
        out[rng.gen_range(0..k)].insert(p);
    }
    out
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `count` spaces with sizes uniform in `2..=max_points`.
pub fn generate_spaces(rng: &mut impl Rng, max_points: usize, count: usize) -> Vec<Space> {
    let max_points = max_points.max(2);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_points);
            Arc::new(random_space(rng, n))
        })
        .collect()
}
