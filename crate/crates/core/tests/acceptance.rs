//! End-to-end acceptance run: one line per criterion, exit status 1 if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use freelip::corpus::{
    generate_spaces, random_concave_space, random_element, random_pair_partition,
    random_pair_subset, random_permutation, random_positive_measure, CorpusRng,
};
use freelip::exactlp::{int, ratio, Rational};
use freelip::*;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};

const SEED: u64 = 20240611;
const SPACES: usize = 200;
const MAX_POINTS: usize = 7;
const ELEMENTS_PER_SPACE: usize = 5;
const SUBSETS_PER_ELEMENT: usize = 50;
const MEASURE_PAIRS: usize = 500;
const CONCAVE_SPACES: usize = 50;

struct Corpus {
    spaces: Vec<Space>,
    elements: Vec<FreeElement>,
}

impl Corpus {
    fn build() -> Self {
        let mut rng = CorpusRng::seed_from_u64(SEED);
        let spaces = generate_spaces(&mut rng, MAX_POINTS, SPACES);
        let elements = spaces
            .iter()
            .flat_map(|s| {
                (0..ELEMENTS_PER_SPACE)
                    .map(|_| random_element(&mut rng, s))
                    .collect::<Vec<_>>()
            })
            .collect();
        Corpus { spaces, elements }
    }
}

type Outcome = std::result::Result<String, String>;

fn fail(msg: impl Into<String>) -> Outcome {
    Err(msg.into())
}

fn criterion_1(c: &Corpus) -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    let mut mismatches = Vec::new();
    for (i, s) in c.spaces.iter().enumerate() {
        for (x, y) in s.pairs() {
            pairs += 1;
            let betweenness = classify_molecule(s, x, y).map_err(|e| e.to_string())?.is_extreme();
            let oracle = vertex_oracle(s, x, y).map_err(|e| e.to_string())?;
            if betweenness != oracle {
                mismatches.push((i, x, y));
            }
        }
    }
    let elapsed = start.elapsed();
    if !mismatches.is_empty() {
        return fail(format!("{} mismatches, first {:?}", mismatches.len(), mismatches[0]));
    }
    if elapsed >= Duration::from_secs(60) {
        return fail(format!("took {elapsed:.1?}"));
    }
    Ok(format!("{} spaces, {pairs} ordered pairs, 0 mismatches in {elapsed:.2?}", c.spaces.len()))
}

fn criterion_2(c: &Corpus) -> Outcome {
    let mut checked = 0;
    for (i, s) in c.spaces.iter().enumerate() {
        for v in extreme_points(s).map_err(|e| e.to_string())? {
            if !v.is_extreme() {
                continue;
            }
            let (x, y) = v.pair;
            let e = exposing_functional(s, x, y).map_err(|e| format!("space {i} ({x},{y}): {e}"))?;
            let positive = e.margin > Rational::zero();
            let verified = v.verify(s).map_err(|e| e.to_string())?;
            if !positive || !verified {
                return fail(format!("space {i} pair ({x},{y}) margin {}", e.margin));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} extreme pairs exposed with positive margin"))
}

fn criterion_3(c: &Corpus) -> Outcome {
    for (i, m) in c.elements.iter().enumerate() {
        let primal = free_norm(m).map_err(|e| e.to_string())?;
        primal.verify(m).map_err(|e| format!("element {i}: {e}"))?;
        let (dual, _) = lipschitz_dual_value(m).map_err(|e| e.to_string())?;
        if primal.value != dual {
            return fail(format!("element {i}: primal {} dual {dual}", primal.value));
        }
    }
    let line = Arc::new(FiniteMetricSpace::on_line(&[int(0), int(1), int(2)]).unwrap());
    let m = FreeElement::from_coeffs(line, vec![int(0), int(1), int(1)]).unwrap();
    let value = free_norm(&m).map_err(|e| e.to_string())?.value;
    if value != int(3) {
        return fail(format!("line norm of δ(1)+δ(2) is {value}"));
    }
    Ok(format!("{} elements, primal = dual; line {{0,1,2}}: ‖δ(1)+δ(2)‖ = 3", c.elements.len()))
}

fn criterion_4(c: &Corpus) -> Outcome {
    let mut rng = CorpusRng::seed_from_u64(SEED ^ 4);
    let mut checks = 0;
    for (i, m) in c.elements.iter().enumerate() {
        let mu = optimal_representation(m).map_err(|e| e.to_string())?;
        let total = free_norm(m).map_err(|e| e.to_string())?.value;
        for _ in 0..SUBSETS_PER_ELEMENT {
            let a = random_pair_subset(&mut rng, m.space());
            let inside = phi_adjoint(&restrict(&mu, &a));
            let outside = phi_adjoint(&restrict(&mu, &complement(m.space(), &a)));
            let sum = free_norm(&inside).map_err(|e| e.to_string())?.value
                + free_norm(&outside).map_err(|e| e.to_string())?.value;
            if sum != total {
                return fail(format!("element {i}: {sum} ≠ {total}"));
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} restrictions additive"))
}

fn criterion_5() -> Outcome {
    let s = Arc::new(FiniteMetricSpace::on_line(&[int(0), ratio(1, 2), int(1)]).unwrap());
    let delta1 = FreeElement::delta(s.clone(), 2).unwrap();
    let dirac = DeLeeuwMeasure::dirac(s.clone(), 2, 0).unwrap();
    let nu = DeLeeuwMeasure::from_entries(s.clone(), [((2, 1), ratio(1, 2)), ((1, 0), ratio(1, 2))]).unwrap();
    for (name, mu) in [("δ_(1,0)", &dirac), ("ν", &nu)] {
        if phi_adjoint(mu) != delta1 || !is_optimal(mu).map_err(|e| e.to_string())? {
            return fail(format!("{name} is not an optimal representation of δ(1)"));
        }
    }
    match precedes(&dirac, &nu).map_err(|e| e.to_string())? {
        Precedence::Precedes(cert) => {
            let expected = BTreeMap::from([((2, 1, 0), Rational::one())]);
            if cert.weights != expected || !cert.verify(&dirac, &nu).map_err(|e| e.to_string())? {
                return fail(format!("unexpected certificate {:?}", cert.weights));
            }
        }
        Precedence::Separated(_) => return fail("δ_(1,0) ≼ ν not detected"),
    }
    if precedes(&nu, &dirac).map_err(|e| e.to_string())?.holds() {
        return fail("ν ≼ δ_(1,0) wrongly reported");
    }
    if minimal_below(&nu).map_err(|e| e.to_string())? != dirac {
        return fail("minimal_below(ν) ≠ δ_(1,0)");
    }
    Ok("both fixtures optimal; λ = {(1,½,0): 1}; reverse separated; minimal_below(ν) = δ_(1,0)".into())
}

fn planted_above(rng: &mut CorpusRng, mu: &DeLeeuwMeasure) -> DeLeeuwMeasure {
    let space = mu.space();
    let moves = triangle_moves(space);
    let mut nu = mu.clone();
    if moves.is_empty() {
        return nu;
    }
    for _ in 0..rng.gen_range(1..=3) {
        let t = &moves[rng.gen_range(0..moves.len())];
        let lambda = ratio(rng.gen_range(1..=4), 4);
        let step = DeLeeuwMeasure::from_entries(
            space.clone(),
            t.entries.iter().map(|(p, w)| (*p, w * &lambda)),
        )
        .unwrap();
        let candidate = nu.plus(&step).unwrap();
        if candidate.is_positive() {
            nu = candidate;
        }
    }
    nu
}

fn criterion_6(c: &Corpus) -> Outcome {
    let mut rng = CorpusRng::seed_from_u64(SEED ^ 6);
    let deciders = precedence_deciders();
    let moves_route = deciders.get("triangle-moves").map_err(|e| e.to_string())?;
    let box_route = deciders.get("bounded-dual-lp").map_err(|e| e.to_string())?;
    let ones = |s: &Space| EdgeFunction::constant(s.clone(), Rational::one());
    let mut holds = 0;
    for k in 0..MEASURE_PAIRS {
        let s = &c.spaces[k % c.spaces.len()];
        let mu = random_positive_measure(&mut rng, s, 4);
        let nu = if k % 2 == 0 {
            planted_above(&mut rng, &mu)
        } else {
            random_positive_measure(&mut rng, s, 4)
        };
        let forward = moves_route.precedes(&mu, &nu).map_err(|e| e.to_string())?;
        if forward != box_route.precedes(&mu, &nu).map_err(|e| e.to_string())? {
            return fail(format!("pair {k}: routes disagree"));
        }
        let backward = moves_route.precedes(&nu, &mu).map_err(|e| e.to_string())?;
        if backward != box_route.precedes(&nu, &mu).map_err(|e| e.to_string())? {
            return fail(format!("pair {k}: routes disagree on reverse"));
        }
        if forward && backward && mu != nu {
            return fail(format!("pair {k}: antisymmetry fails"));
        }
        if forward {
            holds += 1;
            let (a, b) = (mu.integrate(&ones(s)).unwrap(), nu.integrate(&ones(s)).unwrap());
            if a > b {
                return fail(format!("pair {k}: mass decreases along ≼"));
            }
        }
    }
    Ok(format!("{MEASURE_PAIRS} pairs (both directions) agree; {holds} comparable; antisymmetry and mass monotonicity hold"))
}

fn criterion_7(c: &Corpus) -> Outcome {
    let mut rng = CorpusRng::seed_from_u64(SEED ^ 7);
    for (i, s) in c.spaces.iter().enumerate() {
        check_g0_strictness(s).map_err(|e| format!("space {i}: {e}"))?;
    }
    let mut optimal_inputs = 0;
    for (i, m) in c.elements.iter().enumerate() {
        let arbitrary = random_positive_measure(&mut rng, m.space(), 5);
        let optimal = optimal_representation(m).map_err(|e| e.to_string())?;
        for mu in [arbitrary, optimal] {
            let low = minimal_below(&mu).map_err(|e| e.to_string())?;
            if minimal_below(&low).map_err(|e| e.to_string())? != low {
                return fail(format!("element {i}: minimal_below not idempotent"));
            }
            if is_optimal(&mu).map_err(|e| e.to_string())? {
                optimal_inputs += 1;
                if !is_optimal(&low).map_err(|e| e.to_string())? {
                    return fail(format!("element {i}: optimality lost"));
                }
            }
        }
    }
    Ok(format!(
        "g₀ strict on {} spaces; idempotent on {} measures ({optimal_inputs} optimal inputs stay optimal)",
        c.spaces.len(),
        2 * c.elements.len()
    ))
}

fn criterion_8(c: &Corpus) -> Outcome {
    let mut rng = CorpusRng::seed_from_u64(SEED ^ 8);
    let mut runs = 0;
    for (i, m) in c.elements.iter().enumerate() {
        for k in [2, 3] {
            let parts = random_pair_partition(&mut rng, m.space(), k);
            let d = decompose(m, &parts).map_err(|e| e.to_string())?;
            let sum: Rational = d.norms.iter().sum();
            let total = free_norm(m).map_err(|e| e.to_string())?.value;
            if sum != total || d.total_norm != total {
                return fail(format!("element {i}, {k} parts: {sum} ≠ {total}"));
            }
            let mut recombined = FreeElement::zero(m.space().clone());
            let mut allowed = m.support();
            allowed.insert(0);
            for part in &d.parts {
                recombined = recombined.plus(part).unwrap();
                if !part.support().is_subset(&allowed) {
                    return fail(format!("element {i}: part support escapes"));
                }
            }
            if recombined != *m {
                return fail(format!("element {i}: parts do not sum to m"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} decompositions norm-additive with contained supports"))
}

fn criterion_9(c: &Corpus) -> Outcome {
    for (i, m) in c.elements.iter().enumerate() {
        let terms = convex_integral(m).map_err(|e| e.to_string())?;
        let weight: Rational = terms.iter().map(|(w, _)| w).sum();
        let norm = free_norm(m).map_err(|e| e.to_string())?.value;
        if sum_of_molecules(m.space(), &terms).map_err(|e| e.to_string())? != *m || weight != norm {
            return fail(format!("element {i}: convex integral mismatch"));
        }
        let d = diagonal_decompose(m).map_err(|e| e.to_string())?;
        let certified = is_optimal(&d.certificate).map_err(|e| e.to_string())?
            && is_minimal(&d.certificate).map_err(|e| e.to_string())?
            && phi_adjoint(&d.certificate) == *m;
        if !d.diagonal.is_zero() || d.molecular != *m || !certified {
            return fail(format!("element {i}: diagonal decomposition"));
        }
    }
    Ok(format!("{} elements reconstructed; m_d = 0 with optimal minimal certificate", c.elements.len()))
}

fn criterion_10() -> Outcome {
    let mut rng = CorpusRng::seed_from_u64(SEED ^ 10);
    for k in 0..CONCAVE_SPACES {
        let n = rng.gen_range(2..=6);
        let m = random_concave_space(&mut rng, n);
        let c = ratio(rng.gen_range(1..=9), rng.gen_range(1..=4));
        let pi = random_permutation(&mut rng, n);
        let moved = m.scaled(&c).unwrap().permuted(&pi).unwrap();
        let labels = moved.labels().iter().map(|l| format!("q{l}")).collect();
        let target = FiniteMetricSpace::new(labels, moved.matrix().to_vec()).unwrap();
        let planted = Dilation { factor: c, map: pi };
        let (m, target) = (Arc::new(m), Arc::new(target));
        let found = find_dilations(&m, &target);
        if !found.contains(&planted) {
            return fail(format!("space {k}: planted dilation not recovered"));
        }
        for d in &found {
            let report = verify_banach_stone(&m, &target, d).map_err(|e| e.to_string())?;
            if !report.passed() {
                return fail(format!("space {k}: Banach–Stone check failed for {:?}", d.map));
            }
        }
    }
    Ok(format!("{CONCAVE_SPACES} concave spaces: planted (c, π) recovered, molecule bijection and extreme set verified"))
}

fn criterion_11(c: &Corpus) -> Outcome {
    for (i, s) in c.spaces.iter().enumerate() {
        let verdicts = extreme_points(s).map_err(|e| e.to_string())?;
        if !verdicts.iter().any(|v| v.is_extreme()) {
            return fail(format!("space {i} has no extreme molecule"));
        }
    }
    Ok(format!("all {} spaces have extreme molecules", c.spaces.len()))
}

fn main() -> ExitCode {
    let corpus = Corpus::build();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("extreme molecules = vertex oracle", Box::new(|| criterion_1(&corpus))),
        ("extreme molecules are exposed", Box::new(|| criterion_2(&corpus))),
        ("primal/dual norm duality", Box::new(|| criterion_3(&corpus))),
        ("restriction additivity", Box::new(|| criterion_4(&corpus))),
        ("half-grid example", Box::new(criterion_5)),
        ("precedence routes agree", Box::new(|| criterion_6(&corpus))),
        ("minimal representations", Box::new(|| criterion_7(&corpus))),
        ("partition decompositions", Box::new(|| criterion_8(&corpus))),
        ("convex integrals of molecules", Box::new(|| criterion_9(&corpus))),
        ("Banach–Stone dilations", Box::new(criterion_10)),
        ("finite spaces are never geodesic", Box::new(|| criterion_11(&corpus))),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{elapsed:.1?}]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{elapsed:.1?}]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
