use std::path::Path;

use freelip::corpus::{
    generate_spaces, random_element, random_pair_partition, random_positive_measure, CorpusRng,
};
use freelip::exactlp::format_rational;
use freelip::{
    classify_molecule, cone_violation, decompose as decompose_element, diagonal_decompose,
    extremality_classifiers, find_dilations, free_norm, is_minimal, is_optimal, lipschitz_dual_value,
    minimal_below, norm_solvers, optimal_representation, precedence_deciders, precedence_gap,
    precedes, vertex_oracle, verify_banach_stone, AxiomViolation, Error,
    Precedence, Rational, Space, Strategy, Verdict,
};
use rand::SeedableRng;
use serde_json::{json, Map, Value};

use crate::wire::{
    edge_json, element_json, function_json, label, load_edge_function, load_element,
    load_measure, load_partition, load_space, masses_json, measure_file_json, rational, read_json,
    MetricFile,
};
use crate::{CliError, Report};

fn describe_violation(space: &[String], v: &AxiomViolation) -> String {
    let l = |i: &usize| space[*i].as_str();
    match v {
        AxiomViolation::Asymmetry(i, j) => format!("d({0},{1}) != d({1},{0})", l(i), l(j)),
        AxiomViolation::NonzeroDiagonal(i) => format!("d({0},{0}) != 0", l(i)),
        AxiomViolation::NonpositiveDistance(i, j) => format!("d({},{}) <= 0", l(i), l(j)),
        AxiomViolation::TriangleViolation(i, j, k) => {
            format!("d({0},{2}) > d({0},{1}) + d({1},{2})", l(i), l(j), l(k))
        }
    }
}

pub fn validate(path: &Path) -> Result<Report, CliError> {
    let file: MetricFile = read_json(path)?;
    match file.to_space() {
        Ok(space) => Ok(Report::ok(json!({
            "valid": true,
            "points": space.len(),
            "base": space.label(0),
            "concave": space.is_concave(),
        }))),
        Err(CliError::Core(Error::Axioms(violations))) => {
            let mut order: Vec<String> = vec![file.base.0.clone()];
            order.extend(file.points.iter().filter(|p| **p != file.base).map(|p| p.0.clone()));
            let list: Vec<String> = violations.iter().map(|v| describe_violation(&order, v)).collect();
            Ok(Report {
                body: json!({ "valid": false, "violations": list }),
                ok: false,
            })
        }
        Err(e) => Err(e),
    }
}

pub fn norm(path: &Path, solver: &str) -> Result<Report, CliError> {
    let m = load_element(path)?;
    let value = norm_solvers().get(solver)?.norm(&m)?;
    let body = if solver == "transport" {
        let cert = free_norm(&m)?;
        json!({
            "solver": solver,
            "norm": rational(&value),
            "dual_witness": function_json(&cert.dual),
            "primal_witness": masses_json(&cert.primal),
        })
    } else {
        let (_, f) = lipschitz_dual_value(&m)?;
        json!({
            "solver": solver,
            "norm": rational(&value),
            "dual_witness": function_json(&f),
            "primal_witness": Value::Null,
        })
    };
    Ok(Report::ok(body))
}

pub fn represent(path: &Path, minimal: bool) -> Result<Report, CliError> {
    let m = load_element(path)?;
    let mut mu = optimal_representation(&m)?;
    if minimal {
        mu = minimal_below(&mu)?;
    }
    let mut body = measure_file_json(&mu);
    let extra = json!({
        "norm": rational(&mu.total_mass()),
        "optimal": is_optimal(&mu)?,
        "minimal": if minimal { Value::Bool(true) } else { Value::Bool(is_minimal(&mu)?) },
    });
    merge(&mut body, extra);
    Ok(Report::ok(body))
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn preorder(mu_path: &Path, nu_path: &Path, method: &str) -> Result<Report, CliError> {
    let mu = load_measure(mu_path)?;
    let nu = load_measure(nu_path)?;
    let decider = precedence_deciders();
    let decider = decider.get(method)?;
    let holds = decider.precedes(&mu, &nu)?;
    let space = mu.space().clone();
    let mut body = json!({ "method": method, "precedes": holds });
    if method == "triangle-moves" {
        match precedes(&mu, &nu)? {
            Precedence::Precedes(cert) => {
                let lambda: Vec<Value> = cert
                    .weights
                    .iter()
                    .map(|(&(x, u, y), w)| {
                        json!({ "x": label(&space, x), "u": label(&space, u), "y": label(&space, y), "weight": rational(w) })
                    })
                    .collect();
                merge(&mut body, json!({ "lambda": lambda }));
            }
            Precedence::Separated(g) => {
                let gap = mu.integrate(&g)? - nu.integrate(&g)?;
                merge(&mut body, json!({ "separator": edge_json(&g), "separation": rational(&gap) }));
            }
        }
    } else {
        let (gap, g) = precedence_gap(&mu, &nu)?;
        merge(&mut body, json!({ "min_gap": rational(&gap) }));
        if !holds {
            merge(&mut body, json!({ "separator": edge_json(&g) }));
        }
    }
    Ok(Report { body, ok: holds })
}

pub fn minimal(path: &Path) -> Result<Report, CliError> {
    let mu = load_measure(path)?;
    let low = minimal_below(&mu)?;
    Ok(Report::ok(json!({
        "minimal": measure_file_json(&low),
        "input_is_minimal": low == mu,
    })))
}

pub fn extreme(path: &Path, pair: Option<&[String]>, oracle: bool, classifier: &str) -> Result<Report, CliError> {
    let space = load_space(path)?;
    if space.len() < 2 {
        return Err(Error::TooFewPoints.into());
    }
    let registry = extremality_classifiers();
    let classify = registry.get(classifier)?;
    let pairs: Vec<(usize, usize)> = match pair {
        Some([x, y]) => vec![(space.index_of(x)?, space.index_of(y)?)],
        Some(_) => return Err(CliError::Input("--pair takes two labels".into())),
        None => space.pairs().collect(),
    };
    let (mut extreme, mut not_extreme, mut mismatches) = (0, 0, 0);
    let mut rows = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        let is_extreme = classify.is_extreme(&space, x, y)?;
        if is_extreme {
            extreme += 1;
        } else {
            not_extreme += 1;
        }
        let mut row = json!({
            "x": label(&space, x),
            "y": label(&space, y),
            "verdict": if is_extreme { "Extreme" } else { "NotExtreme" },
        });
        if classifier == "betweenness" {
            let witness = match classify_molecule(&space, x, y)?.verdict {
                Verdict::NotExtreme { between } => json!({ "between": label(&space, between) }),
                Verdict::Extreme(e) => json!({
                    "margin": rational(&e.margin),
                    "exposing": function_json(&e.function),
                }),
            };
            merge(&mut row, json!({ "witness": witness }));
        }
        if oracle {
            let o = vertex_oracle(&space, x, y)?;
            if o != is_extreme {
                mismatches += 1;
            }
            merge(&mut row, json!({ "oracle": o, "agree": o == is_extreme }));
        }
        rows.push(row);
    }
    let mut summary = json!({ "extreme": extreme, "not_extreme": not_extreme });
    if oracle {
        merge(&mut summary, json!({ "mismatches": mismatches }));
    }
    Ok(Report {
        body: json!({ "classifier": classifier, "pairs": rows, "summary": summary }),
        ok: mismatches == 0,
    })
}

pub fn decompose(path: &Path, parts_path: &Path) -> Result<Report, CliError> {
    let m = load_element(path)?;
    let parts = load_partition(parts_path, m.space())?;
    let d = decompose_element(&m, &parts)?;
    let sum: Rational = d.norms.iter().sum();
    let mut allowed = m.support();
    allowed.insert(0);
    let contained = d.parts.iter().all(|p| p.support().is_subset(&allowed));
    let additive = sum == d.total_norm;
    let pieces: Vec<Value> = d
        .parts
        .iter()
        .zip(&d.norms)
        .zip(&parts)
        .map(|((p, n), set)| json!({ "pairs": set.len(), "element": element_json(p), "norm": rational(n) }))
        .collect();
    Ok(Report {
        body: json!({
            "norm": rational(&d.total_norm),
            "parts": pieces,
            "sum_of_norms": rational(&sum),
            "additive": additive,
            "support_contained": contained,
        }),
        ok: additive && contained,
    })
}

pub fn diagonal(path: &Path) -> Result<Report, CliError> {
    let m = load_element(path)?;
    let d = diagonal_decompose(&m)?;
    let optimal = is_optimal(&d.certificate)?;
    let minimal = is_minimal(&d.certificate)?;
    Ok(Report {
        body: json!({
            "molecular": element_json(&d.molecular),
            "diagonal": element_json(&d.diagonal),
            "certificate": measure_file_json(&d.certificate),
            "certificate_optimal": optimal,
            "certificate_minimal": minimal,
        }),
        ok: optimal && minimal && d.diagonal.is_zero(),
    })
}

pub fn dilations(from_path: &Path, to_path: &Path, verify: bool) -> Result<Report, CliError> {
    let from = load_space(from_path)?;
    let to = load_space(to_path)?;
    let found = find_dilations(&from, &to);
    let mut all_passed = true;
    let mut list = Vec::with_capacity(found.len());
    for d in &found {
        let map: Map<String, Value> = d
            .map
            .iter()
            .enumerate()
            .map(|(x, &t)| (from.label(x).to_string(), label(&to, t)))
            .collect();
        let mut entry = json!({ "factor": rational(&d.factor), "map": map });
        if verify {
            let r = verify_banach_stone(&from, &to, d)?;
            all_passed &= r.passed();
            let matrix: Vec<Vec<String>> = r
                .matrix
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect();
            merge(
                &mut entry,
                json!({ "verification": {
                    "passed": r.passed(),
                    "norm_preserving": r.norm_preserving,
                    "norm_checks": r.norm_checks,
                    "molecules_bijective": r.molecules_bijective,
                    "extreme_set_preserved": r.extreme_set_preserved,
                    "matrix": matrix,
                }}),
            );
        }
        list.push(entry);
    }
    Ok(Report {
        body: json!({ "count": found.len(), "dilations": list }),
        ok: !found.is_empty() && all_passed,
    })
}

pub fn gcheck(path: &Path) -> Result<Report, CliError> {
    let g = load_edge_function(path)?;
    let space = g.space().clone();
    let violation = cone_violation(&g).map(|(x, u, y)| {
        let lhs = space.distance(x, y) * g.get(x, y);
        let rhs = space.distance(x, u) * g.get(x, u) + space.distance(u, y) * g.get(u, y);
        json!({
            "x": label(&space, x), "u": label(&space, u), "y": label(&space, y),
            "lhs": rational(&lhs), "rhs": rational(&rhs),
        })
    });
    let in_cone = violation.is_none();
    Ok(Report {
        body: json!({ "in_cone": in_cone, "violation": violation }),
        ok: in_cone,
    })
}

fn check_space(space: &Space, rng: &mut CorpusRng) -> Result<Vec<(&'static str, bool)>, CliError> {
    let mut checks = Vec::new();
    let mut agree = true;
    let mut nonempty = false;
    let mut exposed = true;
    for (x, y) in space.pairs() {
        let v = classify_molecule(space, x, y)?;
        agree &= v.is_extreme() == vertex_oracle(space, x, y)?;
        nonempty |= v.is_extreme();
        if v.is_extreme() {
            exposed &= v.verify(space)?;
        }
    }
    checks.push(("extreme_matches_oracle", agree));
    checks.push(("extreme_set_nonempty", nonempty));
    checks.push(("extreme_pairs_exposed", exposed));

    let mut duality = true;
    let mut additive = true;
    let mut idempotent = true;
    for _ in 0..3 {
        let m = random_element(rng, space);
        let value = free_norm(&m)?.value;
        duality &= value == lipschitz_dual_value(&m)?.0;
        let parts = random_pair_partition(rng, space, 2);
        let d = decompose_element(&m, &parts)?;
        additive &= d.norms.iter().sum::<Rational>() == value;
        let mu = random_positive_measure(rng, space, 4);
        let low = minimal_below(&mu)?;
        idempotent &= minimal_below(&low)? == low;
    }
    checks.push(("norm_duality", duality));
    checks.push(("decomposition_additive", additive));
    checks.push(("minimal_idempotent", idempotent));

    let deciders = precedence_deciders();
    let mu = random_positive_measure(rng, space, 3);
    let nu = random_positive_measure(rng, space, 3);
    let verdicts = deciders
        .iter()
        .map(|d| d.precedes(&mu, &nu))
        .collect::<Result<Vec<_>, _>>()?;
    checks.push(("precedence_routes_agree", verdicts.windows(2).all(|w| w[0] == w[1])));
    Ok(checks)
}

pub fn corpus(max_points: usize, count: usize, seed: u64) -> Result<Report, CliError> {
    if max_points < 2 {
        return Err(CliError::Input("--n must be at least 2".into()));
    }
    let mut rng = CorpusRng::seed_from_u64(seed);
    let spaces = generate_spaces(&mut rng, max_points, count);
    let mut failures = 0;
    let mut total = 0;
    let mut instances = Vec::with_capacity(count);
    for (index, space) in spaces.iter().enumerate() {
        let checks = check_space(space, &mut rng)?;
        total += checks.len();
        failures += checks.iter().filter(|(_, ok)| !ok).count();
        let checks: Map<String, Value> = checks
            .into_iter()
            .map(|(name, ok)| (name.to_string(), Value::Bool(ok)))
            .collect();
        instances.push(json!({
            "index": index,
            "points": space.len(),
            "space": MetricFile::from_space(space),
            "checks": checks,
        }));
    }
    Ok(Report {
        body: json!({
            "parameters": {
                "max_points": max_points,
                "count": count,
                "seed": seed,
                "rng": "ChaCha8",
                "distances": "p/q with q in {1,2,3,4} and 0 < p/q <= 4, then shortest-path completion",
            },
            "instances": instances,
            "summary": { "instances": count, "checks": total, "failures": failures },
        }),
        ok: failures == 0,
    })
}

pub fn strategies() -> Report {
    fn family<'a, T: Strategy + ?Sized + 'a>(items: impl Iterator<Item = &'a T>) -> Vec<Value> {
        items
            .map(|s| json!({ "name": s.name(), "summary": s.summary() }))
            .collect()
    }
    let classifiers = extremality_classifiers();
    let deciders = precedence_deciders();
    let solvers = norm_solvers();
    Report::ok(json!({
        "extremality": family(classifiers.iter()),
        "precedence": family(deciders.iter()),
        "norm": family(solvers.iter()),
    }))
}
