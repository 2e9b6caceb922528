//! The acceptance suite: one PASS/FAIL line per criterion, nonzero exit if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use frobres::algebra::{dualize, duality_failures, euler_check, genus_operation, handle_coefficient, load_algebra, standard_graph};
use frobres::bar::audit_square;
use frobres::dilie::{cobracket_from_killing, dilie_relations_check, hadamard_check, load_lie};
use frobres::error::Error;
use frobres::exact::Scalar;
use frobres::frob::{reduce_to_normal_form, verify_presentation, FrobBasisElement, FrobGenerator};
use frobres::graph::{enumerate_skeletons, graft, permutations, Decoration, DirectedGraph, GraftingPattern};
use frobres::obstruct::{run_resolution, Target};

fn criterion_1() {
    for n in 1..=3i64 {
        for j in 1..=4usize {
            for k in 1..=4usize {
                for g in 0..=3usize {
                    let expected = (k as i64 - 1) * n + g as i64 * n;
                    let e = FrobBasisElement::new(j, k, g, n).unwrap();
                    assert_eq!(e.degree, expected, "({j},{k},{g}) n={n}");
                    for d in -30..=30 {
                        let probe = FrobBasisElement { degree: d, ..e };
                        assert_eq!(probe.in_table(), d == expected, "({j},{k},{g}) n={n} degree {d}");
                        let label = format!("F.g{g}.n{n}.d{d}");
                        assert_eq!(FrobBasisElement::from_label(&label, j, k).is_ok(), d == expected);
                    }
                    // A realizing graph: its generator degrees add up to the
                    // single degree of the component.
                    if let Some(sg) = standard_graph(j, k, g) {
                        assert_eq!(sg.loop_genus(), g);
                        let sum: i64 = sg.vertices().iter().map(|v| v.degree(n)).sum();
                        assert_eq!(sum, expected);
                        assert_eq!(reduce_to_normal_form(&sg, n).unwrap(), e);
                    }
                }
            }
        }
    }
}

fn criterion_2() {
    const TOTAL: usize = 5;
    // Orbit representatives suffice: the matching ranges over all bijections.
    let mut pool: Vec<(DirectedGraph<FrobGenerator>, usize)> = Vec::new();
    for j in 0..=TOTAL + 1 {
        for k in 0..=TOTAL + 1 - j {
            if j + k == 0 {
                continue;
            }
            for s in enumerate_skeletons(j, k, TOTAL - 1, &FrobGenerator::ALL, false).unwrap() {
                let g = s.to_graph().unwrap();
                let v = g.num_vertices();
                pool.push((g, v));
            }
        }
    }
    let mut checked = 0usize;
    for (lower, lv) in &pool {
        let jl = lower.inputs().len();
        if jl == 0 {
            continue;
        }
        let mut picks = Vec::new();
        upper_sequences(&pool, 0, jl, TOTAL - lv, &mut picks, &mut |ups: &[usize]| {
            let upper: Vec<_> = ups.iter().map(|&u| pool[u].0.clone()).collect();
            let r = upper.len();
            let gsum: usize = upper.iter().map(|u| u.loop_genus()).sum();
            for matching in permutations(jl) {
                let p = GraftingPattern { upper: upper.clone(), lower: lower.clone(), matching };
                let glued = graft(&p).unwrap();
                assert_eq!(glued.loop_genus(), gsum + lower.loop_genus() + jl - r);
                checked += 1;
            }
        });
    }
    assert!(checked > 1000, "only {checked} patterns");
}

/// Nondecreasing sequences of pool indices whose outputs total `outs`
/// and whose vertices fit in `budget`.
fn upper_sequences(
    pool: &[(DirectedGraph<FrobGenerator>, usize)],
    from: usize,
    outs: usize,
    budget: usize,
    picks: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if outs == 0 {
        if !picks.is_empty() {
            visit(picks);
        }
        return;
    }
    for i in from..pool.len() {
        let (g, v) = &pool[i];
        let k = g.outputs().len();
        if k == 0 || k > outs || *v > budget {
            continue;
        }
        picks.push(i);
        upper_sequences(pool, i, outs - k, budget - v, picks, visit);
        picks.pop();
    }
}

fn criterion_3() {
    for n in [1, 2] {
        let report = verify_presentation(5, 4, n).unwrap();
        assert!(report.ok(), "n={n}: {:?} {:?}", report.violations, report.confluence_failures);
        assert!(report.orbits > 0);
    }
}

fn criterion_4() {
    let audit = audit_square(4, 3, 2, 2).unwrap();
    assert!(audit.checked > 0);
    assert!(audit.failures.is_empty(), "{:?}", &audit.failures[..audit.failures.len().min(5)]);
}

fn criterion_5() {
    for (name, chi) in [("s2", 2), ("t2", 0), ("s3", 0), ("cp2", 3)] {
        let a = load_algebra(name).unwrap().algebra;
        let got = euler_check(&a).unwrap();
        assert_eq!(got, Scalar::from_integer(chi.into()), "{name}");
        let handle = genus_operation(&a, 1, 1, 1).unwrap();
        assert_eq!(handle_coefficient(&a, &handle), got, "{name}");
    }
}

fn criterion_6() {
    for name in ["s2", "t2"] {
        let file = load_algebra(name).unwrap();
        let res = run_resolution(Target::from_file(&file).unwrap(), 3, 2).unwrap();
        assert!(res.all_filled(), "{name}");
        assert_eq!(res.nonzero_fillers(), 0, "{name}");
        assert!(res.reports().iter().any(|r| r.weight == 3), "{name} never reached weight 3");
        assert!(res.audit.passed(), "{name}: {:?}", res.audit.failures);
    }
}

fn criterion_7() {
    let file = load_algebra("s2_perturbed").unwrap();
    let res = run_resolution(Target::from_file(&file).unwrap(), 3, 2).unwrap();
    assert!(res.all_filled());
    assert!(res.nonzero_fillers() >= 1);
    assert!(res.audit.passed(), "{:?}", res.audit.failures);

    // The broken product fails associativity, a weight-2 relation.
    let file = load_algebra("s2_broken").unwrap();
    let res = run_resolution(Target::from_file(&file).unwrap(), 3, 1).unwrap();
    let bad = res.first_unfilled().expect("the broken fixture must be obstructed");
    assert_eq!(bad.weight, 2);
    assert!(!bad.cycle.is_zero());
    assert!(bad.homology_dim.unwrap_or(0) >= 1);
}

fn criterion_8() {
    for name in ["sl2", "so3"] {
        let d = cobracket_from_killing(&load_lie(name).unwrap()).unwrap();
        let report = dilie_relations_check(&d).unwrap();
        for (rel, v) in &report.defects {
            if ["co-Jacobi", "co-antisymmetry", "module"].contains(rel) {
                assert!(num_traits::Zero::is_zero(v), "{name} {rel}");
            }
        }
        assert!(report.all_zero(), "{name}");
    }
    let err = cobracket_from_killing(&load_lie("heisenberg3").unwrap()).unwrap_err();
    assert!(matches!(err, Error::DegenerateKilling(_)));
}

fn criterion_9() {
    for n in 1..=3 {
        let rows = hadamard_check(5, n).unwrap();
        assert_eq!(rows.len(), 1 + 2 + 3 + 4);
        for row in rows {
            assert!(row.matches(), "n={n} ({},{}): {:?} vs {:?}", row.j, row.k, row.product, row.dilie_n);
        }
    }
}

fn criterion_10() {
    for name in ["s2", "t2", "s3", "cp2"] {
        let a = load_algebra(name).unwrap().algebra;
        dualize(&a).unwrap().check_invariants().unwrap();
        assert_eq!(duality_failures(&a, 4, 2).unwrap(), vec![], "{name}");
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 10] = [
        ("Frob component degrees", criterion_1),
        ("genus of grafted graphs", criterion_2),
        ("presentation confluence", criterion_3),
        ("(d+∂)² = 0 through j+k <= 4, weight 3", criterion_4),
        ("Euler characteristic and handle operator", criterion_5),
        ("strict targets resolve with zero fillers", criterion_6),
        ("perturbed target fills, broken target obstructs", criterion_7),
        ("Killing cobracket relations", criterion_8),
        ("Hadamard dimension identity", criterion_9),
        ("duality of genus operations", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {}: {name} ({secs:.2}s)", if ok { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!ok);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
