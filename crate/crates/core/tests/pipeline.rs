use proptest::prelude::*;

use frobres::algebra::{genus_operation, load_algebra, standard_graph, GeneratorImages};
use frobres::error::Error;
use frobres::frob::{frob_compose, reduce_to_normal_form};
use frobres::graph::{graft, permutations, GraftingPattern};
use frobres::obstruct::{run_resolution, Target};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Grafting, reduction and evaluation agree: the glued graph reduces to
    // the composite of the parts, and on an evenly graded algebra its value
    // is the genus operation of that composite.
    #[test]
    fn graft_reduce_evaluate_agree(
        upper in (1usize..3, 1usize..3, 0usize..2),
        lower_k in 1usize..3,
        lower_g in 0usize..2,
        seed in 0usize..24,
    ) {
        let (uj, uk, ug) = upper;
        prop_assume!((uj, uk, ug) != (1, 1, 0) && (uk, lower_k, lower_g) != (1, 1, 0));
        let up = standard_graph(uj, uk, ug).unwrap();
        let low = standard_graph(uk, lower_k, lower_g).unwrap();
        let perms = permutations(uk);
        let matching = perms[seed % perms.len()].clone();
        let glued = graft(&GraftingPattern { upper: vec![up.clone()], lower: low.clone(), matching }).unwrap();

        let n = 2;
        let nf = reduce_to_normal_form(&glued, n).unwrap();
        let expected = frob_compose(
            &[reduce_to_normal_form(&up, n).unwrap()],
            &reduce_to_normal_form(&low, n).unwrap(),
        ).unwrap();
        prop_assert_eq!(nf, expected);

        let a = load_algebra("s2").unwrap().algebra;
        let value = GeneratorImages::of(&a).unwrap().evaluate(&glued).unwrap();
        prop_assert_eq!(value, genus_operation(&a, nf.j, nf.k, nf.g).unwrap());
    }
}

#[test]
fn resolution_runs_are_reproducible() {
    let file = load_algebra("s2_perturbed").unwrap();
    let a = run_resolution(Target::from_file(&file).unwrap(), 2, 1).unwrap();
    let b = run_resolution(Target::from_file(&file).unwrap(), 2, 1).unwrap();
    assert_eq!(a.report_text(), b.report_text());
    assert!(a.nonzero_fillers() > 0);
}

#[test]
fn strict_resolution_extends_the_algebra_operations() {
    // A strict target needs no homotopies, so every filler vanishes.
    let file = load_algebra("cp2").unwrap();
    let res = run_resolution(Target::from_file(&file).unwrap(), 2, 1).unwrap();
    assert!(res.all_filled());
    assert_eq!(res.nonzero_fillers(), 0);
    assert!(res.audit.passed());
}

#[test]
fn odd_top_degree_is_out_of_range_for_resolutions() {
    let file = load_algebra("s3").unwrap();
    let err = run_resolution(Target::from_file(&file).unwrap(), 2, 1).unwrap_err();
    assert!(matches!(err, Error::OutOfRange(_)), "{err}");
}
