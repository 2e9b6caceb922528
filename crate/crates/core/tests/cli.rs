use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn frobres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobres")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn reduce_product_corolla() {
    let o = frobres(&["reduce", &fixture("product.graph")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(2,1,g=0,deg=0)\n");
}

#[test]
fn frobenius_relation_sides_reduce_identically() {
    let l = frobres(&["reduce", &fixture("frobenius_left.graph")]);
    let r = frobres(&["reduce", &fixture("frobenius_right.graph")]);
    assert_eq!(l.status.code(), Some(0));
    assert_eq!(stdout(&l), stdout(&r));
}

#[test]
fn handle_has_genus_one() {
    let o = frobres(&["reduce", &fixture("handle.graph"), "--n", "3"]);
    assert_eq!(stdout(&o), "(1,1,g=1,deg=3)\n");
}

#[test]
fn dangling_port_is_an_input_error() {
    let o = frobres(&["reduce", &fixture("dangling.graph")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dangling in-port v0.1"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = frobres(&["reduce", "/nonexistent/graph"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compose_agrees_with_normal_forms() {
    let o = frobres(&[
        "compose",
        &fixture("product.graph"),
        "--upper",
        &fixture("handle.graph"),
        "--upper",
        &fixture("product.graph"),
        "--matching",
        "1,0",
        "--format",
        "structured",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("composite j=3 k=1 g=1 degree=2"), "{out}");
    assert!(out.contains("check composed=\"(3,1,g=1,deg=2)\" result=PASS"), "{out}");
}

#[test]
fn compose_rejects_arity_mismatch() {
    let o = frobres(&["compose", &fixture("product.graph"), "--upper", &fixture("product.graph")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("composition error"));
}

#[test]
fn dsq_examples() {
    for (j, k, w) in [("1", "1", "2"), ("2", "1", "3")] {
        let o = frobres(&["dsq", j, k, w]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("d^2 = 0: PASS"));
        assert!(stdout(&o).contains("basis size = "));
    }
    let o = frobres(&["dsq", "4", "4", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn dsq_rejects_odd_degree_parameter() {
    let o = frobres(&["dsq", "1", "1", "2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("out of range"));
}

#[test]
fn resolve_strict_targets() {
    for name in ["s2", "t2"] {
        let o = frobres(&["resolve", name, "--max-weight", "3", "--format", "structured"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let out = stdout(&o);
        assert!(out.contains("nonzero_fillers=0 all_filled=true"), "{out}");
        assert!(out.contains("failures=0"));
        assert!(!out.contains("status=unfillable"));
    }
}

#[test]
fn resolve_perturbed_fixture_by_path() {
    let o = frobres(&["resolve", &fixture("s2_perturbed.alg"), "--max-weight", "3", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("summary ")).unwrap();
    let nonzero: usize = line.split("nonzero_fillers=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!(nonzero >= 1, "{line}");
}

#[test]
fn resolve_broken_fixture_fails() {
    let o = frobres(&["resolve", "s2_broken", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("weight=2") && out.contains("status=unfillable"), "{out}");
    assert!(out.ends_with("status result=fail\n"));
}

#[test]
fn resolve_weight_bound_is_a_resource_error() {
    let o = frobres(&["resolve", "s2", "--max-weight", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn resolve_writes_report_file() {
    let path = std::env::temp_dir().join(format!("frobres-report-{}.txt", std::process::id()));
    let p = path.display().to_string();
    let o = frobres(&["resolve", "s2", "--format", "structured", "--output", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("frobres-report v1 command=resolve\n"));
}

#[test]
fn euler_values() {
    assert_eq!(stdout(&frobres(&["euler", "s2"])), "chi = 2\n");
    assert_eq!(stdout(&frobres(&["euler", "cp2"])), "chi = 3\n");
    assert_eq!(stdout(&frobres(&["euler", &fixture("t2.alg")])), "chi = 0\n");
}

#[test]
fn unknown_algebra_is_an_input_error() {
    let o = frobres(&["euler", "no-such-algebra"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dualize_passes_duality() {
    let o = frobres(&["dualize", "cp2", "--max-arity", "4", "--max-genus", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(": PASS"));
}

#[test]
fn dilie_reports() {
    let o = frobres(&["dilie", "so3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("relations: PASS"));
    let o = frobres(&["dilie", &fixture("heisenberg3.lie")]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("Killing form degenerate"));
}

#[test]
fn tensor_check_arity_five() {
    let o = frobres(&["tensor-check", "--max-arity", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS"));
    let o = frobres(&["tensor-check", "--max-arity", "6"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tensor_check_with_algebras() {
    let o = frobres(&["tensor-check", "--n", "2", "--algebra", "s2", "--lie", "sl2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("s2 ⊗ sl2: module defect 0"));
}

#[test]
fn graphs_enumeration() {
    let o = frobres(&["graphs", "2", "1", "--max-vertices", "1", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("graph ")).count(), 1);
    assert!(out.contains("j=2 k=1 g=0 degree=0"));
    let o = frobres(&["graphs", "1", "1", "--max-vertices", "9"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn structured_output_is_deterministic() {
    for args in [
        vec!["resolve", "s2_perturbed", "--format", "structured"],
        vec!["graphs", "1", "2", "--max-vertices", "3", "--format", "structured"],
        vec!["tensor-check", "--format", "structured"],
    ] {
        let a = frobres(&args);
        let b = frobres(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(stdout(&a).starts_with(&format!("frobres-report v1 command={}\n", args[0])));
    }
}
