use orbibasket::cli::{parse_delta, run};
use orbibasket::hilbert::orbifold_contribution;
use orbibasket::singularity::Singularity;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("orbibasket").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn contrib_golden() {
    let (code, out, _) = call(&["contrib", "1/5(1,1)"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "singularity 1/5(1,1)\nclass residual indecomposable\nlocal index 5\ndelta (1,-2,1)\n\
         Q (t - 2*t^2 + t^3)/(5*(1 - t^5))\nA 1/5\n"
    );
    let d = orbifold_contribution(&"1/5(1,1)".parse::<Singularity>().unwrap());
    assert!(out.contains(&d.q_string()));
    let (_, full, _) = call(&["contrib", "1/5(1,1)", "--full-delta"]);
    assert!(full.contains("delta (0,1,-2,1,0)"));
}

#[test]
fn contrib_json() {
    let (code, out, _) = call(&["--json", "contrib", "1/20(1,3)"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["delta"], serde_json::json!([2, 1, 2]));
    assert_eq!(v["localIndex"], 5);
}

#[test]
fn delta_rank_golden() {
    assert_eq!(call(&["delta-rank", "34"]), (0, "rank=8 phi/2=8 OK\n".into(), String::new()));
}

#[test]
fn analyze_no_surface() {
    let (code, out, _) = call(&["analyze", "(1+11*t+t^2)/(1-t)^3"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("verdict NO_SURFACE\n"), "{out}");
    let (_, json, _) = call(&["analyze", "(1+7*t+t^2)/(1-t)^3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["verdict"], "FEASIBLE");
    assert_eq!(v["ikSquared"], serde_json::json!(["3"]));
}

#[test]
fn quiver_and_reduce() {
    let (_, out, _) = call(&["quiver", "5"]);
    assert_eq!(out, "1/5(1,1) -> 1/5(1,2) -> 1/10(1,1) -> 1/5(1,3) ->\n");
    let (code, out, _) = call(&["reduce", "5", "(2,1,2)"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "4 reduced baskets");
    assert!(lines[1..].iter().all(|l| l.ends_with("RK^2=-8/5")));
    assert!(out.contains("(1,0,0,1) {1/5(1,1), 1/15(1,2)}"));
    let (_, out, _) = call(&["reduce", "5", "1,0,1"]);
    assert_eq!(out, "NOT_REALIZABLE\n");
}

#[test]
fn bounds_and_count() {
    assert_eq!(call(&["bounds", "1/5(1,1), 1/5(1,3)"]).1, "m=1/5 M=46/5\n");
    assert_eq!(call(&["bounds", "1/5(1,1), 1/5(1,3)", "--nmin", "9"]).1, "m=1/5 M=1/5\n");
    let (code, _, err) = call(&["bounds", "1/5(1,1)", "--nmin", "12"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: Infeasible"), "{err}");
    let (code, out, _) = call(&["count-bound", "5", "5:(2,1,2)"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("N="));
}

#[test]
fn series_terms() {
    let (code, out, _) = call(&["series", "1/3(1,1)", "25/3", "--terms", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("K^2 25/3\npart 3 (-1)\n"), "{out}");
    assert!(out.ends_with("terms 1, 9, 26, 51\n"), "{out}");
}

#[test]
fn exit_codes() {
    let (code, _, err) = call(&["reduce", "5", "--bogus"]);
    assert_eq!(code, 2);
    assert!(err.contains("--bogus"));
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&[]).0, 2);
    let (code, _, err) = call(&["contrib", "1/4(1,2)"]);
    assert_eq!(code, 1);
    assert!(err.contains("InvalidWeight"));
    let (code, _, err) = call(&["quiver", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("UnsupportedIndex"));
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn deterministic_across_jobs() {
    let a = call(&["reduce", "5", "(8,-1,8)", "--jobs", "1"]);
    let b = call(&["reduce", "5", "(8,-1,8)", "--jobs", "3"]);
    assert_eq!(a, b);
    assert_eq!(a, call(&["reduce", "5", "(8,-1,8)"]));
}

#[test]
fn delta_forms() {
    let a = parse_delta(5, "(2,1,2)").unwrap();
    assert_eq!(parse_delta(5, "0,2,1,2,0").unwrap(), a);
    assert!(parse_delta(5, "(1,2,1,2,0)").is_err());
    assert!(parse_delta(5, "(1,2)").is_err());
}
