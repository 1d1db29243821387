use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussmap")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not a report ({e}): {}", stderr(o)))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

/// The summary maximum must be the maximum over the records.
fn assert_consistent(r: &Value) {
    assert_eq!(r["schema_version"], 1);
    let records = r["records"].as_array().unwrap();
    assert_eq!(r["summary"]["records"].as_u64().unwrap() as usize, records.len());
    for c in r["summary"]["checks"].as_array().unwrap() {
        let Some(field) = c["field"].as_str() else { continue };
        let max = records
            .iter()
            .filter_map(|x| x[field].as_f64())
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        assert_eq!(c["max"].as_f64(), max, "{field}");
    }
}

fn check(r: &Value, name: &str) -> (f64, bool) {
    let c = r["summary"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"));
    (c["max"].as_f64().unwrap_or(f64::NAN), c["pass"].as_bool().unwrap())
}

#[test]
fn zoo_sample_writes_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "m.csv");
    let o =
        run(&["zoo", "sample", "ruled-6.2-2", "--param", "c=1", "--u", "0.5:2:16", "--v", "0.1:1.5:16", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,j,u,v,x1,x2,x3");
    assert_eq!(lines.len(), 257);
    assert!(lines[1].starts_with("0,0,0.5,0.1,"));
    assert!(lines[256].starts_with("15,15,2.0,1.5,"));
}

#[test]
fn unknown_families_are_usage_errors() {
    let o = run(&["zoo", "sample", "nosuchfamily"]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert_eq!(e.lines().count(), 1);
    assert!(e.contains("nosuchfamily"));
    assert_eq!(code(&run(&["check", "forms", "nosuchfamily"])), 2);
    assert_eq!(code(&run(&["zoo", "sample", "horosphere-h3", "--param", "q=1"])), 2);
}

#[test]
fn malformed_flags_name_themselves() {
    let o = run(&["pde", "residual", "--eq", "6.2", "--graph", "u", "--grid", "0:1:3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--grid"));
    let o = run(&["pde", "residual", "--eq", "6.3", "--graph", "u", "--grid", "0:1:3x0:1:3"]);
    assert!(code(&o) == 2 && stderr(&o).contains("--eq"));
    let o = run(&["pde", "residual", "--eq", "6.1", "--graph", "u +", "--grid", "0:1:3x0:1:3"]);
    assert!(code(&o) == 2 && stderr(&o).contains("--graph"));
    assert_eq!(code(&run(&["zoo", "frobnicate"])), 2);
}

#[test]
fn negative_grid_values_parse() {
    let o = run(&["zoo", "sample", "horosphere-h3", "--u", "-1:1:3", "--v", "-2:-1:2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 7);
}

#[test]
fn corollary_graph_solves_the_de_sitter_equation() {
    let o = run(&["pde", "residual", "--eq", "6.2", "--graph", "u*v/sqrt(1+v^2)", "--grid", "0.1:0.9:9x0.1:0.9:9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(&o);
    assert_consistent(&r);
    assert_eq!(r["records"].as_array().unwrap().len(), 81);
    let (max, pass) = check(&r, "equation residual");
    assert!(pass && max <= 1e-10);
}

#[test]
fn failing_checks_exit_one() {
    let o = run(&["pde", "residual", "--eq", "6.1", "--graph", "u^2 + v", "--grid", "0.1:0.9:3x0.1:0.9:3"]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_consistent(&r);
    assert_eq!(r["summary"]["pass"], false);
    // a point where the expression cannot be evaluated lands in the report
    let o = run(&["pde", "residual", "--eq", "6.1", "--graph", "sqrt(u)", "--grid", "-1:1:3x0:1:2"]);
    assert_eq!(code(&o), 1);
    assert!(report(&o)["summary"]["errors"].as_u64().unwrap() > 0);
}

#[test]
fn reports_are_deterministic() {
    let args = ["check", "conformal", "translational-6.3-plus", "--grid", "0.2:0.8:4x0.3:0.9:3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_consistent(&report(&a));
}

#[test]
fn forms_and_conformality_on_families_and_graphs() {
    for fam in ["horosphere-h3", "translational-6.6", "ruled-6.2-3", "translational-7.3-4", "ruled-7.4-flaherty"] {
        for sub in ["forms", "conformal"] {
            let o = run(&["check", sub, fam]);
            assert_eq!(code(&o), 0, "{sub} {fam}: {}", stderr(&o));
            assert_consistent(&report(&o));
        }
    }
    let r = report(&run(&["check", "conformal", "geodesic-plane-h3", "--at", "0.3,1.2"]));
    assert_eq!(r["records"][0]["classification"], "totally-geodesic");
    let o = run(&["check", "forms", "--graph", "1 + u^2 + v^2", "--space", "h3", "--grid", "-0.2:0.2:3x-0.2:0.2:3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (max, _) = check(&report(&o), "obata identity");
    assert!(max <= 1e-9);
    let o = run(&["check", "conformal", "--graph", "1 + u^2 + v^2", "--space", "h3", "--at", "0.1,0.2"]);
    assert_eq!(report(&o)["records"][0]["classification"], "not-conformal");
    // a graph needs a space
    assert_eq!(code(&run(&["check", "forms", "--graph", "u", "--at", "1,1"])), 2);
}

#[test]
fn dualize_fits_the_partner_family() {
    let o = run(&["dualize", "ruled-6.7", "--fit-isometry"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(&o);
    assert_consistent(&r);
    let fit = &r["info"]["isometry_fit"];
    assert_eq!(fit["partner"], "ruled-6.2-2");
    assert!((fit["theta"].as_f64().unwrap().abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!(check(&r, "isometry fit").0 <= 1e-6);
    assert!(check(&r, "curvature transfer").0 <= 1e-8);
    assert!(check(&r, "double polarity").0 <= 1e-8);
    let o = run(&["dualize", "horosphere-h3", "--fit-isometry"]);
    assert!(code(&o) == 2 && stderr(&o).contains("--fit-isometry"));
    // no polar variety: every normal is equatorial
    assert_eq!(code(&run(&["dualize", "geodesic-plane-h3"])), 1);
}

#[test]
fn obj_export_counts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "s.csv");
    let obj = path(dir.path(), "s.obj");
    let o = run(&["zoo", "sample", "horosphere-h3", "--u", "0:1:2", "--v", "0:1:2", "--out", &csv]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["export", "obj", "--in", &csv, "--out", &obj])), 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    let count = |p: &str| text.lines().filter(|l| l.starts_with(p)).count();
    assert_eq!((count("v "), count("f ")), (4, 2));
    assert!(!text.contains('\r'));

    run(&["zoo", "sample", "translational-6.6", "--out", &csv]);
    assert_eq!(code(&run(&["export", "obj", "--in", &csv, "--out", &obj])), 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 256);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 450);
}

#[test]
fn holes_and_empty_grids() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "h.csv");
    let obj = path(dir.path(), "h.obj");
    std::fs::write(&csv, "i,j,u,v,x1,x2,x3\n0,0,0,0,0,0,1\n1,0,1,0,1,0,1\n0,1,0,1,,,\n1,1,1,1,1,1,1\n").unwrap();
    let o = run(&["export", "obj", "--in", &csv, "--out", &obj]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("omitted 1 faces"), "{}", stderr(&o));
    let text = std::fs::read_to_string(&obj).unwrap();
    let want = "v 0.0000000000000000e0 0.0000000000000000e0 1.0000000000000000e0\n\
                v 1.0000000000000000e0 0.0000000000000000e0 1.0000000000000000e0\n\
                v 1.0000000000000000e0 1.0000000000000000e0 1.0000000000000000e0\n\
                f 1 2 3\n";
    assert_eq!(text, want);
    std::fs::write(&csv, "i,j,u,v,x1,x2,x3\n").unwrap();
    let o = run(&["export", "obj", "--in", &csv, "--out", &obj]);
    assert!(code(&o) == 2 && stderr(&o).contains("--in"));
}

#[test]
fn weierstrass_build_on_the_test_problem() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "w.csv");
    let field = path(dir.path(), "g.csv");
    let o = run(&[
        "weierstrass",
        "build",
        "--g",
        "builtin:z",
        "--case",
        "1",
        "--domain",
        "1.5:2.5:0.1:0.9",
        "--grid",
        "33",
        "--boundary",
        "builtin:radial",
        "--out",
        &out,
        "--field-out",
        &field,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = report(&o);
    assert_consistent(&r);
    assert_eq!(r["info"]["kept"], 33 * 33);
    assert!(check(&r, "linear residual").0 <= 1e-10);
    assert!(check(&r, "g recovered from the normal").0 <= 3e-2);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 33 * 33 + 1);
    assert!(std::fs::read_to_string(&field).unwrap().starts_with("i,j,u,v,re,im\n"));
    let obj = path(dir.path(), "w.obj");
    assert_eq!(code(&run(&["export", "obj", "--in", &out, "--out", &obj])), 0);
}

#[test]
fn weierstrass_input_and_numeric_failures() {
    let base = ["weierstrass", "build", "--domain", "1.5:2.5:0.1:0.9"];
    let with = |extra: &[&str]| {
        let grid = if extra.contains(&"--grid") { &[][..] } else { &["--grid", "17"][..] };
        run(&[&base[..], grid, extra].concat())
    };
    // |g| > 1 everywhere, so the antiholomorphic case rejects it
    let o = with(&["--g", "builtin:z", "--case", "2", "--boundary", "builtin:radial"]);
    assert!(code(&o) == 2 && stderr(&o).contains("--g"));
    let o = with(&["--g", "builtin:z", "--case", "1", "--boundary", "1/0;0"]);
    assert!(code(&o) == 2 && stderr(&o).contains("--boundary"));
    let o = with(&["--g", "builtin:radial", "--case", "1", "--boundary", "builtin:radial"]);
    assert!(code(&o) == 2 && stderr(&o).contains("--g"));
    let o = with(&["--g", "builtin:z", "--case", "1", "--boundary", "builtin:radial", "--grid", "99"]);
    assert_eq!(code(&o), 2);
    // every sample fails the inequalities: reported, not a usage error
    let o = with(&["--g", "builtin:inv-zbar", "--case", "2", "--boundary", "u;-v"]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["summary"]["errors"], 1);
}
