use std::path::PathBuf;
use std::process::{Command, Output};

use lapmahler::PeriodicGraph;

const TORSION_NINE_GRAPH: &str = r#"{"dim":1,"vertex_orbits":4,"edges":[
{"from":1,"to":2,"shift":[0],"weight":-1},{"from":1,"to":2,"shift":[-1],"weight":1},
{"from":1,"to":3,"shift":[0],"weight":-1},{"from":1,"to":4,"shift":[-1],"weight":1},
{"from":2,"to":3,"shift":[0],"weight":-1},{"from":2,"to":4,"shift":[0],"weight":1}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapmahler"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn footer(text: &str, key: &str) -> String {
    let prefix = format!("# {key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .to_string()
}

#[test]
fn growth_csv_for_constant_torsion_graph() {
    let input = temp_file("torsion_nine.json", TORSION_NINE_GRAPH);
    let text = stdout(&[
        "growth",
        "--input",
        input.to_str().unwrap(),
        "--r-max",
        "12",
        "--format",
        "csv",
    ]);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        rows[0],
        "lattice,index,min_vector_length,log_kappa,normalized_rate"
    );
    assert_eq!(rows.len(), 13);
    let log9 = 9f64.ln();
    for row in &rows[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let r: f64 = f[1].parse().unwrap();
        let rate: f64 = f[4].parse().unwrap();
        assert!((rate - (r - 1.0) / r * log9).abs() < 1e-10, "{row}");
    }
    let logm: f64 = footer(&text, "log_mahler_measure").parse().unwrap();
    assert!((logm - log9).abs() < 1e-10);
    assert_eq!(
        footer(&text, "laplacian_polynomial"),
        "-9*x^1 + 18 - 9*x^-1"
    );
}

#[test]
fn kappa_and_tau_of_double_cover() {
    let input = temp_file("torsion_nine_k.json", TORSION_NINE_GRAPH);
    let path = input.to_str().unwrap();
    let k = stdout(&["kappa", "--input", path, "--r", "2"]);
    assert_eq!(
        k,
        "kappa: 9\ntau: 0\nnullity: 2\ninvariant_factors: 1 1 1 1 3 3\n"
    );
    assert_eq!(stdout(&["tau", "--input", path, "--r", "2"]), k);
    let csv = stdout(&["kappa", "--input", path, "--basis", "2", "--format", "csv"]);
    assert_eq!(
        csv,
        "kappa,tau,nullity,invariant_factors\n9,0,2,1 1 1 1 3 3\n"
    );
}

#[test]
fn mahler_of_square_grid_polynomial() {
    let text = stdout(&[
        "mahler",
        "--poly",
        "4 - x1 - x1^-1 - x2 - x2^-1",
        "--N",
        "1024",
    ]);
    let log_value: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .strip_prefix("log_value: ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((log_value - 1.165).abs() < 5e-3, "{log_value}");
    assert!(text.contains("method: torus-quadrature"));

    let j = stdout(&["mahler", "--poly", "x - 2", "--format", "csv"]);
    assert!(j
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("jensen-roots,0.69314718056,2,"));
}

#[test]
fn oracle_check_on_grid() {
    let grid = stdout(&["grid", "--dim", "1"]);
    let input = temp_file("grid1.json", &grid);
    let text = stdout(&["oracle-check", "--input", input.to_str().unwrap()]);
    assert_eq!(
        text.lines().next().unwrap(),
        "CRSF = det: OK; trees = minor: OK"
    );
}

#[test]
fn realize_and_grid_emit_loadable_graphs() {
    let json = stdout(&["realize", "--poly", "x^2 - x - x^-1 + x^-2"]);
    let g = PeriodicGraph::from_json(&json).unwrap();
    assert_eq!(
        g.laplacian_polynomial().unwrap().to_string(),
        "x^2 - x^1 - x^-1 + x^-2"
    );
    let input = temp_file("realized.json", &json);
    assert_eq!(
        stdout(&["poly", "--input", input.to_str().unwrap()]).trim(),
        "x^2 - x^1 - x^-1 + x^-2"
    );

    let shifted = stdout(&[
        "realize",
        "--poly",
        "x^12 - x^11 - x^10 + x^8 + x^4 - x^2 - x + 1",
    ]);
    let g = PeriodicGraph::from_json(&shifted).unwrap();
    assert_eq!(g.edges().len(), 4);
    assert_eq!(
        g.laplacian_polynomial().unwrap().to_string(),
        "x^6 - x^5 - x^4 + x^2 + x^-2 - x^-4 - x^-5 + x^-6"
    );

    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("grid3.json");
    stdout(&["grid", "--dim", "3", "--out", out.to_str().unwrap()]);
    let g = PeriodicGraph::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g, PeriodicGraph::grid(3));
}

#[test]
fn search_reports_lehmer_minimum() {
    let text = stdout(&["search", "--limit", "1", "--format", "csv"]);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let m: f64 = row[2].parse().unwrap();
    assert!((m - 1.17628).abs() < 1e-4, "{m}");
}

#[test]
fn exit_codes() {
    let bad = run(&["mahler", "--poly", "x^^2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());

    let missing = run(&["poly", "--input", "/nonexistent/graph.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let not_palindromic = run(&["realize", "--poly", "x - 1"]);
    assert_eq!(not_palindromic.status.code(), Some(2));

    let grid = temp_file("grid4.json", &stdout(&["grid", "--dim", "4"]));
    let huge = run(&["kappa", "--input", grid.to_str().unwrap(), "--r", "1000"]);
    assert_eq!(huge.status.code(), Some(3));
}

#[test]
fn output_is_reproducible() {
    let args = ["mahler", "--poly", "3 + x1 + x2 + x1*x2^-1", "--N", "256"];
    assert_eq!(stdout(&args), stdout(&args));
    let search = ["search", "--max-edges", "3", "--max-winding", "4"];
    assert_eq!(stdout(&search), stdout(&search));
}
