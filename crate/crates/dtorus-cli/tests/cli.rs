//! End-to-end runs of the `dtorus` binary: examples, exit codes, determinism.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::{Command, Output};

use dtorus::io::{parse_table_csv, Cell, Table};
use serde_json::Value;

fn dtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtorus")).args(args).env_remove("DTORUS_TOL").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("UTF-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("UTF-8 diagnostics")
}

fn table(o: &Output) -> Table {
    assert_eq!(code(o), 0, "{}", stderr(o));
    parse_table_csv(&stdout(o)).expect("CSV output")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", stderr(o));
    serde_json::from_str(&stdout(o)).expect("JSON output")
}

fn floats(t: &Table, col: &str) -> Vec<f64> {
    t.column(col).expect("column present").iter().map(|c| c.as_f64().expect("numeric")).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dtorus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_fourier_d2() {
    let v = json(&dtorus(&["gen", "--d", "2", "--kind", "fourier"]));
    assert_eq!(v["dim"], 2);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, row) in [[h, h], [h, -h]].iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert!((v["rows"][i][j][0].as_f64().unwrap() - x).abs() < 1e-15);
            assert_eq!(v["rows"][i][j][1].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn gen_schwinger_to_file() {
    let path = scratch("s.json");
    let o = dtorus(&["gen", "--d", "3", "--kind", "schwinger", "--m", "1,1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let op = dtorus::io::parse_operator_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(op.dim().d(), 3);
    assert!(op.unitarity_residual() < 1e-14);
}

#[test]
fn gen_composite_warns() {
    let o = dtorus(&["gen", "--d", "4", "--kind", "u"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("not prime"), "{}", stderr(&o));
}

#[test]
fn gen_csv_lists_entries() {
    let t = table(&dtorus(&["gen", "--d", "3", "--kind", "phase", "--format", "csv"]));
    assert_eq!(t.header, ["row", "col", "re", "im"]);
    assert_eq!(t.rows.len(), 9);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["gen", "--d", "3", "--kind", "schwinger"][..],
        &["gen", "--d", "1", "--kind", "u"],
        &["gen", "--d", "3", "--kind", "w"],
        &["gen", "--d", "3"],
        &["gen", "--d", "5000", "--kind", "u"],
        &["wigner", "--d", "5", "--state", "fock"],
        &["wigner", "--d", "5", "--state", "bogus:1"],
        &["spectrum", "--d", "5", "--m", "1,2", "--mp", "2,4"],
        &["transform", "--d", "5", "--r", "1,1,1,1"],
        &["transform", "--d", "5", "--r", "1,2,3"],
        &["converge", "--primes", "11,15", "--observable", "en"],
        &["converge", "--primes", "", "--observable", "en"],
        &["index", "--d", "7", "--case", "quarter"],
        &["nosuch"],
    ] {
        let o = dtorus(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn io_errors_exit_3() {
    let o = dtorus(&["gen", "--d", "3", "--kind", "u", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(code(&o), 3);
    let o = dtorus(&["wigner", "--d", "3", "--state", "file:/nonexistent-dir/psi.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_all_passes_at_d5() {
    let t = table(&dtorus(&["verify", "--d", "5", "--suite", "all", "--tol", "1e-10"]));
    assert!(t.rows.len() > 40);
    assert!(t.column("status").unwrap().iter().all(|c| **c == Cell::Text("pass".into())));
}

#[test]
fn verify_composite_warns_and_passes() {
    let o = dtorus(&["verify", "--d", "4", "--suite", "schwinger"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("reducible"));
}

#[test]
fn verify_qosc_with_samples() {
    let t = table(&dtorus(&["verify", "--d", "7", "--suite", "qosc", "--samples", "200"]));
    assert!(t.rows.iter().any(|r| r[1] == Cell::Text("a_dag_a".into())));
}

#[test]
fn verify_failure_exits_1_and_prints_table() {
    let o = dtorus(&["verify", "--d", "5", "--suite", "wigner", "--tol", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn tolerance_from_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_dtorus"))
            .args(["verify", "--d", "3", "--suite", "wigner"])
            .env("DTORUS_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("0")), 1);
    assert_eq!(code(&run("1e-9")), 0);
}

#[test]
fn wigner_number_state_mass_at_j3() {
    let t = table(&dtorus(&["wigner", "--d", "31", "--state", "fock:3", "--basis", "number-phase"]));
    assert_eq!(t.header, ["J", "theta", "W"]);
    let (j, w) = (floats(&t, "J"), floats(&t, "W"));
    for (j, w) in j.iter().zip(&w) {
        let expect = if *j == 3.0 { 1.0 / TAU } else { 0.0 };
        assert!((w - expect).abs() < 1e-10, "J={j}: {w}");
    }
}

#[test]
fn wigner_u0_marginal() {
    let t = table(&dtorus(&["wigner", "--d", "3", "--state", "u:0", "--basis", "torus"]));
    assert_eq!(t.header, ["V1", "V2", "W"]);
    let (v1, w) = (floats(&t, "V1"), floats(&t, "W"));
    let mut marginal = [0.0; 3];
    for (a, x) in v1.iter().zip(&w) {
        marginal[*a as usize] += x;
    }
    assert!((marginal[0] - 1.0).abs() < 1e-14 && marginal[1].abs() < 1e-14 && marginal[2].abs() < 1e-14);
}

#[test]
fn wigner_decomposition_matches_number_phase_grid() {
    let dec = table(&dtorus(&["wigner", "--d", "5", "--state", "random:42", "--decompose"]));
    assert!(dec.comments.contains(&"seed=42".to_string()));
    let full = table(&dtorus(&["wigner", "--d", "5", "--state", "random:42", "--basis", "number-phase"]));
    let (j, even, odd) = (floats(&dec, "J"), floats(&dec, "W_even"), floats(&dec, "W_odd"));
    let w = floats(&full, "W");
    let integer_rows: Vec<f64> = (0..j.len()).filter(|&k| j[k].fract() == 0.0).map(|k| even[k] + odd[k]).collect();
    assert_eq!(integer_rows.len(), w.len());
    for (a, b) in integer_rows.iter().zip(&w) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    let scale = std::f64::consts::PI / 5.0;
    assert!((even.iter().sum::<f64>() * scale - 1.0).abs() < 1e-10);
    assert!((odd.iter().sum::<f64>() * scale).abs() < 1e-10);
}

#[test]
fn wigner_reads_state_file() {
    let path = scratch("psi.json");
    std::fs::write(&path, r#"{"dim": 3, "amplitudes": [[1,0],[0,0],[0,0]]}"#).unwrap();
    let spec = format!("file:{}", path.display());
    let from_file = stdout(&dtorus(&["wigner", "--d", "3", "--state", &spec]));
    let direct = stdout(&dtorus(&["wigner", "--d", "3", "--state", "u:0"]));
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&from_file), body(&direct));
    assert_eq!(code(&dtorus(&["wigner", "--d", "5", "--state", &spec])), 2);
}

#[test]
fn wigner_json_format() {
    let v = json(&dtorus(&["wigner", "--d", "3", "--state", "v:1", "--format", "json"]));
    assert_eq!(v["columns"], serde_json::json!(["V1", "V2", "W"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn spectrum_d3_example() {
    let t = table(&dtorus(&["spectrum", "--d", "3", "--m", "1,0", "--mp", "0,1"]));
    assert_eq!(t.header, ["n", "f_n", "C", "q_re", "q_im", "m1", "m2", "mp1", "mp2"]);
    let mut f = floats(&t, "f_n");
    f.sort_by(f64::total_cmp);
    for (x, e) in f.iter().zip([0.154701, 1.154701, 2.154701]) {
        assert!((x - e).abs() < 1e-6);
    }
    assert!(floats(&t, "C").iter().all(|c| (c - 2.0 / 3f64.sqrt()).abs() < 1e-14));
}

#[test]
fn index_linear_d5() {
    let v = json(&dtorus(&["index", "--d", "5", "--case", "linear"]));
    let f0 = 5.0 / TAU;
    let expect = (-f0).exp() * (1.0 - (-5f64).exp());
    assert!((v["I"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert!((v["I"].as_f64().unwrap() - 0.448191).abs() < 1e-6);
    assert_eq!(v["D"], 5);
    assert_eq!(v["case"], "linear");
    assert!((v["f0"].as_f64().unwrap() - f0).abs() < 1e-15);
}

#[test]
fn index_cyclic_vanishes() {
    for case in ["unit", "quarter", "qosc"] {
        let v = json(&dtorus(&["index", "--d", "13", "--case", case, "--sign", "minus"]));
        assert!(v["I"].as_f64().unwrap().abs() < 1e-14, "{case}");
    }
}

#[test]
fn transform_quarter_turn_is_fourier() {
    let v = json(&dtorus(&["transform", "--d", "5", "--r", "0,-1,1,0"]));
    assert_eq!(v["R"], serde_json::json!([[0, -1], [1, 0]]));
    assert!(v["fourier_distance"].as_f64().unwrap() < 1e-10);
    assert!(v["unitary_residual"].as_f64().unwrap() < 1e-12);
    let per_m = v["per_m"].as_array().unwrap();
    assert_eq!(per_m.len(), 25);
    assert!(per_m.iter().all(|p| p["residual"].as_f64().unwrap() < 1e-9));
}

#[test]
fn transform_composite_rejected() {
    assert_eq!(code(&dtorus(&["transform", "--d", "4", "--r", "0,-1,1,0"])), 2);
}

#[test]
fn converge_gaussian_sweep() {
    let t = table(&dtorus(&["converge", "--primes", "11,23,47,101", "--observable", "en"]));
    assert_eq!(t.header, ["D", "residual"]);
    assert!(t.comments.contains(&"monotone_decreasing=true".to_string()));
    let r = floats(&t, "residual");
    assert!(r.windows(2).all(|w| w[1] < w[0]));
    let t = table(&dtorus(&["converge", "--primes", "11,23,47", "--observable", "ephi"]));
    assert!(floats(&t, "residual").windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        &["wigner", "--d", "7", "--state", "random:9"][..],
        &["verify", "--d", "3", "--suite", "all", "--seed", "4"],
        &["transform", "--d", "7", "--r", "1,1,0,1"],
        &["converge", "--primes", "11,23", "--observable", "phase-wigner"],
    ] {
        let (a, b) = (dtorus(args), dtorus(args));
        assert_eq!(code(&a), 0, "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
