use std::process::{Command, Output};

use teleport_core::protocols::ProtocolId;
use teleport_core::sweep::{self, SweepMode};
use teleport_core::{Execution, InputQubit};

fn teleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teleport"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn run_prints_summary() {
    let o = teleport(&["run", "--protocol", "group1", "--n", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("corrected_success  0.400000000000"), "{s}");
    assert!(s.contains("formula            0.4"), "{s}");
}

#[test]
fn odd_standard_network_has_no_direct_success() {
    let o = teleport(&[
        "run",
        "--protocol",
        "net_standard",
        "--n",
        "0.7",
        "--q",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows[0][column(&h, "direct")], "0");
    let diff: f64 = rows[0][column(&h, "abs_diff")].parse().unwrap();
    assert!(diff < 1e-12);
}

#[test]
fn validation_errors_exit_2() {
    let o = teleport(&["run", "--protocol", "group1", "--n", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n out of range"));
    assert!(o.stdout.is_empty());

    let o = teleport(&["run", "--protocol", "teleport_all", "--n", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for id in ProtocolId::ALL {
        assert!(e.contains(id.name()), "{e}");
    }

    let o = teleport(&[
        "run",
        "--protocol",
        "group1",
        "--n",
        "0.5",
        "--alpha-re",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = teleport(&[
        "run",
        "--protocol",
        "net_matched",
        "--n",
        "0.5",
        "--q",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn sweep_writes_formula_checked_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g1.csv");
    let o = teleport(&[
        "sweep",
        "--protocol",
        "group1",
        "--n-step",
        "0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let (h, rows) = csv_rows(&text);
    assert_eq!(
        h,
        [
            "n",
            "q",
            "direct",
            "corrected",
            "formula",
            "abs_diff",
            "p_hat",
            "std_err"
        ]
    );
    let got: Vec<f64> = rows
        .iter()
        .map(|r| r[column(&h, "corrected")].parse().unwrap())
        .collect();
    for (g, want) in got.iter().zip([0.0, 0.4, 1.0]) {
        assert!((g - want).abs() < 1e-12);
    }
    // MC columns stay empty in exact mode
    assert!(rows.iter().all(|r| r[column(&h, "p_hat")].is_empty()));
}

#[test]
fn sweep_csv_round_trips() {
    let o = teleport(&[
        "sweep",
        "--protocol",
        "net_matched",
        "--q",
        "4",
        "--n-step",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&stdout(&o));
    let grid = sweep::n_grid(0.0, 1.0, 0.1).unwrap();
    let lib = sweep::sweep(
        ProtocolId::NetMatched,
        &grid,
        Some(4),
        &InputQubit::default(),
        SweepMode::Exact,
        None,
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(rows.len(), lib.len());
    for (r, l) in rows.iter().zip(&lib) {
        let f = |name: &str| -> f64 { r[column(&h, name)].parse().unwrap() };
        assert_eq!(f("n").to_bits(), l.n.to_bits());
        assert_eq!(f("direct").to_bits(), l.direct.unwrap().to_bits());
        assert_eq!(f("corrected").to_bits(), l.corrected.unwrap().to_bits());
        assert_eq!(f("formula").to_bits(), l.formula.unwrap().to_bits());
    }
}

#[test]
fn standard_network_beats_matched_at_fifteen() {
    let run = |name: &str| {
        let o = teleport(&[
            "sweep",
            "--protocol",
            name,
            "--q",
            "15",
            "--mode",
            "formula",
            "--n-step",
            "0.02",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let (h, rows) = csv_rows(&stdout(&o));
        rows.iter()
            .map(|r| r[column(&h, "corrected")].parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let (standard, matched) = (run("net_standard"), run("net_matched"));
    assert_eq!(standard.len(), 51);
    for (s, m) in standard.iter().zip(&matched) {
        assert!(s >= m, "{s} < {m}");
    }
}

#[test]
fn degenerate_grid_gives_one_row() {
    let o = teleport(&[
        "sweep",
        "--protocol",
        "group2",
        "--n-start",
        "0.3",
        "--n-stop",
        "0.3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0.3");
}

#[test]
fn noise_adds_a_column() {
    let o = teleport(&[
        "sweep",
        "--protocol",
        "group1",
        "--n-step",
        "0.5",
        "--eps-b",
        "0.9",
        "--eps-u",
        "0.8",
    ]);
    let (h, rows) = csv_rows(&stdout(&o));
    let noisy: f64 = rows[1][column(&h, "noisy")].parse().unwrap();
    assert!((noisy - 0.72 * 0.4).abs() < 1e-15);
}

#[test]
fn unwritable_output_exits_1() {
    let o = teleport(&[
        "sweep",
        "--protocol",
        "group1",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_mirrors_report_fields() {
    let o = teleport(&[
        "run",
        "--protocol",
        "par_ghz3",
        "--n",
        "0.4",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in [
        "protocol_name",
        "params",
        "direct_success",
        "corrected_success",
        "total_probability",
        "branch_count",
        "step_success",
        "entanglement_consumed",
        "expected",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v.get("branches").is_none());

    let o = teleport(&[
        "run",
        "--protocol",
        "par_ghz3",
        "--n",
        "0.4",
        "--format",
        "json",
        "--branches",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v["branches"].as_array().unwrap().len() as u64,
        v["branch_count"].as_u64().unwrap()
    );
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let args = [
        "run",
        "--protocol",
        "group3",
        "--n",
        "0.6",
        "--mode",
        "mc",
        "--samples",
        "20000",
        "--seed",
        "5",
        "--format",
        "csv",
    ];
    let (a, b) = (teleport(&args), teleport(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (h, rows) = csv_rows(&stdout(&a));
    let z: f64 = rows[0][column(&h, "z_score")].parse().unwrap();
    assert!(z < 4.0);
}

#[test]
fn verify_suites_pass() {
    for suite in ["bases", "distill", "bounds"] {
        let o = teleport(&["verify", "--suite", suite, "--q-max", "50"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    }
}

#[test]
fn bases_dump_amplitudes() {
    let o = teleport(&["bases", "--basis", "ghz4", "--m", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(h, ["label", "index", "bits", "re", "im"]);
    assert_eq!(rows.len(), 16 * 16);
    let a_plus: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "A+")
        .map(|r| r[3].parse().unwrap())
        .collect();
    let norm = 1.0 / 1.25f64.sqrt();
    assert!((a_plus[0] - norm).abs() < 1e-15);
    assert!((a_plus[15] - 0.5 * norm).abs() < 1e-15);

    let o = teleport(&["bases", "--basis", "ghz3", "--m", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
