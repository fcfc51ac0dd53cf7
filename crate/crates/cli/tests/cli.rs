//! End-to-end tests driving the compiled `homsim` binary.

use std::path::Path;
use std::process::{Command, Output};

use homsim::engine::JointDistribution;

fn homsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(args: &[&str]) -> String {
    let out = homsim(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout should be UTF-8")
}

fn exit_code(args: &[&str]) -> i32 {
    homsim(args).status.code().expect("no exit code")
}

/// Parse the dist CSV body into (ma, mb, probability) triples.
fn parse_grid_csv(text: &str) -> Vec<(usize, usize, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ma,mb,probability"));
    lines
        .map(|line| {
            let mut cells = line.split(',');
            let ma = cells.next().unwrap().parse().unwrap();
            let mb = cells.next().unwrap().parse().unwrap();
            let p = cells.next().unwrap().parse().unwrap();
            assert!(cells.next().is_none());
            (ma, mb, p)
        })
        .collect()
}

#[test]
fn vacuum_pair_yields_the_single_unit_row() {
    let csv = stdout_of(&["dist", "--in1", "fock:0", "--in2", "fock:0"]);
    assert_eq!(csv, "ma,mb,probability\n0,0,1.0000000000000000e0\n");
}

#[test]
fn two_two_grid_has_the_quarter_coincidence() {
    let csv = stdout_of(&["dist", "--in1", "fock:2", "--in2", "fock:2"]);
    let rows = parse_grid_csv(&csv);
    assert_eq!(rows.len(), 25);
    let p22 = rows
        .iter()
        .find(|(ma, mb, _)| *ma == 2 && *mb == 2)
        .unwrap()
        .2;
    assert!((p22 - 0.25).abs() < 1e-12);
}

#[test]
fn one_photon_coherent_diagonal_rows_are_zero() {
    let csv = stdout_of(&["dist", "--in1", "fock:1", "--in2", "coherent:3"]);
    let rows = parse_grid_csv(&csv);
    let mut diagonal_rows = 0usize;
    for (ma, mb, p) in rows {
        if ma == mb {
            assert!(p < 1e-30, "P({ma},{mb}) = {p:.3e}");
            diagonal_rows += 1;
        }
    }
    assert!(diagonal_rows > 30, "only {diagonal_rows} diagonal rows");
}

#[test]
fn usage_parse_capacity_and_validation_exit_codes() {
    // Unparseable state spec.
    assert_eq!(exit_code(&["dist", "--in1", "fock:abc", "--in2", "fock:0"]), 2);
    // Missing required input spec.
    assert_eq!(exit_code(&["dist", "--in2", "fock:0"]), 2);
    // Angle outside [0, pi].
    assert_eq!(
        exit_code(&["dist", "--in1", "fock:1", "--in2", "fock:1", "--theta", "4.0"]),
        2
    );
    // Certificate has no CSV form.
    assert_eq!(exit_code(&["diagrams", "--n", "1", "--m", "1", "--format", "csv"]), 2);
    // Tail bound forces the thermal cutoff past the photon capacity.
    assert_eq!(
        exit_code(&[
            "dist", "--in1", "fock:1", "--in2", "thermal:9", "--epsilon", "1e-12",
        ]),
        3
    );
}

#[test]
fn non_normalized_grid_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"coeffs": [[[0.5, 0.0]]]}"#).unwrap();
    let spec = format!("pure-grid:@{}", path.display());
    assert_eq!(exit_code(&["dist", "--in1", &spec]), 4);
}

#[test]
fn json_grid_reparses_bit_identically() {
    let text = stdout_of(&[
        "dist", "--in1", "fock:1", "--in2", "coherent:2", "--format", "json",
    ]);
    let parsed = JointDistribution::from_json_str(&text).unwrap();
    assert_eq!(parsed.to_json_string(), text.trim_end());
}

#[test]
fn identical_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = path.to_str().unwrap();
        stdout_of(&[
            "dist", "--in1", "fock:1", "--in2", "thermal:2.5", "--out", out,
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn perfect_detectors_do_not_change_the_csv() {
    let bare = stdout_of(&["dist", "--in1", "fock:1", "--in2", "coherent:2"]);
    let ideal = stdout_of(&[
        "dist", "--in1", "fock:1", "--in2", "coherent:2", "--eta1", "1", "--eta2", "1",
    ]);
    assert_eq!(bare, ideal);
}

#[test]
fn lossy_detectors_fill_the_coincidence_diagonal() {
    let csv = stdout_of(&[
        "coincidence", "--in1", "fock:1", "--in2", "coherent:3", "--eta1", "0.5", "--eta2",
        "0.5",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,probability"));
    let p1: f64 = lines
        .nth(1) // skip n=0, take n=1
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(p1 > 1e-3, "P_eta(1,1) = {p1:.3e}");
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(
        &config,
        "in1 = fock:1\nin2 = fock:1\ntheta = 0.0\n# identity splitter\n",
    )
    .unwrap();
    let cfg = config.to_str().unwrap();

    // theta = 0 passes both photons straight through: P(1,1) = 1.
    let csv = stdout_of(&["dist", "--config", cfg]);
    let rows = parse_grid_csv(&csv);
    let p11 = rows
        .iter()
        .find(|(ma, mb, _)| *ma == 1 && *mb == 1)
        .unwrap()
        .2;
    assert_eq!(p11, 1.0);

    // An explicit flag overrides the config angle: balanced splitter,
    // coincidence gone.
    let csv = stdout_of(&["dist", "--config", cfg, "--theta", "1.5707963267948966"]);
    let rows = parse_grid_csv(&csv);
    let p11 = rows
        .iter()
        .find(|(ma, mb, _)| *ma == 1 && *mb == 1)
        .unwrap()
        .2;
    assert!(p11 < 1e-14);

    // Unknown keys are rejected loudly.
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "tilt = 0.2\n").unwrap();
    assert_eq!(
        exit_code(&["dist", "--in1", "fock:0", "--config", bad.to_str().unwrap()]),
        2
    );
}

#[test]
fn sum_table_prints_exact_integers() {
    let csv = stdout_of(&["sum-table", "--max-n", "2", "--max-m", "2"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines,
        vec!["n,m,sum", "0,0,1", "0,2,2", "1,1,0", "2,0,2", "2,2,-2"]
    );
}

#[test]
fn conventions_agree_on_the_hom_zero() {
    let csv = stdout_of(&[
        "conventions", "--n", "1", "--m", "1", "--p", "1", "--q", "1",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "convention,magnitude");
    for line in &lines[1..] {
        assert!(line.ends_with(",0.0000000000000000e0"), "line: {line}");
    }
}

#[test]
fn efficiency_scan_has_one_row_per_eta_and_n() {
    let csv = stdout_of(&[
        "efficiency", "--in1", "fock:1", "--in2", "coherent:1", "--etas", "0,0.5,1", "--ns",
        "1,2",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eta,n,prob");
    assert_eq!(lines.len(), 1 + 3 * 2);
    // Perfect detection keeps the interference null.
    assert_eq!(lines[5], "1,1,0.0000000000000000e0");
}

fn read_dir_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn figure1_writes_grids_and_deterministic_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let summary = stdout_of(&["figure1", "--out", out]);
    assert!(summary.contains("n=0"));
    assert!(summary.contains("central_nodal_line=yes"));
    assert!(summary.contains("central_nodal_line=no"));
    assert_eq!(
        read_dir_names(dir.path()),
        vec![
            "figure1_coherent_meta.json",
            "figure1_coherent_n0.json",
            "figure1_coherent_n1.json",
            "figure1_coherent_n3.json",
        ]
    );

    // Grid files re-parse, and the dim-odd inputs show the nodal line.
    let n1 = std::fs::read_to_string(dir.path().join("figure1_coherent_n1.json")).unwrap();
    let dist = JointDistribution::from_json_str(&n1).unwrap();
    assert!(dist.cnl_metric().unwrap().is_central_nodal_line());

    // A second run reproduces every byte, sidecar included.
    let again = tempfile::tempdir().unwrap();
    stdout_of(&["figure1", "--out", again.path().to_str().unwrap()]);
    for name in read_dir_names(dir.path()) {
        assert_eq!(
            std::fs::read(dir.path().join(&name)).unwrap(),
            std::fs::read(again.path().join(&name)).unwrap(),
            "{name} differs between runs"
        );
    }
}

#[test]
fn figure1_honors_the_output_dir_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(["figure1", "--kind", "thermal", "--n-list", "2", "--format", "csv"])
        .env("HOMSIM_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        read_dir_names(dir.path()),
        vec!["figure1_thermal_meta.json", "figure1_thermal_n2.csv"]
    );
}
