//! End-to-end tests of the compiled binary: argument handling, output
//! formats, and exit codes (0 ok, 1 failed check, 2 bad precondition,
//! 3 unreadable input).

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_env(args, &[], &[])
}

fn run_with_env(args: &[&str], set: &[(&str, &str)], unset: &[&str]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_latproj"));
    cmd.args(args);
    for (k, v) in set {
        cmd.env(k, v);
    }
    for k in unset {
        cmd.env_remove(k);
    }
    let out = cmd.output().expect("binary should run");
    (
        out.status.code().expect("no exit code (killed by signal?)"),
        String::from_utf8(out.stdout).expect("stdout should be utf-8"),
        String::from_utf8(out.stderr).expect("stderr should be utf-8"),
    )
}

/// Value after `label` on the matching stdout line.
fn field(stdout: &str, label: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(label))
        .unwrap_or_else(|| panic!("no line starting with {:?} in:\n{}", label, stdout))
        .trim()
        .to_string()
}

#[test]
fn approximate_emits_the_exact_hexagonal_report() {
    let (code, stdout, _) = run(&[
        "approximate",
        "--source",
        "Zn:3",
        "--target",
        "hex",
        "--k",
        "1",
        "--w",
        "10",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("stdout should be JSON");
    assert_eq!(report["k"], serde_json::json!(1));
    assert_eq!(report["w"], serde_json::json!(10));
    assert_eq!(report["v"], serde_json::json!([[1.0, -10.0, 75.0]]));
    assert_eq!(report["a_coeff"], serde_json::json!([["1", "-10", "75"]]));
    assert_eq!(report["h_w"], serde_json::json!([["1", "0"], ["8", "1"]]));
    assert_eq!(report["h_w_det"], serde_json::json!("1"));
    let gram_error = report["gram_error"].as_f64().unwrap();
    assert!((gram_error - 0.1).abs() < 1e-15, "gram_error {}", gram_error);
    // |V|^2 = 1 + 100 + 5625, and the projection determinant is its inverse
    let det = report["projection_det"].as_f64().unwrap();
    assert!((det - 1.0 / 5726.0).abs() < 1e-15, "projection_det {}", det);
    assert_eq!(report["projection_gram"].as_array().unwrap().len(), 2);
}

#[test]
fn approximate_out_flag_writes_the_file_and_keeps_stdout_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, stdout, _) = run(&[
        "approximate",
        "--source",
        "Zn:3",
        "--target",
        "hex",
        "--k",
        "1",
        "--w",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty(), "stdout should be empty: {:?}", stdout);
    let text = std::fs::read_to_string(&path).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["w"], serde_json::json!(100));
}

#[test]
fn approximate_rejects_an_impossible_rank_split() {
    // k = 3 leaves no rank for the target inside a rank-3 source
    let (code, _, stderr) = run(&[
        "approximate",
        "--source",
        "Zn:3",
        "--target",
        "hex",
        "--k",
        "3",
        "--w",
        "10",
    ]);
    assert_eq!(code, 2, "stderr: {}", stderr);
    assert!(stderr.starts_with("error:"), "stderr: {}", stderr);
}

#[test]
fn approximate_rejects_w_zero() {
    let (code, _, stderr) = run(&[
        "approximate",
        "--source",
        "Zn:3",
        "--target",
        "hex",
        "--k",
        "1",
        "--w",
        "0",
    ]);
    assert_eq!(code, 2, "stderr: {}", stderr);
}

#[test]
fn sweep_csv_has_the_documented_header_and_a_leading_na_slope() {
    let (code, stdout, _) = run(&[
        "sweep",
        "--source",
        "Zn:3",
        "--target",
        "hex",
        "--k",
        "1",
        "--w-list",
        "10,100,1000",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        lines[0],
        "w,gram_error,primal_error,V_maxnorm,density_gap,slope_so_far"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("10,"));
    assert!(lines[1].ends_with(",NA"), "first row: {}", lines[1]);
    assert!(!lines[2].ends_with(",NA"), "second row: {}", lines[2]);
    // every data row has six comma-separated fields
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 6, "row: {}", row);
    }
    // the running slope on the last row sits in the slow-regime range
    let slope: f64 = lines[3].rsplit(',').next().unwrap().parse().unwrap();
    assert!((-0.7..=-0.3).contains(&slope), "slope {}", slope);
}

#[test]
fn sweep_rejects_bad_w_lists() {
    let base = ["sweep", "--source", "Zn:3", "--target", "hex", "--k", "1"];
    let with = |wl: &str| {
        let mut args = base.to_vec();
        args.push("--w-list");
        args.push(wl);
        run(&args)
    };

    let (code, _, _) = with("10,100"); // too few
    assert_eq!(code, 2);
    let (code, _, _) = with("10,10,100"); // not strictly increasing
    assert_eq!(code, 2);
    let (code, _, _) = with("10,100,ten"); // unparsable
    assert_eq!(code, 3);
}

#[test]
fn verify_accepts_a_primitive_vector() {
    let (code, stdout, _) = run(&[
        "verify",
        "--source",
        "Zn:3",
        "--vector",
        "1,-10,75",
    ]);
    assert_eq!(code, 0, "stdout: {}", stdout);
    assert!(stdout.contains("set is primitive (minor gcd 1)"));
    assert!(stdout.contains("PASS discriminant identity"));
    assert!(stdout.contains("PASS dual of projection"));
    assert!(stdout.contains("all 2 checks passed"));
}

#[test]
fn verify_rejects_a_non_primitive_vector() {
    let (code, _, stderr) = run(&["verify", "--source", "Zn:3", "--vector", "2,4,6"]);
    assert_eq!(code, 2);
    assert!(
        stderr.contains("set is not primitive (minor gcd 2)"),
        "stderr: {}",
        stderr
    );
}

#[test]
fn verify_rejects_a_vector_outside_the_lattice() {
    let (code, _, stderr) = run(&["verify", "--source", "Zn:3", "--vector", "0.5,0,0"]);
    assert_eq!(code, 2, "stderr: {}", stderr);
}

#[test]
fn verify_random_suite_passes_over_all_k() {
    let (code, stdout, _) = run(&["verify", "--source", "Zn:4", "--seed", "3"]);
    assert_eq!(code, 0, "stdout: {}", stdout);
    // k = 1, 2, 3, five instances each, two checks per instance
    assert!(stdout.contains("all 30 checks passed"), "stdout: {}", stdout);
    assert!(!stdout.contains("FAIL"), "stdout: {}", stdout);
}

#[test]
fn svp_reports_the_hexagonal_minimum_and_density() {
    let (code, stdout, _) = run(&["svp", "--source", "hex"]);
    assert_eq!(code, 0);
    assert_eq!(field(&stdout, "rank:"), "2");
    // this presentation has minimal squared norm 4/3
    assert_eq!(field(&stdout, "norm_sq:"), "1.333333333333e+00");
    // 1 / (2 sqrt 3), independent of scale
    assert_eq!(field(&stdout, "center_density:"), "2.886751345948e-01");
}

#[test]
fn svp_cap_is_eight_unless_the_environment_raises_it() {
    let (code, _, stderr) = run_with_env(
        &["svp", "--source", "Zn:9"],
        &[],
        &["LATPROJ_MAX_SVP_DIM"],
    );
    assert_eq!(code, 2, "stderr: {}", stderr);
    assert!(stderr.contains("exceeds"), "stderr: {}", stderr);

    let (code, stdout, stderr) = run_with_env(
        &["svp", "--source", "Zn:9"],
        &[("LATPROJ_MAX_SVP_DIM", "10")],
        &[],
    );
    assert_eq!(code, 0, "stderr: {}", stderr);
    assert_eq!(field(&stdout, "norm_sq:"), "1.000000000000e+00");
    assert!(stderr.contains("may be slow"), "stderr: {}", stderr);
}

#[test]
fn density_sees_the_two_hexagonal_presentations_as_equal() {
    // An* at n = 2 is the hexagonal lattice up to similarity
    let (code, stdout, _) = run(&["density", "--source", "hex", "--target", "An*:2"]);
    assert_eq!(code, 0);
    let gap: f64 = field(&stdout, "density_gap:").parse().unwrap();
    assert!(gap < 1e-12, "gap {}", gap);
}

#[test]
fn density_of_the_checkerboard_lattice_is_an_eighth() {
    let (code, stdout, _) = run(&["density", "--source", "Dn:4"]);
    assert_eq!(code, 0);
    assert_eq!(field(&stdout, "source_density:"), "1.250000000000e-01");
}

#[test]
fn lattice_files_load_with_exact_entries_taking_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scaled.json");
    std::fs::write(
        &path,
        r#"{
  "name": "stretched grid",
  "generator": [[2.0, 0.0], [0.0, 2.9]],
  "exact": [["2", "0"], ["0", "3"]]
}
"#,
    )
    .unwrap();
    let (code, stdout, _) = run(&["svp", "--source", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(field(&stdout, "norm_sq:"), "4.000000000000e+00");
}

#[test]
fn unreadable_sources_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"generator\": [[1, 2],").unwrap();
    let (code, _, stderr) = run(&["svp", "--source", path.to_str().unwrap()]);
    assert_eq!(code, 3, "stderr: {}", stderr);

    let missing = dir.path().join("nothing.json");
    let (code, _, _) = run(&["svp", "--source", missing.to_str().unwrap()]);
    assert_eq!(code, 3);

    let (code, _, _) = run(&["svp", "--source", "Zn:0"]);
    assert_eq!(code, 3);
}

#[test]
fn help_exits_cleanly_and_names_the_builtins() {
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Zn:"), "help: {}", stdout);
    assert!(stdout.contains("hex"), "help: {}", stdout);

    let (code, _, _) = run(&["--version"]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["approximate", "--source", "Zn:3"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&[]);
    assert_eq!(code, 2);
}
