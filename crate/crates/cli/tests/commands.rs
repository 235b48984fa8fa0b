mod support;

use support::*;

#[test]
fn gen_writes_matrix_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data.csv");
    mlcap_ok(&["gen", "--n", "5000", "--m", "3", "--rho", "1,2,0.68", "--seed", "7", "--out", path_str(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c1,c2,c3");
    assert_eq!(lines.len(), 5001);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("data.spec.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 7);
    assert_eq!(sidecar["targets"][0]["criteria"], serde_json::json!([1, 2]));
    let sample = sidecar["targets"][0]["sample_rho"].as_f64().unwrap();
    assert!((sample - 0.68).abs() <= 0.02);
}

#[test]
fn gen_rejects_empty_sample() {
    let out = mlcap(&["gen", "--n", "0", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be at least 1"));
}

#[test]
fn gen_rejects_bad_targets() {
    assert_eq!(mlcap(&["gen", "--n", "10", "--m", "3", "--rho", "1,4,0.5"]).status.code(), Some(2));
    assert_eq!(mlcap(&["gen", "--n", "10", "--m", "3", "--rho", "1,2,1.5"]).status.code(), Some(2));
    assert_eq!(mlcap(&["gen", "--n", "10", "--m", "3", "--rho", "1,2"]).status.code(), Some(2));
}

#[test]
fn generated_matrix_round_trips() {
    let out = mlcap_ok(&["gen", "--n", "50", "--m", "4", "--rho", "2,3,-0.5", "--seed", "3"]);
    let text = stdout(&out);
    let parsed = mlcap::io::read_matrix(text.as_bytes(), false).unwrap();
    let mut again = Vec::new();
    mlcap::io::write_matrix(&mut again, &parsed).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
}

#[test]
fn rank_students_with_weights_and_capacity() {
    let data = fixture("students.csv");
    let (h, rows) = read_csv(&stdout(&mlcap_ok(&["rank", "--data", path_str(&data)])));
    assert_eq!(column(&h, &rows, "position"), ["1", "3", "2"]);
    assert_eq!(column(&h, &rows, "label"), ["Student 1", "Student 2", "Student 3"]);

    let explicit = stdout(&mlcap_ok(&["rank", "--data", path_str(&data), "--weights", "0.5,0.25,0.25"]));
    let (h, rows) = read_csv(&explicit);
    let first: f64 = column(&h, &rows, "overall")[0].parse().unwrap();
    assert!((first - (0.5 + 0.94 / 4.0 + 0.67 / 4.0)).abs() < 1e-12);

    for capacity in ["students_capacity.json", "students_capacity_exact.json"] {
        let out = mlcap_ok(&["rank", "--data", path_str(&data), "--capacity", path_str(&fixture(capacity))]);
        let (h, rows) = read_csv(&stdout(&out));
        assert_eq!(column(&h, &rows, "position"), ["2", "3", "1"], "{capacity}");
    }
}

#[test]
fn rank_single_alternative() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("one.csv");
    std::fs::write(&data, "a,b,c\n0.2,0.5,0.9\n").unwrap();
    let (h, rows) = read_csv(&stdout(&mlcap_ok(&["rank", "--data", path_str(&data)])));
    assert_eq!(column(&h, &rows, "position"), ["1"]);
}

#[test]
fn rank_rejects_invalid_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"m":3,"ordering":"paper-list","values":[0,0.5,0.3,0.3,0.4,0.7,0.7,1]}"#).unwrap();
    let out = mlcap(&["rank", "--data", path_str(&fixture("students.csv")), "--capacity", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("monotonicity"));
}

#[test]
fn rank_rejects_out_of_range_data_unless_scaled() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("raw.csv");
    std::fs::write(&data, "name,price,speed\nx,120,3\ny,80,5\nz,100,4\n").unwrap();
    assert_eq!(mlcap(&["rank", "--data", path_str(&data)]).status.code(), Some(2));
    let (h, rows) = read_csv(&stdout(&mlcap_ok(&["rank", "--data", path_str(&data), "--min-max"])));
    assert_eq!(column(&h, &rows, "overall"), ["0.5", "0.5", "0.5"]);
    assert_eq!(column(&h, &rows, "position"), ["1", "1", "1"]);
}

fn correlated_data(dir: &std::path::Path) -> std::path::PathBuf {
    let data = dir.join("data.csv");
    mlcap_ok(&["gen", "--n", "5000", "--m", "3", "--rho", "1,2,0.68", "--seed", "7", "--out", path_str(&data)]);
    data
}

#[test]
fn sobol_reports_empirical_and_analytic_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = correlated_data(dir.path());
    let capacity = dir.path().join("additive.json");
    std::fs::write(
        &capacity,
        r#"{"m":3,"ordering":"paper-list","values":[0,0.3333333333333333,0.3333333333333333,0.3333333333333333,0.6666666666666666,0.6666666666666666,0.6666666666666666,1]}"#,
    )
    .unwrap();
    let out = mlcap_ok(&["sobol", "--data", path_str(&data), "--capacity", path_str(&capacity), "--orders", "1,2"]);
    let (h, rows) = read_csv(&stdout(&out));
    assert_eq!(h, ["subset", "order", "raw", "normalized", "estimator", "n"]);
    assert_eq!(rows.len(), 12);
    let value = |subset: &str, estimator: &str| -> f64 {
        rows.iter().find(|r| r[0] == subset && r[4] == estimator).unwrap()[2].parse().unwrap()
    };
    let (e1, a1) = (value("1", "empirical-slices"), value("1", "analytic-banzhaf"));
    let (e3, a3) = (value("3", "empirical-slices"), value("3", "analytic-banzhaf"));
    assert!(e1 > 2.0 * a1, "{e1} vs {a1}");
    assert!((e3 - a3).abs() < 0.15 * a3, "{e3} vs {a3}");
    assert!(rows.iter().all(|r| r[3].is_empty()));

    // The analytic rows are the squared interaction indices over 12^|A|.
    let mu: mlcap::Capacity = mlcap::io::read_json(&capacity).unwrap();
    let ib = mu.banzhaf();
    for r in rows.iter().filter(|r| r[4] == "analytic-banzhaf") {
        let subset = mlcap::Subset::parse_label(&r[0]).unwrap();
        let expected = ib[subset] * ib[subset] / 12f64.powi(subset.cardinality() as i32);
        assert_eq!(r[2].parse::<f64>().unwrap(), expected);
    }
}

#[test]
fn sobol_on_constant_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("flat.csv");
    std::fs::write(&data, "a,b,c\n0.3,0.6,0.1\n0.3,0.6,0.1\n0.3,0.6,0.1\n0.3,0.6,0.1\n").unwrap();
    let out = mlcap_ok(&["sobol", "--data", path_str(&data), "--weights", "0.2,0.3,0.5", "--orders", "1,2"]);
    let (h, rows) = read_csv(&stdout(&out));
    let empirical: Vec<&Vec<String>> = rows.iter().filter(|r| r[4] == "empirical-slices").collect();
    assert_eq!(empirical.len(), 6);
    assert!(empirical.iter().all(|r| r[2] == "0"), "{h:?} {rows:?}");
    // Normalizing by a zero output variance is a numerical failure.
    let out = mlcap(&["sobol", "--data", path_str(&data), "--weights", "0.2,0.3,0.5", "--normalize"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn identify_reports_redundancy_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = correlated_data(dir.path());
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    let summary = dir.path().join("summary.txt");
    mlcap_ok(&[
        "identify",
        "--data",
        path_str(&data),
        "--seed",
        "5",
        "--out",
        path_str(&first),
        "--summary",
        path_str(&summary),
    ]);
    mlcap_ok(&["identify", "--data", path_str(&data), "--seed", "5", "--out", path_str(&second)]);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    let text = std::fs::read_to_string(&summary).unwrap();
    assert!(text.contains("redundant pairs: c1-c2"), "{text}");
    assert!(text.contains("complementary pairs: c1-c3, c2-c3"), "{text}");

    let result: mlcap::IdentificationResult = mlcap::io::read_json(&first).unwrap();
    let ib = &result.interactions;
    assert!(ib.power_index(2) > ib.power_index(0).max(ib.power_index(1)));
    assert_eq!(result.seed, 5);
}

#[test]
fn identify_on_independent_data_is_near_additive() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("iid.csv");
    mlcap_ok(&["gen", "--n", "5000", "--m", "3", "--seed", "12", "--out", path_str(&data)]);
    let out = mlcap_ok(&["identify", "--data", path_str(&data)]);
    let result: mlcap::IdentificationResult = serde_json::from_slice(&out.stdout).unwrap();
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        assert!(result.interactions.pair(j, k).abs() <= 0.05);
    }
}

#[test]
fn identify_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = correlated_data(dir.path());
    // No monotone completion for this singleton value.
    let out = mlcap(&["identify", "--data", path_str(&data), "--singleton", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    let flat = dir.path().join("flat.csv");
    std::fs::write(&flat, "a,b,c\n0.5,0.5,0.5\n0.5,0.5,0.5\n").unwrap();
    let out = mlcap(&["identify", "--data", path_str(&flat), "--normalize"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"gen": {"n": 10, "m": 2, "seed": 4, "rho": ["1,2,0.5"]}, "rank": {"weights": "1,0"}}"#)
        .unwrap();
    let from_file = stdout(&mlcap_ok(&["--config", path_str(&config), "gen"]));
    assert_eq!(from_file.lines().count(), 11);
    let flag_wins = stdout(&mlcap_ok(&["--config", path_str(&config), "gen", "--n", "20"]));
    assert_eq!(flag_wins.lines().count(), 21);
    let explicit = stdout(&mlcap_ok(&["gen", "--n", "10", "--m", "2", "--seed", "4", "--rho", "1,2,0.5"]));
    assert_eq!(from_file, explicit);

    let data = dir.path().join("data.csv");
    std::fs::write(&data, from_file).unwrap();
    let (h, rows) = read_csv(&stdout(&mlcap_ok(&["--config", path_str(&config), "rank", "--data", path_str(&data)])));
    let matrix = mlcap::io::read_matrix_file(&data, false).unwrap();
    let overall: Vec<f64> = column(&h, &rows, "overall").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(overall, matrix.column(0).collect::<Vec<_>>());

    std::fs::write(&config, r#"{"gen": {"n": 10, "bogus": 1}}"#).unwrap();
    assert_eq!(mlcap(&["--config", path_str(&config), "gen", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn experiment_writes_summaries_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let args = |extra: &[&'static str]| {
        let mut v =
            vec!["experiment", "--out-dir", path_str(&out), "--runs", "3", "--n-grid", "300,600", "--seed", "9"];
        v.extend_from_slice(extra);
        v.into_iter().map(str::to_string).collect::<Vec<_>>()
    };
    let run = |a: Vec<String>| mlcap_ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    run(args(&["--gnuplot"]));
    let summary = std::fs::read_to_string(out.join("rho_p0.75.csv")).unwrap();
    let (h, rows) = read_csv(&summary);
    assert_eq!(h.len(), 14);
    assert_eq!(column(&h, &rows, "n"), ["300", "600"]);
    assert_eq!(column(&h, &rows, "runs"), ["3", "3"]);
    assert!(out.join("rho_0.csv").exists() && out.join("rho_m0.75.csv").exists());
    assert!(std::fs::read_to_string(out.join("plot.gp")).unwrap().contains("rho_p0.75.csv"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["completed"], 18);
    assert_eq!(manifest["complete"], true);

    // Simulate an interruption: drop some run files and the summaries.
    let runs: Vec<_> = std::fs::read_dir(out.join("runs")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(runs.len(), 18);
    for p in runs.iter().step_by(3) {
        std::fs::remove_file(p).unwrap();
    }
    std::fs::remove_file(out.join("rho_p0.75.csv")).unwrap();
    run(args(&["--resume", "--jobs", "2"]));
    assert_eq!(std::fs::read_to_string(out.join("rho_p0.75.csv")).unwrap(), summary);

    // A different experiment cannot resume into the same directory.
    let mut other = args(&["--resume"]);
    other[6] = "10".into();
    let out_status = mlcap(&other.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out_status.status.code(), Some(2));
}

#[test]
fn experiment_rejects_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let status = mlcap(&["experiment", "--out-dir", path_str(&out), "--n-grid", "500,100"]).status;
    assert_eq!(status.code(), Some(2));
    let status = mlcap(&["experiment", "--out-dir", path_str(&out), "--runs", "0"]).status;
    assert_eq!(status.code(), Some(2));
}
