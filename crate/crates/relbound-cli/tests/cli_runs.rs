//! End-to-end runs of the command surface: file formats, exit codes, and
//! artifact determinism.

use relbound_cli::{
    defect_study, load_defect_config, render_report, verify_maxdeg, DefectStudyConfig, Regime,
    ReportFormat,
};
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relbound"))
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

#[test]
fn analyze_graph_reports_triangle_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("tri.txt");
    write(&edges, "0 1\n1 2\n0 2\n");
    let output = bin().arg("analyze-graph").arg(&edges).output().unwrap();
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(json["max_degree"], 2);
    assert_eq!(json["colors_used"], 3);
    assert_eq!(json["effective_training_size"], 1.5);
    assert_eq!(json["meta"]["generator"], "chacha8/splitmix64");
}

#[test]
fn analyze_graph_rejects_bad_input_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("dup.txt");
    write(&edges, "0 1\n1 0\n");
    let output = bin().arg("analyze-graph").arg(&edges).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    // missing input files are config errors too
    let output = bin()
        .arg("analyze-graph")
        .arg(dir.path().join("absent.txt"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sample_labeler_writes_readable_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write(&spec, r#"{"variant":"regular","n":10,"k":4}"#);
    let out = dir.path().join("edges.txt");
    let status = bin()
        .arg("sample-labeler")
        .arg("--spec")
        .arg(&spec)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let (graph, labels) =
        relbound::graph::read_edge_list(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(labels.is_none());
    assert_eq!(graph.n(), 10);
    assert!(graph.degree_sequence().iter().all(|&d| d == 4));
}

#[test]
fn compute_bounds_evaluates_requests_and_rejects_incomplete_ones() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("req.json");
    write(
        &req,
        r#"[{"bound":"stab-svm","remp":0.0,"b":1.0,"lambda":1.0,"rho":2,"m":100,"delta":0.36787944117144233},
            {"bound":"er-max-degree","n":100,"m":500,"delta":0.1}]"#,
    );
    let output = bin()
        .arg("compute-bounds")
        .arg("--in")
        .arg(&req)
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let total = json["reports"][0]["total"].as_f64().unwrap();
    assert!((total - 0.4642640687119285).abs() < 1e-12);
    let degree = json["reports"][1]["value"].as_f64().unwrap();
    assert!((degree - 24.395577736564242).abs() < 1e-12);

    let bad = dir.path().join("bad.json");
    write(&bad, r#"{"bound":"stab-svm","remp":0.0}"#);
    let output = bin()
        .arg("compute-bounds")
        .arg("--in")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let invalid = dir.path().join("invalid.json");
    write(
        &invalid,
        r#"{"bound":"stab-svm","remp":0.0,"b":1.0,"lambda":1.0,"rho":2,"m":100,"delta":1.5}"#,
    );
    let output = bin()
        .arg("compute-bounds")
        .arg("--in")
        .arg(&invalid)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

fn small_config(regime: Regime) -> DefectStudyConfig {
    DefectStudyConfig {
        regime,
        n: 24,
        m: match regime {
            Regime::Regular => None,
            Regime::Star => Some(23),
            Regime::Er => Some(60),
        },
        k: matches!(regime, Regime::Regular).then_some(4),
        trials: 3,
        d: 2,
        dist: relbound::relations::InstanceDist::GaussianMixture {
            clusters: 2,
            spread: 0.25,
        },
        relation: relbound_cli::RelationKind::Equivalence,
        feature_mode: relbound::relations::FeatureMode::SymmetricAbsdiff,
        lambda: 0.1,
        gamma: 1.0,
        delta: 0.1,
        mc_samples: 500,
        iterations: 2_000,
        master_seed: 11,
        out_dir: None,
    }
}

#[test]
fn defect_study_rows_have_exact_regime_structure() {
    let regular = defect_study(&small_config(Regime::Regular)).unwrap();
    for row in &regular {
        assert_eq!(row.rho, 4); // construction: k-regular
        assert_eq!(row.m, 48);
        assert!(row.bound_er_rad_kernel.is_none());
    }
    let star = defect_study(&small_config(Regime::Star)).unwrap();
    for row in &star {
        assert_eq!(row.rho, row.m);
        assert_eq!(row.effective_size, 1.0);
        assert!(row.bound_stab_svm >= 1.0, "star bound should be vacuous");
    }
    let er = defect_study(&small_config(Regime::Er)).unwrap();
    for row in &er {
        assert!(row.bound_er_rad_kernel.is_some()); // m = 60 >= n/2
        assert!(row.remp_zero_one >= 0.0 && row.remp_zero_one <= 1.0);
        assert!(row.risk_mc >= 0.0 && row.risk_mc <= 1.0);
    }
}

#[test]
fn defect_study_artifacts_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(Regime::Er);
    let rows = defect_study(&config).unwrap();
    relbound_cli::write_defect_artifacts(&config, &rows, &dir.path().join("a")).unwrap();
    let rows2 = defect_study(&config).unwrap();
    relbound_cli::write_defect_artifacts(&config, &rows2, &dir.path().join("b")).unwrap();
    let a = std::fs::read(dir.path().join("a/results.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/results.csv")).unwrap();
    assert_eq!(a, b);
    let ma = std::fs::read(dir.path().join("a/meta.json")).unwrap();
    let mb = std::fs::read(dir.path().join("b/meta.json")).unwrap();
    assert_eq!(ma, mb);
    // CSV header matches the documented column order.
    let text = String::from_utf8(a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        relbound_cli::DEFECT_CSV_COLUMNS.join(",")
    );
    // JSON rendering is also stable.
    assert_eq!(
        render_report(&rows, ReportFormat::Json).unwrap(),
        render_report(&rows2, ReportFormat::Json).unwrap()
    );
}

#[test]
fn defect_study_cli_applies_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let config = small_config(Regime::Er);
    write(&cfg_path, &serde_json::to_string(&config).unwrap());
    let loaded = load_defect_config(
        &cfg_path,
        &["trials=2".to_string(), "dist.spread=0.5".to_string()],
    )
    .unwrap();
    assert_eq!(loaded.trials, 2);
    match loaded.dist {
        relbound::relations::InstanceDist::GaussianMixture { spread, .. } => {
            assert_eq!(spread, 0.5)
        }
        _ => panic!("unexpected dist"),
    }
    // Unknown keys are a config error (exit 2) end to end.
    let out_dir = dir.path().join("out");
    let output = bin()
        .arg("defect-study")
        .arg("--config")
        .arg(&cfg_path)
        .arg("--set")
        .arg("nonsense=1")
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn defect_study_er_ladder_bounds_shrink_with_n() {
    // m = n ln n: the uniform-subsampling bound column is finite and its
    // per-size mean decreases along the ladder.
    let mut previous = f64::INFINITY;
    for n in [50usize, 100, 200, 400] {
        let mut config = small_config(Regime::Er);
        config.n = n;
        config.m = Some((n as f64 * (n as f64).ln()).ceil() as usize);
        config.trials = 2;
        config.iterations = 4_000;
        config.mc_samples = 200;
        let rows = defect_study(&config).unwrap();
        let mean: f64 = rows
            .iter()
            .map(|r| {
                let b = r.bound_er_rad_kernel.expect("m >= n/2 on this ladder");
                assert!(b.is_finite());
                b
            })
            .sum::<f64>()
            / rows.len() as f64;
        assert!(mean < previous, "n={n}: mean bound {mean} vs {previous}");
        previous = mean;
    }
}

#[test]
fn verify_maxdeg_reports_coverage() {
    let result = verify_maxdeg(50, 200, 0.1, 300, 5).unwrap();
    assert!(result.exceed_fraction <= 0.1);
    assert!((result.mean_degree - result.expected_mean_degree).abs() < 0.5);
    assert!(result.bound >= result.expected_mean_degree);
}

#[test]
fn verify_maxdeg_binary_at_reference_size() {
    let output = bin()
        .args([
            "verify-maxdeg",
            "--n",
            "100",
            "--m",
            "500",
            "--delta",
            "0.1",
            "--trials",
            "1000",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(json["exceed_fraction"].as_f64().unwrap() <= 0.1);
    assert!((json["bound"].as_f64().unwrap() - 24.395577736564242).abs() < 1e-9);
    assert!((json["mean_degree"].as_f64().unwrap() - 10.0).abs() < 0.2);
}
