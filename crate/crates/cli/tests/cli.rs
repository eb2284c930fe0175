use std::path::Path;
use std::process::{Command, Output};

fn scorekeeper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scorekeeper"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn p(dir: &Path, f: &str) -> String {
    dir.join(f).to_string_lossy().into_owned()
}

const FLAGS: [(&str, &[&str]); 11] = [
    ("ingest", &["--data-dir", "--out"]),
    ("extract", &["--bundle-dir", "--out"]),
    ("fit-team", &["--box", "--ratio", "--out"]),
    ("fit-contextual", &["--pa", "--lambda-grid", "--folds", "--seed", "--out"]),
    ("validate", &["--pa", "--spec", "--folds", "--seed", "--lambda", "--out"]),
    ("adjust", &["--fit", "--pa", "--out", "--method"]),
    ("bonus", &["--fit", "--pa", "--out", "--distributions"]),
    ("stability", &["--fits", "--groups", "--out"]),
    ("synth", &["--truth", "--games", "--seed", "--plant", "--out"]),
    ("recover", &["--truth", "--fit", "--out"]),
    ("print-config", &[]),
];

#[test]
fn help_documents_every_flag() {
    for (cmd, flags) in FLAGS {
        let out = scorekeeper(&[cmd, "--help"]);
        assert!(out.status.success(), "{cmd}");
        let text = String::from_utf8(out.stdout).unwrap();
        for f in flags.iter().chain(&["--config", "--threads"]) {
            assert!(text.contains(f), "{cmd} --help does not mention {f}");
        }
    }
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(scorekeeper(&["extract", "--bogus"]).status.code(), Some(64));
    assert_eq!(scorekeeper(&[]).status.code(), Some(64));
    assert_eq!(scorekeeper(&["validate", "--pa", "x", "--spec", "everything"]).status.code(), Some(64));
}

#[test]
fn missing_input_exits_66() {
    let dir = tempfile::tempdir().unwrap();
    let out = scorekeeper(&["extract", "--bundle-dir", &p(dir.path(), "nowhere"), "--out", &p(dir.path(), "pa.csv")]);
    assert_eq!(out.status.code(), Some(66));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));
}

#[test]
fn invalid_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw");
    scorekeeper::synth::worked_play_fixture().write(&raw).unwrap();
    let events = raw.join("events.csv");
    let text = std::fs::read_to_string(&events).unwrap();
    std::fs::write(&events, text.replace("DRIBBLE", "JUGGLE")).unwrap();
    let out = scorekeeper(&["ingest", "--data-dir", &p(dir.path(), "raw"), "--out", &p(dir.path(), "b")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 42, "validate_folds": 5}"#).unwrap();
    let out = scorekeeper(&["print-config", "--config", &cfg.to_string_lossy()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["validate_folds"], 5);
    assert_eq!(v["fit_folds"], 10);
    std::fs::write(&cfg, r#"{"seeed": 1}"#).unwrap();
    assert_eq!(scorekeeper(&["print-config", "--config", &cfg.to_string_lossy()]).status.code(), Some(2));
}

#[test]
fn team_fit_interpolates_a_four_row_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let box_csv = dir.path().join("box.csv");
    std::fs::write(
        &box_csv,
        "game_id,date,team_id,opp_id,is_home,fgm,fga,ast,blk\n\
         g1,2015-01-01,AAA,BBB,true,40,80,24,5\n\
         g1,2015-01-01,BBB,AAA,false,36,84,18,3\n\
         g2,2015-01-03,BBB,AAA,true,38,82,25,6\n\
         g2,2015-01-03,AAA,BBB,false,41,85,20,4\n",
    )
    .unwrap();
    let fit_path = dir.path().join("fit.json");
    let out = scorekeeper(&["fit-team", "--box", &box_csv.to_string_lossy(), "--ratio", "ar", "--out", &fit_path.to_string_lossy()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fit = scorekeeper::regress::ModelFit::load(&fit_path).unwrap();
    let lines = scorekeeper::ingest::read_box_lines(&box_csv).unwrap();
    let obs: Vec<_> = scorekeeper::ingest::ratios_from_box(&lines)
        .unwrap()
        .observations
        .into_iter()
        .filter(|o| o.kind == scorekeeper::RatioKind::Ar)
        .collect();
    assert_eq!(obs.len(), 4);
    // four observations, rank four: least squares reproduces each ratio
    for o in &obs {
        let expected = match (o.game_id.as_str(), o.team.as_str()) {
            ("g1", "AAA") => 24.0 / 40.0,
            ("g1", "BBB") => 18.0 / 36.0,
            ("g2", "BBB") => 25.0 / 38.0,
            _ => 20.0 / 41.0,
        };
        assert!((o.value - expected).abs() < 1e-12);
        assert!((fit.predict_ratio(o) - expected).abs() < 1e-9);
    }
    assert!((fit.diagnostics.r_squared.unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn intercept_validation_is_the_majority_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(scorekeeper(&["synth", "--games", "60", "--seed", "4", "--out", &p(d, "raw")]).status.success());
    assert!(scorekeeper(&["extract", "--bundle-dir", &p(d, "raw"), "--out", &p(d, "pa.csv")]).status.success());
    let out = scorekeeper(&["validate", "--pa", &p(d, "pa.csv"), "--spec", "intercept", "--out", &p(d, "m.json")]);
    assert!(out.status.success());
    let pas = scorekeeper::report::read_potential_assists(&d.join("pa.csv")).unwrap();
    let rate = pas.iter().filter(|r| r.label_recorded_assist).count() as f64 / pas.len() as f64;
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    let mis = m["misclassification"].as_f64().unwrap();
    assert!((mis - rate.min(1.0 - rate)).abs() <= 0.005, "{mis} vs {rate}");
}

#[test]
fn planted_coefficient_reaches_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = scorekeeper(&["synth", "--games", "2", "--seed", "1", "--plant", "sk_bias:UTA=-0.8", "--out", &p(d, "raw")]);
    assert!(out.status.success());
    let truth = scorekeeper::synth::GroundTruth::load(&d.join("raw/ground_truth.json")).unwrap();
    assert_eq!(truth.coefficients["sk_bias"]["UTA"], -0.8);
    let bad = scorekeeper(&["synth", "--games", "2", "--plant", "sk_bias-UTA", "--out", &p(d, "x")]);
    assert_eq!(bad.status.code(), Some(64));
}
