use std::path::Path;
use std::process::{Command, Output};

fn halfball(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_halfball"));
    c.args(args).arg("--out").arg(out);
    if let Some(p) = config {
        c.arg("--config").arg(p);
    }
    c.env_remove("HALFBALL_CONFIG")
        .env_remove("HALFBALL_OUT")
        .env_remove("HALFBALL_SEED")
        .env_remove("HALFBALL_THREADS")
        .env_remove("HALFBALL_TOL_OVERRIDE");
    c.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn is_empty_dir(p: &Path) -> bool {
    !p.exists() || std::fs::read_dir(p).unwrap().next().is_none()
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    for (i, text) in [
        "{ not json",
        r#"{"experiment": "stokes", "unknown_key": 1}"#,
        r#"{"experiment": "stokes", "deltas": [0.1, 0.2]}"#,
        r#"{"experiment": "stokes", "dimension": 5}"#,
        r#"{"experiment": "helmholtz"}"#,
        r#"{"experiment": "stokes", "kernel": {"family": "fractional", "beta": 2.5}}"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(tmp.path(), &format!("bad{i}.json"), text);
        let o = halfball(&["stokes"], Some(&cfg), &out);
        assert_eq!(
            o.status.code(),
            Some(2),
            "case {i}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(is_empty_dir(&out), "case {i} wrote outputs");
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = halfball(
        &["stokes"],
        Some(&tmp.path().join("absent.json")),
        &tmp.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_threads_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = halfball(&["stokes", "--threads", "0"], None, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(is_empty_dir(&out));
}

#[test]
fn bad_override_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = halfball(
        &["stokes", "--tol-override", "quad.nope=1"],
        None,
        &tmp.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stokes_writes_csv_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "small.json",
        r#"{"experiment": "stokes", "bound": 4, "samples": 2, "deltas": [0.2], "seed": 4}"#,
    );
    let out = tmp.path().join("out");
    let o = halfball(&["stokes"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
    let csv = std::fs::read_to_string(out.join("small.csv")).unwrap();
    assert!(csv.starts_with("delta,sample,momentum"));
    assert!(!csv.contains('\r'));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("small.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "stokes");
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["seed"], 4);
    assert!(summary["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn seed_flag_and_env_change_the_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "s.json",
        r#"{"experiment": "stokes", "bound": 4, "samples": 1, "deltas": [0.2]}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    halfball(&["stokes", "--seed", "1"], Some(&cfg), &a);
    halfball(&["stokes", "--seed", "2"], Some(&cfg), &b);
    let o = Command::new(env!("CARGO_BIN_EXE_halfball"))
        .args(["stokes", "--out"])
        .arg(&c)
        .env("HALFBALL_CONFIG", &cfg)
        .env("HALFBALL_SEED", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let read = |d: &Path| std::fs::read(d.join("s.csv")).unwrap();
    assert_ne!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
}

#[test]
fn symbol_cache_round_trip_keeps_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let text = format!(
        r#"{{"experiment": "helmholtz", "cases": [{{"dimension": 2, "bound": 6}}], "samples": 2, "deltas": [0.2],
            "output": {{"cache_dir": {:?}}}}}"#,
        cache.to_string_lossy()
    );
    let cfg = write(tmp.path(), "h.json", &text);
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    assert!(halfball(&["helmholtz"], Some(&cfg), &first).status.success());
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert!(halfball(&["helmholtz"], Some(&cfg), &second).status.success());
    assert_eq!(
        std::fs::read(first.join("h.csv")).unwrap(),
        std::fs::read(second.join("h.csv")).unwrap()
    );
}

#[test]
fn every_preset_parses_for_its_subcommand() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let cfg = halfball_cli::ExperimentConfig::load(&p).unwrap();
        let sub = cfg.experiment.clone().expect("presets name their subcommand");
        cfg.validate(&sub).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert!(n >= 12);
}
