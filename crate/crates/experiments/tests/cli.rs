use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_koopman-approx"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"))
}

fn run_into(name: &str, out: &Path, threads: usize) -> Output {
    bin()
        .env("RAYON_NUM_THREADS", threads.to_string())
        .arg("run")
        .arg(config(name))
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    for name in ["ac-domination", "edmd-erm-equivalence", "probability-preservation"] {
        let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
        for (dir, threads) in dirs.iter().zip([1, 4, 4]) {
            assert_eq!(code(&run_into(name, dir.path(), threads)), 0, "{name}");
        }
        let csv: Vec<Vec<u8>> = dirs.iter().map(|d| std::fs::read(d.path().join(format!("{name}.csv"))).unwrap()).collect();
        assert_eq!(csv[0], csv[1], "{name}: 1 vs 4 threads");
        assert_eq!(csv[1], csv[2], "{name}: repeat run");
    }
}

#[test]
fn seed_override_changes_random_experiments() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_into("probability-preservation", a.path(), 2)), 0);
    let o = bin()
        .args(["run", config("probability-preservation").to_str().unwrap(), "--seed", "99", "--trials", "20", "--out"])
        .arg(b.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(b.path().join("probability-preservation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert_ne!(csv, std::fs::read_to_string(a.path().join("probability-preservation.csv")).unwrap());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(b.path().join("probability-preservation.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], 99);
    assert_eq!(json["config"]["trials"], 20);
}

#[test]
fn list_names_every_experiment() {
    let o = bin().arg("list").output().unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    for name in ["haar-projection-rate", "ifs-contraction", "equilibrated-edmd"] {
        assert!(text.contains(name));
    }
}

#[test]
fn check_reads_back_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_into("not-pm-counterexample", dir.path(), 1)), 0);
    let report = dir.path().join("not-pm-counterexample.json");
    let o = bin().arg("check").arg(&report).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().lines().all(|l| l.starts_with("PASS")));

    // flip one verdict and the check must fail
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    json["acceptance"][0]["passed"] = false.into();
    std::fs::write(&report, json.to_string()).unwrap();
    assert_eq!(code(&bin().arg("check").arg(&report).output().unwrap()), 1);
}

#[test]
fn failing_acceptance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    std::fs::write(
        &cfg,
        r#"{ "schema": 1, "experiment": "haar-projection-rate", "seed": 1, "levels": [2, 8], "tolerances": { "closed_form": 1e-9 } }"#,
    )
    .unwrap();
    let o = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
    assert!(dir.path().join("haar-projection-rate.csv").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let cases = [
        write("unknown.json", r#"{ "schema": 1, "experiment": "no-such-thing", "seed": 1 }"#),
        write("schema.json", r#"{ "schema": 7, "experiment": "haar-projection-rate", "seed": 1 }"#),
        write("noseed.json", r#"{ "schema": 1, "experiment": "haar-projection-rate" }"#),
        write("extra.json", r#"{ "schema": 1, "experiment": "haar-projection-rate", "seed": 1, "colour": "red" }"#),
        write("range.json", r#"{ "schema": 1, "experiment": "haar-projection-rate", "seed": 1, "levels": [5, 2] }"#),
        write("broken.json", "{ not json"),
        dir.path().join("missing.json"),
    ];
    for cfg in &cases {
        let o = bin().arg("run").arg(cfg).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(code(&o), 2, "{}: {}", cfg.display(), String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&bin().output().unwrap()), 2);
    assert_eq!(code(&bin().args(["run"]).output().unwrap()), 2);
    assert_eq!(code(&bin().args(["frobnicate"]).output().unwrap()), 2);
    assert_eq!(code(&bin().args(["run", "x.json", "--seed", "minus-one"]).output().unwrap()), 2);
    assert_eq!(code(&bin().arg("check").arg(dir.path().join("missing.json")).output().unwrap()), 2);
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = bin().arg("run").arg(config("not-pm-counterexample")).arg("--out").arg(blocker.join("sub")).output().unwrap();
    assert_eq!(code(&o), 1);
}
