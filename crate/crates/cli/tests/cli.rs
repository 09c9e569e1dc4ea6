use std::io::Write;
use std::process::{Command, Output};

fn belltime(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_belltime"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("BELLTIME_THREADS", t),
        None => cmd.env_remove("BELLTIME_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chsh_defaults_pass() {
    let o = belltime(&["chsh", "--pairs", "100"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# belltime "));
    assert!(text.contains("kind,i,j,alpha,beta,value,reference,abs_error\n"));
    assert!(text.contains("CHSH value equals 2√2 PASS"));
}

#[test]
fn json_output_has_metadata_and_rows() {
    let o = belltime(&["spreading", "--format", "json", "--seed", "9"], None);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metadata"]["subcommand"], "spreading");
    assert_eq!(v["metadata"]["seed"], 9);
    assert!(v["metadata"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(v["rows"][0]["t"], 0.0);
}

#[test]
fn same_seed_same_bytes_across_threads() {
    let args = ["lhv-simulate", "--model", "random", "--models", "3", "--n", "20000", "--seed", "11"];
    let a = belltime(&args, Some("1"));
    let b = belltime(&args, Some("3"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = belltime(&["lhv-simulate", "--model", "random", "--models", "3", "--n", "20000", "--seed", "12"], Some("1"));
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_then_flags() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# vacuum sweep\npoints = 5\ncluster = false\nseed = 4").unwrap();
    let path = f.path().to_str().unwrap();
    let o = belltime(&["vacuum", "--config", path], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("# seed: 4\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("w0,")).count(), 5);
    assert!(!text.contains("connected,"));

    let o = belltime(&["vacuum", "--config", path, "--points", "3"], None);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("w0,")).count(), 3);
}

#[test]
fn preset_alias_and_override() {
    let a = belltime(&["--preset", "chsh-paper", "--pairs", "10"], None);
    let b = belltime(&["chsh", "--preset", "chsh-optimal", "--pairs", "10"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"preset\":\"chsh-optimal\""));
}

#[test]
fn out_file_and_timing_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = belltime(&["feasibility", "--out", out.to_str().unwrap()], None);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("critical,"));
    let timing: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.csv.timing.json")).unwrap()).unwrap();
    assert_eq!(timing["subcommand"], "feasibility");
    assert!(String::from_utf8_lossy(&o.stderr).contains("feasibility: "));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["nope"][..],
        &["chsh", "--pairs", "many"],
        &["--preset", "unknown"],
        &["vacuum", "--preset", "product-representation"],
        &["gfactor", "--center1", "1,2"],
    ] {
        let o = belltime(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(belltime(&["spreading"], Some("zero")).status.code(), Some(2));
}

#[test]
fn failed_check_exits_1_with_record() {
    // g above 1/2 has no cosine model: an input error, not a failed check
    let o = belltime(&["lhv-simulate", "--g", "0.7"], None);
    assert_eq!(o.status.code(), Some(2));
    // below s·m ≈ 1 the power-law term dominates and the fitted rate misses m
    let o = belltime(&["vacuum", "--cluster", "false", "--fit-min", "0.01", "--fit-max", "0.2"], None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    let record = err.lines().find(|l| l.contains("failed_checks")).expect("failure record");
    let v: serde_json::Value = serde_json::from_str(record).unwrap();
    assert_eq!(v["subcommand"], "vacuum");
    assert!(!v["failed_checks"].as_array().unwrap().is_empty());
}
