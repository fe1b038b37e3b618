use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ergoshift-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergoshift"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn classify_fibonacci() {
    let out = out_dir("classify");
    let o = run(&["classify", "--matrix", "[[1,1],[1,0]]"], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["measured"]["tag"], "ErgodicBilateral");
    assert_eq!(r["config"]["arithmetic"], "exact");
    assert_eq!(r["passed"], true);
}

#[test]
fn bad_input_exits_2() {
    let out = out_dir("bad");
    assert_eq!(run(&["classify", "--matrix", "[[1,2,3],[4,5,6]]"], &out).status.code(), Some(2));
    assert_eq!(run(&["classify", "--matrix", "[[1,1],[1,0]]", "--float"], &out).status.code(), Some(2));
    assert_eq!(run(&["walsh", "--indices=1,-2"], &out).status.code(), Some(2), "randomized without a seed");
    assert_eq!(run(&["delta", "--matrix", "[[2,1],[1,1]]"], &out).status.code(), Some(2), "unimodular");
    assert_eq!(run(&["rate", "--system", "toral"], &out).status.code(), Some(2), "missing matrix");
    assert_eq!(run(&[], &out).status.code(), Some(2));
}

#[test]
fn precision_exhaustion_exits_3() {
    let out = out_dir("precision");
    let args = ["rate", "--system", "toral", "--matrix", "[[2,1],[1,1]]", "--float", "--seed", "1", "--n-max", "4096"];
    let o = run(&args, &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn laguerre_rate_writes_csv() {
    let out = out_dir("laguerre");
    let o = run(&["rate", "--system", "laguerre", "--degree", "0", "--n-max", "1024"], &out);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("rate.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,deviation,weighted"));
    assert_eq!(lines.count(), 10);
    let r = report(&out);
    assert_eq!(r["config"]["params"]["eta"], 0.5);
    assert_eq!(r["config"]["params"]["x"], "1");
    assert_eq!(r["outputs"][0], "rate.csv");
}

#[test]
fn config_file_and_flag_override() {
    let out = out_dir("config");
    std::fs::create_dir_all(&out).unwrap();
    let cfg = out.join("run.toml");
    std::fs::write(&cfg, "kind = \"witness\"\nn = 3\nh = [5, 50]\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()], &out.join("a"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out.join("a"));
    assert_eq!(r["config"]["params"]["n"], 3);
    let o = run(&["witness", "--config", cfg.to_str().unwrap(), "--n", "7"], &out.join("b"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out.join("b"))["config"]["params"]["n"], 7);
    std::fs::write(&cfg, "kind = \"witness\"\nunknown = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()], &out.join("c")).status.code(), Some(2));
    assert_eq!(run(&["classify", "--config", cfg.to_str().unwrap()], &out.join("c")).status.code(), Some(2));
}

#[test]
fn seeded_runs_are_reproducible() {
    let (a, b) = (out_dir("seed-a"), out_dir("seed-b"));
    let args = ["discrepancy", "--matrix", "[[2,1],[1,1]]", "--domain", "disk", "--seed", "11", "--n-max", "2048"];
    assert_eq!(run(&args, &a).status.code(), Some(0));
    assert_eq!(run(&args, &b).status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("discrepancy.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn quick_suite_is_deterministic_and_catches_the_negative_control() {
    let (a, b) = (out_dir("suite-a"), out_dir("suite-b"));
    assert_eq!(run(&["suite", "quick"], &a).status.code(), Some(0));
    assert_eq!(run(&["suite", "quick"], &b).status.code(), Some(0));
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let csvs: Vec<_> = names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")).collect();
    assert!(!csvs.is_empty());
    for n in csvs {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?}");
    }
    let c = out_dir("suite-neg");
    assert_eq!(run(&["suite", "quick", "--negative-control"], &c).status.code(), Some(1));
}
