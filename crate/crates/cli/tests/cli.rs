use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_sweep");

/// One design, two short cases.
const SMALL: &str = r#"
seed = 3
[grid]
spacings = [24.0]
plate_heights = [4.5]

[[load_cases]]
wind_speed = 13.9
hs = 3.0
tp = 9.5
weight = 2.0
duration = 1200.0
transient = 200.0

[[load_cases]]
wind_speed = 17.9
hs = 4.3
tp = 10.0
weight = 1.0
duration = 1200.0
transient = 200.0
"#;

fn sweep(args: &[&str]) -> i32 {
    let out = Command::new(BIN).args(args).output().unwrap();
    out.status.code().unwrap()
}

fn config(dir: &Path, body: &str) -> String {
    let p = dir.join("c.toml");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

const DERIVED: [&str; 4] = ["ranked.csv", "weighted_stats.csv", "summary.json", "summary.txt"];

#[test]
fn run_is_deterministic_and_report_recomputes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(sweep(&["run", "--config", &cfg, "--out", a.to_str().unwrap(), "--jobs", "1"]), 0);
    assert_eq!(sweep(&["run", "--config", &cfg, "--out", b.to_str().unwrap()]), 0);
    for f in ["case_stats.csv", "design_space.csv", "centerline.csv", "umin.csv", "ranked.csv", "summary.json", "designs/d24.0_h4.5.json"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
    let summary = read(&a.join("summary.txt"));
    assert!(summary.contains("d24.0_h4.5"), "{summary}");
    for f in ["ranked.csv", "case_stats.csv", "gains/d24.0_h4.5.json"] {
        assert!(read(&a.join(f)).contains("hullsweep/"), "{f} lacks a schema");
    }

    let before: Vec<String> = DERIVED.iter().map(|f| read(&a.join(f))).collect();
    for f in DERIVED {
        fs::remove_file(a.join(f)).unwrap();
    }
    assert_eq!(sweep(&["report", "--in", a.to_str().unwrap()]), 0);
    for (f, old) in DERIVED.iter().zip(&before) {
        assert_eq!(&read(&a.join(f)), old, "{f}");
    }
}

#[test]
fn seed_override_changes_only_time_domain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(sweep(&["run", "--config", &cfg, "--mode", "both", "--out", a.to_str().unwrap()]), 0);
    assert_eq!(sweep(&["run", "--config", &cfg, "--mode", "both", "--seed", "9", "--out", b.to_str().unwrap()]), 0);
    let rows = |p: &Path, src: &str| -> Vec<String> {
        read(&p.join("case_stats.csv")).lines().filter(|l| l.contains(&format!(",{src},"))).map(String::from).collect()
    };
    assert_eq!(rows(&a, "time").len(), 16);
    assert_eq!(rows(&a, "freq"), rows(&b, "freq"));
    assert_ne!(rows(&a, "time"), rows(&b, "time"));
    assert!(read(&a.join("weighted_stats.csv")).contains(",time,"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    let bad_key = config(dir.path(), "sede = 1\n");
    assert_eq!(sweep(&["run", "--config", &bad_key, "--out", o]), 2);
    let good = config(dir.path(), SMALL);
    assert_eq!(sweep(&["run", "--config", &good, "--out", o, "--designs", "d=24..15"]), 2);
    assert_eq!(sweep(&["run", "--config", &good, "--out", o, "--jobs", "0"]), 2);
    assert_eq!(sweep(&["run", "--config", "/nonexistent.toml"]), 2);
    assert_eq!(sweep(&["report", "--in", dir.path().to_str().unwrap()]), 2);
    assert!(!out.exists());
}

#[test]
fn infeasible_grid_writes_headers_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("o");
    assert_eq!(sweep(&["run", "--config", &cfg, "--designs", "d=5", "--out", out.to_str().unwrap()]), 1);
    let ranked = read(&out.join("ranked.csv"));
    assert_eq!(ranked.lines().count(), 2, "{ranked}");
    assert!(read(&out.join("design_space.csv")).contains("d5.0_h4.5,5.0,4.5,false"));
    assert_eq!(read(&out.join("case_stats.csv")).lines().count(), 2);
    assert!(read(&out.join("summary.txt")).contains("no ranked designs"));
}

#[test]
fn extreme_merges_into_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let body = format!("output_dir = {:?}\nextreme_seeds = 1\n{SMALL}", out.to_str().unwrap());
    let cfg = config(dir.path(), &body);
    assert_eq!(sweep(&["run", "--config", &cfg]), 0);
    assert_eq!(sweep(&["extreme", "--config", &cfg]), 0);
    let ext = read(&out.join("extreme.csv"));
    assert_eq!(ext.lines().count(), 3, "{ext}");
    let ranked = read(&out.join("ranked.csv"));
    let row = ranked.lines().nth(2).unwrap();
    assert!(!row.contains(",,,ok"), "extreme columns empty: {row}");
}
