use std::path::Path;
use std::process::Command;

use magicbias::config::{ExperimentConfig, Plan};
use magicbias::figures::write_figures;
use magicbias::sweep::{
    read_rows, run_sweep, sidecar_path, SweepOptions, COLUMNS, CSV_VERSION_LINE,
};
use magicbias::Error;

const QUIET: SweepOptions = SweepOptions {
    force: false,
    quiet: true,
};

fn config(output: &Path, order: usize, workers: usize, eta: &str) -> String {
    format!(
        r#"
schema_version = 1
order = {order}
output = "{}"
workers = {workers}
record_runtime = false

[[run]]
flags = "SMIE"
sets = ["Z", "X"]
p = [1e-3, 5e-3]
eta = {eta}

[[run]]
flags = "MIE"
sets = ["M"]
p = [5e-3]
eta = ["depol", 100]
"#,
        output.display()
    )
}

fn plan(text: &str) -> Plan {
    ExperimentConfig::parse(text).unwrap().plan().unwrap()
}

#[test]
fn grids_expand_sorted_with_markers() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(&config(
        &dir.path().join("a.csv"),
        1,
        1,
        r#"{ from = 1, to = 100, points = 3, include = ["depol", "inf", 10] }"#,
    ));
    assert_eq!(p.jobs.len(), 2);
    assert_eq!(p.jobs[0].etas, vec![0.25, 1.0, 10.0, 100.0, f64::INFINITY]);
    assert_eq!(p.jobs[0].ps, vec![1e-3, 5e-3]);
    assert_eq!(p.points(), 2 * 5 * 2 + 2);
}

#[test]
fn schema_errors_name_the_field() {
    let bad = |text: &str| match ExperimentConfig::parse(text).and_then(|c| c.plan()) {
        Err(Error::Config(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    };
    let base =
        "schema_version = 1\noutput = \"x.csv\"\n[[run]]\nflags = \"SMIE\"\nsets = [\"Z\"]\n";
    assert!(bad(&format!("{base}p = []\neta = [1]\n")).contains("run[0].p"));
    assert!(bad(&format!("{base}p = [0.2]\neta = [1]\n")).contains("(0, 0.1]"));
    assert!(bad(&format!("{base}p = [1e-3]\neta = [\"lots\"]\n")).contains("run[0].eta"));
    assert!(bad(&format!("{base}p = [1e-3]\neta = [1]\nbogus = 3\n")).contains("line"));
    assert!(bad("schema_version = 2\noutput = \"x\"\nrun = []\n").contains("schema_version"));
    assert!(bad("schema_version = 1\noutput = \"x\"\nrun = []\n").contains("run"));
    let text = format!("{base}p = [1e-3]\neta = [1]\n").replace(
        "[\"Z\"]",
        "[{ name = \"A\", generators = [\"X1\", \"Z1\"] }]",
    );
    assert!(bad(&text).contains("run[0].sets[0]"));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    run_sweep(&plan(&config(&a, 2, 1, "[0.25, 10, \"inf\"]")), &QUIET).unwrap();
    run_sweep(&plan(&config(&b, 2, 0, "[0.25, 10, \"inf\"]")), &QUIET).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(sidecar_path(&a)).unwrap(),
        std::fs::read(sidecar_path(&b)).unwrap()
    );
    let text = std::fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
    assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
}

#[test]
fn resume_matches_a_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let (fresh, resumed) = (dir.path().join("fresh.csv"), dir.path().join("resumed.csv"));
    run_sweep(&plan(&config(&fresh, 1, 1, "[0.25, 10, \"inf\"]")), &QUIET).unwrap();
    // an interrupted run that got through part of the first grid
    run_sweep(&plan(&config(&resumed, 1, 1, "[0.25]")), &QUIET).unwrap();
    let s = run_sweep(
        &plan(&config(&resumed, 1, 1, "[0.25, 10, \"inf\"]")),
        &QUIET,
    )
    .unwrap();
    assert!(s.skipped > 0 && s.written > 0);
    // row order differs, content must not (NaN biases compare as text)
    let sorted = |p: &Path| {
        let mut l: Vec<String> = std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(str::to_string)
            .collect();
        l.sort();
        l
    };
    assert_eq!(sorted(&fresh), sorted(&resumed));
    let b = read_rows(&resumed).unwrap();
    let again = run_sweep(
        &plan(&config(&resumed, 1, 1, "[0.25, 10, \"inf\"]")),
        &QUIET,
    )
    .unwrap();
    assert_eq!((again.written, again.enumerations), (0, 0));
    let lines = std::fs::read_to_string(sidecar_path(&resumed))
        .unwrap()
        .lines()
        .count();
    assert_eq!(lines, b.len());
}

#[test]
fn points_shared_between_runs_are_written_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dup.csv");
    let text = config(&out, 1, 1, "[0.25, 100]").replace(
        "flags = \"MIE\"\nsets = [\"M\"]",
        "flags = \"SMIE\"\nsets = [\"Z\"]",
    );
    let p = plan(&text);
    run_sweep(&p, &QUIET).unwrap();
    // the second run's points all appear in the first
    assert_eq!(read_rows(&out).unwrap().len(), 2 * 2 * 2);
}

#[test]
fn expensive_runs_need_force() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let mut p = plan(&config(&out, 1, 1, "[1]"));
    p.max_seconds = 0.0;
    assert!(matches!(
        run_sweep(&p, &QUIET),
        Err(Error::TooExpensive { .. })
    ));
    assert!(!out.exists());
    run_sweep(
        &p,
        &SweepOptions {
            force: true,
            quiet: true,
        },
    )
    .unwrap();
    assert!(out.exists());
}

#[test]
fn figure_files_tag_depolarizing_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    run_sweep(&plan(&config(&out, 1, 1, "[\"depol\", 10]")), &QUIET).unwrap();
    let figs = dir.path().join("figs");
    let files = write_figures(&out, &figs, 5e-3).unwrap();
    let names: Vec<_> = files
        .iter()
        .map(|f| f.file_name().unwrap().to_str().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "infidelity_vs_p.csv",
            "z_bias_by_set.csv",
            "x_bias.csv",
            "ablation_mie.csv"
        ]
    );
    let zb = std::fs::read_to_string(figs.join("z_bias_by_set.csv")).unwrap();
    assert!(
        zb.lines()
            .any(|l| l.starts_with("Z,0.25,") && l.ends_with(",1")),
        "{zb}"
    );
    assert!(zb
        .lines()
        .any(|l| l.starts_with("Z,10,") && l.ends_with(",0")));
    let before: Vec<_> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
    write_figures(&out, &figs, 5e-3).unwrap();
    let after: Vec<_> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn figures_reject_empty_or_malformed_tables() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(
        &empty,
        format!("{CSV_VERSION_LINE}\n{}\n", COLUMNS.join(",")),
    )
    .unwrap();
    assert!(write_figures(&empty, dir.path(), 5e-3).is_err());
    let missing = dir.path().join("missing.csv");
    std::fs::write(&missing, "set,eta,p\nZ,1,0.005\n").unwrap();
    match write_figures(&missing, dir.path(), 5e-3) {
        Err(Error::Config(m)) => assert!(m.contains("missing column flags"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn foreign_output_file_is_not_appended_to() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("other.csv");
    std::fs::write(&out, "a,b\n1,2\n").unwrap();
    assert!(matches!(
        run_sweep(&plan(&config(&out, 1, 1, "[1]")), &QUIET),
        Err(Error::Config(_))
    ));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_magicbias"))
}

#[test]
fn cli_verify_and_errors() {
    let v = bin().arg("verify").output().unwrap();
    assert!(v.status.success(), "{}", String::from_utf8_lossy(&v.stdout));
    let text = String::from_utf8(v.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    assert!(text.contains("order-1 fault tolerance"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "schema_version = 1\noutput = \"x.csv\"\n[[run]]\nflags = \"SMIE\"\nsets = [\"Z\"]\np = []\neta = [1]\n").unwrap();
    let s = bin().arg("sweep").arg(&cfg).output().unwrap();
    assert_eq!(s.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&s.stderr).contains("run[0].p"));
}

#[test]
fn cli_single_and_workers_env() {
    let out = bin()
        .args([
            "single", "--set", "Z1,X2", "--eta", "depol", "--p", "1e-3", "--order", "1", "--flags",
            "MI",
        ])
        .env("MAGICBIAS_WORKERS", "1")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["set"], "Z1+X2");
    assert_eq!(v["eta"], "0.25");
    assert_eq!(v["tallies"].as_object().unwrap().len(), 24);
    let bad = bin()
        .args(["single", "--eta", "1"])
        .env("MAGICBIAS_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
