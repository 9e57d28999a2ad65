use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qaoa_lab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qaoa-lab"));
    cmd.args(args).env_remove("QAOA_LAB_OUT");
    if let Some(p) = env_out {
        cmd.env("QAOA_LAB_OUT", p);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

const SMALL: [&str; 6] = ["--classes", "three_regular,geometric", "--per-class", "2", "--nodes", "6"];

#[test]
fn generate_benchmark_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let mut args = vec!["generate", "--out", d];
    args.extend(SMALL);
    ok(&qaoa_lab(&args, None));
    assert_eq!(fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap().lines().count(), 4);

    let mut args = vec!["benchmark", "--out", d, "--budget", "300", "--workers", "2"];
    args.extend(SMALL);
    let out = qaoa_lab(&args, None);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("16 runs executed"));
    let meta = fs::read_to_string(dir.path().join("metadata.csv")).unwrap();
    assert_eq!(meta.lines().count(), 5);
    assert!(meta.lines().next().unwrap().contains("kappa_qibpi"));

    // rerun reuses every cell
    let out = qaoa_lab(&args, None);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 runs executed, 16 reused"));

    let out = qaoa_lab(&["report", "--out", d, "--landscapes", "--resolution", "7"], None);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Median kappa per class"));
    assert!(dir.path().join("report/summary.md").exists());
    assert!(dir.path().join("report/scatter.svg").exists());
    assert!(dir.path().join("report/landscapes/geometric.svg").exists());
}

#[test]
fn strategy_subset_and_generate_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let mut args = vec!["benchmark", "--generate", "--out", d, "--budget", "200", "--strategies", "random,tqa"];
    args.extend(SMALL);
    ok(&qaoa_lab(&args, None));
    let header = fs::read_to_string(dir.path().join("metadata.csv")).unwrap().lines().next().unwrap().to_string();
    assert!(header.contains("kappa_random") && header.contains("kappa_tqa"));
    assert!(!header.contains("kappa_qibpi"));
}

#[test]
fn env_var_overrides_out_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let mut args = vec!["generate", "--out", flag_dir.path().to_str().unwrap()];
    args.extend(SMALL);
    ok(&qaoa_lab(&args, Some(env_dir.path())));
    assert!(env_dir.path().join("manifest.jsonl").exists());
    assert!(!flag_dir.path().join("manifest.jsonl").exists());
}

#[test]
fn median_table_command() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "median-table",
        "--out",
        dir.path().to_str().unwrap(),
        "--classes",
        "three_regular",
        "--per-class",
        "3",
        "--nodes",
        "6",
        "--layers",
        "2",
        "--budget",
        "500",
        "--restarts",
        "1",
        "--workers",
        "1",
    ];
    ok(&qaoa_lab(&args, None));
    let text = fs::read_to_string(dir.path().join("median_table.json")).unwrap();
    assert_eq!(qaoa_lab::MedianParamTable::from_json(&text).unwrap().len(), 2);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();

    let out = qaoa_lab(&["benchmark", "--out", d], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = qaoa_lab(&["generate", "--out", d, "--classes", "hypercube"], None);
    assert!(!out.status.success());

    let out = qaoa_lab(&["generate", "--out", d, "--nodes", "40"], None);
    assert!(!out.status.success());

    let out = qaoa_lab(&["report", "--out", d], None);
    assert!(!out.status.success());

    // layers with no table entry: every qibpi cell fails
    let mut args = vec!["benchmark", "--generate", "--out", d, "--layers", "2", "--strategies", "qibpi"];
    args.extend(SMALL);
    let out = qaoa_lab(&args, None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("qibpi"));
}
