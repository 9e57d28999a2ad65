use qaoa_lab::eval::{read_metadata_csv, Label};
use qaoa_lab::pipeline::*;
use qaoa_lab::strategies::{collect_optima, median_params, MedianTableConfig};
use qaoa_lab::{AdamConfig, InstanceClass, StrategyTag};
use std::fs;
use std::io::Write;
use std::path::Path;

fn small(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        classes: vec![InstanceClass::ThreeRegular, InstanceClass::Geometric, InstanceClass::UniformRandom],
        per_class: 2,
        n: 6,
        p: 3,
        adam: AdamConfig::default().with_budget(400),
        out_dir: out.to_path_buf(),
        workers: 2,
        base_seed: 17,
        ..Default::default()
    }
}

#[test]
fn generate_shape_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = |d: &Path| ExperimentConfig { out_dir: d.to_path_buf(), ..Default::default() };
    let m = cmd_generate(&cfg(a.path())).unwrap();
    cmd_generate(&cfg(b.path())).unwrap();
    assert_eq!(m.len(), 70);
    assert_eq!(fs::read_dir(a.path().join("instances")).unwrap().count(), 70);
    let manifest = fs::read_to_string(a.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.lines().count(), 70);
    assert_eq!(manifest, fs::read_to_string(b.path().join(MANIFEST_FILE)).unwrap());
    for e in &m {
        assert_eq!(fs::read(a.path().join(&e.path)).unwrap(), fs::read(b.path().join(&e.path)).unwrap());
    }
    assert!(fs::read_dir(a.path().join("instances")).unwrap().all(|f| !f.unwrap().path().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn one_instance_four_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { classes: vec![InstanceClass::FourRegular], per_class: 1, ..small(dir.path()) };
    cmd_generate(&cfg).unwrap();
    let s = cmd_benchmark(&cfg).unwrap();
    assert_eq!((s.instances, s.runs_executed, s.runs_reused), (1, 4, 0));
    assert_eq!(read_runs(&dir.path().join(RUNS_FILE)).unwrap().len(), 4);
    let rows = read_metadata_csv(fs::File::open(dir.path().join(METADATA_FILE)).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].kappa.len(), 4);
    assert_eq!(rows[0].label[&rows[0].best], Label::Good);

    let again = cmd_benchmark(&cfg).unwrap();
    assert_eq!((again.runs_executed, again.runs_reused), (0, 4));
}

#[test]
fn resumed_run_matches_uninterrupted() {
    let full = tempfile::tempdir().unwrap();
    let cut = tempfile::tempdir().unwrap();
    let cfg_full = small(full.path());
    let cfg_cut = ExperimentConfig { workers: 1, ..small(cut.path()) };
    cmd_generate(&cfg_full).unwrap();
    cmd_benchmark(&cfg_full).unwrap();

    cmd_generate(&cfg_cut).unwrap();
    cmd_benchmark(&cfg_cut).unwrap();
    // keep a prefix of the log plus a torn line, as if killed mid-write
    let runs = cut.path().join(RUNS_FILE);
    let text = fs::read_to_string(&runs).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut kept = lines[..lines.len() / 3].join("\n");
    kept.push('\n');
    kept.push_str(&lines[lines.len() / 3][..40]);
    fs::write(&runs, kept).unwrap();
    fs::remove_file(cut.path().join(METADATA_FILE)).unwrap();

    let resumed = cmd_benchmark(&cfg_cut).unwrap();
    assert_eq!(resumed.runs_reused, lines.len() / 3);
    assert_eq!(
        fs::read(full.path().join(METADATA_FILE)).unwrap(),
        fs::read(cut.path().join(METADATA_FILE)).unwrap()
    );
    assert_eq!(
        fs::read(full.path().join(FEATURES_FILE)).unwrap(),
        fs::read(cut.path().join(FEATURES_FILE)).unwrap()
    );
}

#[test]
fn worker_count_does_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, w) in [(a.path(), 1), (b.path(), 3)] {
        let cfg = ExperimentConfig { workers: w, ..small(d) };
        cmd_generate(&cfg).unwrap();
        cmd_benchmark(&cfg).unwrap();
    }
    assert_eq!(fs::read(a.path().join(METADATA_FILE)).unwrap(), fs::read(b.path().join(METADATA_FILE)).unwrap());
}

#[test]
fn report_on_benchmark_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    cmd_generate(&cfg).unwrap();
    cmd_benchmark(&cfg).unwrap();
    let opts = ReportOptions { landscapes: true, landscape_resolution: 9, ..Default::default() };
    let s = cmd_report(&dir.path().join(METADATA_FILE), dir.path(), &opts).unwrap();
    assert_eq!(s.instances, 6);
    assert_eq!(s.best_counts.values().sum::<usize>(), 6);
    assert_eq!(s.median_kappa.len(), 3);
    assert!(s.separation.is_some());
    for f in &s.files {
        assert!(f.exists(), "{}", f.display());
    }
    assert_eq!(fs::read_dir(dir.path().join("report/landscapes")).unwrap().count(), 3);
}

#[test]
fn report_single_row_and_unreached_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { classes: vec![InstanceClass::PowerLawTree], per_class: 1, ..small(dir.path()) };
    cmd_generate(&cfg).unwrap();
    cmd_benchmark(&cfg).unwrap();
    let meta = dir.path().join(METADATA_FILE);
    let s = cmd_report(&meta, dir.path(), &ReportOptions::default()).unwrap();
    assert_eq!(s.instances, 1);
    assert!(s.unreached.is_empty());

    // rewrite every kappa to the penalty
    let text = fs::read_to_string(&meta).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<String> = lines
        .next()
        .unwrap()
        .split(',')
        .zip(&header)
        .map(|(v, h)| if h.starts_with("kappa_") { "100000".to_string() } else { v.to_string() })
        .collect();
    let penal = dir.path().join("penalty.csv");
    let mut f = fs::File::create(&penal).unwrap();
    writeln!(f, "{}\n{}", header.join(","), row.join(",")).unwrap();
    let s = cmd_report(&penal, dir.path(), &ReportOptions::default()).unwrap();
    assert_eq!(s.unreached.len(), 1);
    let md = fs::read_to_string(dir.path().join("report/summary.md")).unwrap();
    assert!(md.contains("no strategy reached threshold"));
}

#[test]
fn report_names_bad_column() {
    let dir = tempfile::tempdir().unwrap();
    let meta = dir.path().join("bad.csv");
    fs::write(&meta, "id,class,numberOfEdges\nx,geometric,3\n").unwrap();
    let err = cmd_report(&meta, dir.path(), &ReportOptions::default()).unwrap_err().to_string();
    assert!(err.contains("bipartite") || err.contains("column"), "{err}");
}

#[test]
fn median_table_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = MedianTableConfig {
        classes: vec![InstanceClass::ThreeRegular],
        n: 6,
        layers: vec![1, 2],
        instances_per_class: 5,
        adam: AdamConfig::default().with_budget(1_000),
        restarts: 2,
        ..Default::default()
    };
    let path = dir.path().join("t/median_table.json");
    let table = cmd_median_table(&cfg, &path).unwrap();
    assert_eq!(table.len(), 2);
    let back = qaoa_lab::MedianParamTable::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, table);

    let bench = ExperimentConfig {
        classes: vec![InstanceClass::ThreeRegular],
        per_class: 1,
        p: 2,
        strategies: vec![StrategyTag::Qibpi, StrategyTag::ThreeRegularTransfer],
        table: Some(path),
        ..small(dir.path())
    };
    cmd_generate(&bench).unwrap();
    let s = cmd_benchmark(&bench).unwrap();
    assert_eq!(s.metadata[0].kappa.len(), 2);
    let recs = read_runs(&dir.path().join(RUNS_FILE)).unwrap();
    assert!(recs.iter().all(|r| r.initial_params == *table.get(InstanceClass::ThreeRegular, 2).unwrap()));
}

#[test]
fn rebuilt_medians_within_envelope() {
    let cfg = MedianTableConfig {
        classes: vec![InstanceClass::ThreeRegular],
        n: 8,
        layers: vec![1],
        instances_per_class: 12,
        adam: AdamConfig::default().with_budget(2_000),
        restarts: 2,
        ..Default::default()
    };
    let cells = collect_optima(&cfg).unwrap();
    let med = median_params(&cells[0].optima).unwrap();
    for (k, m) in med.to_flat().iter().enumerate() {
        let vals: Vec<f64> = cells[0].optima.iter().map(|o| o.to_flat()[k]).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= *m && *m <= hi);
    }
}

#[test]
fn missing_table_entry_fails_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { per_class: 1, p: 4, strategies: vec![StrategyTag::Qibpi], ..small(dir.path()) };
    cmd_generate(&cfg).unwrap();
    match cmd_benchmark(&cfg) {
        Err(PipelineError::CellFailures { failures, total }) => {
            assert_eq!(total, 3);
            assert_eq!(failures.len(), 3);
        }
        other => panic!("expected cell failures, got {other:?}"),
    }
}
