//! End-to-end experiment steps: generate, benchmark, median table, report.
//!
//! Layout of an output directory:
//!
//! ```text
//! config.json          experiment settings of the last benchmark
//! manifest.jsonl       one line per instance: id, class, n, seed, path
//! instances/<id>.txt   edge lists
//! runs.jsonl           append-only run records (resumable)
//! features.csv
//! metadata.csv
//! report/              summary.md, scatter.{csv,svg}, landscapes/
//! ```

use crate::eval::{assemble_metadata, read_metadata_csv, score_instance, write_metadata_csv, EvalError};
use crate::features::{compute_features, write_feature_csv, FeatureError};
use crate::graph::{derive_instance_seed, generate_instance, GraphError};
use crate::isaproj::{cluster_separation, export_scatter, project_batch, ProjectionError, ProjectionSpec};
use crate::optim::{adam_optimize, OptimError, RunLabel};
use crate::qsim::{landscape_grid, landscape_svg, QsimError};
use crate::strategies::{
    build_median_table, initial_params, median, InitContext, MedianTableConfig, StrategyError, DEFAULT_TQA_DT,
};
use crate::{
    AdamConfig, EvalConfig, FeatureVector, GenConfig, Graph, InstanceClass, MedianParamTable, MetaDataRow,
    RunRecord, StrategyTag,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use thiserror::Error;

/// Stride used when persisting traces; improvement points are always kept.
pub const TRACE_STRIDE: usize = 10;

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const RUNS_FILE: &str = "runs.jsonl";
pub const FEATURES_FILE: &str = "features.csv";
pub const METADATA_FILE: &str = "metadata.csv";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{} of {} cells failed:\n  {}", .failures.len(), .total, .failures.join("\n  "))]
    CellFailures { failures: Vec<String>, total: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub classes: Vec<InstanceClass>,
    pub per_class: usize,
    pub n: usize,
    pub p: usize,
    pub strategies: Vec<StrategyTag>,
    pub adam: AdamConfig,
    pub eval: EvalConfig,
    pub dt: f64,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    /// 0 picks the number of cores.
    pub workers: usize,
    /// Median table for the table-based strategies; the embedded one if unset.
    pub table: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            classes: InstanceClass::ALL.to_vec(),
            per_class: 10,
            n: 8,
            p: 3,
            strategies: StrategyTag::ALL.to_vec(),
            adam: AdamConfig::default().with_budget(20_000),
            eval: EvalConfig::default(),
            dt: DEFAULT_TQA_DT,
            base_seed: 0,
            out_dir: PathBuf::from("qaoa-lab-out"),
            workers: 0,
            table: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        if self.classes.is_empty() {
            return bad("no instance classes selected");
        }
        if self.strategies.is_empty() {
            return bad("no strategies selected");
        }
        if self.per_class == 0 {
            return bad("instances per class must be positive");
        }
        if self.p == 0 {
            return bad("layer count must be positive");
        }
        if self.n < 2 || self.n > crate::features::MAX_FEATURE_VERTICES {
            return bad(&format!("node count must be in 2..={}", crate::features::MAX_FEATURE_VERTICES));
        }
        self.adam.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.eval.validate()?;
        Ok(())
    }

    fn load_table(&self) -> Result<MedianParamTable, PipelineError> {
        match &self.table {
            None => Ok(MedianParamTable::embedded_default()),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                Ok(MedianParamTable::from_json(&text)?)
            }
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool, PipelineError> {
        thread_pool(self.workers)
    }
}

/// Bounded worker pool; 0 threads means one per core.
pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub class: InstanceClass,
    pub n: usize,
    pub seed: u64,
    /// Relative to the output directory.
    pub path: PathBuf,
}

pub fn instance_id(class: InstanceClass, index: usize) -> String {
    format!("{}_{index:03}", class.tag())
}

/// Writes via a sibling `.tmp` file renamed on success.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), PipelineError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Generates `per_class` instances of every class with derived seeds.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<Vec<ManifestEntry>, PipelineError> {
    cfg.validate()?;
    let dir = cfg.out_dir.join("instances");
    create_dir(&dir)?;
    let jobs: Vec<(InstanceClass, usize)> =
        cfg.classes.iter().flat_map(|&c| (0..cfg.per_class).map(move |i| (c, i))).collect();
    let generated: Vec<Result<(ManifestEntry, Graph), GraphError>> = cfg.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(class, i)| {
                let seed = derive_instance_seed(cfg.base_seed, class.tag(), i as u64);
                let g = generate_instance(&GenConfig::new(class, cfg.n, seed), &mut ChaCha8Rng::seed_from_u64(seed))?;
                let id = instance_id(class, i);
                let path = PathBuf::from("instances").join(format!("{id}.txt"));
                Ok((ManifestEntry { id, class, n: cfg.n, seed, path }, g))
            })
            .collect()
    });
    let mut manifest = Vec::with_capacity(generated.len());
    let mut text = String::new();
    for item in generated {
        let (entry, g) = item?;
        write_atomic(&cfg.out_dir.join(&entry.path), g.to_edge_list().as_bytes())?;
        text.push_str(&serde_json::to_string(&entry).expect("plain data serialises"));
        text.push('\n');
        manifest.push(entry);
    }
    write_atomic(&cfg.out_dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

pub fn read_manifest(out_dir: &Path) -> Result<Vec<ManifestEntry>, PipelineError> {
    let path = out_dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Parse { path: path.clone(), line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn load_instance(out_dir: &Path, entry: &ManifestEntry) -> Result<Graph, PipelineError> {
    let path = out_dir.join(&entry.path);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    Graph::parse_edge_list(&text).map_err(|e| match e {
        GraphError::Parse { line, message } => PipelineError::Parse { path, line, message },
        other => other.into(),
    })
}

/// Reads complete records from a run log. A torn final line left by an
/// interrupted run is cut off so later appends start on a fresh line.
pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>, PipelineError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    if complete.len() != text.len() {
        let f = OpenOptions::new().write(true).open(path).map_err(io_err(path))?;
        f.set_len(complete.len() as u64).map_err(io_err(path))?;
    }
    complete
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Parse { path: path.to_path_buf(), line: i + 1, message: e.to_string() })
        })
        .collect()
}

/// Seed for the random initialiser of one (instance, strategy) cell.
pub fn cell_seed(instance_seed: u64, strategy: StrategyTag) -> u64 {
    derive_instance_seed(instance_seed, &format!("init/{}", strategy.tag()), 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSummary {
    pub instances: usize,
    pub runs_executed: usize,
    pub runs_reused: usize,
    pub metadata: Vec<MetaDataRow>,
}

/// Runs every pending (instance, strategy) cell, then rebuilds the feature
/// and metadata tables from the run log.
pub fn cmd_benchmark(cfg: &ExperimentConfig) -> Result<BenchmarkSummary, PipelineError> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    let manifest = read_manifest(out)?;
    if manifest.is_empty() {
        return Err(PipelineError::Config("manifest lists no instances".into()));
    }
    let table = cfg.load_table()?;
    let ctx = InitContext { dt: cfg.dt, table: &table };
    let graphs: Vec<Graph> = manifest.iter().map(|e| load_instance(out, e)).collect::<Result<_, _>>()?;
    write_atomic(&out.join(CONFIG_FILE), serde_json::to_string_pretty(cfg).expect("config serialises").as_bytes())?;

    let runs_path = out.join(RUNS_FILE);
    let existing = read_runs(&runs_path)?;
    let done: BTreeSet<(String, StrategyTag)> =
        existing.iter().map(|r| (r.instance_id.clone(), r.strategy)).collect();
    let pending: Vec<(usize, StrategyTag)> = (0..manifest.len())
        .flat_map(|i| cfg.strategies.iter().map(move |&s| (i, s)))
        .filter(|(i, s)| !done.contains(&(manifest[*i].id.clone(), *s)))
        .collect();

    let file = OpenOptions::new().create(true).append(true).open(&runs_path).map_err(io_err(&runs_path))?;
    let appender = Mutex::new(io::BufWriter::new(file));
    let failures: Vec<String> = cfg.pool()?.install(|| {
        pending
            .par_iter()
            .filter_map(|&(i, strategy)| {
                let entry = &manifest[i];
                let seed = cell_seed(entry.seed, strategy);
                let result = (|| -> Result<RunRecord, String> {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let init = initial_params(strategy, entry.class, cfg.p, &ctx, &mut rng).map_err(|e| e.to_string())?;
                    let label = RunLabel { instance_id: entry.id.clone(), strategy, seed };
                    adam_optimize(&graphs[i], &init, &cfg.adam, label).map_err(|e: OptimError| e.to_string())
                })();
                match result {
                    Ok(rec) => {
                        let line = serde_json::to_string(&rec.downsampled(TRACE_STRIDE)).expect("record serialises");
                        let mut w = appender.lock().expect("appender lock");
                        writeln!(w, "{line}").and_then(|_| w.flush()).err().map(|e| format!("{}: {e}", runs_path.display()))
                    }
                    Err(e) => Some(format!("{} / {}: {e}", entry.id, strategy)),
                }
            })
            .collect()
    });
    drop(appender);
    if !failures.is_empty() {
        return Err(PipelineError::CellFailures { failures, total: pending.len() });
    }

    let records = read_runs(&runs_path)?;
    let features: Vec<Result<FeatureVector, FeatureError>> =
        cfg.pool()?.install(|| graphs.par_iter().map(compute_features).collect());
    let mut instances = Vec::with_capacity(manifest.len());
    for (e, fv) in manifest.iter().zip(features) {
        instances.push((e.id.clone(), e.class, fv?));
    }
    let feature_rows: Vec<(String, FeatureVector)> = instances.iter().map(|(id, _, fv)| (id.clone(), *fv)).collect();
    let mut buf = Vec::new();
    write_feature_csv(&mut buf, &feature_rows)?;
    write_atomic(&out.join(FEATURES_FILE), &buf)?;

    let metadata = score_records(&manifest, &graphs, &records, &instances, cfg)?;
    let mut buf = Vec::new();
    write_metadata_csv(&mut buf, &metadata)?;
    write_atomic(&out.join(METADATA_FILE), &buf)?;

    Ok(BenchmarkSummary {
        instances: manifest.len(),
        runs_executed: pending.len(),
        runs_reused: cfg.strategies.len() * manifest.len() - pending.len(),
        metadata,
    })
}

fn score_records(
    manifest: &[ManifestEntry],
    graphs: &[Graph],
    records: &[RunRecord],
    instances: &[(String, InstanceClass, FeatureVector)],
    cfg: &ExperimentConfig,
) -> Result<Vec<MetaDataRow>, PipelineError> {
    let mut by_cell: BTreeMap<(&str, StrategyTag), &RunRecord> = BTreeMap::new();
    for r in records {
        by_cell.entry((r.instance_id.as_str(), r.strategy)).or_insert(r);
    }
    let mut results = Vec::new();
    for (e, g) in manifest.iter().zip(graphs) {
        let traces: Vec<_> = cfg
            .strategies
            .iter()
            .filter_map(|&s| by_cell.get(&(e.id.as_str(), s)).map(|r| (s, &r.trace)))
            .collect();
        if traces.len() != cfg.strategies.len() {
            continue;
        }
        let c_max = crate::CostTable::new(g)?.c_max();
        results.push(score_instance(&e.id, &traces, c_max, &cfg.eval)?);
    }
    Ok(assemble_metadata(instances, &results, &cfg.strategies)?)
}

/// Builds a median table and writes it as JSON.
pub fn cmd_median_table(cfg: &MedianTableConfig, path: &Path) -> Result<MedianParamTable, PipelineError> {
    let table = build_median_table(cfg)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_atomic(path, table.to_json().as_bytes())?;
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub penalty: u64,
    /// Draw a p = 1 landscape for the first instance of each class; needs
    /// the manifest next to the metadata.
    pub landscapes: bool,
    pub landscape_resolution: usize,
    pub projection: ProjectionSpec<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            penalty: EvalConfig::default().penalty,
            landscapes: false,
            landscape_resolution: 41,
            projection: ProjectionSpec::standard(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub instances: usize,
    pub strategies: Vec<StrategyTag>,
    pub median_kappa: BTreeMap<InstanceClass, BTreeMap<StrategyTag, f64>>,
    pub overall_median_kappa: BTreeMap<StrategyTag, f64>,
    pub best_counts: BTreeMap<StrategyTag, usize>,
    /// Instances on which every strategy scored the penalty.
    pub unreached: Vec<String>,
    /// Mean intra- and inter-class distance in the projected space.
    pub separation: Option<(f64, f64)>,
    pub files: Vec<PathBuf>,
}

/// Summarises a metadata table into `<out_dir>/report`.
pub fn cmd_report(metadata_path: &Path, out_dir: &Path, opts: &ReportOptions) -> Result<ReportSummary, PipelineError> {
    let file = File::open(metadata_path).map_err(io_err(metadata_path))?;
    let rows = read_metadata_csv(BufReader::new(file))?;
    let summary_dir = out_dir.join("report");
    create_dir(&summary_dir)?;
    let strategies = rows.first().map(|r| r.strategies()).unwrap_or_default();

    let mut per_class: BTreeMap<InstanceClass, BTreeMap<StrategyTag, Vec<f64>>> = BTreeMap::new();
    let mut overall: BTreeMap<StrategyTag, Vec<f64>> = BTreeMap::new();
    let mut best_counts: BTreeMap<StrategyTag, usize> = strategies.iter().map(|&s| (s, 0)).collect();
    let mut unreached = Vec::new();
    for r in &rows {
        for (&s, &k) in &r.kappa {
            per_class.entry(r.class).or_default().entry(s).or_default().push(k as f64);
            overall.entry(s).or_default().push(k as f64);
        }
        *best_counts.entry(r.best).or_default() += 1;
        if r.kappa.values().all(|&k| k >= opts.penalty) {
            unreached.push(r.id.clone());
        }
    }
    let medians = |m: &BTreeMap<StrategyTag, Vec<f64>>| -> BTreeMap<StrategyTag, f64> {
        m.iter().map(|(&s, v)| (s, median(v).expect("non-empty"))).collect()
    };
    let median_kappa: BTreeMap<_, _> = per_class.iter().map(|(&c, m)| (c, medians(m))).collect();
    let overall_median_kappa = medians(&overall);

    let mut files = Vec::new();
    let mut separation = None;
    if rows.len() >= 2 {
        let instances: Vec<_> = rows.iter().map(|r| (r.id.clone(), r.class, r.features)).collect();
        let points = project_batch(&instances, &opts.projection)?;
        separation = Some(cluster_separation(&points));
        let (c, s) = export_scatter(&points, &summary_dir.join("scatter"))?;
        files.extend([c, s]);
    }
    if opts.landscapes {
        let manifest = read_manifest(out_dir)?;
        let dir = summary_dir.join("landscapes");
        create_dir(&dir)?;
        let mut seen = BTreeSet::new();
        for e in &manifest {
            if !seen.insert(e.class) {
                continue;
            }
            let g = load_instance(out_dir, e)?;
            let grid = landscape_grid(&g, opts.landscape_resolution)?;
            let path = dir.join(format!("{}.svg", e.class.tag()));
            let title = format!("{} ({})", e.class.display_name(), e.id);
            write_atomic(&path, landscape_svg(&grid, &title).as_bytes())?;
            files.push(path);
        }
    }

    let summary = ReportSummary {
        instances: rows.len(),
        strategies,
        median_kappa,
        overall_median_kappa,
        best_counts,
        unreached,
        separation,
        files,
    };
    let md_path = summary_dir.join("summary.md");
    write_atomic(&md_path, render_summary(&summary).as_bytes())?;
    let mut summary = summary;
    summary.files.push(md_path);
    Ok(summary)
}

pub fn render_summary(s: &ReportSummary) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Benchmark report\n\n{} instance(s).\n", s.instances);
    let head: Vec<&str> = s.strategies.iter().map(|t| t.tag()).collect();
    let _ = writeln!(md, "## Median kappa per class\n\n| class | {} |", head.join(" | "));
    let _ = writeln!(md, "|---|{}", "---|".repeat(head.len()));
    let row = |name: &str, m: &BTreeMap<StrategyTag, f64>| {
        let cells: Vec<String> = s.strategies.iter().map(|t| m.get(t).map_or("-".into(), |v| format!("{v}"))).collect();
        format!("| {name} | {} |\n", cells.join(" | "))
    };
    for (c, m) in &s.median_kappa {
        md.push_str(&row(c.tag(), m));
    }
    md.push_str(&row("all", &s.overall_median_kappa));
    let _ = writeln!(md, "\n## Best-strategy counts\n");
    for (t, n) in &s.best_counts {
        let _ = writeln!(md, "- {}: {n}", t.tag());
    }
    if !s.unreached.is_empty() {
        let _ = writeln!(
            md,
            "\nno strategy reached threshold on {} instance(s): {}",
            s.unreached.len(),
            s.unreached.join(", ")
        );
    }
    if let Some((intra, inter)) = s.separation {
        let _ = writeln!(md, "\n## Instance space\n\nmean intra-class distance {intra:.4}, inter-class {inter:.4}");
    }
    md
}
