//! Parameter initialisation strategies and the per-class median table.

use crate::graph::{derive_instance_seed, generate_instance, GraphError};
use crate::optim::{adam_optimize, AdamConfig, OptimError, RunLabel};
use crate::qsim::{wrap, QsimError};
use crate::{GenConfig, Graph, InstanceClass, QaoaParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const DEFAULT_TQA_DT: f64 = 0.75;

/// Fraction of failed runs above which a table cell is rejected.
pub const MAX_CELL_FAILURE_RATE: f64 = 0.2;

const DEFAULT_TABLE_JSON: &str = include_str!("../data/default_median_table.json");

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("layer count must be at least 1")]
    NoLayers,
    #[error("no median parameters for class {class} at p = {p}")]
    MissingEntry { class: InstanceClass, p: usize },
    #[error("Trotter step {dt} gives out-of-bounds parameters: {source}")]
    TrotterStep { dt: f64, source: QsimError },
    #[error("invalid median table: {0}")]
    Table(String),
    #[error("median table cell ({class}, p = {p}): {failed} of {total} runs failed")]
    CellFailed { class: InstanceClass, p: usize, failed: usize, total: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StrategyTag {
    #[serde(rename = "random")]
    RandomInit,
    #[serde(rename = "tqa")]
    Tqa,
    #[serde(rename = "qibpi")]
    Qibpi,
    #[serde(rename = "three_regular")]
    ThreeRegularTransfer,
}

impl StrategyTag {
    pub const ALL: [StrategyTag; 4] =
        [StrategyTag::RandomInit, StrategyTag::Tqa, StrategyTag::Qibpi, StrategyTag::ThreeRegularTransfer];

    /// Order used to break κ ties: earlier wins.
    pub const TIE_BREAK: [StrategyTag; 4] =
        [StrategyTag::Qibpi, StrategyTag::ThreeRegularTransfer, StrategyTag::Tqa, StrategyTag::RandomInit];

    pub fn tag(self) -> &'static str {
        match self {
            StrategyTag::RandomInit => "random",
            StrategyTag::Tqa => "tqa",
            StrategyTag::Qibpi => "qibpi",
            StrategyTag::ThreeRegularTransfer => "three_regular",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            StrategyTag::RandomInit => "Random Initialisation",
            StrategyTag::Tqa => "TQA",
            StrategyTag::Qibpi => "Instance Class Optimised",
            StrategyTag::ThreeRegularTransfer => "3-Regular Graph Optimised",
        }
    }

    pub fn tie_rank(self) -> usize {
        Self::TIE_BREAK.iter().position(|&s| s == self).expect("closed enumeration")
    }
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StrategyTag {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match key.as_str() {
            "random" | "random_init" => StrategyTag::RandomInit,
            "tqa" => StrategyTag::Tqa,
            "qibpi" | "instance" => StrategyTag::Qibpi,
            "three_regular" | "3_regular" | "three_regular_transfer" => StrategyTag::ThreeRegularTransfer,
            _ => return Err(StrategyError::Table(format!("unknown strategy {s:?}"))),
        })
    }
}

/// γ uniform on (−π, π), β uniform on (−π/2, π/2).
pub fn init_random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<QaoaParams, StrategyError> {
    if p == 0 {
        return Err(StrategyError::NoLayers);
    }
    let gamma = (0..p).map(|_| open_uniform(rng, PI)).collect();
    let beta = (0..p).map(|_| open_uniform(rng, FRAC_PI_2)).collect();
    Ok(QaoaParams::new(gamma, beta).expect("samples lie inside the bounds"))
}

fn open_uniform<R: Rng + ?Sized>(rng: &mut R, half: f64) -> f64 {
    loop {
        let x = rng.gen_range(-half..half);
        if x != -half {
            return x;
        }
    }
}

/// Linear annealing schedule sampled at layer midpoints:
/// `γ_k = s_k·dt`, `β_k = (1 − s_k)·dt` with `s_k = (k − ½)/p`.
pub fn init_tqa(p: usize, dt: f64) -> Result<QaoaParams, StrategyError> {
    if p == 0 {
        return Err(StrategyError::NoLayers);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(StrategyError::Table(format!("Trotter step must be positive, got {dt}")));
    }
    let s: Vec<f64> = (1..=p).map(|k| (k as f64 - 0.5) / p as f64).collect();
    let gamma = s.iter().map(|s| s * dt).collect();
    let beta = s.iter().map(|s| (1.0 - s) * dt).collect();
    QaoaParams::new(gamma, beta).map_err(|source| StrategyError::TrotterStep { dt, source })
}

pub fn init_qibpi(class: InstanceClass, p: usize, table: &MedianParamTable) -> Result<QaoaParams, StrategyError> {
    if p == 0 {
        return Err(StrategyError::NoLayers);
    }
    table.get(class, p).cloned().ok_or(StrategyError::MissingEntry { class, p })
}

pub fn init_three_regular_transfer(p: usize, table: &MedianParamTable) -> Result<QaoaParams, StrategyError> {
    init_qibpi(InstanceClass::ThreeRegular, p, table)
}

/// Inputs shared by every strategy.
#[derive(Debug, Clone, Copy)]
pub struct InitContext<'a> {
    pub dt: f64,
    pub table: &'a MedianParamTable,
}

/// Dispatches to the strategy's initialiser; only `RandomInit` draws from `rng`.
pub fn initial_params<R: Rng + ?Sized>(
    strategy: StrategyTag,
    class: InstanceClass,
    p: usize,
    ctx: &InitContext<'_>,
    rng: &mut R,
) -> Result<QaoaParams, StrategyError> {
    match strategy {
        StrategyTag::RandomInit => init_random(p, rng),
        StrategyTag::Tqa => init_tqa(p, ctx.dt),
        StrategyTag::Qibpi => init_qibpi(class, p, ctx.table),
        StrategyTag::ThreeRegularTransfer => init_three_regular_transfer(p, ctx.table),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub n: Option<usize>,
    pub count: Option<usize>,
    pub base_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedianEntry {
    pub params: QaoaParams,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct EntryJson {
    class: InstanceClass,
    p: usize,
    gamma: Vec<f64>,
    beta: Vec<f64>,
    n: Option<usize>,
    count: Option<usize>,
    base_seed: Option<u64>,
}

/// Median optimal parameters keyed by (class, p).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MedianParamTable {
    entries: BTreeMap<(InstanceClass, usize), MedianEntry>,
}

impl MedianParamTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The shipped table: p = 3 medians for all seven classes.
    pub fn embedded_default() -> Self {
        Self::from_json(DEFAULT_TABLE_JSON).expect("embedded table is valid")
    }

    pub fn insert(&mut self, class: InstanceClass, params: QaoaParams, provenance: Provenance) {
        self.entries.insert((class, params.p()), MedianEntry { params, provenance });
    }

    pub fn get(&self, class: InstanceClass, p: usize) -> Option<&QaoaParams> {
        self.entries.get(&(class, p)).map(|e| &e.params)
    }

    pub fn entry(&self, class: InstanceClass, p: usize) -> Option<&MedianEntry> {
        self.entries.get(&(class, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = (InstanceClass, usize)> + '_ {
        self.entries.keys().copied()
    }

    pub fn from_json(text: &str) -> Result<Self, StrategyError> {
        let rows: Vec<EntryJson> = serde_json::from_str(text)?;
        let mut table = Self::new();
        for row in rows {
            if row.gamma.len() != row.p || row.beta.len() != row.p {
                return Err(StrategyError::Table(format!(
                    "{} p = {}: expected {} angles per vector",
                    row.class, row.p, row.p
                )));
            }
            let params = QaoaParams::new(row.gamma, row.beta)
                .map_err(|e| StrategyError::Table(format!("{} p = {}: {e}", row.class, row.p)))?;
            if table.entries.contains_key(&(row.class, row.p)) {
                return Err(StrategyError::Table(format!("duplicate entry {} p = {}", row.class, row.p)));
            }
            let provenance = Provenance { n: row.n, count: row.count, base_seed: row.base_seed };
            table.insert(row.class, params, provenance);
        }
        Ok(table)
    }

    /// One entry per line, ordered by class then p.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, ((class, p), e)) in self.entries.iter().enumerate() {
            let row = EntryJson {
                class: *class,
                p: *p,
                gamma: e.params.gamma().to_vec(),
                beta: e.params.beta().to_vec(),
                n: e.provenance.n,
                count: e.provenance.count,
                base_seed: e.provenance.base_seed,
            };
            out.push_str("  ");
            out.push_str(&serde_json::to_string(&row).expect("plain data serialises"));
            if i + 1 < self.entries.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push(']');
        out.push('\n');
        out
    }
}

/// Coordinate-wise median; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Maps an optimum to a representative of its symmetry orbit.
///
/// The energy is invariant under `(γ, β) → (−γ, −β)`, and each `β_k` has
/// period π/2 because `e^{-iπX/2}` per qubit is a global bit flip. When every
/// vertex has odd degree, `e^{-iπC}` acts as `Z^{⊗n}`, so adding π to `γ_k`
/// while negating `β_j` for `j ≥ k` is also a symmetry; when every degree is
/// even, `γ_k` has period π. The representative has every `γ_k` in
/// `[−π/2, π/2)` where such a reduction exists, every `β_k` in `[−π/4, π/4)`
/// and `γ_1 ≥ 0`.
pub fn canonicalize(g: &Graph, params: &QaoaParams) -> QaoaParams {
    let degrees = g.degrees();
    let all_odd = degrees.iter().all(|d| d % 2 == 1);
    let all_even = degrees.iter().all(|d| d % 2 == 0);
    let mut gamma = params.gamma().to_vec();
    let mut beta = params.beta().to_vec();
    let p = gamma.len();
    if all_odd || all_even {
        for k in 0..p {
            let reduced = wrap(gamma[k], FRAC_PI_2);
            if reduced != gamma[k] && all_odd {
                for b in &mut beta[k..] {
                    *b = -*b;
                }
            }
            gamma[k] = reduced;
        }
    }
    if gamma.first().is_some_and(|&g1| g1 < 0.0) {
        gamma.iter_mut().chain(beta.iter_mut()).for_each(|x| *x = -*x);
    }
    let beta = beta.into_iter().map(|b| wrap(b, FRAC_PI_4));
    let flat: Vec<f64> = gamma.into_iter().chain(beta).collect();
    QaoaParams::from_flat_wrapped(&flat).expect("finite angles")
}

/// Settings for rebuilding a median table.
#[derive(Debug, Clone)]
pub struct MedianTableConfig {
    pub classes: Vec<InstanceClass>,
    pub n: usize,
    pub layers: Vec<usize>,
    pub instances_per_class: usize,
    pub adam: AdamConfig,
    pub base_seed: u64,
    /// Random starts per instance; the best optimum found is kept.
    pub restarts: usize,
    /// Reduce each optimum by [`canonicalize`] before taking medians.
    pub canonicalize: bool,
}

impl Default for MedianTableConfig {
    fn default() -> Self {
        Self {
            classes: InstanceClass::ALL.to_vec(),
            n: 8,
            layers: (1..=10).collect(),
            instances_per_class: 100,
            adam: AdamConfig::default(),
            base_seed: 0,
            restarts: 10,
            canonicalize: true,
        }
    }
}

/// Optima collected for one (class, p) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOptima {
    pub class: InstanceClass,
    pub p: usize,
    pub optima: Vec<QaoaParams>,
    pub failures: usize,
}

/// Instance `index` of `class` as used by table construction.
pub fn table_instance(class: InstanceClass, n: usize, base_seed: u64, index: usize) -> Result<Graph, GraphError> {
    let seed = derive_instance_seed(base_seed, class.tag(), index as u64);
    let cfg = GenConfig::new(class, n, seed);
    generate_instance(&cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Runs random-init ADAM on every (class, instance, p) cell and returns the
/// optima grouped by (class, p).
pub fn collect_optima(cfg: &MedianTableConfig) -> Result<Vec<CellOptima>, StrategyError> {
    if cfg.classes.is_empty() || cfg.layers.is_empty() || cfg.instances_per_class == 0 || cfg.restarts == 0 {
        return Err(StrategyError::Table("classes, layers, instance and restart counts must be non-empty".into()));
    }
    if cfg.layers.contains(&0) {
        return Err(StrategyError::NoLayers);
    }
    cfg.adam.validate().map_err(|e| StrategyError::Table(e.to_string()))?;

    let mut graphs = Vec::new();
    for &class in &cfg.classes {
        for i in 0..cfg.instances_per_class {
            graphs.push((class, i, table_instance(class, cfg.n, cfg.base_seed, i)));
        }
    }
    let jobs: Vec<(usize, usize)> =
        (0..graphs.len()).flat_map(|gi| cfg.layers.iter().map(move |&p| (gi, p))).collect();
    let results: Vec<Option<QaoaParams>> = jobs
        .par_iter()
        .map(|&(gi, p)| {
            let (class, i, graph) = &graphs[gi];
            let g = graph.as_ref().ok()?;
            let tag = format!("median/{}/p{}", class.tag(), p);
            let seed = derive_instance_seed(cfg.base_seed, &tag, *i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(f64, QaoaParams)> = None;
            for _ in 0..cfg.restarts {
                let init = init_random(p, &mut rng).ok()?;
                let label =
                    RunLabel { instance_id: format!("{}_{i}", class.tag()), strategy: StrategyTag::RandomInit, seed };
                let rec: Result<_, OptimError> = adam_optimize(g, &init, &cfg.adam, label);
                let rec = rec.ok()?;
                if best.as_ref().map_or(true, |(e, _)| rec.best_energy > *e) {
                    best = Some((rec.best_energy, rec.best_params));
                }
            }
            let best = best?.1;
            Some(if cfg.canonicalize { canonicalize(g, &best) } else { best })
        })
        .collect();

    let mut cells: BTreeMap<(InstanceClass, usize), CellOptima> = BTreeMap::new();
    for (&(gi, p), res) in jobs.iter().zip(results) {
        let class = graphs[gi].0;
        let cell = cells.entry((class, p)).or_insert_with(|| CellOptima { class, p, optima: Vec::new(), failures: 0 });
        match res {
            Some(params) => cell.optima.push(params),
            None => cell.failures += 1,
        }
    }
    Ok(cells.into_values().collect())
}

/// Coordinate-wise median of a cell's optima.
pub fn median_params(optima: &[QaoaParams]) -> Option<QaoaParams> {
    let p = optima.first()?.p();
    let coord = |f: &dyn Fn(&QaoaParams) -> f64| median(&optima.iter().map(f).collect::<Vec<_>>());
    let gamma = (0..p).map(|k| coord(&|q| q.gamma()[k])).collect::<Option<Vec<_>>>()?;
    let beta = (0..p).map(|k| coord(&|q| q.beta()[k])).collect::<Option<Vec<_>>>()?;
    QaoaParams::new(gamma, beta).ok()
}

/// Rebuilds the table from scratch.
pub fn build_median_table(cfg: &MedianTableConfig) -> Result<MedianParamTable, StrategyError> {
    let cells = collect_optima(cfg)?;
    table_from_cells(&cells, cfg)
}

pub fn table_from_cells(cells: &[CellOptima], cfg: &MedianTableConfig) -> Result<MedianParamTable, StrategyError> {
    let mut table = MedianParamTable::new();
    for cell in cells {
        let total = cell.optima.len() + cell.failures;
        if cell.optima.is_empty() || cell.failures as f64 > MAX_CELL_FAILURE_RATE * total as f64 {
            return Err(StrategyError::CellFailed { class: cell.class, p: cell.p, failed: cell.failures, total });
        }
        let params = median_params(&cell.optima).expect("non-empty cell");
        let provenance =
            Provenance { n: Some(cfg.n), count: Some(cell.optima.len()), base_seed: Some(cfg.base_seed) };
        table.insert(cell.class, params, provenance);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::qaoa_expectation;

    #[test]
    fn tqa_schedule() {
        let q = init_tqa(2, 0.75).unwrap();
        assert_eq!(q.gamma(), &[0.1875, 0.5625]);
        assert_eq!(q.beta(), &[0.5625, 0.1875]);
        let q = init_tqa(1, 0.75).unwrap();
        assert_eq!((q.gamma()[0], q.beta()[0]), (0.375, 0.375));
        assert!(matches!(init_tqa(1, 4.0), Err(StrategyError::TrotterStep { .. })));
        assert!(init_tqa(0, 0.75).is_err());
    }

    #[test]
    fn random_init_is_seeded_and_bounded() {
        let a = init_random(3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = init_random(3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mean: f64 = (0..10_000).map(|_| init_random(1, &mut rng).unwrap().gamma()[0]).sum::<f64>() / 1e4;
        assert!(mean.abs() < 0.1);
    }

    #[test]
    fn embedded_table_lookup() {
        let t = MedianParamTable::embedded_default();
        assert_eq!(t.len(), 7);
        let q = init_qibpi(InstanceClass::PowerLawTree, 3, &t).unwrap();
        assert_eq!(q.gamma(), &[0.2426, 0.2190, 0.1971]);
        assert_eq!(q.beta(), &[-0.5864, -0.3827, 0.2193]);
        assert!(matches!(
            init_qibpi(InstanceClass::Geometric, 99, &t),
            Err(StrategyError::MissingEntry { p: 99, .. })
        ));
        assert_eq!(init_three_regular_transfer(3, &t).unwrap(), *t.get(InstanceClass::ThreeRegular, 3).unwrap());
        assert!(init_three_regular_transfer(3, &MedianParamTable::new()).is_err());
    }

    #[test]
    fn table_json_round_trip() {
        let t = MedianParamTable::embedded_default();
        let back = MedianParamTable::from_json(&t.to_json()).unwrap();
        assert_eq!(t, back);
        assert_eq!(back.to_json(), t.to_json());
        assert!(MedianParamTable::from_json(r#"[{"class":"geometric","p":2,"gamma":[0.1],"beta":[0.1],"n":null,"count":null,"baseSeed":null}]"#).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn canonical_form_preserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let graphs = [Graph::petersen(), Graph::cycle(6).unwrap(), Graph::path(5).unwrap()];
        for g in &graphs {
            for _ in 0..20 {
                let q = init_random(3, &mut rng).unwrap();
                let c = canonicalize(g, &q);
                let (a, b) = (qaoa_expectation(g, &q).unwrap(), qaoa_expectation(g, &c).unwrap());
                assert!((a - b).abs() < 1e-9, "{q:?} -> {c:?}");
                assert!(c.gamma()[0] >= 0.0);
                assert!(c.beta().iter().all(|b| (-FRAC_PI_4..FRAC_PI_4).contains(b)));
            }
        }
    }

    #[test]
    fn singleton_table_equals_run_optimum() {
        let cfg = MedianTableConfig {
            classes: vec![InstanceClass::ThreeRegular],
            n: 6,
            layers: vec![1, 2],
            instances_per_class: 1,
            adam: AdamConfig::default().with_budget(2000),
            base_seed: 3,
            restarts: 1,
            canonicalize: false,
        };
        let cells = collect_optima(&cfg).unwrap();
        let table = table_from_cells(&cells, &cfg).unwrap();
        assert_eq!(table.len(), 2);
        for cell in &cells {
            assert_eq!(table.get(cell.class, cell.p).unwrap(), &cell.optima[0]);
        }
    }
}
