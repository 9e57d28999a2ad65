//! Iterations-to-threshold scores, good/bad labels and the metadata table.

use crate::format::sig9;
use crate::optim::OptTrace;
use crate::{FeatureVector, InstanceClass, StrategyTag};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid eval config: {0}")]
    Config(String),
    #[error("no strategy traces to score")]
    NoTraces,
    #[error("trace for {0} is empty")]
    EmptyTrace(StrategyTag),
    #[error("maximum cut must be positive")]
    ZeroMaxCut,
    #[error("metadata assembly: {}", .0.join("; "))]
    Assembly(Vec<String>),
    #[error("metadata CSV, column {column:?}: {message}")]
    Schema { column: String, message: String },
    #[error("metadata CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Fraction of the best final ratio that counts as acceptable.
    pub tau: f64,
    /// Score of a strategy that never reaches the threshold.
    pub penalty: u64,
    /// Relative slack for a "good" label.
    pub epsilon: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { tau: 0.95, penalty: 100_000, epsilon: 0.1 }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(EvalError::Config(format!("tau must be in (0, 1], got {}", self.tau)));
        }
        if self.penalty == 0 {
            return Err(EvalError::Config("penalty must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(EvalError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn acceptable(&self, alpha_max: f64) -> f64 {
        self.tau * alpha_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Good,
    Bad,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Good => "good",
            Label::Bad => "bad",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "good" => Ok(Label::Good),
            "bad" => Ok(Label::Bad),
            other => Err(format!("expected good or bad, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyScore {
    pub final_alpha: f64,
    pub kappa: u64,
    pub label: Label,
}

/// Scores of every strategy on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerInstanceResult {
    pub instance_id: String,
    pub alpha_max: f64,
    pub alpha_acceptable: f64,
    pub scores: BTreeMap<StrategyTag, StrategyScore>,
    pub best: StrategyTag,
}

/// κ per strategy plus the thresholds used to compute them.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaScores {
    pub alpha_max: f64,
    pub alpha_acceptable: f64,
    pub final_alpha: BTreeMap<StrategyTag, f64>,
    pub kappa: BTreeMap<StrategyTag, u64>,
}

fn ratio(energy: f64, c_max: u32) -> f64 {
    energy / c_max as f64
}

/// κ_s = first evaluation count whose best-so-far ratio reaches
/// `tau · alpha_max`, or the penalty if it never does.
pub fn kappa_scores(traces: &[(StrategyTag, &OptTrace)], c_max: u32, cfg: &EvalConfig) -> Result<KappaScores, EvalError> {
    cfg.validate()?;
    if traces.is_empty() {
        return Err(EvalError::NoTraces);
    }
    if c_max == 0 {
        return Err(EvalError::ZeroMaxCut);
    }
    let mut final_alpha = BTreeMap::new();
    for &(s, t) in traces {
        let last = t.last().ok_or(EvalError::EmptyTrace(s))?;
        final_alpha.insert(s, ratio(last.best_energy, c_max));
    }
    let alpha_max = final_alpha.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let alpha_acceptable = cfg.acceptable(alpha_max);
    let kappa = traces
        .iter()
        .map(|&(s, t)| {
            let k = t
                .points()
                .iter()
                .find(|pt| ratio(pt.best_energy, c_max) >= alpha_acceptable)
                .map_or(cfg.penalty, |pt| pt.evaluations);
            (s, k)
        })
        .collect();
    Ok(KappaScores { alpha_max, alpha_acceptable, final_alpha, kappa })
}

/// Good iff κ_s ≤ (1 + ε)·min κ.
pub fn binary_labels(kappas: &BTreeMap<StrategyTag, u64>, cfg: &EvalConfig) -> BTreeMap<StrategyTag, Label> {
    let Some(&min) = kappas.values().min() else {
        return BTreeMap::new();
    };
    let cutoff = (1.0 + cfg.epsilon) * min as f64;
    kappas
        .iter()
        .map(|(&s, &k)| (s, if k as f64 <= cutoff { Label::Good } else { Label::Bad }))
        .collect()
}

/// Smallest κ, ties broken by [`StrategyTag::TIE_BREAK`].
pub fn best_strategy(kappas: &BTreeMap<StrategyTag, u64>) -> Option<StrategyTag> {
    kappas.iter().min_by_key(|(s, &k)| (k, s.tie_rank())).map(|(&s, _)| s)
}

/// Full scoring of one instance.
pub fn score_instance(
    instance_id: &str,
    traces: &[(StrategyTag, &OptTrace)],
    c_max: u32,
    cfg: &EvalConfig,
) -> Result<PerInstanceResult, EvalError> {
    let ks = kappa_scores(traces, c_max, cfg)?;
    let labels = binary_labels(&ks.kappa, cfg);
    let best = best_strategy(&ks.kappa).ok_or(EvalError::NoTraces)?;
    let scores = ks
        .kappa
        .iter()
        .map(|(&s, &kappa)| (s, StrategyScore { final_alpha: ks.final_alpha[&s], kappa, label: labels[&s] }))
        .collect();
    Ok(PerInstanceResult {
        instance_id: instance_id.to_string(),
        alpha_max: ks.alpha_max,
        alpha_acceptable: ks.alpha_acceptable,
        scores,
        best,
    })
}

/// One instance of the meta-data set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaDataRow {
    pub id: String,
    pub class: InstanceClass,
    pub features: FeatureVector,
    /// Keyed by the strategies in the experiment, in [`StrategyTag::ALL`] order.
    pub kappa: BTreeMap<StrategyTag, u64>,
    pub label: BTreeMap<StrategyTag, Label>,
    pub best: StrategyTag,
}

impl MetaDataRow {
    pub fn strategies(&self) -> Vec<StrategyTag> {
        self.kappa.keys().copied().collect()
    }
}

/// Joins features and scores by instance id, in the order of `instances`.
pub fn assemble_metadata(
    instances: &[(String, InstanceClass, FeatureVector)],
    results: &[PerInstanceResult],
    strategies: &[StrategyTag],
) -> Result<Vec<MetaDataRow>, EvalError> {
    let by_id: BTreeMap<&str, &PerInstanceResult> = results.iter().map(|r| (r.instance_id.as_str(), r)).collect();
    let mut gaps = Vec::new();
    let mut rows = Vec::new();
    for (id, class, features) in instances {
        let Some(r) = by_id.get(id.as_str()) else {
            gaps.push(format!("{id}: no results"));
            continue;
        };
        let missing: Vec<&str> = strategies.iter().filter(|s| !r.scores.contains_key(s)).map(|s| s.tag()).collect();
        if !missing.is_empty() {
            gaps.push(format!("{id}: missing {}", missing.join(", ")));
            continue;
        }
        let kappa: BTreeMap<_, _> = strategies.iter().map(|&s| (s, r.scores[&s].kappa)).collect();
        let label = strategies.iter().map(|&s| (s, r.scores[&s].label)).collect();
        let best = best_strategy(&kappa).ok_or(EvalError::NoTraces)?;
        rows.push(MetaDataRow { id: id.clone(), class: *class, features: *features, kappa, label, best });
    }
    let known: std::collections::BTreeSet<&str> = instances.iter().map(|(id, _, _)| id.as_str()).collect();
    for r in results {
        if !known.contains(r.instance_id.as_str()) {
            gaps.push(format!("{}: no feature vector", r.instance_id));
        }
    }
    if gaps.is_empty() {
        Ok(rows)
    } else {
        Err(EvalError::Assembly(gaps))
    }
}

pub fn metadata_header(strategies: &[StrategyTag]) -> Vec<String> {
    let mut h = vec!["id".to_string(), "class".to_string()];
    h.extend(FeatureVector::NAMES.iter().map(|s| s.to_string()));
    h.extend(strategies.iter().map(|s| format!("kappa_{}", s.tag())));
    h.extend(strategies.iter().map(|s| format!("label_{}", s.tag())));
    h.push("best".into());
    h
}

pub fn write_metadata_csv<W: io::Write>(writer: W, rows: &[MetaDataRow]) -> Result<(), EvalError> {
    let strategies = rows.first().map(|r| r.strategies()).unwrap_or_else(|| StrategyTag::ALL.to_vec());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(metadata_header(&strategies))?;
    for r in rows {
        if r.strategies() != strategies {
            return Err(EvalError::Assembly(vec![format!("{}: strategy set differs from first row", r.id)]));
        }
        let mut rec = vec![r.id.clone(), r.class.tag().to_string()];
        rec.extend(r.features.to_array().iter().map(|&x| sig9(x)));
        rec.extend(strategies.iter().map(|s| r.kappa[s].to_string()));
        rec.extend(strategies.iter().map(|s| r.label[s].to_string()));
        rec.push(r.best.tag().to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metadata_csv<R: io::Read>(reader: R) -> Result<Vec<MetaDataRow>, EvalError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let schema = |column: &str, message: String| EvalError::Schema { column: column.to_string(), message };

    let fixed = 2 + FeatureVector::NAMES.len();
    let expect_at = |i: usize, name: &str| -> Result<(), EvalError> {
        match header.get(i) {
            Some(h) if h == name => Ok(()),
            Some(h) => Err(schema(name, format!("expected at position {}, found {h:?}", i + 1))),
            None => Err(schema(name, "missing".into())),
        }
    };
    expect_at(0, "id")?;
    expect_at(1, "class")?;
    for (k, name) in FeatureVector::NAMES.iter().enumerate() {
        expect_at(2 + k, name)?;
    }
    let rest = header.len().saturating_sub(fixed + 1);
    if rest == 0 || rest % 2 != 0 {
        return Err(schema("best", "expected kappa_* and label_* pairs followed by best".into()));
    }
    let ns = rest / 2;
    let mut strategies = Vec::with_capacity(ns);
    for i in 0..ns {
        let col = &header[fixed + i];
        let s = col
            .strip_prefix("kappa_")
            .and_then(|t| t.parse::<StrategyTag>().ok())
            .ok_or_else(|| schema(col, "expected kappa_<strategy>".into()))?;
        strategies.push(s);
        expect_at(fixed + ns + i, &format!("label_{}", s.tag()))?;
    }
    expect_at(fixed + 2 * ns, "best")?;

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let class: InstanceClass = field(1).parse().map_err(|e| schema("class", format!("{e}")))?;
        let mut values = [0.0; 28];
        for (k, name) in FeatureVector::NAMES.iter().enumerate() {
            values[k] = field(2 + k).parse().map_err(|e| schema(name, format!("{e}")))?;
        }
        let mut kappa = BTreeMap::new();
        let mut label = BTreeMap::new();
        for (i, &s) in strategies.iter().enumerate() {
            let k: u64 = field(fixed + i).parse().map_err(|e| schema(&header[fixed + i], format!("{e}")))?;
            let l: Label = field(fixed + ns + i).parse().map_err(|e| schema(&header[fixed + ns + i], e))?;
            kappa.insert(s, k);
            label.insert(s, l);
        }
        let best: StrategyTag = field(fixed + 2 * ns).parse().map_err(|e| schema("best", format!("{e}")))?;
        rows.push(MetaDataRow {
            id: field(0).to_string(),
            class,
            features: FeatureVector::from_array(values),
            kappa,
            label,
            best,
        });
    }
    Ok(rows)
}
