//! ADAM ascent on the QAOA energy with central finite-difference gradients.
//!
//! Every energy evaluation, gradient probes included, advances one counter.
//! Traces are stamped with that counter so iterations-to-threshold scores are
//! measured in energy evaluations.

use crate::qsim::{approximation_ratio, QsimError, Simulator};
use crate::strategies::StrategyTag;
use crate::{Graph, QaoaParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimError {
    #[error("invalid optimiser config: {0}")]
    Config(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon_hat: f64,
    /// Energy-evaluation budget, gradient probes included.
    pub max_evaluations: u64,
    /// Half-width `h` of the central difference.
    pub fd_step: f64,
    /// Stop once the best energy gains less than `plateau_tolerance` over
    /// this many consecutive iterations.
    pub plateau_window: usize,
    pub plateau_tolerance: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon_hat: 1e-8,
            max_evaluations: 100_000,
            fd_step: 1e-3,
            plateau_window: 50,
            plateau_tolerance: 1e-6,
        }
    }
}

impl AdamConfig {
    pub fn with_budget(mut self, max_evaluations: u64) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }

    pub fn validate(&self) -> Result<(), OptimError> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("epsilon_hat", self.epsilon_hat),
            ("fd_step", self.fd_step),
            ("plateau_tolerance", self.plateau_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OptimError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(OptimError::Config(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        if self.max_evaluations == 0 || self.plateau_window == 0 {
            return Err(OptimError::Config("budget and plateau window must be positive".into()));
        }
        Ok(())
    }

    /// Energy evaluations consumed by one ADAM step at depth `p`.
    pub fn evaluations_per_step(p: usize) -> u64 {
        4 * p as u64 + 1
    }
}

/// One iterate: evaluations so far, best energy so far, current parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: u64,
    pub best_energy: f64,
    pub params: QaoaParams,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OptTrace {
    points: Vec<TracePoint>,
}

impl OptTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a point; panics if the counter does not increase or the best
    /// energy decreases.
    pub fn push(&mut self, point: TracePoint) {
        if let Some(last) = self.points.last() {
            assert!(point.evaluations > last.evaluations, "evaluation counter must increase");
            assert!(point.best_energy >= last.best_energy, "best energy must not decrease");
        }
        self.points.push(point);
    }

    pub fn from_points(points: Vec<TracePoint>) -> Self {
        let mut t = Self::new();
        for p in points {
            t.push(p);
        }
        t
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.points
    }

    pub fn last(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Keeps the first and last point, every `stride`-th point and every point
    /// where the best energy improved. Threshold crossings of the best-so-far
    /// curve therefore survive.
    pub fn downsample(&self, stride: usize) -> OptTrace {
        let stride = stride.max(1);
        let last = self.points.len().saturating_sub(1);
        let points = self
            .points
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                *i == 0
                    || *i == last
                    || i % stride == 0
                    || p.best_energy > self.points[i - 1].best_energy
            })
            .map(|(_, p)| p.clone())
            .collect();
        OptTrace { points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The next step would exceed the evaluation budget.
    Budget,
    Plateau,
    /// `p = 0`: nothing to optimise.
    NoParameters,
    /// A non-finite energy or gradient aborted the run.
    NonFinite,
}

/// Identifies a run inside a batch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLabel {
    pub instance_id: String,
    pub strategy: StrategyTag,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub strategy: StrategyTag,
    pub seed: u64,
    pub initial_params: QaoaParams,
    /// Parameters at which `best_energy` was observed.
    pub best_params: QaoaParams,
    pub best_energy: f64,
    pub c_max: u32,
    pub final_alpha: f64,
    pub total_evaluations: u64,
    pub termination: Termination,
    pub trace: OptTrace,
}

impl RunRecord {
    /// Copy with the trace downsampled for persistence.
    pub fn downsampled(&self, stride: usize) -> RunRecord {
        RunRecord { trace: self.trace.downsample(stride), ..self.clone() }
    }
}

/// Energy oracle that counts its calls.
pub struct CountingObjective {
    sim: Simulator<f64>,
    evaluations: u64,
}

impl CountingObjective {
    pub fn new(g: &Graph) -> Result<Self, QsimError> {
        Ok(Self { sim: Simulator::for_graph(g)?, evaluations: 0 })
    }

    pub fn energy(&mut self, params: &QaoaParams) -> f64 {
        self.evaluations += 1;
        self.sim.energy(params)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn c_max(&self) -> u32 {
        self.sim.cost().c_max()
    }
}

/// Central differences `(F(θ + h e_k) - F(θ - h e_k)) / 2h` over the flat
/// parameter vector `[γ.., β..]`; costs `4p` evaluations.
pub fn gradient_fd(obj: &mut CountingObjective, params: &QaoaParams, fd_step: f64) -> Result<Vec<f64>, QsimError> {
    let theta = params.to_flat();
    let mut grad = Vec::with_capacity(theta.len());
    let mut probe = theta.clone();
    for k in 0..theta.len() {
        probe[k] = theta[k] + fd_step;
        let plus = obj.energy(&QaoaParams::from_flat_wrapped(&probe)?);
        probe[k] = theta[k] - fd_step;
        let minus = obj.energy(&QaoaParams::from_flat_wrapped(&probe)?);
        probe[k] = theta[k];
        grad.push((plus - minus) / (2.0 * fd_step));
    }
    Ok(grad)
}

/// Maximises `F_p` by ADAM descent on `-F_p`, wrapping angles into their
/// periods after every step.
pub fn adam_optimize(
    g: &Graph,
    init: &QaoaParams,
    cfg: &AdamConfig,
    label: RunLabel,
) -> Result<RunRecord, OptimError> {
    cfg.validate()?;
    let mut obj = CountingObjective::new(g)?;
    let c_max = obj.c_max();
    if c_max == 0 {
        return Err(QsimError::ZeroMaxCut.into());
    }
    let p = init.p();
    let dim = 2 * p;

    let mut trace = OptTrace::new();
    let mut current = init.clone();
    let mut best_energy = obj.energy(&current);
    let mut best_params = current.clone();
    let mut termination = None;
    if !best_energy.is_finite() {
        termination = Some(Termination::NonFinite);
        best_energy = f64::NEG_INFINITY;
    }
    trace.push(TracePoint { evaluations: obj.evaluations(), best_energy, params: current.clone() });

    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut step: i32 = 0;
    let mut plateau_ref = best_energy;
    let mut stale = 0usize;

    while termination.is_none() {
        if p == 0 {
            termination = Some(Termination::NoParameters);
            break;
        }
        if obj.evaluations() + AdamConfig::evaluations_per_step(p) > cfg.max_evaluations {
            termination = Some(Termination::Budget);
            break;
        }
        let grad = gradient_fd(&mut obj, &current, cfg.fd_step)?;
        if grad.iter().any(|x| !x.is_finite()) {
            termination = Some(Termination::NonFinite);
            break;
        }
        step += 1;
        let bc1 = 1.0 - cfg.beta1.powi(step);
        let bc2 = 1.0 - cfg.beta2.powi(step);
        let mut theta = current.to_flat();
        for k in 0..dim {
            let loss_grad = -grad[k];
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * loss_grad;
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * loss_grad * loss_grad;
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            theta[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon_hat);
        }
        current = QaoaParams::from_flat_wrapped(&theta)?;
        let energy = obj.energy(&current);
        if !energy.is_finite() {
            termination = Some(Termination::NonFinite);
            break;
        }
        if energy > best_energy {
            best_energy = energy;
            best_params = current.clone();
        }
        trace.push(TracePoint { evaluations: obj.evaluations(), best_energy, params: current.clone() });

        if best_energy - plateau_ref >= cfg.plateau_tolerance {
            plateau_ref = best_energy;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.plateau_window {
                termination = Some(Termination::Plateau);
            }
        }
    }
    let termination = termination.expect("loop exits with a reason");

    // aborted runs still account for every evaluation
    if trace.last().map(|t| t.evaluations) != Some(obj.evaluations()) {
        trace.push(TracePoint { evaluations: obj.evaluations(), best_energy, params: current });
    }
    let final_alpha = if best_energy.is_finite() { approximation_ratio(best_energy, c_max)? } else { f64::NAN };
    Ok(RunRecord {
        instance_id: label.instance_id,
        strategy: label.strategy,
        seed: label.seed,
        initial_params: init.clone(),
        best_params,
        best_energy,
        c_max,
        final_alpha,
        total_evaluations: obj.evaluations(),
        termination,
        trace,
    })
}
