//! Exact statevector simulation of the MaxCut QAOA ansatz.
//!
//! Basis state `z` stores qubit `j` in bit `j` (little-endian). A layer
//! multiplies amplitude `z` by `exp(-i γ cut(z))` and then applies
//! `exp(-i β X)` to every qubit. Energies are exact expectations of the cut
//! value, so larger is better and `α = F / C_max`.

use crate::{Graph, Real};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use thiserror::Error;

/// Largest simulated qubit count.
pub const MAX_QUBITS: usize = 24;

/// Slack allowed on α outside `[0, 1]` before it is treated as an error.
pub const RATIO_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("statevector limited to {MAX_QUBITS} qubits, got {0}")]
    TooManyQubits(usize),
    #[error("gamma has {gamma} entries but beta has {beta}")]
    LengthMismatch { gamma: usize, beta: usize },
    #[error("{name}[{index}] = {value} outside [-{bound}, {bound}]")]
    OutOfBounds { name: &'static str, index: usize, value: f64, bound: f64 },
    #[error("non-finite parameter {name}[{index}]")]
    NonFinite { name: &'static str, index: usize },
    #[error("approximation ratio undefined: maximum cut is 0")]
    ZeroMaxCut,
    #[error("approximation ratio {0} outside [0, 1]")]
    RatioOutOfRange(f64),
    #[error("landscape resolution must be at least 2, got {0}")]
    Resolution(usize),
}

/// Cut value of every bit assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    n: usize,
    m: usize,
    cuts: Vec<u32>,
    c_max: u32,
    argmax: usize,
}

impl CostTable {
    pub fn new(g: &Graph) -> Result<Self, QsimError> {
        let n = g.n();
        if n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n));
        }
        let dim = 1usize << n;
        let mut cuts = vec![0u32; dim];
        for &(u, v) in g.edges() {
            for (z, c) in cuts.iter_mut().enumerate() {
                *c += (((z >> u) ^ (z >> v)) & 1) as u32;
            }
        }
        let (argmax, &c_max) = cuts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("dim >= 2");
        Ok(Self { n, m: g.m(), cuts, c_max, argmax })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cuts(&self) -> &[u32] {
        &self.cuts
    }

    pub fn c_max(&self) -> u32 {
        self.c_max
    }

    /// Smallest bitmask attaining `c_max`.
    pub fn argmax(&self) -> usize {
        self.argmax
    }
}

/// `build_cost_table` under its operational name.
pub fn build_cost_table(g: &Graph) -> Result<CostTable, QsimError> {
    CostTable::new(g)
}

/// Layer angles: `gamma[k]` in `[-π, π]`, `beta[k]` in `[-π/2, π/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    gamma: Vec<f64>,
    beta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self, QsimError> {
        if gamma.len() != beta.len() {
            return Err(QsimError::LengthMismatch { gamma: gamma.len(), beta: beta.len() });
        }
        check_bounds("gamma", &gamma, PI)?;
        check_bounds("beta", &beta, FRAC_PI_2)?;
        Ok(Self { gamma, beta })
    }

    /// The `p = 0` ansatz: no layers.
    pub fn empty() -> Self {
        Self { gamma: Vec::new(), beta: Vec::new() }
    }

    pub fn zeros(p: usize) -> Self {
        Self { gamma: vec![0.0; p], beta: vec![0.0; p] }
    }

    /// Builds from `[γ_1..γ_p, β_1..β_p]`, wrapping each angle into its
    /// period: `γ` into `[-π, π)`, `β` into `[-π/2, π/2)`.
    pub fn from_flat_wrapped(theta: &[f64]) -> Result<Self, QsimError> {
        if theta.len() % 2 != 0 {
            return Err(QsimError::LengthMismatch { gamma: theta.len() / 2 + 1, beta: theta.len() / 2 });
        }
        let p = theta.len() / 2;
        for (i, x) in theta.iter().enumerate() {
            if !x.is_finite() {
                let (name, index) = if i < p { ("gamma", i) } else { ("beta", i - p) };
                return Err(QsimError::NonFinite { name, index });
            }
        }
        let gamma = theta[..p].iter().map(|&g| wrap(g, PI)).collect();
        let beta = theta[p..].iter().map(|&b| wrap(b, FRAC_PI_2)).collect();
        Self::new(gamma, beta)
    }

    pub fn p(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `[γ_1..γ_p, β_1..β_p]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.gamma.iter().chain(&self.beta).copied().collect()
    }
}

fn check_bounds(name: &'static str, xs: &[f64], bound: f64) -> Result<(), QsimError> {
    for (index, &value) in xs.iter().enumerate() {
        if !value.is_finite() {
            return Err(QsimError::NonFinite { name, index });
        }
        if value.abs() > bound {
            return Err(QsimError::OutOfBounds { name, index, value, bound });
        }
    }
    Ok(())
}

/// Maps `x` into `[-half, half)` modulo `2·half`.
pub fn wrap(x: f64, half: f64) -> f64 {
    if (-half..half).contains(&x) {
        return x;
    }
    let w = (x + half).rem_euclid(2.0 * half) - half;
    // rem_euclid can round up to exactly 2·half
    if w >= half {
        -half
    } else {
        w
    }
}

/// `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|+⟩^⊗n`.
    pub fn uniform(n: usize) -> Result<Self, QsimError> {
        if n > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n));
        }
        let dim = 1usize << n;
        let a = T::one() / T::from_usize(dim).expect("dimension fits").sqrt();
        Ok(Self { n, amps: vec![Complex::new(a, T::zero()); dim] })
    }

    pub fn reset_uniform(&mut self) {
        let a = T::one() / T::from_usize(self.amps.len()).expect("dimension fits").sqrt();
        self.amps.fill(Complex::new(a, T::zero()));
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies amplitude `z` by `exp(-i γ cut(z))`.
    pub fn apply_cost_phase(&mut self, cost: &CostTable, gamma: T) {
        let phases: Vec<Complex<T>> = (0..=cost.m())
            .map(|c| {
                let angle = -gamma * T::from_usize(c).expect("cut fits");
                Complex::new(angle.cos(), angle.sin())
            })
            .collect();
        for (a, &c) in self.amps.iter_mut().zip(cost.cuts()) {
            *a = *a * phases[c as usize];
        }
    }

    /// Applies `exp(-i β X_j)` to every qubit `j`.
    pub fn apply_mixer(&mut self, beta: T) {
        let c = beta.cos();
        let s = beta.sin();
        let dim = self.amps.len();
        for j in 0..self.n {
            let bit = 1usize << j;
            for base in (0..dim).step_by(2 * bit) {
                for z in base..base + bit {
                    let a = self.amps[z];
                    let b = self.amps[z | bit];
                    // [[c, -is], [-is, c]]
                    self.amps[z] = Complex::new(c * a.re + s * b.im, c * a.im - s * b.re);
                    self.amps[z | bit] = Complex::new(c * b.re + s * a.im, c * b.im - s * a.re);
                }
            }
        }
    }

    /// `Σ_z |amp_z|² · cut(z)`.
    pub fn expectation(&self, cost: &CostTable) -> T {
        self.amps
            .iter()
            .zip(cost.cuts())
            .map(|(a, &c)| a.norm_sqr() * T::from_u32(c).expect("cut fits"))
            .sum()
    }

    /// Prepares `|ψ_p(γ, β)⟩` from the uniform state.
    pub fn prepare(&mut self, cost: &CostTable, params: &QaoaParams) {
        self.reset_uniform();
        for (&g, &b) in params.gamma().iter().zip(params.beta()) {
            self.apply_cost_phase(cost, T::lit(g));
            self.apply_mixer(T::lit(b));
        }
    }
}

/// Reusable evaluator for `F_p(γ, β)` on one instance.
#[derive(Debug, Clone)]
pub struct Simulator<T> {
    cost: CostTable,
    state: StateVector<T>,
}

impl<T: Real> Simulator<T> {
    pub fn new(cost: CostTable) -> Result<Self, QsimError> {
        let state = StateVector::uniform(cost.n())?;
        Ok(Self { cost, state })
    }

    pub fn for_graph(g: &Graph) -> Result<Self, QsimError> {
        Self::new(CostTable::new(g)?)
    }

    pub fn cost(&self) -> &CostTable {
        &self.cost
    }

    pub fn energy(&mut self, params: &QaoaParams) -> T {
        self.state.prepare(&self.cost, params);
        self.state.expectation(&self.cost)
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }
}

/// `F_p(γ, β)` in double precision.
pub fn qaoa_expectation(g: &Graph, params: &QaoaParams) -> Result<f64, QsimError> {
    Ok(Simulator::<f64>::for_graph(g)?.energy(params))
}

/// `α = F / C_max`. Values outside `[0, 1]` by at most [`RATIO_SLACK`] are
/// clamped; anything further out is an error.
pub fn approximation_ratio(energy: f64, c_max: u32) -> Result<f64, QsimError> {
    if c_max == 0 {
        return Err(QsimError::ZeroMaxCut);
    }
    let alpha = energy / c_max as f64;
    if !alpha.is_finite() || alpha < -RATIO_SLACK || alpha > 1.0 + RATIO_SLACK {
        return Err(QsimError::RatioOutOfRange(alpha));
    }
    Ok(alpha.clamp(0.0, 1.0))
}

/// Cell-centred grid coordinate `i` of `res` cells spanning `(-half, half)`.
pub fn grid_coordinate(i: usize, res: usize, half: f64) -> f64 {
    -half + (i as f64 + 0.5) * 2.0 * half / res as f64
}

/// `p = 1` energies on a `res × res` cell-centred grid. Row `i` holds
/// `γ_i ∈ (-π, π)`, column `j` holds `β_j ∈ (-π/2, π/2)`.
pub fn landscape_grid(g: &Graph, resolution: usize) -> Result<Vec<Vec<f64>>, QsimError> {
    if resolution < 2 {
        return Err(QsimError::Resolution(resolution));
    }
    let mut sim = Simulator::<f64>::for_graph(g)?;
    let mut grid = vec![vec![0.0; resolution]; resolution];
    for (i, row) in grid.iter_mut().enumerate() {
        let gamma = grid_coordinate(i, resolution, PI);
        for (j, cell) in row.iter_mut().enumerate() {
            let beta = grid_coordinate(j, resolution, FRAC_PI_2);
            let params = QaoaParams::new(vec![gamma], vec![beta])?;
            *cell = sim.energy(&params);
        }
    }
    Ok(grid)
}

/// CSV with a `gamma\beta` corner, β column headers and γ row labels.
pub fn landscape_csv(grid: &[Vec<f64>]) -> String {
    let res = grid.len();
    let mut s = String::from("gamma\\beta");
    for j in 0..res {
        let _ = write!(s, ",{}", crate::format::sig9(grid_coordinate(j, res, FRAC_PI_2)));
    }
    s.push('\n');
    for (i, row) in grid.iter().enumerate() {
        s.push_str(&crate::format::sig9(grid_coordinate(i, res, PI)));
        for v in row {
            let _ = write!(s, ",{}", crate::format::sig9(*v));
        }
        s.push('\n');
    }
    s
}

/// Heatmap SVG: β along x, γ along y (γ increasing upwards).
pub fn landscape_svg(grid: &[Vec<f64>], title: &str) -> String {
    let res = grid.len();
    let cell = (400 / res.max(1)).max(1);
    let size = cell * res;
    let (lo, hi) = grid
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = size + 80,
        h = size + 60
    );
    let _ = writeln!(s, r#"<text x="40" y="20" font-size="14">{}</text>"#, escape(title));
    for (i, row) in grid.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = (v - lo) / span;
            let (r, g, b) = viridis_like(t);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="rgb({r},{g},{b})"/>"#,
                40 + j * cell,
                30 + (res - 1 - i) * cell
            );
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">beta</text>"#, 40 + size / 2, size + 50);
    let _ = writeln!(s, r#"<text x="5" y="{}" font-size="12">gamma</text>"#, 30 + size / 2);
    s.push_str("</svg>\n");
    s
}

pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn viridis_like(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let r = 68.0 + t * (253.0 - 68.0);
    let g = 1.0 + t * (231.0 - 1.0);
    let b = 84.0 + t * (37.0 - 84.0) + 80.0 * (std::f64::consts::PI * t).sin();
    (r as u8, g as u8, b.clamp(0.0, 255.0) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> Graph {
        Graph::new(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn single_edge_table() {
        let t = CostTable::new(&edge()).unwrap();
        assert_eq!(t.cuts(), &[0, 1, 1, 0]);
        assert_eq!(t.c_max(), 1);
        assert_eq!(t.argmax(), 1);
    }

    #[test]
    fn small_max_cuts() {
        assert_eq!(CostTable::new(&Graph::complete(3).unwrap()).unwrap().c_max(), 2);
        assert_eq!(CostTable::new(&Graph::complete_bipartite(3, 3).unwrap()).unwrap().c_max(), 9);
    }

    #[test]
    fn too_many_qubits() {
        assert_eq!(CostTable::new(&Graph::empty(25).unwrap()), Err(QsimError::TooManyQubits(25)));
    }

    #[test]
    fn zero_angles_give_half_the_edges() {
        let g = Graph::complete(3).unwrap();
        assert!((qaoa_expectation(&g, &QaoaParams::empty()).unwrap() - 1.5).abs() < 1e-12);
        assert!((qaoa_expectation(&g, &QaoaParams::zeros(3)).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_edge_optimum() {
        let p = QaoaParams::new(vec![FRAC_PI_2], vec![PI / 8.0]).unwrap();
        assert!((qaoa_expectation(&edge(), &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(matches!(
            QaoaParams::new(vec![0.1], vec![]),
            Err(QsimError::LengthMismatch { gamma: 1, beta: 0 })
        ));
        assert!(matches!(QaoaParams::new(vec![4.0], vec![0.0]), Err(QsimError::OutOfBounds { .. })));
        assert!(matches!(QaoaParams::new(vec![0.0], vec![1.6]), Err(QsimError::OutOfBounds { .. })));
        assert!(matches!(QaoaParams::new(vec![f64::NAN], vec![0.0]), Err(QsimError::NonFinite { .. })));
    }

    #[test]
    fn wrapping() {
        assert!((wrap(PI + 0.5, PI) - (-PI + 0.5)).abs() < 1e-12);
        assert!((wrap(-FRAC_PI_2 - 0.25, FRAC_PI_2) - (FRAC_PI_2 - 0.25)).abs() < 1e-12);
        assert_eq!(wrap(0.3, PI), 0.3);
        let p = QaoaParams::from_flat_wrapped(&[7.0, -2.0]).unwrap();
        assert!(p.gamma()[0].abs() <= PI && p.beta()[0].abs() <= FRAC_PI_2);
    }

    #[test]
    fn ratio() {
        assert_eq!(approximation_ratio(3.0, 3).unwrap(), 1.0);
        assert_eq!(approximation_ratio(0.0, 3).unwrap(), 0.0);
        assert!((approximation_ratio(0.7992693 * 12.0, 12).unwrap() - 0.7992693).abs() < 1e-15);
        assert_eq!(approximation_ratio(1.0, 0), Err(QsimError::ZeroMaxCut));
        assert!(matches!(approximation_ratio(1.1, 1), Err(QsimError::RatioOutOfRange(_))));
        assert_eq!(approximation_ratio(1.0 + 1e-12, 1).unwrap(), 1.0);
    }

    #[test]
    fn landscape_center_and_bounds() {
        let grid = landscape_grid(&edge(), 3).unwrap();
        assert!((grid[1][1] - 0.5).abs() < 1e-12);
        assert!(matches!(landscape_grid(&edge(), 1), Err(QsimError::Resolution(1))));
        let csv = landscape_csv(&grid);
        assert_eq!(csv.lines().count(), 4);
        let svg = landscape_svg(&grid, "edge <p=1>");
        assert_eq!(svg.matches("<rect").count(), 9);
        assert!(svg.contains("edge &lt;p=1&gt;"));
    }

    #[test]
    fn single_precision_state() {
        let cost = CostTable::new(&Graph::cycle(5).unwrap()).unwrap();
        let params = QaoaParams::new(vec![0.4, -0.2], vec![0.3, 0.1]).unwrap();
        let mut s32 = StateVector::<f32>::uniform(5).unwrap();
        s32.prepare(&cost, &params);
        let mut s64 = StateVector::<f64>::uniform(5).unwrap();
        s64.prepare(&cost, &params);
        assert!((s32.expectation(&cost) as f64 - s64.expectation(&cost)).abs() < 1e-5);
    }
}
