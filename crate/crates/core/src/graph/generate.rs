use super::{Graph, GraphError};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Maximum configuration-model attempts for a d-regular graph.
pub const REGULAR_RETRY_BUDGET: usize = 10_000;

const DEGREE_SEQUENCE_BUDGET: usize = 1_000_000;

/// The seven MaxCut instance classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceClass {
    UniformRandom,
    PowerLawTree,
    WattsStrogatzSmallWorld,
    Geometric,
    ThreeRegular,
    FourRegular,
    NearlyCompleteBipartite,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 7] = [
        InstanceClass::UniformRandom,
        InstanceClass::PowerLawTree,
        InstanceClass::WattsStrogatzSmallWorld,
        InstanceClass::Geometric,
        InstanceClass::ThreeRegular,
        InstanceClass::FourRegular,
        InstanceClass::NearlyCompleteBipartite,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            InstanceClass::UniformRandom => "uniform_random",
            InstanceClass::PowerLawTree => "power_law_tree",
            InstanceClass::WattsStrogatzSmallWorld => "watts_strogatz_small_world",
            InstanceClass::Geometric => "geometric",
            InstanceClass::ThreeRegular => "three_regular",
            InstanceClass::FourRegular => "four_regular",
            InstanceClass::NearlyCompleteBipartite => "nearly_complete_bipartite",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            InstanceClass::UniformRandom => "Uniform Random",
            InstanceClass::PowerLawTree => "Power Law Tree",
            InstanceClass::WattsStrogatzSmallWorld => "Watts Strogatz Small World",
            InstanceClass::Geometric => "Geometric",
            InstanceClass::ThreeRegular => "3-Regular Graph",
            InstanceClass::FourRegular => "4-Regular Graph",
            InstanceClass::NearlyCompleteBipartite => "Nearly Complete Bipartite",
        }
    }

    /// Default generator parameters for this class.
    pub fn default_params(self, n: usize) -> ClassParams {
        match self {
            InstanceClass::UniformRandom => ClassParams::UniformRandom { edge_prob: 0.5 },
            InstanceClass::PowerLawTree => ClassParams::PowerLawTree { exponent: 3.0 },
            InstanceClass::WattsStrogatzSmallWorld => {
                ClassParams::WattsStrogatz { k: 4, rewire_prob: 0.5 }
            }
            InstanceClass::Geometric => ClassParams::Geometric { radius: 0.5, dim: 2 },
            InstanceClass::ThreeRegular => ClassParams::Regular { degree: 3 },
            InstanceClass::FourRegular => ClassParams::Regular { degree: 4 },
            InstanceClass::NearlyCompleteBipartite => {
                ClassParams::NearlyCompleteBipartite { part_size: n / 2, flip_prob: 0.05 }
            }
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for InstanceClass {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let class = match key.as_str() {
            "uniform_random" | "erdos_renyi" => InstanceClass::UniformRandom,
            "power_law_tree" => InstanceClass::PowerLawTree,
            "watts_strogatz_small_world" | "watts_strogatz" => InstanceClass::WattsStrogatzSmallWorld,
            "geometric" => InstanceClass::Geometric,
            "three_regular" | "3_regular" | "3_regular_graph" => InstanceClass::ThreeRegular,
            "four_regular" | "4_regular" | "4_regular_graph" => InstanceClass::FourRegular,
            "nearly_complete_bipartite" => InstanceClass::NearlyCompleteBipartite,
            _ => return Err(GraphError::InvalidParameter(format!("unknown instance class {s:?}"))),
        };
        Ok(class)
    }
}

/// Per-class generator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassParams {
    UniformRandom { edge_prob: f64 },
    /// Degree law `P(k) ∝ k^(-exponent)`.
    PowerLawTree { exponent: f64 },
    WattsStrogatz { k: usize, rewire_prob: f64 },
    /// Points uniform in the unit hypercube of dimension `dim`.
    Geometric { radius: f64, dim: usize },
    Regular { degree: usize },
    NearlyCompleteBipartite { part_size: usize, flip_prob: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub class: InstanceClass,
    pub n: usize,
    pub seed: u64,
    pub params: ClassParams,
}

impl GenConfig {
    pub fn new(class: InstanceClass, n: usize, seed: u64) -> Self {
        Self { class, n, seed, params: class.default_params(n) }
    }

    pub fn with_params(mut self, params: ClassParams) -> Self {
        self.params = params;
        self
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidParameter(msg));
        let n = self.n;
        if n == 0 {
            return bad("n must be positive".into());
        }
        let prob = |name: &str, p: f64| -> Result<(), GraphError> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(GraphError::InvalidParameter(format!("{name} = {p} not in [0, 1]")))
            }
        };
        match (self.class, self.params) {
            (InstanceClass::UniformRandom, ClassParams::UniformRandom { edge_prob }) => {
                prob("edge probability", edge_prob)
            }
            (InstanceClass::PowerLawTree, ClassParams::PowerLawTree { exponent }) => {
                if exponent.is_finite() && exponent > 1.0 {
                    Ok(())
                } else {
                    bad(format!("power-law exponent must exceed 1, got {exponent}"))
                }
            }
            (InstanceClass::WattsStrogatzSmallWorld, ClassParams::WattsStrogatz { k, rewire_prob }) => {
                prob("rewiring probability", rewire_prob)?;
                if k % 2 != 0 || k >= n {
                    return bad(format!("Watts-Strogatz needs even k < n, got k = {k}, n = {n}"));
                }
                Ok(())
            }
            (InstanceClass::Geometric, ClassParams::Geometric { radius, dim }) => {
                if dim == 0 || !(radius >= 0.0) {
                    return bad(format!("geometric needs dim >= 1 and radius >= 0, got {dim}, {radius}"));
                }
                Ok(())
            }
            (InstanceClass::ThreeRegular, ClassParams::Regular { degree })
            | (InstanceClass::FourRegular, ClassParams::Regular { degree }) => {
                let expected = if self.class == InstanceClass::ThreeRegular { 3 } else { 4 };
                if degree != expected {
                    return bad(format!("{} requires degree {expected}, got {degree}", self.class));
                }
                if degree >= n {
                    return bad(format!("degree {degree} infeasible for n = {n}"));
                }
                if (n * degree) % 2 != 0 {
                    return bad(format!("n * d must be even, got n = {n}, d = {degree}"));
                }
                Ok(())
            }
            (
                InstanceClass::NearlyCompleteBipartite,
                ClassParams::NearlyCompleteBipartite { part_size, flip_prob },
            ) => {
                prob("perturbation probability", flip_prob)?;
                if part_size == 0 || part_size >= n {
                    return bad(format!("part size must be in [1, n), got {part_size}"));
                }
                Ok(())
            }
            (class, params) => bad(format!("parameters {params:?} do not match class {class}")),
        }
    }
}

/// Stable per-instance seed: first 8 bytes of SHA-256 over
/// `(base_seed, class tag, index)`.
pub fn derive_instance_seed(base_seed: u64, tag: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base_seed.to_le_bytes());
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Samples one instance of `config.class`.
pub fn generate_instance<R: Rng + ?Sized>(config: &GenConfig, rng: &mut R) -> Result<Graph, GraphError> {
    config.validate()?;
    let n = config.n;
    match config.params {
        ClassParams::UniformRandom { edge_prob } => uniform_random(n, edge_prob, rng),
        ClassParams::PowerLawTree { exponent } => power_law_tree(n, exponent, rng),
        ClassParams::WattsStrogatz { k, rewire_prob } => watts_strogatz(n, k, rewire_prob, rng),
        ClassParams::Geometric { radius, dim } => geometric(n, radius, dim, rng),
        ClassParams::Regular { degree } => random_regular(n, degree, rng),
        ClassParams::NearlyCompleteBipartite { part_size, flip_prob } => {
            nearly_complete_bipartite(n, part_size, flip_prob, rng)
        }
    }
}

fn uniform_random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Samples degrees iid from the truncated power law on `1..n`, rejects until
/// they sum to `2(n - 1)`, then decodes a shuffled Prüfer sequence in which
/// vertex `i` appears `deg[i] - 1` times.
fn power_law_tree<R: Rng + ?Sized>(n: usize, exponent: f64, rng: &mut R) -> Result<Graph, GraphError> {
    if n == 1 {
        return Graph::empty(1);
    }
    if n == 2 {
        return Graph::new(2, [(0, 1)]);
    }
    let law = WeightedIndex::new((1..n).map(|k| (k as f64).powf(-exponent)))
        .map_err(|e| GraphError::InvalidParameter(format!("degree law: {e}")))?;
    let target = 2 * (n - 1);
    let mut degrees = vec![0usize; n];
    let mut found = false;
    for _ in 0..DEGREE_SEQUENCE_BUDGET {
        for d in degrees.iter_mut() {
            *d = law.sample(rng) + 1;
        }
        if degrees.iter().sum::<usize>() == target {
            found = true;
            break;
        }
    }
    if !found {
        return Err(GraphError::GenerationFailed {
            retries: DEGREE_SEQUENCE_BUDGET,
            reason: "no power-law degree sequence summing to 2(n-1)".into(),
        });
    }
    let mut prufer: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat(v).take(d - 1))
        .collect();
    prufer.shuffle(rng);
    Graph::new(n, decode_prufer(n, &prufer))
}

fn decode_prufer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf always exists");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Ring lattice with `k/2` neighbours per side; each lattice edge `(u, u+j)`
/// is rewired with probability `beta` to a uniformly chosen new endpoint.
fn watts_strogatz<R: Rng + ?Sized>(n: usize, k: usize, beta: f64, rng: &mut R) -> Result<Graph, GraphError> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            if !rng.gen_bool(beta) {
                continue;
            }
            let v = (u + j) % n;
            if !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                continue;
            }
            let choices: Vec<usize> = (0..n).filter(|&w| w != u && !adj[u].contains(&w)).collect();
            let w = choices[rng.gen_range(0..choices.len())];
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
    Graph::new(n, edges.collect::<Vec<_>>())
}

fn geometric<R: Rng + ?Sized>(n: usize, radius: f64, dim: usize, rng: &mut R) -> Result<Graph, GraphError> {
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let d2: f64 = points[u].iter().zip(&points[v]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2.sqrt() <= radius {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Configuration model: shuffle `n*d` stubs, pair neighbours, reject any
/// pairing with a loop or a repeated edge.
fn random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Graph, GraphError> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    'attempt: for _ in 0..REGULAR_RETRY_BUDGET {
        stubs.shuffle(rng);
        let mut seen = BTreeSet::new();
        for pair in stubs.chunks(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !seen.insert((a, b)) {
                continue 'attempt;
            }
        }
        return Graph::new(n, seen);
    }
    Err(GraphError::GenerationFailed {
        retries: REGULAR_RETRY_BUDGET,
        reason: format!("no simple {d}-regular pairing on {n} vertices"),
    })
}

/// Complete bipartite graph on parts `[0, a)` and `[a, n)` with each cross
/// edge removed independently with probability `flip_prob`.
fn nearly_complete_bipartite<R: Rng + ?Sized>(
    n: usize,
    a: usize,
    flip_prob: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..n {
            if !rng.gen_bool(flip_prob) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}
