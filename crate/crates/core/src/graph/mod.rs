//! Simple undirected graphs, the edge-list text format and instance generation.

mod generate;

pub use generate::{
    derive_instance_seed, generate_instance, ClassParams, GenConfig, InstanceClass,
    REGULAR_RETRY_BUDGET,
};

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("generation failed after {retries} retries: {reason}")]
    GenerationFailed { retries: usize, reason: String },
}

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates and normalises an edge list. Endpoint order within a pair is
    /// irrelevant; self-loops, out-of-range endpoints and repeats are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut out = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self { n, edges: out })
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, [])
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        Self::new(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..n).map(|u| (u - 1, u)))
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self, GraphError> {
        Self::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, 5 + i));
        }
        Self::new(10, edges).expect("petersen edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Neighbourhood bitmasks; only defined for `n <= 64`.
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        let mut masks = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            masks[u] |= 1 << v;
            masks[v] |= 1 << u;
        }
        Some(masks)
    }

    /// Renders the edge-list format: `"n m"` then one `"u v"` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parses the edge-list format. Errors carry 1-based line numbers.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let (n, m) = parse_pair(header, 1)?;
        if n == 0 {
            return Err(GraphError::Parse { line: 1, message: "n must be positive".into() });
        }
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let (u, v) = parse_pair(line, lineno)?;
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: format!("vertex {w} out of range for n = {n}"),
                    });
                }
            }
            if u == v {
                return Err(GraphError::Parse { line: lineno, message: format!("self-loop at vertex {u}") });
            }
            let key = (u.min(v), u.max(v));
            if edges.contains(&key) {
                return Err(GraphError::Parse {
                    line: lineno,
                    message: format!("duplicate edge ({}, {})", key.0, key.1),
                });
            }
            edges.push(key);
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                message: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), GraphError> {
    let err = |message: String| GraphError::Parse { line: lineno, message };
    let mut parts = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize, GraphError> {
        let tok = parts.next().ok_or_else(|| err(format!("missing {what}")))?;
        tok.parse().map_err(|_| err(format!("invalid integer {tok:?}")))
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if parts.next().is_some() {
        return Err(err("expected exactly two fields".into()));
    }
    Ok((a, b))
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

impl FromStr for Graph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_edge_list(s)
    }
}
