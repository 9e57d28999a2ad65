//! All-pairs BFS distances and distance-based features.

use std::collections::VecDeque;

pub const UNREACHABLE: usize = usize::MAX;

pub fn all_pairs_distances(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![UNREACHABLE; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == UNREACHABLE {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSummary {
    pub diameter: usize,
    pub radius: usize,
    pub average_distance: f64,
}

/// Diameter, radius and mean pairwise distance restricted to `members`, which
/// must induce a connected subgraph.
pub fn summarize(dist: &[Vec<usize>], members: &[usize]) -> DistanceSummary {
    if members.len() < 2 {
        return DistanceSummary { diameter: 0, radius: 0, average_distance: 0.0 };
    }
    let ecc: Vec<usize> = members
        .iter()
        .map(|&u| members.iter().map(|&v| dist[u][v]).max().unwrap_or(0))
        .collect();
    let mut total = 0usize;
    let mut pairs = 0usize;
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            total += dist[u][v];
            pairs += 1;
        }
    }
    DistanceSummary {
        diameter: *ecc.iter().max().expect("non-empty"),
        radius: *ecc.iter().min().expect("non-empty"),
        average_distance: total as f64 / pairs as f64,
    }
}

/// Intersection-array test: connected, and for every pair at distance `i` the
/// counts `b_i` (neighbours of `v` one step further from `u`) and `c_i`
/// (one step closer) depend only on `i`.
pub fn is_distance_regular(adj: &[Vec<usize>], dist: &[Vec<usize>]) -> bool {
    let n = adj.len();
    if dist.iter().flatten().any(|&d| d == UNREACHABLE) {
        return false;
    }
    let mut b: Vec<Option<usize>> = vec![None; n];
    let mut c: Vec<Option<usize>> = vec![None; n];
    for u in 0..n {
        for v in 0..n {
            let i = dist[u][v];
            let further = adj[v].iter().filter(|&&w| dist[u][w] == i + 1).count();
            let closer = adj[v].iter().filter(|&&w| i > 0 && dist[u][w] == i - 1).count();
            for (slot, val) in [(&mut b[i], further), (&mut c[i], closer)] {
                match slot {
                    Some(prev) if *prev != val => return false,
                    Some(_) => {}
                    None => *slot = Some(val),
                }
            }
        }
    }
    true
}
