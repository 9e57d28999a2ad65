//! Automorphism group order and vertex orbits.
//!
//! The group order is the product of orbit lengths along the stabiliser chain
//! of the base `0, 1, ..., n-1`. Each orbit point is confirmed by a backtracking
//! search that individualises a vertex pair and refines the joint colouring of
//! two copies of the graph to an equitable partition. The transversal
//! elements found on the way generate the group, so their union-find closure
//! yields the orbits.

use crate::Graph;
use thiserror::Error;

/// Search-node budget.
pub const NODE_BUDGET: u64 = 100_000_000;

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomorphismError {
    #[error("automorphism search limited to n <= {MAX_VERTICES}, got {0}")]
    TooLarge(usize),
    #[error("automorphism search exceeded {0} nodes")]
    BudgetExceeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismStats {
    /// |Aut(G)|; at most 16! so it fits in `u64`.
    pub group_size: u64,
    /// Orbits, each sorted, ordered by smallest member.
    pub orbits: Vec<Vec<usize>>,
}

impl AutomorphismStats {
    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }
}

pub fn automorphism_stats(g: &Graph) -> Result<AutomorphismStats, AutomorphismError> {
    automorphism_stats_with_budget(g, NODE_BUDGET)
}

pub fn automorphism_stats_with_budget(g: &Graph, budget: u64) -> Result<AutomorphismStats, AutomorphismError> {
    let n = g.n();
    if n > MAX_VERTICES {
        return Err(AutomorphismError::TooLarge(n));
    }
    let mut search = Search::new(g, budget);
    let mut uf = UnionFind::new(n);
    let mut group_size: u64 = 1;
    // colouring of the doubled graph with base points 0..level fixed
    let mut fixed = search.initial_colouring();
    for level in 0..n {
        let Some(refined) = search.refine(fixed.clone()) else {
            unreachable!("identity extension always exists");
        };
        if is_discrete(&refined, n) {
            break;
        }
        let mut orbit_len = 0u64;
        for w in 0..n {
            if refined[w] != refined[n + level] {
                continue;
            }
            if w == level {
                orbit_len += 1;
                continue;
            }
            let start = individualise(&refined, level, w, n);
            if let Some(perm) = search.extend(start)? {
                orbit_len += 1;
                for (v, &image) in perm.iter().enumerate() {
                    uf.union(v, image);
                }
            }
        }
        group_size *= orbit_len;
        fixed = individualise(&refined, level, level, n);
    }

    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if root_slot[r] == usize::MAX {
            root_slot[r] = orbits.len();
            orbits.push(Vec::new());
        }
        orbits[root_slot[r]].push(v);
    }
    Ok(AutomorphismStats { group_size, orbits })
}

fn is_discrete(colours: &[u32], n: usize) -> bool {
    let mut seen = vec![false; 2 * n + 1];
    for &c in &colours[..n] {
        if seen[c as usize] {
            return false;
        }
        seen[c as usize] = true;
    }
    true
}

/// Gives domain vertex `x` and image vertex `y` a fresh shared colour.
fn individualise(colours: &[u32], x: usize, y: usize, n: usize) -> Vec<u32> {
    let mut c = colours.to_vec();
    let fresh = c.iter().copied().max().unwrap_or(0) + 1;
    c[x] = fresh;
    c[n + y] = fresh;
    c
}

struct Search {
    n: usize,
    /// neighbour lists of the doubled graph (domain copy then image copy)
    adj: Vec<Vec<usize>>,
    masks: Vec<u64>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn new(g: &Graph, budget: u64) -> Self {
        let n = g.n();
        let base = g.neighbors();
        let mut adj = base.clone();
        adj.extend(base.iter().map(|nb| nb.iter().map(|&v| v + n).collect()));
        let masks = g.adjacency_masks().expect("n <= 16");
        Self { n, adj, masks, nodes: 0, budget }
    }

    fn initial_colouring(&self) -> Vec<u32> {
        vec![0; 2 * self.n]
    }

    /// Joint colour refinement to the coarsest equitable partition. Returns
    /// `None` when the two copies disagree on some colour class size.
    fn refine(&self, mut colours: Vec<u32>) -> Option<Vec<u32>> {
        let n = self.n;
        let mut classes = count_classes(&colours);
        loop {
            let mut sigs: Vec<(u32, Vec<u32>, usize)> = (0..2 * n)
                .map(|v| {
                    let mut nb: Vec<u32> = self.adj[v].iter().map(|&u| colours[u]).collect();
                    nb.sort_unstable();
                    (colours[v], nb, v)
                })
                .collect();
            sigs.sort();
            let mut next = 0u32;
            for i in 0..sigs.len() {
                if i > 0 && (sigs[i].0 != sigs[i - 1].0 || sigs[i].1 != sigs[i - 1].1) {
                    next += 1;
                }
                colours[sigs[i].2] = next;
            }
            let mut count = vec![0i64; 2 * n];
            for (v, &c) in colours.iter().enumerate() {
                count[c as usize] += if v < n { 1 } else { -1 };
            }
            if count.iter().any(|&c| c != 0) {
                return None;
            }
            let now = next as usize + 1;
            if now == classes {
                return Some(colours);
            }
            classes = now;
        }
    }

    /// Finds an automorphism compatible with the individualised colouring.
    fn extend(&mut self, colours: Vec<u32>) -> Result<Option<Vec<usize>>, AutomorphismError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(AutomorphismError::BudgetExceeded(self.budget));
        }
        let n = self.n;
        let Some(colours) = self.refine(colours) else {
            return Ok(None);
        };
        let mut size = vec![0usize; 2 * n];
        for &c in &colours[..n] {
            size[c as usize] += 1;
        }
        let target = (0..n).filter(|&v| size[colours[v] as usize] > 1).min_by_key(|&v| colours[v]);
        match target {
            None => {
                let mut perm = vec![0usize; n];
                for x in 0..n {
                    let y = (0..n).find(|&y| colours[n + y] == colours[x]).expect("matching colour");
                    perm[x] = y;
                }
                Ok(self.is_automorphism(&perm).then_some(perm))
            }
            Some(x) => {
                for y in 0..n {
                    if colours[n + y] != colours[x] {
                        continue;
                    }
                    if let Some(perm) = self.extend(individualise(&colours, x, y, n))? {
                        return Ok(Some(perm));
                    }
                }
                Ok(None)
            }
        }
    }

    fn is_automorphism(&self, perm: &[usize]) -> bool {
        (0..self.n).all(|u| {
            let mut image = 0u64;
            let mut m = self.masks[u];
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                image |= 1 << perm[v];
                m &= m - 1;
            }
            image == self.masks[perm[u]]
        })
    }
}

fn count_classes(colours: &[u32]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_four() {
        let s = automorphism_stats(&Graph::empty(4).unwrap()).unwrap();
        assert_eq!(s.group_size, 24);
        assert_eq!(s.num_orbits(), 1);
    }

    #[test]
    fn path_three() {
        let s = automorphism_stats(&Graph::path(3).unwrap()).unwrap();
        assert_eq!(s.group_size, 2);
        assert_eq!(s.orbits, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn five_cycle_is_dihedral() {
        let s = automorphism_stats(&Graph::cycle(5).unwrap()).unwrap();
        assert_eq!(s.group_size, 10);
        assert_eq!(s.num_orbits(), 1);
    }

    #[test]
    fn complete_and_edgeless_sixteen() {
        let fact16: u64 = (1..=16).product();
        assert_eq!(automorphism_stats(&Graph::complete(16).unwrap()).unwrap().group_size, fact16);
        assert_eq!(automorphism_stats(&Graph::empty(16).unwrap()).unwrap().group_size, fact16);
    }

    #[test]
    fn too_large_and_budget() {
        assert_eq!(
            automorphism_stats(&Graph::empty(17).unwrap()),
            Err(AutomorphismError::TooLarge(17))
        );
        assert_eq!(
            automorphism_stats_with_budget(&Graph::petersen(), 3),
            Err(AutomorphismError::BudgetExceeded(3))
        );
    }

    #[test]
    fn asymmetric_graph() {
        // smallest asymmetric tree has 7 vertices
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6)]).unwrap();
        let s = automorphism_stats(&g).unwrap();
        assert_eq!(s.group_size, 1);
        assert_eq!(s.num_orbits(), 7);
    }
}
