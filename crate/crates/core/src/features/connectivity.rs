//! Components, cut vertices and Menger connectivities via unit-capacity max-flow.

use std::collections::VecDeque;

/// Component label per vertex, labels in order of first appearance.
pub fn component_labels(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    component_labels_without(adj, None)
}

fn component_labels_without(adj: &[Vec<usize>], removed: Option<usize>) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if label[s] != usize::MAX || Some(s) == removed {
            continue;
        }
        label[s] = count;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if label[v] == usize::MAX && Some(v) != removed {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Vertices whose removal increases the number of components.
pub fn cut_vertex_count(adj: &[Vec<usize>]) -> usize {
    let (_, base) = component_labels(adj);
    (0..adj.len())
        .filter(|&v| !adj[v].is_empty())
        .filter(|&v| component_labels_without(adj, Some(v)).1 > base)
        .count()
}

/// Max-flow on a dense capacity matrix by shortest augmenting paths.
fn max_flow(cap: &mut [Vec<i32>], s: usize, t: usize) -> i32 {
    let n = cap.len();
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= 1;
            cap[v][u] += 1;
            v = u;
        }
        flow += 1;
    }
}

/// Minimum number of edges whose removal disconnects the graph; 0 when the
/// graph is already disconnected or has a single vertex.
pub fn edge_connectivity(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    if n < 2 || component_labels(adj).1 > 1 {
        return 0;
    }
    let base: Vec<Vec<i32>> = (0..n)
        .map(|u| {
            let mut row = vec![0; n];
            for &v in &adj[u] {
                row[v] = 1;
            }
            row
        })
        .collect();
    (1..n)
        .map(|t| max_flow(&mut base.clone(), 0, t) as usize)
        .min()
        .unwrap_or(0)
}

/// Minimum number of vertices whose removal disconnects the graph or leaves a
/// single vertex; `n - 1` for complete graphs, 0 when disconnected.
pub fn vertex_connectivity(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    if n < 2 || component_labels(adj).1 > 1 {
        return 0;
    }
    let mut best = n - 1;
    // split vertex v into v_in = 2v, v_out = 2v + 1
    let mut base = vec![vec![0i32; 2 * n]; 2 * n];
    for v in 0..n {
        base[2 * v][2 * v + 1] = 1;
        for &u in &adj[v] {
            base[2 * v + 1][2 * u] = n as i32;
        }
    }
    for s in 0..n {
        for t in s + 1..n {
            if adj[s].contains(&t) {
                continue;
            }
            let k = max_flow(&mut base.clone(), 2 * s + 1, 2 * t) as usize;
            best = best.min(k);
        }
    }
    best
}

/// Two-colouring by BFS.
pub fn is_bipartite(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut side = vec![u8::MAX; n];
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if side[v] == u8::MAX {
                    side[v] = 1 - side[u];
                    queue.push_back(v);
                } else if side[v] == side[u] {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Graph;

    fn adj(g: &Graph) -> Vec<Vec<usize>> {
        g.neighbors()
    }

    #[test]
    fn complete_graph() {
        let g = Graph::complete(5).unwrap();
        assert_eq!(vertex_connectivity(&adj(&g)), 4);
        assert_eq!(edge_connectivity(&adj(&g)), 4);
        assert_eq!(cut_vertex_count(&adj(&g)), 0);
    }

    #[test]
    fn bowtie_has_one_cut_vertex() {
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let a = adj(&g);
        assert_eq!(cut_vertex_count(&a), 1);
        assert_eq!(vertex_connectivity(&a), 1);
        assert_eq!(edge_connectivity(&a), 2);
    }

    #[test]
    fn path_and_disconnected() {
        let p = Graph::path(4).unwrap();
        assert_eq!(cut_vertex_count(&adj(&p)), 2);
        assert_eq!(edge_connectivity(&adj(&p)), 1);
        let d = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(component_labels(&adj(&d)).1, 2);
        assert_eq!(vertex_connectivity(&adj(&d)), 0);
        assert_eq!(edge_connectivity(&adj(&d)), 0);
    }

    #[test]
    fn petersen_connectivity() {
        let a = adj(&Graph::petersen());
        assert_eq!(vertex_connectivity(&a), 3);
        assert_eq!(edge_connectivity(&a), 3);
        assert!(!is_bipartite(&a));
    }

    #[test]
    fn bipartite_checks() {
        assert!(is_bipartite(&adj(&Graph::cycle(6).unwrap())));
        assert!(!is_bipartite(&adj(&Graph::cycle(5).unwrap())));
    }
}
