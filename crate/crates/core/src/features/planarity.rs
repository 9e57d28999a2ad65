//! Planarity by the Demoucron–Malgrange–Pertuiset path-embedding algorithm,
//! applied to each biconnected block.

use crate::Graph;
use std::collections::BTreeSet;

pub fn is_planar(g: &Graph) -> bool {
    let n = g.n();
    let m = g.m();
    if n <= 4 || m < 9 {
        return true;
    }
    if m > 3 * n - 6 {
        return false;
    }
    let adj = g.neighbors();
    biconnected_blocks(&adj).into_iter().all(|block| block_is_planar(n, &block))
}

/// Edge sets of the biconnected components (Hopcroft–Tarjan with an edge stack).
fn biconnected_blocks(adj: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        blocks: Vec<Vec<(usize, usize)>>,
    }

    fn dfs(st: &mut State<'_>, u: usize, parent: Option<usize>) {
        st.time += 1;
        st.disc[u] = st.time;
        st.low[u] = st.time;
        for i in 0..st.adj[u].len() {
            let v = st.adj[u][i];
            if st.disc[v] == 0 {
                st.stack.push((u, v));
                dfs(st, v, Some(u));
                st.low[u] = st.low[u].min(st.low[v]);
                if st.low[v] >= st.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = st.stack.pop() {
                        block.push(e);
                        if e == (u, v) {
                            break;
                        }
                    }
                    st.blocks.push(block);
                }
            } else if Some(v) != parent && st.disc[v] < st.disc[u] {
                st.stack.push((u, v));
                st.low[u] = st.low[u].min(st.disc[v]);
            }
        }
    }

    let n = adj.len();
    let mut st = State {
        adj,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    for s in 0..n {
        if st.disc[s] == 0 {
            dfs(&mut st, s, None);
        }
    }
    st.blocks
}

fn block_is_planar(n: usize, block: &[(usize, usize)]) -> bool {
    let verts: BTreeSet<usize> = block.iter().flat_map(|&(u, v)| [u, v]).collect();
    let nb = verts.len();
    if nb <= 4 || block.len() < 9 {
        return true;
    }
    if block.len() > 3 * nb - 6 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in block {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut embedded_vertex = vec![false; n];
    let mut embedded_edge = vec![vec![false; n]; n];
    let cycle = find_cycle(&adj, *verts.iter().next().expect("non-empty block"));
    for (i, &v) in cycle.iter().enumerate() {
        let w = cycle[(i + 1) % cycle.len()];
        embedded_vertex[v] = true;
        embedded_edge[v][w] = true;
        embedded_edge[w][v] = true;
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle.into_iter().rev().collect()];

    loop {
        let fragments = fragments(&adj, &verts, &embedded_vertex, &embedded_edge);
        if fragments.is_empty() {
            return true;
        }
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&k| frag.attachments.iter().all(|a| faces[k].contains(a)))
                .collect();
            match admissible.len() {
                0 => return false,
                1 => {
                    choice = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face_idx) = choice.expect("at least one fragment");
        let path = fragments[fi].path(&adj, &embedded_vertex);
        for w in path.windows(2) {
            embedded_edge[w[0]][w[1]] = true;
            embedded_edge[w[1]][w[0]] = true;
        }
        for &v in &path {
            embedded_vertex[v] = true;
        }
        let face = faces.swap_remove(face_idx);
        let (f1, f2) = split_face(&face, &path);
        faces.push(f1);
        faces.push(f2);
    }
}

/// Any cycle through the DFS tree rooted at `root`, as a vertex sequence.
fn find_cycle(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(root, usize::MAX)];
    while let Some((u, p)) = stack.pop() {
        if depth[u] != usize::MAX {
            continue;
        }
        parent[u] = p;
        depth[u] = if p == usize::MAX { 0 } else { depth[p] + 1 };
        for &v in &adj[u] {
            if depth[v] == usize::MAX {
                stack.push((v, u));
            }
        }
    }
    // a non-tree edge (u, w) closes the cycle u -> ... -> lca <- ... <- w
    for u in 0..n {
        for &w in &adj[u] {
            if depth[u] == usize::MAX || parent[u] == w || parent[w] == u || u > w {
                continue;
            }
            let (mut a, mut b) = (u, w);
            let mut left = vec![a];
            let mut right = vec![b];
            while a != b {
                if depth[a] >= depth[b] {
                    a = parent[a];
                    left.push(a);
                } else {
                    b = parent[b];
                    right.push(b);
                }
            }
            right.pop();
            left.extend(right.into_iter().rev());
            return left;
        }
    }
    unreachable!("a biconnected block with >= 3 vertices has a cycle")
}

struct Fragment {
    attachments: BTreeSet<usize>,
    /// unembedded vertices of the fragment; empty for a chord
    interior: BTreeSet<usize>,
    chord: Option<(usize, usize)>,
}

impl Fragment {
    /// A path between two distinct attachments through the fragment.
    fn path(&self, adj: &[Vec<usize>], embedded: &[bool]) -> Vec<usize> {
        if let Some((u, v)) = self.chord {
            return vec![u, v];
        }
        let start = *self.attachments.iter().next().expect("attachment");
        let n = adj.len();
        let mut prev = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for &c in &adj[start] {
            if self.interior.contains(&c) && prev[c] == usize::MAX {
                prev[c] = start;
                queue.push_back(c);
            }
        }
        while let Some(x) = queue.pop_front() {
            if let Some(&end) = adj[x].iter().find(|&&y| embedded[y] && y != start) {
                let mut path = vec![end, x];
                let mut cur = x;
                while prev[cur] != start {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.push(start);
                path.reverse();
                return path;
            }
            for &y in &adj[x] {
                if self.interior.contains(&y) && prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        unreachable!("fragments of a biconnected block have two attachments")
    }
}

fn fragments(
    adj: &[Vec<usize>],
    verts: &BTreeSet<usize>,
    embedded_vertex: &[bool],
    embedded_edge: &[Vec<bool>],
) -> Vec<Fragment> {
    let mut out = Vec::new();
    for &u in verts {
        if !embedded_vertex[u] {
            continue;
        }
        for &v in &adj[u] {
            if u < v && embedded_vertex[v] && !embedded_edge[u][v] {
                out.push(Fragment {
                    attachments: BTreeSet::from([u, v]),
                    interior: BTreeSet::new(),
                    chord: Some((u, v)),
                });
            }
        }
    }
    let mut seen = vec![false; adj.len()];
    for &s in verts {
        if embedded_vertex[s] || seen[s] {
            continue;
        }
        let mut interior = BTreeSet::new();
        let mut attachments = BTreeSet::new();
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            interior.insert(x);
            for &y in &adj[x] {
                if embedded_vertex[y] {
                    attachments.insert(y);
                } else if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out.push(Fragment { attachments, interior, chord: None });
    }
    out
}

/// Splits a face boundary along a path whose endpoints lie on it.
fn split_face(face: &[usize], path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let a = path[0];
    let b = *path.last().expect("path has endpoints");
    let len = face.len();
    let ia = face.iter().position(|&x| x == a).expect("a on face");
    let ib = face.iter().position(|&x| x == b).expect("b on face");
    let interior = &path[1..path.len() - 1];

    let mut f1 = Vec::new();
    let mut i = ia;
    loop {
        f1.push(face[i]);
        if i == ib {
            break;
        }
        i = (i + 1) % len;
    }
    f1.extend(interior.iter().rev());

    let mut f2 = Vec::new();
    let mut i = ib;
    loop {
        f2.push(face[i]);
        if i == ia {
            break;
        }
        i = (i + 1) % len;
    }
    f2.extend(interior.iter());
    (f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuratowski_graphs() {
        assert!(is_planar(&Graph::complete(4).unwrap()));
        assert!(!is_planar(&Graph::complete(5).unwrap()));
        assert!(!is_planar(&Graph::complete_bipartite(3, 3).unwrap()));
        assert!(!is_planar(&Graph::petersen()));
    }

    #[test]
    fn planar_families() {
        // cube graph
        let cube = Graph::new(
            8,
            [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        )
        .unwrap();
        assert!(is_planar(&cube));
        // wheel on 8 vertices
        let mut edges: Vec<(usize, usize)> = (1..8).map(|i| (0, i)).collect();
        edges.extend((1..8).map(|i| (i, if i == 7 { 1 } else { i + 1 })));
        assert!(is_planar(&Graph::new(8, edges).unwrap()));
        // octahedron K_{2,2,2}
        let oct = Graph::new(6, (0..6).flat_map(|u| (u + 1..6).filter(move |&v| v != u + 3 || u >= 3).map(move |v| (u, v))))
            .unwrap();
        assert_eq!(oct.m(), 12);
        assert!(is_planar(&oct));
    }

    #[test]
    fn subdivided_k33_is_not_planar() {
        // K3,3 with edge (0,3) subdivided by vertex 6 and two pendant triangles attached
        let mut edges: Vec<(usize, usize)> =
            (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).filter(|&e| e != (0, 3)).collect();
        edges.extend([(0, 6), (6, 3), (6, 7), (7, 8), (8, 6)]);
        assert!(!is_planar(&Graph::new(9, edges).unwrap()));
    }

    #[test]
    fn k5_minus_edge_glued_to_k4() {
        let mut edges: Vec<(usize, usize)> =
            (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).filter(|&e| e != (0, 1)).collect();
        edges.extend([(4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]);
        assert!(is_planar(&Graph::new(8, edges).unwrap()));
    }
}
