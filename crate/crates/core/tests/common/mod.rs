//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qaoa_lab::graph::{derive_instance_seed, generate_instance};
use qaoa_lab::{GenConfig, Graph, InstanceClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn sample(class: InstanceClass, n: usize, base: u64, index: u64) -> Graph {
    let seed = derive_instance_seed(base, class.tag(), index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_instance(&GenConfig::new(class, n, seed), &mut rng).expect("generator")
}

/// Straight loop over every assignment and every edge.
pub fn brute_max_cut(g: &Graph) -> u32 {
    let mut best = 0;
    for z in 0u64..(1 << g.n()) {
        let cut = g.edges().iter().filter(|&&(u, v)| (z >> u) & 1 != (z >> v) & 1).count() as u32;
        best = best.max(cut);
    }
    best
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// |Aut(G)| and orbit count by trying all n! permutations.
pub fn brute_automorphisms(g: &Graph) -> (u64, usize) {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    loop {
        let ok = g.edges().iter().all(|&(u, v)| adj[perm[u]][perm[v]]);
        if ok {
            count += 1;
            for v in 0..n {
                let (a, b) = (find(&mut parent, v), find(&mut parent, perm[v]));
                parent[a] = b;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let orbits = (0..n).map(|v| find(&mut parent, v)).collect::<BTreeSet<_>>().len();
    (count, orbits)
}

/// Chordless odd cycles found by DFS from each cycle's smallest vertex,
/// deduplicated by vertex set.
pub fn brute_induced_odd_cycles(g: &Graph) -> usize {
    let n = g.n();
    let adj = g.neighbors();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    fn dfs(adj: &[Vec<usize>], path: &mut Vec<usize>, found: &mut BTreeSet<Vec<usize>>) {
        let start = path[0];
        let last = *path.last().unwrap();
        for &w in &adj[last] {
            if w == start && path.len() >= 3 && path.len() % 2 == 1 {
                let chordless = (0..path.len()).all(|i| {
                    (i + 2..path.len()).all(|j| {
                        (i == 0 && j == path.len() - 1) || !adj[path[i]].contains(&path[j])
                    })
                });
                if chordless {
                    let mut key = path.clone();
                    key.sort_unstable();
                    found.insert(key);
                }
            }
            if w > start && !path.contains(&w) {
                path.push(w);
                dfs(adj, path, found);
                path.pop();
            }
        }
    }
    for s in 0..n {
        dfs(&adj, &mut vec![s], &mut found);
    }
    found.len()
}

fn kron(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn kron_chain(factors: &[Vec<Vec<Complex64>>]) -> Vec<Vec<Complex64>> {
    let mut acc = vec![vec![Complex64::new(1.0, 0.0)]];
    for f in factors {
        acc = kron(&acc, f);
    }
    acc
}

fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// QAOA energy from dense Kronecker products. Qubit 0 is the least
/// significant bit, so it is the last factor of each chain.
pub fn dense_energy(g: &Graph, gamma: &[f64], beta: &[f64]) -> f64 {
    let n = g.n();
    let dim = 1 << n;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let id = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let z = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]];
    let mut cost = vec![0.0; dim];
    for &(u, v) in g.edges() {
        let factors: Vec<_> = (0..n).rev().map(|q| if q == u || q == v { z.clone() } else { id.clone() }).collect();
        let zz = kron_chain(&factors);
        for (i, c) in cost.iter_mut().enumerate() {
            *c += 0.5 * (1.0 - zz[i][i].re);
        }
    }
    let mut psi = vec![c(1.0 / (dim as f64).sqrt(), 0.0); dim];
    for (&gm, &bt) in gamma.iter().zip(beta) {
        for (a, &cv) in psi.iter_mut().zip(&cost) {
            *a *= Complex64::from_polar(1.0, -gm * cv);
        }
        let rx = vec![vec![c(bt.cos(), 0.0), c(0.0, -bt.sin())], vec![c(0.0, -bt.sin()), c(bt.cos(), 0.0)]];
        let mixer = kron_chain(&vec![rx; n]);
        psi = matvec(&mixer, &psi);
    }
    psi.iter().zip(&cost).map(|(a, cv)| a.norm_sqr() * cv).sum()
}

/// Analytic p = 1 energy summed edge by edge.
pub fn p1_closed_form(g: &Graph, gamma: f64, beta: f64) -> f64 {
    let adj = g.neighbors();
    let deg = g.degrees();
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let du = (deg[u] - 1) as i32;
            let dv = (deg[v] - 1) as i32;
            let tri = adj[u].iter().filter(|w| adj[v].contains(w)).count() as i32;
            let cg = gamma.cos();
            0.5 + 0.25 * (4.0 * beta).sin() * gamma.sin() * (cg.powi(du) + cg.powi(dv))
                - 0.25 * (2.0 * beta).sin().powi(2) * cg.powi(du + dv - 2 * tri) * (1.0 - (2.0 * gamma).cos().powi(tri))
        })
        .sum()
}

/// Whitney chain check: κ ≤ λ ≤ δ.
pub fn whitney_holds(f: &qaoa_lab::FeatureVector) -> bool {
    f.vertex_connectivity <= f.edge_connectivity && f.edge_connectivity <= f.minimum_degree
}
