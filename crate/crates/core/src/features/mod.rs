//! The 28-entry instance feature vector.
//!
//! Booleans are encoded as `0.0`/`1.0`. Distance features of a disconnected
//! graph are taken over its largest component (ties go to the component
//! holding the smallest vertex); `connected` disambiguates.

pub mod automorphism;
pub mod connectivity;
pub mod cycles;
pub mod distance;
pub mod linalg;
pub mod planarity;

pub use automorphism::{automorphism_stats, AutomorphismError, AutomorphismStats};
pub use cycles::minimal_odd_cycle_count;
pub use linalg::{symmetric_eigen, symmetric_eigenvalues, LinalgError, SymmetricEigen, SymmetricSpectrum};
pub use planarity::is_planar;

use crate::format::sig9;
use crate::Graph;
use serde::{Deserialize, Serialize};
use std::io;
use thiserror::Error;

/// Largest graph for which the exhaustive features are computed.
pub const MAX_FEATURE_VERTICES: usize = 16;

/// Eigenvalues below this magnitude are treated as zero.
const ZERO_EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("feature extraction limited to n <= {MAX_FEATURE_VERTICES}, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("feature CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

macro_rules! feature_vector {
    ($($field:ident => $name:literal),* $(,)?) => {
        /// Named instance features, in canonical column order.
        #[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
        pub struct FeatureVector {
            $(pub $field: f64,)*
        }

        impl FeatureVector {
            /// Canonical column names, also used as CSV headers.
            pub const NAMES: [&'static str; 28] = [$($name),*];

            pub fn to_array(&self) -> [f64; 28] {
                [$(self.$field),*]
            }

            pub fn from_array(values: [f64; 28]) -> Self {
                let [$($field),*] = values;
                Self { $($field),* }
            }

            pub fn get(&self, name: &str) -> Option<f64> {
                match name {
                    $($name => Some(self.$field),)*
                    _ => None,
                }
            }
        }
    };
}

feature_vector! {
    number_of_edges => "numberOfEdges",
    bipartite => "bipartite",
    clique_number => "cliqueNumber",
    connected => "connected",
    density => "density",
    edge_connectivity => "edgeConnectivity",
    maximum_degree => "maximumDegree",
    minimum_degree => "minimumDegree",
    minimum_dominating_set_size => "minimumDominatingSetSize",
    regular => "regular",
    smallest_adjacency_eigenvalue => "smallestAdjacencyEigenvalue",
    vertex_connectivity => "vertexConnectivity",
    acyclic => "acyclic",
    average_distance => "averageDistance",
    diameter => "diameter",
    eulerian => "eulerian",
    number_of_components => "numberOfComponents",
    planar => "planar",
    radius => "radius",
    algebraic_connectivity => "algebraicConnectivity",
    laplacian_largest_eigenvalue => "laplacianLargestEigenvalue",
    ratio_two_largest_laplacian_eigenvalues => "ratioTwoLargestLaplacianEigenvalues",
    ratio_two_smallest_laplacian_eigenvalues => "ratioTwoSmallestLaplacianEigenvalues",
    distance_regular => "distanceRegular",
    group_size => "groupSize",
    number_of_cut_vertices => "numberOfCutVertices",
    number_of_minimal_odd_cycles => "numberOfMinimalOddCycles",
    number_of_orbits => "numberOfOrbits",
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; g.n()]; g.n()];
    for &(u, v) in g.edges() {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

/// `L = D - A`.
pub fn laplacian_matrix(g: &Graph) -> Vec<Vec<f64>> {
    let mut l = adjacency_matrix(g);
    let deg = g.degrees();
    for (i, row) in l.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x = -*x;
        }
        row[i] = deg[i] as f64;
    }
    l
}

pub fn compute_features(g: &Graph) -> Result<FeatureVector, FeatureError> {
    let n = g.n();
    if n > MAX_FEATURE_VERTICES {
        return Err(FeatureError::TooLarge(n));
    }
    let m = g.m();
    let adj = g.neighbors();
    let masks = g.adjacency_masks().expect("n <= 16");
    let deg = g.degrees();
    let max_deg = *deg.iter().max().expect("n >= 1");
    let min_deg = *deg.iter().min().expect("n >= 1");

    let (labels, components) = connectivity::component_labels(&adj);
    let connected = components == 1;

    let dist = distance::all_pairs_distances(&adj);
    let largest = largest_component(&labels, components);
    let dsum = distance::summarize(&dist, &largest);

    let adj_spec = symmetric_eigenvalues(&adjacency_matrix(g))?;
    let lap_spec = symmetric_eigenvalues(&laplacian_matrix(g))?;
    let lap = lap_spec.values();
    let clamp0 = |x: f64| if x.abs() < ZERO_EIGEN_TOL { 0.0 } else { x };
    let lambda_max = lap[n - 1];
    let algebraic = if n >= 2 { clamp0(lap[1]).max(0.0) } else { 0.0 };
    let ratio_largest = if n >= 2 && clamp0(lap[n - 2]) != 0.0 { lambda_max / lap[n - 2] } else { 0.0 };
    let ratio_smallest = if n >= 2 && algebraic != 0.0 { 0.0 / algebraic } else { 0.0 };

    let auto = automorphism_stats(g)?;
    let odd_cycles = minimal_odd_cycle_count(g).expect("n <= 16");

    let non_isolated: Vec<usize> = (0..n).filter(|&v| deg[v] > 0).collect();
    let eulerian = deg.iter().all(|d| d % 2 == 0)
        && non_isolated.windows(2).all(|w| labels[w[0]] == labels[w[1]]);

    Ok(FeatureVector {
        number_of_edges: m as f64,
        bipartite: flag(connectivity::is_bipartite(&adj)),
        clique_number: clique_number(&masks) as f64,
        connected: flag(connected),
        density: if n >= 2 { 2.0 * m as f64 / (n * (n - 1)) as f64 } else { 0.0 },
        edge_connectivity: connectivity::edge_connectivity(&adj) as f64,
        maximum_degree: max_deg as f64,
        minimum_degree: min_deg as f64,
        minimum_dominating_set_size: minimum_dominating_set_size(&masks) as f64,
        regular: flag(max_deg == min_deg),
        smallest_adjacency_eigenvalue: adj_spec.smallest().expect("n >= 1"),
        vertex_connectivity: connectivity::vertex_connectivity(&adj) as f64,
        acyclic: flag(m + components == n),
        average_distance: dsum.average_distance,
        diameter: dsum.diameter as f64,
        eulerian: flag(eulerian),
        number_of_components: components as f64,
        planar: flag(is_planar(g)),
        radius: dsum.radius as f64,
        algebraic_connectivity: algebraic,
        laplacian_largest_eigenvalue: lambda_max,
        ratio_two_largest_laplacian_eigenvalues: ratio_largest,
        ratio_two_smallest_laplacian_eigenvalues: ratio_smallest,
        distance_regular: flag(distance::is_distance_regular(&adj, &dist)),
        group_size: auto.group_size as f64,
        number_of_cut_vertices: connectivity::cut_vertex_count(&adj) as f64,
        number_of_minimal_odd_cycles: odd_cycles as f64,
        number_of_orbits: auto.num_orbits() as f64,
    })
}

fn largest_component(labels: &[usize], components: usize) -> Vec<usize> {
    let mut sizes = vec![0usize; components];
    for &l in labels {
        sizes[l] += 1;
    }
    // labels follow first appearance, so the first maximum holds the smallest vertex
    let best = (0..components).fold(0, |b, c| if sizes[c] > sizes[b] { c } else { b });
    (0..labels.len()).filter(|&v| labels[v] == best).collect()
}

/// Bron–Kerbosch with pivoting over neighbourhood bitmasks.
pub fn clique_number(masks: &[u64]) -> usize {
    fn expand(masks: &[u64], size: usize, mut p: u64, mut x: u64, best: &mut usize) {
        if p == 0 && x == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + p.count_ones() as usize <= *best {
            return;
        }
        let pivot_pool = p | x;
        let pivot = (0..masks.len())
            .filter(|&u| pivot_pool >> u & 1 == 1)
            .max_by_key(|&u| (masks[u] & p).count_ones())
            .expect("non-empty pool");
        let mut candidates = p & !masks[pivot];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            let bit = 1u64 << v;
            expand(masks, size + 1, p & masks[v], x & masks[v], best);
            p &= !bit;
            x |= bit;
            candidates &= !bit;
        }
    }
    let n = masks.len();
    if n == 0 {
        return 0;
    }
    let mut best = 1;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    expand(masks, 0, all, 0, &mut best);
    best
}

/// Smallest dominating set by scanning subsets in order of cardinality.
pub fn minimum_dominating_set_size(masks: &[u64]) -> usize {
    let n = masks.len();
    let all = (1u64 << n) - 1;
    let closed: Vec<u64> = masks.iter().enumerate().map(|(v, &m)| m | 1 << v).collect();
    let mut best = n;
    for subset in 1u64..=all {
        let size = subset.count_ones() as usize;
        if size >= best {
            continue;
        }
        let mut covered = 0u64;
        let mut s = subset;
        while s != 0 {
            covered |= closed[s.trailing_zeros() as usize];
            s &= s - 1;
        }
        if covered == all {
            best = size;
        }
    }
    best
}

/// Writes `id,<28 feature names>` followed by one row per instance.
pub fn write_feature_csv<W: io::Write>(writer: W, rows: &[(String, FeatureVector)]) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id"];
    header.extend(FeatureVector::NAMES);
    w.write_record(&header).map_err(|e| FeatureError::Csv(e.to_string()))?;
    for (id, fv) in rows {
        let mut rec = vec![id.clone()];
        rec.extend(fv.to_array().iter().map(|&x| sig9(x)));
        w.write_record(&rec).map_err(|e| FeatureError::Csv(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_k4() {
        let f = compute_features(&Graph::complete(4).unwrap()).unwrap();
        assert_eq!(f.density, 1.0);
        assert_eq!(f.clique_number, 4.0);
        assert_eq!(f.regular, 1.0);
        assert_eq!(f.group_size, 24.0);
        assert_eq!(f.number_of_orbits, 1.0);
        assert_eq!(f.planar, 1.0);
        assert_eq!(f.number_of_minimal_odd_cycles, 4.0);
        assert_eq!(f.vertex_connectivity, 3.0);
        assert_eq!(f.minimum_dominating_set_size, 1.0);
        assert!((f.smallest_adjacency_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_three_spectrum() {
        let f = compute_features(&Graph::path(3).unwrap()).unwrap();
        assert!((f.laplacian_largest_eigenvalue - 3.0).abs() < 1e-12);
        assert!((f.algebraic_connectivity - 1.0).abs() < 1e-12);
        assert!((f.ratio_two_largest_laplacian_eigenvalues - 3.0).abs() < 1e-12);
        assert_eq!(f.ratio_two_smallest_laplacian_eigenvalues, 0.0);
        assert_eq!(f.acyclic, 1.0);
        assert_eq!(f.number_of_cut_vertices, 1.0);
        assert_eq!(f.eulerian, 0.0);
    }

    #[test]
    fn disconnected_graph_uses_largest_component() {
        // triangle plus an isolated edge
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let f = compute_features(&g).unwrap();
        assert_eq!(f.connected, 0.0);
        assert_eq!(f.number_of_components, 2.0);
        assert_eq!(f.diameter, 1.0);
        assert_eq!(f.average_distance, 1.0);
        assert_eq!(f.algebraic_connectivity, 0.0);
        assert_eq!(f.edge_connectivity, 0.0);
        assert_eq!(f.distance_regular, 0.0);
        assert_eq!(f.ratio_two_smallest_laplacian_eigenvalues, 0.0);
    }

    #[test]
    fn cycle_is_eulerian() {
        let f = compute_features(&Graph::cycle(6).unwrap()).unwrap();
        assert_eq!(f.eulerian, 1.0);
        assert_eq!(f.bipartite, 1.0);
        assert_eq!(f.minimum_dominating_set_size, 2.0);
    }

    #[test]
    fn rejects_large_graphs() {
        assert!(matches!(compute_features(&Graph::empty(17).unwrap()), Err(FeatureError::TooLarge(17))));
    }

    #[test]
    fn names_are_unique_and_lookup_works() {
        let mut names = FeatureVector::NAMES.to_vec();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 28);
        let f = compute_features(&Graph::complete(3).unwrap()).unwrap();
        assert_eq!(f.get("numberOfEdges"), Some(3.0));
        assert_eq!(f.get("nope"), None);
        assert_eq!(FeatureVector::from_array(f.to_array()), f);
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        let f = compute_features(&Graph::complete(3).unwrap()).unwrap();
        write_feature_csv(&mut buf, &[("k3".into(), f)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("id,numberOfEdges,bipartite,"));
        assert!(lines.next().unwrap().starts_with("k3,3,0,3,1,1,"));
    }
}
