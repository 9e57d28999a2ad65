//! Vertex-minimal odd cycles.
//!
//! An odd cycle whose vertex set strictly contains no other odd cycle's vertex
//! set cannot have a chord: a chord splits an odd cycle into an odd and an
//! even cycle on fewer vertices. Conversely an induced cycle's vertex set
//! supports no other cycle. Minimal odd cycles are therefore exactly the
//! induced odd cycles, counted here by scanning vertex subsets.

use crate::Graph;

pub const MAX_VERTICES: usize = 20;

/// Number of induced odd cycles (triangles included). `None` for `n > 20`.
pub fn minimal_odd_cycle_count(g: &Graph) -> Option<u64> {
    let n = g.n();
    if n > MAX_VERTICES {
        return None;
    }
    let masks = g.adjacency_masks()?;
    let mut count = 0;
    for subset in 1u64..(1u64 << n) {
        let size = subset.count_ones();
        if size < 3 || size % 2 == 0 {
            continue;
        }
        if induces_cycle(&masks, subset) {
            count += 1;
        }
    }
    Some(count)
}

/// True when the subgraph induced by `subset` is a single cycle.
fn induces_cycle(masks: &[u64], subset: u64) -> bool {
    let mut rest = subset;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        if (masks[v] & subset).count_ones() != 2 {
            return false;
        }
        rest &= rest - 1;
    }
    // 2-regular: a single cycle iff connected
    let start = subset.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            next |= masks[v] & subset;
            f &= f - 1;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == subset
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_has_none() {
        assert_eq!(minimal_odd_cycle_count(&Graph::complete_bipartite(3, 3).unwrap()), Some(0));
        assert_eq!(minimal_odd_cycle_count(&Graph::cycle(6).unwrap()), Some(0));
    }

    #[test]
    fn triangle_and_k4() {
        assert_eq!(minimal_odd_cycle_count(&Graph::complete(3).unwrap()), Some(1));
        assert_eq!(minimal_odd_cycle_count(&Graph::complete(4).unwrap()), Some(4));
    }

    #[test]
    fn chorded_pentagon() {
        // C5 plus chord 0-2 leaves the triangle 0-1-2 as the only minimal odd cycle
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        assert_eq!(minimal_odd_cycle_count(&g), Some(1));
    }

    #[test]
    fn petersen_has_twelve_pentagons() {
        assert_eq!(minimal_odd_cycle_count(&Graph::petersen()), Some(12));
    }
}
