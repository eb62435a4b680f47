use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{NodeSet, SampleFlag, Strategy};
use crate::graph::Graph;
use crate::rng;

/// Random-permutation maximal independent set.
///
/// Draws a permutation π and scans actors in π order, keeping each actor
/// none of whose neighbours has been kept. Every actor that precedes all of
/// its neighbours in π (the local-minimum set) is kept, and the scan makes
/// the result maximal.
pub fn maximal_independent_set(g: &Graph, seed: u64) -> NodeSet {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(&mut rng::from_seed(seed));
    let mut blocked = vec![false; g.n()];
    let mut members = Vec::new();
    for v in order {
        if blocked[v] {
            continue;
        }
        members.push(v);
        blocked[v] = true;
        for u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    NodeSet::new(Strategy::Independent, members)
}

/// [`maximal_independent_set`] uniformly subsampled to at most `cap` members.
pub fn maximal_independent_set_capped(g: &Graph, cap: Option<usize>, seed: u64) -> NodeSet {
    let full = maximal_independent_set(g, rng::derive(seed, &[0]));
    match cap {
        Some(k) if k < full.len() => {
            let mut r = rng::from_seed(rng::derive(seed, &[1]));
            let picked = rand::seq::index::sample(&mut r, full.len(), k)
                .into_iter()
                .map(|i| full.members[i])
                .collect();
            let mut set = NodeSet::new(Strategy::Independent, picked);
            set.flags.push(SampleFlag::Subsampled);
            set
        }
        _ => full,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_six_gives_two_or_three() {
        let c6 = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        let mut sizes = [false; 7];
        for seed in 0..200 {
            let s = maximal_independent_set(&c6, seed);
            assert!(s.is_independent(&c6) && s.is_dominating(&c6));
            sizes[s.len()] = true;
        }
        assert!(sizes[2] && sizes[3]);
        assert!(!sizes[0] && !sizes[1] && !sizes[4]);
    }

    #[test]
    fn edgeless_graph_takes_everyone() {
        let g = Graph::new(5);
        assert_eq!(maximal_independent_set(&g, 3).members, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn path_outcomes_follow_first_position() {
        // Enumerating the 6 orders of a-b-c: b first gives {b}; otherwise {a, c}.
        let p = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let (mut middle, mut ends) = (0, 0);
        for seed in 0..3000 {
            match maximal_independent_set(&p, seed).members.as_slice() {
                [1] => middle += 1,
                [0, 2] => ends += 1,
                other => panic!("unexpected set {other:?}"),
            }
        }
        let share = middle as f64 / 3000.0;
        assert!((share - 1.0 / 3.0).abs() < 0.04, "{share}");
        assert!(ends > 0);
    }

    #[test]
    fn capped_sets_stay_independent() {
        let g = crate::graph::generate_scale_free(100, 2.5, 4.0, 1).unwrap();
        let s = maximal_independent_set_capped(&g, Some(10), 4);
        assert_eq!(s.len(), 10);
        assert!(s.is_independent(&g));
        assert_eq!(s.flags, vec![SampleFlag::Subsampled]);
        let full = maximal_independent_set_capped(&g, None, 4);
        assert!(full.is_dominating(&g));
    }
}
