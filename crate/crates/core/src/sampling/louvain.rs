//! Louvain modularity optimisation (local moving + aggregation).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::graph::Graph;
use crate::rng;

/// Community labels `0..count` for each actor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<usize>,
}

impl Partition {
    pub fn count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each community, in label order.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count()];
        for (v, &c) in self.labels.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Weighted adjacency where `k_i = Σ_j a_ij`; an internal edge of weight w
/// shows up as a diagonal entry of 2w after aggregation.
struct Weighted {
    adj: Vec<Vec<(usize, f64)>>,
    strength: Vec<f64>,
    total: f64,
}

impl Weighted {
    fn from_graph(g: &Graph) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = (0..g.n()).map(|v| g.neighbors(v).map(|u| (u, 1.0)).collect()).collect();
        Self::from_adj(adj)
    }

    fn from_adj(adj: Vec<Vec<(usize, f64)>>) -> Self {
        let strength: Vec<f64> = adj.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect();
        let total = strength.iter().sum();
        Weighted { adj, strength, total }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }
}

/// Local-moving pass. Returns node labels (renumbered) and whether any node
/// moved.
fn local_moving<R: rand::Rng>(w: &Weighted, rng: &mut R) -> (Vec<usize>, bool) {
    let n = w.len();
    let mut label: Vec<usize> = (0..n).collect();
    let mut tot: Vec<f64> = w.strength.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut moved_any = false;
    let mut links: BTreeMap<usize, f64> = BTreeMap::new();
    loop {
        let mut moved = false;
        for &i in &order {
            let ki = w.strength[i];
            let own = label[i];
            links.clear();
            for &(j, wij) in &w.adj[i] {
                if j != i {
                    *links.entry(label[j]).or_insert(0.0) += wij;
                }
            }
            tot[own] -= ki;
            let gain = |c: usize, kic: f64, tot: &[f64]| kic - tot[c] * ki / w.total;
            let mut best = own;
            let mut best_gain = gain(own, links.get(&own).copied().unwrap_or(0.0), &tot);
            for (&c, &kic) in &links {
                let g = gain(c, kic, &tot);
                if g > best_gain + 1e-12 {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += ki;
            if best != own {
                label[i] = best;
                moved = true;
                moved_any = true;
            }
        }
        if !moved {
            break;
        }
    }
    (renumber(&label), moved_any)
}

fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

fn aggregate(w: &Weighted, labels: &[usize]) -> Weighted {
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
    for (i, row) in w.adj.iter().enumerate() {
        for &(j, wij) in row {
            *rows[labels[i]].entry(labels[j]).or_insert(0.0) += wij;
        }
    }
    Weighted::from_adj(rows.into_iter().map(|r| r.into_iter().collect()).collect())
}

/// Partitions `g` by greedy modularity optimisation (resolution 1).
/// Isolated actors form singleton communities.
pub fn louvain(g: &Graph, seed: u64) -> Partition {
    let mut rng = rng::from_seed(seed);
    let mut labels: Vec<usize> = (0..g.n()).collect();
    let mut w = Weighted::from_graph(g);
    if w.total == 0.0 {
        return Partition { labels };
    }
    loop {
        let (level, moved) = local_moving(&w, &mut rng);
        if !moved {
            break;
        }
        for l in labels.iter_mut() {
            *l = level[*l];
        }
        w = aggregate(&w, &level);
    }
    Partition { labels: renumber(&labels) }
}

/// Newman modularity of a labelling of `g`.
pub fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m2 = 2.0 * g.edge_count() as f64;
    if m2 == 0.0 {
        return 0.0;
    }
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut inside = vec![0.0; count];
    let mut tot = vec![0.0; count];
    for v in 0..g.n() {
        tot[labels[v]] += g.degree(v) as f64;
        for u in g.neighbors(v) {
            if labels[u] == labels[v] {
                inside[labels[v]] += 1.0;
            }
        }
    }
    inside.iter().zip(&tot).map(|(i, t)| i / m2 - (t / m2) * (t / m2)).sum()
}
