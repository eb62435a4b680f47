//! Treatment-group selection and independence-number bounds.

mod budget;
mod louvain;
mod mis;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub use budget::{budgeted_independent_set, BudgetSpec, BudgetedSolution, EXACT_SOLVER_MAX_ACTORS};
pub use louvain::{louvain, modularity, Partition};
pub use mis::{maximal_independent_set, maximal_independent_set_capped};

/// How a [`NodeSet`] was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Independent,
    Random,
    Cluster,
    BudgetedIndependent,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Independent => "independent",
            Strategy::Random => "random",
            Strategy::Cluster => "cluster",
            Strategy::BudgetedIndependent => "budgeted-independent",
        }
    }
}

impl core::fmt::Display for Strategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "independent" => Ok(Strategy::Independent),
            "random" => Ok(Strategy::Random),
            "cluster" => Ok(Strategy::Cluster),
            "budgeted-independent" => Ok(Strategy::BudgetedIndependent),
            other => Err(Error::invalid(alloc::format!("unknown sampling strategy `{other}`"))),
        }
    }
}

/// Conditions attached to a drawn sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleFlag {
    /// Cluster accumulation could not land within the size tolerance.
    SizeDeviation,
    /// The budgeted program was solved heuristically, optimality unknown.
    Heuristic,
    /// A maximal independent set was uniformly subsampled to a cap.
    Subsampled,
}

/// A treatment group. Members are sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSet {
    pub strategy: Strategy,
    pub members: Vec<usize>,
    pub flags: Vec<SampleFlag>,
}

impl NodeSet {
    pub fn new(strategy: Strategy, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        NodeSet { strategy, members, flags: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Membership indicator over `n` actors.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut x = alloc::vec![false; n];
        for &v in &self.members {
            if v < n {
                x[v] = true;
            }
        }
        x
    }

    /// True when no two members are adjacent in `g`.
    pub fn is_independent(&self, g: &Graph) -> bool {
        self.members
            .iter()
            .all(|&u| self.members.iter().all(|&v| u == v || !g.has_edge(u, v)))
    }

    /// Number of `g` edges with both endpoints in the set.
    pub fn internal_edges(&self, g: &Graph) -> usize {
        let x = self.indicator(g.n());
        self.members
            .iter()
            .map(|&u| g.neighbors(u).filter(|&v| v > u && x[v]).count())
            .sum()
    }

    /// True when every non-member has at least one member neighbour.
    pub fn is_dominating(&self, g: &Graph) -> bool {
        let x = self.indicator(g.n());
        (0..g.n()).all(|v| x[v] || g.neighbors(v).any(|u| x[u]))
    }
}

/// Bounds on the independence number α(G).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceBounds {
    /// `n - ceil(e / Δ)`; `n` for edgeless graphs.
    pub upper: usize,
    /// The unrounded `n - e / Δ`.
    pub upper_raw: f64,
    /// `Σ_v 1 / (1 + d_v)`.
    pub lower: f64,
}

pub fn independence_bounds(g: &Graph) -> IndependenceBounds {
    let n = g.n();
    let e = g.edge_count();
    let max_deg = g.max_degree();
    let (upper, upper_raw) = if max_deg == 0 {
        (n, n as f64)
    } else {
        (n - e.div_ceil(max_deg), n as f64 - e as f64 / max_deg as f64)
    };
    // Summed per degree class so regular graphs give exact values.
    let mut counts = alloc::vec![0usize; max_deg + 1];
    for &d in g.degrees() {
        counts[d] += 1;
    }
    let lower = counts.iter().enumerate().map(|(d, &c)| c as f64 / (d + 1) as f64).sum();
    IndependenceBounds { upper, upper_raw, lower }
}

/// Uniform sample of exactly `k` actors without replacement.
pub fn random_sample(g: &Graph, k: usize, seed: u64) -> Result<NodeSet> {
    if k > g.n() {
        return Err(Error::invalid(alloc::format!(
            "sample size {k} exceeds the {} actors",
            g.n()
        )));
    }
    let mut rng = rng::from_seed(seed);
    let members = rand::seq::index::sample(&mut rng, g.n(), k).into_vec();
    Ok(NodeSet::new(Strategy::Random, members))
}

/// Relative size tolerance for cluster samples.
pub const CLUSTER_SIZE_TOLERANCE: f64 = 0.1;

/// Modularity-cluster sample: partitions `g` with [`louvain`] and accumulates
/// whole communities, largest first, while the total stays within
/// `target_size * (1 + CLUSTER_SIZE_TOLERANCE)`.
pub fn cluster_sample(g: &Graph, target_size: usize, seed: u64) -> Result<NodeSet> {
    if target_size > g.n() {
        return Err(Error::invalid(alloc::format!(
            "target size {target_size} exceeds the {} actors",
            g.n()
        )));
    }
    let partition = louvain(g, rng::derive(seed, &[0]));
    let mut communities = partition.communities();
    // Seeded order among equal sizes, then a stable largest-first sort.
    {
        use rand::seq::SliceRandom;
        let mut rng = rng::from_seed(rng::derive(seed, &[1]));
        communities.shuffle(&mut rng);
    }
    communities.sort_by_key(|c| core::cmp::Reverse(c.len()));

    let cap = target_size as f64 * (1.0 + CLUSTER_SIZE_TOLERANCE);
    let mut members = Vec::new();
    for c in communities {
        if members.len() >= target_size {
            break;
        }
        if (members.len() + c.len()) as f64 <= cap {
            members.extend(c);
        }
    }
    let mut set = NodeSet::new(Strategy::Cluster, members);
    let deviation = (set.len() as f64 - target_size as f64).abs();
    if deviation > CLUSTER_SIZE_TOLERANCE * target_size as f64 {
        set.flags.push(SampleFlag::SizeDeviation);
    }
    Ok(set)
}
