//! Undirected simple graphs, scale-free generation and structural metrics.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
#[allow(unused_imports)]
use num_traits::Float;

const WORD: usize = 64;

/// An undirected simple graph on actors `0..n`.
///
/// Adjacency is stored as a dense bit matrix (one row per actor) so that
/// tie toggles are O(1) and common-neighbour counts are word-parallel.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    degree: Vec<usize>,
    edges: usize,
}

impl core::fmt::Debug for Graph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` actors.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(WORD);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
            degree: vec![0; n],
            edges: 0,
        }
    }

    /// Builds a graph from unordered pairs. Duplicate pairs are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(alloc::format!(
                    "edge ({u}, {v}) references an actor outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(alloc::format!("self-loop on actor {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / WORD] >> (v % WORD) & 1 == 1
    }

    #[inline]
    fn flip(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / WORD] ^= 1 << (v % WORD);
    }

    /// Adds `{u, v}`; returns `false` if it was already present. Self-loops
    /// are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.flip(u, v);
        self.flip(v, u);
        self.degree[u] += 1;
        self.degree[v] += 1;
        self.edges += 1;
        true
    }

    /// Removes `{u, v}`; returns `false` if it was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.has_edge(u, v) {
            return false;
        }
        self.flip(u, v);
        self.flip(v, u);
        self.degree[u] -= 1;
        self.degree[v] -= 1;
        self.edges -= 1;
        true
    }

    /// Toggles `{u, v}` and returns the new tie value.
    pub fn toggle(&mut self, u: usize, v: usize) -> bool {
        if self.has_edge(u, v) {
            self.remove_edge(u, v);
            false
        } else {
            self.add_edge(u, v)
        }
    }

    /// Neighbours of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        Neighbors {
            row: self.row(v),
            word: 0,
            cur: if self.words > 0 { self.row(v)[0] } else { 0 },
        }
    }

    /// Number of actors whose tie to `v` differs between `self` and `other`.
    /// Both graphs must have the same actor count.
    pub fn row_difference(&self, other: &Graph, v: usize) -> usize {
        self.row(v)
            .iter()
            .zip(other.row(v))
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Number of unordered pairs whose tie differs between the two graphs.
    pub fn hamming(&self, other: &Graph) -> usize {
        (0..self.n).map(|v| self.row_difference(other, v)).sum::<usize>() / 2
    }

    /// `|N(u) ∩ N(v)|`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Number of triangles containing `v`.
    pub fn triangles_at(&self, v: usize) -> usize {
        self.neighbors(v).map(|u| self.common_neighbors(u, v)).sum::<usize>() / 2
    }

    /// Total number of triangles.
    pub fn triangle_count(&self) -> usize {
        (0..self.n).map(|v| self.triangles_at(v)).sum::<usize>() / 3
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Local clustering coefficient of `v` (0 when `d_v < 2`).
    pub fn local_transitivity(&self, v: usize) -> f64 {
        let d = self.degree[v];
        if d < 2 {
            return 0.0;
        }
        self.triangles_at(v) as f64 / (d * (d - 1) / 2) as f64
    }

    /// Breadth-first distances from a set of sources, `None` when unreachable.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = alloc::collections::VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Number of connected components (isolated actors count as components).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// Iterator over the set bits of an adjacency row.
pub struct Neighbors<'a> {
    row: &'a [u64],
    word: usize,
    cur: u64,
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.word * WORD + bit);
            }
            self.word += 1;
            if self.word >= self.row.len() {
                return None;
            }
            self.cur = self.row[self.word];
        }
    }
}

// ---------------------------------------------------------------------------
// Scale-free generation
// ---------------------------------------------------------------------------

fn truncated_power_law(exponent: f64, k_min: usize, k_max: usize) -> Vec<f64> {
    (k_min..=k_max).map(|k| (k as f64).powf(-exponent)).collect()
}

fn power_law_mean(exponent: f64, k_min: usize, k_max: usize) -> f64 {
    let w = truncated_power_law(exponent, k_min, k_max);
    let total: f64 = w.iter().sum();
    w.iter().enumerate().map(|(i, p)| (k_min + i) as f64 * p).sum::<f64>() / total
}

/// Generates a simple undirected graph whose degree tail follows a power law
/// with the given exponent and whose edge count is exactly
/// `round(n * target_mean_degree / 2)`.
///
/// Degrees are drawn from a discrete power law truncated to `[k_min, n-1]`,
/// paired by an erased configuration model, and the edge count is then
/// corrected: surplus edges are removed uniformly at random, missing edges
/// are added between endpoints drawn proportionally to degree. Both
/// corrections rescale degrees roughly multiplicatively and leave the tail
/// exponent intact.
pub fn generate_scale_free(n: usize, exponent: f64, target_mean_degree: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("scale-free graph needs at least one actor"));
    }
    if !exponent.is_finite() || exponent <= 1.0 {
        return Err(Error::invalid("power-law exponent must be finite and > 1"));
    }
    if !target_mean_degree.is_finite() || target_mean_degree < 0.0 || target_mean_degree >= n as f64 {
        return Err(Error::invalid("target mean degree must lie in [0, n)"));
    }
    let target_edges = (n as f64 * target_mean_degree / 2.0).round() as usize;
    let max_edges = n * (n - 1) / 2;
    if target_edges > max_edges {
        return Err(Error::invalid(alloc::format!(
            "target of {target_edges} edges exceeds the {max_edges} dyads of a simple graph"
        )));
    }
    let mut g = Graph::new(n);
    if target_edges == 0 {
        return Ok(g);
    }
    let mut rng = rng::from_seed(seed);
    let k_max = n - 1;

    // Largest k_min whose truncated mean does not exceed the target.
    let mut k_min = 1;
    while k_min < k_max && power_law_mean(exponent, k_min + 1, k_max) <= target_mean_degree {
        k_min += 1;
    }

    let weights = truncated_power_law(exponent, k_min, k_max);
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }
    let mut stubs = Vec::new();
    for v in 0..n {
        let u: f64 = rng.gen();
        let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
        let d = k_min + idx;
        stubs.extend(core::iter::repeat_n(v, d));
    }
    if stubs.len() % 2 == 1 {
        stubs.push(rng.gen_range(0..n));
    }
    stubs.shuffle(&mut rng);

    let mut edge_list: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        if g.add_edge(pair[0], pair[1]) {
            edge_list.push((pair[0], pair[1]));
        }
    }

    while edge_list.len() > target_edges {
        let k = rng.gen_range(0..edge_list.len());
        let (u, v) = edge_list.swap_remove(k);
        g.remove_edge(u, v);
    }

    let mut misses = 0usize;
    while edge_list.len() < target_edges {
        let (u, v) = if edge_list.is_empty() || misses > 64 * n {
            (rng.gen_range(0..n), rng.gen_range(0..n))
        } else {
            let a = edge_list[rng.gen_range(0..edge_list.len())];
            let b = edge_list[rng.gen_range(0..edge_list.len())];
            (
                if rng.gen::<bool>() { a.0 } else { a.1 },
                if rng.gen::<bool>() { b.0 } else { b.1 },
            )
        };
        if g.add_edge(u, v) {
            edge_list.push((u, v));
            misses = 0;
        } else {
            misses += 1;
        }
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Probability mass over degrees; `mass[k]` is the share of actors with
/// degree `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    mass: Vec<f64>,
}

impl DegreeDistribution {
    /// Empirical distribution of a degree sample. An empty sample yields the
    /// point mass at 0.
    pub fn from_degrees<I: IntoIterator<Item = usize>>(degrees: I) -> Self {
        let mut counts: Vec<usize> = Vec::new();
        let mut total = 0usize;
        for d in degrees {
            if d >= counts.len() {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
            total += 1;
        }
        if total == 0 {
            return DegreeDistribution { mass: vec![1.0] };
        }
        DegreeDistribution {
            mass: counts.into_iter().map(|c| c as f64 / total as f64).collect(),
        }
    }

    /// Validates and wraps an explicit mass vector.
    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() || mass.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::invalid("degree distribution needs finite non-negative mass"));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("degree distribution mass must sum to 1"));
        }
        Ok(DegreeDistribution { mass })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Mass at degree `k` (0 outside the support).
    pub fn at(&self, k: usize) -> f64 {
        self.mass.get(k).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub density: f64,
    pub mean_degree: f64,
    pub transitivity: f64,
    pub degree_distribution: DegreeDistribution,
}

/// Density, mean degree, global transitivity and degree distribution.
pub fn graph_metrics(g: &Graph) -> GraphMetrics {
    let n = g.n();
    let e = g.edge_count() as f64;
    let density = if n < 2 { 0.0 } else { e / (n * (n - 1) / 2) as f64 };
    let mean_degree = if n == 0 { 0.0 } else { 2.0 * e / n as f64 };
    let triples: usize = g.degrees().iter().map(|&d| d * d.saturating_sub(1) / 2).sum();
    let closed: usize = (0..n).map(|v| g.triangles_at(v)).sum();
    let transitivity = if triples == 0 { 0.0 } else { closed as f64 / triples as f64 };
    GraphMetrics {
        density,
        mean_degree,
        transitivity,
        degree_distribution: DegreeDistribution::from_degrees(g.degrees().iter().copied()),
    }
}

/// Descriptives of a node sample measured in its host graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub size: usize,
    /// Mean host-graph degree of the members.
    pub mean_degree: f64,
    /// Mean local clustering coefficient of the members.
    pub mean_transitivity: f64,
    pub degree_distribution: DegreeDistribution,
}

pub fn sample_metrics(g: &Graph, members: &[usize]) -> SampleMetrics {
    let size = members.len();
    let (sum_d, sum_t) = members
        .iter()
        .fold((0.0, 0.0), |(d, t), &v| (d + g.degree(v) as f64, t + g.local_transitivity(v)));
    let denom = if size == 0 { 1.0 } else { size as f64 };
    SampleMetrics {
        size,
        mean_degree: sum_d / denom,
        mean_transitivity: sum_t / denom,
        degree_distribution: DegreeDistribution::from_degrees(members.iter().map(|&v| g.degree(v))),
    }
}

/// Logarithm base used by [`jensen_shannon_divergence`].
pub const JSD_LOG_BASE: &str = "e";

/// Jensen-Shannon divergence in nats; lies in `[0, ln 2]`.
pub fn jensen_shannon_divergence(p: &DegreeDistribution, q: &DegreeDistribution) -> f64 {
    let len = p.mass.len().max(q.mass.len());
    let mut js = 0.0;
    for k in 0..len {
        let (a, b) = (p.at(k), q.at(k));
        let m = 0.5 * (a + b);
        if a > 0.0 {
            js += 0.5 * a * (a / m).ln();
        }
        if b > 0.0 {
            js += 0.5 * b * (b / m).ln();
        }
    }
    js.clamp(0.0, core::f64::consts::LN_2)
}

// ---------------------------------------------------------------------------
// Wave-to-wave tie changes
// ---------------------------------------------------------------------------

/// Dyad counts by (old, new) tie value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieChangeTable {
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

/// Jaccard stability index; `undefined` is set when no dyad is tied in
/// either wave, in which case `value` is reported as 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jaccard {
    pub value: f64,
    pub undefined: bool,
}

impl TieChangeTable {
    pub fn total(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    pub fn jaccard(&self) -> Jaccard {
        let denom = self.n01 + self.n10 + self.n11;
        if denom == 0 {
            Jaccard { value: 1.0, undefined: true }
        } else {
            Jaccard {
                value: self.n11 as f64 / denom as f64,
                undefined: false,
            }
        }
    }
}

pub fn tie_change_table(old: &Graph, new: &Graph) -> Result<TieChangeTable> {
    if old.n() != new.n() {
        return Err(Error::DimensionMismatch {
            expected: old.n(),
            found: new.n(),
        });
    }
    let n = old.n();
    let mut n01 = 0u64;
    let mut n10 = 0u64;
    let mut n11 = 0u64;
    for u in 0..n {
        for (w, (a, b)) in old.row(u).iter().zip(new.row(u)).enumerate() {
            // Only count v > u.
            let mask = upper_mask(u, w);
            n11 += (a & b & mask).count_ones() as u64;
            n10 += (a & !b & mask).count_ones() as u64;
            n01 += (!a & b & mask).count_ones() as u64;
        }
    }
    let dyads = (n as u64) * (n as u64).saturating_sub(1) / 2;
    Ok(TieChangeTable {
        n00: dyads - n01 - n10 - n11,
        n01,
        n10,
        n11,
    })
}

/// Bits of word `w` that index columns strictly greater than `u`.
fn upper_mask(u: usize, w: usize) -> u64 {
    let lo = w * WORD;
    if u < lo {
        u64::MAX
    } else if u + 1 >= lo + WORD {
        0
    } else {
        u64::MAX << (u + 1 - lo)
    }
}
