//! Degree-maximal independent sets under size, budget and within-set edge
//! tolerance constraints:
//!
//! ```text
//! maximise    dᵀx
//! subject to  1ᵀx ≤ m,  cᵀx ≤ b,  xᵀAx / 2 ≤ ε,  x ∈ {0,1}ⁿ
//! ```
//!
//! With ε = 0 this is the strict independent-set program. Graphs with at
//! most [`EXACT_SOLVER_MAX_ACTORS`] actors are solved exactly by branch and
//! bound; larger graphs fall back to a greedy degree/cost heuristic.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{NodeSet, SampleFlag, Strategy};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const EXACT_SOLVER_MAX_ACTORS: usize = 64;

const COST_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetSpec {
    /// Maximum set size m.
    pub max_size: usize,
    /// Budget b in cost units.
    pub budget: f64,
    /// Per-actor cost c.
    pub costs: Vec<f64>,
    /// Allowed number of edges inside the set (ε).
    pub epsilon: usize,
}

impl BudgetSpec {
    /// Unit costs with `budget = max_size`.
    pub fn unit_costs(n: usize, max_size: usize, epsilon: usize) -> Self {
        BudgetSpec {
            max_size,
            budget: max_size as f64,
            costs: alloc::vec![1.0; n],
            epsilon,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.costs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.costs.len(),
            });
        }
        if self.costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid("costs must be finite and non-negative"));
        }
        if self.budget.is_nan() {
            return Err(Error::invalid("budget must be a number"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetedSolution {
    pub nodes: NodeSet,
    /// Degree sum dᵀx of the chosen set.
    pub objective: usize,
    /// True when the branch-and-bound solver proved optimality.
    pub exact: bool,
}

pub fn budgeted_independent_set(g: &Graph, spec: &BudgetSpec) -> Result<BudgetedSolution> {
    spec.validate(g.n())?;
    if g.n() <= EXACT_SOLVER_MAX_ACTORS {
        Ok(exact(g, spec))
    } else {
        Ok(greedy(g, spec))
    }
}

/// Search state for the exact solver; `key = objective·(n+1) + size` orders
/// solutions by degree sum, then by cardinality.
struct Search<'a> {
    order: Vec<usize>,
    degree: Vec<usize>,
    cost: &'a [f64],
    nbr_mask: Vec<u64>,
    spec: &'a BudgetSpec,
    best_key: usize,
    best_mask: u64,
    stride: usize,
}

impl Search<'_> {
    /// Optimistic degree sum over positions `from..`: the largest remaining
    /// degrees that individually fit the remaining budget, up to `slots` of
    /// them (order is by non-increasing degree).
    fn bound(&self, from: usize, slots: usize, budget_left: f64) -> (usize, usize) {
        let mut obj = 0;
        let mut taken = 0;
        for &v in &self.order[from..] {
            if taken == slots {
                break;
            }
            if self.cost[v] <= budget_left + COST_SLACK {
                obj += self.degree[v];
                taken += 1;
            }
        }
        (obj, taken)
    }

    fn dfs(&mut self, pos: usize, mask: u64, size: usize, cost: f64, inner: usize, obj: usize) {
        let key = obj * self.stride + size;
        if key > self.best_key {
            self.best_key = key;
            self.best_mask = mask;
        }
        if pos == self.order.len() || size == self.spec.max_size {
            return;
        }
        let (extra_obj, extra_size) = self.bound(pos, self.spec.max_size - size, self.spec.budget - cost);
        if (obj + extra_obj) * self.stride + size + extra_size <= self.best_key {
            return;
        }
        let v = self.order[pos];
        let added_edges = (self.nbr_mask[v] & mask).count_ones() as usize;
        let new_cost = cost + self.cost[v];
        if inner + added_edges <= self.spec.epsilon && new_cost <= self.spec.budget + COST_SLACK {
            self.dfs(pos + 1, mask | 1 << v, size + 1, new_cost, inner + added_edges, obj + self.degree[v]);
        }
        self.dfs(pos + 1, mask, size, cost, inner, obj);
    }
}

fn exact(g: &Graph, spec: &BudgetSpec) -> BudgetedSolution {
    let n = g.n();
    let degree: Vec<usize> = g.degrees().to_vec();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (core::cmp::Reverse(degree[v]), v));
    let nbr_mask = (0..n).map(|v| g.neighbors(v).fold(0u64, |m, u| m | 1 << u)).collect();
    let mut search = Search {
        order,
        degree,
        cost: &spec.costs,
        nbr_mask,
        spec,
        best_key: 0,
        best_mask: 0,
        stride: n + 1,
    };
    search.dfs(0, 0, 0, 0.0, 0, 0);
    let members: Vec<usize> = (0..n).filter(|&v| search.best_mask >> v & 1 == 1).collect();
    let objective = members.iter().map(|&v| g.degree(v)).sum();
    BudgetedSolution {
        nodes: NodeSet::new(Strategy::BudgetedIndependent, members),
        objective,
        exact: true,
    }
}

fn greedy(g: &Graph, spec: &BudgetSpec) -> BudgetedSolution {
    let n = g.n();
    let ratio = |v: usize| {
        let d = g.degree(v) as f64;
        if spec.costs[v] == 0.0 { f64::INFINITY } else { d / spec.costs[v] }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ratio(b)
            .total_cmp(&ratio(a))
            .then(g.degree(b).cmp(&g.degree(a)))
            .then(a.cmp(&b))
    });
    let mut chosen = alloc::vec![false; n];
    let mut members = Vec::new();
    let (mut cost, mut inner) = (0.0, 0usize);
    for v in order {
        if members.len() == spec.max_size {
            break;
        }
        let added = g.neighbors(v).filter(|&u| chosen[u]).count();
        if inner + added <= spec.epsilon && cost + spec.costs[v] <= spec.budget + COST_SLACK {
            chosen[v] = true;
            members.push(v);
            cost += spec.costs[v];
            inner += added;
        }
    }
    let objective = members.iter().map(|&v| g.degree(v)).sum();
    let mut nodes = NodeSet::new(Strategy::BudgetedIndependent, members);
    nodes.flags.push(SampleFlag::Heuristic);
    BudgetedSolution { nodes, objective, exact: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn path_examples() {
        let s = budgeted_independent_set(&path3(), &BudgetSpec::unit_costs(3, 2, 0)).unwrap();
        assert_eq!(s.nodes.members, vec![0, 2]);
        assert_eq!(s.objective, 2);
        assert!(s.exact);
        let s = budgeted_independent_set(&path3(), &BudgetSpec::unit_costs(3, 1, 0)).unwrap();
        assert_eq!(s.nodes.members, vec![1]);
        assert_eq!(s.objective, 2);
    }

    #[test]
    fn zero_size_or_budget_forces_empty_set() {
        let g = crate::graph::generate_scale_free(30, 2.5, 3.0, 2).unwrap();
        let s = budgeted_independent_set(&g, &BudgetSpec::unit_costs(30, 0, 0)).unwrap();
        assert!(s.nodes.is_empty());
        assert_eq!(s.objective, 0);
        let mut spec = BudgetSpec::unit_costs(30, 5, 0);
        spec.budget = -1.0;
        assert!(budgeted_independent_set(&g, &spec).unwrap().nodes.is_empty());
    }

    #[test]
    fn tolerance_admits_internal_edges() {
        let s = budgeted_independent_set(&path3(), &BudgetSpec::unit_costs(3, 3, 2)).unwrap();
        assert_eq!(s.nodes.members, vec![0, 1, 2]);
        assert_eq!(s.objective, 4);
    }

    #[test]
    fn rejects_bad_costs() {
        let mut spec = BudgetSpec::unit_costs(3, 1, 0);
        spec.costs[0] = -1.0;
        assert!(budgeted_independent_set(&path3(), &spec).is_err());
        spec.costs.pop();
        assert!(matches!(
            budgeted_independent_set(&path3(), &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn large_graphs_use_flagged_heuristic() {
        let g = crate::graph::generate_scale_free(100, 2.5, 4.0, 2).unwrap();
        let s = budgeted_independent_set(&g, &BudgetSpec::unit_costs(100, 20, 0)).unwrap();
        assert!(!s.exact);
        assert_eq!(s.nodes.flags, vec![SampleFlag::Heuristic]);
        assert!(s.nodes.is_independent(&g));
        assert!(s.nodes.len() <= 20);
    }
}
