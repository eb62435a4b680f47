use netpolicy_core::dgp::WaveState;
use netpolicy_core::effects::{mann_whitney_exact, mann_whitney_normal, mann_whitney_u};
use netpolicy_core::graph::Graph;
use netpolicy_core::sampling::{
    budgeted_independent_set, independence_bounds, maximal_independent_set, random_sample, BudgetSpec,
};
use netpolicy_core::saom::{
    behavior_choice_probabilities, network_choice_probabilities, softmax, transition_intensity, EffectSpec,
    ParameterVector, SimilarityContext,
};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn internal_edges(g: &Graph, mask: u32) -> usize {
    g.edges().filter(|&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1).count()
}

fn brute_alpha(g: &Graph) -> usize {
    (0u32..1 << g.n())
        .filter(|&m| internal_edges(g, m) == 0)
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

fn brute_budget(g: &Graph, spec: &BudgetSpec) -> usize {
    (0u32..1 << g.n())
        .filter(|&m| {
            let cost: f64 = (0..g.n()).filter(|&v| m >> v & 1 == 1).map(|v| spec.costs[v]).sum();
            m.count_ones() as usize <= spec.max_size && cost <= spec.budget + 1e-9 && internal_edges(g, m) <= spec.epsilon
        })
        .map(|m| (0..g.n()).filter(|&v| m >> v & 1 == 1).map(|v| g.degree(v)).sum())
        .max()
        .unwrap()
}

fn state_of(g: Graph, behavior: Vec<u8>, price: Vec<f64>) -> WaveState {
    WaveState::new(g, behavior, price).unwrap()
}

proptest! {
    #[test]
    fn mis_is_independent_and_maximal(g in graph_strategy(25), seed in any::<u64>()) {
        let s = maximal_independent_set(&g, seed);
        prop_assert!(s.is_independent(&g));
        prop_assert!(s.is_dominating(&g));
    }

    #[test]
    fn bounds_sandwich_alpha(g in graph_strategy(11)) {
        let b = independence_bounds(&g);
        let alpha = brute_alpha(&g) as f64;
        prop_assert!(b.lower <= alpha + 1e-12);
        prop_assert!(alpha <= b.upper_raw + 1e-12);
        prop_assert!(b.upper as f64 <= b.upper_raw + 1e-12);
    }

    #[test]
    fn budget_solver_matches_brute_force(
        g in graph_strategy(9),
        costs in proptest::collection::vec(0.1f64..3.0, 9),
        budget in 0.0f64..10.0,
        max_size in 0usize..7,
        epsilon in 0usize..3,
    ) {
        let n = g.n();
        let spec = BudgetSpec { max_size, budget, costs: costs[..n].to_vec(), epsilon };
        let sol = budgeted_independent_set(&g, &spec).unwrap();
        prop_assert!(sol.exact);
        prop_assert_eq!(sol.objective, brute_budget(&g, &spec));
        let chosen: u32 = sol.nodes.members.iter().map(|&v| 1u32 << v).sum();
        prop_assert!(internal_edges(&g, chosen) <= epsilon);
        prop_assert!(sol.nodes.len() <= max_size);
    }

    #[test]
    fn random_sample_has_requested_size(g in graph_strategy(30), seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let k = (frac * g.n() as f64) as usize;
        let s = random_sample(&g, k, seed).unwrap();
        prop_assert_eq!(s.len(), k);
        prop_assert!(s.members.iter().all(|&v| v < g.n()));
    }

    #[test]
    fn softmax_sums_to_one_and_ignores_shifts(u in proptest::collection::vec(-30.0f64..30.0, 1..20), c in -100.0f64..100.0) {
        let p = softmax(&u);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
        for (a, b) in p.iter().zip(softmax(&shifted)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn choice_probabilities_are_distributions(
        g in graph_strategy(10),
        bits in proptest::collection::vec(0u8..2, 10),
        prices in proptest::collection::vec(30.0f64..90.0, 10),
        beta_net in proptest::collection::vec(-3.0f64..3.0, 4),
        beta_beh in proptest::collection::vec(-3.0f64..3.0, 3),
    ) {
        let n = g.n();
        let spec = EffectSpec::default();
        let s = state_of(g, bits[..n].to_vec(), prices[..n].to_vec());
        let ctx = SimilarityContext::from_state(&s);
        for i in 0..n {
            let p = network_choice_probabilities(&s, &ctx, &spec.network_eval_effects, &beta_net, i);
            prop_assert_eq!(p.len(), n);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
            let q = behavior_choice_probabilities(&s, &ctx, &spec.behavior_eval_effects, &beta_beh, i);
            prop_assert!((q[0] + q[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn intensity_rows_sum_to_zero(
        g in graph_strategy(3),
        bits in proptest::collection::vec(0u8..2, 3),
        rho in (0.0f64..4.0, 0.0f64..4.0),
        beta_net in proptest::collection::vec(-2.0f64..2.0, 4),
        beta_beh in proptest::collection::vec(-2.0f64..2.0, 3),
    ) {
        let n = g.n();
        let spec = EffectSpec::default();
        let s = state_of(g, bits[..n].to_vec(), vec![60.0; n]);
        let ctx = SimilarityContext::from_state(&s);
        let params = ParameterVector { rho_net: vec![rho.0], rho_beh: vec![rho.1], beta_net, beta_beh, ..ParameterVector::zeros(&spec, 1) };
        let q = transition_intensity(&s, &params, &spec, &ctx, 0).unwrap();
        for k in 0..q.state_count() {
            prop_assert!(q.row_sum(k).abs() < 1e-9);
            prop_assert!(q.rows[k].iter().all(|&(_, r)| r >= 0.0));
        }
    }

    #[test]
    fn mann_whitney_is_symmetric(
        x in proptest::collection::vec(0i32..6, 1..9),
        y in proptest::collection::vec(0i32..6, 1..9),
    ) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let total = (x.len() * y.len()) as f64;
        for test in [mann_whitney_exact, mann_whitney_normal, mann_whitney_u] {
            let a = test(&x, &y).unwrap();
            let b = test(&y, &x).unwrap();
            prop_assert!((a.u + b.u - total).abs() < 1e-9);
            prop_assert!((a.p_two_sided - b.p_two_sided).abs() < 1e-12);
            prop_assert!(a.p_two_sided > 0.0 && a.p_two_sided <= 1.0);
        }
    }
}
