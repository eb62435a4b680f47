use netpolicy_core::saom::{BatchRunner, Simulated};
use rayon::prelude::*;

/// Runs simulation batches on the rayon pool. Results come back in job
/// order, so fits are identical to the sequential runner's.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl BatchRunner for Parallel {
    fn run(&self, count: usize, job: &(dyn Fn(usize) -> Simulated + Sync)) -> Vec<Simulated> {
        (0..count).into_par_iter().map(job).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use netpolicy_core::dgp::{Panel, WaveState};
    use netpolicy_core::graph::generate_scale_free;
    use netpolicy_core::saom::{estimate_mom, estimate_mom_with, EffectSpec, EstimationSettings};

    #[test]
    fn parallel_fit_equals_sequential_fit() {
        let g = generate_scale_free(20, 2.5, 3.0, 4).unwrap();
        let a = WaveState::new(g.clone(), (0..20).map(|i| (i % 3 == 0) as u8).collect(), vec![60.0; 20]).unwrap();
        let mut g2 = g;
        g2.toggle(0, 19);
        g2.toggle(3, 7);
        let b = WaveState::new(g2, (0..20).map(|i| (i % 4 == 0) as u8).collect(), vec![60.0; 20]).unwrap();
        let panel = Panel::new(vec![a, b]).unwrap();
        let spec = EffectSpec::new(vec![], vec![netpolicy_core::saom::BehaviorEffect::LinearShape], vec![], vec![]).unwrap();
        let settings = EstimationSettings {
            phase1_iterations: 8,
            phase2_subphases: vec![15],
            phase3_iterations: 30,
            derivative_iterations: 8,
            max_retries: 0,
            ..EstimationSettings::default()
        };
        let seq = estimate_mom(&panel, &spec, &settings).unwrap();
        let par = estimate_mom_with(&panel, &spec, &settings, &Parallel).unwrap();
        assert_eq!(seq, par);
    }
}
