//! Forward prediction from a fitted model.

use alloc::vec::Vec;

use super::estimate::EstimationResult;
use super::simulate::simulate_period;
use crate::dgp::WaveState;
use crate::error::{Error, Result};
use crate::rng;

/// Simulates `epochs` further unit-time periods from `state` with the
/// fitted last-period rates. The returned sequence starts with `state`.
pub fn predict_future(
    state: &WaveState,
    fitted: &EstimationResult,
    epochs: usize,
    allow_unconverged: bool,
    seed: u64,
) -> Result<Vec<WaveState>> {
    if !fitted.converged && !allow_unconverged {
        return Err(Error::invalid("refusing to predict from an unconverged fit"));
    }
    let params = &fitted.estimates;
    let last = params.periods().checked_sub(1).ok_or_else(|| Error::invalid("fit has no periods"))?;
    let mut states = Vec::with_capacity(epochs + 1);
    states.push(state.clone());
    for e in 0..epochs {
        let out = simulate_period(&states[e], params, &fitted.spec, &fitted.context, last, rng::derive(seed, &[e as u64]));
        states.push(out.state);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::Panel;
    use crate::graph::generate_scale_free;
    use crate::saom::estimate::{estimate_mom, EstimationSettings};
    use crate::saom::spec::EffectSpec;
    use alloc::vec;

    fn fit() -> (WaveState, EstimationResult) {
        let g = generate_scale_free(15, 2.5, 3.0, 1).unwrap();
        let mut g2 = g.clone();
        g2.toggle(0, 14);
        let a = WaveState::new(g, vec![0; 15], vec![1.0; 15]).unwrap();
        let mut b = WaveState::new(g2, vec![0; 15], vec![1.0; 15]).unwrap();
        b.behavior[3] = 1;
        let panel = Panel::new(vec![a, b.clone()]).unwrap();
        let settings = EstimationSettings {
            phase1_iterations: 5,
            phase2_subphases: vec![10],
            phase3_iterations: 10,
            derivative_iterations: 5,
            max_retries: 0,
            ..EstimationSettings::default()
        };
        (b, estimate_mom(&panel, &EffectSpec::default(), &settings).unwrap())
    }

    #[test]
    fn zero_epochs_return_input() {
        let (s, f) = fit();
        let out = predict_future(&s, &f, 0, true, 1).unwrap();
        assert_eq!(out, vec![s]);
    }

    #[test]
    fn unconverged_fit_needs_override() {
        let (s, mut f) = fit();
        f.converged = false;
        assert!(predict_future(&s, &f, 1, false, 1).is_err());
        let out = predict_future(&s, &f, 2, true, 1).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out, predict_future(&s, &f, 2, true, 1).unwrap());
    }
}
