//! Second-order-difference treatment effects and their comparison across
//! sampling strategies.

pub mod mwu;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::behavior::quantile_sorted;
use crate::dgp::{wave_label, WaveState};
use crate::error::{Error, Result};
use crate::sampling::NodeSet;

pub use mwu::{mann_whitney_exact, mann_whitney_normal, mann_whitney_u, MannWhitney, PValueMethod, EXACT_MAX_SAMPLE};

/// Adoption share among treated and untreated actors, per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodProportions {
    pub labels: Vec<String>,
    pub p_treat: Vec<f64>,
    pub p_control: Vec<f64>,
    pub n_treat: usize,
    pub n_control: usize,
}

/// Proportions over the given states (A, B, C and optionally D). Every
/// untreated actor is a control.
pub fn period_proportions(states: &[WaveState], treated: &NodeSet) -> Result<PeriodProportions> {
    let n = states.first().map_or(0, WaveState::n);
    if states.iter().any(|s| s.n() != n) {
        return Err(Error::invalid("all periods must share one actor set"));
    }
    if treated.members.iter().any(|&v| v >= n) {
        return Err(Error::invalid("treated actor out of range"));
    }
    if treated.is_empty() || treated.len() >= n {
        return Err(Error::invalid("treated set must be non-empty and leave at least one control"));
    }
    let mask = treated.indicator(n);
    let n_treat = treated.len();
    let n_control = n - n_treat;
    let mut p_treat = Vec::with_capacity(states.len());
    let mut p_control = Vec::with_capacity(states.len());
    for s in states {
        let (mut t, mut c) = (0usize, 0usize);
        for (v, &b) in s.behavior.iter().enumerate() {
            if b == 1 {
                if mask[v] { t += 1 } else { c += 1 }
            }
        }
        p_treat.push(t as f64 / n_treat as f64);
        p_control.push(c as f64 / n_control as f64);
    }
    Ok(PeriodProportions {
        labels: (0..states.len()).map(wave_label).collect(),
        p_treat,
        p_control,
        n_treat,
        n_control,
    })
}

/// Which group is subtracted when forming the per-period gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapConvention {
    /// `gap = p_treat − p_control`.
    #[default]
    TreatedMinusControl,
    /// `gap = p_control − p_treat`.
    ControlMinusTreated,
}

impl GapConvention {
    pub fn gap(self, p: &PeriodProportions, period: usize) -> f64 {
        match self {
            GapConvention::TreatedMinusControl => p.p_treat[period] - p.p_control[period],
            GapConvention::ControlMinusTreated => p.p_control[period] - p.p_treat[period],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimates {
    /// Immediate term, B − A.
    pub direct: f64,
    /// C − A.
    pub short_term: f64,
    /// D − A, when a predicted period is present.
    pub long_term: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectKind {
    Direct,
    ShortTerm,
    LongTerm,
}

impl EffectKind {
    pub const ALL: [EffectKind; 3] = [EffectKind::Direct, EffectKind::ShortTerm, EffectKind::LongTerm];

    pub fn as_str(self) -> &'static str {
        match self {
            EffectKind::Direct => "direct",
            EffectKind::ShortTerm => "short_term",
            EffectKind::LongTerm => "long_term",
        }
    }
}

impl EffectEstimates {
    pub fn get(&self, kind: EffectKind) -> Option<f64> {
        match kind {
            EffectKind::Direct => Some(self.direct),
            EffectKind::ShortTerm => Some(self.short_term),
            EffectKind::LongTerm => self.long_term,
        }
    }
}

/// Gap changes relative to period A.
pub fn second_order_difference(p: &PeriodProportions, convention: GapConvention) -> Result<EffectEstimates> {
    let periods = p.p_treat.len();
    if periods < 3 || p.p_control.len() != periods {
        return Err(Error::invalid("periods A, B and C are required"));
    }
    let base = convention.gap(p, 0);
    Ok(EffectEstimates {
        direct: convention.gap(p, 1) - base,
        short_term: convention.gap(p, 2) - base,
        long_term: (periods > 3).then(|| convention.gap(p, 3) - base),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub strategy: String,
    pub effect: EffectKind,
    pub runs: usize,
    pub mean: f64,
    pub iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub effect: EffectKind,
    pub first: String,
    pub second: String,
    pub test: MannWhitney,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub rows: Vec<SummaryRow>,
    pub tests: Vec<PairwiseTest>,
}

impl RunSummary {
    pub fn row(&self, strategy: &str, effect: EffectKind) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.effect == effect)
    }

    pub fn test(&self, first: &str, second: &str, effect: EffectKind) -> Option<&PairwiseTest> {
        self.tests.iter().find(|t| {
            t.effect == effect && ((t.first == first && t.second == second) || (t.first == second && t.second == first))
        })
    }
}

fn values(runs: &[EffectEstimates], kind: EffectKind) -> Option<Vec<f64>> {
    runs.iter().map(|r| r.get(kind)).collect()
}

/// Mean and interquartile range per strategy and effect, and Mann–Whitney
/// tests between every pair of strategies. The long-term effect is
/// summarised only for strategies where every run has one.
pub fn summarize_runs(runs: &[(String, Vec<EffectEstimates>)]) -> Result<RunSummary> {
    if let Some((name, _)) = runs.iter().find(|(_, r)| r.is_empty()) {
        return Err(Error::invalid(alloc::format!("strategy {name} has no runs")));
    }
    let mut summary = RunSummary::default();
    for kind in EffectKind::ALL {
        for (name, r) in runs {
            let Some(mut v) = values(r, kind) else { continue };
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.sort_by(f64::total_cmp);
            summary.rows.push(SummaryRow {
                strategy: name.clone(),
                effect: kind,
                runs: v.len(),
                mean,
                iqr: quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25),
            });
        }
        for (a, (name_a, ra)) in runs.iter().enumerate() {
            for (name_b, rb) in &runs[a + 1..] {
                if let (Some(x), Some(y)) = (values(ra, kind), values(rb, kind)) {
                    summary.tests.push(PairwiseTest {
                        effect: kind,
                        first: name_a.clone(),
                        second: name_b.clone(),
                        test: mann_whitney_u(&x, &y)?,
                    });
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::sampling::Strategy;
    use alloc::vec;

    fn wave(b: Vec<u8>) -> WaveState {
        let n = b.len();
        WaveState::new(Graph::new(n), b, vec![1.0; n]).unwrap()
    }

    #[test]
    fn proportions_and_errors() {
        let treated = NodeSet::new(Strategy::Random, vec![0]);
        let p = period_proportions(&[wave(vec![1, 0, 1, 0])], &treated).unwrap();
        assert_eq!(p.p_treat, vec![1.0]);
        assert!((p.p_control[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.labels, vec!["A"]);
        let all = NodeSet::new(Strategy::Random, vec![0, 1, 2, 3]);
        assert!(period_proportions(&[wave(vec![1; 4])], &all).is_err());
        let none = NodeSet::new(Strategy::Random, vec![]);
        assert!(period_proportions(&[wave(vec![1; 4])], &none).is_err());
        let full = period_proportions(&[wave(vec![1; 4]), wave(vec![1; 4])], &treated).unwrap();
        assert_eq!(full.p_treat, vec![1.0, 1.0]);
        assert_eq!(full.p_control, vec![1.0, 1.0]);
    }

    #[test]
    fn differences() {
        let p = PeriodProportions {
            labels: vec!["A".into(), "B".into(), "C".into()],
            p_treat: vec![0.4, 0.4, 0.3],
            p_control: vec![0.4, 0.15, 0.5],
            n_treat: 1,
            n_control: 1,
        };
        let e = second_order_difference(&p, GapConvention::ControlMinusTreated).unwrap();
        assert!((e.direct + 0.25).abs() < 1e-15);
        assert!((e.short_term - 0.2).abs() < 1e-15);
        assert_eq!(e.long_term, None);
        let e = second_order_difference(&p, GapConvention::TreatedMinusControl).unwrap();
        assert!((e.direct - 0.25).abs() < 1e-15);
        let flat = PeriodProportions { p_treat: vec![0.3; 4], p_control: vec![0.6; 4], ..p };
        let e = second_order_difference(&flat, GapConvention::default()).unwrap();
        assert_eq!((e.direct, e.short_term, e.long_term), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn summary_of_small_runs() {
        let run = |d: f64| EffectEstimates { direct: d, short_term: d, long_term: None };
        let runs = vec![
            ("a".into(), vec![run(0.2), run(0.3)]),
            ("b".into(), vec![run(0.5), run(0.5), run(0.5)]),
        ];
        let s = summarize_runs(&runs).unwrap();
        let r = s.row("a", EffectKind::Direct).unwrap();
        assert!((r.mean - 0.25).abs() < 1e-15);
        assert_eq!(s.row("b", EffectKind::ShortTerm).unwrap().iqr, 0.0);
        assert!(s.row("a", EffectKind::LongTerm).is_none());
        assert!(s.test("b", "a", EffectKind::Direct).is_some());
        assert_eq!(s.tests.len(), 2);
        let single = summarize_runs(&[("c".into(), vec![run(0.1)])]).unwrap();
        assert_eq!(single.row("c", EffectKind::Direct).unwrap().iqr, 0.0);
        assert!(summarize_runs(&[("d".into(), vec![])]).is_err());
    }
}
