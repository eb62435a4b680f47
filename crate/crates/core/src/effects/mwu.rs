//! Mann–Whitney U test with midranks.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Samples up to this size on both sides use exact enumeration.
pub const EXACT_MAX_SAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// `U` of the first sample: `R_x − n_x(n_x+1)/2`.
    pub u: f64,
    pub p_two_sided: f64,
    pub method: PValueMethod,
}

/// Midranks (1-based) of the pooled values, plus `Σ(t³ − t)` over tie groups.
fn midranks(pooled: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("both samples must be non-empty"));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::invalid("samples must not contain NaN"));
    }
    Ok(())
}

fn u_statistic(ranks: &[f64], nx: usize) -> f64 {
    ranks[..nx].iter().sum::<f64>() - (nx * (nx + 1)) as f64 / 2.0
}

/// Two-sided p from the normal approximation with tie-corrected variance
/// and continuity correction.
pub fn mann_whitney_normal(x: &[f64], y: &[f64]) -> Result<MannWhitney> {
    check(x, y)?;
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let n = nx + ny;
    let u = u_statistic(&ranks, x.len());
    let mean = nx * ny / 2.0;
    let var = nx * ny / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
        libm::erfc(z / core::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitney { u, p_two_sided: p, method: PValueMethod::Normal })
}

/// Two-sided p from the permutation distribution of `U` over every
/// assignment of the pooled midranks to the first sample.
pub fn mann_whitney_exact(x: &[f64], y: &[f64]) -> Result<MannWhitney> {
    check(x, y)?;
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let nx = x.len();
    let n = pooled.len();
    let u = u_statistic(&ranks, nx);
    let mean = (nx * (n - nx)) as f64 / 2.0;
    let observed = (u - mean).abs();
    let offset = (nx * (nx + 1)) as f64 / 2.0;
    let (mut extreme, mut total) = (0u64, 0u64);
    // Iterate over all nx-subsets of the pooled positions.
    let mut idx: Vec<usize> = (0..nx).collect();
    loop {
        let us = idx.iter().map(|&k| ranks[k]).sum::<f64>() - offset;
        total += 1;
        if (us - mean).abs() >= observed - 1e-9 {
            extreme += 1;
        }
        let Some(pos) = (0..nx).rev().find(|&p| idx[p] < n - nx + p) else {
            break;
        };
        idx[pos] += 1;
        for q in pos + 1..nx {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(MannWhitney {
        u,
        p_two_sided: extreme as f64 / total as f64,
        method: PValueMethod::Exact,
    })
}

/// Exact p when both samples have at most [`EXACT_MAX_SAMPLE`] values,
/// normal approximation otherwise.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<MannWhitney> {
    if x.len() <= EXACT_MAX_SAMPLE && y.len() <= EXACT_MAX_SAMPLE {
        mann_whitney_exact(x, y)
    } else {
        mann_whitney_normal(x, y)
    }
}
