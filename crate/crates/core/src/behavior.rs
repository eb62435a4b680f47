//! Actor covariates and the logistic focal-behaviour adoption model.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
#[allow(unused_imports)]
use num_traits::Float;

/// Weights of the adoption model `P(B = 1 | x) = σ(θᵀx + θ₀)`.
///
/// Covariates enter in raw units: years, USD per year, a 0/1 gender code and
/// price in cents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticCoefficients {
    pub intercept: f64,
    pub educ: f64,
    pub age: f64,
    pub income: f64,
    pub gender: f64,
    pub price: f64,
}

impl Default for LogisticCoefficients {
    /// The published estimates.
    fn default() -> Self {
        LogisticCoefficients {
            intercept: 0.8318,
            educ: -0.02486,
            age: -0.004698,
            income: 3.954e-6,
            gender: 0.02942,
            price: -9.274e-4,
        }
    }
}

impl LogisticCoefficients {
    pub const ZERO: LogisticCoefficients = LogisticCoefficients {
        intercept: 0.0,
        educ: 0.0,
        age: 0.0,
        income: 0.0,
        gender: 0.0,
        price: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.intercept, self.educ, self.age, self.income, self.gender, self.price];
        if all.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("logistic coefficients must be finite"))
        }
    }

    /// Linear predictor θᵀx + θ₀.
    pub fn linear_predictor(&self, x: &Covariates) -> f64 {
        self.intercept
            + self.educ * x.educ
            + self.age * x.age
            + self.income * x.income
            + self.gender * x.gender as f64
            + self.price * x.price
    }
}

/// One actor's covariate row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariates {
    pub educ: f64,
    pub age: f64,
    pub income: f64,
    /// 0 female, 1 male.
    pub gender: u8,
    /// Price in cents.
    pub price: f64,
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Adoption probability for one actor.
pub fn adopt_probability(coeffs: &LogisticCoefficients, x: &Covariates) -> f64 {
    sigmoid(coeffs.linear_predictor(x))
}

/// Bernoulli(p) realisation from an existing stream.
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u8 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1
    } else {
        u8::from(rng.gen::<f64>() < p)
    }
}

/// Bernoulli(p) realisation for a single seed.
pub fn draw_behavior(p: f64, seed: u64) -> Result<u8> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("probability must lie in [0, 1]"));
    }
    Ok(bernoulli(&mut rng::from_seed(seed), p))
}

/// A full actor: time-invariant covariates plus the time-varying price and
/// behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actor {
    pub educ: f64,
    pub age: f64,
    pub income: f64,
    pub gender: u8,
    pub price: f64,
    pub behavior: u8,
}

impl Actor {
    pub fn covariates(&self) -> Covariates {
        Covariates {
            educ: self.educ,
            age: self.age,
            income: self.income,
            gender: self.gender,
            price: self.price,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActorTable {
    pub actors: Vec<Actor>,
}

impl ActorTable {
    /// Validates row invariants; the error names the offending row (0-based)
    /// and column.
    pub fn new(actors: Vec<Actor>) -> Result<Self> {
        for (row, a) in actors.iter().enumerate() {
            let bad = |col: &str, why: &str| Err(Error::invalid(alloc::format!("row {row}, column {col}: {why}")));
            for (col, v) in [("educ", a.educ), ("age", a.age), ("income", a.income), ("pric", a.price)] {
                if !v.is_finite() {
                    return bad(col, "value is not finite");
                }
            }
            if a.price <= 0.0 {
                return bad("pric", "price must be positive");
            }
            if a.gender > 1 {
                return bad("gender", "must be 0 or 1");
            }
            if a.behavior > 1 {
                return bad("behavior", "must be 0 or 1");
            }
        }
        Ok(ActorTable { actors })
    }

    pub fn len(&self) -> usize {
        self.actors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actors.is_empty()
    }

    pub fn behaviors(&self) -> Vec<u8> {
        self.actors.iter().map(|a| a.behavior).collect()
    }

    pub fn prices(&self) -> Vec<f64> {
        self.actors.iter().map(|a| a.price).collect()
    }

    pub fn adopters(&self) -> usize {
        self.actors.iter().filter(|a| a.behavior == 1).count()
    }

    pub fn males(&self) -> usize {
        self.actors.iter().filter(|a| a.gender == 1).count()
    }

    /// Six-number summaries per continuous covariate.
    pub fn summary(&self) -> TableSummary {
        let col = |f: fn(&Actor) -> f64| FiveNumber::of(self.actors.iter().map(f).collect());
        TableSummary {
            educ: col(|a| a.educ),
            age: col(|a| a.age),
            income: col(|a| a.income),
            price: col(|a| a.price),
            adopters: self.adopters(),
            males: self.males(),
            females: self.len() - self.males(),
        }
    }
}

/// Min, quartiles (linear interpolation between order statistics), mean and
/// max of a column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    pub fn of(mut v: Vec<f64>) -> Self {
        if v.is_empty() {
            return FiveNumber { min: 0.0, q1: 0.0, median: 0.0, mean: 0.0, q3: 0.0, max: 0.0 };
        }
        v.sort_by(f64::total_cmp);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        FiveNumber {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            mean,
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        }
    }
}

/// Quantile of sorted data with linear interpolation at position `p(n-1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub educ: FiveNumber,
    pub age: FiveNumber,
    pub income: FiveNumber,
    pub price: FiveNumber,
    pub adopters: usize,
    pub males: usize,
    pub females: usize,
}

/// Expected column summary for validation reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnCheck {
    pub column: String,
    pub statistic: String,
    pub expected: f64,
    pub observed: f64,
    pub within_tolerance: bool,
}

/// Descriptives of the published 300-actor data.
pub fn reference_summary() -> TableSummary {
    TableSummary {
        educ: FiveNumber { min: 6.0, q1: 10.0, median: 12.0, mean: 12.59, q3: 15.0, max: 18.0 },
        age: FiveNumber { min: 17.0, q1: 28.0, median: 39.0, mean: 42.18, q3: 53.0, max: 88.0 },
        income: FiveNumber { min: 500.0, q1: 12500.0, median: 20000.0, mean: 19400.0, q3: 30000.0, max: 30000.0 },
        price: FiveNumber { min: 52.8, q1: 58.79, median: 61.05, mean: 61.10, q3: 62.16, max: 70.13 },
        adopters: 108,
        males: 174,
        females: 126,
    }
}

/// Compares a table's summary to expected descriptives. Each statistic
/// passes when within `rel_tol` relative error.
pub fn validate_summary(observed: &TableSummary, expected: &TableSummary, rel_tol: f64) -> Vec<ColumnCheck> {
    let mut out = Vec::new();
    let cols = [
        ("educ", &observed.educ, &expected.educ),
        ("age", &observed.age, &expected.age),
        ("income", &observed.income, &expected.income),
        ("pric", &observed.price, &expected.price),
    ];
    for (name, o, e) in cols {
        for (stat, ov, ev) in [
            ("min", o.min, e.min),
            ("q1", o.q1, e.q1),
            ("median", o.median, e.median),
            ("mean", o.mean, e.mean),
            ("q3", o.q3, e.q3),
            ("max", o.max, e.max),
        ] {
            out.push(ColumnCheck {
                column: name.into(),
                statistic: stat.into(),
                expected: ev,
                observed: ov,
                within_tolerance: (ov - ev).abs() <= rel_tol * ev.abs().max(1.0),
            });
        }
    }
    for (name, o, e) in [
        ("behavior", observed.adopters, expected.adopters),
        ("gender_male", observed.males, expected.males),
        ("gender_female", observed.females, expected.females),
    ] {
        out.push(ColumnCheck {
            column: name.into(),
            statistic: "count".into(),
            expected: e as f64,
            observed: o as f64,
            within_tolerance: o == e,
        });
    }
    out
}
