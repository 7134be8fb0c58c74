//! Estimates and the statistical checks built on them.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_CONFIDENCE: f64 = 0.99;
/// One-sided ECDF band used for dominance checks at 10^5 samples per side.
pub const DEFAULT_DOMINANCE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub variance: f64,
    pub half_width: f64,
    pub confidence: f64,
    pub count: u64,
}

impl Estimate {
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }

    /// `|mean - x|` in standard errors.
    pub fn z_score(&self, x: f64) -> f64 {
        let se = self.standard_error();
        if se == 0.0 {
            if self.mean == x {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - x).abs() / se
        }
    }
}

/// Two-sided standard normal quantile for `confidence`.
pub fn z_value(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + confidence / 2.0))
}

/// Neumaier sum over values sorted by `total_cmp`, so the result does not
/// depend on input order.
fn ordered_sum(sorted: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in sorted {
        let t = sum + x;
        if f64::abs(sum) >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Sample mean, unbiased variance and normal-approximation half-width.
pub fn mean_ci(samples: &[f64], confidence: f64) -> Result<Estimate> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let z = z_value(confidence)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = ordered_sum(&sorted) / n;
    let mut sq: Vec<f64> = sorted.iter().map(|x| (x - mean) * (x - mean)).collect();
    sq.sort_by(f64::total_cmp);
    let variance = ordered_sum(&sq) / (n - 1.0);
    Ok(Estimate {
        mean,
        variance,
        half_width: z * (variance / n).sqrt(),
        confidence,
        count: samples.len() as u64,
    })
}

/// Ratio of sums `sum(num) / sum(den)` over i.i.d. pairs, with a delta-method
/// interval. `variance` is per pair, so `half_width = z sqrt(variance/count)`
/// still holds.
pub fn ratio_ci(numerators: &[f64], denominators: &[f64], confidence: f64) -> Result<Estimate> {
    assert_eq!(numerators.len(), denominators.len());
    if numerators.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: numerators.len(),
        });
    }
    let z = z_value(confidence)?;
    let n = numerators.len() as f64;
    let num: f64 = numerators.iter().sum();
    let den: f64 = denominators.iter().sum();
    if den == 0.0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let ratio = num / den;
    let den_mean = den / n;
    let resid_var = numerators
        .iter()
        .zip(denominators)
        .map(|(a, b)| (a - ratio * b).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let variance = resid_var / (den_mean * den_mean);
    Ok(Estimate {
        mean: ratio,
        variance,
        half_width: z * (variance / n).sqrt(),
        confidence,
        count: numerators.len() as u64,
    })
}

/// True iff every pair of means differs by at most the root-sum-square of
/// their half-widths.
pub fn consistent_across(estimates: &[Estimate]) -> bool {
    estimates.iter().enumerate().all(|(i, a)| {
        estimates[i + 1..].iter().all(|b| {
            (a.mean - b.mean).abs() <= (a.half_width.powi(2) + b.half_width.powi(2)).sqrt()
        })
    })
}

/// Largest pairwise gap measured against its allowance; `<= 1` means consistent.
pub fn worst_pairwise_ratio(estimates: &[Estimate]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in estimates.iter().enumerate() {
        for b in &estimates[i + 1..] {
            let allow = (a.half_width.powi(2) + b.half_width.powi(2)).sqrt();
            let gap = (a.mean - b.mean).abs();
            let r = if allow == 0.0 {
                if gap == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                gap / allow
            };
            worst = worst.max(r);
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub holds: bool,
    /// `max_x (F_upper(x) - F_lower(x)) - tolerance`.
    pub max_violation: f64,
    pub tolerance: f64,
}

/// Empirical check of `upper >=_st lower`: `F_upper(x) <= F_lower(x) + tol`
/// at every point of the merged support.
pub fn stochastic_dominance(upper: &[f64], lower: &[f64], tolerance: f64) -> DominanceVerdict {
    assert!(!upper.is_empty() && !lower.is_empty(), "both samples must be nonempty");
    let mut u = upper.to_vec();
    let mut l = lower.to_vec();
    u.sort_by(f64::total_cmp);
    l.sort_by(f64::total_cmp);
    let (nu, nl) = (u.len() as f64, l.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut max_gap = f64::NEG_INFINITY;
    while i < u.len() || j < l.len() {
        let x = match (u.get(i), l.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < u.len() && u[i] <= x {
            i += 1;
        }
        while j < l.len() && l[j] <= x {
            j += 1;
        }
        max_gap = max_gap.max(i as f64 / nu - j as f64 / nl);
    }
    let max_violation = max_gap - tolerance;
    DominanceVerdict {
        holds: max_violation <= 0.0,
        max_violation,
        tolerance,
    }
}

/// One-sample Kolmogorov distance `sup |F_n(x) - F(x)|`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        let below = i as f64 / n;
        while i < s.len() && s[i] == x {
            i += 1;
        }
        let at = i as f64 / n;
        let f = cdf(x);
        // F has a possible atom at x; compare both one-sided limits.
        let f_left = cdf(x - x.abs() * 1e-12 - f64::MIN_POSITIVE);
        d = d.max((at - f).abs()).max((below - f_left).abs());
    }
    d
}
