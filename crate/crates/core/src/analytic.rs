//! Closed forms for the Markovian `M/M/m/n` busy period.
//!
//! With `a = lambda / mu` and `rho = lambda / (m mu)`, the expected number
//! of arrivals that find `j` customers present during one busy period is
//! `a^j / j!` below `m` and `a^m / m! * rho^(j-m)` from `m` up to `m + n`.
//! Everything else here (time in state, busy-period length, orbital
//! decomposition) follows from that profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many factors `a^j / j!` is evaluated in the log domain.
const DIRECT_PRODUCT_LIMIT: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovSpec {
    pub lambda: f64,
    pub mu: f64,
    pub m: u32,
    pub n: u32,
}

impl MarkovSpec {
    pub fn new(lambda: f64, mu: f64, m: u32, n: u32) -> Result<Self> {
        let spec = MarkovSpec { lambda, mu, m, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidSpec(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidSpec(format!("mu must be > 0, got {}", self.mu)));
        }
        if self.m == 0 {
            return Err(Error::InvalidSpec("need at least one server".into()));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.lambda / (self.m as f64 * self.mu)
    }

    /// Offered load `lambda / mu`.
    pub fn offered_load(&self) -> f64 {
        self.lambda / self.mu
    }

    pub fn capacity(&self) -> u32 {
        self.m + self.n
    }

    fn check_level(&self, j: u32) -> Result<()> {
        if j > self.capacity() {
            Err(Error::Domain(format!(
                "level {j} outside 0..={}",
                self.capacity()
            )))
        } else {
            Ok(())
        }
    }
}

/// `a^j / j!`.
pub(crate) fn poisson_term(a: f64, j: u32) -> f64 {
    if j <= DIRECT_PRODUCT_LIMIT {
        (1..=j).fold(1.0, |acc, i| acc * a / i as f64)
    } else {
        let log_fact: f64 = (2..=j).map(|i| (i as f64).ln()).sum();
        (j as f64 * a.ln() - log_fact).exp()
    }
}

/// `sum_{j=0}^{n} rho^j`, exact `n + 1` at `rho == 1`.
pub(crate) fn geometric_sum(rho: f64, n: u32) -> f64 {
    if rho == 1.0 {
        return (n + 1) as f64;
    }
    if n <= 256 {
        // Horner; stays accurate when rho is close to 1.
        (0..n).fold(1.0, |acc, _| 1.0 + rho * acc)
    } else {
        (1.0 - rho.powi(n as i32 + 1)) / (1.0 - rho)
    }
}

/// Expected number `E f(j+1)` of arrivals that find exactly `j` customers,
/// for `0 <= j <= m + n`.
pub fn expected_level_crossings(spec: &MarkovSpec, j: u32) -> Result<f64> {
    spec.validate()?;
    spec.check_level(j)?;
    let a = spec.offered_load();
    if j < spec.m {
        Ok(poisson_term(a, j))
    } else {
        Ok(poisson_term(a, spec.m) * spec.rho().powi((j - spec.m) as i32))
    }
}

/// Expected losses per busy period, `E f(m+n+1)`.
pub fn expected_losses_markov(spec: &MarkovSpec) -> Result<f64> {
    expected_level_crossings(spec, spec.capacity())
}

/// Expected time `E B(j)` with exactly `j` customers present during a busy
/// cycle (`j = 0` is the idle part).
pub fn expected_state_time(spec: &MarkovSpec, j: u32) -> Result<f64> {
    Ok(expected_level_crossings(spec, j)? / spec.lambda)
}

pub fn expected_busy_period(spec: &MarkovSpec) -> Result<f64> {
    spec.validate()?;
    let a = spec.offered_load();
    let below: f64 = (1..spec.m).map(|j| poisson_term(a, j) / spec.lambda).sum();
    let top = poisson_term(a, spec.m) / spec.lambda * geometric_sum(spec.rho(), spec.n);
    Ok(below + top)
}

/// Expected length of one orbital busy period: an `M/M/1/n` busy period
/// with service rate `m mu`.
pub fn expected_orbital_busy_period(spec: &MarkovSpec) -> Result<f64> {
    spec.validate()?;
    Ok(geometric_sum(spec.rho(), spec.n) / (spec.m as f64 * spec.mu))
}

/// Expected number of orbital busy periods per busy period; does not depend on `n`.
pub fn expected_orbital_count(spec: &MarkovSpec) -> Result<f64> {
    spec.validate()?;
    Ok(poisson_term(spec.offered_load(), spec.m - 1))
}

/// Expected upward crossings of `level` during one excursion of the
/// symmetric simple random walk. The value is 1/2 for every level.
pub fn expected_excursion_crossings(level: u32) -> Result<f64> {
    if level < 1 {
        return Err(Error::Domain("excursion level must be >= 1".into()));
    }
    Ok(0.5)
}

/// `E f(j+1) (mu/lambda)^j prod_{i=1}^{j} min(i, m)`; the level-crossing
/// martingale makes this 1 for every `j`.
pub fn martingale_normalisation(spec: &MarkovSpec, j: u32) -> Result<f64> {
    let f = expected_level_crossings(spec, j)?;
    let ratio = spec.mu / spec.lambda;
    let prod: f64 = (1..=j).map(|i| ratio * i.min(spec.m) as f64).product();
    Ok(f * prod)
}

/// `m^m / m!`, the critical-load loss constant.
pub fn critical_loss_constant(m: u32) -> f64 {
    poisson_term(m as f64, m)
}

/// All busy-period quantities for one spec, in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticProfile {
    pub spec: MarkovSpec,
    pub rho: f64,
    pub level_crossings: Vec<f64>,
    pub state_times: Vec<f64>,
    pub expected_busy_period: f64,
    pub expected_orbital_busy_period: f64,
    pub expected_orbital_count: f64,
    pub expected_losses: f64,
}

pub fn profile(spec: &MarkovSpec) -> Result<AnalyticProfile> {
    spec.validate()?;
    let levels = 0..=spec.capacity();
    Ok(AnalyticProfile {
        spec: *spec,
        rho: spec.rho(),
        level_crossings: levels
            .clone()
            .map(|j| expected_level_crossings(spec, j))
            .collect::<Result<_>>()?,
        state_times: levels
            .map(|j| expected_state_time(spec, j))
            .collect::<Result<_>>()?,
        expected_busy_period: expected_busy_period(spec)?,
        expected_orbital_busy_period: expected_orbital_busy_period(spec)?,
        expected_orbital_count: expected_orbital_count(spec)?,
        expected_losses: expected_losses_markov(spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lambda: f64, mu: f64, m: u32, n: u32) -> MarkovSpec {
        MarkovSpec::new(lambda, mu, m, n).unwrap()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn level_crossing_examples() {
        let s = spec(2.0, 1.0, 2, 3);
        close(expected_level_crossings(&s, 0).unwrap(), 1.0);
        close(expected_level_crossings(&s, 1).unwrap(), 2.0);
        close(expected_level_crossings(&s, 4).unwrap(), 2.0);
        assert!(matches!(
            expected_level_crossings(&s, 6),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn loss_examples() {
        close(expected_losses_markov(&spec(2.0, 1.0, 2, 0)).unwrap(), 2.0);
        close(expected_losses_markov(&spec(3.0, 1.0, 3, 5)).unwrap(), 4.5);
        close(expected_losses_markov(&spec(1.0, 1.0, 1, 7)).unwrap(), 1.0);
    }

    #[test]
    fn state_time_examples() {
        let s = spec(2.0, 1.0, 2, 1);
        close(expected_state_time(&s, 1).unwrap(), 1.0);
        close(expected_state_time(&s, 0).unwrap(), 0.5);
        close(expected_state_time(&s, 3).unwrap(), 1.0);
    }

    #[test]
    fn busy_period_examples() {
        close(expected_busy_period(&spec(2.0, 1.0, 2, 1)).unwrap(), 3.0);
        close(expected_busy_period(&spec(2.0, 1.0, 2, 0)).unwrap(), 2.0);
        close(expected_busy_period(&spec(1.0, 1.0, 1, 0)).unwrap(), 1.0);
    }

    #[test]
    fn orbital_examples() {
        close(expected_orbital_busy_period(&spec(2.0, 1.0, 2, 1)).unwrap(), 1.0);
        close(expected_orbital_busy_period(&spec(2.0, 1.0, 2, 0)).unwrap(), 0.5);
        close(expected_orbital_busy_period(&spec(1.0, 1.0, 2, 2)).unwrap(), 0.875);
        for n in [0, 3, 9] {
            close(expected_orbital_count(&spec(2.0, 1.0, 2, n)).unwrap(), 2.0);
        }
        close(expected_orbital_count(&spec(3.0, 1.0, 3, 0)).unwrap(), 4.5);
        close(expected_orbital_count(&spec(1.0, 2.0, 1, 5)).unwrap(), 1.0);
    }

    #[test]
    fn excursion_constant() {
        assert_eq!(expected_excursion_crossings(1).unwrap(), 0.5);
        assert_eq!(expected_excursion_crossings(7).unwrap(), 0.5);
        assert!(matches!(expected_excursion_crossings(0), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(MarkovSpec::new(0.0, 1.0, 1, 0).is_err());
        assert!(MarkovSpec::new(1.0, -1.0, 1, 0).is_err());
        assert!(MarkovSpec::new(1.0, 1.0, 0, 0).is_err());
    }

    #[test]
    fn geometric_sum_branches_agree() {
        for &rho in &[0.5, 0.999_999, 1.0, 1.000_001, 2.0] {
            let direct: f64 = (0..=30).map(|j| rho_pow(rho, j)).sum();
            let g = geometric_sum(rho, 30);
            assert!((g - direct).abs() < 1e-12 * direct, "rho={rho}");
        }
        assert_eq!(geometric_sum(1.0, 1000), 1001.0);
        let closed = geometric_sum(0.5, 1000);
        assert!((closed - 2.0).abs() < 1e-12);
    }

    fn rho_pow(rho: f64, j: u32) -> f64 {
        (0..j).fold(1.0, |acc, _| acc * rho)
    }

    #[test]
    fn log_domain_agrees_with_product() {
        // j = 20 uses the product, j = 21 the log form; check continuity via
        // the ratio a^21/21! / (a^20/20!) = a/21.
        let a = 17.3;
        let r = poisson_term(a, 21) / poisson_term(a, 20);
        assert!((r - a / 21.0).abs() < 1e-12 * r);
        // large m stays finite
        let s = spec(60.0, 1.0, 60, 4);
        let l = expected_losses_markov(&s).unwrap();
        assert!(l.is_finite() && l > 0.0);
        close(l, critical_loss_constant(60));
    }
}
