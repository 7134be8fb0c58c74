//! The acceptance battery.
//!
//! Each criterion is split into a measurement step (simulation, solves) and
//! a judging step that turns measurements into [`Check`]s. The split lets a
//! caller feed doctored measurements to a judge, which is how the mutation
//! tests confirm that a criterion can actually fail.
//!
//! Every criterion draws from its own seed family
//! `derive_seed(master_seed, [criterion, point])`, so criteria can be run
//! alone or together with identical results.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, MarkovSpec};
use crate::ctmc;
use crate::distributions::ServiceDistribution;
use crate::error::{Error, Result};
use crate::excursion::{self, ExcursionMethod};
use crate::numfmt;
use crate::rng::derive_seed;
use crate::simulator::{self, BusyPeriodRecord, SystemSpec};
use crate::stats::{self, Estimate, DEFAULT_CONFIDENCE, DEFAULT_DOMINANCE_TOLERANCE};

/// Relative tolerance for the closed-form identities (criterion 1).
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Standard errors allowed between a simulated mean and its reference.
pub const Z_ALLOWANCE: f64 = 3.0;
/// Minimum gap between the oracle's `n = 0` and `n = 1` losses (criterion 5).
pub const SENSITIVITY_GAP: f64 = 1e-6;
/// Oracle insensitivity tolerance at `n = 0` (criterion 5).
pub const INSENSITIVITY_TOLERANCE: f64 = 1e-8;
/// Allowed distance of mean excursion crossings from 1/2 (criterion 8).
pub const EXCURSION_TOLERANCE: f64 = 0.01;
/// Truncated excursions must stay strictly below this (criterion 8).
pub const TRUNCATION_LIMIT: u64 = 10;
pub const EXCURSION_LEVELS: [u32; 3] = [1, 3, 5];

/// Hyperexponential used throughout: p = 0.9, rates 9/5 and 1/5, mean 1.
pub const H2_WITNESS: (f64, f64, f64) = (0.9, 1.8, 0.2);

pub const CRITERIA: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    /// Busy periods per point for a criterion whose full size is `full`.
    fn reps(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => full / 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub scale: Scale,
    pub master_seed: u64,
    /// Thread count for replications; 0 keeps the ambient rayon pool.
    pub workers: usize,
}

impl VerifyOptions {
    pub fn new(scale: Scale, master_seed: u64) -> Self {
        VerifyOptions {
            scale,
            master_seed,
            workers: 0,
        }
    }

    fn seed(&self, criterion: u8, point: u64) -> u64 {
        derive_seed(self.master_seed, &[criterion as u64, point])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value - reference| <= allowance`
    Within,
    /// `value >= reference - allowance`
    AtLeast,
    /// `value <= reference + allowance`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub allowance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, value: f64, relation: Relation, reference: f64, allowance: f64) -> Self {
        let passed = match relation {
            Relation::Within => (value - reference).abs() <= allowance,
            Relation::AtLeast => value >= reference - allowance,
            Relation::AtMost => value <= reference + allowance,
        };
        Check {
            label: label.into(),
            value,
            reference,
            allowance,
            relation,
            passed: passed && value.is_finite(),
        }
    }

    /// Mean within `Z_ALLOWANCE` standard errors of `reference`.
    pub fn z(label: impl Into<String>, est: &Estimate, reference: f64) -> Self {
        Check::new(label, est.mean, Relation::Within, reference, Z_ALLOWANCE * est.standard_error())
    }

    fn render(&self) -> String {
        let op = match self.relation {
            Relation::Within => "within",
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        };
        let rhs = match self.relation {
            Relation::Within => format!(
                "{} of {}",
                numfmt::fmt(self.allowance),
                numfmt::fmt(self.reference)
            ),
            Relation::AtLeast => format!(
                "{} - {}",
                numfmt::fmt(self.reference),
                numfmt::fmt(self.allowance)
            ),
            Relation::AtMost => format!(
                "{} + {}",
                numfmt::fmt(self.reference),
                numfmt::fmt(self.allowance)
            ),
        };
        format!(
            "    {} {}: {} {} {}",
            if self.passed { "ok  " } else { "FAIL" },
            self.label,
            numfmt::fmt(self.value),
            op,
            rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    fn from_checks(id: u8, title: &str, checks: Vec<Check>) -> Self {
        CriterionResult {
            id,
            title: title.to_string(),
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// One summary line, e.g. `PASS  2  M/M/m/n loss constant`.
    pub fn headline(&self) -> String {
        format!(
            "{}  {:>2}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scale: Scale,
    pub master_seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let scale = match self.scale {
            Scale::Quick => "quick",
            Scale::Full => "full",
        };
        let _ = writeln!(out, "busyloss verify ({scale}, seed {})", self.master_seed);
        for c in &self.criteria {
            let _ = writeln!(out, "{}", c.headline());
            for check in &c.checks {
                let _ = writeln!(out, "{}", check.render());
            }
        }
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} criteria passed", self.criteria.len());
        out
    }

    pub fn to_json(&self) -> String {
        numfmt::to_json_string(self)
    }
}

/// Run the listed criteria in order.
pub fn run(opts: &VerifyOptions, ids: &[u8]) -> Result<Report> {
    let criteria = ids
        .iter()
        .map(|&id| run_criterion(id, opts))
        .collect::<Result<_>>()?;
    Ok(Report {
        scale: opts.scale,
        master_seed: opts.master_seed,
        criteria,
    })
}

pub fn run_all(opts: &VerifyOptions) -> Result<Report> {
    run(opts, &CRITERIA)
}

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Result<CriterionResult> {
    let o = *opts;
    simulator::with_workers(opts.workers, move || match id {
        1 => Ok(judge_identities(&measure_identities()?)),
        2 => Ok(judge_loss_constant(&measure_loss_constant(&o, |r| r.losses as f64)?)),
        3 => Ok(judge_constancy(&measure_constancy(&o)?)),
        4 => Ok(judge_direction(&measure_direction(&o)?)),
        5 => Ok(judge_insensitivity(&measure_insensitivity()?)),
        6 => Ok(judge_orbital_law(&measure_orbital_law(&o)?)),
        7 => Ok(judge_level_profile(&measure_level_profile(&o)?)),
        8 => Ok(judge_excursions(&measure_excursions(&o)?)),
        9 => Ok(judge_dominance(&measure_dominance(&o)?)),
        10 => Ok(judge_cross_validation(&measure_cross_validation(&o)?)),
        11 => Ok(judge_determinism(&measure_determinism(&o)?)),
        _ => Err(Error::Config(format!("no criterion {id}"))),
    })?
}

pub fn exponential_unit() -> ServiceDistribution {
    ServiceDistribution::Exponential { rate: 1.0 }
}

pub fn deterministic_unit() -> ServiceDistribution {
    ServiceDistribution::Deterministic { value: 1.0 }
}

pub fn erlang3_unit() -> ServiceDistribution {
    ServiceDistribution::Erlang { shape: 3, rate: 3.0 }
}

pub fn h2_witness() -> ServiceDistribution {
    let (p, rate1, rate2) = H2_WITNESS;
    ServiceDistribution::HyperExponential { p, rate1, rate2 }
}

fn critical(service: ServiceDistribution, m: u32, n: u32) -> Result<SystemSpec> {
    SystemSpec::critical(service, m, n)
}

fn losses_estimate(spec: &SystemSpec, reps: usize, seed: u64) -> Result<Estimate> {
    let xs = simulator::run_replications_with(spec, reps, seed, |r| r.losses as f64)?;
    stats::mean_ci(&xs, DEFAULT_CONFIDENCE)
}

// ---------------------------------------------------------------- 1

/// Largest relative error found for each identity over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityErrors {
    pub state_time: f64,
    pub decomposition: f64,
    pub martingale: f64,
    pub n0_busy_period: f64,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn measure_identities() -> Result<IdentityErrors> {
    let mut e = IdentityErrors {
        state_time: 0.0,
        decomposition: 0.0,
        martingale: 0.0,
        n0_busy_period: 0.0,
    };
    for m in 1..=5u32 {
        for n in 0..=5u32 {
            for rho in [0.5, 1.0, 2.0] {
                let mu = 1.0;
                let lambda = rho * m as f64 * mu;
                let spec = MarkovSpec::new(lambda, mu, m, n)?;
                for j in 0..=m + n {
                    let f = analytic::expected_level_crossings(&spec, j)?;
                    let b = analytic::expected_state_time(&spec, j)?;
                    e.state_time = e.state_time.max(rel_err(lambda * b, f));
                    let g = analytic::martingale_normalisation(&spec, j)?;
                    e.martingale = e.martingale.max(rel_err(g, 1.0));
                }
                let t = analytic::expected_busy_period(&spec)?;
                let inner = if m >= 2 {
                    analytic::expected_busy_period(&MarkovSpec::new(lambda, mu, m - 1, 0)?)?
                } else {
                    0.0
                };
                let kz = analytic::expected_orbital_count(&spec)?
                    * analytic::expected_orbital_busy_period(&spec)?;
                e.decomposition = e.decomposition.max(rel_err(t - inner, kz));
                if n == 0 {
                    // sum_{j=1}^{m} lambda^{j-1} / (j! mu^j), summed term by term
                    let mut term = 1.0 / mu;
                    let mut direct = term;
                    for j in 2..=m {
                        term *= lambda / (j as f64 * mu);
                        direct += term;
                    }
                    e.n0_busy_period = e.n0_busy_period.max(rel_err(t, direct));
                }
            }
        }
    }
    Ok(e)
}

pub fn judge_identities(e: &IdentityErrors) -> CriterionResult {
    let at_most = |label: &str, v: f64| Check::new(label, v, Relation::AtMost, 0.0, IDENTITY_TOLERANCE);
    CriterionResult::from_checks(
        1,
        "closed-form identities on m<=5, n<=5, rho in {0.5, 1, 2}",
        vec![
            at_most("max rel err lambda E B(j) vs E f(j+1)", e.state_time),
            at_most("max rel err busy-period decomposition", e.decomposition),
            at_most("max rel err martingale normalisation", e.martingale),
            at_most("max rel err n=0 busy period", e.n0_busy_period),
        ],
    )
}

// ---------------------------------------------------------------- 2

#[derive(Debug, Clone, PartialEq)]
pub struct PointEstimate {
    pub label: String,
    pub estimate: Estimate,
    pub reference: f64,
}

pub const LOSS_CONSTANT_POINTS: [(u32, u32); 6] = [(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 2)];

/// Mean of `loss_of(record)` at each M/M/m/n point. The extractor exists so
/// a miscounting variant can be plugged in.
pub fn measure_loss_constant(
    opts: &VerifyOptions,
    loss_of: impl Fn(&BusyPeriodRecord) -> f64 + Sync,
) -> Result<Vec<PointEstimate>> {
    let reps = opts.scale.reps(100_000);
    LOSS_CONSTANT_POINTS
        .iter()
        .enumerate()
        .map(|(i, &(m, n))| {
            let spec = critical(exponential_unit(), m, n)?;
            let xs = simulator::run_replications_with(&spec, reps, opts.seed(2, i as u64), |r| loss_of(&r))?;
            Ok(PointEstimate {
                label: spec.label(),
                estimate: stats::mean_ci(&xs, DEFAULT_CONFIDENCE)?,
                reference: analytic::critical_loss_constant(m),
            })
        })
        .collect()
}

pub fn judge_loss_constant(points: &[PointEstimate]) -> CriterionResult {
    let checks = points
        .iter()
        .map(|p| Check::z(format!("{} mean losses", p.label), &p.estimate, p.reference))
        .collect();
    CriterionResult::from_checks(2, "M/M/m/n loss constant m^m/m!", checks)
}

// ---------------------------------------------------------------- 3

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub family: String,
    pub estimates: Vec<(u32, Estimate)>,
}

fn sweep_losses(opts: &VerifyOptions, criterion: u8, family: u64, service: ServiceDistribution, ns: &[u32], full: usize) -> Result<Sweep> {
    let reps = opts.scale.reps(full);
    let mut estimates = Vec::new();
    let mut label = String::new();
    for &n in ns {
        let spec = critical(service.clone(), 2, n)?;
        label = format!("M/{}/2/n", spec.service.kendall());
        let seed = derive_seed(opts.seed(criterion, family), &[n as u64]);
        estimates.push((n, losses_estimate(&spec, reps, seed)?));
    }
    Ok(Sweep {
        family: label,
        estimates,
    })
}

pub fn measure_constancy(opts: &VerifyOptions) -> Result<Vec<Sweep>> {
    Ok(vec![
        sweep_losses(opts, 3, 0, deterministic_unit(), &[1, 2, 3], 200_000)?,
        sweep_losses(opts, 3, 1, h2_witness(), &[1, 2, 3], 200_000)?,
    ])
}

pub fn judge_constancy(sweeps: &[Sweep]) -> CriterionResult {
    let mut checks = Vec::new();
    for s in sweeps {
        for (i, (na, a)) in s.estimates.iter().enumerate() {
            for (nb, b) in &s.estimates[i + 1..] {
                checks.push(Check::new(
                    format!(
                        "{} |L(n={na}) - L(n={nb})|, means {} and {}",
                        s.family,
                        numfmt::fmt(a.mean),
                        numfmt::fmt(b.mean)
                    ),
                    (a.mean - b.mean).abs(),
                    Relation::AtMost,
                    0.0,
                    (a.half_width.powi(2) + b.half_width.powi(2)).sqrt(),
                ));
            }
        }
        let ests: Vec<Estimate> = s.estimates.iter().map(|(_, e)| *e).collect();
        debug_assert_eq!(
            checks.iter().rev().take(ests.len() * (ests.len() - 1) / 2).all(|c| c.passed),
            stats::consistent_across(&ests)
        );
    }
    CriterionResult::from_checks(3, "expected losses constant in n>=1 for general service", checks)
}

// ---------------------------------------------------------------- 4

pub fn measure_direction(opts: &VerifyOptions) -> Result<Vec<PointEstimate>> {
    let reps = opts.scale.reps(200_000);
    [deterministic_unit(), erlang3_unit(), h2_witness()]
        .into_iter()
        .enumerate()
        .map(|(i, service)| {
            let spec = critical(service, 2, 2)?;
            Ok(PointEstimate {
                label: spec.label(),
                estimate: losses_estimate(&spec, reps, opts.seed(4, i as u64))?,
                reference: analytic::critical_loss_constant(2),
            })
        })
        .collect()
}

pub fn judge_direction(points: &[PointEstimate]) -> CriterionResult {
    let checks = points
        .iter()
        .map(|p| {
            let svc = p.label.split('/').nth(1).unwrap_or("");
            // NWU families sit below the constant, NBU families above.
            let relation = if svc.starts_with('H') {
                Relation::AtMost
            } else {
                Relation::AtLeast
            };
            Check::new(
                format!("{} mean losses", p.label),
                p.estimate.mean,
                relation,
                p.reference,
                p.estimate.half_width,
            )
        })
        .collect();
    CriterionResult::from_checks(4, "NBU losses >= m^m/m!, NWU losses <= m^m/m!", checks)
}

// ---------------------------------------------------------------- 5

#[derive(Debug, Clone, PartialEq)]
pub struct OracleLosses {
    pub n0: f64,
    pub n1: f64,
}

pub fn measure_insensitivity() -> Result<OracleLosses> {
    let ph = h2_witness().as_phase_type()?;
    let at = |n| ctmc::expected_busy_period_losses(&ctmc::build_model(2.0, &ph, 2, n)?);
    Ok(OracleLosses { n0: at(0)?, n1: at(1)? })
}

pub fn judge_insensitivity(o: &OracleLosses) -> CriterionResult {
    CriterionResult::from_checks(
        5,
        "oracle: M/H2/2/0 insensitive, M/H2/2/1 differs",
        vec![
            Check::new("M/H2/2/0 oracle losses", o.n0, Relation::Within, 2.0, INSENSITIVITY_TOLERANCE),
            Check::new(
                "|M/H2/2/1 - M/H2/2/0| oracle losses",
                (o.n1 - o.n0).abs(),
                Relation::AtLeast,
                SENSITIVITY_GAP,
                0.0,
            ),
        ],
    )
}

// ---------------------------------------------------------------- 6

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalLaw {
    pub label: String,
    /// Losses per orbital busy period, ratio estimator over busy periods.
    pub per_orbital: Estimate,
    pub orbital_periods: u64,
    pub required_orbital_periods: u64,
}

pub const MIN_ORBITAL_PERIODS: u64 = 100_000;

pub fn measure_orbital_law(opts: &VerifyOptions) -> Result<Vec<OrbitalLaw>> {
    // E kappa = 2 at these points, so 10^5 busy periods give about 2 10^5
    // orbital periods.
    let reps = opts.scale.reps(100_000);
    [exponential_unit(), deterministic_unit(), h2_witness()]
        .into_iter()
        .enumerate()
        .map(|(i, service)| {
            let spec = critical(service, 2, 2)?;
            let pairs = simulator::run_replications_with(&spec, reps, opts.seed(6, i as u64), |r| {
                (r.losses as f64, r.orbital_count as f64)
            })?;
            let (num, den): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let orbital_periods = den.iter().sum::<f64>() as u64;
            Ok(OrbitalLaw {
                label: spec.label(),
                per_orbital: stats::ratio_ci(&num, &den, DEFAULT_CONFIDENCE)?,
                orbital_periods,
                required_orbital_periods: opts.scale.reps(MIN_ORBITAL_PERIODS as usize) as u64,
            })
        })
        .collect()
}

pub fn judge_orbital_law(points: &[OrbitalLaw]) -> CriterionResult {
    let mut checks = Vec::new();
    for p in points {
        checks.push(Check::z(format!("{} losses per orbital period", p.label), &p.per_orbital, 1.0));
        checks.push(Check::new(
            format!("{} orbital periods observed", p.label),
            p.orbital_periods as f64,
            Relation::AtLeast,
            p.required_orbital_periods as f64,
            0.0,
        ));
    }
    CriterionResult::from_checks(6, "one loss per orbital busy period on average", checks)
}

// ---------------------------------------------------------------- 7

pub fn measure_level_profile(opts: &VerifyOptions) -> Result<Vec<PointEstimate>> {
    let reps = opts.scale.reps(100_000);
    let spec = critical(exponential_unit(), 2, 2)?;
    let markov = MarkovSpec::new(2.0, 1.0, 2, 2)?;
    let records = simulator::run_replications_with(&spec, reps, opts.seed(7, 0), |r| r.level_crossings)?;
    (1..=5usize)
        .map(|j| {
            let xs: Vec<f64> = records.iter().map(|f| f[j - 1] as f64).collect();
            Ok(PointEstimate {
                label: format!("f({j})"),
                estimate: stats::mean_ci(&xs, DEFAULT_CONFIDENCE)?,
                reference: analytic::expected_level_crossings(&markov, j as u32 - 1)?,
            })
        })
        .collect()
}

pub fn judge_level_profile(points: &[PointEstimate]) -> CriterionResult {
    let checks = points
        .iter()
        .map(|p| Check::z(format!("M/M/2/2 mean {}", p.label), &p.estimate, p.reference))
        .collect();
    CriterionResult::from_checks(7, "level-crossing profile of M/M/2/2", checks)
}

// ---------------------------------------------------------------- 8

pub fn measure_excursions(opts: &VerifyOptions) -> Result<Vec<excursion::ExcursionSummary>> {
    // The embedded sampler is exact and cheap, so both scales use 10^6.
    EXCURSION_LEVELS
        .iter()
        .enumerate()
        .map(|(i, &level)| {
            excursion::run_excursions(level, 1_000_000, opts.seed(8, i as u64), ExcursionMethod::Embedded)
        })
        .collect()
}

pub fn judge_excursions(summaries: &[excursion::ExcursionSummary]) -> CriterionResult {
    let mut checks = Vec::new();
    for s in summaries {
        checks.push(Check::new(
            format!("level {} mean upcrossings over {} excursions", s.level, s.excursions),
            s.mean_crossings,
            Relation::Within,
            0.5,
            EXCURSION_TOLERANCE,
        ));
        checks.push(Check::new(
            format!("level {} truncated excursions", s.level),
            s.truncated as f64,
            Relation::AtMost,
            (TRUNCATION_LIMIT - 1) as f64,
            0.0,
        ));
    }
    CriterionResult::from_checks(8, "random-walk excursion crossings equal 1/2", checks)
}

// ---------------------------------------------------------------- 9

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceCase {
    pub label: String,
    pub verdict: stats::DominanceVerdict,
    pub upper_mean: f64,
    pub lower_mean: f64,
}

pub fn measure_dominance(opts: &VerifyOptions) -> Result<Vec<DominanceCase>> {
    let reps = opts.scale.reps(100_000);
    let mut out = Vec::new();
    for (i, service) in [deterministic_unit(), h2_witness()].into_iter().enumerate() {
        let with_queue = critical(service.clone(), 2, 1)?;
        let without = critical(service.clone(), 2, 0)?;
        let t1 = simulator::measure_state_m_minus_1(&with_queue, reps, opts.seed(9, 2 * i as u64))?;
        let t0 = simulator::measure_state_m_minus_1(&without, reps, opts.seed(9, 2 * i as u64 + 1))?;
        let nbu = matches!(service.classify(), crate::DistributionClass::Nbu);
        let (upper, lower, label) = if nbu {
            (&t1, &t0, format!("T_2,1(1) >=st T_2,0(1), M/{}", service.kendall()))
        } else {
            (&t0, &t1, format!("T_2,0(1) >=st T_2,1(1), M/{}", service.kendall()))
        };
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        out.push(DominanceCase {
            label,
            verdict: stats::stochastic_dominance(upper, lower, DEFAULT_DOMINANCE_TOLERANCE),
            upper_mean: mean(upper),
            lower_mean: mean(lower),
        });
    }
    Ok(out)
}

pub fn judge_dominance(cases: &[DominanceCase]) -> CriterionResult {
    let checks = cases
        .iter()
        .map(|c| {
            Check::new(
                format!("{} ECDF excess over tolerance {}", c.label, numfmt::fmt(c.verdict.tolerance)),
                c.verdict.max_violation,
                Relation::AtMost,
                0.0,
                0.0,
            )
        })
        .collect();
    CriterionResult::from_checks(9, "time at m-1 ordered by NBU/NWU class", checks)
}

// ---------------------------------------------------------------- 10

pub fn measure_cross_validation(opts: &VerifyOptions) -> Result<Vec<PointEstimate>> {
    let reps = opts.scale.reps(100_000);
    let mut out = Vec::new();
    for (i, service) in [exponential_unit(), h2_witness()].into_iter().enumerate() {
        let spec = critical(service.clone(), 2, 1)?;
        let model = ctmc::build_model(spec.arrival_rate, &service.as_phase_type()?, 2, 1)?;
        let pairs = simulator::run_replications_with(&spec, reps, opts.seed(10, i as u64), |r| {
            (r.losses as f64, r.duration)
        })?;
        let (losses, durations): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        out.push(PointEstimate {
            label: format!("{} mean losses", spec.label()),
            estimate: stats::mean_ci(&losses, DEFAULT_CONFIDENCE)?,
            reference: ctmc::expected_busy_period_losses(&model)?,
        });
        out.push(PointEstimate {
            label: format!("{} mean busy period", spec.label()),
            estimate: stats::mean_ci(&durations, DEFAULT_CONFIDENCE)?,
            reference: ctmc::expected_busy_period_length(&model)?,
        });
    }
    Ok(out)
}

pub fn judge_cross_validation(points: &[PointEstimate]) -> CriterionResult {
    let checks = points
        .iter()
        .map(|p| Check::z(format!("{} vs oracle", p.label), &p.estimate, p.reference))
        .collect();
    CriterionResult::from_checks(10, "simulation agrees with the exact oracle", checks)
}

// ---------------------------------------------------------------- 11

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminismRuns {
    /// Quick reports of criteria 1-10: workers 1, workers 4, workers 4 again.
    pub reports: Vec<String>,
}

pub fn measure_determinism(opts: &VerifyOptions) -> Result<DeterminismRuns> {
    let inner: Vec<u8> = CRITERIA.iter().copied().filter(|&c| c != 11).collect();
    let mut reports = Vec::new();
    for workers in [1usize, 4, 4] {
        let o = VerifyOptions {
            scale: Scale::Quick,
            master_seed: opts.master_seed,
            workers,
        };
        let r = run(&o, &inner)?;
        reports.push(r.render_text() + &r.to_json());
    }
    Ok(DeterminismRuns { reports })
}

pub fn judge_determinism(runs: &DeterminismRuns) -> CriterionResult {
    let base = &runs.reports[0];
    let differing = runs.reports.iter().filter(|r| *r != base).count();
    CriterionResult::from_checks(
        11,
        "quick reports identical across runs and worker counts {1, 4}",
        vec![Check::new(
            format!("reports differing from the 1-worker run (of {})", runs.reports.len()),
            differing as f64,
            Relation::AtMost,
            0.0,
            0.0,
        )],
    )
}
