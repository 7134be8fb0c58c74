//! Exact busy-period analysis of `M/PH/m/n` by explicit state enumeration.
//!
//! A state records the number of waiting customers and, for each service
//! phase, how many customers in service currently occupy it. Servers are
//! interchangeable, so this unordered multiset is all the chain needs.
//!
//! The busy-period chain ([`build_model`]) holds every non-empty state
//! reachable from a single customer; emptying the system is absorption.
//! Expected rewards accumulated before absorption come from one linear solve
//! `(-Q_T) h = r`. Losses are the reward `lambda` per unit time spent with
//! `m + n` customers present.
//!
//! The full chain ([`build_full_chain`]) adds the empty state back and is
//! irreducible; its stationary vector gives the long-run blocking
//! probability. For `m = 2`, `n = 1` and two-phase service it has nine
//! states.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::distributions::PhaseType;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix};

pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OracleState {
    pub queue_length: u32,
    pub phase_counts: Vec<u32>,
}

impl OracleState {
    pub fn in_service(&self) -> u32 {
        self.phase_counts.iter().sum()
    }

    pub fn customers(&self) -> u32 {
        self.queue_length + self.in_service()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtmcModel {
    pub lambda: f64,
    pub servers: u32,
    pub waiting_places: u32,
    pub states: Vec<OracleState>,
    /// Generator restricted to the transient states, diagonal included.
    pub generator: SparseMatrix,
    /// Rate of jumping from each transient state straight to the empty state.
    pub absorption: Vec<f64>,
    pub loss_rate_vector: Vec<f64>,
    pub initial_distribution: Vec<f64>,
}

/// Irreducible chain over all occupancies `0..=m+n`, empty state first.
#[derive(Debug, Clone, PartialEq)]
pub struct FullChain {
    pub states: Vec<OracleState>,
    pub generator: SparseMatrix,
}

struct Builder<'a> {
    lambda: f64,
    service: &'a PhaseType,
    exits: Vec<f64>,
    m: u32,
    n: u32,
    max_states: usize,
    index: HashMap<OracleState, usize>,
    states: Vec<OracleState>,
    queue: VecDeque<usize>,
}

/// Where a transition leads.
enum Target {
    State(OracleState),
    Empty,
}

impl<'a> Builder<'a> {
    fn new(lambda: f64, service: &'a PhaseType, m: u32, n: u32, max_states: usize) -> Self {
        Builder {
            lambda,
            service,
            exits: service.exit_rates(),
            m,
            n,
            max_states,
            index: HashMap::new(),
            states: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn intern(&mut self, s: OracleState) -> Result<usize> {
        if let Some(&i) = self.index.get(&s) {
            return Ok(i);
        }
        if self.states.len() >= self.max_states {
            return Err(Error::Capacity {
                bound: self.max_states,
            });
        }
        let i = self.states.len();
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.queue.push_back(i);
        Ok(i)
    }

    fn single_customer(&self, phase: usize) -> OracleState {
        let mut phase_counts = vec![0; self.service.phases()];
        phase_counts[phase] = 1;
        OracleState {
            queue_length: 0,
            phase_counts,
        }
    }

    /// Outgoing transitions of `s` (excluding blocked arrivals) and its total
    /// outflow rate.
    fn transitions(&self, s: &OracleState) -> (Vec<(Target, f64)>, f64) {
        let k = self.service.phases();
        let alpha = &self.service.initial;
        let sub = &self.service.subgenerator;
        let mut out = Vec::new();
        let mut total_rate = 0.0;
        let busy = s.in_service();

        if busy == 0 {
            for b in (0..k).filter(|&b| alpha[b] > 0.0) {
                out.push((Target::State(self.single_customer(b)), self.lambda * alpha[b]));
            }
            return (out, self.lambda);
        }

        if s.customers() < self.m + self.n {
            total_rate += self.lambda;
            if busy < self.m {
                for b in (0..k).filter(|&b| alpha[b] > 0.0) {
                    let mut t = s.clone();
                    t.phase_counts[b] += 1;
                    out.push((Target::State(t), self.lambda * alpha[b]));
                }
            } else {
                let mut t = s.clone();
                t.queue_length += 1;
                out.push((Target::State(t), self.lambda));
            }
        }

        for a in (0..k).filter(|&a| s.phase_counts[a] > 0) {
            let c = s.phase_counts[a] as f64;
            total_rate += c * -sub[a][a];
            for b in (0..k).filter(|&b| b != a && sub[a][b] > 0.0) {
                let mut t = s.clone();
                t.phase_counts[a] -= 1;
                t.phase_counts[b] += 1;
                out.push((Target::State(t), c * sub[a][b]));
            }
            if self.exits[a] > 0.0 {
                let rate = c * self.exits[a];
                let mut t = s.clone();
                t.phase_counts[a] -= 1;
                if t.queue_length > 0 {
                    t.queue_length -= 1;
                    for b in (0..k).filter(|&b| alpha[b] > 0.0) {
                        let mut u = t.clone();
                        u.phase_counts[b] += 1;
                        out.push((Target::State(u), rate * alpha[b]));
                    }
                } else if busy == 1 {
                    out.push((Target::Empty, rate));
                } else {
                    out.push((Target::State(t), rate));
                }
            }
        }
        (out, total_rate)
    }
}

fn check_inputs(lambda: f64, service: &PhaseType, m: u32) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidSpec(format!("arrival rate must be > 0, got {lambda}")));
    }
    if m == 0 {
        return Err(Error::InvalidSpec("need at least one server".into()));
    }
    service.validate()
}

/// Busy-period chain with the default state bound.
pub fn build_model(lambda: f64, service: &PhaseType, m: u32, n: u32) -> Result<CtmcModel> {
    build_model_bounded(lambda, service, m, n, DEFAULT_MAX_STATES)
}

pub fn build_model_bounded(
    lambda: f64,
    service: &PhaseType,
    m: u32,
    n: u32,
    max_states: usize,
) -> Result<CtmcModel> {
    check_inputs(lambda, service, m)?;
    let mut b = Builder::new(lambda, service, m, n, max_states);
    let k = service.phases();
    let mut initial = Vec::new();
    for phase in (0..k).filter(|&p| service.initial[p] > 0.0) {
        let i = b.intern(b.single_customer(phase))?;
        initial.push((i, service.initial[phase]));
    }

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut absorption = Vec::new();
    while let Some(i) = b.queue.pop_front() {
        let s = b.states[i].clone();
        let (edges, total) = b.transitions(&s);
        let mut row = vec![(i, -total)];
        let mut absorb = 0.0;
        for (target, rate) in edges {
            match target {
                Target::State(t) => row.push((b.intern(t)?, rate)),
                Target::Empty => absorb += rate,
            }
        }
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
            absorption.resize(i + 1, 0.0);
        }
        rows[i] = row;
        absorption[i] = absorb;
    }

    let dim = b.states.len();
    let mut initial_distribution = vec![0.0; dim];
    for (i, p) in initial {
        initial_distribution[i] += p;
    }
    let capacity = m + n;
    let loss_rate_vector = b
        .states
        .iter()
        .map(|s| if s.customers() == capacity { lambda } else { 0.0 })
        .collect();
    Ok(CtmcModel {
        lambda,
        servers: m,
        waiting_places: n,
        states: b.states,
        generator: SparseMatrix::from_rows(rows),
        absorption,
        loss_rate_vector,
        initial_distribution,
    })
}

/// Irreducible chain including the empty state (index 0).
pub fn build_full_chain(lambda: f64, service: &PhaseType, m: u32, n: u32) -> Result<FullChain> {
    build_full_chain_bounded(lambda, service, m, n, DEFAULT_MAX_STATES)
}

pub fn build_full_chain_bounded(
    lambda: f64,
    service: &PhaseType,
    m: u32,
    n: u32,
    max_states: usize,
) -> Result<FullChain> {
    check_inputs(lambda, service, m)?;
    let mut b = Builder::new(lambda, service, m, n, max_states);
    let empty = OracleState {
        queue_length: 0,
        phase_counts: vec![0; service.phases()],
    };
    b.intern(empty.clone())?;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    while let Some(i) = b.queue.pop_front() {
        let s = b.states[i].clone();
        let (edges, total) = b.transitions(&s);
        let mut row = vec![(i, -total)];
        for (target, rate) in edges {
            let j = match target {
                Target::State(t) => b.intern(t)?,
                Target::Empty => 0,
            };
            row.push((j, rate));
        }
        if rows.len() <= i {
            rows.resize(i + 1, Vec::new());
        }
        rows[i] = row;
    }
    Ok(FullChain {
        states: b.states,
        generator: SparseMatrix::from_rows(rows),
    })
}

impl CtmcModel {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// `(-Q_T)`, the matrix every busy-period solve inverts.
    fn negated_generator(&self) -> SparseMatrix {
        let rows = (0..self.generator.dim())
            .map(|i| self.generator.row(i).map(|(j, v)| (j, -v)).collect())
            .collect();
        SparseMatrix::from_rows(rows)
    }

    /// Expected total of `reward` (a rate per unit time in each state)
    /// accumulated before absorption, from the initial distribution.
    pub fn expected_reward(&self, reward: &[f64]) -> Result<f64> {
        assert_eq!(reward.len(), self.state_count());
        let h = linalg::solve(&self.negated_generator(), reward)?;
        Ok(self
            .initial_distribution
            .iter()
            .zip(&h)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Expected time spent with exactly `j` customers present, `1 <= j <= m + n`.
    pub fn expected_time_at_occupancy(&self, j: u32) -> Result<f64> {
        let reward: Vec<f64> = self
            .states
            .iter()
            .map(|s| if s.customers() == j { 1.0 } else { 0.0 })
            .collect();
        self.expected_reward(&reward)
    }

    /// Expected number of arrivals finding `j` customers, `0 <= j <= m + n`
    /// (the opening arrival is the only one that finds 0).
    pub fn expected_level_crossings(&self, j: u32) -> Result<f64> {
        if j > self.servers + self.waiting_places {
            return Err(Error::Domain(format!("level {j} beyond capacity")));
        }
        if j == 0 {
            return Ok(1.0);
        }
        Ok(self.lambda * self.expected_time_at_occupancy(j)?)
    }

    /// Expected number of orbital busy periods per busy period.
    pub fn expected_orbital_count(&self) -> Result<f64> {
        self.expected_level_crossings(self.servers - 1)
    }

    pub fn expected_served(&self) -> Result<f64> {
        let capacity = self.servers + self.waiting_places;
        let admitted: Vec<f64> = self
            .states
            .iter()
            .map(|s| if s.customers() < capacity { self.lambda } else { 0.0 })
            .collect();
        Ok(1.0 + self.expected_reward(&admitted)?)
    }
}

pub fn expected_busy_period_losses(model: &CtmcModel) -> Result<f64> {
    model.expected_reward(&model.loss_rate_vector)
}

pub fn expected_busy_period_length(model: &CtmcModel) -> Result<f64> {
    model.expected_reward(&vec![1.0; model.state_count()])
}

/// Long-run fraction of time with `m + n` customers present, which by
/// PASTA is the fraction of arrivals lost.
pub fn stationary_loss_probability(lambda: f64, service: &PhaseType, m: u32, n: u32) -> Result<f64> {
    full_chain_loss_probability(&build_full_chain(lambda, service, m, n)?, m + n)
}

fn full_chain_loss_probability(chain: &FullChain, capacity: u32) -> Result<f64> {
    let pi = linalg::stationary(&chain.generator)?;
    Ok(chain
        .states
        .iter()
        .zip(&pi)
        .filter(|(s, _)| s.customers() == capacity)
        .map(|(_, p)| p)
        .sum())
}

/// Everything the oracle reports for one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub state_count: usize,
    pub full_chain_state_count: usize,
    pub expected_losses: f64,
    pub expected_busy_period: f64,
    pub expected_served: f64,
    pub expected_orbital_count: f64,
    pub expected_time_m_minus_1: f64,
    pub loss_probability: f64,
}

pub fn report(lambda: f64, service: &PhaseType, m: u32, n: u32) -> Result<OracleReport> {
    report_bounded(lambda, service, m, n, DEFAULT_MAX_STATES)
}

/// [`report`] with an explicit state-space bound for both chains.
pub fn report_bounded(
    lambda: f64,
    service: &PhaseType,
    m: u32,
    n: u32,
    max_states: usize,
) -> Result<OracleReport> {
    let model = build_model_bounded(lambda, service, m, n, max_states)?;
    let full = build_full_chain_bounded(lambda, service, m, n, max_states)?;
    let expected_time_m_minus_1 = if m >= 2 {
        model.expected_time_at_occupancy(m - 1)?
    } else {
        0.0
    };
    Ok(OracleReport {
        state_count: model.state_count(),
        full_chain_state_count: full.states.len(),
        expected_losses: expected_busy_period_losses(&model)?,
        expected_busy_period: expected_busy_period_length(&model)?,
        expected_served: model.expected_served()?,
        expected_orbital_count: model.expected_orbital_count()?,
        expected_time_m_minus_1,
        loss_probability: full_chain_loss_probability(&full, m + n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ServiceDistribution;

    fn ph(d: ServiceDistribution) -> PhaseType {
        d.as_phase_type().unwrap()
    }

    fn exp(rate: f64) -> PhaseType {
        ph(ServiceDistribution::exponential(rate).unwrap())
    }

    fn witness_h2() -> PhaseType {
        ph(ServiceDistribution::hyperexponential(0.9, 1.8, 0.2).unwrap())
    }

    #[test]
    fn state_counts() {
        assert_eq!(build_model(2.0, &exp(1.0), 2, 1).unwrap().state_count(), 3);
        assert_eq!(build_model(2.0, &witness_h2(), 2, 1).unwrap().state_count(), 8);
        assert_eq!(build_full_chain(2.0, &witness_h2(), 2, 1).unwrap().states.len(), 9);
        let e2 = ph(ServiceDistribution::erlang(2, 2.0).unwrap());
        assert_eq!(build_model(1.0, &e2, 1, 0).unwrap().state_count(), 2);
    }

    #[test]
    fn generator_rows_balance() {
        let model = build_model(2.0, &witness_h2(), 2, 2).unwrap();
        for i in 0..model.state_count() {
            let row: f64 = model.generator.row(i).map(|(_, v)| v).sum();
            assert!((row + model.absorption[i]).abs() < 1e-12);
            assert!(row <= 1e-12);
        }
        let p: f64 = model.initial_distribution.iter().sum();
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn birth_death_examples() {
        let m = build_model(2.0, &exp(1.0), 2, 1).unwrap();
        assert!((expected_busy_period_losses(&m).unwrap() - 2.0).abs() < 1e-12);
        assert!((expected_busy_period_length(&m).unwrap() - 3.0).abs() < 1e-12);
        let single = build_model(1.0, &exp(1.0), 1, 0).unwrap();
        assert!((expected_busy_period_length(&single).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn loss_probability_examples() {
        assert!((stationary_loss_probability(1.0, &exp(1.0), 1, 0).unwrap() - 0.5).abs() < 1e-14);
        assert!((stationary_loss_probability(2.0, &exp(1.0), 2, 0).unwrap() - 0.4).abs() < 1e-14);
        assert!(
            (stationary_loss_probability(2.0, &witness_h2(), 2, 0).unwrap() - 0.4).abs() < 1e-12
        );
    }

    #[test]
    fn pasta_matches_busy_period_ratio() {
        for (lambda, service, m, n) in [
            (2.0, witness_h2(), 2, 1),
            (3.0, ph(ServiceDistribution::erlang(3, 3.0).unwrap()), 3, 2),
            (1.3, exp(0.7), 2, 4),
        ] {
            let model = build_model(lambda, &service, m, n).unwrap();
            let l = expected_busy_period_losses(&model).unwrap();
            let served = model.expected_served().unwrap();
            let p = stationary_loss_probability(lambda, &service, m, n).unwrap();
            assert!((p - l / (l + served)).abs() < 1e-12, "{p} vs {}", l / (l + served));
        }
    }

    #[test]
    fn capacity_bound() {
        let e5 = ph(ServiceDistribution::erlang(5, 5.0).unwrap());
        let err = build_model_bounded(2.0, &e5, 4, 2, 50);
        assert_eq!(err.unwrap_err(), Error::Capacity { bound: 50 });
    }

    #[test]
    fn iterative_path_matches_dense() {
        // Large enough to cross the dense-solve limit.
        let e6 = ph(ServiceDistribution::erlang(6, 6.0).unwrap());
        let model = build_model(5.0, &e6, 5, 8).unwrap();
        assert!(model.state_count() >= linalg::DENSE_LIMIT, "{}", model.state_count());
        let neg = model.negated_generator();
        let iterative = linalg::gauss_seidel(&neg, &model.loss_rate_vector).unwrap();
        let dense = linalg::solve_dense(&neg, &model.loss_rate_vector).unwrap();
        for (a, b) in iterative.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
    }

    // Values from an independent dense build of the same chain.
    #[test]
    fn frozen_losses_vary_with_n() {
        let h2 = [2.0, 1.932_186_487_160_309, 1.881_228_932_164_062, 1.849_255_942_008_544_2];
        for (n, want) in h2.iter().enumerate() {
            let l = expected_busy_period_losses(&build_model(2.0, &witness_h2(), 2, n as u32).unwrap()).unwrap();
            assert!((l - want).abs() < 1e-10, "n={n}: {l}");
        }
        let e3 = ph(ServiceDistribution::erlang(3, 3.0).unwrap());
        let l = expected_busy_period_losses(&build_model(2.0, &e3, 2, 1).unwrap()).unwrap();
        assert!((l - 2.127_629_022_855_683_3).abs() < 1e-10);
    }

    #[test]
    fn insensitive_without_queue() {
        for service in [
            witness_h2(),
            ph(ServiceDistribution::erlang(4, 4.0).unwrap()),
            ph(ServiceDistribution::hyperexponential(0.3, 0.5, 2.45).unwrap()),
        ] {
            let mean = service.mean().unwrap();
            for m in 1..=3u32 {
                let model = build_model(m as f64 / mean, &service, m, 0).unwrap();
                let l = expected_busy_period_losses(&model).unwrap();
                let want = crate::analytic::critical_loss_constant(m);
                assert!((l - want).abs() < 1e-8, "m={m}: {l}");
            }
        }
    }
}
