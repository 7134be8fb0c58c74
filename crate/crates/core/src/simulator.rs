//! Event-driven simulation of single `M/GI/m/n` busy periods.
//!
//! A busy period starts with one arrival into an empty system and ends at
//! the first instant the system is empty again. Along the way the simulator
//! records the arrival profile `f(j)`, the time spent at each occupancy,
//! losses, and the orbital and queueing sub-periods:
//!
//! * an orbital busy period opens when an arrival raises the occupancy from
//!   `m - 1` to `m` and closes at the first departure that brings it back to
//!   `m - 1`;
//! * a queueing period opens when an arrival raises the occupancy from `m`
//!   to `m + 1` and closes at the first departure back to `m`.
//!
//! Rules for simultaneous events: departures before arrivals, and among
//! departures the lower server index first. Arrivals take the lowest-indexed
//! free server; waiting customers are served FIFO.
//!
//! Random draws happen in event order: a service time when a customer
//! enters service, and (Poisson source) the next inter-arrival time right
//! after each arrival is processed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::ServiceDistribution;
use crate::error::{Error, Result};
use crate::rng::{open_uniform, RngStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub arrival_rate: f64,
    pub service: ServiceDistribution,
    pub servers: u32,
    pub waiting_places: u32,
}

impl SystemSpec {
    pub fn new(
        arrival_rate: f64,
        service: ServiceDistribution,
        servers: u32,
        waiting_places: u32,
    ) -> Result<Self> {
        let spec = SystemSpec {
            arrival_rate,
            service,
            servers,
            waiting_places,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// System at critical load: arrival rate `m / E[S]`.
    pub fn critical(service: ServiceDistribution, servers: u32, waiting_places: u32) -> Result<Self> {
        let rate = servers as f64 / service.mean()?;
        SystemSpec::new(rate, service, servers, waiting_places)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "arrival rate must be > 0, got {}",
                self.arrival_rate
            )));
        }
        if self.servers == 0 {
            return Err(Error::InvalidSpec("need at least one server".into()));
        }
        self.service.validate()
    }

    pub fn capacity(&self) -> usize {
        (self.servers + self.waiting_places) as usize
    }

    /// `lambda E[S] / m`.
    pub fn load(&self) -> Result<f64> {
        Ok(self.arrival_rate * self.service.mean()? / self.servers as f64)
    }

    pub fn with_waiting_places(&self, waiting_places: u32) -> SystemSpec {
        SystemSpec {
            waiting_places,
            ..self.clone()
        }
    }

    pub fn label(&self) -> String {
        format!(
            "M/{}/{}/{}",
            self.service.kendall(),
            self.servers,
            self.waiting_places
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ArrivalSource {
    Poisson { rate: f64 },
    /// Fixed arrival instants; the first one opens the busy period.
    Scripted { times: Vec<f64> },
}

impl ArrivalSource {
    fn validate(&self, spec: &SystemSpec) -> Result<()> {
        match self {
            ArrivalSource::Poisson { rate } => {
                if *rate != spec.arrival_rate {
                    return Err(Error::InvalidSpec(format!(
                        "Poisson source rate {rate} differs from system arrival rate {}",
                        spec.arrival_rate
                    )));
                }
            }
            ArrivalSource::Scripted { times } => {
                if times.is_empty() {
                    return Err(Error::InvalidSpec("scripted source has no arrivals".into()));
                }
                if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
                    return Err(Error::InvalidSpec(
                        "scripted times must be finite and >= 0".into(),
                    ));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidSpec(
                        "scripted times must be strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Every observable of one busy period.
///
/// Vectors indexed by level use the natural offsets: `level_crossings[j-1]`
/// is `f(j)` for `j = 1..=m+n+1`, and `time_in_state[j]` is the time with
/// exactly `j` customers present for `j = 0..=m+n`. Within a busy period the
/// system is never empty, so `time_in_state[0]` is always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusyPeriodRecord {
    pub duration: f64,
    pub losses: u64,
    pub served: u64,
    pub level_crossings: Vec<u64>,
    pub time_in_state: Vec<f64>,
    pub orbital_count: u64,
    pub orbital_durations: Vec<f64>,
    pub orbital_losses: Vec<u64>,
    pub queueing_period_count: u64,
}

impl BusyPeriodRecord {
    /// `f(j)`, arrivals that found `j - 1` customers, `1 <= j <= m + n + 1`.
    pub fn crossings(&self, j: usize) -> u64 {
        self.level_crossings[j - 1]
    }

    pub fn arrivals(&self) -> u64 {
        self.level_crossings.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    Loss,
    Departure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Customers present after the event.
    pub occupancy: usize,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Departure {
    time: f64,
    server: usize,
}

impl Eq for Departure {}

impl Ord for Departure {
    // Reversed so the max-heap pops the earliest departure, lowest server first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.server.cmp(&self.server))
    }
}

impl PartialOrd for Departure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

enum ArrivalCursor<'a> {
    Poisson { rate: f64, next: f64 },
    Scripted { times: &'a [f64], idx: usize },
}

impl ArrivalCursor<'_> {
    fn peek(&self) -> Option<f64> {
        match self {
            ArrivalCursor::Poisson { next, .. } => Some(*next),
            ArrivalCursor::Scripted { times, idx } => times.get(*idx).copied(),
        }
    }

    fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        match self {
            ArrivalCursor::Poisson { rate, next } => *next += -open_uniform(rng).ln() / *rate,
            ArrivalCursor::Scripted { idx, .. } => *idx += 1,
        }
    }
}

struct BusyPeriod<'a, R: Rng> {
    spec: &'a SystemSpec,
    rng: R,
    now: f64,
    occupancy: usize,
    waiting: usize,
    free: Vec<bool>,
    calendar: BinaryHeap<Departure>,
    time_in_state: Vec<CompensatedSum>,
    record: BusyPeriodRecord,
    orbital_start: f64,
    orbital_loss_count: u64,
    trace: Option<&'a mut Vec<TraceEvent>>,
}

impl<'a, R: Rng> BusyPeriod<'a, R> {
    fn new(spec: &'a SystemSpec, rng: R, start: f64, trace: Option<&'a mut Vec<TraceEvent>>) -> Self {
        let cap = spec.capacity();
        BusyPeriod {
            spec,
            rng,
            now: start,
            occupancy: 0,
            waiting: 0,
            free: vec![true; spec.servers as usize],
            calendar: BinaryHeap::with_capacity(spec.servers as usize),
            time_in_state: vec![CompensatedSum::default(); cap + 1],
            record: BusyPeriodRecord {
                duration: 0.0,
                losses: 0,
                served: 0,
                level_crossings: vec![0; cap + 1],
                time_in_state: Vec::new(),
                orbital_count: 0,
                orbital_durations: Vec::new(),
                orbital_losses: Vec::new(),
                queueing_period_count: 0,
            },
            orbital_start: start,
            orbital_loss_count: 0,
            trace,
        }
    }

    fn advance_clock(&mut self, t: f64) {
        self.time_in_state[self.occupancy].add(t - self.now);
        self.now = t;
    }

    fn log(&mut self, kind: EventKind) {
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(TraceEvent {
                time: self.now,
                kind,
                occupancy: self.occupancy,
            });
        }
    }

    fn start_service(&mut self) {
        let server = self
            .free
            .iter()
            .position(|f| *f)
            .expect("a free server exists when starting service");
        self.free[server] = false;
        let s = self.spec.service.sample(&mut self.rng);
        self.calendar.push(Departure {
            time: self.now + s,
            server,
        });
    }

    fn arrive(&mut self, t: f64) {
        self.advance_clock(t);
        let m = self.spec.servers as usize;
        let found = self.occupancy;
        self.record.level_crossings[found] += 1;
        if found == self.spec.capacity() {
            self.record.losses += 1;
            self.orbital_loss_count += 1;
            self.log(EventKind::Loss);
            return;
        }
        if found < m {
            if found == m - 1 {
                self.record.orbital_count += 1;
                self.orbital_start = t;
                self.orbital_loss_count = 0;
            }
            self.occupancy += 1;
            self.start_service();
        } else {
            if found == m {
                self.record.queueing_period_count += 1;
            }
            self.waiting += 1;
            self.occupancy += 1;
        }
        self.log(EventKind::Arrival);
    }

    fn depart(&mut self, d: Departure) {
        self.advance_clock(d.time);
        let m = self.spec.servers as usize;
        self.record.served += 1;
        self.free[d.server] = true;
        if self.occupancy == m {
            self.record.orbital_durations.push(d.time - self.orbital_start);
            self.record.orbital_losses.push(self.orbital_loss_count);
        }
        self.occupancy -= 1;
        if self.waiting > 0 {
            self.waiting -= 1;
            self.start_service();
        }
        self.log(EventKind::Departure);
    }

    fn run(mut self, mut arrivals: ArrivalCursor<'_>) -> Result<BusyPeriodRecord> {
        let start = self.now;
        let first = arrivals.peek().expect("validated source has a first arrival");
        self.arrive(first);
        arrivals.advance(&mut self.rng);
        while self.occupancy > 0 {
            let dep = *self.calendar.peek().expect("busy system has a pending departure");
            match arrivals.peek() {
                Some(a) if a < dep.time => {
                    self.arrive(a);
                    arrivals.advance(&mut self.rng);
                }
                Some(_) => {
                    self.calendar.pop();
                    self.depart(dep);
                }
                None => {
                    return Err(Error::IncompleteBusyPeriod {
                        time: self.now,
                        in_system: self.occupancy,
                    })
                }
            }
        }
        let mut record = self.record;
        record.duration = self.now - start;
        record.time_in_state = self.time_in_state.iter().map(CompensatedSum::value).collect();
        Ok(record)
    }
}

/// Simulate one busy period.
pub fn simulate_busy_period(
    spec: &SystemSpec,
    arrivals: &ArrivalSource,
    stream: &RngStream,
) -> Result<BusyPeriodRecord> {
    run_one(spec, arrivals, stream, None)
}

/// As [`simulate_busy_period`], also appending every event to `trace`.
pub fn simulate_busy_period_traced(
    spec: &SystemSpec,
    arrivals: &ArrivalSource,
    stream: &RngStream,
    trace: &mut Vec<TraceEvent>,
) -> Result<BusyPeriodRecord> {
    run_one(spec, arrivals, stream, Some(trace))
}

fn run_one(
    spec: &SystemSpec,
    arrivals: &ArrivalSource,
    stream: &RngStream,
    trace: Option<&mut Vec<TraceEvent>>,
) -> Result<BusyPeriodRecord> {
    spec.validate()?;
    arrivals.validate(spec)?;
    let rng = stream.generator();
    match arrivals {
        ArrivalSource::Poisson { rate } => {
            let cursor = ArrivalCursor::Poisson { rate: *rate, next: 0.0 };
            BusyPeriod::new(spec, rng, 0.0, trace).run(cursor)
        }
        ArrivalSource::Scripted { times } => {
            let cursor = ArrivalCursor::Scripted { times, idx: 0 };
            BusyPeriod::new(spec, rng, times[0], trace).run(cursor)
        }
    }
}

/// `count` independent Poisson-driven busy periods; record `i` uses stream
/// `(master_seed, i)`. The result is in index order whatever the thread count.
pub fn run_replications(
    spec: &SystemSpec,
    count: usize,
    master_seed: u64,
) -> Result<Vec<BusyPeriodRecord>> {
    run_replications_with(spec, count, master_seed, |r| r)
}

/// Like [`run_replications`], keeping only `extract(record)` per replication.
pub fn run_replications_with<T, F>(
    spec: &SystemSpec,
    count: usize,
    master_seed: u64,
    extract: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(BusyPeriodRecord) -> T + Sync,
{
    spec.validate()?;
    let source = ArrivalSource::Poisson {
        rate: spec.arrival_rate,
    };
    (0..count as u64)
        .into_par_iter()
        .map(|i| simulate_busy_period(spec, &source, &RngStream::new(master_seed, i)).map(&extract))
        .collect()
}

/// Samples of the time spent with exactly `m - 1` customers present.
pub fn measure_state_m_minus_1(
    spec: &SystemSpec,
    count: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    let level = spec.servers as usize - 1;
    run_replications_with(spec, count, master_seed, |r| r.time_in_state[level])
}

/// Run `f` on a dedicated pool of `workers` threads (0 = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
