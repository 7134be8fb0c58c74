//! Busy-period loss analysis for `M/GI/m/n` queues.
//!
//! The crate bundles four independent views of the same quantities:
//!
//! * [`analytic`]: closed forms for the Markovian `M/M/m/n` system
//!   (level crossings, time in state, busy period, orbital decomposition).
//! * [`simulator`]: an event-driven simulator of single busy periods with
//!   general service, instrumented for every busy-period observable.
//! * [`ctmc`]: an exact oracle for phase-type service built from the
//!   explicit busy-period Markov chain.
//! * [`stats`]: confidence intervals, cross-`n` consistency and empirical
//!   stochastic-order checks.
//!
//! [`verify`] runs the whole battery of checks and [`cli`] holds the
//! command implementations used by the `busyloss` binary.

pub mod analytic;
pub mod cli;
pub mod ctmc;
pub mod distributions;
mod error;
pub mod excursion;
mod linalg;
pub mod numfmt;
pub mod rng;
pub mod simulator;
pub mod stats;
pub mod verify;

pub use analytic::MarkovSpec;
pub use ctmc::{CtmcModel, OracleState};
pub use distributions::{DistributionClass, PhaseType, ServiceDistribution};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use simulator::{ArrivalSource, BusyPeriodRecord, SystemSpec};
pub use stats::{DominanceVerdict, Estimate};
