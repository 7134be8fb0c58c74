//! Level crossings of the symmetric simple random walk during one excursion
//! away from zero.
//!
//! Two samplers are provided. [`ExcursionMethod::StepWalk`] draws every
//! ±1 step and gives up after a step cap. The return time to zero has
//! infinite mean, so at 10^6 excursions and a 10^9 cap a step walk is both
//! slow and truncates a few dozen excursions. [`ExcursionMethod::Embedded`]
//! samples the same count exactly by jumping between visits to `level` with
//! gambler's-ruin probabilities and never truncates.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExcursionMethod {
    StepWalk { cap: u64 },
    #[default]
    Embedded,
}


/// Count upward crossings (`level - 1 -> level`) along an explicit path of
/// ±1 steps that starts at 0. Returns `None` if the path ends before the
/// walk returns to 0.
pub fn count_upcrossings<I>(steps: I, level: u32) -> Option<u64>
where
    I: IntoIterator<Item = i8>,
{
    let level = level as i64;
    let mut pos = 0i64;
    let mut count = 0;
    for step in steps {
        let next = pos + step as i64;
        if pos == level - 1 && next == level {
            count += 1;
        }
        pos = next;
        if pos == 0 {
            return Some(count);
        }
    }
    None
}

fn step_walk<R: Rng>(rng: &mut R, level: u32, cap: u64) -> Result<u64> {
    let level = level as i64;
    let mut pos = 0i64;
    let mut count = 0;
    let mut steps = 0u64;
    // 64 steps per random word.
    loop {
        let mut bits: u64 = rng.random();
        for _ in 0..64 {
            let next = if bits & 1 == 1 { pos + 1 } else { pos - 1 };
            bits >>= 1;
            if pos == level - 1 && next == level {
                count += 1;
            }
            pos = next;
            steps += 1;
            if pos == 0 {
                return Ok(count);
            }
            if steps >= cap {
                return Err(Error::Truncated { cap });
            }
        }
    }
}

fn embedded<R: Rng>(rng: &mut R, level: u32) -> u64 {
    // First step down: the excursion stays negative.
    if rng.random::<f64>() < 0.5 {
        return 0;
    }
    let l = level as f64;
    // From 1, reach `level` before 0 with probability 1/level.
    if rng.random::<f64>() >= 1.0 / l {
        return 0;
    }
    let mut count = 1;
    // At `level`: excursions above return to `level` surely, so only the
    // eventual step down matters; from `level - 1` the walk climbs back
    // before hitting 0 with probability (level - 1)/level.
    while rng.random::<f64>() < (l - 1.0) / l {
        count += 1;
    }
    count
}

/// Upward crossings of `level` in one excursion drawn from `stream`.
pub fn simulate_excursion_crossings(
    level: u32,
    stream: &RngStream,
    method: ExcursionMethod,
) -> Result<u64> {
    if level < 1 {
        return Err(Error::Domain("excursion level must be >= 1".into()));
    }
    let mut rng = stream.generator();
    match method {
        ExcursionMethod::StepWalk { cap } => step_walk(&mut rng, level, cap),
        ExcursionMethod::Embedded => Ok(embedded(&mut rng, level)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSummary {
    pub level: u32,
    pub excursions: u64,
    pub completed: u64,
    pub truncated: u64,
    pub mean_crossings: f64,
    pub variance: f64,
}

/// `count` excursions on streams `(master_seed, 0..count)`; truncated
/// excursions are counted and left out of the mean.
pub fn run_excursions(
    level: u32,
    count: u64,
    master_seed: u64,
    method: ExcursionMethod,
) -> Result<ExcursionSummary> {
    if level < 1 {
        return Err(Error::Domain("excursion level must be >= 1".into()));
    }
    let outcomes: Vec<Option<u64>> = (0..count)
        .into_par_iter()
        .map(|i| {
            match simulate_excursion_crossings(level, &RngStream::new(master_seed, i), method) {
                Ok(c) => Ok(Some(c)),
                Err(Error::Truncated { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let done: Vec<f64> = outcomes.iter().flatten().map(|&c| c as f64).collect();
    let completed = done.len() as u64;
    let mean = if done.is_empty() {
        f64::NAN
    } else {
        done.iter().sum::<f64>() / done.len() as f64
    };
    let variance = if done.len() > 1 {
        done.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (done.len() - 1) as f64
    } else {
        0.0
    };
    Ok(ExcursionSummary {
        level,
        excursions: count,
        completed,
        truncated: count - completed,
        mean_crossings: mean,
        variance,
    })
}
