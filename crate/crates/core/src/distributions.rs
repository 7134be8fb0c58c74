//! Service-time laws.
//!
//! Every variant can be sampled, has an analytic mean and a static
//! NBU/NWU classification; all but [`ServiceDistribution::Deterministic`]
//! convert exactly to a [`PhaseType`] for the Markov-chain oracle.
//!
//! Uniform draws consumed per sample (all on the caller's generator):
//!
//! | variant          | draws                                       |
//! |------------------|---------------------------------------------|
//! | Exponential      | 1 (inverse CDF)                             |
//! | Erlang { k }     | k (sum of k exponentials)                   |
//! | Deterministic    | 0                                           |
//! | HyperExponential | 2 (branch choice, then one exponential)     |
//! | PhaseType        | 1 for the entry phase, then 2 per visited phase (sojourn, jump) |

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::open_uniform;

const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServiceDistribution {
    #[serde(rename = "exp")]
    Exponential { rate: f64 },
    Erlang { shape: u32, rate: f64 },
    #[serde(rename = "det")]
    Deterministic { value: f64 },
    #[serde(rename = "hyperexp")]
    HyperExponential { p: f64, rate1: f64, rate2: f64 },
    PhaseType(PhaseType),
}

/// Absorption time of a finite CTMC started in `initial`, with transient
/// block `subgenerator` (row-major, `k x k`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseType {
    pub initial: Vec<f64>,
    pub subgenerator: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistributionClass {
    #[serde(rename = "NBU")]
    Nbu,
    #[serde(rename = "NWU")]
    Nwu,
    Both,
    Unknown,
}

impl fmt::Display for DistributionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DistributionClass::Nbu => "NBU",
            DistributionClass::Nwu => "NWU",
            DistributionClass::Both => "Both",
            DistributionClass::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl PhaseType {
    pub fn new(initial: Vec<f64>, subgenerator: Vec<Vec<f64>>) -> Result<Self> {
        let ph = PhaseType {
            initial,
            subgenerator,
        };
        ph.validate()?;
        Ok(ph)
    }

    pub fn phases(&self) -> usize {
        self.initial.len()
    }

    /// Total exit (absorption) rate of each phase: `-S 1`.
    pub fn exit_rates(&self) -> Vec<f64> {
        self.subgenerator
            .iter()
            .map(|row| -row.iter().sum::<f64>())
            .map(|r| if r.abs() < 1e-15 { 0.0 } else { r })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.initial.len();
        if k == 0 {
            return Err(Error::InvalidDistribution("phase-type needs at least one phase".into()));
        }
        if self.subgenerator.len() != k || self.subgenerator.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidDistribution(format!(
                "subgenerator must be {k}x{k}"
            )));
        }
        if self.initial.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            return Err(Error::InvalidDistribution(
                "initial probabilities must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = self.initial.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "initial vector sums to {total}, expected 1"
            )));
        }
        for (i, row) in self.subgenerator.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidDistribution("non-finite rate".into()));
                }
                if i == j && v >= 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "diagonal entry ({i},{i}) must be < 0"
                    )));
                }
                if i != j && v < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "off-diagonal entry ({i},{j}) must be >= 0"
                    )));
                }
            }
            let s: f64 = row.iter().sum();
            if s > PROBABILITY_TOLERANCE * row[i].abs() {
                return Err(Error::InvalidDistribution(format!(
                    "row {i} sums to {s} > 0"
                )));
            }
        }
        // Absorption must be reachable from every phase.
        let exits = self.exit_rates();
        let mut reaches = exits.iter().map(|&e| e > 0.0).collect::<Vec<_>>();
        loop {
            let mut changed = false;
            for i in 0..k {
                if !reaches[i]
                    && (0..k).any(|j| j != i && self.subgenerator[i][j] > 0.0 && reaches[j])
                {
                    reaches[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(i) = reaches.iter().position(|r| !r) {
            return Err(Error::InvalidDistribution(format!(
                "absorption unreachable from phase {i}"
            )));
        }
        Ok(())
    }

    /// `initial^T (-S)^{-1} 1`.
    pub fn mean(&self) -> Result<f64> {
        let k = self.phases();
        let s = DMatrix::from_fn(k, k, |i, j| -self.subgenerator[i][j]);
        let t = s
            .lu()
            .solve(&DVector::from_element(k, 1.0))
            .ok_or_else(|| Error::InvalidDistribution("singular subgenerator".into()))?;
        let m: f64 = self.initial.iter().zip(t.iter()).map(|(a, b)| a * b).sum();
        if m.is_finite() && m > 0.0 {
            Ok(m)
        } else {
            Err(Error::InvalidDistribution(format!("mean is {m}")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = self.phases();
        let mut phase = pick(&self.initial, open_uniform(rng));
        let exits = self.exit_rates();
        let mut t = 0.0;
        loop {
            let out = -self.subgenerator[phase][phase];
            t += -open_uniform(rng).ln() / out;
            let u = open_uniform(rng) * out;
            // Exit first, then phases in index order.
            if u <= exits[phase] {
                return t;
            }
            let mut acc = exits[phase];
            let mut next = None;
            for j in 0..k {
                if j == phase {
                    continue;
                }
                acc += self.subgenerator[phase][j];
                if u <= acc {
                    next = Some(j);
                    break;
                }
            }
            match next {
                Some(j) => phase = j,
                // Rounding left a sliver of mass unassigned.
                None => return t,
            }
        }
    }

    /// Survival `initial exp(S x) 1` by uniformisation.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let k = self.phases();
        let q = (0..k)
            .map(|i| -self.subgenerator[i][i])
            .fold(0.0f64, f64::max);
        let qx = q * x;
        let mut v = self.initial.clone();
        let upper = (qx + 12.0 * qx.sqrt() + 30.0).ceil() as u64;
        let mut log_fact = 0.0;
        let mut total = 0.0;
        for n in 0..=upper {
            if n > 0 {
                log_fact += (n as f64).ln();
                let mut next = vec![0.0; k];
                for i in 0..k {
                    if v[i] == 0.0 {
                        continue;
                    }
                    for j in 0..k {
                        let p = if i == j {
                            1.0 + self.subgenerator[i][j] / q
                        } else {
                            self.subgenerator[i][j] / q
                        };
                        next[j] += v[i] * p;
                    }
                }
                v = next;
            }
            let weight = (-qx + n as f64 * qx.ln() - log_fact).exp();
            total += weight * v.iter().sum::<f64>();
        }
        total.clamp(0.0, 1.0)
    }
}

fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u <= acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

impl ServiceDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        let d = ServiceDistribution::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        let d = ServiceDistribution::Erlang { shape, rate };
        d.validate()?;
        Ok(d)
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        let d = ServiceDistribution::Deterministic { value };
        d.validate()?;
        Ok(d)
    }

    pub fn hyperexponential(p: f64, rate1: f64, rate2: f64) -> Result<Self> {
        let d = ServiceDistribution::HyperExponential { p, rate1, rate2 };
        d.validate()?;
        Ok(d)
    }

    pub fn phase_type(initial: Vec<f64>, subgenerator: Vec<Vec<f64>>) -> Result<Self> {
        Ok(ServiceDistribution::PhaseType(PhaseType::new(
            initial,
            subgenerator,
        )?))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ServiceDistribution::Exponential { rate } => positive("rate", rate),
            ServiceDistribution::Erlang { shape, rate } => {
                if shape == 0 {
                    return Err(Error::InvalidDistribution("Erlang shape must be >= 1".into()));
                }
                positive("rate", rate)
            }
            ServiceDistribution::Deterministic { value } => positive("value", value),
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidDistribution(format!(
                        "mixing probability must lie in [0, 1], got {p}"
                    )));
                }
                positive("rate1", rate1)?;
                positive("rate2", rate2)
            }
            ServiceDistribution::PhaseType(ref ph) => {
                ph.validate()?;
                ph.mean().map(|_| ())
            }
        }
    }

    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            ServiceDistribution::Exponential { rate } => 1.0 / rate,
            ServiceDistribution::Erlang { shape, rate } => shape as f64 / rate,
            ServiceDistribution::Deterministic { value } => value,
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => {
                p / rate1 + (1.0 - p) / rate2
            }
            ServiceDistribution::PhaseType(ref ph) => ph.mean()?,
        })
    }

    /// Draw one service time. Assumes `self` is valid.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ServiceDistribution::Exponential { rate } => -open_uniform(rng).ln() / rate,
            ServiceDistribution::Erlang { shape, rate } => {
                (0..shape).map(|_| -open_uniform(rng).ln()).sum::<f64>() / rate
            }
            ServiceDistribution::Deterministic { value } => value,
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => {
                let branch = rng.random::<f64>();
                let rate = if branch < p { rate1 } else { rate2 };
                -open_uniform(rng).ln() / rate
            }
            ServiceDistribution::PhaseType(ref ph) => ph.sample(rng),
        }
    }

    pub fn classify(&self) -> DistributionClass {
        match *self {
            ServiceDistribution::Exponential { .. } => DistributionClass::Both,
            ServiceDistribution::Erlang { shape: 1, .. } => DistributionClass::Both,
            ServiceDistribution::Erlang { .. } => DistributionClass::Nbu,
            ServiceDistribution::Deterministic { .. } => DistributionClass::Nbu,
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => {
                if rate1 != rate2 && p > 0.0 && p < 1.0 {
                    DistributionClass::Nwu
                } else {
                    DistributionClass::Both
                }
            }
            ServiceDistribution::PhaseType(_) => DistributionClass::Unknown,
        }
    }

    pub fn as_phase_type(&self) -> Result<PhaseType> {
        let ph = match *self {
            ServiceDistribution::Exponential { rate } => PhaseType {
                initial: vec![1.0],
                subgenerator: vec![vec![-rate]],
            },
            ServiceDistribution::Erlang { shape, rate } => {
                let k = shape as usize;
                let mut initial = vec![0.0; k];
                initial[0] = 1.0;
                let subgenerator = (0..k)
                    .map(|i| {
                        let mut row = vec![0.0; k];
                        row[i] = -rate;
                        if i + 1 < k {
                            row[i + 1] = rate;
                        }
                        row
                    })
                    .collect();
                PhaseType {
                    initial,
                    subgenerator,
                }
            }
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => PhaseType {
                initial: vec![p, 1.0 - p],
                subgenerator: vec![vec![-rate1, 0.0], vec![0.0, -rate2]],
            },
            ServiceDistribution::PhaseType(ref ph) => ph.clone(),
            ServiceDistribution::Deterministic { value } => {
                return Err(Error::NotRepresentable(format!(
                    "deterministic service ({value}) has no finite phase-type form"
                )))
            }
        };
        ph.validate()?;
        Ok(ph)
    }

    /// Distribution function `G(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            ServiceDistribution::Exponential { rate } => -(-rate * x).exp_m1(),
            ServiceDistribution::Erlang { shape, rate } => {
                let rx = rate * x;
                let mut term = 1.0;
                let mut sum = 1.0;
                for i in 1..shape {
                    term *= rx / i as f64;
                    sum += term;
                }
                (1.0 - (-rx).exp() * sum).clamp(0.0, 1.0)
            }
            ServiceDistribution::Deterministic { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => {
                1.0 - p * (-rate1 * x).exp() - (1.0 - p) * (-rate2 * x).exp()
            }
            ServiceDistribution::PhaseType(ref ph) => 1.0 - ph.survival(x),
        }
    }

    /// Short label such as `M`, `D`, `E3`, `H2`, `PH`.
    pub fn kendall(&self) -> String {
        match *self {
            ServiceDistribution::Exponential { .. } => "M".into(),
            ServiceDistribution::Erlang { shape, .. } => format!("E{shape}"),
            ServiceDistribution::Deterministic { .. } => "D".into(),
            ServiceDistribution::HyperExponential { .. } => "H2".into(),
            ServiceDistribution::PhaseType(_) => "PH".into(),
        }
    }
}

impl fmt::Display for ServiceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ServiceDistribution::Exponential { rate } => write!(f, "exp:{rate}"),
            ServiceDistribution::Erlang { shape, rate } => write!(f, "erlang:{shape}:{rate}"),
            ServiceDistribution::Deterministic { value } => write!(f, "det:{value}"),
            ServiceDistribution::HyperExponential { p, rate1, rate2 } => {
                write!(f, "hyperexp:{p}:{rate1}:{rate2}")
            }
            ServiceDistribution::PhaseType(ph) => write!(f, "phase_type[{}]", ph.phases()),
        }
    }
}

/// Parses the compact command-line form: `exp:RATE`, `erlang:K:RATE`,
/// `det:VALUE`, `hyperexp:P:RATE1:RATE2` (alias `h2`).
/// A JSON object in the configuration-file form is accepted too.
impl FromStr for ServiceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let d: ServiceDistribution = serde_json::from_str(s)
                .map_err(|e| Error::Config(format!("bad distribution JSON: {e}")))?;
            d.validate()?;
            return Ok(d);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Config(format!("missing parameter {i} in '{s}'")))?
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number in '{s}': {e}")))
        };
        let arity = |n: usize| -> Result<()> {
            if parts.len() == n + 1 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "'{}' takes {n} parameter(s), got {}",
                    parts[0],
                    parts.len() - 1
                )))
            }
        };
        match parts[0] {
            "exp" | "m" => {
                arity(1)?;
                ServiceDistribution::exponential(num(1)?)
            }
            "erlang" | "e" => {
                arity(2)?;
                let k = parts[1]
                    .parse::<u32>()
                    .map_err(|e| Error::Config(format!("bad Erlang shape: {e}")))?;
                ServiceDistribution::erlang(k, num(2)?)
            }
            "det" | "d" => {
                arity(1)?;
                ServiceDistribution::deterministic(num(1)?)
            }
            "hyperexp" | "h2" => {
                arity(3)?;
                ServiceDistribution::hyperexponential(num(1)?, num(2)?, num(3)?)
            }
            other => Err(Error::Config(format!("unknown distribution '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn means() {
        assert_eq!(ServiceDistribution::exponential(1.0).unwrap().mean().unwrap(), 1.0);
        assert_eq!(ServiceDistribution::erlang(2, 4.0).unwrap().mean().unwrap(), 0.5);
        assert_eq!(
            ServiceDistribution::hyperexponential(0.5, 2.0, 2.0)
                .unwrap()
                .mean()
                .unwrap(),
            0.5
        );
        let h2 = ServiceDistribution::hyperexponential(0.9, 1.8, 0.2).unwrap();
        assert!((h2.mean().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_sample_is_point_mass() {
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        let mut rng = RngStream::new(3, 0).generator();
        for _ in 0..10 {
            assert_eq!(d.sample(&mut rng), 1.0);
        }
    }

    #[test]
    fn exponential_is_inverse_cdf_of_one_draw() {
        let lambda = 2.5;
        let d = ServiceDistribution::exponential(lambda).unwrap();
        let mut a = RngStream::new(11, 2).generator();
        let mut b = a.clone();
        let u = open_uniform(&mut b);
        assert_eq!(d.sample(&mut a), -u.ln() / lambda);
        // both generators consumed exactly one draw
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn draw_counts_are_fixed() {
        use rand::RngCore;
        let cases = [
            (ServiceDistribution::exponential(1.0).unwrap(), 1),
            (ServiceDistribution::erlang(3, 1.0).unwrap(), 3),
            (ServiceDistribution::deterministic(1.0).unwrap(), 0),
            (ServiceDistribution::hyperexponential(0.3, 1.0, 5.0).unwrap(), 2),
        ];
        for (d, draws) in cases {
            let mut a = RngStream::new(5, 0).generator();
            let mut b = a.clone();
            d.sample(&mut a);
            for _ in 0..draws {
                b.next_u64();
            }
            assert_eq!(a.next_u64(), b.next_u64(), "{d}");
        }
    }

    #[test]
    fn classification() {
        use DistributionClass::*;
        assert_eq!(ServiceDistribution::deterministic(1.0).unwrap().classify(), Nbu);
        assert_eq!(ServiceDistribution::exponential(3.0).unwrap().classify(), Both);
        assert_eq!(ServiceDistribution::erlang(1, 3.0).unwrap().classify(), Both);
        assert_eq!(ServiceDistribution::erlang(3, 3.0).unwrap().classify(), Nbu);
        assert_eq!(
            ServiceDistribution::hyperexponential(0.5, 1.0, 10.0)
                .unwrap()
                .classify(),
            Nwu
        );
        assert_eq!(
            ServiceDistribution::hyperexponential(0.5, 2.0, 2.0)
                .unwrap()
                .classify(),
            Both
        );
        assert_eq!(
            ServiceDistribution::hyperexponential(1.0, 1.0, 10.0)
                .unwrap()
                .classify(),
            Both
        );
        let ph = ServiceDistribution::phase_type(vec![1.0], vec![vec![-1.0]]).unwrap();
        assert_eq!(ph.classify(), Unknown);
    }

    #[test]
    fn phase_type_forms() {
        let e = ServiceDistribution::exponential(2.0).unwrap().as_phase_type().unwrap();
        assert_eq!(e.initial, vec![1.0]);
        assert_eq!(e.subgenerator, vec![vec![-2.0]]);

        let h = ServiceDistribution::hyperexponential(0.3, 1.0, 5.0)
            .unwrap()
            .as_phase_type()
            .unwrap();
        assert_eq!(h.initial, vec![0.3, 0.7]);
        assert_eq!(h.subgenerator, vec![vec![-1.0, 0.0], vec![0.0, -5.0]]);

        let er = ServiceDistribution::erlang(2, 3.0).unwrap().as_phase_type().unwrap();
        assert_eq!(er.initial, vec![1.0, 0.0]);
        assert_eq!(er.subgenerator, vec![vec![-3.0, 3.0], vec![0.0, -3.0]]);

        let err = ServiceDistribution::deterministic(1.0).unwrap().as_phase_type();
        assert!(matches!(err, Err(Error::NotRepresentable(_))));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ServiceDistribution::exponential(0.0).is_err());
        assert!(ServiceDistribution::exponential(-1.0).is_err());
        assert!(ServiceDistribution::erlang(0, 1.0).is_err());
        assert!(ServiceDistribution::deterministic(0.0).is_err());
        assert!(ServiceDistribution::hyperexponential(1.5, 1.0, 1.0).is_err());
        // positive diagonal
        assert!(ServiceDistribution::phase_type(vec![1.0], vec![vec![1.0]]).is_err());
        // phases 1 and 2 form a closed class
        assert!(ServiceDistribution::phase_type(
            vec![0.5, 0.5, 0.0],
            vec![
                vec![-1.0, 0.0, 0.0],
                vec![0.0, -1.0, 1.0],
                vec![0.0, 1.0, -1.0]
            ]
        )
        .is_err());
        // initial does not sum to one
        assert!(ServiceDistribution::phase_type(vec![0.5], vec![vec![-1.0]]).is_err());
    }

    #[test]
    fn phase_type_mean_and_survival() {
        // Coxian: phase 0 rate 2, continues w.p. 1/2 to phase 1 rate 1.
        let ph = PhaseType::new(
            vec![1.0, 0.0],
            vec![vec![-2.0, 1.0], vec![0.0, -1.0]],
        )
        .unwrap();
        assert!((ph.mean().unwrap() - 1.0).abs() < 1e-14);
        // survival at 0 is 1; erlang survival closed form check
        let er = ServiceDistribution::erlang(3, 2.0).unwrap();
        let er_ph = ServiceDistribution::PhaseType(er.as_phase_type().unwrap());
        for x in [0.1, 0.7, 1.5, 4.0, 12.0] {
            assert!((er.cdf(x) - er_ph.cdf(x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn parse_short_and_json_forms() {
        assert_eq!(
            "hyperexp:0.3:1:5".parse::<ServiceDistribution>().unwrap(),
            ServiceDistribution::hyperexponential(0.3, 1.0, 5.0).unwrap()
        );
        assert_eq!(
            "det:1.0".parse::<ServiceDistribution>().unwrap(),
            ServiceDistribution::deterministic(1.0).unwrap()
        );
        assert_eq!(
            "erlang:3:3".parse::<ServiceDistribution>().unwrap(),
            ServiceDistribution::erlang(3, 3.0).unwrap()
        );
        let json = r#"{"type":"hyperexp","p":0.3,"rate1":1.0,"rate2":5.0}"#;
        assert_eq!(
            json.parse::<ServiceDistribution>().unwrap(),
            ServiceDistribution::hyperexponential(0.3, 1.0, 5.0).unwrap()
        );
        assert!("exp".parse::<ServiceDistribution>().is_err());
        assert!("exp:1:2".parse::<ServiceDistribution>().is_err());
        assert!("weibull:1".parse::<ServiceDistribution>().is_err());
    }

    #[test]
    fn json_tags() {
        let d = ServiceDistribution::erlang(2, 4.0).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"type":"erlang","shape":2,"rate":4.0}"#);
        let ph = ServiceDistribution::phase_type(vec![1.0], vec![vec![-2.0]]).unwrap();
        let s = serde_json::to_string(&ph).unwrap();
        assert_eq!(s, r#"{"type":"phase_type","initial":[1.0],"subgenerator":[[-2.0]]}"#);
        let back: ServiceDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ph);
    }
}
