//! Command implementations behind the `busyloss` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 resource or capacity error. `BUSYLOSS_SEED` replaces the default
//! master seed (42); an explicit `--seed` or config `master_seed` wins over it.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analytic::{self, MarkovSpec};
use crate::ctmc;
use crate::distributions::ServiceDistribution;
use crate::error::{Error, Result};
use crate::numfmt;
use crate::rng::derive_seed;
use crate::simulator::{self, BusyPeriodRecord, SystemSpec};
use crate::stats::{self, Estimate, DEFAULT_CONFIDENCE};
use crate::verify::{self, Scale, VerifyOptions};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "BUSYLOSS_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. }
        | Error::Singular(_)
        | Error::Truncated { .. }
        | Error::IncompleteBusyPeriod { .. } => EXIT_CAPACITY,
        _ => EXIT_USAGE,
    }
}

/// Seed from `BUSYLOSS_SEED`, else [`DEFAULT_SEED`].
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("{SEED_ENV}={s:?}: {e}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

// ------------------------------------------------------------ configuration

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Where `simulate` writes: `json` puts the aggregate in `path`, `csv` puts
/// one row per busy period in `path` (the aggregate still goes to stdout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub replications: usize,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub sweep: Option<Vec<u32>>,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.replications < 2 {
            return Err(Error::Config("replications must be >= 2 for intervals".into()));
        }
        stats::z_value(self.confidence)?;
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(Error::Config("sweep must list at least one n".into()));
            }
            let mut s = sweep.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != sweep.len() {
                return Err(Error::Config("sweep values must be distinct".into()));
            }
        }
        Ok(())
    }

    /// The `n` values to run, with the seed each one uses. A plain run uses
    /// the master seed itself; sweep points derive one seed per `n`.
    pub fn points(&self, master_seed: u64) -> Vec<(u32, u64)> {
        match &self.sweep {
            None => vec![(self.system.waiting_places, master_seed)],
            Some(ns) => ns
                .iter()
                .map(|&n| (n, derive_seed(master_seed, &[n as u64])))
                .collect(),
        }
    }
}

// ------------------------------------------------------------ analytic

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticOutput {
    pub lambda: f64,
    pub mu: f64,
    pub m: u32,
    pub n: u32,
    pub rho: f64,
    /// `E f(j)` for `j = 1..=m+n+1`.
    pub expected_level_crossings: Vec<f64>,
    /// `E B(j)` for `j = 0..=m+n`.
    pub expected_state_times: Vec<f64>,
    pub expected_busy_period: f64,
    pub expected_orbital_busy_period: f64,
    pub expected_orbital_count: f64,
    pub expected_losses: f64,
}

pub fn cmd_analytic(spec: &MarkovSpec) -> Result<String> {
    let p = analytic::profile(spec)?;
    let out = AnalyticOutput {
        lambda: spec.lambda,
        mu: spec.mu,
        m: spec.m,
        n: spec.n,
        rho: p.rho,
        expected_level_crossings: p.level_crossings,
        expected_state_times: p.state_times,
        expected_busy_period: p.expected_busy_period,
        expected_orbital_busy_period: p.expected_orbital_busy_period,
        expected_orbital_count: p.expected_orbital_count,
        expected_losses: p.expected_losses,
    };
    Ok(numfmt::to_json_string(&out))
}

// ------------------------------------------------------------ simulate

#[derive(Debug, Clone, Serialize)]
pub struct PointAggregate {
    pub waiting_places: u32,
    pub system: String,
    pub seed: u64,
    pub replications: usize,
    pub losses: Estimate,
    pub duration: Estimate,
    pub time_in_state_m_minus_1: Estimate,
    pub orbital_periods: u64,
    /// `None` when no orbital period occurred.
    pub orbital_losses_per_orbital_period: Option<Estimate>,
    pub queueing_periods_per_orbital_period: Option<Estimate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateAggregate {
    pub arrival_rate: f64,
    pub service: String,
    pub servers: u32,
    pub master_seed: u64,
    pub confidence: f64,
    pub points: Vec<PointAggregate>,
    /// Pairwise interval agreement of mean losses across sweep points.
    pub losses_consistent_across_n: Option<bool>,
}

pub struct SimulateOutput {
    pub aggregate: SimulateAggregate,
    pub records: Vec<(u32, Vec<BusyPeriodRecord>)>,
}

impl SimulateOutput {
    pub fn json(&self) -> String {
        numfmt::to_json_string(&self.aggregate)
    }

    /// One row per busy period. Level columns run to the largest capacity
    /// in the run; rows of smaller systems leave the excess cells empty.
    pub fn csv(&self) -> String {
        let cap = self
            .records
            .iter()
            .map(|(n, _)| (self.aggregate.servers + n) as usize)
            .max()
            .unwrap_or(0);
        let mut out = String::from(
            "waiting_places,replication,duration,losses,served,orbital_count,queueing_period_count,orbital_time",
        );
        for j in 1..=cap + 1 {
            let _ = write!(out, ",f{j}");
        }
        for j in 0..=cap {
            let _ = write!(out, ",b{j}");
        }
        out.push('\n');
        for (n, records) in &self.records {
            for (i, r) in records.iter().enumerate() {
                let orbital_time: f64 = r.orbital_durations.iter().sum();
                let _ = write!(
                    out,
                    "{n},{i},{},{},{},{},{},{}",
                    numfmt::fmt(r.duration),
                    r.losses,
                    r.served,
                    r.orbital_count,
                    r.queueing_period_count,
                    numfmt::fmt(orbital_time)
                );
                for j in 0..=cap {
                    match r.level_crossings.get(j) {
                        Some(f) => {
                            let _ = write!(out, ",{f}");
                        }
                        None => out.push(','),
                    }
                }
                for j in 0..=cap {
                    match r.time_in_state.get(j) {
                        Some(b) => {
                            let _ = write!(out, ",{}", numfmt::fmt(*b));
                        }
                        None => out.push(','),
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

fn ratio_or_none(num: &[f64], den: &[f64], confidence: f64) -> Result<Option<Estimate>> {
    if den.iter().sum::<f64>() == 0.0 {
        return Ok(None);
    }
    stats::ratio_ci(num, den, confidence).map(Some)
}

fn aggregate_point(
    spec: &SystemSpec,
    seed: u64,
    records: &[BusyPeriodRecord],
    confidence: f64,
) -> Result<PointAggregate> {
    let col = |f: &dyn Fn(&BusyPeriodRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let level = spec.servers as usize - 1;
    let losses = col(&|r| r.losses as f64);
    let orbital = col(&|r| r.orbital_count as f64);
    let queueing = col(&|r| r.queueing_period_count as f64);
    Ok(PointAggregate {
        waiting_places: spec.waiting_places,
        system: spec.label(),
        seed,
        replications: records.len(),
        losses: stats::mean_ci(&losses, confidence)?,
        duration: stats::mean_ci(&col(&|r| r.duration), confidence)?,
        time_in_state_m_minus_1: stats::mean_ci(&col(&|r| r.time_in_state[level]), confidence)?,
        orbital_periods: orbital.iter().sum::<f64>() as u64,
        orbital_losses_per_orbital_period: ratio_or_none(&losses, &orbital, confidence)?,
        queueing_periods_per_orbital_period: ratio_or_none(&queueing, &orbital, confidence)?,
    })
}

/// Run every point of `config` with `master_seed`.
pub fn cmd_simulate(config: &ExperimentConfig, master_seed: u64) -> Result<SimulateOutput> {
    config.validate()?;
    let mut points = Vec::new();
    let mut records = Vec::new();
    for (n, seed) in config.points(master_seed) {
        let spec = config.system.with_waiting_places(n);
        let recs = simulator::run_replications(&spec, config.replications, seed)?;
        points.push(aggregate_point(&spec, seed, &recs, config.confidence)?);
        records.push((n, recs));
    }
    let consistent = (points.len() >= 2).then(|| {
        let ests: Vec<Estimate> = points.iter().map(|p| p.losses).collect();
        stats::consistent_across(&ests)
    });
    Ok(SimulateOutput {
        aggregate: SimulateAggregate {
            arrival_rate: config.system.arrival_rate,
            service: config.system.service.to_string(),
            servers: config.system.servers,
            master_seed,
            confidence: config.confidence,
            points,
            losses_consistent_across_n: consistent,
        },
        records,
    })
}

// ------------------------------------------------------------ oracle

#[derive(Debug, Clone, Serialize)]
pub struct OracleOutput {
    pub lambda: f64,
    pub service: String,
    pub m: u32,
    pub n: u32,
    #[serde(flatten)]
    pub report: ctmc::OracleReport,
}

pub fn cmd_oracle(
    lambda: f64,
    service: &ServiceDistribution,
    m: u32,
    n: u32,
    max_states: usize,
) -> Result<String> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidSpec(format!("lambda must be > 0, got {lambda}")));
    }
    if m == 0 {
        return Err(Error::InvalidSpec("need at least one server".into()));
    }
    let ph = service.as_phase_type()?;
    let out = OracleOutput {
        lambda,
        service: service.to_string(),
        m,
        n,
        report: ctmc::report_bounded(lambda, &ph, m, n, max_states)?,
    };
    Ok(numfmt::to_json_string(&out))
}

// ------------------------------------------------------------ verify

pub fn cmd_verify(opts: &VerifyOptions, only: Option<&[u8]>) -> Result<verify::Report> {
    match only {
        Some(ids) => verify::run(opts, ids),
        None => verify::run_all(opts),
    }
}

// ------------------------------------------------------------ argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "busyloss",
    version,
    about = "Busy-period losses in M/GI/m/n queues",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form M/M/m/n busy-period quantities as JSON.
    Analytic(AnalyticArgs),
    /// Simulate busy periods and print aggregate estimates as JSON.
    Simulate(SimulateArgs),
    /// Exact phase-type Markov-chain values as JSON.
    Oracle(OracleArgs),
    /// Run the acceptance checks; exit 0 iff all pass.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON experiment file; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Arrival rate; defaults to m / mean service (critical load).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// e.g. exp:1, erlang:3:3, det:1, hyperexp:0.9:1.8:0.2, or a JSON object.
    #[arg(long)]
    pub service: Option<ServiceDistribution>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub confidence: Option<f64>,
    /// Comma-separated waiting-place counts.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<u32>>,
    /// Write one CSV row per busy period here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the aggregate JSON here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value = "exp:1")]
    pub service: ServiceDistribution,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    /// Give up (exit 3) beyond this many states.
    #[arg(long, default_value_t = ctmc::DEFAULT_MAX_STATES)]
    pub max_states: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Sample sizes of the acceptance criteria (default).
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Run only these criteria, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
    /// Also write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

const DEFAULT_REPLICATIONS: usize = 100_000;

fn simulate_config(a: &SimulateArgs) -> Result<(ExperimentConfig, u64)> {
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => {
            let service = a.service.clone().unwrap_or(ServiceDistribution::Exponential { rate: 1.0 });
            let m = a.m.unwrap_or(2);
            let lambda = match a.lambda {
                Some(l) => l,
                None => m as f64 / service.mean()?,
            };
            ExperimentConfig {
                system: SystemSpec {
                    arrival_rate: lambda,
                    service,
                    servers: m,
                    waiting_places: a.n.unwrap_or(1),
                },
                replications: DEFAULT_REPLICATIONS,
                master_seed: None,
                confidence: DEFAULT_CONFIDENCE,
                sweep: None,
                outputs: Vec::new(),
            }
        }
    };
    if a.config.is_some() {
        if let Some(s) = &a.service {
            config.system.service = s.clone();
        }
        if let Some(m) = a.m {
            config.system.servers = m;
        }
        if let Some(l) = a.lambda {
            config.system.arrival_rate = l;
        }
        if let Some(n) = a.n {
            config.system.waiting_places = n;
        }
    }
    if let Some(r) = a.reps {
        config.replications = r;
    }
    if let Some(c) = a.confidence {
        config.confidence = c;
    }
    if let Some(s) = &a.sweep {
        config.sweep = Some(s.clone());
    }
    if let Some(p) = &a.csv {
        config.outputs.retain(|o| o.format != OutputFormat::Csv);
        config.outputs.push(OutputSpec {
            format: OutputFormat::Csv,
            path: p.clone(),
        });
    }
    if let Some(p) = &a.json {
        config.outputs.retain(|o| o.format != OutputFormat::Json);
        config.outputs.push(OutputSpec {
            format: OutputFormat::Json,
            path: p.clone(),
        });
    }
    config.validate()?;
    let seed = match (a.seed, config.master_seed) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => default_seed()?,
    };
    Ok((config, seed))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let emit = |out: &mut dyn Write, text: &str| -> Result<()> {
        writeln!(out, "{text}").map_err(|e| Error::Config(format!("stdout: {e}")))
    };
    match cli.command {
        Command::Analytic(a) => {
            let spec = MarkovSpec::new(a.lambda, a.mu, a.m, a.n)?;
            emit(out, &cmd_analytic(&spec)?)?;
        }
        Command::Simulate(a) => {
            let (config, seed) = simulate_config(&a)?;
            let result = simulator::with_workers(a.workers, || cmd_simulate(&config, seed))??;
            let mut json_to_stdout = true;
            for o in &config.outputs {
                match o.format {
                    OutputFormat::Csv => write_file(&o.path, &result.csv())?,
                    OutputFormat::Json => {
                        write_file(&o.path, &(result.json() + "\n"))?;
                        json_to_stdout = false;
                    }
                }
            }
            if json_to_stdout {
                emit(out, &result.json())?;
            }
        }
        Command::Oracle(a) => emit(out, &cmd_oracle(a.lambda, &a.service, a.m, a.n, a.max_states)?)?,
        Command::Verify(a) => {
            let scale = if a.quick { Scale::Quick } else { Scale::Full };
            let seed = match a.seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let opts = VerifyOptions {
                scale,
                master_seed: seed,
                workers: a.workers,
            };
            let report = cmd_verify(&opts, a.only.as_deref())?;
            if let Some(p) = &a.json {
                write_file(p, &(report.to_json() + "\n"))?;
            }
            write!(out, "{}", report.render_text()).map_err(|e| Error::Config(format!("stdout: {e}")))?;
            return Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            });
        }
    }
    Ok(EXIT_OK)
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
