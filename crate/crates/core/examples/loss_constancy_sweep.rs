//! Mean busy-period losses at critical load as the waiting room grows.
//!
//! For exponential service the mean stays at m^m/m!. For other service
//! laws it does not: the exact oracle and the simulator both show the drift.

use busyloss::ctmc;
use busyloss::simulator;
use busyloss::stats;
use busyloss::{ServiceDistribution, SystemSpec};

fn main() -> busyloss::Result<()> {
    let reps = 100_000;
    let services = [
        ServiceDistribution::exponential(1.0)?,
        ServiceDistribution::erlang(3, 3.0)?,
        ServiceDistribution::deterministic(1.0)?,
        ServiceDistribution::hyperexponential(0.9, 1.8, 0.2)?,
    ];
    println!("m = 2, lambda = 2, mean service 1, {reps} busy periods per point\n");
    println!("{:<6} {:>3} {:>12} {:>10} {:>12}", "G", "n", "simulated", "+-", "exact");
    for (i, service) in services.iter().enumerate() {
        let mut estimates = Vec::new();
        for n in 0..=4u32 {
            let spec = SystemSpec::critical(service.clone(), 2, n)?;
            let xs = simulator::run_replications_with(&spec, reps, 1000 * i as u64 + n as u64, |r| r.losses as f64)?;
            let e = stats::mean_ci(&xs, 0.99)?;
            let exact = match service.as_phase_type() {
                Ok(ph) => format!("{:.6}", ctmc::expected_busy_period_losses(&ctmc::build_model(2.0, &ph, 2, n)?)?),
                Err(_) => "-".into(),
            };
            println!("{:<6} {n:>3} {:>12.4} {:>10.4} {exact:>12}", service.kendall(), e.mean, e.half_width);
            if n >= 1 {
                estimates.push(e);
            }
        }
        println!(
            "{:<6} n>=1 consistent at 99%: {}\n",
            service.kendall(),
            stats::consistent_across(&estimates)
        );
    }
    Ok(())
}
