//! Losses and queueing periods per orbital busy period at critical load.

use busyloss::simulator;
use busyloss::stats;
use busyloss::{ServiceDistribution, SystemSpec};

fn main() -> busyloss::Result<()> {
    let services = [
        ServiceDistribution::exponential(1.0)?,
        ServiceDistribution::deterministic(1.0)?,
        ServiceDistribution::erlang(3, 3.0)?,
        ServiceDistribution::hyperexponential(0.9, 1.8, 0.2)?,
    ];
    println!("{:<10} {:>10} {:>16} {:>18}", "system", "orbitals", "losses/orbital", "queueing/orbital");
    for service in services {
        for n in 1..=3 {
            let spec = SystemSpec::critical(service.clone(), 2, n)?;
            let rows = simulator::run_replications_with(&spec, 100_000, 6 + n as u64, |r| {
                (r.losses as f64, r.queueing_period_count as f64, r.orbital_count as f64)
            })?;
            let losses: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let queueing: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let orbital: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let l = stats::ratio_ci(&losses, &orbital, 0.99)?;
            let q = stats::ratio_ci(&queueing, &orbital, 0.99)?;
            println!(
                "{:<10} {:>10} {:>9.4}±{:.4} {:>11.4}±{:.4}",
                spec.label(),
                orbital.iter().sum::<f64>(),
                l.mean,
                l.half_width,
                q.mean,
                q.half_width
            );
        }
    }
    Ok(())
}
