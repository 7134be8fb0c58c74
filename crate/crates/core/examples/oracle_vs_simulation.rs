//! Exact oracle values next to simulation estimates, including the
//! stationary loss probability and its busy-period (PASTA) counterpart.

use busyloss::ctmc;
use busyloss::simulator;
use busyloss::stats;
use busyloss::{ServiceDistribution, SystemSpec};

fn main() -> busyloss::Result<()> {
    let cases = [
        (ServiceDistribution::exponential(1.0)?, 2, 1),
        (ServiceDistribution::hyperexponential(0.9, 1.8, 0.2)?, 2, 1),
        (ServiceDistribution::erlang(4, 4.0)?, 3, 2),
        (ServiceDistribution::hyperexponential(0.3, 1.0, 5.0)?, 2, 3),
    ];
    for (service, m, n) in cases {
        let spec = SystemSpec::critical(service.clone(), m, n)?;
        let r = ctmc::report(spec.arrival_rate, &service.as_phase_type()?, m, n)?;
        let recs = simulator::run_replications(&spec, 100_000, 10)?;
        let col = |f: &dyn Fn(&busyloss::BusyPeriodRecord) -> f64| {
            stats::mean_ci(&recs.iter().map(f).collect::<Vec<_>>(), 0.99)
        };
        let l = col(&|r| r.losses as f64)?;
        let t = col(&|r| r.duration)?;
        let served = col(&|r| r.served as f64)?;
        println!("{}  ({} transient states)", spec.label(), r.state_count);
        println!("  losses       exact {:.6}  sim {:.4} ± {:.4}", r.expected_losses, l.mean, l.half_width);
        println!("  busy period  exact {:.6}  sim {:.4} ± {:.4}", r.expected_busy_period, t.mean, t.half_width);
        println!(
            "  P(loss)      stationary {:.6}  L/(L+served) {:.6}  sim {:.6}",
            r.loss_probability,
            r.expected_losses / (r.expected_losses + r.expected_served),
            l.mean / (l.mean + served.mean)
        );
    }
    Ok(())
}
