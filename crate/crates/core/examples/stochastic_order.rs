//! Time spent with m-1 customers present: does a waiting place make it
//! stochastically larger (NBU service) or smaller (NWU service)?

use busyloss::simulator;
use busyloss::stats;
use busyloss::{ServiceDistribution, SystemSpec};

fn quantiles(xs: &mut [f64]) -> String {
    xs.sort_by(f64::total_cmp);
    [0.1, 0.25, 0.5, 0.75, 0.9]
        .iter()
        .map(|q| format!("{:.3}", xs[(q * (xs.len() - 1) as f64) as usize]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> busyloss::Result<()> {
    let reps = 100_000;
    for service in [
        ServiceDistribution::deterministic(1.0)?,
        ServiceDistribution::erlang(3, 3.0)?,
        ServiceDistribution::hyperexponential(0.9, 1.8, 0.2)?,
    ] {
        let mut t0 = simulator::measure_state_m_minus_1(&SystemSpec::critical(service.clone(), 2, 0)?, reps, 1)?;
        let mut t1 = simulator::measure_state_m_minus_1(&SystemSpec::critical(service.clone(), 2, 1)?, reps, 2)?;
        println!("M/{}/2/n  ({})", service.kendall(), service.classify());
        println!("  n=0 mean {:.4}  q10..q90 {}", t0.iter().sum::<f64>() / reps as f64, quantiles(&mut t0));
        println!("  n=1 mean {:.4}  q10..q90 {}", t1.iter().sum::<f64>() / reps as f64, quantiles(&mut t1));
        let up = stats::stochastic_dominance(&t1, &t0, stats::DEFAULT_DOMINANCE_TOLERANCE);
        let down = stats::stochastic_dominance(&t0, &t1, stats::DEFAULT_DOMINANCE_TOLERANCE);
        println!("  T(n=1) >=st T(n=0): {} (excess {:+.4})", up.holds, up.max_violation);
        println!("  T(n=0) >=st T(n=1): {} (excess {:+.4})\n", down.holds, down.max_violation);
    }
    Ok(())
}
