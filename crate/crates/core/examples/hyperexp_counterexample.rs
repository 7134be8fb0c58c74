//! The two-server hyperexponential chain: losses with and without a
//! waiting place, from the exact Markov-chain oracle.

use busyloss::ctmc;
use busyloss::ServiceDistribution;

fn main() -> busyloss::Result<()> {
    let h2 = ServiceDistribution::hyperexponential(0.9, 1.8, 0.2)?;
    let ph = h2.as_phase_type()?;
    println!("G = {h2}  (mean {:.6}, class {})", h2.mean()?, h2.classify());

    let model = ctmc::build_model(2.0, &ph, 2, 1)?;
    println!("\nM/H2/2/1 busy-period states:");
    for (i, s) in model.states.iter().enumerate() {
        println!("  {i}: queue {} phases {:?}", s.queue_length, s.phase_counts);
    }
    let full = ctmc::build_full_chain(2.0, &ph, 2, 1)?;
    println!("with the empty state: {} states", full.states.len());

    println!("\n  n   E L_2,n          E T_2,n          P(loss)");
    for n in 0..=5 {
        let r = ctmc::report(2.0, &ph, 2, n)?;
        println!("  {n}   {:.12}   {:.12}   {:.6}", r.expected_losses, r.expected_busy_period, r.loss_probability);
    }

    // Scan the mixing weight: every p strictly inside (0, 1) separates
    // n = 0 from n = 1 once the mean is held at 1.
    println!("\n  p      rate1   rate2   E L_2,1 - E L_2,0");
    for p in [0.5, 0.7, 0.9, 0.95] {
        let rate1 = 2.0 * p;
        let rate2 = 2.0 * (1.0 - p);
        let ph = ServiceDistribution::hyperexponential(p, rate1, rate2)?.as_phase_type()?;
        let l0 = ctmc::expected_busy_period_losses(&ctmc::build_model(2.0, &ph, 2, 0)?)?;
        let l1 = ctmc::expected_busy_period_losses(&ctmc::build_model(2.0, &ph, 2, 1)?)?;
        println!("  {p:<6} {rate1:<7.2} {rate2:<7.2} {:+.6}", l1 - l0);
    }
    Ok(())
}
