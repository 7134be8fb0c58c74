//! Closed-form busy-period profile of an M/M/m/n queue.
//!
//! cargo run --example analytic_profile -- 2 1 3 2     # lambda mu m n

use busyloss::analytic::{self, MarkovSpec};

fn main() -> busyloss::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (lambda, mu, m, n) = match args[..] {
        [l, u, m, n] => (l, u, m as u32, n as u32),
        _ => (3.0, 1.0, 3, 2),
    };
    let spec = MarkovSpec::new(lambda, mu, m, n)?;
    let p = analytic::profile(&spec)?;

    println!("M/M/{m}/{n}  lambda={lambda} mu={mu} rho={:.4}", p.rho);
    println!("{:>4} {:>14} {:>14}", "j", "E f(j+1)", "E B(j)");
    for j in 0..=spec.capacity() as usize {
        println!("{j:>4} {:>14.6} {:>14.6}", p.level_crossings[j], p.state_times[j]);
    }
    println!("E T     = {:.6}", p.expected_busy_period);
    println!("E zeta  = {:.6}", p.expected_orbital_busy_period);
    println!("E kappa = {:.6}", p.expected_orbital_count);
    println!("E L     = {:.6}", p.expected_losses);

    // At rho = 1 the loss count does not move with n.
    let crit = MarkovSpec::new(m as f64 * mu, mu, m, 0)?;
    print!("critical load, E L for n = 0..6:");
    for k in 0..=6 {
        print!(" {:.4}", analytic::expected_losses_markov(&MarkovSpec { n: k, ..crit })?);
    }
    println!("   (m^m/m! = {:.4})", analytic::critical_loss_constant(m));
    Ok(())
}
