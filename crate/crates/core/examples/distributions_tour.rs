//! Service laws: means, classes, phase-type forms and a sampling check.

use busyloss::stats;
use busyloss::{RngStream, ServiceDistribution};

fn main() -> busyloss::Result<()> {
    let laws: Vec<ServiceDistribution> = ["exp:1", "erlang:3:3", "det:1", "h2:0.9:1.8:0.2", "hyperexp:0.5:2:2"]
        .iter()
        .map(|s| s.parse())
        .collect::<busyloss::Result<_>>()?;
    for (i, d) in laws.iter().enumerate() {
        let mut rng = RngStream::new(1, i as u64).generator();
        let xs: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
        let e = stats::mean_ci(&xs, 0.99)?;
        let ks = stats::ks_distance(&xs, |x| d.cdf(x));
        println!(
            "{:<20} mean {:.4}  sample {:.4}±{:.4}  KS {ks:.4}  {}",
            d.to_string(),
            d.mean()?,
            e.mean,
            e.half_width,
            d.classify()
        );
        match d.as_phase_type() {
            Ok(ph) => println!("{:<20} initial {:?} S {:?}", "", ph.initial, ph.subgenerator),
            Err(err) => println!("{:<20} {err}", ""),
        }
    }
    let json = serde_json::to_string(&laws[3]).expect("serializes");
    println!("\nconfig form: {json}");
    Ok(())
}
