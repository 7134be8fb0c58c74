//! Event-by-event trace of one busy period, scripted and random.

use busyloss::simulator::{self, EventKind};
use busyloss::{ArrivalSource, BusyPeriodRecord, RngStream, ServiceDistribution, SystemSpec};

fn show(r: &BusyPeriodRecord) {
    println!("  duration          {:.4}", r.duration);
    println!("  served / lost     {} / {}", r.served, r.losses);
    println!("  f(j)              {:?}", r.level_crossings);
    let b: Vec<String> = r.time_in_state.iter().map(|t| format!("{t:.3}")).collect();
    println!("  B(j)              [{}]", b.join(", "));
    println!("  orbital periods   {} {:?}", r.orbital_count, r.orbital_losses);
    println!("  queueing periods  {}", r.queueing_period_count);
}

fn main() -> busyloss::Result<()> {
    // Two servers, one waiting place, unit service times.
    let spec = SystemSpec::new(1.0, ServiceDistribution::deterministic(1.0)?, 2, 1)?;
    let script = ArrivalSource::Scripted {
        times: vec![0.0, 0.2, 0.4, 0.5, 2.5],
    };
    let mut trace = Vec::new();
    let r = simulator::simulate_busy_period_traced(&spec, &script, &RngStream::new(0, 0), &mut trace)?;
    println!("{} scripted:", spec.label());
    for e in &trace {
        let what = match e.kind {
            EventKind::Arrival => "arrival",
            EventKind::Loss => "loss",
            EventKind::Departure => "departure",
        };
        println!("  t={:<5.2} {what:<10} occupancy {}", e.time, e.occupancy);
    }
    show(&r);

    let spec = SystemSpec::critical(ServiceDistribution::hyperexponential(0.9, 1.8, 0.2)?, 2, 2)?;
    let poisson = ArrivalSource::Poisson {
        rate: spec.arrival_rate,
    };
    // First stream of seed 42 whose busy period loses a customer.
    let (idx, r) = (0..)
        .map(|i| (i, simulator::simulate_busy_period(&spec, &poisson, &RngStream::new(42, i))))
        .find(|(_, r)| r.as_ref().map_or(true, |r| r.losses > 0))
        .expect("unbounded search");
    let r = r?;
    println!("\n{} at lambda={:.4}, stream (42, {idx}):", spec.label(), spec.arrival_rate);
    show(&r);
    Ok(())
}
