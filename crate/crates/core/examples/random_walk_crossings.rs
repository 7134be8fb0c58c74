//! Upward crossings of a level during one excursion of the symmetric walk.
//! The mean is 1/2 whatever the level.

use busyloss::excursion::{self, ExcursionMethod};

fn main() -> busyloss::Result<()> {
    println!("embedded sampler, 10^6 excursions per level");
    for level in [1, 2, 3, 5, 10, 50] {
        let s = excursion::run_excursions(level, 1_000_000, 8, ExcursionMethod::Embedded)?;
        let se = (s.variance / s.completed as f64).sqrt();
        println!("  level {level:>3}: mean {:.4} (se {se:.4})", s.mean_crossings);
    }

    // The literal walk needs a step cap; its return time has infinite mean.
    let cap = 1_000_000;
    println!("\nstep walk, cap {cap} steps, 10^4 excursions");
    for level in [1, 3, 5] {
        let s = excursion::run_excursions(level, 10_000, 8, ExcursionMethod::StepWalk { cap })?;
        println!(
            "  level {level}: mean {:.4} over {} completed, {} truncated",
            s.mean_crossings, s.completed, s.truncated
        );
    }
    Ok(())
}
