//! One simulated surplus path with tax collected above a rising level.
//!
//! cargo run --example sample_path

use taxdelay::simulate::{AtZero, Simulator, Start};
use taxdelay::LevyModel;

fn main() -> taxdelay::Result<()> {
    let sim = Simulator::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05, 0.2)?;
    let start = Start {
        x: 1.0,
        level: 2.0,
        upper: None,
        at_zero: AtZero::Inject,
    };
    let (outcome, trace) = sim.trace_path(&start, 15.0, 10_000, 3, 0)?;
    println!("{:>9} {:>9} {:>9} {:>9} {:>9}", "time", "surplus", "level", "tax", "injected");
    for p in &trace {
        println!("{:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}", p.time, p.surplus, p.level, p.tax, p.injections);
    }
    println!("{} claims, discounted tax {:.4}, discounted injections {:.4}", outcome.claims, outcome.tax, outcome.injections);
    Ok(())
}
