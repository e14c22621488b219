//! Optimal thresholds along a parameter, and the sign of h(0) over an
//! (S, q) grid.
//!
//! cargo run --example parameter_sweep

use taxdelay::config::{Mode, Param, RunConfig};
use taxdelay::sweep::{sign_grid, sweep};

fn main() -> taxdelay::Result<()> {
    let base = RunConfig::baseline(Mode::Terminal);
    for row in sweep(&base, Param::S, -10.0, -2.0, 9)? {
        println!("S = {:>6.2}: b* = {:.4}  boundary = {}", row.param, row.threshold, row.boundary_case);
    }

    let inj = RunConfig::baseline(Mode::Injection);
    for row in sweep(&inj, Param::Varphi, 1.2, 3.0, 7)? {
        println!("varphi = {:.2}: a* = {:.4}", row.param, row.threshold);
    }

    // A '+' marks cells where delaying the tax pays off.
    let cells = sign_grid(&base, (-5.0, 30.0, 15), (0.001, 0.01, 10))?;
    for chunk in cells.chunks(15) {
        let marks: String = chunk.iter().map(|c| if c.positive { '+' } else { '.' }).collect();
        println!("q = {:.4}  {marks}", chunk[0].q);
    }
    Ok(())
}
