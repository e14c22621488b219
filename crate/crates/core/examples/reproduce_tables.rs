//! The three published threshold tables. Each row solves an affine sign
//! condition in the cost parameter.
//!
//! cargo run --example reproduce_tables

use taxdelay::tables::reproduce_table;

fn main() -> taxdelay::Result<()> {
    for id in 1..=3 {
        println!("table {id}");
        println!("{:>5} {:>11} {:>11} {:>11} {:>11} {:>11}", "ell", "intercept", "slope", "rhs int", "rhs slope", "threshold");
        for r in reproduce_table(id)? {
            println!(
                "{:>5} {:>11.6} {:>11.6} {:>11.6} {:>11.6} {:>11.6}",
                r.ell, r.intercept, r.slope, r.rhs_intercept, r.rhs_slope, r.threshold
            );
        }
    }
    Ok(())
}
