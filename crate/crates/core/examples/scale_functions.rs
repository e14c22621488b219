//! Scale functions of the exponential-claims model and the identities they
//! satisfy.
//!
//! cargo run --example scale_functions

use taxdelay::{LevyModel, ScaleSet};

fn main() -> taxdelay::Result<()> {
    let model = LevyModel::new(1.2, 1.0, 1.0)?;
    let s = ScaleSet::new(model, 0.05)?;
    let r = s.roots();
    println!("Phi(q) = {:.6}, theta2 = {:.6}, A1 = {:.6}, A2 = {:.6}", r.theta1, r.theta2, r.a1, r.a2);
    println!("W(0) = {:.6} (1/c = {:.6})", s.w(0.0), 1.0 / model.c());
    println!("W'(0+) = {:.6} ((q+lambda)/c^2 = {:.6})", s.w1_at_zero(), 1.05 / 1.44);

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "x", "W", "W'", "Z", "W'/W");
    for x in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0] {
        println!("{x:>6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}", s.w(x), s.w1(x), s.z(x), s.w1(x) / s.w(x));
    }

    // Far out, W'/W settles on Phi(q) and Z - qW^2/W' vanishes.
    let far = 40.0 / s.phi();
    println!("W'/W({far:.1}) - Phi = {:.3e}", s.w1(far) / s.w(far) - s.phi());
    println!("Z - qW^2/W' at {far:.1} = {:.3e}", s.reflected_exit_gap(far));
    Ok(())
}
