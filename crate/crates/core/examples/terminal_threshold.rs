//! Optimal tax start level when ruin pays a terminal value S.
//!
//! cargo run --example terminal_threshold

use taxdelay::{LevyModel, ScaleSet, TerminalProblem};

fn main() -> taxdelay::Result<()> {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05)?;

    for s in [-8.0, -5.0, -4.0, 0.0] {
        let p = TerminalProblem::new(scale, 0.1, s, 1.0)?;
        let opt = p.optimize()?;
        let kind = if opt.boundary_case { "tax from the start" } else { "delay" };
        println!("S = {s:>5}: b* = {:.6}  value = {:.6}  h(0) = {:+.4}  ({kind})", opt.threshold, opt.value, p.h_terminal(0.0)?);
    }

    // Started from zero, the objective is flat in the level at b*.
    let p = TerminalProblem::new(scale, 0.1, -5.0, 0.0)?;
    let b = p.optimize()?.threshold;
    for level in [0.0, b, 2.0, 4.0] {
        println!("phi(0; {level:.4}) = {:.6}  dphi/db = {:+.2e}", p.phi_value(0.0, level)?, p.phi_b_derivative(0.0, level)?);
    }
    Ok(())
}
