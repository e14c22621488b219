//! Closed-form objectives against the event-driven simulator.
//!
//! cargo run --release --example monte_carlo_check

use taxdelay::{simulate_injection, simulate_terminal, InjectionProblem, LevyModel, ScaleSet, SimConfig, TerminalProblem};

fn main() -> taxdelay::Result<()> {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05)?;
    let cfg = SimConfig::new(100_000, 400.0, 7);

    let t = TerminalProblem::new(scale, 0.1, -5.0, 0.3)?;
    for b in [0.0, t.optimize()?.threshold, 2.0] {
        let mc = simulate_terminal(&t, b, &cfg)?;
        let exact = t.phi_value(0.3, b)?;
        println!(
            "terminal b = {b:.4}: mc {:.5} +- {:.5}  exact {exact:.5}  ruined {:.3}",
            mc.mean,
            mc.stderr,
            mc.ruin_fraction.unwrap_or(f64::NAN)
        );
    }

    let i = InjectionProblem::new(scale, 0.2, 1.5, 0.3)?;
    for a in [0.0, i.optimize()?.threshold, 2.0] {
        let mc = simulate_injection(&i, a, &cfg)?;
        let exact = i.phi_bar_value(0.3, a)?;
        println!("injection a = {a:.4}: mc {:.5} +- {:.5}  exact {exact:.5}", mc.mean, mc.stderr);
    }
    Ok(())
}
