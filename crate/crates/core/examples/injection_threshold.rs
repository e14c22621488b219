//! Optimal tax start level when deficits are covered by capital injections
//! at unit cost varphi.
//!
//! cargo run --example injection_threshold

use taxdelay::{InjectionProblem, LevyModel, ScaleSet};

fn main() -> taxdelay::Result<()> {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05)?;
    for ell in [0.1, 0.2, 0.3] {
        for varphi in [1.2, 1.5, 2.0, 3.0] {
            let p = InjectionProblem::new(scale, ell, varphi, 0.0)?;
            let opt = p.optimize()?;
            println!(
                "ell = {ell}, varphi = {varphi}: a* = {:.6}  value = {:.6}  boundary = {}",
                opt.threshold, opt.value, opt.boundary_case
            );
        }
    }

    // Pieces of the objective at a = 1 from x = 0.
    let p = InjectionProblem::new(scale, 0.2, 1.5, 0.0)?;
    println!("g_inf(1) = {:.6}  r_inf(1) = {:.6}  psi_bar(1) = {:.6}", p.g_inf(1.0)?, p.r_inf(1.0)?, p.psi_bar(1.0)?);
    Ok(())
}
