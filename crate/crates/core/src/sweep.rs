//! Optimal thresholds along a parameter grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Mode, Param, RunConfig};
use crate::error::{Error, Result};
use crate::tables::terminal_row;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub threshold: f64,
    pub value: f64,
    pub boundary_case: bool,
    /// `h(0)` or `hbar(0)`: positive exactly when the threshold is interior.
    pub h0: f64,
}

/// Evenly spaced grid with both ends included.
pub fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 steps, got {steps}")));
    }
    if !from.is_finite() || !to.is_finite() || !(from < to) {
        return Err(Error::InvalidConfig(format!("need finite from < to, got [{from}, {to}]")));
    }
    let width = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { to } else { from + width * i as f64 })
        .collect())
}

/// Optimises `base` at every grid value of `param`. Rows come back in grid
/// order whatever the number of worker threads.
pub fn sweep(base: &RunConfig, param: Param, from: f64, to: f64, steps: usize) -> Result<Vec<SweepRow>> {
    let values = grid(from, to, steps)?;
    // Surface mode mismatches before any work.
    base.with(param, values[0])?.problem()?;
    values
        .par_iter()
        .map(|&v| {
            let problem = base.with(param, v)?.problem()?;
            let report = problem.optimize()?;
            Ok(SweepRow {
                param: v,
                threshold: report.threshold,
                value: report.value,
                boundary_case: report.boundary_case,
                h0: problem.h(0.0)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignCell {
    pub s: f64,
    pub q: f64,
    pub h0: f64,
    /// `h(0) > 0`, i.e. a positive optimal threshold.
    pub positive: bool,
}

/// Sign of `h(0)` for the terminal problem over an `(S, q)` grid. Uses that
/// `h(0)` is affine in `S`, so each `q` costs two evaluations.
pub fn sign_grid(base: &RunConfig, s: (f64, f64, usize), q: (f64, f64, usize)) -> Result<Vec<SignCell>> {
    if base.mode != Mode::Terminal {
        return Err(Error::InvalidConfig("the (S, q) grid needs terminal mode".into()));
    }
    let s_values = grid(s.0, s.1, s.2)?;
    let q_values = grid(q.0, q.1, q.2)?;
    let rows: Vec<Vec<SignCell>> = q_values
        .par_iter()
        .map(|&qv| {
            let scale = base.with(Param::Q, qv)?.scale()?;
            let row = terminal_row(scale, base.ell)?;
            Ok(s_values
                .iter()
                .map(|&sv| {
                    let h0 = row.margin(sv);
                    SignCell { s: sv, q: qv, h0, positive: h0 > 0.0 }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
