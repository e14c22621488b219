//! Affine decomposition of the optimality condition at zero.
//!
//! Both sides of `h(0) > 0` are affine in the remaining cost parameter: in
//! `S` for the terminal problem and in `varphi` for the injection problem.
//! Each row gives the two lines and the parameter value where they cross.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::scale::ScaleSet;
use crate::tax_injection::InjectionProblem;
use crate::tax_terminal::TerminalProblem;

pub const TABLE_ELLS: [f64; 3] = [0.1, 0.2, 0.3];

/// `lhs(p) = intercept + slope p` against `rhs(p) = rhs_intercept + rhs_slope p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub ell: f64,
    pub intercept: f64,
    pub slope: f64,
    pub rhs_intercept: f64,
    pub rhs_slope: f64,
    /// Parameter value at which both sides agree.
    pub threshold: f64,
}

impl TableRow {
    fn from_lines(ell: f64, lhs: (f64, f64), rhs: (f64, f64)) -> Self {
        Self {
            ell,
            intercept: lhs.0,
            slope: lhs.1,
            rhs_intercept: rhs.0,
            rhs_slope: rhs.1,
            threshold: (rhs.0 - lhs.0) / (lhs.1 - rhs.1),
        }
    }

    /// `lhs - rhs` at parameter value `p`.
    pub fn margin(&self, p: f64) -> f64 {
        (self.intercept - self.rhs_intercept) + (self.slope - self.rhs_slope) * p
    }
}

/// Line through two evaluations of an affine map.
fn line(f: impl Fn(f64) -> Result<f64>, p0: f64, p1: f64) -> Result<(f64, f64)> {
    let (v0, v1) = (f(p0)?, f(p1)?);
    let slope = (v1 - v0) / (p1 - p0);
    Ok((v0 - slope * p0, slope))
}

/// `upsilon(0)` and `V(0)(1 - S q W_q(0))` as lines in `S`.
pub fn terminal_row(scale: ScaleSet, ell: f64) -> Result<TableRow> {
    let problem = TerminalProblem::new(scale, ell, 0.0, 0.0)?;
    let at = |s: f64| problem.with_terminal_value(s);
    let lhs = line(|s| at(s)?.upsilon(0.0), 0.0, 1.0)?;
    let rhs = line(
        |s| {
            let p = at(s)?;
            Ok(p.cap_v(0.0)? * (1.0 - s * scale.q() * scale.w(0.0)))
        },
        0.0,
        1.0,
    )?;
    Ok(TableRow::from_lines(ell, lhs, rhs))
}

/// `upsilonbar(0)` and `Vbar(0)(1 - varphi Z_q(0))` as lines in `varphi`.
pub fn injection_row(scale: ScaleSet, ell: f64) -> Result<TableRow> {
    let problem = InjectionProblem::new(scale, ell, 2.0, 0.0)?;
    let at = |v: f64| problem.with_cost(v);
    let lhs = line(|v| at(v)?.upsilon_bar(0.0), 2.0, 3.0)?;
    let rhs = line(|v| Ok(at(v)?.cap_v_bar(0.0)? * (1.0 - v * scale.z(0.0))), 2.0, 3.0)?;
    Ok(TableRow::from_lines(ell, lhs, rhs))
}

/// The three published tables for the baseline model `c = 1.2, lambda = mu = 1`:
/// 1 is the terminal problem at `q = 0.05`, 2 the terminal problem at
/// `q = 0.002` and 3 the injection problem at `q = 0.05`.
pub fn reproduce_table(id: u32) -> Result<Vec<TableRow>> {
    let model = LevyModel::new(1.2, 1.0, 1.0)?;
    let (q, terminal) = match id {
        1 => (0.05, true),
        2 => (0.002, true),
        3 => (0.05, false),
        _ => return Err(Error::InvalidConfig(format!("unknown table {id}; expected 1, 2 or 3"))),
    };
    let scale = ScaleSet::new(model, q)?;
    TABLE_ELLS
        .iter()
        .map(|&ell| if terminal { terminal_row(scale, ell) } else { injection_row(scale, ell) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_table() {
        assert!(matches!(reproduce_table(4), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn rows_are_affine() {
        let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0).unwrap(), 0.05).unwrap();
        let row = terminal_row(scale, 0.2).unwrap();
        let p = TerminalProblem::new(scale, 0.2, -7.0, 0.0).unwrap();
        assert!((p.upsilon(0.0).unwrap() - (row.intercept - 7.0 * row.slope)).abs() < 1e-9);
        assert!((p.h_terminal(0.0).unwrap() - row.margin(-7.0)).abs() < 1e-9);
        assert!(row.margin(row.threshold).abs() < 1e-12);
    }

    #[test]
    fn injection_lines() {
        let rows = reproduce_table(3).unwrap();
        for r in &rows {
            assert!((r.rhs_intercept - 24.0).abs() < 1e-9);
            assert!((r.rhs_slope + 24.0).abs() < 1e-9);
        }
        assert!((rows[0].intercept - 0.837617).abs() < 1e-5);
        assert!((rows[0].slope + 6.835683).abs() < 1e-5);
    }
}
