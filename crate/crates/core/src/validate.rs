//! Quick self-check run by the `validate` subcommand.

use serde::{Deserialize, Serialize};

use crate::config::{Mode, RunConfig};
use crate::error::Result;
use crate::model::LevyModel;
use crate::numerics::find_root_decreasing_sign;
use crate::scale::ScaleSet;
use crate::simulate::{simulate_injection, simulate_terminal, SimConfig};
use crate::tables::{reproduce_table, TableRow};
use crate::tax_injection::InjectionProblem;
use crate::tax_terminal::TerminalProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Reported difference from a published figure that is not an error of
    /// the computation.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn info(name: impl Into<String>, detail: String) -> Self {
        Self {
            name: name.into(),
            status: Status::Info,
            detail,
        }
    }
}

struct Published {
    intercept: [f64; 3],
    slope: [f64; 3],
    rhs: (f64, f64),
    threshold: [f64; 3],
    tol: (f64, f64, f64),
}

const TABLE1: Published = Published {
    intercept: [0.29630, 0.55487, 0.77143],
    slope: [-0.24801, -0.21900, -0.18931],
    rhs: (1.14286, -0.04762),
    threshold: [-4.22, -3.43, -2.62],
    tol: (2e-4, 1e-5, 0.01),
};

const TABLE2: Published = Published {
    intercept: [1.75676, 2.87400, 3.36578],
    slope: [-0.144583, -0.11451, -0.08521],
    rhs: (1.1976, -0.001996),
    threshold: [3.92, 14.9, 26.06],
    tol: (2e-4, 1e-4, 0.05),
};

const TABLE3: Published = Published {
    intercept: [-2.9622, -2.45091, -1.93869],
    slope: [-4.0, -4.0, -4.0],
    rhs: (24.0, -24.0),
    threshold: [1.348, 1.323, 1.297],
    tol: (2e-4, 1e-6, 0.002),
};

fn compare_table(id: u32, rows: &[TableRow], published: &Published, as_info: bool) -> Vec<Check> {
    let mut out = Vec::new();
    let (coef_tol, rhs_tol, thr_tol) = published.tol;
    let slope_tol = if id == 3 { 1e-6 } else { coef_tol };
    for (i, row) in rows.iter().enumerate() {
        let tag = format!("table {id} ell={}", row.ell);
        let items = [
            ("intercept", row.intercept, published.intercept[i], coef_tol),
            ("slope", row.slope, published.slope[i], slope_tol),
            ("threshold", row.threshold, published.threshold[i], thr_tol),
        ];
        for (what, got, want, tol) in items {
            let ok = (got - want).abs() <= tol;
            let detail = format!("computed {got:.6} published {want} tol {tol:e}");
            let name = format!("{tag} {what}");
            out.push(if ok || !as_info { Check::new(name, ok, detail) } else { Check::info(name, detail) });
        }
        let rhs_ok = (row.rhs_intercept - published.rhs.0).abs() <= rhs_tol
            && (row.rhs_slope - published.rhs.1).abs() <= rhs_tol;
        out.push(Check::new(
            format!("{tag} rhs"),
            rhs_ok,
            format!("computed ({:.6}, {:.6}) published {:?}", row.rhs_intercept, row.rhs_slope, published.rhs),
        ));
    }
    out
}

fn threshold_consistency(rows: &[TableRow], terminal: bool) -> Result<Vec<Check>> {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05)?;
    let mut out = Vec::new();
    for row in rows {
        // Direct root of h(0) in the cost parameter, found from the side
        // where the interior optimum holds.
        let direct = if terminal {
            let p = TerminalProblem::new(scale, row.ell, 0.0, 1.0)?;
            let root = find_root_decreasing_sign(
                |t| p.with_terminal_value(t - 100.0).and_then(|p| p.h_terminal(0.0)).unwrap_or(f64::NAN),
                0.0,
                1e-10,
                1e6,
            )?;
            root.root - 100.0
        } else {
            let p = InjectionProblem::new(scale, row.ell, 2.0, 0.0)?;
            let root = find_root_decreasing_sign(
                |t| p.with_cost(2.5 - t).and_then(|p| p.h_bar(0.0)).unwrap_or(f64::NAN),
                0.0,
                1e-10,
                2.4,
            )?;
            2.5 - root.root
        };
        let ok = (direct - row.threshold).abs() < 1e-3;
        out.push(Check::new(
            format!("table {} ell={} threshold vs direct root", if terminal { 1 } else { 3 }, row.ell),
            ok,
            format!("affine {:.6} direct {:.6}", row.threshold, direct),
        ));
    }
    Ok(out)
}

fn scale_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let model = LevyModel::new(1.2, 1.0, 1.0)?;
    for q in [0.002, 0.05, 0.5] {
        let s = ScaleSet::new(model, q)?;
        let w0 = (s.w(0.0) - 1.0 / 1.2).abs() < 1e-14;
        let w1 = ((s.w1_at_zero() - (q + 1.0) / 1.44) / s.w1_at_zero()).abs() < 1e-10;
        let ineq = [0.1, 1.0, 5.0, 20.0].iter().all(|&x| {
            s.w(x) * s.w2(x) < s.w1(x).powi(2) && s.w1(x) * s.w3(x) > s.w2(x).powi(2)
        });
        let big = 40.0 / s.phi();
        let limit = (s.w1(big) / s.w(big) - s.phi()).abs() < 1e-6;
        out.push(Check::new(
            format!("scale identities q={q}"),
            w0 && w1 && ineq && limit,
            format!("W(0) {w0}, W'(0+) {w1}, inequalities {ineq}, limit {limit}"),
        ));
    }
    Ok(out)
}

fn derivative_checks() -> Result<Vec<Check>> {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05)?;
    let t = TerminalProblem::new(scale, 0.2, -4.0, 1.0)?;
    let i = InjectionProblem::new(scale, 0.2, 1.5, 1.0)?;
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for b in [1.5, 3.0, 6.0] {
        let fd = (t.phi_value(1.0, b + h)? - t.phi_value(1.0, b - h)?) / (2.0 * h);
        let exact = t.phi_b_derivative(1.0, b)?;
        worst = worst.max((fd - exact).abs() / exact.abs().max(1e-3));
        let fd = (i.phi_bar_value(1.0, b + h)? - i.phi_bar_value(1.0, b - h)?) / (2.0 * h);
        let exact = i.phi_bar_a_derivative(1.0, b)?;
        worst = worst.max((fd - exact).abs() / exact.abs().max(1e-3));
    }
    Ok(vec![Check::new(
        "threshold derivatives vs finite differences",
        worst < 1e-5,
        format!("worst relative error {worst:.2e}"),
    )])
}

fn monte_carlo_checks(paths: u64, seed: u64) -> Result<Vec<Check>> {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0)?, 0.05)?;
    let cfg = SimConfig::new(paths, 400.0, seed);
    let t = TerminalProblem::new(scale, 0.1, -5.0, 1.0)?;
    let mc = simulate_terminal(&t, 2.0, &cfg)?;
    let exact = t.phi_value(1.0, 2.0)?;
    let z_t = (mc.mean - exact) / mc.stderr;
    let i = InjectionProblem::new(scale, 0.2, 1.5, 1.0)?;
    let mc = simulate_injection(&i, 2.0, &cfg)?;
    let exact_i = i.phi_bar_value(1.0, 2.0)?;
    let z_i = (mc.mean - exact_i) / mc.stderr;
    Ok(vec![
        Check::new("monte carlo terminal", z_t.abs() < 4.0, format!("exact {exact:.6} z {z_t:.2}")),
        Check::new("monte carlo injection", z_i.abs() < 4.0, format!("exact {exact_i:.6} z {z_i:.2}")),
    ])
}

/// Runs every check. Differences from the published injection table that
/// stem from its intercepts being taken at a fixed cost are reported as
/// [`Status::Info`].
pub fn run_validation(paths: u64, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let t1 = reproduce_table(1)?;
    out.extend(compare_table(1, &t1, &TABLE1, false));
    out.extend(compare_table(2, &reproduce_table(2)?, &TABLE2, false));
    let t3 = reproduce_table(3)?;
    out.extend(compare_table(3, &t3, &TABLE3, true));
    out.extend(threshold_consistency(&t1, true)?);
    out.extend(threshold_consistency(&t3, false)?);
    out.extend(scale_checks()?);
    out.extend(derivative_checks()?);
    let base = RunConfig::baseline(Mode::Terminal);
    let opt = base.problem()?.optimize()?;
    out.push(Check::new(
        "terminal baseline boundary optimum",
        opt.boundary_case && opt.threshold == 0.0,
        format!("threshold {}", opt.threshold),
    ));
    out.extend(monte_carlo_checks(paths, seed)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_runs_and_only_published_injection_values_differ() {
        let checks = run_validation(4000, 1).unwrap();
        for c in &checks {
            assert_ne!(c.status, Status::Fail, "{}: {}", c.name, c.detail);
            if c.status == Status::Info {
                assert!(c.name.starts_with("table 3"), "{}", c.name);
            }
        }
        assert!(checks.iter().any(|c| c.status == Status::Info));
    }
}
