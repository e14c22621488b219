//! Loss-carry-forward taxation with a terminal value at ruin.
//!
//! The net surplus is `U_b(t) = X(t) - ell (sup_{s<=t} X(s) ∨ b - x ∨ b)`:
//! tax at rate `ell` is levied on new record highs once the surplus has
//! reached the threshold `b`, and a lump sum `S` changes hands at ruin.
//! [`TerminalProblem::optimize`] finds the threshold maximising expected
//! discounted tax plus the discounted terminal value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root_decreasing_sign, integrate, integrate_tail, QuadSpec, RootReport};
use crate::scale::ScaleSet;

/// Absolute tolerance on optimal thresholds.
pub const THRESHOLD_TOL: f64 = 1e-8;

/// Optimal threshold together with the objective value at `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    /// `b*` for the terminal-value problem, `a*` for the injection problem.
    pub threshold: f64,
    pub value: f64,
    /// True when the optimum is at 0 rather than at an interior root.
    pub boundary_case: bool,
    pub root_diag: Option<RootReport>,
}

pub(crate) fn check_tax_rate(ell: f64) -> Result<f64> {
    if !ell.is_finite() || !(0.0..1.0).contains(&ell) {
        return Err(Error::InvalidParameter {
            name: "ell",
            value: ell,
            reason: "tax rate must lie in [0, 1)",
        });
    }
    Ok(ell)
}

pub(crate) fn check_surplus(x0: f64) -> Result<f64> {
    if !x0.is_finite() || x0 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "x0",
            value: x0,
            reason: "initial surplus must be finite and nonnegative",
        });
    }
    Ok(x0)
}

/// The terminal-value problem for a fixed model and discount rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalProblem {
    scale: ScaleSet,
    ell: f64,
    s_terminal: f64,
    x0: f64,
    quad: QuadSpec,
}

impl TerminalProblem {
    pub fn new(scale: ScaleSet, ell: f64, s_terminal: f64, x0: f64) -> Result<Self> {
        if !s_terminal.is_finite() {
            return Err(Error::InvalidParameter {
                name: "S",
                value: s_terminal,
                reason: "terminal value must be finite",
            });
        }
        Ok(Self {
            scale,
            ell: check_tax_rate(ell)?,
            s_terminal,
            x0: check_surplus(x0)?,
            quad: QuadSpec::default(),
        })
    }

    pub fn with_quad(mut self, quad: QuadSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_terminal_value(self, s_terminal: f64) -> Result<Self> {
        Self::new(self.scale, self.ell, s_terminal, self.x0).map(|p| p.with_quad(self.quad))
    }

    pub fn with_initial_surplus(mut self, x0: f64) -> Result<Self> {
        self.x0 = check_surplus(x0)?;
        Ok(self)
    }

    pub fn scale(&self) -> &ScaleSet {
        &self.scale
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn s_terminal(&self) -> f64 {
        self.s_terminal
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    fn alpha(&self) -> f64 {
        1.0 / (1.0 - self.ell)
    }

    fn decay(&self) -> f64 {
        self.alpha() * self.scale.phi()
    }

    fn check_exit_args(&self, operation: &'static str, x: f64, b: f64) -> Result<()> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(Error::domain(operation, format!("surplus x = {x} must be finite and >= 0")));
        }
        if !(b >= x) {
            return Err(Error::domain(operation, format!("level {b} must be >= x = {x}")));
        }
        Ok(())
    }

    /// `E_x[e^{-q sigma_b^+}; sigma_b^+ < sigma_0^-] = (W_q(x)/W_q(b))^{1/(1-ell)}`.
    pub fn two_sided_exit_taxed(&self, x: f64, b: f64) -> Result<f64> {
        self.check_exit_args("two_sided_exit_taxed", x, b)?;
        if b.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.scale.w_ratio_pow(x, b, self.alpha()))
    }

    /// `E_x[e^{-q sigma_0^-}; sigma_0^- < sigma_b^+]`; `b` may be infinite.
    pub fn ruin_time_laplace_taxed(&self, x: f64, b: f64) -> Result<f64> {
        self.expected_discounted_penalty(x, b, |_| 1.0)
    }

    /// `E_x[e^{-q sigma_0^-} hbar(Ū(sigma_0^-)); sigma_0^- < sigma_a^+]` where
    /// `Ū(sigma_0^-)` is the pre-ruin running maximum of the net surplus.
    pub fn expected_discounted_penalty<H: Fn(f64) -> f64>(&self, x: f64, a: f64, hbar: H) -> Result<f64> {
        self.check_exit_args("expected_discounted_penalty", x, a)?;
        let alpha = self.alpha();
        let s = &self.scale;
        let integrand = |z: f64| hbar(z) * s.w_ratio_pow(x, z, alpha) * s.ruin_bracket(z);
        let integral = if a.is_infinite() {
            integrate_tail(integrand, x, self.decay(), &self.quad)?
        } else {
            integrate(integrand, x, a, &self.quad)?
        };
        Ok(alpha * integral)
    }

    /// `E_x[e^{-q sigma_0^-} |U(sigma_0^-)|; sigma_0^- < sigma_a^+]`.
    pub fn expected_discounted_deficit(&self, x: f64, a: f64) -> Result<f64> {
        self.check_exit_args("expected_discounted_deficit", x, a)?;
        let alpha = self.alpha();
        let s = &self.scale;
        let integrand = |z: f64| s.w_ratio_pow(x, z, alpha) * s.deficit_bracket(z);
        let integral = if a.is_infinite() {
            integrate_tail(integrand, x, self.decay(), &self.quad)?
        } else {
            integrate(integrand, x, a, &self.quad)?
        };
        Ok(alpha * integral)
    }

    /// `∫_b^∞ (W_q(b)/W_q(z))^{1/(1-ell)} dz`.
    pub fn tax_tail(&self, b: f64) -> Result<f64> {
        let alpha = self.alpha();
        let s = &self.scale;
        integrate_tail(|z| s.w_ratio_pow(b, z, alpha), b, self.decay(), &self.quad)
    }

    /// `∫_b^∞ (W_q(b)/W_q(z))^{1/(1-ell)} (W_q' Z_q / W_q - q W_q)(z) dz`.
    pub fn ruin_tail(&self, b: f64) -> Result<f64> {
        let alpha = self.alpha();
        let s = &self.scale;
        integrate_tail(
            |z| s.w_ratio_pow(b, z, alpha) * s.ruin_bracket(z),
            b,
            self.decay(),
            &self.quad,
        )
    }

    fn check_level(operation: &'static str, b: f64) -> Result<()> {
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::domain(operation, format!("level {b} must be finite and >= 0")));
        }
        Ok(())
    }

    /// `psi(b)`: expected discounted tax until ruin plus discounted terminal
    /// value, for a process taxed from the start at surplus `b`.
    pub fn psi(&self, b: f64) -> Result<f64> {
        Self::check_level("psi", b)?;
        let ruin = if self.s_terminal == 0.0 { 0.0 } else { self.ruin_tail(b)? };
        let tax = if self.ell == 0.0 { 0.0 } else { self.tax_tail(b)? };
        Ok(self.alpha() * (self.s_terminal * ruin + self.ell * tax))
    }

    /// `upsilon(b) = psi(b) - S Z_q(b)`.
    pub fn upsilon(&self, b: f64) -> Result<f64> {
        Ok(self.psi(b)? - self.s_terminal * self.scale.z(b))
    }

    /// `V(b) = W_q(b) / W_q'(b)`.
    pub fn cap_v(&self, b: f64) -> Result<f64> {
        Self::check_level("cap_v", b)?;
        Ok(self.scale.w_over_w1(b))
    }

    /// Objective `phi(x; b)`. For `x > b` taxation starts immediately, so the
    /// threshold is taken as `b = x`.
    pub fn phi_value(&self, x: f64, b: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain("phi_value", format!("surplus x = {x} must be finite and >= 0")));
        }
        Self::check_level("phi_value", b)?;
        let b = b.max(x);
        let s = &self.scale;
        let ratio = s.w_ratio_pow(x, b, 1.0);
        Error::finite("phi_value", self.s_terminal * s.z(x) + ratio * self.upsilon(b)?)
    }

    /// `h(b) = upsilon(b) - V(b)(1 - S q W_q(b))`, evaluated as
    /// `psi(b) - V(b) - S (Z_q(b) - q W_q(b)^2 / W_q'(b))` so that the
    /// growing `Z_q` terms never meet.
    pub fn h_terminal(&self, b: f64) -> Result<f64> {
        Self::check_level("h_terminal", b)?;
        let s = &self.scale;
        Ok(self.psi(b)? - s.w_over_w1(b) - self.s_terminal * s.reflected_exit_gap(b))
    }

    /// Closed-form `∂phi(x; b)/∂b` for `x <= b`.
    pub fn phi_b_derivative(&self, x: f64, b: f64) -> Result<f64> {
        self.check_exit_args("phi_b_derivative", x, b)?;
        let s = &self.scale;
        let factor = self.ell / (1.0 - self.ell) * s.w_ratio_pow(x, b, 1.0) / s.w_over_w1(b);
        Ok(factor * self.h_terminal(b)?)
    }

    /// Maximises `b -> phi(x0; b)` with the default threshold tolerance.
    pub fn optimize(&self) -> Result<OptimumReport> {
        self.optimize_with_tol(THRESHOLD_TOL)
    }

    pub fn optimize_with_tol(&self, tol: f64) -> Result<OptimumReport> {
        if self.ell == 0.0 {
            // Without tax the objective does not depend on the threshold.
            return Ok(OptimumReport {
                threshold: 0.0,
                value: self.phi_value(self.x0, 0.0)?,
                boundary_case: true,
                root_diag: None,
            });
        }
        let failure = std::cell::Cell::new(None);
        let h = |b: f64| match self.h_terminal(b) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        };
        let report = find_root_decreasing_sign(h, 0.0, tol, 1e6 / self.scale.phi());
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let report = report?;
        let threshold = report.root;
        let value = if !report.boundary_case && self.x0 <= threshold {
            let s = &self.scale;
            let sq_w = self.s_terminal * s.q() * s.w(threshold);
            let w_ratio = s.w_ratio_pow(self.x0, threshold, 1.0);
            Error::finite("optimal value", self.s_terminal * s.z(self.x0) + w_ratio * s.w_over_w1(threshold) * (1.0 - sq_w))?
        } else {
            self.phi_value(self.x0, threshold)?
        };
        Ok(OptimumReport {
            threshold,
            value,
            boundary_case: report.boundary_case,
            root_diag: Some(report),
        })
    }
}
