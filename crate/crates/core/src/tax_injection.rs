//! Loss-carry-forward taxation with capital injections.
//!
//! Below zero the surplus is pushed back up by injections costing `varphi`
//! per unit. After an injection the tax is suspended until the surplus
//! recovers its previous peak, and no tax is levied before the surplus
//! first reaches the threshold `a`. [`InjectionProblem::optimize`] finds the
//! threshold maximising expected discounted tax minus discounted injection
//! cost.

use crate::error::{Error, Result};
use crate::numerics::{find_root_decreasing_sign, integrate, integrate_tail, QuadSpec};
use crate::scale::ScaleSet;
use crate::tax_terminal::{check_surplus, check_tax_rate, OptimumReport, THRESHOLD_TOL};

/// The injection problem for a fixed model and discount rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectionProblem {
    scale: ScaleSet,
    ell: f64,
    varphi: f64,
    x0: f64,
    quad: QuadSpec,
}

impl InjectionProblem {
    /// Requires `varphi > 1`: cheaper injections are not covered by the
    /// optimality argument.
    pub fn new(scale: ScaleSet, ell: f64, varphi: f64, x0: f64) -> Result<Self> {
        if !varphi.is_finite() || varphi <= 1.0 {
            return Err(Error::InvalidParameter {
                name: "varphi",
                value: varphi,
                reason: "injection cost must exceed 1 (use new_exploratory for other values)",
            });
        }
        Self::new_exploratory(scale, ell, varphi, x0)
    }

    /// Same as [`InjectionProblem::new`] but accepts any `varphi > 0`. The
    /// threshold returned by the optimiser is then only a stationary point.
    pub fn new_exploratory(scale: ScaleSet, ell: f64, varphi: f64, x0: f64) -> Result<Self> {
        if !varphi.is_finite() || varphi <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "varphi",
                value: varphi,
                reason: "injection cost must be finite and positive",
            });
        }
        Ok(Self {
            scale,
            ell: check_tax_rate(ell)?,
            varphi,
            x0: check_surplus(x0)?,
            quad: QuadSpec::default(),
        })
    }

    pub fn with_quad(mut self, quad: QuadSpec) -> Self {
        self.quad = quad;
        self
    }

    /// Returns a copy with another injection cost, keeping the cost check
    /// that was used to build `self` only as far as positivity goes.
    pub fn with_cost(self, varphi: f64) -> Result<Self> {
        Self::new_exploratory(self.scale, self.ell, varphi, self.x0).map(|p| p.with_quad(self.quad))
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

    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    fn alpha(&self) -> f64 {
        1.0 / (1.0 - self.ell)
    }

    /// `(Z_q(x)/Z_q(w))^alpha` decays at least at rate `alpha Z_q'(x)/Z_q(x)`
    /// because `Z_q'/Z_q` is increasing.
    fn decay_from(&self, x: f64) -> f64 {
        self.alpha() / self.scale.z_over_z1(x)
    }

    fn check_pair(operation: &'static str, x: f64, a: f64) -> Result<()> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(operation, format!("surplus x = {x} must be finite and >= 0")));
        }
        if !(a >= x) || !a.is_finite() {
            return Err(Error::domain(operation, format!("level {a} must be finite and >= x = {x}")));
        }
        Ok(())
    }

    fn check_level(operation: &'static str, a: f64) -> Result<()> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::domain(operation, format!("level {a} must be finite and >= 0")));
        }
        Ok(())
    }

    /// `E_x[e^{-q kappa_a^+}] = Z_q(x)/Z_q(a)` for the process reflected at 0.
    pub fn reflected_upcross_laplace(&self, x: f64, a: f64) -> Result<f64> {
        Self::check_pair("reflected_upcross_laplace", x, a)?;
        Ok(self.scale.z_ratio_pow(x, a, 1.0))
    }

    /// Expected discounted injections of the reflected process started at 0,
    /// up to its first passage above `a`.
    pub fn expected_injection_until_upcross(&self, a: f64) -> Result<f64> {
        self.expected_injection_until_upcross_from(0.0, a)
    }

    /// As [`Self::expected_injection_until_upcross`] from a start `x <= a`:
    /// `(Zbar_q(a) + Psi'/q) Z_q(x)/Z_q(a) - Zbar_q(x) - Psi'/q`.
    pub fn expected_injection_until_upcross_from(&self, x: f64, a: f64) -> Result<f64> {
        Self::check_pair("expected_injection_until_upcross", x, a)?;
        let s = &self.scale;
        let margin = s.model().net_profit_margin();
        // Zbar(a) + Psi'/q = Zbar(a) - Psi' Wbar(a) + Z(a) Psi'/q.
        let tail = s.zbar(a) - margin * s.wbar(a);
        let head = s.zbar(x) - margin * s.wbar(x);
        Ok(s.z_ratio_pow(x, a, 1.0) * tail - head)
    }

    /// `E_x[e^{-q kappa_a^+}]` for the taxed reflected process.
    pub fn f_a(&self, x: f64, a: f64) -> Result<f64> {
        Self::check_pair("f_a", x, a)?;
        Ok(self.scale.z_ratio_pow(x, a, self.alpha()))
    }

    /// Expected discounted tax paid before `kappa_a^+`.
    pub fn g_a(&self, x: f64, a: f64) -> Result<f64> {
        Self::check_pair("g_a", x, a)?;
        if self.ell == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.alpha();
        let s = &self.scale;
        let i = integrate(|w| s.z_ratio_pow(x, w, alpha), x, a, &self.quad)?;
        Ok(self.ell * alpha * i)
    }

    /// Expected discounted injections before `kappa_a^+`.
    pub fn r_a(&self, x: f64, a: f64) -> Result<f64> {
        Self::check_pair("r_a", x, a)?;
        let alpha = self.alpha();
        let s = &self.scale;
        let i = integrate(|w| s.injection_bracket(w) * s.z_ratio_pow(x, w, alpha), x, a, &self.quad)?;
        Ok(alpha * i)
    }

    /// `g_a(x)` with `a = ∞`.
    pub fn g_inf(&self, x: f64) -> Result<f64> {
        Self::check_level("g_inf", x)?;
        if self.ell == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.alpha();
        let s = &self.scale;
        let i = integrate_tail(|w| s.z_ratio_pow(x, w, alpha), x, self.decay_from(x), &self.quad)?;
        Ok(self.ell * alpha * i)
    }

    /// `r_a(x)` with `a = ∞`.
    pub fn r_inf(&self, x: f64) -> Result<f64> {
        Self::check_level("r_inf", x)?;
        let alpha = self.alpha();
        let s = &self.scale;
        let i = integrate_tail(
            |w| s.injection_bracket(w) * s.z_ratio_pow(x, w, alpha),
            x,
            self.decay_from(x),
            &self.quad,
        )?;
        Ok(alpha * i)
    }

    /// `psibar(x) = g_∞(x) - varphi r_∞(x)`: value of taxing from the start.
    pub fn psi_bar(&self, x: f64) -> Result<f64> {
        Ok(self.g_inf(x)? - self.varphi * self.r_inf(x)?)
    }

    /// `upsilonbar(a) = psibar(a) - varphi (Zbar_q(a) + Psi'/q)`.
    pub fn upsilon_bar(&self, a: f64) -> Result<f64> {
        Ok(self.psi_bar(a)? - self.varphi * self.scale.zbar_shifted(a))
    }

    /// `Vbar(a) = Z_q(a) / (q W_q(a))`.
    pub fn cap_v_bar(&self, a: f64) -> Result<f64> {
        Self::check_level("cap_v_bar", a)?;
        Ok(self.scale.z_over_z1(a))
    }

    /// `hbar(a) = upsilonbar(a) - Vbar(a)(1 - varphi Z_q(a))`, evaluated by
    /// integrating `Z_q Vbar'` against the taxed kernel so that no growing
    /// terms cancel.
    pub fn h_bar(&self, a: f64) -> Result<f64> {
        Self::check_level("h_bar", a)?;
        let alpha = self.alpha();
        let s = &self.scale;
        let slope = integrate_tail(
            |w| s.z_times_vbar_slope(w) * s.z_ratio_pow(a, w, alpha),
            a,
            self.decay_from(a),
            &self.quad,
        )?;
        Ok(self.g_inf(a)? - s.z_over_z1(a) - self.varphi * slope)
    }

    /// Objective `phibar(x; a)`. For `x > a` tax starts immediately, so the
    /// threshold is taken as `a = x`.
    pub fn phi_bar_value(&self, x: f64, a: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain("phi_bar_value", format!("surplus x = {x} must be finite and >= 0")));
        }
        Self::check_level("phi_bar_value", a)?;
        let a = a.max(x);
        let s = &self.scale;
        Error::finite("phi_bar_value", s.z_ratio_pow(x, a, 1.0) * self.upsilon_bar(a)? + self.varphi * s.zbar_shifted(x))
    }

    /// Closed-form `∂phibar(x; a)/∂a` for `x <= a`.
    pub fn phi_bar_a_derivative(&self, x: f64, a: f64) -> Result<f64> {
        Self::check_pair("phi_bar_a_derivative", x, a)?;
        let s = &self.scale;
        let factor = self.ell / (1.0 - self.ell) * s.z_ratio_pow(x, a, 1.0) / s.z_over_z1(a);
        Ok(factor * self.h_bar(a)?)
    }

    pub fn optimize(&self) -> Result<OptimumReport> {
        self.optimize_with_tol(THRESHOLD_TOL)
    }

    pub fn optimize_with_tol(&self, tol: f64) -> Result<OptimumReport> {
        if self.ell == 0.0 {
            return Ok(OptimumReport {
                threshold: 0.0,
                value: self.phi_bar_value(self.x0, 0.0)?,
                boundary_case: true,
                root_diag: None,
            });
        }
        let failure = std::cell::Cell::new(None);
        let h = |a: f64| match self.h_bar(a) {
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
            let kernel = s.z_ratio_pow(self.x0, threshold, 1.0) * s.z_over_z1(threshold);
            Error::finite("optimal value", self.varphi * s.zbar_shifted(self.x0) + kernel * (1.0 - self.varphi * s.z(threshold)))?
        } else {
            self.phi_bar_value(self.x0, threshold)?
        };
        Ok(OptimumReport {
            threshold,
            value,
            boundary_case: report.boundary_case,
            root_diag: Some(report),
        })
    }
}
