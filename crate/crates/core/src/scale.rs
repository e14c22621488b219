//! Closed-form q-scale functions of the exponential-claims model.
//!
//! With `eps(x) = e^{(theta2 - theta1) x}` every function is evaluated as
//! `e^{theta1 x}` times a bounded factor in `eps`, so large arguments neither
//! overflow in ratios nor lose digits to cancellation. The brackets that
//! appear in the exit identities are stored with their `e^{theta1 x}` terms
//! already cancelled.

use crate::error::Result;
use crate::model::{LevyModel, SpectralRoots};

/// Evaluator bundle for `W_q`, its derivatives and antiderivative, `Z_q` and
/// `Z̄_q` at a fixed discount rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSet {
    model: LevyModel,
    roots: SpectralRoots,
    // Z_q(x) = e^{theta1 x} (z1 + z2 eps)
    z1: f64,
    z2: f64,
    // Z̄_q(x) + Psi'(0+)/q = e^{theta1 x} (zb1 + zb2 eps)
    zb1: f64,
    zb2: f64,
    // lambda / c: value at 0 of the ruin bracket W'Z/W - qW
    ruin_coef: f64,
}

impl ScaleSet {
    pub fn new(model: LevyModel, q: f64) -> Result<Self> {
        let roots = model.spectral_roots(q)?;
        let c = model.c();
        let z1 = q * roots.a1 / (c * roots.theta1);
        let z2 = -q * roots.a2 / (c * roots.theta2);
        Ok(Self {
            model,
            roots,
            z1,
            z2,
            zb1: z1 / roots.theta1,
            zb2: z2 / roots.theta2,
            ruin_coef: model.lambda() / c,
        })
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn roots(&self) -> &SpectralRoots {
        &self.roots
    }

    pub fn q(&self) -> f64 {
        self.roots.q
    }

    /// `Phi(q)`.
    pub fn phi(&self) -> f64 {
        self.roots.theta1
    }

    /// `Psi'(0+) / q`.
    pub fn margin_over_q(&self) -> f64 {
        self.model.net_profit_margin() / self.q()
    }

    #[inline]
    fn eps(&self, x: f64) -> f64 {
        ((self.roots.theta2 - self.roots.theta1) * x).exp()
    }

    #[inline]
    fn w_factor(&self, x: f64) -> f64 {
        self.roots.a1 - self.roots.a2 * self.eps(x)
    }

    #[inline]
    fn z_factor(&self, x: f64) -> f64 {
        self.z1 + self.z2 * self.eps(x)
    }

    fn w_derivative(&self, k: i32, x: f64) -> f64 {
        let r = &self.roots;
        let e1 = (r.theta1 * x).exp();
        e1 * (r.a1 * r.theta1.powi(k) - r.a2 * r.theta2.powi(k) * self.eps(x)) / self.model.c()
    }

    /// `W_q(x)`, zero for `x < 0`.
    pub fn w(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.w_derivative(0, x)
    }

    /// `W_q'(x)` for `x > 0`; at `x = 0` this is the right limit.
    pub fn w1(&self, x: f64) -> f64 {
        self.w_derivative(1, x.max(0.0))
    }

    pub fn w2(&self, x: f64) -> f64 {
        self.w_derivative(2, x.max(0.0))
    }

    pub fn w3(&self, x: f64) -> f64 {
        self.w_derivative(3, x.max(0.0))
    }

    /// `W_q'(0+) = (A1 theta1 - A2 theta2) / c`.
    pub fn w1_at_zero(&self) -> f64 {
        let r = &self.roots;
        (r.a1 * r.theta1 - r.a2 * r.theta2) / self.model.c()
    }

    /// `ln W_q(x)` for `x >= 0`, finite for arguments where `W_q` overflows.
    pub fn ln_w(&self, x: f64) -> f64 {
        self.roots.theta1 * x + (self.w_factor(x) / self.model.c()).ln()
    }

    /// `ln Z_q(x)` for `x >= 0`.
    pub fn ln_z(&self, x: f64) -> f64 {
        self.roots.theta1 * x + self.z_factor(x).ln()
    }

    /// `W̄_q(x) = ∫_0^x W_q`.
    pub fn wbar(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = &self.roots;
        ((r.a1 / r.theta1) * (r.theta1 * x).exp_m1() - (r.a2 / r.theta2) * (r.theta2 * x).exp_m1())
            / self.model.c()
    }

    /// `Z_q(x) = 1 + q W̄_q(x)`, equal to 1 for `x <= 0`.
    pub fn z(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        1.0 + self.q() * self.wbar(x)
    }

    /// `Z_q'(x) = q W_q(x)`.
    pub fn z1(&self, x: f64) -> f64 {
        self.q() * self.w(x)
    }

    /// `Z̄_q(x) = ∫_0^x Z_q`.
    pub fn zbar(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = &self.roots;
        let part = |a: f64, theta: f64| (a / theta) * ((theta * x).exp_m1() / theta - x);
        x + self.q() * (part(r.a1, r.theta1) - part(r.a2, r.theta2)) / self.model.c()
    }

    /// `Z̄_q(x) + Psi'(0+)/q`, evaluated without adding the two pieces.
    pub fn zbar_shifted(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        (self.roots.theta1 * x).exp() * (self.zb1 + self.zb2 * self.eps(x))
    }

    /// `(W_q(x) / W_q(z))^power` for `0 <= x <= z`.
    pub fn w_ratio_pow(&self, x: f64, z: f64, power: f64) -> f64 {
        let log_ratio = self.roots.theta1 * (x - z) + (self.w_factor(x) / self.w_factor(z)).ln();
        (power * log_ratio).exp()
    }

    /// `(Z_q(x) / Z_q(z))^power` for `0 <= x <= z`.
    pub fn z_ratio_pow(&self, x: f64, z: f64, power: f64) -> f64 {
        let log_ratio = self.roots.theta1 * (x - z) + (self.z_factor(x) / self.z_factor(z)).ln();
        (power * log_ratio).exp()
    }

    /// `W_q'(z) Z_q(z) / W_q(z) - q W_q(z)`, the density of the ruin
    /// functional. Its leading `e^{theta1 z}` terms cancel exactly, leaving
    /// `(lambda/c) e^{theta2 z} / (A1 - A2 eps)`.
    pub fn ruin_bracket(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        self.ruin_coef * (self.roots.theta2 * z).exp() / self.w_factor(z)
    }

    /// `Z_q - Psi'(0+) W_q - (Z̄_q - Psi'(0+) W̄_q) W_q' / W_q`, the density of
    /// the discounted deficit. Claims are exponential, so this equals
    /// `ruin_bracket / mu`.
    pub fn deficit_bracket(&self, s: f64) -> f64 {
        self.ruin_bracket(s) / self.model.mu()
    }

    /// `Z_q(w) - (Z̄_q(w) + Psi'(0+)/q) q W_q(w) / Z_q(w)`, the capital
    /// injection density; equals `(lambda/(mu c)) e^{theta2 w} / (z1 + z2 eps)`.
    pub fn injection_bracket(&self, w: f64) -> f64 {
        let w = w.max(0.0);
        self.ruin_coef / self.model.mu() * (self.roots.theta2 * w).exp() / self.z_factor(w)
    }

    /// `Z_q(b) - q W_q(b)^2 / W_q'(b) > 0`, the Laplace transform of the exit
    /// time of the process reflected at its supremum.
    pub fn reflected_exit_gap(&self, b: f64) -> f64 {
        let b = b.max(0.0);
        let r = &self.roots;
        self.ruin_coef * (r.theta2 * b).exp() / (r.a1 * r.theta1 - r.a2 * r.theta2 * self.eps(b))
    }

    /// `Z_q(w) * d/dw [Z_q(w)/Z_q'(w)]`, which is negative and decays like
    /// `e^{theta2 w}`.
    pub fn z_times_vbar_slope(&self, w: f64) -> f64 {
        let w = w.max(0.0);
        let factor = self.w_factor(w);
        -(self.model.lambda() / self.q()) * (self.roots.theta2 * w).exp() * self.z_factor(w)
            / (factor * factor)
    }

    /// `W_q(x) / W_q'(x)`, bounded and increasing.
    pub fn w_over_w1(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        let r = &self.roots;
        let eps = self.eps(x);
        (r.a1 - r.a2 * eps) / (r.a1 * r.theta1 - r.a2 * r.theta2 * eps)
    }

    /// `Z_q(x) / Z_q'(x) = Z_q(x) / (q W_q(x))`.
    pub fn z_over_z1(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        self.model.c() * self.z_factor(x) / (self.q() * self.w_factor(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline(q: f64) -> ScaleSet {
        ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0).unwrap(), q).unwrap()
    }

    // Naive evaluation straight from the two-exponential formula.
    fn naive_w(s: &ScaleSet, x: f64) -> f64 {
        let r = s.roots();
        (r.a1 * (r.theta1 * x).exp() - r.a2 * (r.theta2 * x).exp()) / s.model().c()
    }

    fn naive_w1(s: &ScaleSet, x: f64) -> f64 {
        let r = s.roots();
        (r.a1 * r.theta1 * (r.theta1 * x).exp() - r.a2 * r.theta2 * (r.theta2 * x).exp())
            / s.model().c()
    }

    #[test]
    fn boundary_values() {
        let s = baseline(0.05);
        assert!((s.w(0.0) - 1.0 / 1.2).abs() < 1e-15);
        assert_eq!(s.w(-1.0), 0.0);
        assert_eq!(s.z(-1.0), 1.0);
        assert_eq!(s.z(0.0), 1.0);
        assert_eq!(s.zbar(0.0), 0.0);
        assert_eq!(s.wbar(0.0), 0.0);
        assert!((s.zbar_shifted(0.0) - s.margin_over_q()).abs() < 1e-12);
    }

    #[test]
    fn derivative_at_zero_two_ways() {
        for (q, expect) in [(0.05, 1.05 / 1.44), (0.002, 1.002 / 1.44)] {
            let s = baseline(q);
            assert!((s.w1_at_zero() - expect).abs() < 1e-10 * expect);
            assert!((s.w1(0.0) - expect).abs() < 1e-10 * expect);
        }
        let s = baseline(0.05);
        assert!((s.w(0.0) / s.w1_at_zero() - 8.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn grouped_forms_match_naive() {
        let s = baseline(0.05);
        for &x in &[0.0, 0.3, 1.0, 4.0, 10.0] {
            let w = naive_w(&s, x);
            let w1 = naive_w1(&s, x);
            let z = 1.0 + 0.05 * s.wbar(x);
            assert!((s.w(x) - w).abs() < 1e-13 * w);
            assert!((s.z(x) - s.z_factor(x) * (s.roots().theta1 * x).exp()).abs() < 1e-12 * z);
            let ruin = w1 * z / w - 0.05 * w;
            assert!((s.ruin_bracket(x) - ruin).abs() < 1e-10, "x={x}");
            let margin = s.model().net_profit_margin();
            let deficit = z - margin * w - (s.zbar(x) - margin * s.wbar(x)) * w1 / w;
            assert!((s.deficit_bracket(x) - deficit).abs() < 1e-10, "x={x}");
            let inj = z - (s.zbar(x) + s.margin_over_q()) * 0.05 * w / z;
            assert!((s.injection_bracket(x) - inj).abs() < 1e-9, "x={x}");
            let gap = z - 0.05 * w * w / w1;
            assert!((s.reflected_exit_gap(x) - gap).abs() < 1e-10, "x={x}");
            assert!((s.zbar_shifted(x) - s.zbar(x) - s.margin_over_q()).abs() < 1e-10);
            assert!((s.w_over_w1(x) - w / w1).abs() < 1e-13);
            assert!((s.z_over_z1(x) - z / (0.05 * w)).abs() < 1e-10 * z / w);
        }
    }

    #[test]
    fn vbar_slope_matches_difference_quotient() {
        let s = baseline(0.05);
        for &x in &[0.5, 2.0, 6.0] {
            let h = 1e-5;
            let slope = (s.z_over_z1(x + h) - s.z_over_z1(x - h)) / (2.0 * h);
            let expect = s.z(x) * slope;
            assert!((s.z_times_vbar_slope(x) - expect).abs() < 1e-6 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn ratios_survive_overflow() {
        let s = baseline(0.05);
        // W_q itself overflows near x = 4700.
        assert!(s.w(6000.0).is_infinite());
        let r = s.w_ratio_pow(5000.0, 5010.0, 1.0);
        assert!((r - (-10.0 * s.phi()).exp()).abs() < 1e-12);
        let r = s.z_ratio_pow(5000.0, 5010.0, 2.0);
        assert!((r - (-20.0 * s.phi()).exp()).abs() < 1e-12);
        assert!(s.ruin_bracket(6000.0).is_finite());
    }

    #[test]
    fn z_and_zbar_against_midpoint_sums() {
        let s = baseline(0.05);
        let n = 200_000;
        let h = 3.0 / n as f64;
        let (mut int_w, mut int_z) = (0.0, 0.0);
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            int_w += naive_w(&s, x) * h;
            int_z += (1.0 + 0.05 * s.wbar(x)) * h;
        }
        assert!((s.z(3.0) - (1.0 + 0.05 * int_w)).abs() < 1e-8);
        assert!((s.zbar(3.0) - int_z).abs() < 1e-8);
    }
}
