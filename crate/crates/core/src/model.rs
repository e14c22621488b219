//! Cramér-Lundberg surplus with exponential claims.
//!
//! `X(t) = x + c t - S(t)` where `S` is compound Poisson with intensity
//! `lambda` and claim sizes `Exp(mu)`. The Laplace exponent is
//! `Psi(theta) = c theta - lambda theta / (mu + theta)` and every spectral
//! quantity used by the scale functions has a closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated model parameters. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyModel {
    c: f64,
    lambda: f64,
    mu: f64,
}

fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be strictly positive",
        });
    }
    Ok(value)
}

impl LevyModel {
    pub fn new(c: f64, lambda: f64, mu: f64) -> Result<Self> {
        Ok(Self {
            c: check_positive("c", c)?,
            lambda: check_positive("lambda", lambda)?,
            mu: check_positive("mu", mu)?,
        })
    }

    /// Premium rate per unit time.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Claim arrival intensity.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Rate of the exponential claim distribution (mean claim `1/mu`).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `Psi'(0+) = c - lambda/mu`, the net profit per unit time.
    pub fn net_profit_margin(&self) -> f64 {
        self.c - self.lambda / self.mu
    }

    /// Set when the safety loading is not positive. Such models are still
    /// accepted; ruin is then certain in the undiscounted sense.
    pub fn loading_warning(&self) -> bool {
        self.net_profit_margin() <= 0.0
    }

    /// `Psi(theta)`. Defined for `theta > -mu`; callers use `theta >= 0`.
    pub fn laplace_exponent(&self, theta: f64) -> f64 {
        self.c * theta - self.lambda * theta / (self.mu + theta)
    }

    /// Both roots of `Psi(theta) = q`, i.e. of
    /// `c theta^2 + (c mu - lambda - q) theta - q mu = 0`.
    pub fn spectral_roots(&self, q: f64) -> Result<SpectralRoots> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "discount rate must be finite and strictly positive",
            });
        }
        let (c, lambda, mu) = (self.c, self.lambda, self.mu);
        let lin = lambda + q - c * mu;
        let kappa = (c * mu - lambda - q).hypot(2.0 * (c * q * mu).sqrt());
        assert!(kappa > 0.0, "discriminant must be positive for q > 0");
        // theta1 * theta2 = -q mu / c; take the root free of cancellation first.
        let product = -q * mu / c;
        let (theta1, theta2) = if lin < 0.0 {
            let theta2 = (lin - kappa) / (2.0 * c);
            (product / theta2, theta2)
        } else {
            let theta1 = (lin + kappa) / (2.0 * c);
            (theta1, product / theta1)
        };
        let a1 = (lambda + q + c * mu) / (2.0 * kappa) + 0.5;
        Ok(SpectralRoots {
            q,
            theta1,
            theta2,
            kappa,
            a1,
            a2: a1 - 1.0,
        })
    }

    /// `Phi(q)`, the largest root of `Psi(theta) = q`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        Ok(self.spectral_roots(q)?.theta1)
    }
}

/// Roots of `Psi(theta) = q` and the coefficients of the two-exponential
/// scale function `W_q(x) = (a1 e^{theta1 x} - a2 e^{theta2 x}) / c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRoots {
    pub q: f64,
    /// `Phi(q) > 0`.
    pub theta1: f64,
    /// The negative root, in `(-mu, 0)`.
    pub theta2: f64,
    pub kappa: f64,
    pub a1: f64,
    pub a2: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p0() -> LevyModel {
        LevyModel::new(1.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn baseline_margin() {
        let m = p0();
        assert!((m.net_profit_margin() - 0.2).abs() < 1e-15);
        assert!(!m.loading_warning());
    }

    #[test]
    fn zero_loading_is_flagged_not_rejected() {
        let m = LevyModel::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(m.net_profit_margin(), 0.0);
        assert!(m.loading_warning());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            LevyModel::new(0.0, 1.0, 1.0),
            Err(Error::InvalidParameter { name: "c", .. })
        ));
        assert!(LevyModel::new(1.0, f64::NAN, 1.0).is_err());
        assert!(LevyModel::new(1.0, 1.0, f64::INFINITY).is_err());
        assert!(LevyModel::new(1.0, 1.0, -2.0).is_err());
        assert!(p0().spectral_roots(0.0).is_err());
        assert!(p0().spectral_roots(f64::NAN).is_err());
    }

    #[test]
    fn laplace_exponent_values() {
        let m = p0();
        assert_eq!(m.laplace_exponent(0.0), 0.0);
        assert!((m.laplace_exponent(1.0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn roots_at_baseline() {
        // kappa = sqrt(0.15^2 + 0.24) and the quadratic-formula roots.
        let r = p0().spectral_roots(0.05).unwrap();
        let kappa = (0.15f64 * 0.15 + 0.24).sqrt();
        assert!((r.kappa - kappa).abs() < 1e-15);
        assert!((r.kappa - 0.51235).abs() < 1e-5);
        assert!((r.theta1 - 0.15098).abs() < 1e-5);
        assert!((r.theta2 + 0.27598).abs() < 1e-5);
        assert!((r.theta1 - (-0.15 + kappa) / 2.4).abs() < 1e-14);
        assert!((r.theta2 - (-0.15 - kappa) / 2.4).abs() < 1e-14);
        assert_eq!(r.a1 - r.a2, 1.0);
        let m = p0();
        assert!((m.laplace_exponent(r.theta1) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn coefficients_match_alternative_forms() {
        let m = p0();
        for q in [1e-4, 0.002, 0.05, 0.7] {
            let r = m.spectral_roots(q).unwrap();
            let span = r.theta1 - r.theta2;
            assert!((r.a1 - (m.mu() + r.theta1) / span).abs() < 1e-12);
            assert!((r.a2 - (m.mu() + r.theta2) / span).abs() < 1e-12);
        }
    }

    #[test]
    fn theta1_matches_bisection() {
        let m = p0();
        let q = 0.002;
        let (mut lo, mut hi) = (1e-12, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m.laplace_exponent(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = m.spectral_roots(q).unwrap();
        assert!((r.theta1 - 0.5 * (lo + hi)).abs() < 1e-14);
    }

    #[test]
    fn margin_matches_finite_difference() {
        for m in [p0(), LevyModel::new(0.8, 2.0, 3.0).unwrap()] {
            let h = 1e-7;
            let fd = m.laplace_exponent(h) / h;
            assert!((fd - m.net_profit_margin()).abs() < 1e-6);
        }
    }
}
