//! One run of either control problem, as described on the command line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::scale::ScaleSet;
use crate::tax_injection::InjectionProblem;
use crate::tax_terminal::{OptimumReport, TerminalProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Terminal,
    Injection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub c: f64,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
    pub ell: f64,
    /// Terminal value, terminal mode only.
    pub s_terminal: Option<f64>,
    /// Injection cost, injection mode only.
    pub varphi: Option<f64>,
    pub x0: f64,
    /// Accept `varphi <= 1`.
    pub allow_low_cost: bool,
}

/// A validated problem of either kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    Terminal(TerminalProblem),
    Injection(InjectionProblem),
}

impl Problem {
    pub fn optimize(&self) -> Result<OptimumReport> {
        match self {
            Problem::Terminal(p) => p.optimize(),
            Problem::Injection(p) => p.optimize(),
        }
    }

    /// `h(threshold)` or `hbar(threshold)`.
    pub fn h(&self, threshold: f64) -> Result<f64> {
        match self {
            Problem::Terminal(p) => p.h_terminal(threshold),
            Problem::Injection(p) => p.h_bar(threshold),
        }
    }

    /// Objective at the initial surplus for a given threshold.
    pub fn value(&self, threshold: f64) -> Result<f64> {
        match self {
            Problem::Terminal(p) => p.phi_value(p.x0(), threshold),
            Problem::Injection(p) => p.phi_bar_value(p.x0(), threshold),
        }
    }

    pub fn scale(&self) -> &ScaleSet {
        match self {
            Problem::Terminal(p) => p.scale(),
            Problem::Injection(p) => p.scale(),
        }
    }
}

impl RunConfig {
    /// Baseline model `c = 1.2, lambda = mu = 1`, `q = 0.05`, `ell = 0.1`,
    /// `x0 = 1`, with `S = 0` or `varphi = 1.5`.
    pub fn baseline(mode: Mode) -> Self {
        Self {
            mode,
            c: 1.2,
            lambda: 1.0,
            mu: 1.0,
            q: 0.05,
            ell: 0.1,
            s_terminal: (mode == Mode::Terminal).then_some(0.0),
            varphi: (mode == Mode::Injection).then_some(1.5),
            x0: 1.0,
            allow_low_cost: false,
        }
    }

    pub fn model(&self) -> Result<LevyModel> {
        LevyModel::new(self.c, self.lambda, self.mu)
    }

    pub fn scale(&self) -> Result<ScaleSet> {
        ScaleSet::new(self.model()?, self.q)
    }

    pub fn problem(&self) -> Result<Problem> {
        let scale = self.scale()?;
        match self.mode {
            Mode::Terminal => {
                if self.varphi.is_some() {
                    return Err(Error::InvalidConfig("varphi applies to injection mode only".into()));
                }
                let s = self.s_terminal.unwrap_or(0.0);
                Ok(Problem::Terminal(TerminalProblem::new(scale, self.ell, s, self.x0)?))
            }
            Mode::Injection => {
                if self.s_terminal.is_some() {
                    return Err(Error::InvalidConfig("S applies to terminal mode only".into()));
                }
                let varphi = self
                    .varphi
                    .ok_or_else(|| Error::InvalidConfig("injection mode needs varphi".into()))?;
                let p = if self.allow_low_cost {
                    InjectionProblem::new_exploratory(scale, self.ell, varphi, self.x0)?
                } else {
                    InjectionProblem::new(scale, self.ell, varphi, self.x0)?
                };
                Ok(Problem::Injection(p))
            }
        }
    }

    /// Copy with one parameter replaced.
    pub fn with(&self, param: Param, value: f64) -> Result<Self> {
        let mut out = *self;
        match param {
            Param::C => out.c = value,
            Param::Lambda => out.lambda = value,
            Param::Mu => out.mu = value,
            Param::Q => out.q = value,
            Param::Ell => out.ell = value,
            Param::X => out.x0 = value,
            Param::S => {
                if self.mode != Mode::Terminal {
                    return Err(Error::InvalidConfig("S can only be swept in terminal mode".into()));
                }
                out.s_terminal = Some(value);
            }
            Param::Varphi => {
                if self.mode != Mode::Injection {
                    return Err(Error::InvalidConfig("varphi can only be swept in injection mode".into()));
                }
                out.varphi = Some(value);
            }
        }
        Ok(out)
    }
}

/// Scalar inputs that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Param {
    C,
    Lambda,
    Mu,
    Q,
    Ell,
    S,
    Varphi,
    X,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::C => "c",
            Param::Lambda => "lambda",
            Param::Mu => "mu",
            Param::Q => "q",
            Param::Ell => "ell",
            Param::S => "S",
            Param::Varphi => "varphi",
            Param::X => "x",
        }
    }
}

impl std::str::FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "c" => Param::C,
            "lambda" => Param::Lambda,
            "mu" => Param::Mu,
            "q" => Param::Q,
            "ell" => Param::Ell,
            "S" | "s" => Param::S,
            "varphi" => Param::Varphi,
            "x" => Param::X,
            _ => return Err(Error::InvalidConfig(format!("unknown parameter `{s}`"))),
        })
    }
}
