//! Exact event-driven Monte Carlo for the taxed surplus.
//!
//! Between claims the surplus moves deterministically: it climbs at rate `c`
//! while below its tax level `L`, and once it sits at `L` both rise together
//! at `(1 - ell) c` while tax accrues at `ell c`. `L` starts at `max(x, b)`,
//! so no tax is paid before the threshold is reached, and losses carried
//! forward after a claim are recovered before tax restarts. Discounting of
//! the accrued tax over each segment is integrated in closed form, so the
//! only error sources are sampling noise and the finite horizon.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::tax_injection::InjectionProblem;
use crate::tax_terminal::TerminalProblem;

const CHUNK: u64 = 512;
pub const DEFAULT_EVENT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub paths: u64,
    /// Paths are cut at this time. See [`SimResult::bias_bound`].
    pub horizon: f64,
    pub seed: u64,
    /// Pair each path with its mirror image (`u -> 1 - u` on every uniform).
    pub antithetic: bool,
    /// Claims allowed on one path before it counts as runaway.
    pub event_cap: u64,
}

impl SimConfig {
    pub fn new(paths: u64, horizon: f64, seed: u64) -> Self {
        Self {
            paths,
            horizon,
            seed,
            antithetic: false,
            event_cap: DEFAULT_EVENT_CAP,
        }
    }

    /// A horizon after which the discount factor is `e^{-20}`.
    pub fn auto_horizon(q: f64) -> f64 {
        20.0 / q
    }

    fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 paths, got {}", self.paths)));
        }
        if self.antithetic && self.paths % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "antithetic sampling needs an even path count, got {}",
                self.paths
            )));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "horizon must be finite and positive, got {}",
                self.horizon
            )));
        }
        if self.event_cap == 0 {
            return Err(Error::InvalidConfig("event cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
    pub horizon: f64,
    /// Upper bound on `|E[estimate] - true value|` caused by the horizon.
    pub bias_bound: f64,
    /// Set when `bias_bound` exceeds a tenth of `stderr`.
    pub bias_exceeded: bool,
    /// Paths still alive at the horizon.
    pub truncated_paths: u64,
    /// Fraction of paths ruined before the horizon; absent with injections.
    pub ruin_fraction: Option<f64>,
}

impl SimResult {
    /// Does `value` lie within `k` standard errors (plus the bias bound)?
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + self.bias_bound
    }
}

/// What happens when a claim takes the surplus below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtZero {
    /// The path ends (ruin).
    Stop,
    /// The deficit is injected and the surplus restarts at zero.
    Inject,
}

/// Initial state and stopping rules for one family of paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Start {
    pub x: f64,
    /// Initial tax level `L >= x`.
    pub level: f64,
    /// Stop on first reaching this surplus.
    pub upper: Option<f64>,
    pub at_zero: AtZero,
}

impl Start {
    fn validate(&self) -> Result<()> {
        if !(self.x >= 0.0) || !self.x.is_finite() {
            return Err(Error::InvalidConfig(format!("start x = {} must be finite and >= 0", self.x)));
        }
        if !(self.level >= self.x) || !self.level.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "tax level {} must be finite and >= x = {}",
                self.level, self.x
            )));
        }
        if let Some(a) = self.upper {
            if !(a >= self.x) {
                return Err(Error::InvalidConfig(format!("upper level {a} below start {}", self.x)));
            }
        }
        Ok(())
    }
}

/// Discounted totals collected along one path.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathOutcome {
    pub tax: f64,
    /// Discounted injected capital, not yet multiplied by any cost.
    pub injections: f64,
    pub ruin: Option<Ruin>,
    /// Time at which the upper level was reached.
    pub upper_hit: Option<f64>,
    pub truncated: bool,
    pub claims: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ruin {
    pub time: f64,
    pub deficit: f64,
    /// Tax level just before ruin; the pre-ruin running maximum when the
    /// path started at its level.
    pub peak: f64,
}

/// State after each deterministic piece of motion and after each claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub time: f64,
    pub surplus: f64,
    pub level: f64,
    pub tax: f64,
    pub injections: f64,
    pub claim: bool,
}

struct Uniforms {
    rng: ChaCha8Rng,
    mirror: bool,
}

impl Uniforms {
    fn next(&mut self) -> f64 {
        let u: f64 = self.rng.sample(Open01);
        if self.mirror {
            1.0 - u
        } else {
            u
        }
    }

    fn exp(&mut self, rate: f64) -> f64 {
        -self.next().ln() / rate
    }
}

/// Path generator for a fixed model, discount rate and tax rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulator {
    model: LevyModel,
    q: f64,
    ell: f64,
}

impl Simulator {
    pub fn new(model: LevyModel, q: f64, ell: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                reason: "discount rate must be finite and strictly positive",
            });
        }
        crate::tax_terminal::check_tax_rate(ell)?;
        Ok(Self { model, q, ell })
    }

    /// `∫_t^{t+d} ell c e^{-q s} ds`.
    fn tax_accrual(&self, t: f64, d: f64) -> f64 {
        self.ell * self.model.c() * (-self.q * t).exp() * (-(-self.q * d).exp_m1()) / self.q
    }

    /// Path number `stream` of the family seeded by `seed`, as used by
    /// [`Simulator::estimate`].
    pub fn run_path(&self, start: &Start, horizon: f64, event_cap: u64, seed: u64, stream: u64) -> Result<PathOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut u = Uniforms { rng, mirror: false };
        self.path_with(start, horizon, event_cap, &mut u, stream, None)
    }

    /// As [`Simulator::run_path`], also returning the sequence of states.
    pub fn trace_path(&self, start: &Start, horizon: f64, event_cap: u64, seed: u64, stream: u64) -> Result<(PathOutcome, Vec<TracePoint>)> {
        start.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut u = Uniforms { rng, mirror: false };
        let mut trace = Vec::new();
        let out = self.path_with(start, horizon, event_cap, &mut u, stream, Some(&mut trace))?;
        Ok((out, trace))
    }

    fn path_with(
        &self,
        start: &Start,
        horizon: f64,
        event_cap: u64,
        u: &mut Uniforms,
        path: u64,
        mut trace: Option<&mut Vec<TracePoint>>,
    ) -> Result<PathOutcome> {
        let c = self.model.c();
        let climb = (1.0 - self.ell) * c;
        let upper = start.upper.unwrap_or(f64::INFINITY);
        let mut out = PathOutcome::default();
        let (mut t, mut x, mut level) = (0.0f64, start.x, start.level);
        let mut record = |t: f64, x: f64, level: f64, out: &PathOutcome, claim: bool| {
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TracePoint {
                    time: t,
                    surplus: x,
                    level,
                    tax: out.tax,
                    injections: out.injections,
                    claim,
                });
            }
        };
        record(t, x, level, &out, false);
        if x >= upper {
            out.upper_hit = Some(0.0);
            return Ok(out);
        }
        loop {
            let gap = u.exp(self.model.lambda());
            let next_claim = t + gap;
            let stop_at = next_claim.min(horizon);
            // Deterministic motion until `stop_at`.
            while t < stop_at {
                let d = stop_at - t;
                if x < level {
                    let target = level.min(upper);
                    let dt = (target - x) / c;
                    if dt >= d {
                        x += c * d;
                        t = stop_at;
                    } else {
                        x = target;
                        t += dt;
                    }
                    record(t, x, level, &out, false);
                    if x >= upper {
                        out.upper_hit = Some(t);
                        return Ok(out);
                    }
                } else {
                    let to_upper = (upper - x) / climb;
                    if to_upper <= d {
                        out.tax += self.tax_accrual(t, to_upper);
                        t += to_upper;
                        record(t, upper, upper, &out, false);
                        out.upper_hit = Some(t);
                        return Ok(out);
                    }
                    out.tax += self.tax_accrual(t, d);
                    x += climb * d;
                    level = x;
                    t = stop_at;
                    record(t, x, level, &out, false);
                }
            }
            if next_claim > horizon {
                out.truncated = true;
                return Ok(out);
            }
            out.claims += 1;
            if out.claims > event_cap {
                return Err(Error::EventCapExceeded { path, cap: event_cap });
            }
            t = next_claim;
            x -= u.exp(self.model.mu());
            if x < 0.0 {
                match start.at_zero {
                    AtZero::Stop => {
                        record(t, x, level, &out, true);
                        out.ruin = Some(Ruin {
                            time: t,
                            deficit: -x,
                            peak: level,
                        });
                        return Ok(out);
                    }
                    AtZero::Inject => {
                        out.injections += -x * (-self.q * t).exp();
                        x = 0.0;
                    }
                }
            }
            record(t, x, level, &out, true);
        }
    }

    /// Averages `score` over `cfg.paths` paths. Deterministic for a given
    /// seed regardless of the thread count.
    pub fn estimate<F>(&self, start: &Start, cfg: &SimConfig, bias_bound: f64, score: F) -> Result<SimResult>
    where
        F: Fn(&PathOutcome) -> f64 + Sync,
    {
        cfg.validate()?;
        start.validate()?;
        // With antithetic pairs the sampling unit is the pair average.
        let units = if cfg.antithetic { cfg.paths / 2 } else { cfg.paths };
        let chunks = units.div_ceil(CHUNK);
        let partials: Vec<Result<Moments>> = (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut m = Moments::default();
                for unit in k * CHUNK..((k + 1) * CHUNK).min(units) {
                    let one = |mirror: bool| -> Result<PathOutcome> {
                        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                        rng.set_stream(unit);
                        let mut u = Uniforms { rng, mirror };
                        self.path_with(start, cfg.horizon, cfg.event_cap, &mut u, unit, None)
                    };
                    let first = one(false)?;
                    m.count(&first);
                    let value = if cfg.antithetic {
                        let second = one(true)?;
                        m.count(&second);
                        0.5 * (score(&first) + score(&second))
                    } else {
                        score(&first)
                    };
                    m.push(value);
                }
                Ok(m)
            })
            .collect();
        let mut total = Moments::default();
        for part in partials {
            total.merge(&part?);
        }
        let stderr = (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt();
        Ok(SimResult {
            mean: total.mean,
            stderr,
            paths: cfg.paths,
            horizon: cfg.horizon,
            bias_bound,
            bias_exceeded: bias_bound > 0.1 * stderr,
            truncated_paths: total.truncated,
            ruin_fraction: match start.at_zero {
                AtZero::Stop => Some(total.ruined as f64 / cfg.paths as f64),
                AtZero::Inject => None,
            },
        })
    }

    fn discount(&self, t: f64) -> f64 {
        (-self.q * t).exp()
    }

    fn horizon_factor(&self, horizon: f64) -> f64 {
        (-self.q * horizon).exp()
    }

    /// Tax that could still be collected after the horizon, discounted.
    fn tax_after(&self, horizon: f64) -> f64 {
        self.horizon_factor(horizon) * self.ell * self.model.c() / self.q
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    truncated: u64,
    ruined: u64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn count(&mut self, o: &PathOutcome) {
        self.truncated += o.truncated as u64;
        self.ruined += o.ruin.is_some() as u64;
    }

    fn merge(&mut self, o: &Moments) {
        self.truncated += o.truncated;
        self.ruined += o.ruined;
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            self.n = o.n;
            self.mean = o.mean;
            self.m2 = o.m2;
            return;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        self.mean += delta * o.n as f64 / n as f64;
        self.m2 += o.m2 + delta * delta * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }
}

/// Estimates `phi(x0; b)` for the terminal-value problem.
pub fn simulate_terminal(problem: &TerminalProblem, b: f64, cfg: &SimConfig) -> Result<SimResult> {
    let model = *problem.scale().model();
    let sim = Simulator::new(model, problem.scale().q(), problem.ell())?;
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain("simulate_terminal", format!("threshold {b} must be finite and >= 0")));
    }
    let x = problem.x0();
    let start = Start {
        x,
        level: b.max(x),
        upper: None,
        at_zero: AtZero::Stop,
    };
    let s = problem.s_terminal();
    let bias = sim.tax_after(cfg.horizon) + sim.horizon_factor(cfg.horizon) * s.abs();
    sim.estimate(&start, cfg, bias, |o| {
        o.tax + o.ruin.map_or(0.0, |r| s * sim.discount(r.time))
    })
}

/// Estimates `phibar(x0; a)` for the injection problem.
pub fn simulate_injection(problem: &InjectionProblem, a: f64, cfg: &SimConfig) -> Result<SimResult> {
    let model = *problem.scale().model();
    let sim = Simulator::new(model, problem.scale().q(), problem.ell())?;
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::domain("simulate_injection", format!("threshold {a} must be finite and >= 0")));
    }
    let x = problem.x0();
    let start = Start {
        x,
        level: a.max(x),
        upper: None,
        at_zero: AtZero::Inject,
    };
    let varphi = problem.varphi();
    let future_injections = sim.horizon_factor(cfg.horizon) * model.lambda() / (model.mu() * sim.q);
    let bias = sim.tax_after(cfg.horizon) + varphi * future_injections;
    sim.estimate(&start, cfg, bias, |o| o.tax - varphi * o.injections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::ScaleSet;

    fn model() -> LevyModel {
        LevyModel::new(1.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn config_validation() {
        let sim = Simulator::new(model(), 0.05, 0.1).unwrap();
        let start = Start {
            x: 1.0,
            level: 1.0,
            upper: Some(2.0),
            at_zero: AtZero::Stop,
        };
        let score = |_: &PathOutcome| 0.0;
        assert!(sim.estimate(&start, &SimConfig::new(1, 10.0, 0), 0.0, score).is_err());
        assert!(sim.estimate(&start, &SimConfig::new(10, 0.0, 0), 0.0, score).is_err());
        let mut odd = SimConfig::new(11, 10.0, 0);
        odd.antithetic = true;
        assert!(sim.estimate(&start, &odd, 0.0, score).is_err());
        let bad = Start { level: 0.5, ..start };
        assert!(sim.estimate(&bad, &SimConfig::new(10, 10.0, 0), 0.0, score).is_err());
        assert!(Simulator::new(model(), 0.0, 0.1).is_err());
    }

    #[test]
    fn deterministic_for_seed() {
        let scale = ScaleSet::new(model(), 0.05).unwrap();
        let p = TerminalProblem::new(scale, 0.1, -2.0, 1.0).unwrap();
        let cfg = SimConfig::new(2000, 200.0, 7);
        let a = simulate_terminal(&p, 1.5, &cfg).unwrap();
        let b = simulate_terminal(&p, 1.5, &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_terminal(&p, 1.5, &SimConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn start_at_upper_level() {
        let sim = Simulator::new(model(), 0.05, 0.1).unwrap();
        let start = Start {
            x: 2.0,
            level: 2.0,
            upper: Some(2.0),
            at_zero: AtZero::Inject,
        };
        let o = sim.run_path(&start, 10.0, 10, 1, 0).unwrap();
        assert_eq!(o.upper_hit, Some(0.0));
        assert_eq!(o.tax, 0.0);
    }

    #[test]
    fn no_claims_before_short_horizon_means_pure_drift() {
        // With a tiny horizon almost no path sees a claim: tax is the
        // deterministic accrual and the start level is respected.
        let sim = Simulator::new(model(), 0.05, 0.3).unwrap();
        let start = Start {
            x: 1.0,
            level: 1.0,
            upper: None,
            at_zero: AtZero::Stop,
        };
        let h = 1e-3;
        let r = sim
            .estimate(&start, &SimConfig::new(200, h, 3), 0.0, |o| o.tax)
            .unwrap();
        let accrual = 0.3 * 1.2 * (1.0 - (-0.05f64 * h).exp()) / 0.05;
        assert!((r.mean - accrual).abs() < 2e-3 * accrual);
        let delayed = Start { level: 5.0, ..start };
        let r = sim
            .estimate(&delayed, &SimConfig::new(200, h, 3), 0.0, |o| o.tax)
            .unwrap();
        assert_eq!(r.mean, 0.0);
    }

    #[test]
    fn event_cap_is_enforced() {
        let sim = Simulator::new(model(), 0.05, 0.1).unwrap();
        let start = Start {
            x: 0.0,
            level: 0.0,
            upper: None,
            at_zero: AtZero::Inject,
        };
        let mut cfg = SimConfig::new(4, 1e4, 1);
        cfg.event_cap = 5;
        let err = sim.estimate(&start, &cfg, 0.0, |o| o.tax).unwrap_err();
        assert!(matches!(err, Error::EventCapExceeded { cap: 5, .. }));
    }

    #[test]
    fn traced_paths_are_legal() {
        let ell = 0.3;
        let sim = Simulator::new(model(), 0.05, ell).unwrap();
        for (at_zero, level) in [(AtZero::Stop, 2.0), (AtZero::Inject, 1.5)] {
            let start = Start { x: 0.5, level, upper: None, at_zero };
            for stream in 0..50 {
                let (out, trace) = sim.trace_path(&start, 200.0, 1_000_000, 4, stream).unwrap();
                assert_eq!(trace.last().unwrap().tax, out.tax);
                for w in trace.windows(2) {
                    let (p, n) = (w[0], w[1]);
                    let dt = n.time - p.time;
                    assert!(dt >= 0.0);
                    assert!(n.level >= p.level && n.surplus <= n.level + 1e-12);
                    if n.claim {
                        assert_eq!(dt, 0.0);
                        assert_eq!(n.tax, p.tax);
                    } else {
                        assert!(n.surplus - p.surplus <= 1.2 * dt + 1e-9);
                        assert_eq!(n.injections, p.injections);
                        if n.tax > p.tax {
                            // Tax only accrues while sitting at the level.
                            assert_eq!(p.surplus, p.level);
                            assert!(n.surplus - p.surplus <= (1.0 - ell) * 1.2 * dt + 1e-9);
                        }
                    }
                    if at_zero == AtZero::Inject {
                        assert!(n.surplus >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn ruin_fraction_only_in_terminal_mode() {
        let scale = ScaleSet::new(model(), 0.05).unwrap();
        let p = TerminalProblem::new(scale, 0.1, 0.0, 1.0).unwrap();
        let r = simulate_terminal(&p, 0.0, &SimConfig::new(1000, 400.0, 2)).unwrap();
        let f = r.ruin_fraction.unwrap();
        assert!(f > 0.0 && f < 1.0);
        let p = InjectionProblem::new(scale, 0.1, 1.5, 1.0).unwrap();
        let r = simulate_injection(&p, 0.0, &SimConfig::new(100, 50.0, 2)).unwrap();
        assert!(r.ruin_fraction.is_none());
    }

    #[test]
    fn untaxed_without_terminal_value_is_exactly_zero() {
        let scale = ScaleSet::new(model(), 0.05).unwrap();
        let p = TerminalProblem::new(scale, 0.0, 0.0, 1.0).unwrap();
        let r = simulate_terminal(&p, 0.0, &SimConfig::new(500, 100.0, 1)).unwrap();
        assert_eq!((r.mean, r.stderr), (0.0, 0.0));
        assert!(!r.bias_exceeded);
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let values: Vec<f64> = (0..37).map(|i| ((i * 7919) % 101) as f64 / 10.0).collect();
        let mut all = Moments::default();
        values.iter().for_each(|&v| all.push(v));
        let mut left = Moments::default();
        let mut right = Moments::default();
        values[..11].iter().for_each(|&v| left.push(v));
        values[11..].iter().for_each(|&v| right.push(v));
        left.merge(&right);
        assert!((left.mean - all.mean).abs() < 1e-12);
        assert!((left.m2 - all.m2).abs() < 1e-9);
    }

    #[test]
    fn bias_flag_follows_horizon() {
        let scale = ScaleSet::new(model(), 0.05).unwrap();
        let p = TerminalProblem::new(scale, 0.1, 0.0, 1.0).unwrap();
        let short = simulate_terminal(&p, 0.0, &SimConfig::new(400, 5.0, 1)).unwrap();
        assert!(short.bias_exceeded);
        let long = simulate_terminal(&p, 0.0, &SimConfig::new(400, 600.0, 1)).unwrap();
        assert!(!long.bias_exceeded);
    }
}
