//! Command-line front end. Every subcommand is a thin shell over a library
//! call; [`run`] returns the process exit code.

pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Mode, Param, RunConfig};
use crate::error::Error;
use crate::simulate::{simulate_injection, simulate_terminal, SimConfig};
use crate::sweep::{sign_grid, sweep};
use crate::tables::reproduce_table;
use crate::validate::{run_validation, Status};
use crate::Problem;
use format::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "taxdelay", version, about = "Optimal tax implementation thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal threshold and value for one problem.
    #[command(allow_negative_numbers = true)]
    Optimize {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Affine optimality condition at zero for one of the three tables.
    Reproduce {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=3))]
        table: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal threshold along a parameter grid, or the sign of h(0) over
    /// an (S, q) grid when --q-steps is given.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "S")]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, requires_all = ["q_to", "q_steps"])]
        q_from: Option<f64>,
        #[arg(long)]
        q_to: Option<f64>,
        #[arg(long)]
        q_steps: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of the objective next to its closed form.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Terminal-mode threshold (default: the optimal one).
        #[arg(long)]
        b: Option<f64>,
        /// Injection-mode threshold (default: the optimal one).
        #[arg(long)]
        a: Option<f64>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Self-check against published values, identities and simulation.
    Validate {
        #[arg(long, default_value_t = 20_000)]
        paths: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Terminal,
    Injection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "terminal")]
    mode: ModeArg,
    /// Premium rate.
    #[arg(long)]
    c: f64,
    /// Claim intensity.
    #[arg(long)]
    lambda: f64,
    /// Exponential claim rate.
    #[arg(long)]
    mu: f64,
    /// Discount rate.
    #[arg(long)]
    q: f64,
    /// Tax rate in [0, 1).
    #[arg(long)]
    ell: f64,
    /// Terminal value at ruin (terminal mode).
    #[arg(long = "S")]
    s: Option<f64>,
    /// Cost per unit of injected capital (injection mode).
    #[arg(long)]
    varphi: Option<f64>,
    /// Initial surplus.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    /// Accept varphi <= 1.
    #[arg(long)]
    allow_low_cost: bool,
}

impl ModelArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            mode: match self.mode {
                ModeArg::Terminal => Mode::Terminal,
                ModeArg::Injection => Mode::Injection,
            },
            c: self.c,
            lambda: self.lambda,
            mu: self.mu,
            q: self.q,
            ell: self.ell,
            s_terminal: self.s,
            varphi: self.varphi,
            x0: self.x,
            allow_low_cost: self.allow_low_cost,
        }
    }
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long, default_value_t = 100_000)]
    paths: u64,
    /// Simulation horizon (default 20/q).
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    antithetic: bool,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits for numbers.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
}

/// Failure of a subcommand, already mapped to an exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERIC },
            message: e.to_string(),
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

struct Outcome {
    table: Table,
    warnings: Vec<String>,
    code: i32,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self {
            table,
            warnings: Vec::new(),
            code: EXIT_OK,
        }
    }
}

fn cmd_optimize(model: &ModelArgs) -> Result<Outcome, Failure> {
    let problem = model.config().problem()?;
    let report = problem.optimize()?;
    let mut table = Table::new(vec![
        "mode",
        "threshold",
        "boundary_case",
        "value",
        "h_residual",
        "iterations",
    ]);
    let mode = match problem {
        Problem::Terminal(_) => "terminal",
        Problem::Injection(_) => "injection",
    };
    let (residual, iterations) = match report.root_diag {
        Some(d) => (d.residual, d.iterations as u64),
        None => (problem.h(report.threshold)?, 0),
    };
    table.push(vec![
        mode.into(),
        report.threshold.into(),
        report.boundary_case.into(),
        report.value.into(),
        residual.into(),
        iterations.into(),
    ]);
    let mut out = Outcome::ok(table);
    if problem.scale().model().loading_warning() {
        out.warnings.push("net profit margin c - lambda/mu is not positive".into());
    }
    Ok(out)
}

fn cmd_reproduce(id: u32) -> Result<Outcome, Failure> {
    let rows = reproduce_table(id)?;
    let mut table = Table::new(vec!["ell", "intercept", "slope", "rhs_intercept", "rhs_slope", "threshold"]);
    for r in rows {
        table.push(vec![
            r.ell.into(),
            r.intercept.into(),
            r.slope.into(),
            r.rhs_intercept.into(),
            r.rhs_slope.into(),
            r.threshold.into(),
        ]);
    }
    Ok(Outcome::ok(table))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    model: &ModelArgs,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    q_grid: Option<(f64, f64, usize)>,
) -> Result<Outcome, Failure> {
    let base = model.config();
    let param: Param = param.parse()?;
    if let Some(q) = q_grid {
        if param != Param::S {
            return Err(input_failure("the (S, q) grid sweeps --param S"));
        }
        let cells = sign_grid(&base, (from, to, steps), q)?;
        let mut table = Table::new(vec!["S", "q", "h0", "positive"]);
        for c in cells {
            table.push(vec![c.s.into(), c.q.into(), c.h0.into(), c.positive.into()]);
        }
        return Ok(Outcome::ok(table));
    }
    let rows = sweep(&base, param, from, to, steps)?;
    let mut table = Table::new(vec![param.name(), "threshold", "value", "boundary_case", "h0"]);
    for r in rows {
        table.push(vec![
            r.param.into(),
            r.threshold.into(),
            r.value.into(),
            r.boundary_case.into(),
            r.h0.into(),
        ]);
    }
    Ok(Outcome::ok(table))
}

fn cmd_simulate(model: &ModelArgs, b: Option<f64>, a: Option<f64>, sim: &SimArgs) -> Result<Outcome, Failure> {
    let cfg = model.config();
    let problem = cfg.problem()?;
    let threshold_arg = match (problem, b, a) {
        (Problem::Terminal(_), _, Some(_)) => return Err(input_failure("--a applies to injection mode")),
        (Problem::Injection(_), Some(_), _) => return Err(input_failure("--b applies to terminal mode")),
        (_, b, a) => b.or(a),
    };
    let threshold = match threshold_arg {
        Some(t) => t,
        None => problem.optimize()?.threshold,
    };
    let horizon = sim.horizon.unwrap_or_else(|| SimConfig::auto_horizon(cfg.q));
    let mut sim_cfg = SimConfig::new(sim.paths, horizon, sim.seed);
    sim_cfg.antithetic = sim.antithetic;
    let (mc, analytic) = match problem {
        Problem::Terminal(p) => (simulate_terminal(&p, threshold, &sim_cfg)?, p.phi_value(p.x0(), threshold)?),
        Problem::Injection(p) => (simulate_injection(&p, threshold, &sim_cfg)?, p.phi_bar_value(p.x0(), threshold)?),
    };
    let z = if mc.stderr > 0.0 {
        (mc.mean - analytic) / mc.stderr
    } else if mc.mean == analytic {
        0.0
    } else {
        f64::NAN
    };
    let mut table = Table::new(vec![
        "threshold",
        "mean",
        "stderr",
        "paths",
        "horizon",
        "bias_bound",
        "bias_exceeded",
        "ruin_fraction",
        "analytic",
        "z_score",
    ]);
    table.push(vec![
        threshold.into(),
        mc.mean.into(),
        mc.stderr.into(),
        mc.paths.into(),
        mc.horizon.into(),
        mc.bias_bound.into(),
        mc.bias_exceeded.into(),
        mc.ruin_fraction.into(),
        analytic.into(),
        z.into(),
    ]);
    let mut out = Outcome::ok(table);
    if mc.bias_exceeded {
        out.warnings.push(format!(
            "horizon bias bound {} exceeds a tenth of the standard error {}; increase --horizon",
            format::format_sig(mc.bias_bound, 3),
            format::format_sig(mc.stderr, 3)
        ));
    }
    Ok(out)
}

fn cmd_validate(paths: u64, seed: u64) -> Result<Outcome, Failure> {
    let checks = run_validation(paths, seed)?;
    let failed = checks.iter().any(|c| c.status == Status::Fail);
    let mut table = Table::new(vec!["check", "status", "detail"]);
    for c in checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        };
        table.push(vec![c.name.into(), status.into(), c.detail.into()]);
    }
    let mut out = Outcome::ok(table);
    if failed {
        out.code = EXIT_NUMERIC;
        out.warnings.push("validation failed".into());
    }
    Ok(out)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let (result, output) = match &cli.command {
        Command::Optimize { model, output } => (cmd_optimize(model), output),
        Command::Reproduce { table, output } => (cmd_reproduce(*table), output),
        Command::Sweep {
            model,
            param,
            from,
            to,
            steps,
            q_from,
            q_to,
            q_steps,
            output,
        } => {
            let q_grid = match (q_from, q_to, q_steps) {
                (Some(f), Some(t), Some(s)) => Some((*f, *t, *s)),
                _ => None,
            };
            (cmd_sweep(model, param, *from, *to, *steps, q_grid), output)
        }
        Command::Simulate { model, b, a, sim, output } => (cmd_simulate(model, *b, *a, sim), output),
        Command::Validate { paths, seed, output } => (cmd_validate(*paths, *seed), output),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let digits = output.precision as usize;
    let text = match output.format {
        FormatArg::Csv => outcome.table.to_csv(digits),
        FormatArg::Json => outcome.table.to_json(digits),
    };
    let written = match &output.out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    outcome.code
}
