//! Command-line front end.
//!
//! Exit codes: 0 on success (including plans that are computed but
//! infeasible), 1 on usage or configuration errors, 2 on numerical failure.

mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, PriorSpec, RawConfig, RunConfig, DEFAULT_DRAWS, DEFAULT_SEED};
pub use report::{Cell, Layout, Report};

use crate::design::{algorithm_one_budgets, criteria, sample_prior, CostModel, PriorSample, SearchSettings};
use crate::error::{Error, Result};
use crate::expectations::{expected_duration, expected_failures};
use crate::fisher::{fisher_uhcs, log_det};
use crate::lifetime::LogNormalParams;
use crate::numerics::QuadratureSpec;
use crate::scheme::{simulate, simulate_summary, SchemeParams};

#[derive(Debug, Parser)]
#[command(name = "uhcs", version, about = "Bayesian planning of unified hybrid censored life tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prior hyperparameters from moments of μ and τ.
    Elicit(Flags),
    /// Prior-averaged criteria and cost of a given plan.
    Evaluate(Flags),
    /// Optimal plans for one or more budgets.
    Optimize(Flags),
    /// Simulate experiments under a plan.
    Simulate(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Flat key = value configuration file; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "MU,VARMU,TAU,VARTAU", allow_hyphen_values = true)]
    prior_moments: Option<String>,
    #[arg(long, value_name = "A1,B1,P2,Q2", allow_hyphen_values = true)]
    prior_hyper: Option<String>,
    /// Cost per failure and per unit time.
    #[arg(long, value_name = "CF,CT")]
    cost: Option<String>,
    /// Comma-separated budgets.
    #[arg(long, value_name = "LIST")]
    budget: Option<String>,
    /// Fixed sample size.
    #[arg(long = "n", value_name = "FIXED", conflicts_with = "n_max")]
    n: Option<String>,
    /// Search sample sizes 2..=MAX.
    #[arg(long, value_name = "MAX")]
    n_max: Option<String>,
    #[arg(long, value_name = "N,R,L,T1,T2")]
    scheme: Option<String>,
    /// Prior draws used for Monte Carlo averaging.
    #[arg(long, value_name = "N")]
    draws: Option<String>,
    #[arg(long, value_name = "S")]
    seed: Option<String>,
    /// Simulation replicates.
    #[arg(long, value_name = "R")]
    reps: Option<String>,
    /// Search mode: free or linked:KAPPA.
    #[arg(long, value_name = "MODE")]
    search: Option<String>,
    /// Output format: table, csv or json.
    #[arg(long, value_name = "FORMAT")]
    format: Option<String>,
    /// Fixed (μ, τ) for simulation and diagnostics instead of the prior mean.
    #[arg(long, value_name = "MU,TAU", allow_hyphen_values = true)]
    theta: Option<String>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let pairs = [
            ("prior_moments", self.prior_moments),
            ("prior_hyper", self.prior_hyper),
            ("cost", self.cost),
            ("budget", self.budget),
            ("n", self.n),
            ("n_max", self.n_max),
            ("scheme", self.scheme),
            ("draws", self.draws),
            ("seed", self.seed),
            ("reps", self.reps),
            ("search", self.search),
            ("format", self.format),
            ("theta", self.theta),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v);
            }
        }
        raw.resolve()
    }
}

/// Runs the CLI with the given arguments and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() || matches!(e, Error::Inconsistent(_)) {
        2
    } else {
        1
    }
}

fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Elicit(f) => cmd_elicit(&f.into_config()?),
        Command::Evaluate(f) => cmd_evaluate(&f.into_config()?),
        Command::Optimize(f) => cmd_optimize(&f.into_config()?),
        Command::Simulate(f) => cmd_simulate(&f.into_config()?),
    }
}

fn require<T: Clone>(value: &Option<T>, flag: &str, command: &str) -> Result<T> {
    value.clone().ok_or_else(|| Error::Config(format!("{command} needs --{flag}")))
}

fn prior_sample(cfg: &RunConfig, command: &str) -> Result<PriorSample> {
    let prior = require(&cfg.prior, "prior-moments or --prior-hyper", command)?.resolve()?;
    sample_prior(&prior, cfg.draws, cfg.seed)
}

fn cost_models(cfg: &RunConfig, command: &str) -> Result<Vec<CostModel>> {
    let (c_f, c_t) = require(&cfg.cost, "cost", command)?;
    if cfg.budgets.is_empty() {
        return Err(Error::Config(format!("{command} needs --budget")));
    }
    cfg.budgets.iter().map(|&b| CostModel::new(c_f, c_t, b)).collect()
}

fn scheme_cells(s: &SchemeParams) -> Vec<Cell> {
    vec![
        Cell::Int(s.n as u64),
        Cell::Int(s.r as u64),
        Cell::Int(s.l as u64),
        Cell::Float(s.t1),
        Cell::Float(s.t2),
    ]
}

pub fn cmd_elicit(cfg: &RunConfig) -> Result<String> {
    let p = match cfg.prior {
        Some(spec @ PriorSpec::Moments { .. }) => spec.resolve()?,
        _ => return Err(Error::Config("elicit needs --prior-moments".into())),
    };
    if cfg.format == Format::Table {
        return Ok(format!("a1={:.6} b1={:.6} p2={:.6} q2={:.6}\n", p.a1(), p.b1(), p.p2(), p.q2()));
    }
    let mut r = Report::new(vec!["a1", "b1", "p2", "q2"], Layout::Columns);
    r.push([p.a1(), p.b1(), p.p2(), p.q2()].into_iter().map(Cell::Float).collect());
    Ok(r.render(cfg.format, None, None))
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<String> {
    let scheme = require(&cfg.scheme, "scheme", "evaluate")?;
    let sample = prior_sample(cfg, "evaluate")?;
    let costs = cost_models(cfg, "evaluate")?;
    let [cost] = costs[..] else {
        return Err(Error::Config("evaluate takes a single --budget".into()));
    };
    let spec = QuadratureSpec::default();
    let c = criteria(&scheme, &sample, &spec)?;
    let theta = match cfg.theta {
        Some(t) => t,
        None => require(&cfg.prior, "prior-moments or --prior-hyper", "evaluate")?.resolve()?.mean(),
    };
    let info = fisher_uhcs(&scheme, theta, &spec)?;
    let exp_cost = c.cost(&cost);

    let mut columns = vec!["n", "r", "l", "t1", "t2"];
    columns.extend([
        "psi", "psi_se", "psi_fail", "psi_dur", "exp_cost", "budget", "feasible", "theta_mu", "theta_tau",
        "exp_failures_at_theta", "exp_duration_at_theta", "info_mu_mu", "info_tau_tau", "info_mu_tau",
        "log_det_at_theta",
    ]);
    let mut r = Report::new(columns, Layout::Vertical);
    let mut row = scheme_cells(&scheme);
    row.extend([
        Cell::Float(c.psi),
        Cell::Float(c.psi_se),
        Cell::Float(c.psi_fail),
        Cell::Float(c.psi_dur),
        Cell::Float(exp_cost),
        Cell::Float(cost.c_b()),
        Cell::Bool(cost.within_budget(exp_cost)),
        Cell::Float(theta.mu()),
        Cell::Float(theta.tau()),
        Cell::Float(expected_failures(&scheme, theta)?),
        Cell::Float(expected_duration(&scheme, theta, &spec)?),
        Cell::Float(info.i_mm),
        Cell::Float(info.i_tt),
        Cell::Float(info.i_mt),
        Cell::Float(log_det(&info)?),
    ]);
    r.push(row);
    Ok(r.render(cfg.format, Some(cfg.seed), Some(cfg.draws)))
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<String> {
    let sizes = cfg
        .sizes
        .clone()
        .ok_or_else(|| Error::Config("optimize needs --n or --n-max".into()))?;
    let sample = prior_sample(cfg, "optimize")?;
    let costs = cost_models(cfg, "optimize")?;
    let settings = SearchSettings { mode: cfg.search, ..SearchSettings::default() };
    let solutions = algorithm_one_budgets(&sizes, &sample, &costs, &settings)?;

    let mut columns = vec!["n", "r", "l", "t1", "t2"];
    columns.extend(["objective", "objective_se", "exp_failures", "exp_duration", "exp_cost", "budget", "feasible"]);
    let mut r = Report::new(columns, Layout::Columns);
    for (sol, cost) in solutions.iter().zip(&costs) {
        let mut row = scheme_cells(&sol.scheme);
        row.extend([
            Cell::Float(sol.objective),
            Cell::Float(sol.objective_se),
            Cell::Float(sol.exp_failures),
            Cell::Float(sol.exp_duration),
            Cell::Float(sol.exp_cost),
            Cell::Float(cost.c_b()),
            Cell::Bool(sol.feasible),
        ]);
        r.push(row);
    }
    Ok(r.render(cfg.format, Some(cfg.seed), Some(cfg.draws)))
}

fn simulation_theta(cfg: &RunConfig) -> Result<LogNormalParams> {
    match (cfg.theta, cfg.prior) {
        (Some(t), _) => Ok(t),
        (None, Some(p)) => Ok(p.resolve()?.mean()),
        (None, None) => Err(Error::Config("simulate needs --theta or a prior".into())),
    }
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<String> {
    let scheme = require(&cfg.scheme, "scheme", "simulate")?;
    let theta = simulation_theta(cfg)?;
    if cfg.reps == 1 {
        let outcome = simulate(&scheme, theta, cfg.seed)?;
        if cfg.format == Format::Table {
            return Ok(format!("{}\n", outcome.to_record()));
        }
        let times = outcome.failures.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";");
        let mut r = Report::new(vec!["case", "d", "xi", "failures"], Layout::Columns);
        r.push(vec![
            Cell::Text(outcome.case.to_string()),
            Cell::Int(outcome.d as u64),
            Cell::Float(outcome.xi),
            Cell::Text(times),
        ]);
        return Ok(r.render(cfg.format, Some(cfg.seed), None));
    }
    let summary = simulate_summary(&scheme, theta, cfg.seed, cfg.reps)?;
    let spec = QuadratureSpec::default();
    let mut columns = vec![
        "reps", "theta_mu", "theta_tau", "mean_d", "se_d", "analytic_d", "mean_xi", "se_xi", "analytic_xi",
    ];
    columns.extend(["freq_I", "freq_II", "freq_III", "freq_IV", "freq_V", "freq_VI"]);
    let mut r = Report::new(columns, Layout::Vertical);
    let mut row = vec![
        Cell::Int(summary.reps),
        Cell::Float(theta.mu()),
        Cell::Float(theta.tau()),
        Cell::Float(summary.mean_d),
        Cell::Float(summary.se_d),
        Cell::Float(expected_failures(&scheme, theta)?),
        Cell::Float(summary.mean_xi),
        Cell::Float(summary.se_xi),
        Cell::Float(expected_duration(&scheme, theta, &spec)?),
    ];
    row.extend(summary.case_frequencies().into_iter().map(Cell::Float));
    r.push(row);
    Ok(r.render(cfg.format, Some(cfg.seed), None))
}
