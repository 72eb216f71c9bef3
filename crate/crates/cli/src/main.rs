#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pdm_core::eom::acceleration;
use pdm_core::exact::misprints;
use pdm_core::integrate::{integrate, Termination, Trajectory};
use pdm_core::par::Execution;
use pdm_core::system::{PdmSystem, State};
use pdm_core::transform::{map_to_reference, NonlocalMap};
use pdm_core::verify::{measures, run_suite, CheckConfig, Selection};

use config::{Format, RunConfig};
use output::{columns, emit, write_text, Table};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or usage; exit code 2.
    Config(String),
    /// A check did not come out as expected; exit code 1.
    Check(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "pdm", version, about = "Position-dependent-mass Lagrangian simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `output.path`. Standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Default,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equations of motion and write `t, x_i, v_i, E`.
    Simulate(RunArgs),
    /// Tabulate the closed-form solution named by `initial.from_exact`.
    Exact {
        #[command(flatten)]
        run: RunArgs,
        /// Number of intervals on `[0, t_end]`.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Integrate, then append the mapped `tau_i, q_i, qt_i` columns.
    Map(RunArgs),
    /// Run the coupled two-dimensional obstruction demonstration.
    Noninvariance {
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Write the result as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run verification checks.
    Verify {
        #[arg(long, value_enum, default_value = "default")]
        suite: SuiteArg,
        /// Run only the named check; repeatable.
        #[arg(long = "check")]
        checks: Vec<String>,
        /// List check names and exit.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Run checks one at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the known misprints with their validated forms.
    Misprints {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => simulate(&args, false),
        Command::Map(args) => simulate(&args, true),
        Command::Exact { run, points } => exact(&run, points),
        Command::Noninvariance { t_end, n, report } => noninvariance(t_end, n, report.as_deref()),
        Command::Verify {
            suite,
            checks,
            list,
            report,
            seed,
            samples,
            sequential,
        } => {
            let selection = if !checks.is_empty() {
                Selection::Named(checks)
            } else {
                match suite {
                    SuiteArg::Default => Selection::Default,
                    SuiteArg::Full => Selection::Full,
                }
            };
            if list {
                for name in pdm_core::verify::check_names(&selection) {
                    println!("{name}");
                }
                return Ok(());
            }
            let mut cfg = CheckConfig::default();
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(s) = samples {
                cfg.samples = s;
            }
            if sequential {
                cfg.execution = Execution::Sequential;
            }
            verify(&selection, &cfg, report.as_deref())
        }
        Command::Misprints { json } => {
            if json {
                let text = serde_json::to_string_pretty(misprints()).map_err(|e| CliError::Io(e.to_string()))?;
                println!("{text}");
            } else {
                for m in misprints() {
                    println!("{} ({})", m.id, m.topic);
                    println!("  printed:   {}", m.printed);
                    println!("  validated: {}", m.validated);
                    println!("  evidence:  {}", m.evidence);
                }
            }
            Ok(())
        }
    }
}

struct Resolved {
    cfg: RunConfig,
    path: Option<PathBuf>,
    format: Format,
}

fn resolve(args: &RunArgs) -> Result<Resolved, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let path = args.out.clone().or_else(|| cfg.output.path.clone());
    let format = match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None if path.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json")) => Format::Json,
        None => cfg.output.format,
    };
    Ok(Resolved { cfg, path, format })
}

fn state_row(system: &PdmSystem, s: &State) -> Result<Vec<f64>, CliError> {
    let e = system
        .total_energy(s)
        .map_err(|e| CliError::Config(format!("energy at t = {}: {e}", s.t)))?;
    let mut row = Vec::with_capacity(2 * s.n() + 2);
    row.push(s.t);
    row.extend_from_slice(&s.x);
    row.extend_from_slice(&s.v);
    row.push(e.total);
    Ok(row)
}

fn state_columns(n: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend(columns("x", n));
    cols.extend(columns("v", n));
    cols.push("E".into());
    cols
}

#[derive(Serialize)]
struct RunMeta<'a> {
    family: &'a str,
    seed: Option<u64>,
    termination: Option<&'a Termination>,
}

fn simulate(args: &RunArgs, mapped: bool) -> Result<(), CliError> {
    let Resolved { cfg, path, format } = resolve(args)?;
    let system = cfg.system()?;
    let initial = cfg.initial_state()?;
    system
        .check_position(&initial.x)
        .map_err(|e| CliError::Config(format!("initial: {e}")))?;
    let opts = cfg.integrator_options(initial.t)?;
    let traj = integrate(&|s: &State| acceleration(&system, s), &initial, &opts)
        .map_err(|e| CliError::Config(e.to_string()))?;
    report_termination(&traj);
    let n = system.n();
    let mut cols = state_columns(n);
    let mut table;
    if mapped {
        let map = NonlocalMap::for_system(&system).map_err(|e| CliError::Config(format!("map: {e}")))?;
        let m = map_to_reference(&map, &traj).map_err(|e| CliError::Config(format!("map: {e}")))?;
        cols.extend(columns("tau", n));
        cols.extend(columns("q", n));
        cols.extend(columns("qt", n));
        table = Table::new(cols);
        for (k, s) in traj.samples.iter().enumerate().step_by(cfg.output.stride) {
            let mut row = state_row(&system, s)?;
            row.extend_from_slice(&m.tau[k]);
            row.extend_from_slice(&m.q[k]);
            row.extend_from_slice(&m.qt[k]);
            table.push(row);
        }
    } else {
        table = Table::new(cols);
        for s in traj.samples.iter().step_by(cfg.output.stride) {
            table.push(state_row(&system, s)?);
        }
    }
    let meta = RunMeta {
        family: cfg.family.name(),
        seed: cfg.seed,
        termination: Some(&traj.termination),
    };
    emit(&table, meta, path.as_deref(), format)
}

fn report_termination(traj: &Trajectory) {
    if !traj.completed() {
        eprintln!(
            "pdm: integration stopped early at t = {:.16e}: {:?}",
            traj.t_end(),
            traj.termination
        );
    }
}

fn exact(args: &RunArgs, points: usize) -> Result<(), CliError> {
    let Resolved { cfg, path, format } = resolve(args)?;
    let spec = cfg
        .exact_spec()?
        .ok_or_else(|| CliError::Config("initial.from_exact is required for `exact`".into()))?;
    let system = spec.system().map_err(|e| CliError::Config(e.to_string()))?;
    let t_end = cfg.t_end()?;
    if points == 0 || !(t_end > 0.0) {
        return Err(CliError::Config("need --points >= 1 and integrator.t_end > 0".into()));
    }
    let mut table = Table::new(state_columns(spec.n()));
    for k in (0..=points).step_by(cfg.output.stride) {
        let t = t_end * k as f64 / points as f64;
        match pdm_core::exact::exact_solution(&spec, t) {
            Ok(s) => table.push(state_row(&system, &s)?),
            Err(pdm_core::error::PdmError::NotReal { .. }) => {}
            Err(e) => return Err(CliError::Config(e.to_string())),
        }
    }
    let meta = RunMeta {
        family: cfg.family.name(),
        seed: cfg.seed,
        termination: None,
    };
    emit(&table, meta, path.as_deref(), format)
}

#[derive(Serialize)]
struct NoninvarianceReport {
    n: usize,
    t_end: f64,
    max_residual: f64,
    threshold: f64,
    obstruction_demonstrated: bool,
}

fn noninvariance(t_end: f64, n: usize, report: Option<&Path>) -> Result<(), CliError> {
    if n == 0 || !(t_end > 0.0) {
        return Err(CliError::Config("need n >= 1 and t_end > 0".into()));
    }
    let opts = measures::adaptive(t_end, 1e-10, 1e-12);
    let r = measures::coupled_residual(n, t_end, &opts).map_err(|e| CliError::Config(e.to_string()))?;
    let threshold = 1e-2;
    let out = NoninvarianceReport {
        n,
        t_end,
        max_residual: r,
        threshold,
        obstruction_demonstrated: r > threshold,
    };
    println!(
        "coupled m = 1 + |x|^2, n = {n}: max reference-frame residual {r:.6e} ({})",
        if r > threshold {
            "no invariance"
        } else {
            "residual below the obstruction threshold"
        }
    );
    if let Some(p) = report {
        let text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Io(e.to_string()))?;
        write_text(&(text + "\n"), Some(p))?;
    }
    if n >= 2 && r <= threshold {
        return Err(CliError::Check(format!("expected a residual above {threshold:e}, got {r:e}")));
    }
    Ok(())
}

fn verify(selection: &Selection, cfg: &CheckConfig, report: Option<&Path>) -> Result<(), CliError> {
    let suite = run_suite(selection, cfg).map_err(|e| CliError::Config(e.to_string()))?;
    for r in &suite.reports {
        let tag = match (r.passed, r.expectation) {
            (true, pdm_core::verify::Expectation::Pass) => "pass",
            (true, pdm_core::verify::Expectation::ExpectedFail) => "xfail",
            (false, _) => "FAIL",
        };
        println!(
            "{tag:<5} {:<44} {:>11.3e} {} {:.1e}  {}",
            r.name,
            r.metric,
            match r.expectation {
                pdm_core::verify::Expectation::Pass => "<=",
                pdm_core::verify::Expectation::ExpectedFail => "> ",
            },
            r.threshold,
            r.details
        );
    }
    println!(
        "{} passed, {} expected failures, {} failed",
        suite.passed, suite.expected_failures, suite.failed
    );
    if let Some(p) = report {
        let text = serde_json::to_string_pretty(&suite).map_err(|e| CliError::Io(e.to_string()))?;
        write_text(&(text + "\n"), Some(p))?;
    }
    if suite.all_passed() {
        Ok(())
    } else {
        Err(CliError::Check(format!("{} check(s) failed", suite.failed)))
    }
}
