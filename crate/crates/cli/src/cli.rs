use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use qgd_core::descent::check_schedule;
use qgd_core::descent::resources::generic_step_cost;

use crate::config::{ExperimentConfig, ObjectiveSpec, OutputFormat, Overrides, RunSweep};
use crate::costs::{compare_costs, load_params, CostSweep};
use crate::error::{exit, CliError};
use crate::run::{artifact_list, run_experiment, separable_plan};

#[derive(Debug, Parser)]
#[command(name = "qgd", version, about = "Block-encoded gradient descent simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment config, or every config listed in a sweep file.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// JSON file `{"configs": [...]}` with paths relative to itself.
        #[arg(long)]
        sweep: Option<PathBuf>,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the operation log (overrides `audit`).
        #[arg(long)]
        audit: bool,
        /// Artifact encodings (overrides `output.format`).
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Cost envelopes and implemented counters for a parameter file.
    CompareCosts {
        #[arg(long)]
        config: Option<PathBuf>,
        /// JSON file `{"param": "T", "values": [...]}`.
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: OutputFormat,
    },
    /// Parse and check a config without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            config,
            sweep,
            out: dir,
            audit,
            format,
        } => {
            let overrides = Overrides {
                out: dir,
                audit,
                format,
            };
            let mut paths = Vec::new();
            if let Some(c) = config {
                paths.push(c);
            }
            if let Some(s) = sweep {
                paths.extend(RunSweep::load(&s)?);
            }
            if paths.is_empty() {
                return Err(CliError::invalid("run", "pass --config or --sweep"));
            }
            run_all(&paths, &overrides, out)
        }
        Command::CompareCosts {
            config,
            sweep,
            out: dir,
            format,
        } => {
            let (params, name) = load_params(config.as_deref())?;
            let origin = config
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "defaults".into());
            let sweep = sweep.as_deref().map(CostSweep::load).transpose()?;
            let res = compare_costs(&params, &name, &origin, sweep.as_ref(), &dir, format)?;
            let _ = write!(out, "{}", res.table);
            let _ = writeln!(out, "wrote {}", artifact_list(&res.artifacts));
            Ok(())
        }
        Command::ValidateConfig { config } => {
            let summary = validate(&config)?;
            let _ = writeln!(out, "{summary}");
            Ok(())
        }
    }
}

/// Runs configs in parallel; reports in input order and fails with the
/// first error.
fn run_all(paths: &[PathBuf], overrides: &Overrides, out: &mut dyn Write) -> Result<(), CliError> {
    let results: Vec<Result<String, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = paths
            .iter()
            .map(|p| s.spawn(move || run_one(p, overrides)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    });
    let mut first_err = None;
    for r in results {
        match r {
            Ok(line) => {
                let _ = writeln!(out, "{line}");
            }
            Err(e) if first_err.is_none() => first_err = Some(e),
            Err(_) => {}
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn run_one(path: &Path, overrides: &Overrides) -> Result<String, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(overrides);
    let res = run_experiment(&cfg)?;
    let r = &res.report;
    let mut line = format!("{}: T = {}", res.name, res.trace.t);
    if let Some(c) = r.get("comparison") {
        line.push_str(&format!(
            ", max deviation {} (bound {})",
            c["max_deviation"], c["bound"]
        ));
    }
    line.push_str(&format!(
        ", success probability {}; wrote {}",
        r["postselection"]["probability"],
        artifact_list(&res.artifacts)
    ));
    Ok(line)
}

/// Static checks: schema, start vector, schedule, scale factors or the
/// polynomial fit.
pub fn validate(path: &Path) -> Result<String, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    let name = cfg.name().to_string();
    let err = |source| CliError::Descent {
        name: name.clone(),
        source,
    };
    let x0 = cfg.resolve_x0()?;
    let eta = cfg.eta().unwrap_or(0.0);
    check_schedule(&x0, eta, cfg.objective.grad_bound(), cfg.t, cfg.enforce_schedule).map_err(err)?;
    let detail = match &cfg.objective {
        ObjectiveSpec::Polynomial(f) => {
            let cost = generic_step_cost(f, cfg.eps).map_err(err)?;
            format!("{} terms, {} queries per step", f.terms().len(), cost.queries)
        }
        ObjectiveSpec::Separable(_) => {
            let plan = separable_plan(&cfg).expect("separable objective").map_err(err)?;
            format!(
                "fitted degree {}, sup error {:e}",
                plan.poly.degree(),
                plan.poly.sup_error_bound()
            )
        }
    };
    Ok(format!(
        "{name}: ok ({:?} mode, n = {}, T = {}, eta = {eta}, {detail})",
        cfg.mode,
        cfg.objective.n(),
        cfg.t
    ))
}
