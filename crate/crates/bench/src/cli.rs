//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use kaczmarz::matcore::condition_numbers;
use kaczmarz::theory::{expected_iterations, theorem1_bound, theorem2_lower_bound};

use crate::config::ExperimentConfig;
use crate::emit::{meta_string, write_curves, write_outputs};
use crate::error::Result;
use crate::experiment::run_experiment;
use crate::instance::InstanceFile;
use crate::presets::{complexity_curves, preset, Preset};

/// Monte Carlo experiments for randomized Kaczmarz and its baselines.
#[derive(Debug, Parser)]
#[command(name = "kaczmarz-bench", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to a `key = value` experiment config.
        config: PathBuf,
        /// Output directory; overrides the config's `out` key.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in experiment: fig1, fig2, fig3, fig4 or relax.
    Preset {
        #[arg(value_parser = ["fig1", "fig2", "fig3", "fig4", "relax"])]
        name: String,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of Monte Carlo trials (ignored by fig2).
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Print condition numbers of the matrix in an instance file.
    Cond {
        /// Instance file: `m n`, then row-major `re im` pairs.
        instance: PathBuf,
    },
    /// Print predicted iteration counts and error bounds.
    Predict {
        /// Scaled condition number ||A||_F ||A^-1||_2, greater than 1.
        #[arg(long)]
        kappa: f64,
        /// Target relative error in (0, 1).
        #[arg(long)]
        eps: f64,
        /// Iteration count for the bounds; defaults to the predicted count.
        #[arg(long)]
        k: Option<u64>,
        /// Initial squared error ||x_0 - x||^2.
        #[arg(long, default_value_t = 1.0)]
        e0: f64,
    },
}

fn print_paths(w: &mut dyn Write, paths: &[PathBuf]) -> std::io::Result<()> {
    for p in paths {
        writeln!(w, "wrote {}", p.display())?;
    }
    Ok(())
}

fn run_config(w: &mut dyn Write, config: &ExperimentConfig, out: &Path) -> Result<()> {
    let result = run_experiment(config)?;
    let paths = write_outputs(&result, out)?;
    write!(w, "{}", meta_string(&result))?;
    Ok(print_paths(w, &paths)?)
}

fn execute(w: &mut dyn Write, command: Command) -> Result<()> {
    match command {
        Command::Run { config, out } => {
            let config = ExperimentConfig::from_file(&config)?;
            let out = out.unwrap_or_else(|| config.out.clone());
            run_config(w, &config, &out)
        }
        Command::Preset { name, seed, trials, out } => match preset(&name, seed, trials)? {
            Preset::Experiment(config) => run_config(w, &config, &out),
            Preset::Curves { name, n, epsilon, points } => {
                let curves = complexity_curves(n, epsilon, points)?;
                writeln!(w, "crossover_ratio = {}", curves.crossover_ratio)?;
                writeln!(w, "cgls_optimal_ratio = {}", curves.cgls_optimal_ratio)?;
                print_paths(w, &write_curves(&curves, &name, &out)?)?;
                Ok(())
            }
        },
        Command::Cond { instance } => {
            let file = InstanceFile::read(&instance)?;
            let report = condition_numbers(&file.a)?;
            writeln!(w, "rows = {}", file.a.rows())?;
            writeln!(w, "cols = {}", file.a.cols())?;
            writeln!(w, "k = {}", report.k)?;
            writeln!(w, "kappa = {}", report.kappa)?;
            writeln!(w, "kappa_over_sqrt_n = {}", report.kappa / (file.a.cols() as f64).sqrt())?;
            writeln!(w, "sigma_min = {}", report.sigma_min)?;
            writeln!(w, "sigma_max = {}", report.sigma_max)?;
            writeln!(w, "frobenius = {}", report.frobenius)?;
            Ok(())
        }
        Command::Predict { kappa, eps, k, e0 } => {
            let est = expected_iterations(kappa, eps)?;
            let k = k.unwrap_or(est.exact.ceil() as u64);
            writeln!(w, "kappa = {kappa}")?;
            writeln!(w, "eps = {eps}")?;
            writeln!(w, "expected_iterations_exact = {}", est.exact)?;
            writeln!(w, "expected_iterations_approx = {}", est.approx)?;
            writeln!(w, "k = {k}")?;
            writeln!(w, "upper_bound = {}", theorem1_bound(kappa, k, e0)?)?;
            let note = if (k as f64) <= kappa * kappa / 2.0 { "" } else { " (vacuous: k > kappa^2 / 2)" };
            writeln!(w, "lower_bound = {}{note}", theorem2_lower_bound(kappa, k, e0))?;
            Ok(())
        }
    }
}

/// Parses `args` (including the program name) and runs the command, printing
/// results to stdout. Returns the process exit code: 0 on success, 1 on a
/// runtime error and 2 on a usage error.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    cli_main_with_output(args, &mut std::io::stdout().lock())
}

/// Like [`cli_main`], with command output sent to `out`. Usage and error
/// messages still go to stderr.
pub fn cli_main_with_output<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(out, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
