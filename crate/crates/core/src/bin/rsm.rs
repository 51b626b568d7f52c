use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rsm::cli::{self, SimulateOptions};
use rsm::sim::Method;

/// Compose open dynamical systems from a JSON model.
#[derive(Parser)]
#[command(name = "rsm", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model.
    Check { path: PathBuf },
    /// Compose a model and write the composite as a one-box model.
    Compose {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compose a continuous model and integrate it to CSV.
    Simulate {
        path: PathBuf,
        /// Initial values, `R=1,F=1`.
        #[arg(long, value_parser = assignments)]
        x0: Option<Assignments>,
        /// Parameter values, `beta=0.5,...`.
        #[arg(long, value_parser = assignments)]
        params: Option<Assignments>,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = Method::Rk4)]
        method: Method,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compose an automaton model and print its transition graph.
    Graph {
        path: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Clone)]
struct Assignments(Vec<(String, f64)>);

fn assignments(s: &str) -> Result<Assignments, String> {
    cli::parse_assignments(s).map(Assignments)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match args.command {
        Command::Check { path } => cli::check(&path, &mut out, &mut err),
        Command::Compose { path, out: target } => cli::compose(&path, target.as_deref(), &mut out, &mut err),
        Command::Simulate {
            path,
            x0,
            params,
            t,
            dt,
            method,
            csv,
        } => {
            let opts = SimulateOptions {
                x0: x0.map(|a| a.0).unwrap_or_default(),
                params: params.map(|a| a.0).unwrap_or_default(),
                t_end: t,
                dt,
                method,
                csv,
            };
            cli::simulate(&path, &opts, &mut out, &mut err)
        }
        Command::Graph { path, dot } => cli::graph(&path, dot.as_deref(), &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
