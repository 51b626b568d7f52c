//! Commands behind the `rsm` binary.
//!
//! Each command reads a JSON model (see [`model`]), writes its artifact to a
//! file or to `out`, and reports problems on `err`, one per line. The return
//! value is the process exit code: 0 ok, 1 validation, 2 parse, 3 runtime.

pub mod model;

use std::collections::BTreeMap;
use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use crate::rsm::FilledBox;
use crate::sim::{self, Method};

pub use model::{LoadError, Located, Model, ModelFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Whether diagnostics get ANSI colour: `RSM_COLOR=0` turns it off, any
/// other value turns it on, and unset means "if stderr is a terminal".
pub fn color_enabled() -> bool {
    match std::env::var("RSM_COLOR") {
        Ok(v) => v != "0",
        Err(_) => std::io::stderr().is_terminal(),
    }
}

struct Reporter<'a> {
    err: &'a mut dyn Write,
    color: bool,
}

impl Reporter<'_> {
    fn error(&mut self, msg: impl std::fmt::Display) {
        let label = if self.color { "\x1b[1;31merror\x1b[0m" } else { "error" };
        let _ = writeln!(self.err, "{label}: {msg}");
    }

    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        self.error(msg);
        code
    }
}

fn load(path: &Path, rep: &mut Reporter<'_>) -> Result<Model, i32> {
    let text = fs::read_to_string(path).map_err(|e| rep.fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    Model::load(&text).map_err(|e| {
        let (code, list) = match e {
            LoadError::Parse(l) => (EXIT_PARSE, l),
            LoadError::Invalid(l) => (EXIT_INVALID, l),
        };
        for d in list {
            rep.error(d);
        }
        code
    })
}

fn compose_model(path: &Path, rep: &mut Reporter<'_>) -> Result<(Model, FilledBox), i32> {
    let model = load(path, rep)?;
    let filled = model.compose().map_err(|e| rep.fail(EXIT_RUNTIME, e))?;
    Ok((model, filled))
}

fn emit(target: Option<&Path>, text: &str, out: &mut dyn Write, rep: &mut Reporter<'_>) -> Result<(), i32> {
    match target {
        Some(p) => fs::write(p, text).map_err(|e| rep.fail(EXIT_RUNTIME, format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| rep.fail(EXIT_RUNTIME, e)),
    }
}

/// Parses and validates a model.
pub fn check(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut rep = Reporter {
        err,
        color: color_enabled(),
    };
    match load(path, &mut rep) {
        Ok(model) => {
            let _ = writeln!(
                out,
                "ok: {} boxes, {} morphisms",
                model.boxes.len(),
                model.morphisms.len()
            );
            EXIT_OK
        }
        Err(code) => code,
    }
}

/// Composes a model and writes the composite as a one-box model.
pub fn compose(path: &Path, target: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut rep = Reporter {
        err,
        color: color_enabled(),
    };
    let mut run = || -> Result<(), i32> {
        let (model, filled) = compose_model(path, &mut rep)?;
        let file = model.single_box_file(&filled);
        let mut text = serde_json::to_string_pretty(&file).map_err(|e| rep.fail(EXIT_RUNTIME, e))?;
        text.push('\n');
        emit(target, &text, out, &mut rep)
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

#[derive(Clone, Debug)]
pub struct SimulateOptions {
    pub x0: Vec<(String, f64)>,
    pub params: Vec<(String, f64)>,
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    pub csv: Option<PathBuf>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            x0: Vec::new(),
            params: Vec::new(),
            t_end: 10.0,
            dt: 0.01,
            method: Method::Rk4,
            csv: None,
        }
    }
}

/// Parses `name=value,name=value`.
pub fn parse_assignments(s: &str) -> Result<Vec<(String, f64)>, String> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected name=value, got `{part}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Composes a continuous model and integrates it, writing CSV.
pub fn simulate(path: &Path, opts: &SimulateOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut rep = Reporter {
        err,
        color: color_enabled(),
    };
    let mut run = || -> Result<(), i32> {
        let (model, filled) = compose_model(path, &mut rep)?;
        let FilledBox::Ode(sys) = filled else {
            return Err(rep.fail(
                EXIT_RUNTIME,
                "simulate needs a continuous model; use graph for automata",
            ));
        };
        let mut params: BTreeMap<String, f64> = model.parameters();
        params.extend(opts.params.iter().cloned());
        let mut x0 = model.initial();
        x0.extend(opts.x0.iter().cloned());
        let traj = sim::integrate(&sys, &x0, &params, opts.t_end, opts.dt, opts.method)
            .map_err(|e| rep.fail(EXIT_RUNTIME, e))?;
        emit(opts.csv.as_deref(), &traj.to_csv(), out, &mut rep)
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

/// Composes an automaton model and writes its transition graph as DOT,
/// followed by a summary line on `out`.
pub fn graph(path: &Path, dot: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut rep = Reporter {
        err,
        color: color_enabled(),
    };
    let mut run = || -> Result<(), i32> {
        let (_, filled) = compose_model(path, &mut rep)?;
        let FilledBox::Automata(a) = filled else {
            return Err(rep.fail(
                EXIT_RUNTIME,
                "graph needs an automaton model; use simulate for continuous ones",
            ));
        };
        let g = sim::graph(&a).map_err(|e| rep.fail(EXIT_RUNTIME, e))?;
        emit(dot, &g.to_dot(), out, &mut rep)?;
        let line = sim::summary(&a).map_err(|e| rep.fail(EXIT_RUNTIME, e))?;
        writeln!(out, "{line}").map_err(|e| rep.fail(EXIT_RUNTIME, e))
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments() {
        assert_eq!(
            parse_assignments("R=1, F=0.5").unwrap(),
            vec![("R".to_string(), 1.0), ("F".to_string(), 0.5)]
        );
        assert!(parse_assignments("R").is_err());
        assert!(parse_assignments("R=x").is_err());
        assert!(parse_assignments("").unwrap().is_empty());
    }
}
