//! The `supermarket` command line.
//!
//! Every subcommand is a thin wrapper over one library operation. Figure
//! data (`tail`, `brfig`, `vfig`, `ode`) defaults to CSV with a header row;
//! everything else defaults to JSON. JSON output is an envelope
//!
//! ```json
//! { "schema_version": 1, "spec": { "command": {...}, ... }, "result": ... }
//! ```
//!
//! whose `spec` holds every resolved parameter, seed included, so
//! `supermarket replay out.json` can re-run it and compare.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 numerical failure or
//! non-convergence. `SUPERMARKET_SEED` sets the default seed of simulation
//! commands; an explicit `--seed` wins.
//!
//! Density configs for `hetero --density FILE` are JSON:
//! `{"kind": "uniform", "c_max": 1.0}` or
//! `{"kind": "piecewise_linear", "knots": [[0.0, 0.5], [1.0, 1.5]]}`,
//! the knots being `(cost, density)` pairs whose linear interpolation
//! integrates to one.

mod commands;
mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use spec::{
    BrfigParams, Command, CoupleParams, DeviationParams, ExperimentSpec, ExternalityParams, HeteroArgs, HeteroParams,
    NashParams, OdeParams, OutputFormat, SimulateParams, SocoptParams, TailParams, VfigParams, DEFAULT_SEED,
};

use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Relative tolerance for replaying deterministic solver output.
pub const REPLAY_TOL: f64 = 1e-9;

/// JSON output of every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    pub result: Value,
}

#[derive(Debug, Parser)]
#[command(
    name = "supermarket",
    version,
    about = "Equilibria and simulation for the supermarket game"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Mean-field tail r(k) for a strategy.
    Tail(TailParams),
    /// Nash equilibria of the homogeneous game.
    Nash(NashParams),
    /// Best response as a function of the population strategy.
    Brfig(BrfigParams),
    /// Marginal value of sampling V(l, s) over a range of opponents.
    Vfig(VfigParams),
    /// Socially optimal common strategy.
    Socopt(SocoptParams),
    /// Threshold equilibrium with heterogeneous waiting costs.
    Hetero(HeteroArgs),
    /// Finite-N simulation.
    Simulate(SimulateParams),
    /// Coupled run of two strategies ordered by sample count.
    Couple(CoupleParams),
    /// Two-server shortest-queue example.
    Externality(ExternalityParams),
    /// Cost of a tagged deviator in a finite system.
    Deviation(DeviationParams),
    /// Transient mean-field trajectory.
    Ode(OdeParams),
    /// Re-run the spec echoed in a JSON output and compare results.
    Replay { file: PathBuf },
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_ARGS } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let command = match cli.command {
        CliCommand::Replay { file } => return replay(&file, out, err),
        CliCommand::Tail(p) => Command::Tail(p),
        CliCommand::Nash(p) => Command::Nash(p),
        CliCommand::Brfig(p) => Command::Brfig(p),
        CliCommand::Vfig(p) => Command::Vfig(p),
        CliCommand::Socopt(p) => Command::Socopt(p),
        CliCommand::Hetero(a) => match a.resolve() {
            Ok(p) => Command::Hetero(p),
            Err(e) => return fail(&e, err),
        },
        CliCommand::Simulate(p) => Command::Simulate(p),
        CliCommand::Couple(p) => Command::Couple(p),
        CliCommand::Externality(p) => Command::Externality(p),
        CliCommand::Deviation(p) => Command::Deviation(p),
        CliCommand::Ode(p) => Command::Ode(p),
    };
    let format = cli.format.unwrap_or_else(|| command.default_format());
    let spec = ExperimentSpec {
        command,
        output: cli.output,
        format,
    };
    run_spec(&spec, out, err)
}

/// Executes a resolved spec and writes its output.
pub fn run_spec(spec: &ExperimentSpec, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match commands::execute(&spec.command) {
        Ok(o) => o,
        Err(e) => return fail(&e, err),
    };
    let text = match spec.format {
        OutputFormat::Csv => match outcome.csv {
            Some(csv) => csv,
            None => {
                let _ = writeln!(
                    err,
                    "error: {} has no CSV output, use --format json",
                    spec.command.name()
                );
                return EXIT_BAD_ARGS;
            }
        },
        OutputFormat::Json => {
            let envelope = Envelope {
                schema_version: SCHEMA_VERSION,
                spec: spec.clone(),
                result: outcome.result,
            };
            let mut s = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            s.push('\n');
            s
        }
    };
    let written = match &spec.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_BAD_ARGS;
    }
    for line in &outcome.notes {
        let _ = writeln!(err, "{line}");
    }
    match outcome.failure {
        Some(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_NUMERICAL
        }
        None => EXIT_OK,
    }
}

fn fail(e: &Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_BAD_ARGS
    }
}

fn replay(file: &std::path::Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let envelope: Envelope = match std::fs::read_to_string(file)
        .map_err(|e| e.to_string())
        .and_then(|text| serde_json::from_str(&text).map_err(|e| e.to_string()))
    {
        Ok(env) => env,
        Err(e) => {
            let _ = writeln!(err, "error: cannot load {}: {e}", file.display());
            return EXIT_BAD_ARGS;
        }
    };
    if envelope.schema_version != SCHEMA_VERSION {
        let _ = writeln!(
            err,
            "error: schema version {} not supported (expected {SCHEMA_VERSION})",
            envelope.schema_version
        );
        return EXIT_BAD_ARGS;
    }
    let command = &envelope.spec.command;
    let fresh = match commands::execute(command) {
        Ok(o) => o.result,
        Err(e) => return fail(&e, err),
    };
    let tol = if command.is_seeded() { 0.0 } else { REPLAY_TOL };
    match first_difference(&envelope.result, &fresh, tol, "result") {
        None => {
            let _ = writeln!(out, "replay {}: reproduced", command.name());
            EXIT_OK
        }
        Some(path) => {
            let _ = writeln!(err, "error: replay {} differs at {path}", command.name());
            EXIT_NUMERICAL
        }
    }
}

/// Path of the first place where `a` and `b` differ, numbers compared with
/// relative tolerance `tol`.
fn first_difference(a: &Value, b: &Value, tol: f64, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64()?, y.as_f64()?);
            let scale = 1f64.max(x.abs()).max(y.abs());
            ((x - y).abs() > tol * scale).then(|| path.to_string())
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                return Some(format!("{path} (length)"));
            }
            xs.iter()
                .zip(ys)
                .enumerate()
                .find_map(|(i, (x, y))| first_difference(x, y, tol, &format!("{path}[{i}]")))
        }
        (Value::Object(xs), Value::Object(ys)) => {
            if xs.len() != ys.len() {
                return Some(format!("{path} (keys)"));
            }
            xs.iter().find_map(|(k, x)| match ys.get(k) {
                Some(y) => first_difference(x, y, tol, &format!("{path}.{k}")),
                None => Some(format!("{path}.{k}")),
            })
        }
        _ => (a != b).then(|| path.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn difference_paths() {
        let a = json!({"x": [1.0, 2.0], "y": "s"});
        assert_eq!(first_difference(&a, &a, 0.0, "r"), None);
        let b = json!({"x": [1.0, 2.0 + 1e-12], "y": "s"});
        assert_eq!(first_difference(&a, &b, 0.0, "r").as_deref(), Some("r.x[1]"));
        assert_eq!(first_difference(&a, &b, 1e-9, "r"), None);
        let c = json!({"x": [1.0], "y": "s"});
        assert!(first_difference(&a, &c, 1.0, "r").is_some());
    }
}
