//! `jcurves`: invariants of curves in projective space and Jacobi curves of rank 2 distributions.

mod render;
mod request;

use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use request::{run, Backend, Command, Outcome, Payload, Request, EXIT_INPUT};

/// Exit codes: 0 success, 1 a batch case failed, 2 bad input, 3 degenerate data, 4 jet order
/// exhausted after the retry.
#[derive(Parser, Debug)]
#[command(name = "jcurves", version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Curvature tuple as a JSON array, e.g. "[10, 9]" or "[\"1/2\", 0]".
    #[arg(long)]
    tuple: Option<String>,
    /// Second tuple for `equiv`.
    #[arg(long)]
    other: Option<String>,
    /// Dimension of the model distribution.
    #[arg(long)]
    n: Option<usize>,
    /// Model parameters as a JSON array.
    #[arg(long)]
    r: Option<String>,
    /// velocity or wilczynski.
    #[arg(long)]
    mode: Option<String>,
    /// Cotangent point {"q": [...], "p": [...]}.
    #[arg(long)]
    point: Option<String>,
    /// Curve ODE {"m": .., "B": [...], "param_tag": ..}.
    #[arg(long)]
    ode: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    backend: Backend,
    #[arg(long)]
    jet_order: Option<usize>,
    /// JSON output (the default).
    #[arg(long, conflicts_with = "pretty")]
    json: bool,
    /// Plain text derived from the JSON report.
    #[arg(long)]
    pretty: bool,
    /// JSON file holding an array of requests.
    #[arg(long)]
    batch: Option<String>,
}

fn json_arg(flag: &str, s: &Option<String>) -> Result<Option<Value>, String> {
    s.as_deref().map(|t| serde_json::from_str(t).map_err(|e| format!("--{flag}: malformed JSON: {e}"))).transpose()
}

fn request(cli: &Cli) -> Result<Request, String> {
    let payload = Payload {
        tuple: json_arg("tuple", &cli.tuple)?,
        other: json_arg("other", &cli.other)?,
        n: cli.n,
        r: json_arg("r", &cli.r)?,
        mode: cli.mode.clone(),
        point: json_arg("point", &cli.point)?,
        ode: json_arg("ode", &cli.ode)?,
        batch: cli.batch.clone(),
    };
    Ok(Request { command: cli.command, payload, backend: cli.backend, jet_order: cli.jet_order })
}

fn main() -> ExitCode {
    // panics are caught per request and reported as internal errors
    std::panic::set_hook(Box::new(|_| {}));
    let cli = Cli::parse();
    let out = match request(&cli) {
        Ok(req) => run(&req),
        Err(msg) => Outcome::input(msg),
    };
    if let Some(err) = out.report.get("error").and_then(Value::as_str) {
        eprintln!("jcurves: {err}");
    }
    if cli.pretty {
        print!("{}", render::pretty(&out.report));
    } else {
        println!("{}", serde_json::to_string_pretty(&out.report).unwrap_or_default());
    }
    let code = u8::try_from(out.code).unwrap_or(EXIT_INPUT as u8);
    ExitCode::from(code)
}
