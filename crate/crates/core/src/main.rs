use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;

use covol::cli::{run, Options, COMMANDS};
use covol::dsl::parse;

/// Galois coverings of quivers and pointed coalgebras.
#[derive(Parser, Debug)]
#[command(name = "covol", version)]
struct Args {
    #[arg(value_parser = PossibleValuesParser::new(COMMANDS))]
    command: String,
    workspace: PathBuf,
    /// Radius of the group window.
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Write the JSON report here; `-` or no value prints it.
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    json: Option<String>,
    /// Write DOT here; `-` or no value prints it instead of the report.
    #[arg(long, num_args = 0..=1, default_missing_value = "-")]
    dot: Option<String>,
    /// Vertex weighting for `twist`, e.g. `x=1, y=0`.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    weighting: Option<String>,
    #[arg(long)]
    subcoalgebra: Option<String>,
    #[arg(long)]
    comodule: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let seed = std::env::var("COVOL_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let text = match std::fs::read_to_string(&args.workspace) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.workspace.display());
            return ExitCode::from(2);
        }
    };
    let ws = match parse(&text) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {}:{e}", args.workspace.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        window: args.window,
        weighting: args.weighting,
        subcoalgebra: args.subcoalgebra,
        comodule: args.comodule,
        gamma: args.gamma,
        seed,
    };
    let outcome = match run(&args.command, &ws, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = serde_json::to_string_pretty(&outcome.report).expect("serialisable") + "\n";
    let mut printed_dot = false;
    match args.dot.as_deref() {
        Some("-") => {
            print!("{}", outcome.dot);
            printed_dot = true;
        }
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.dot) {
                eprintln!("error: {path}: {e}");
                return ExitCode::from(2);
            }
        }
        None => {}
    }
    match args.json.as_deref() {
        Some(path) if path != "-" => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: {path}: {e}");
                return ExitCode::from(2);
            }
        }
        Some(_) => print!("{json}"),
        None if !printed_dot => print!("{json}"),
        None => {}
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
