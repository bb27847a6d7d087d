mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use parcause::{Budget, Error};
use serde_json::json;

use commands::{run, Cmd};

/// Event structures with parallel causes, concurrent games and
/// probabilistic strategies.
///
/// Every verb prints a JSON report. Exit status: 0 success, 1 property or
/// axiom violation, 2 usage or format error, 3 resource budget exceeded.
#[derive(Parser, Debug)]
#[command(name = "parcause", version)]
struct Cli {
    /// Default size bound for configuration and realisation listings
    #[arg(long, global = true, default_value_t = 8)]
    max_config_size: usize,
    /// Candidates examined by a single enumeration
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_subsets: usize,
    /// Largest carrier for isomorphism search and canonical forms
    #[arg(long, global = true, default_value_t = 12)]
    max_iso_nodes: usize,
    /// Write the constructed structure, strategy or valuation here
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Compare the constructed value with this file; a mismatch exits 1
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 3,
        _ => 2,
    }
}

fn print(v: &serde_json::Value) {
    print!("{}", parcause::io::to_canonical(v));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget {
        max_subsets: cli.max_subsets,
        max_config_size: cli.max_config_size,
        max_iso_nodes: cli.max_iso_nodes,
    };
    let mut out = match run(&cli.cmd, &budget) {
        Ok(o) => o,
        Err(e) => {
            print(&json!({"error": e.to_string()}));
            return ExitCode::from(exit_code(&e));
        }
    };
    if (cli.output.is_some() || cli.golden.is_some()) && out.artifact.is_none() {
        print(&json!({"error": "this verb constructs nothing to write or compare"}));
        return ExitCode::from(2);
    }
    if let (Some(path), Some(text)) = (&cli.output, &out.artifact) {
        if let Err(e) = std::fs::write(path, text) {
            print(&json!({"error": format!("{}: {e}", path.display())}));
            return ExitCode::from(2);
        }
    }
    if let (Some(path), Some(text)) = (&cli.golden, &out.artifact) {
        match std::fs::read_to_string(path) {
            Ok(want) => {
                let same = &want == text;
                out.report["golden"] = json!(if same { "match" } else { "mismatch" });
                out.ok &= same;
            }
            Err(e) => {
                print(&json!({"error": format!("{}: {e}", path.display())}));
                return ExitCode::from(2);
            }
        }
    }
    print(&out.report);
    ExitCode::from(if out.ok { 0 } else { 1 })
}
