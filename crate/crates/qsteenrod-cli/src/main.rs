use std::fs;
use std::process::ExitCode;

use clap::Parser;
use qsteenrod_cli::commands::execute;
use qsteenrod_cli::config::{Cli, Format, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let output = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&output.to_json(&cfg)).expect("JSON values serialize") + "\n",
        Format::Table => output.render_table(),
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if output.failed() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
