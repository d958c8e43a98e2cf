mod args;
mod commands;
mod input;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use cvwitness::Error;
use serde_json::json;

use crate::args::{Cli, Format};
use crate::commands::{run, Output};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Domain(_) | Error::Format(_) | Error::Resource(_) => EXIT_USAGE,
        Error::Numeric(_) | Error::Consistency(_) => EXIT_NUMERIC,
    }
}

fn csv_field(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn render(output: &Output, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&output.json).expect("serializable");
            text.push('\n');
            text
        }
        Format::Csv => output
            .csv
            .iter()
            .map(|r| r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n")
            .collect(),
    }
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn write_metadata(cli: &Cli) -> io::Result<()> {
    let Some(path) = &cli.metadata else {
        return Ok(());
    };
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": "cvwitness",
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": std::env::args().skip(1).collect::<Vec<_>>(),
        "timestamp_unix": timestamp,
    });
    fs::write(
        path,
        serde_json::to_string_pretty(&meta).expect("serializable") + "\n",
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli.command, cli.precision as usize) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("cvwitness: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(summary) = &output.summary {
        eprint!("{summary}");
    }
    if let Err(e) = emit(&cli, &render(&output, cli.format)).and_then(|_| write_metadata(&cli)) {
        eprintln!("cvwitness: {e}");
        return ExitCode::from(EXIT_NUMERIC);
    }
    if output.acceptance_failed {
        ExitCode::from(EXIT_ACCEPTANCE)
    } else {
        ExitCode::SUCCESS
    }
}
