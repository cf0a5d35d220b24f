mod args;
mod commands;
mod manifest;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Format};
use commands::Failure;
use manifest::RunManifest;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let flags = serde_json::to_value(&cli.command)
        .map(|v| v.as_object().and_then(|o| o.values().next().cloned()).unwrap_or(v))
        .unwrap_or_default();
    let mut manifest = RunManifest::start(cli.command.name(), flags, commands::seed_of(&cli.command));

    let outcome = match commands::run(&cli.command, &mut manifest) {
        Ok(o) => o,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_IO);
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    manifest.finish();

    let rendered = match cli.format {
        Format::Json => {
            let doc = json!({ "manifest": manifest, "report": outcome.report });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
        Format::Csv => outcome.csv,
        Format::Text => {
            let m = serde_json::to_string(&manifest).expect("manifest serializes");
            format!("{}\n# manifest: {m}\n", outcome.text)
        }
    };

    let written = match &cli.output {
        Some(path) => fs::write(path, rendered).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(rendered.as_bytes()).map_err(|e| format!("stdout: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_IO);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: verification failed");
        ExitCode::from(EXIT_FAILED)
    }
}
