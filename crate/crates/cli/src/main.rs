//! `tunnelsplit analyze|verify|sweep`: semiclassical ground-state splittings
//! of symmetric double wells, with brute-force verification.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 verification failure
//! (including numerical failures of the oracles).

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tunnelsplit_core::Error;

use tunnelsplit::config::{Cli, CommandKind, Format, RunConfig};
use tunnelsplit::{render, report};

const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn run(cli: Cli) -> Result<(String, bool), Error> {
    let cfg = RunConfig::from_command(cli.command)?;
    match cfg.command {
        CommandKind::Analyze => {
            let doc = report::analyze(&cfg)?;
            Ok((render_doc(&doc, cfg.format), true))
        }
        CommandKind::Verify => {
            let (doc, all_pass) = report::verify(&cfg)?;
            Ok((render_doc(&doc, cfg.format), all_pass))
        }
        CommandKind::Sweep => {
            let rows = report::sweep(&cfg)?;
            let text = match cfg.format {
                Format::Csv => render::sweep_csv(&rows),
                Format::Table => render::sweep_table(&rows),
                Format::Json => render::canonical_json(&report::sweep_json(&cfg, &rows)),
            };
            Ok((text, true))
        }
    }
}

fn render_doc(doc: &serde_json::Value, format: Format) -> String {
    match format {
        Format::Json => render::canonical_json(doc),
        _ => render::table(doc),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, ok)) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(text.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(EXIT_VERIFY)
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_VERIFY
            })
        }
    }
}
