mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::Envelope;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            if cli.json {
                let env = Envelope {
                    command: out.command,
                    inputs: &out.inputs,
                    result: &out.result,
                    version: env!("CARGO_PKG_VERSION"),
                };
                println!("{}", serde_json::to_string_pretty(&env).expect("envelope serializes"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.status)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
