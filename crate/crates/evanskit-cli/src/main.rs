mod config;
mod run;

use clap::{Parser, Subcommand};
use config::{Flags, Task};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "evanskit", version, about = "Evans-function stability of solitary waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full stability report at lambda = 0 plus a real-axis scan (JSON)
    Report(Flags),
    /// Evans function along the real axis (CSV or JSON)
    Scan(Flags),
    /// Zero count inside a rectangle (JSON)
    Contour(Flags),
    /// Run a verification suite (JSON)
    Verify(Flags),
}

fn emit(path: Option<&std::path::Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (task, flags) = match cli.command {
        Command::Report(f) => (Task::Report, f),
        Command::Scan(f) => (Task::Scan, f),
        Command::Contour(f) => (Task::Contour, f),
        Command::Verify(f) => (Task::Verify, f),
    };
    let cfg = match config::resolve(task, flags) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("evanskit: invalid config: {msg}");
            return ExitCode::from(1);
        }
    };
    let out = cfg.out.as_deref();
    match run::run(&cfg) {
        Ok(o) => {
            if let Err(e) = emit(out, &o.body) {
                eprintln!("evanskit: cannot write output: {e}");
                return ExitCode::from(1);
            }
            if let Some(side) = o.sidecar {
                match out {
                    Some(p) => {
                        let mut name = p.as_os_str().to_owned();
                        name.push(".roots.json");
                        if let Err(e) = std::fs::write(&name, side) {
                            eprintln!("evanskit: cannot write sidecar: {e}");
                            return ExitCode::from(1);
                        }
                    }
                    None => eprint!("{side}"),
                }
            }
            ExitCode::from(o.code)
        }
        Err(f) => {
            eprintln!("evanskit: {}", f.message);
            if let Some(body) = f.body {
                let _ = emit(out, &body);
            }
            ExitCode::from(f.code)
        }
    }
}
