use std::process::ExitCode;

use clap::Parser;

use ordhull_cli::{run, Cli};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    ExitCode::from(run(&cli, &args, &mut out))
}
