mod args;
mod error;
mod report;
mod verbs;

use std::process::exit;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::Cli;
use error::CliError;

fn fail(e: &CliError) -> ! {
    let detail = e.to_string().replace('\n', " ");
    eprintln!("ERROR {} {detail}", e.code());
    if matches!(e, CliError::Usage(_)) {
        eprintln!("{}", Cli::command().render_usage());
    }
    exit(e.exit_code())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 64,
            };
            let _ = e.print();
            exit(code);
        }
    };
    let start = Instant::now();
    let (report, hash) = match verbs::run(&cli) {
        Ok(done) => done,
        Err(e) => fail(&e),
    };
    let elapsed = if cli.no_timing { 0 } else { start.elapsed().as_millis() };
    match report.render(cli.emit, cli.verb.name(), &hash, elapsed) {
        Ok(text) => print!("{text}"),
        Err(e) => fail(&e),
    }
    if let Some(e) = &report.failure {
        fail(e);
    }
}
