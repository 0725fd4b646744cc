mod args;
mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::Map;

use primeprog::Exec;

use crate::args::{Cli, Command, GlobalArgs};
use crate::config::merge;
use crate::error::{CliResult, EXIT_FAILURE, EXIT_USAGE};
use crate::output::Report;

fn main() {
    std::process::exit(run(std::env::args_os()));
}

fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| error::CliError::Config(e.to_string()))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) -> CliResult<()> {
    Ok(())
}

fn execute(cli: Cli) -> CliResult<i32> {
    let file = match &cli.global.config {
        Some(path) => config::load(path)?,
        None => Map::new(),
    };
    let mut g: GlobalArgs = merge(&cli.global, &file)?;
    g.seed.get_or_insert(0);
    configure_threads(g.threads)?;
    let exec = Exec::default();

    let report = match cli.command {
        Command::Sieve(a) => commands::sieve(merge(&a, &file)?, &g)?,
        Command::Admissible(a) => commands::admissible(merge(&a, &file)?, &g)?,
        Command::MaynardSet(a) => commands::maynard_set(merge(&a, &file)?, &g, exec)?,
        Command::NuStats(a) => commands::nu_stats(merge(&a, &file)?, &g, exec)?,
        Command::LocalFactors(a) => commands::local_factors(merge(&a, &file)?, &g)?,
        Command::Correlation(a) => commands::correlation(merge(&a, &file)?, &g, exec)?,
        Command::PolyForms(a) => commands::poly_forms(merge(&a, &file)?, &g, exec)?,
        Command::Search(a) => commands::search(merge(&a, &file)?, &g, exec)?,
        Command::Pipeline(a) => commands::pipeline(merge(&a, &file)?, &g, exec)?,
        Command::Selftest => commands::selftest(&g)?,
    };
    emit(&report, &g)?;
    Ok(if report.success { 0 } else { EXIT_FAILURE })
}

fn emit(report: &Report, g: &GlobalArgs) -> CliResult<()> {
    let mut out: Box<dyn Write> = match &g.output {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    if g.csv {
        report.write_csv(&mut out)?;
    } else {
        report.write_json(&mut out)?;
    }
    out.flush()?;
    Ok(())
}
