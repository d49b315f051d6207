mod args;
mod commands;
mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use args::Cli;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or environment: exit code 2.
    Usage(String),
    /// The computation itself failed: exit code 1.
    Domain(String),
}

impl From<qsphere::Error> for CliError {
    fn from(e: qsphere::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Where the primary output goes, and whether run-dependent lines are kept.
pub struct Output {
    path: Option<PathBuf>,
    pub header: bool,
}

impl Output {
    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Domain(format!("cannot create {}: {e}", p.display())))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }

    pub fn csv(&self, body: impl FnOnce(&mut dyn Write) -> qsphere::Result<()>) -> Result<(), CliError> {
        let mut w = self.sink()?;
        if self.header {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            writeln!(w, "# qsphere {} unix_time={secs}", env!("CARGO_PKG_VERSION"))?;
        }
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn json(&self, value: &serde_json::Value) -> Result<(), CliError> {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Domain(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("QSPHERE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::Usage(format!("QSPHERE_THREADS must be an integer >= 1, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Domain(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| commands::run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: qsphere [OPTIONS] <COMMAND>; see `qsphere --help`");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
