//! The `cdmpm` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 corrupt container, 3 I/O error,
//! 4 self-test failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::alphabet::Alphabet;
use crate::analysis::redundancy_report;
use crate::codec::{compress, decompress, MAX_INPUT_LEN};
use crate::corpus::{run_cases, standard_corpus};
use crate::error::Error;
use crate::partition::{floor_log, Mode, Params};
use crate::transform::{build_multilevel, render_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CORRUPT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

/// Default level cap when `--levels` is omitted.
pub const DEFAULT_LEVEL_CAP: u32 = 24;

/// Largest input `trace` prints without `--force`.
pub const TRACE_LIMIT: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "cdmpm", version, about = "Context-dependent multilevel pattern matching compressor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Branching factor.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=255))]
    r: u32,
    /// Requested level count; defaults to min(24, floor(log_r n)).
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=63))]
    levels: Option<u32>,
    /// cdmpm or mpm.
    #[arg(long, default_value = "cdmpm")]
    mode: Mode,
}

impl TransformArgs {
    fn params(&self, n: usize) -> Result<Params, Error> {
        let levels = self
            .levels
            .unwrap_or_else(|| DEFAULT_LEVEL_CAP.min(floor_log(n, self.r as usize)));
        Params::new(self.r, levels, self.mode)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a file ("-" for stdin).
    Compress {
        #[command(flatten)]
        transform: TransformArgs,
        /// Output path ("-" for stdout).
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
        input: PathBuf,
    },
    /// Restore a compressed file.
    Decompress {
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
        input: PathBuf,
    },
    /// Compress and print the entropy and redundancy report.
    Analyze {
        #[command(flatten)]
        transform: TransformArgs,
        /// Refinement state count used in the theorem constant.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        input: PathBuf,
    },
    /// Print the per-level transform trace.
    Trace {
        #[command(flatten)]
        transform: TransformArgs,
        /// Also print the grammar productions.
        #[arg(long)]
        grammar: bool,
        /// Trace inputs longer than 4096 bytes.
        #[arg(long)]
        force: bool,
        input: PathBuf,
    },
    /// Round-trip and bound checks over the built-in corpus.
    Selftest {
        /// Print one line per case.
        #[arg(long)]
        verbose: bool,
    },
}

enum Failure {
    Usage(String),
    Corrupt(String),
    Io(String),
    Selftest(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Corrupt(_) | Error::Desync(_) => Failure::Corrupt(e.to_string()),
            Error::Io(_) => Failure::Io(e.to_string()),
            Error::Invariant(_) => Failure::Selftest(e.to_string()),
            Error::InvalidParams(_) | Error::SymbolNotInAlphabet { .. } => Failure::Usage(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    let data = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(|e| io_failure(path, e))?;
        buf
    } else {
        fs::read(path).map_err(|e| io_failure(path, e))?
    };
    if data.len() as u64 > MAX_INPUT_LEN {
        return Err(Failure::Usage(format!(
            "{}: input exceeds {MAX_INPUT_LEN} bytes",
            path.display()
        )));
    }
    Ok(data)
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let result = if path.as_os_str() == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush())
    } else {
        fs::write(path, bytes)
    };
    result.map_err(|e| io_failure(path, e))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Corrupt(m) => (EXIT_CORRUPT, m),
                Failure::Io(m) => (EXIT_IO, m),
                Failure::Selftest(m) => (EXIT_SELFTEST, m),
            };
            eprintln!("cdmpm: {msg}");
            code
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compress {
            transform,
            output,
            input,
        } => {
            let data = read_input(&input)?;
            let bytes = compress(&data, transform.params(data.len())?)?;
            write_output(&output, &bytes)
        }
        Command::Decompress { output, input } => {
            let bytes = read_input(&input)?;
            let data = decompress(&bytes)?;
            write_output(&output, &data)
        }
        Command::Analyze { transform, k, input } => {
            let data = read_input(&input)?;
            let report = redundancy_report(&data, transform.params(data.len())?, k)?;
            write_output(Path::new("-"), report.to_string().as_bytes())
        }
        Command::Trace {
            transform,
            grammar,
            force,
            input,
        } => {
            let data = read_input(&input)?;
            if data.len() > TRACE_LIMIT && !force {
                return Err(Failure::Usage(format!(
                    "input has {} bytes; trace prints at most {TRACE_LIMIT} without --force",
                    data.len()
                )));
            }
            let rep = build_multilevel(&data, transform.params(data.len())?, &Alphabet::infer(&data))?;
            let mut text = render_trace(&rep);
            if grammar {
                text.push_str(&rep.grammar().to_string());
            }
            write_output(Path::new("-"), text.as_bytes())
        }
        Command::Selftest { verbose } => selftest(verbose),
    }
}

fn selftest(verbose: bool) -> Result<(), Failure> {
    let started = Instant::now();
    let cases = standard_corpus();
    let results = run_cases(&cases);
    let mut failures = 0usize;
    for (case, result) in cases.iter().zip(results) {
        let line = match result {
            Ok(res) => {
                let status = if res.ok() { "ok" } else { "FAIL" };
                if !res.ok() {
                    failures += 1;
                }
                format!(
                    "{status} {case} roundtrip={} lemma={} theorem={} bits={}",
                    res.roundtrip,
                    res.report.lemma_pass(),
                    res.theorem_ok(),
                    res.report.payload_bits
                )
            }
            Err(e) => {
                failures += 1;
                format!("FAIL {case} error: {e}")
            }
        };
        if verbose || line.starts_with("FAIL") {
            println!("{line}");
        }
    }
    println!(
        "selftest: {} cases, {failures} failures, {:.1}s",
        cases.len(),
        started.elapsed().as_secs_f64()
    );
    if failures > 0 {
        return Err(Failure::Selftest(format!("{failures} corpus cases failed")));
    }
    Ok(())
}
