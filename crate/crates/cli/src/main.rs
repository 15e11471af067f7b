mod args;
mod commands;
mod output;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use pssts::Error;

use args::{Cli, Command, Format, Request};
use commands::{is_truncation, Status};
use output::{envelope, metadata, read_request, write_csv, Report};

const EXIT_VALIDATION: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;
const EXIT_TRUNCATION: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation(_) => EXIT_TOLERANCE,
        e if is_truncation(e) => EXIT_TRUNCATION,
        _ => EXIT_VALIDATION,
    }
}

fn render(report: &Report, format: Format, elapsed: Option<f64>) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, report).expect("writing to memory");
            buf
        }
        Format::Json => envelope(report, &metadata(elapsed), true).into_bytes(),
    }
}

fn emit(bytes: &[u8], path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (request, file_format) = match &cli.command {
        Command::Rerun { file } => {
            let loaded = fs::read_to_string(file)
                .map_err(|e| e.to_string())
                .and_then(|text| read_request(&text));
            match loaded {
                Ok((req, fmt)) => (req, Some(fmt)),
                Err(msg) => {
                    eprintln!("error: {}: {msg}", file.display());
                    return ExitCode::from(EXIT_VALIDATION);
                }
            }
        }
        other => match Request::from_command(other) {
            Ok(Some(req)) => (req, None),
            Ok(None) => unreachable!("only rerun has no direct request"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(exit_code(&e));
            }
        },
    };
    if let Err(e) = request.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }

    let start = Instant::now();
    let (report, status) = match request.run() {
        Ok(done) => done,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let elapsed = cli.timings.then(|| start.elapsed().as_secs_f64());
    let format = cli.format.or(file_format).unwrap_or(report.default_format);

    if let Err(e) = emit(&render(&report, format, elapsed), cli.out.as_deref()) {
        eprintln!("error: writing output: {e}");
        return ExitCode::FAILURE;
    }
    if let Command::Wigner {
        summary: Some(path),
        ..
    } = &cli.command
    {
        if let Err(e) = fs::write(path, envelope(&report, &metadata(elapsed), false)) {
            eprintln!("error: writing summary: {e}");
            return ExitCode::FAILURE;
        }
    }
    match status {
        Status::Ok => ExitCode::SUCCESS,
        Status::ToleranceBreach => {
            eprintln!("oracle comparison exceeded tolerance; see the report");
            ExitCode::from(EXIT_TOLERANCE)
        }
        Status::Truncation => {
            eprintln!(
                "error: {}",
                report.summary["error"]
                    .as_str()
                    .unwrap_or("truncation failure")
            );
            ExitCode::from(EXIT_TRUNCATION)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(
            exit_code(&Error::InvalidParameter("x".into())),
            EXIT_VALIDATION
        );
        assert_eq!(
            exit_code(&Error::AnnihilatedVacuum { m: 1 }),
            EXIT_VALIDATION
        );
        assert_eq!(
            exit_code(&Error::UnevolvedTime { kappa_t: 0.0 }),
            EXIT_VALIDATION
        );
        assert_eq!(
            exit_code(&Error::InvariantViolation("x".into())),
            EXIT_TOLERANCE
        );
        assert_eq!(
            exit_code(&Error::MaxDimExceeded { trace: vec![] }),
            EXIT_TRUNCATION
        );
        assert_eq!(
            exit_code(&Error::StepSizeTooCoarse {
                dt: 0.1,
                distance: 1.0
            }),
            EXIT_TRUNCATION
        );
        assert_eq!(
            exit_code(&Error::GridTooSmall { outside_mass: 1.0 }),
            EXIT_TRUNCATION
        );
    }
}
