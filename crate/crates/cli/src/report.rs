//! Report assembly and atomic output.
//!
//! Text reports print floats with six decimal places and carry no timing,
//! so identical inputs produce identical bytes. CSV reports print floats
//! with 17 significant digits and include the wall-clock column; that
//! column is the one non-deterministic field.

use crate::{CliError, CommonOpts, Format};
use std::fmt::Write as _;

pub struct Report {
    buffer: String,
}

impl Report {
    pub fn new() -> Self {
        Report {
            buffer: String::new(),
        }
    }

    pub fn line(&mut self, line: impl AsRef<str>) {
        self.buffer.push_str(line.as_ref());
        self.buffer.push('\n');
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.buffer, "{key} {value}").expect("formatting cannot fail");
    }

    pub fn kv_bits(&mut self, key: &str, value: f64) {
        writeln!(self.buffer, "{key} {value:.6}").expect("formatting cannot fail");
    }

    /// Echoes the configuration every report header carries.
    pub fn header(&mut self, opts: &CommonOpts) {
        writeln!(
            self.buffer,
            "config seed={} tol_bits={:.6e} max_iter={} restarts={} cap_strategies={} cap_grid={}",
            opts.seed,
            opts.tol_bits,
            opts.max_iter,
            opts.restarts,
            opts.cap_strategies,
            opts.cap_grid
        )
        .expect("formatting cannot fail");
    }

    /// Writes to `--out` (write-to-temp then rename, so failures leave no
    /// partial file) or to standard output.
    pub fn emit(self, opts: &CommonOpts) -> Result<(), CliError> {
        match &opts.out {
            Some(path) => {
                let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
                let tmp = match dir {
                    Some(d) => d.join(format!(
                        ".{}.tmp",
                        path.file_name().unwrap_or_default().to_string_lossy()
                    )),
                    None => std::path::PathBuf::from(format!(
                        ".{}.tmp",
                        path.file_name().unwrap_or_default().to_string_lossy()
                    )),
                };
                std::fs::write(&tmp, self.buffer.as_bytes())?;
                std::fs::rename(&tmp, path)?;
                Ok(())
            }
            None => {
                print!("{}", self.buffer);
                Ok(())
            }
        }
    }
}

pub fn csv_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One verification-sweep row; serialized in the fixed column order
/// `suite,instance_seed,lhs_bits,rhs_bits,slack_bits,satisfied,iterations,restarts,wall_ms`.
pub struct SuiteRow {
    pub suite: &'static str,
    pub instance_seed: u64,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub slack_bits: f64,
    pub satisfied: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub wall_ms: u128,
}

pub const SUITE_CSV_HEADER: &str =
    "suite,instance_seed,lhs_bits,rhs_bits,slack_bits,satisfied,iterations,restarts,wall_ms";

impl SuiteRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.suite,
            self.instance_seed,
            csv_f64(self.lhs_bits),
            csv_f64(self.rhs_bits),
            csv_f64(self.slack_bits),
            self.satisfied,
            self.iterations,
            self.restarts,
            self.wall_ms
        )
    }

    pub fn text(&self) -> String {
        format!(
            "{:<14} seed {:>6}  lhs {:>12.6}  rhs {:>12.6}  slack {:>12.6}  {}",
            self.suite,
            self.instance_seed,
            self.lhs_bits,
            self.rhs_bits,
            self.slack_bits,
            if self.satisfied { "ok" } else { "VIOLATION" }
        )
    }
}

/// Renders a whole sweep, sorted by instance seed, and returns whether any
/// row is violated.
pub fn emit_suite(
    mut rows: Vec<SuiteRow>,
    opts: &CommonOpts,
    summary: impl FnOnce(&[SuiteRow]) -> String,
) -> Result<bool, CliError> {
    rows.sort_by_key(|r| r.instance_seed);
    let mut report = Report::new();
    match opts.format {
        Format::Csv => {
            report.line(SUITE_CSV_HEADER);
            for row in &rows {
                report.line(row.csv());
            }
        }
        Format::Text => {
            report.header(opts);
            for row in &rows {
                report.line(row.text());
            }
            report.line(summary(&rows));
        }
    }
    let violated = rows.iter().any(|r| !r.satisfied);
    report.emit(opts)?;
    Ok(violated)
}
