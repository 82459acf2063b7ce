//! `sicap solve`: capacities of a channel file.

use crate::report::{csv_f64, Report};
use crate::{CliError, CommonOpts, Format};
use clap::ValueEnum;
use sicap::capacity::{
    blahut_arimoto, capacity_causal, capacity_noncausal, capacity_rx_knows_tx, common_form_table,
    CapacityReport,
};
use sicap::channel::Severity;
use sicap::io::{content_hash, read_channel, Channel};
use std::path::Path;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Causal,
    Noncausal,
    NoSi,
    RxKnowsTx,
    CommonFormTable,
}

impl Case {
    fn label(self) -> &'static str {
        match self {
            Case::Causal => "causal",
            Case::Noncausal => "noncausal",
            Case::NoSi => "no-si",
            Case::RxKnowsTx => "rx-knows-tx",
            Case::CommonFormTable => "common-form-table",
        }
    }
}

pub const SOLVE_CSV_HEADER: &str =
    "case,channel_hash,variant,value_bits,iterations,restarts,converged";

pub fn run(path: &Path, case: Case, opts: &CommonOpts) -> Result<bool, CliError> {
    let channel = read_channel(path)?;
    let errors: Vec<String> = channel
        .validate()
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.to_string())
        .collect();
    if !errors.is_empty() {
        return Err(CliError::Input(format!(
            "channel fails validation: {}",
            errors.join("; ")
        )));
    }
    let Channel::Single(c) = &channel else {
        return Err(CliError::Input(format!(
            "`solve` expects a single-user channel, found kind {:?}",
            channel.kind()
        )));
    };
    let hash = content_hash(&channel);
    let cfg = opts.solve_config();

    let mut rows: Vec<(String, CapacityReport)> = Vec::new();
    match case {
        Case::Causal => rows.push(("causal".into(), capacity_causal(c, &cfg)?)),
        Case::Noncausal => rows.push(("noncausal".into(), capacity_noncausal(c, &cfg)?)),
        Case::NoSi => rows.push((
            "no-si".into(),
            blahut_arimoto(&c.plain_dmc(), cfg.tol_bits, cfg.max_iter),
        )),
        Case::RxKnowsTx => rows.push(("rx-knows-tx".into(), capacity_rx_knows_tx(c, &cfg)?)),
        Case::CommonFormTable => {
            let table = common_form_table(c, &cfg)?;
            if !table.forced_equalities_ok {
                return Err(CliError::NonConvergence(format!(
                    "forced equalities of the common-form table disagree by {} bits",
                    table.max_forced_gap_bits
                )));
            }
            for row in table.rows {
                let label = format!(
                    "{}{}{}",
                    if row.causal { "causal" } else { "noncausal" },
                    if row.tx_si { "+st" } else { "-st" },
                    if row.rx_si { "+sr" } else { "-sr" },
                );
                rows.push((label, row.report));
            }
        }
    }

    if rows.iter().any(|(_, r)| !r.converged) {
        return Err(CliError::NonConvergence(
            "a solver hit max_iter before reaching the tolerance".into(),
        ));
    }

    let mut report = Report::new();
    match opts.format {
        Format::Text => {
            report.kv("channel", &hash);
            report.header(opts);
            report.kv("case", case.label());
            for (label, rep) in &rows {
                if rows.len() > 1 {
                    report.kv("variant", label);
                }
                report.kv_bits("value_bits", rep.value_bits);
                report.kv("iterations", rep.iterations);
                report.kv("restarts", rep.restarts_used);
                report.kv("converged", rep.converged);
                if !rep.exhaustive {
                    report.kv("exhaustive", false);
                }
            }
        }
        Format::Csv => {
            report.line(SOLVE_CSV_HEADER);
            for (label, rep) in &rows {
                report.line(format!(
                    "{},{},{},{},{},{},{}",
                    case.label(),
                    hash,
                    label,
                    csv_f64(rep.value_bits),
                    rep.iterations,
                    rep.restarts_used,
                    rep.converged
                ));
            }
        }
    }
    report.emit(opts)?;
    Ok(false)
}
