//! `sicap scenario`: materialize a named example channel, write its file
//! and report the capacity/bound table it illustrates.

use crate::report::Report;
use crate::{CliError, CommonOpts, Format};
use clap::ValueEnum;
use sicap::bounds::{extend_receiver, extend_receiver_mac, GenieSpec};
use sicap::capacity::{blahut_arimoto, capacity_causal, capacity_rx_knows_tx};
use sicap::channel::{block_static_expand, Dmc};
use sicap::generators::{make_erasure_parity, make_random_access, make_random_access_mac};
use sicap::io::{content_hash, write_channel, Channel};
use sicap::multiuser::mac_sum_capacity_causal;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Name {
    ErasureParity,
    RandomAccess,
    RandomAccessMac,
    BlockStatic,
}

impl Name {
    fn label(self) -> &'static str {
        match self {
            Name::ErasureParity => "erasure-parity",
            Name::RandomAccess => "random-access",
            Name::RandomAccessMac => "random-access-mac",
            Name::BlockStatic => "block-static",
        }
    }
}

pub fn run(
    name: Name,
    n: usize,
    p_on: f64,
    rx_knows: bool,
    channel_out: Option<&Path>,
    opts: &CommonOpts,
) -> Result<bool, CliError> {
    if !(0.0..=1.0).contains(&p_on) {
        return Err(CliError::Input(format!(
            "--p-on must lie in [0, 1], got {p_on}"
        )));
    }
    if n == 0 {
        return Err(CliError::Input("--n must be >= 1".into()));
    }
    let cfg = opts.solve_config();
    let mut report = Report::new();
    let mut kv: Vec<(&'static str, f64)> = Vec::new();

    let channel = match name {
        Name::ErasureParity => {
            let c = make_erasure_parity(n);
            let plain = blahut_arimoto(&c.plain_dmc(), cfg.tol_bits, cfg.max_iter);
            let causal = capacity_causal(&c, &cfg)?;
            kv.push(("capacity_no_si_bits", plain.value_bits));
            kv.push(("capacity_causal_tx_bits", causal.value_bits));
            kv.push(("gap_bits", causal.value_bits - plain.value_bits));
            kv.push(("gap_lower_bound_bits", 0.5 * (n as f64).log2() - 0.5));
            Channel::Single(c)
        }
        Name::RandomAccess => {
            let base = Dmc::noiseless(2);
            let base_capacity = blahut_arimoto(&base, cfg.tol_bits, cfg.max_iter).value_bits;
            let c = make_random_access(&base, p_on, rx_knows);
            let plain = blahut_arimoto(&c.plain_dmc(), cfg.tol_bits, cfg.max_iter);
            let causal = capacity_causal(&c, &cfg)?;
            kv.push(("base_capacity_bits", base_capacity));
            kv.push(("capacity_no_si_bits", plain.value_bits));
            kv.push(("capacity_causal_tx_bits", causal.value_bits));
            if rx_knows {
                let exact = capacity_rx_knows_tx(&c, &cfg)?;
                kv.push(("capacity_rx_knows_bits", exact.value_bits));
                kv.push(("expected_scaled_base_bits", p_on * base_capacity));
            } else {
                // genie view: revealing the switch yields p_on * C0, worth
                // at most one bit
                let genie = GenieSpec::full_state(&c).expect("valid genie");
                let revealed = capacity_causal(&extend_receiver(&c, &genie), &cfg)?;
                kv.push(("capacity_with_state_genie_bits", revealed.value_bits));
                kv.push(("genie_entropy_bits", genie.entropy_bits));
                kv.push((
                    "genie_lower_bound_bits",
                    revealed.value_bits - genie.entropy_bits,
                ));
            }
            Channel::Single(c)
        }
        Name::RandomAccessMac => {
            let base = Dmc::noiseless(2);
            let base_capacity = blahut_arimoto(&base, cfg.tol_bits, cfg.max_iter).value_bits;
            let m = make_random_access_mac(&base, p_on, rx_knows);
            let sum = mac_sum_capacity_causal(&m, &cfg)?;
            kv.push(("base_capacity_bits", base_capacity));
            kv.push(("sum_causal_bits", sum.value_bits));
            if !rx_knows {
                let genie = GenieSpec::full_state_mac(&m).expect("valid genie");
                let revealed = mac_sum_capacity_causal(&extend_receiver_mac(&m, &genie), &cfg)?;
                kv.push(("sum_with_state_genie_bits", revealed.value_bits));
                kv.push(("genie_entropy_bits", genie.entropy_bits));
                kv.push((
                    "genie_lower_bound_bits",
                    revealed.value_bits - genie.entropy_bits,
                ));
            }
            Channel::Mac(m)
        }
        Name::BlockStatic => {
            let base = Dmc::noiseless(2);
            let c = make_random_access(&base, p_on, false);
            let expanded = block_static_expand(&c, n, cfg.strategy_cap)
                .map_err(sicap::capacity::SolveError::from)?;
            let causal = capacity_causal(&expanded, &cfg)?;
            let genie = GenieSpec::full_state(&expanded).expect("valid genie");
            let revealed = capacity_causal(&extend_receiver(&expanded, &genie), &cfg)?;
            let per_use = 1.0 / n as f64;
            kv.push(("block_length", n as f64));
            kv.push(("capacity_causal_per_use_bits", causal.value_bits * per_use));
            kv.push((
                "capacity_with_state_genie_per_use_bits",
                revealed.value_bits * per_use,
            ));
            kv.push((
                "genie_entropy_per_use_bits",
                genie.entropy_bits * per_use,
            ));
            kv.push((
                "genie_lower_bound_per_use_bits",
                (revealed.value_bits - genie.entropy_bits) * per_use,
            ));
            Channel::Single(expanded)
        }
    };

    let default_path = PathBuf::from(format!("{}.json", name.label()));
    let channel_path = channel_out.unwrap_or(&default_path);
    write_channel(&channel, channel_path)?;
    let hash = content_hash(&channel);

    match opts.format {
        Format::Text => {
            report.kv("channel", &hash);
            report.header(opts);
            report.kv("scenario", name.label());
            report.kv("channel_file", channel_path.display());
            for (key, value) in &kv {
                report.kv_bits(key, *value);
            }
        }
        Format::Csv => {
            report.line("scenario,channel_hash,key,value");
            for (key, value) in &kv {
                report.line(format!(
                    "{},{},{},{}",
                    name.label(),
                    hash,
                    key,
                    crate::report::csv_f64(*value)
                ));
            }
        }
    }
    report.emit(opts)?;
    Ok(false)
}
