//! `sicap verify`: seeded instance sweeps for the capacity identities and
//! bounds, one suite per named result.

use crate::report::{emit_suite, SuiteRow};
use crate::{CliError, CommonOpts};
use clap::ValueEnum;
use sicap::bounds::{
    check_receiver_genie_bound, demonstrate_tx_unbounded, mac_nc_minus_c_bound,
    mac_sum_genie_bound, nc_minus_c_bound, GenieSpec, GenieTarget,
};
use sicap::capacity::{
    capacity_causal, capacity_noncausal, capacity_rx_knows_tx, SolveConfig,
};
use sicap::channel::Dmc;
use sicap::generators::{
    make_random_access_mac, random_mac_independent, random_shared_state_channel,
    random_state_channel,
};
use sicap::multiuser::{
    mac_region_rx_knows, mac_sum_capacity_causal, mac_sum_grid_oracle, observation1_predicate,
    random_bc_aux,
};
use sicap::prob::{derive_seed, sample_dist};
use std::time::Instant;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Theorem5,
    Theorem6,
    Theorem7,
    Theorem8,
    Observation1,
}

impl Suite {
    fn label(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Theorem3 => "theorem3",
            Suite::Theorem4 => "theorem4",
            Suite::Theorem5 => "theorem5",
            Suite::Theorem6 => "theorem6",
            Suite::Theorem7 => "theorem7",
            Suite::Theorem8 => "theorem8",
            Suite::Observation1 => "observation1",
        }
    }

    fn default_count(self) -> usize {
        match self {
            Suite::Theorem1 => 200,
            Suite::Theorem2 => 100,
            Suite::Theorem3 => 4,
            Suite::Theorem4 => 50,
            Suite::Theorem5 | Suite::Theorem6 | Suite::Theorem7 | Suite::Theorem8 => 20,
            Suite::Observation1 => 500,
        }
    }
}

fn sizes(seed: u64) -> (usize, usize, usize) {
    (
        2 + (seed % 2) as usize,
        2 + ((seed / 2) % 2) as usize,
        2 + ((seed / 4) % 2) as usize,
    )
}

fn sweep_cfg(opts: &CommonOpts, seed: u64) -> SolveConfig {
    SolveConfig {
        restarts: opts.restarts.min(8),
        fmap_samples: 64,
        fmap_cap: 4096,
        max_iter: opts.max_iter.min(1500),
        seed,
        ..opts.solve_config()
    }
}

pub fn run(suite: Suite, count: Option<usize>, opts: &CommonOpts) -> Result<bool, CliError> {
    let count = count.unwrap_or_else(|| suite.default_count());
    let rows = match suite {
        Suite::Theorem1 => theorem1(count, opts)?,
        Suite::Theorem2 => theorem2(count, opts)?,
        Suite::Theorem3 => theorem3(opts)?,
        Suite::Theorem4 => theorem4(count, opts)?,
        Suite::Theorem5 => theorem5(count, opts)?,
        Suite::Theorem6 => theorem6(count, opts)?,
        Suite::Theorem7 => theorem7(count, opts)?,
        Suite::Theorem8 => theorem8(count, opts)?,
        Suite::Observation1 => observation1(count, opts)?,
    };
    emit_suite(rows, opts, move |rows| {
        let passed = rows.iter().filter(|r| r.satisfied).count();
        format!("suite {}: {passed}/{} satisfied", suite.label(), rows.len())
    })
}

/// Causal = non-causal = max I(X;Y|S_R) when S_T = S_R = S.
fn theorem1(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let (nx, ny, ns) = sizes(seed);
        let c = random_shared_state_channel(nx, ny, ns, derive_seed(seed, &[201]));
        let cfg = sweep_cfg(opts, seed);
        let start = Instant::now();
        let causal = capacity_causal(&c, &cfg)?;
        let noncausal = capacity_noncausal(&c, &cfg)?;
        let rx_knows = capacity_rx_knows_tx(&c, &cfg)?;
        let spread = (causal.value_bits - noncausal.value_bits)
            .abs()
            .max((causal.value_bits - rx_knows.value_bits).abs())
            .max((noncausal.value_bits - rx_knows.value_bits).abs());
        rows.push(SuiteRow {
            suite: "theorem1",
            instance_seed: seed,
            lhs_bits: spread,
            rhs_bits: 2e-3,
            slack_bits: 2e-3 - spread,
            satisfied: spread <= 2e-3,
            iterations: causal.iterations.max(noncausal.iterations),
            restarts: noncausal.restarts_used,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

/// Receiver genie bound C_G - C <= H(G), binary genies, exact solvers.
fn theorem2(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let (nx, ny, ns) = sizes(seed);
        let c = random_state_channel(nx, ny, ns, 2, 2, derive_seed(seed, &[301]));
        let cells = c.state_law.mass().len();
        let genie = if seed % 2 == 0 {
            let map: Vec<usize> = (0..cells)
                .map(|cell| (derive_seed(seed, &[302, cell as u64]) % 2) as usize)
                .collect();
            GenieSpec::deterministic(GenieTarget::Receiver, 2, &map, &c.state_law)
                .expect("valid genie")
        } else {
            let mut table = Vec::with_capacity(cells * 2);
            for cell in 0..cells {
                table.extend_from_slice(
                    sample_dist(2, derive_seed(seed, &[303, cell as u64])).weights(),
                );
            }
            GenieSpec::stochastic(GenieTarget::Receiver, 2, table, &c.state_law)
                .expect("valid genie")
        };
        let start = Instant::now();
        let rep = check_receiver_genie_bound(&c, &genie, &opts.solve_config())?;
        rows.push(SuiteRow {
            suite: "theorem2",
            instance_seed: seed,
            lhs_bits: rep.lhs_bits,
            rhs_bits: rep.rhs_bits,
            slack_bits: rep.slack_bits,
            satisfied: rep.satisfied,
            iterations: 0,
            restarts: 0,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

/// Unbounded transmitter-side gain on the erasure/parity ladder; one row
/// per N plus a final monotonicity row.
fn theorem3(opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let start = Instant::now();
    let table = demonstrate_tx_unbounded(&[1, 2, 4, 8], &opts.solve_config())?;
    let mut rows: Vec<SuiteRow> = table
        .iter()
        .map(|r| SuiteRow {
            suite: "theorem3",
            instance_seed: r.n_half as u64,
            lhs_bits: r.lower_bound_bits,
            rhs_bits: r.gap_bits,
            slack_bits: r.gap_bits - r.lower_bound_bits,
            satisfied: r.satisfied,
            iterations: 0,
            restarts: 0,
            wall_ms: start.elapsed().as_millis(),
        })
        .collect();
    let monotone = table.windows(2).all(|w| w[1].gap_bits > w[0].gap_bits);
    let min_step = table
        .windows(2)
        .map(|w| w[1].gap_bits - w[0].gap_bits)
        .fold(f64::INFINITY, f64::min);
    rows.push(SuiteRow {
        suite: "theorem3",
        instance_seed: 9999,
        lhs_bits: 0.0,
        rhs_bits: min_step,
        slack_bits: min_step,
        satisfied: monotone,
        iterations: 0,
        restarts: 0,
        wall_ms: start.elapsed().as_millis(),
    });
    Ok(rows)
}

/// Non-causal over causal gain bounded by H(S_T|S_R).
fn theorem4(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let (nx, ny, ns) = sizes(seed);
        let nst = 1 + (seed % 3) as usize;
        let nsr = 1 + ((seed / 3) % 3) as usize;
        let c = random_state_channel(nx, ny, ns, nst, nsr, derive_seed(seed, &[401]));
        let start = Instant::now();
        let rep = nc_minus_c_bound(&c, &sweep_cfg(opts, seed))?;
        rows.push(SuiteRow {
            suite: "theorem4",
            instance_seed: seed,
            lhs_bits: rep.lhs_bits,
            rhs_bits: rep.rhs_bits,
            slack_bits: rep.slack_bits,
            satisfied: rep.satisfied,
            iterations: 0,
            restarts: 0,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

fn mac_cfg(opts: &CommonOpts, seed: u64) -> SolveConfig {
    SolveConfig {
        restarts: opts.restarts.min(8),
        seed,
        ..opts.solve_config()
    }
}

/// MAC sum capacity vs the lattice oracle, plus the two-user random-access
/// sum (appended as the final row).
fn theorem5(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count + 1);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let m = random_mac_independent(2, derive_seed(seed, &[701]), true);
        let cfg = mac_cfg(opts, seed);
        let start = Instant::now();
        let solver = mac_sum_capacity_causal(&m, &cfg)?;
        let oracle = mac_sum_grid_oracle(&m, 12, &cfg)?;
        let dev = (solver.value_bits - oracle).abs();
        rows.push(SuiteRow {
            suite: "theorem5",
            instance_seed: seed,
            lhs_bits: dev,
            rhs_bits: 5e-3,
            slack_bits: 5e-3 - dev,
            satisfied: dev <= 5e-3,
            iterations: solver.iterations,
            restarts: solver.restarts_used,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    let start = Instant::now();
    let mac = make_random_access_mac(&Dmc::noiseless(2), 0.5, true);
    let sum = mac_sum_capacity_causal(&mac, &mac_cfg(opts, opts.seed))?;
    let dev = (sum.value_bits - 1.0).abs();
    rows.push(SuiteRow {
        suite: "theorem5",
        instance_seed: opts.seed.wrapping_add(count as u64),
        lhs_bits: dev,
        rhs_bits: 1e-6,
        slack_bits: 1e-6 - dev,
        satisfied: dev <= 1e-6,
        iterations: sum.iterations,
        restarts: sum.restarts_used,
        wall_ms: start.elapsed().as_millis(),
    });
    Ok(rows)
}

/// Sum vertex of the receiver-knows region vs the sum-capacity solver.
fn theorem6(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let m = random_mac_independent(2, derive_seed(seed, &[701]), true);
        let cfg = mac_cfg(opts, seed);
        let start = Instant::now();
        let solver = mac_sum_capacity_causal(&m, &cfg)?;
        let region = mac_region_rx_knows(&m, 12, &cfg)?;
        let dev = (solver.value_bits - region.max_sum_bits).abs();
        rows.push(SuiteRow {
            suite: "theorem6",
            instance_seed: seed,
            lhs_bits: dev,
            rhs_bits: 5e-3,
            slack_bits: 5e-3 - dev,
            satisfied: dev <= 5e-3,
            iterations: solver.iterations,
            restarts: solver.restarts_used,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

/// MAC receiver-genie bound on the sum rate.
fn theorem7(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let m = random_mac_independent(2, derive_seed(seed, &[702]), false);
        let cells = m.state_law.mass().len();
        let map: Vec<usize> = (0..cells)
            .map(|cell| (derive_seed(seed, &[703, cell as u64]) % 2) as usize)
            .collect();
        let genie = GenieSpec::deterministic(GenieTarget::Receiver, 2, &map, &m.state_law)
            .expect("valid genie");
        let cfg = mac_cfg(opts, seed);
        let start = Instant::now();
        let rep = mac_sum_genie_bound(&m, &genie, &cfg)?;
        rows.push(SuiteRow {
            suite: "theorem7",
            instance_seed: seed,
            lhs_bits: rep.lhs_bits,
            rhs_bits: rep.rhs_bits,
            slack_bits: rep.slack_bits,
            satisfied: rep.satisfied,
            iterations: 0,
            restarts: 0,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

/// MAC gap bound: sum non-causal minus causal at most H(S_T1,S_T2|S_R).
fn theorem8(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let rx_knows = seed % 2 == 0;
        let m = random_mac_independent(2, derive_seed(seed, &[704]), rx_knows);
        let cfg = SolveConfig {
            fmap_samples: 64,
            fmap_cap: 4096,
            ..mac_cfg(opts, seed)
        };
        let start = Instant::now();
        let rep = mac_nc_minus_c_bound(&m, &cfg)?;
        rows.push(SuiteRow {
            suite: "theorem8",
            instance_seed: seed,
            lhs_bits: rep.lhs_bits,
            rhs_bits: rep.rhs_bits,
            slack_bits: rep.slack_bits,
            satisfied: rep.satisfied,
            iterations: 0,
            restarts: 0,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

/// Dual-form agreement of the inner-bound equivalence defect, plus the two
/// constructed classification rows at the end.
fn observation1(count: usize, opts: &CommonOpts) -> Result<Vec<SuiteRow>, CliError> {
    let mut rows = Vec::with_capacity(count + 2);
    for i in 0..count as u64 {
        let seed = opts.seed.wrapping_add(i);
        let a = random_bc_aux(2, 2, 2, 2, 2, derive_seed(seed, &[801]));
        let pst = sample_dist(2, derive_seed(seed, &[802]));
        let start = Instant::now();
        let rep = observation1_predicate(&a, &pst);
        let diff = (rep.delta_bits - rep.delta_alt_bits).abs();
        rows.push(SuiteRow {
            suite: "observation1",
            instance_seed: seed,
            lhs_bits: diff,
            rhs_bits: 1e-9,
            slack_bits: 1e-9 - diff,
            satisfied: diff <= 1e-9,
            iterations: 0,
            restarts: 0,
            wall_ms: start.elapsed().as_millis(),
        });
    }
    // constructed positive instance: auxiliaries independent of the state
    let start = Instant::now();
    let independent = random_bc_aux(2, 2, 2, 2, 1, derive_seed(opts.seed, &[803]));
    let pos = observation1_predicate(&independent, &sicap::prob::Dist::uniform(1));
    rows.push(SuiteRow {
        suite: "observation1",
        instance_seed: opts.seed.wrapping_add(count as u64),
        lhs_bits: pos.delta_bits.abs(),
        rhs_bits: 1e-9,
        slack_bits: 1e-9 - pos.delta_bits.abs(),
        satisfied: pos.holds,
        iterations: 0,
        restarts: 0,
        wall_ms: start.elapsed().as_millis(),
    });
    // constructed negative instance: U = V = S_T uniform, W constant
    let mut aux = vec![0.0; 8];
    aux[0] = 1.0;
    aux[7] = 1.0;
    let x_given: Vec<f64> = (0..8).flat_map(|_| vec![1.0, 0.0]).collect();
    let law = sicap::multiuser::BcAuxLaw::new(
        1,
        2,
        2,
        2,
        2,
        sicap::multiuser::BcMode::NonCausal,
        aux,
        x_given,
    )
    .expect("constructed law is valid");
    let neg = observation1_predicate(&law, &sicap::prob::Dist::uniform(2));
    rows.push(SuiteRow {
        suite: "observation1",
        instance_seed: opts.seed.wrapping_add(count as u64 + 1),
        lhs_bits: neg.delta_bits,
        rhs_bits: -1.0,
        slack_bits: neg.delta_bits + 1.0,
        satisfied: !neg.holds && (neg.delta_bits + 1.0).abs() <= 1e-9,
        iterations: 0,
        restarts: 0,
        wall_ms: start.elapsed().as_millis(),
    });
    Ok(rows)
}
