//! Executable capacity bounds with pass/fail reports.
//!
//! The central device is a genie that hands a receiver extra side
//! information `G` drawn per channel use from a conditional law over the
//! state tuple. The checkers compute both sides of each bound with the
//! solvers from [`crate::capacity`] and [`crate::multiuser`] and report the
//! slack. Defaults follow a one-sided tolerance policy: 1e-6 bits where
//! both sides come from exact Blahut-Arimoto runs, 2e-3 bits where the
//! ascent solvers (which can only under-estimate an achievable value)
//! participate.

use crate::capacity::{
    capacity_causal, capacity_noncausal, CapacityReport, SolveConfig, SolveError,
};
use crate::channel::{MacChannel, StateChannel};
use crate::generators::make_erasure_parity;
use crate::multiuser::{mac_noncausal_inner_sum, mac_sum_capacity_causal};
use crate::prob::JointTable;

/// Tolerance for bounds evaluated entirely by exact solvers.
pub const EXACT_TOL_BITS: f64 = 1e-6;
/// Tolerance for bounds with an ascent-solver side.
pub const SOLVER_TOL_BITS: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenieTarget {
    Receiver,
    Transmitter,
}

/// Side information `G` granted by a genie: a conditional law over the
/// cells of a channel's state law. `entropy_bits` is the per-use entropy of
/// the induced marginal of `G`.
#[derive(Debug, Clone)]
pub struct GenieSpec {
    pub target: GenieTarget,
    pub g_size: usize,
    /// Rows indexed by the flat state-law cell, each a law over `G`.
    table: Vec<f64>,
    pub entropy_bits: f64,
}

impl GenieSpec {
    /// A stochastic genie given one conditional row per state-law cell.
    pub fn stochastic(
        target: GenieTarget,
        g_size: usize,
        table: Vec<f64>,
        state_law: &JointTable,
    ) -> Result<Self, String> {
        let cells = state_law.mass().len();
        if g_size == 0 || table.len() != cells * g_size {
            return Err(format!(
                "genie table must hold {cells} rows of {g_size} entries"
            ));
        }
        for (cell, row) in table.chunks(g_size).enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&v| !v.is_finite() || v < 0.0) || (sum - 1.0).abs() > 1e-12 {
                return Err(format!("genie row {cell} is not a distribution"));
            }
        }
        let mut marginal = vec![0.0; g_size];
        for (cell, &mass) in state_law.mass().iter().enumerate() {
            for g in 0..g_size {
                marginal[g] += mass * table[cell * g_size + g];
            }
        }
        Ok(Self {
            target,
            g_size,
            table,
            entropy_bits: crate::prob::entropy_bits(&marginal),
        })
    }

    /// A deterministic genie `g = map(cell)`.
    pub fn deterministic(
        target: GenieTarget,
        g_size: usize,
        map: &[usize],
        state_law: &JointTable,
    ) -> Result<Self, String> {
        let cells = state_law.mass().len();
        if map.len() != cells || map.iter().any(|&g| g >= g_size) {
            return Err("genie map must assign every state cell a valid symbol".into());
        }
        let mut table = vec![0.0; cells * g_size];
        for (cell, &g) in map.iter().enumerate() {
            table[cell * g_size + g] = 1.0;
        }
        Self::stochastic(target, g_size, table, state_law)
    }

    /// The zero-entropy genie.
    pub fn constant(target: GenieTarget, state_law: &JointTable) -> Self {
        let cells = state_law.mass().len();
        Self::stochastic(target, 1, vec![1.0; cells], state_law)
            .expect("constant genie is always valid")
    }

    /// Receiver genie revealing the full channel state `S` of a single-user
    /// channel.
    pub fn full_state(c: &StateChannel) -> Result<Self, String> {
        let mut map = Vec::with_capacity(c.ns * c.nst * c.nsr);
        for s in 0..c.ns {
            for _ in 0..c.nst * c.nsr {
                map.push(s);
            }
        }
        Self::deterministic(GenieTarget::Receiver, c.ns, &map, &c.state_law)
    }

    /// Receiver genie revealing the full channel state of a MAC.
    pub fn full_state_mac(m: &MacChannel) -> Result<Self, String> {
        let mut map = Vec::with_capacity(m.ns * m.nst1 * m.nst2 * m.nsr);
        for s in 0..m.ns {
            for _ in 0..m.nst1 * m.nst2 * m.nsr {
                map.push(s);
            }
        }
        Self::deterministic(GenieTarget::Receiver, m.ns, &map, &m.state_law)
    }

    pub fn row(&self, cell: usize) -> &[f64] {
        &self.table[cell * self.g_size..(cell + 1) * self.g_size]
    }
}

/// Extends a single-user channel's receiver side information with the
/// genie's variable: `S_R' = (S_R, G)`, flattened `s_r * g_size + g`.
pub fn extend_receiver(c: &StateChannel, genie: &GenieSpec) -> StateChannel {
    let nsr2 = c.nsr * genie.g_size;
    let mut mass = vec![0.0; c.ns * c.nst * nsr2];
    let mut cell = 0usize;
    for s in 0..c.ns {
        for st in 0..c.nst {
            for sr in 0..c.nsr {
                let base_mass = c.state_law.mass()[cell];
                let row = genie.row(cell);
                cell += 1;
                if base_mass == 0.0 {
                    continue;
                }
                for (g, &pg) in row.iter().enumerate() {
                    mass[(s * c.nst + st) * nsr2 + sr * genie.g_size + g] = base_mass * pg;
                }
            }
        }
    }
    StateChannel::from_raw_parts(
        c.nx,
        c.ny,
        c.ns,
        c.nst,
        nsr2,
        JointTable::new(vec![c.ns, c.nst, nsr2], mass).expect("extended law is valid"),
        c.transition_flat().to_vec(),
    )
}

/// As [`extend_receiver`] for a MAC.
pub fn extend_receiver_mac(m: &MacChannel, genie: &GenieSpec) -> MacChannel {
    let nsr2 = m.nsr * genie.g_size;
    let mut mass = vec![0.0; m.ns * m.nst1 * m.nst2 * nsr2];
    let mut cell = 0usize;
    for s in 0..m.ns {
        for st1 in 0..m.nst1 {
            for st2 in 0..m.nst2 {
                for sr in 0..m.nsr {
                    let base_mass = m.state_law.mass()[cell];
                    let row = genie.row(cell);
                    cell += 1;
                    if base_mass == 0.0 {
                        continue;
                    }
                    for (g, &pg) in row.iter().enumerate() {
                        mass[((s * m.nst1 + st1) * m.nst2 + st2) * nsr2
                            + sr * genie.g_size
                            + g] = base_mass * pg;
                    }
                }
            }
        }
    }
    MacChannel::from_raw_parts(
        m.nx1,
        m.nx2,
        m.ny,
        m.ns,
        m.nst1,
        m.nst2,
        nsr2,
        JointTable::new(vec![m.ns, m.nst1, m.nst2, nsr2], mass).expect("extended law is valid"),
        m.transition_flat().to_vec(),
        m.tx_states_independent,
    )
}

/// Verdict of one bound check: `satisfied` iff `slack >= -tolerance` where
/// `slack = rhs - lhs`.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub slack_bits: f64,
    pub satisfied: bool,
    pub tolerance_bits: f64,
    /// Named sub-values feeding the two sides.
    pub components: Vec<(String, f64)>,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64, tolerance: f64, components: Vec<(String, f64)>) -> Self {
        let slack = rhs - lhs;
        Self {
            lhs_bits: lhs,
            rhs_bits: rhs,
            slack_bits: slack,
            satisfied: slack >= -tolerance,
            tolerance_bits: tolerance,
            components,
        }
    }
}

/// Receiver-genie bound: extra receiver side information is worth at most
/// its own entropy, `C_G - C <= H(G)`. Both capacities are causal and
/// computed by exact Blahut-Arimoto runs over strategy alphabets.
pub fn check_receiver_genie_bound(
    c: &StateChannel,
    genie: &GenieSpec,
    cfg: &SolveConfig,
) -> Result<BoundReport, SolveError> {
    if genie.target != GenieTarget::Receiver {
        return Err(SolveError::WrongGenieTarget {
            expected: "receiver",
        });
    }
    let base = capacity_causal(c, cfg)?;
    let with_genie = capacity_causal(&extend_receiver(c, genie), cfg)?;
    Ok(BoundReport::new(
        with_genie.value_bits - base.value_bits,
        genie.entropy_bits,
        EXACT_TOL_BITS,
        vec![
            ("capacity_bits".into(), base.value_bits),
            ("capacity_with_genie_bits".into(), with_genie.value_bits),
            ("genie_entropy_bits".into(), genie.entropy_bits),
        ],
    ))
}

/// One row of the transmitter-genie gain table.
#[derive(Debug, Clone)]
pub struct TxGainRow {
    pub n_half: usize,
    pub capacity_no_si_bits: f64,
    pub capacity_causal_tx_bits: f64,
    pub gap_bits: f64,
    pub lower_bound_bits: f64,
    pub satisfied: bool,
}

/// Demonstrates that one bit of transmitter side information is worth an
/// unbounded amount: on the erasure/parity family the gain grows like
/// `log2(N+1) - log2(N)/2 - 1/2 >= log2(N)/2 - 1/2`.
pub fn demonstrate_tx_unbounded(
    n_list: &[usize],
    cfg: &SolveConfig,
) -> Result<Vec<TxGainRow>, SolveError> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let c = make_erasure_parity(n);
        let no_si = crate::capacity::blahut_arimoto(&c.plain_dmc(), cfg.tol_bits, cfg.max_iter);
        let with_si = capacity_causal(&c, cfg)?;
        let gap = with_si.value_bits - no_si.value_bits;
        let lower = 0.5 * (n as f64).log2() - 0.5;
        rows.push(TxGainRow {
            n_half: n,
            capacity_no_si_bits: no_si.value_bits,
            capacity_causal_tx_bits: with_si.value_bits,
            gap_bits: gap,
            lower_bound_bits: lower,
            satisfied: gap >= lower - EXACT_TOL_BITS,
        });
    }
    Ok(rows)
}

/// `H(S_T | S_R)` of a single-user state law, in bits.
pub fn tx_given_rx_entropy(c: &StateChannel) -> f64 {
    let joint = c
        .state_law
        .regroup(&[&[1], &[2]])
        .expect("valid state law");
    joint.entropy() - c.rx_marginal().entropy()
}

/// Gap bound between non-causal and causal capacity:
/// `C_noncausal - C_causal <= H(S_T | S_R)`.
pub fn nc_minus_c_bound(c: &StateChannel, cfg: &SolveConfig) -> Result<BoundReport, SolveError> {
    let causal = capacity_causal(c, cfg)?;
    let noncausal = capacity_noncausal(c, cfg)?;
    let rhs = tx_given_rx_entropy(c);
    Ok(BoundReport::new(
        noncausal.value_bits - causal.value_bits,
        rhs,
        SOLVER_TOL_BITS,
        vec![
            ("capacity_causal_bits".into(), causal.value_bits),
            ("capacity_noncausal_bits".into(), noncausal.value_bits),
            ("tx_given_rx_entropy_bits".into(), rhs),
        ],
    ))
}

/// Receiver-genie bound on the MAC sum rate: `C_sum_G - C_sum <= H(G)`.
pub fn mac_sum_genie_bound(
    m: &MacChannel,
    genie: &GenieSpec,
    cfg: &SolveConfig,
) -> Result<BoundReport, SolveError> {
    if genie.target != GenieTarget::Receiver {
        return Err(SolveError::WrongGenieTarget {
            expected: "receiver",
        });
    }
    let base = mac_sum_capacity_causal(m, cfg)?;
    let with_genie = mac_sum_capacity_causal(&extend_receiver_mac(m, genie), cfg)?;
    Ok(BoundReport::new(
        with_genie.value_bits - base.value_bits,
        genie.entropy_bits,
        SOLVER_TOL_BITS,
        vec![
            ("sum_capacity_bits".into(), base.value_bits),
            ("sum_capacity_with_genie_bits".into(), with_genie.value_bits),
            ("genie_entropy_bits".into(), genie.entropy_bits),
        ],
    ))
}

/// `H(S_T1, S_T2 | S_R)` of a MAC state law, in bits.
pub fn mac_tx_given_rx_entropy(m: &MacChannel) -> f64 {
    let joint = m
        .state_law
        .regroup(&[&[1, 2], &[3]])
        .expect("valid state law");
    let psr = m.state_law.axis_dist(3).expect("valid state law");
    joint.entropy() - psr.entropy()
}

/// MAC gap bound: with independent transmitter states,
/// `C_sum_noncausal - C_sum_causal <= H(S_T1, S_T2 | S_R)`. Refuses when
/// the independence hypothesis does not hold.
pub fn mac_nc_minus_c_bound(m: &MacChannel, cfg: &SolveConfig) -> Result<BoundReport, SolveError> {
    if !m.tx_states_independent || !m.tx_states_factorize(1e-9) {
        return Err(SolveError::CorrelatedTxStates);
    }
    let causal = mac_sum_capacity_causal(m, cfg)?;
    let noncausal = mac_noncausal_inner_sum(m, cfg)?;
    let rhs = mac_tx_given_rx_entropy(m);
    Ok(BoundReport::new(
        noncausal.value_bits - causal.value_bits,
        rhs,
        SOLVER_TOL_BITS,
        vec![
            ("sum_causal_bits".into(), causal.value_bits),
            ("sum_noncausal_bits".into(), noncausal.value_bits),
            ("tx_given_rx_entropy_bits".into(), rhs),
        ],
    ))
}

/// Convenience: the capacity report pair (without, with) a receiver genie
/// on a single-user channel, both causal.
pub fn genie_capacity_pair(
    c: &StateChannel,
    genie: &GenieSpec,
    cfg: &SolveConfig,
) -> Result<(CapacityReport, CapacityReport), SolveError> {
    Ok((
        capacity_causal(c, cfg)?,
        capacity_causal(&extend_receiver(c, genie), cfg)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Dmc;
    use crate::generators::{
        make_random_access, make_random_access_mac, random_state_channel,
    };
    use crate::prob::{derive_seed, sample_dist};

    #[test]
    fn constant_genie_changes_nothing() {
        let c = random_state_channel(2, 2, 2, 2, 1, 4);
        let genie = GenieSpec::constant(GenieTarget::Receiver, &c.state_law);
        let rep = check_receiver_genie_bound(&c, &genie, &SolveConfig::default()).unwrap();
        assert!(rep.satisfied);
        assert!(rep.lhs_bits.abs() < 1e-9);
        assert!(rep.rhs_bits.abs() < 1e-12);
    }

    #[test]
    fn redundant_genie_slack_equals_its_entropy() {
        // G = S_R is already known to the receiver.
        let c = random_state_channel(2, 2, 2, 1, 2, 8);
        let cells = c.state_law.mass().len();
        let mut map = Vec::with_capacity(cells);
        for s in 0..c.ns {
            for st in 0..c.nst {
                for sr in 0..c.nsr {
                    let _ = (s, st);
                    map.push(sr);
                }
            }
        }
        let genie =
            GenieSpec::deterministic(GenieTarget::Receiver, c.nsr, &map, &c.state_law).unwrap();
        let rep = check_receiver_genie_bound(&c, &genie, &SolveConfig::default()).unwrap();
        assert!(rep.lhs_bits.abs() < 1e-6);
        assert!((rep.slack_bits - genie.entropy_bits).abs() < 1e-6);
    }

    #[test]
    fn random_access_state_genie_is_worth_at_most_one_bit() {
        let c = make_random_access(&Dmc::noiseless(2), 0.5, false);
        let genie = GenieSpec::full_state(&c).unwrap();
        assert!((genie.entropy_bits - 1.0).abs() < 1e-12);
        let rep = check_receiver_genie_bound(&c, &genie, &SolveConfig::default()).unwrap();
        assert!(rep.satisfied);
        assert!(rep.lhs_bits <= 1.0 + 1e-9);
        assert!(rep.lhs_bits > 0.0);
    }

    #[test]
    fn genie_refuses_transmitter_target() {
        let c = random_state_channel(2, 2, 2, 1, 1, 0);
        let genie = GenieSpec::constant(GenieTarget::Transmitter, &c.state_law);
        assert!(matches!(
            check_receiver_genie_bound(&c, &genie, &SolveConfig::default()),
            Err(SolveError::WrongGenieTarget { .. })
        ));
    }

    #[test]
    fn genie_monotone_under_refinement() {
        // A finer genie partition never lowers the genie-aided capacity.
        for seed in 0..5 {
            let c = random_state_channel(2, 2, 2, 2, 1, derive_seed(seed, &[77]));
            let cells = c.state_law.mass().len();
            let coarse_map: Vec<usize> = (0..cells).map(|cell| (cell / c.nsr) % 2).collect();
            let fine_map: Vec<usize> = (0..cells)
                .map(|cell| {
                    let s = cell / (c.nst * c.nsr);
                    let st = (cell / c.nsr) % c.nst;
                    (s % 2) * 2 + st % 2
                })
                .collect();
            // fine refines coarse iff coarse = g(fine); enforce by building
            // coarse from fine's first bit
            let coarse_from_fine: Vec<usize> = fine_map.iter().map(|&g| g / 2).collect();
            let _ = coarse_map;
            let g_coarse = GenieSpec::deterministic(
                GenieTarget::Receiver,
                2,
                &coarse_from_fine,
                &c.state_law,
            )
            .unwrap();
            let g_fine =
                GenieSpec::deterministic(GenieTarget::Receiver, 4, &fine_map, &c.state_law)
                    .unwrap();
            let cfg = SolveConfig::default();
            let c_coarse = capacity_causal(&extend_receiver(&c, &g_coarse), &cfg).unwrap();
            let c_fine = capacity_causal(&extend_receiver(&c, &g_fine), &cfg).unwrap();
            assert!(c_fine.value_bits >= c_coarse.value_bits - 1e-6, "seed {seed}");
        }
    }

    #[test]
    fn tx_gain_table_matches_closed_forms() {
        let rows = demonstrate_tx_unbounded(&[1, 2, 4], &SolveConfig::default()).unwrap();
        assert!((rows[0].gap_bits - 0.5).abs() < 1e-6);
        let n2 = &rows[1];
        assert!((n2.capacity_no_si_bits - 1.0).abs() < 1e-6);
        assert!((n2.capacity_causal_tx_bits - 3.0f64.log2()).abs() < 1e-6);
        let n4 = &rows[2];
        assert!((n4.gap_bits - (5.0f64.log2() - 1.5)).abs() < 1e-6);
        assert!(rows.iter().all(|r| r.satisfied));
        assert!(rows.windows(2).all(|w| w[1].gap_bits > w[0].gap_bits));
    }

    #[test]
    fn nc_minus_c_useless_tx_state_leaves_full_slack() {
        // S_T independent of everything: no non-causal gain, slack = H(S_T|S_R).
        let base = random_state_channel(2, 2, 2, 1, 1, 21);
        let law = JointTable::from_fn(vec![2, 2, 1], |i| base.state_law.value(&[i[0], 0, 0]) * 0.5)
            .unwrap();
        let c = StateChannel::from_raw_parts(2, 2, 2, 2, 1, law, base.transition_flat().to_vec());
        let rep = nc_minus_c_bound(&c, &SolveConfig::sweep()).unwrap();
        assert!(rep.satisfied);
        assert!(rep.lhs_bits.abs() < 2e-3);
        assert!((rep.rhs_bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mac_gap_bound_refuses_correlated_states() {
        let m = make_random_access_mac(&Dmc::noiseless(2), 0.5, false);
        assert!(matches!(
            mac_nc_minus_c_bound(&m, &SolveConfig::sweep()),
            Err(SolveError::CorrelatedTxStates)
        ));
    }

    #[test]
    fn stochastic_genie_entropy_matches_marginal() {
        let c = random_state_channel(2, 2, 2, 2, 2, 5);
        let cells = c.state_law.mass().len();
        let mut table = Vec::with_capacity(cells * 2);
        for cell in 0..cells {
            let row = sample_dist(2, derive_seed(5, &[cell as u64]));
            table.extend_from_slice(row.weights());
        }
        let genie =
            GenieSpec::stochastic(GenieTarget::Receiver, 2, table.clone(), &c.state_law).unwrap();
        let mut marginal = [0.0f64; 2];
        for (cell, &mass) in c.state_law.mass().iter().enumerate() {
            marginal[0] += mass * table[cell * 2];
            marginal[1] += mass * table[cell * 2 + 1];
        }
        assert!((genie.entropy_bits - crate::prob::entropy_bits(&marginal)).abs() < 1e-12);
    }
}
