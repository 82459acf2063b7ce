//! Numerical workbench for the capacity of finite discrete memoryless
//! channels with transmitter and receiver side information.
//!
//! The crate computes, for a channel `P(Y|X,S)` with a joint state law
//! `P(S, S_T, S_R)`:
//!
//! * plain capacity (no side information) via Blahut-Arimoto;
//! * capacity with causal transmitter side information via Shannon's
//!   strategy-alphabet reduction;
//! * capacity with non-causal transmitter side information via
//!   auxiliary-code search (binning form `I(U;Y,S_R) - I(U;S_T)`);
//! * the closed-form regime where the receiver knows the transmitter's
//!   side information;
//!
//! plus executable bound checkers (receiver-genie bounds and
//! causal/non-causal gap bounds, single-user and multiple access), the
//! two-user machinery (sum capacity, rate regions, broadcast inner-bound
//! evaluators) and degraded-relay capacity. Channels serialize to a
//! versioned JSON form hashed for reproducible reports.
//!
//! All information quantities are in bits. Every randomized search is
//! seeded and deterministic.
//!
//! ```
//! use sicap::{blahut_arimoto, capacity_causal, SolveConfig};
//! use sicap::channel::Dmc;
//! use sicap::generators::make_erasure_parity;
//!
//! // A binary symmetric channel with 11% flips carries about half a bit.
//! let plain = blahut_arimoto(&Dmc::bsc(0.11), 1e-9, 5000);
//! assert!((plain.value_bits - 0.4999).abs() < 1e-3);
//!
//! // Causal knowledge of the erasure/parity switch state lifts the
//! // capacity from 1 bit to log2(3): the transmitter steers around the
//! // erasures it can foresee.
//! let channel = make_erasure_parity(2);
//! let causal = capacity_causal(&channel, &SolveConfig::default()).unwrap();
//! assert!((causal.value_bits - 3f64.log2()).abs() < 1e-6);
//! ```

// the kernels index parallel stride-structured arrays; iterator rewrites
// obscure the axis arithmetic. Constructors mirror the channel field lists.
#![allow(clippy::needless_range_loop, clippy::too_many_arguments, clippy::type_complexity)]

pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod generators;
pub mod io;
pub mod multiuser;
pub mod prob;

pub use capacity::{
    blahut_arimoto, capacity_causal, capacity_noncausal, capacity_rx_knows_tx, common_form_table,
    gp_oracle_grid, Achiever, AuxCode, CapacityReport, CommonFormRow, CommonFormTable, SolveConfig,
    SolveError,
};
pub use channel::{
    block_static_expand, block_static_expand_mac, strategy_transform, BcChannel, ChannelError,
    Diagnostic, Dmc, MacChannel, RelayChannel, Severity, StateChannel, Strategy,
};
pub use prob::{
    conditional_mi, entropy, mutual_information, sample_dist, simplex_grid, Dist, JointTable,
    ProbError,
};
