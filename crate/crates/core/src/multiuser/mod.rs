//! Multi-terminal solvers and evaluators: multiple access sum capacity and
//! rate region, broadcast inner-bound evaluators, degraded relay capacity.

pub mod bc;
pub mod mac;
pub mod relay;

pub use bc::{
    bc_eval_causal, bc_eval_evdm_noncausal, bc_eval_steinberg_shamai, bc_region_causal,
    observation1_predicate, random_bc_aux, BcAuxLaw, BcBounds, BcMode, Observation1Report,
};
pub use mac::{
    mac_noncausal_grid_oracle, mac_noncausal_inner_sum, mac_region_rx_knows, mac_strategy_transform,
    mac_sum_capacity_causal, mac_sum_grid_oracle, MacAuxCode, MacRegion, MacStrategySpace,
    RegionPoint,
};
pub use relay::{
    relay_check_degraded, relay_degraded_capacity, relay_grid_oracle, DegradednessReport,
    RelayCapacityReport,
};
