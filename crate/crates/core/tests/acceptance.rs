//! Acceptance suite: every release criterion as one test, each printing a
//! single PASS line with the measured values (run with `--nocapture` to see
//! them). Tolerances are pinned here, not configurable.

use sicap::bounds::{
    check_receiver_genie_bound, demonstrate_tx_unbounded, extend_receiver, nc_minus_c_bound,
    GenieSpec, GenieTarget,
};
use sicap::capacity::{
    blahut_arimoto, capacity_causal, capacity_noncausal, capacity_rx_knows_tx, gp_oracle_grid,
    SolveConfig,
};
use sicap::channel::Dmc;
use sicap::generators::{
    make_random_access, make_random_access_mac, make_relay_bottleneck, make_stuck_at,
    random_degraded_relay, random_mac_independent, random_shared_state_channel,
    random_state_channel,
};
use sicap::multiuser::{
    mac_region_rx_knows, mac_sum_capacity_causal, mac_sum_grid_oracle, observation1_predicate,
    random_bc_aux, relay_check_degraded, relay_degraded_capacity, relay_grid_oracle,
};
use sicap::prob::{derive_seed, sample_dist, xlog2x, Dist};

fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Erasure/parity ladder: no-SI capacity `log2(N)/2 + 1/2`, causal-SI
/// capacity `log2(N+1)`, gain at least `log2(N)/2 - 1/2` and growing.
#[test]
fn criterion_1_erasure_parity_ladder() {
    let cfg = SolveConfig::default();
    let rows = demonstrate_tx_unbounded(&[1, 2, 4, 8], &cfg).unwrap();
    for row in &rows {
        let n = row.n_half as f64;
        let expect_plain = 0.5 * n.log2() + 0.5;
        let expect_causal = (n + 1.0).log2();
        assert!(
            (row.capacity_no_si_bits - expect_plain).abs() <= 1e-5,
            "N={}: no-SI {} vs {}",
            row.n_half,
            row.capacity_no_si_bits,
            expect_plain
        );
        assert!(
            (row.capacity_causal_tx_bits - expect_causal).abs() <= 1e-5,
            "N={}: causal {} vs {}",
            row.n_half,
            row.capacity_causal_tx_bits,
            expect_causal
        );
        assert!(row.gap_bits >= 0.5 * n.log2() - 0.5 - 1e-6);
    }
    assert!(rows.windows(2).all(|w| w[1].gap_bits > w[0].gap_bits));
    println!(
        "criterion 1 PASS: erasure/parity ladder, gaps {:?}",
        rows.iter().map(|r| r.gap_bits).collect::<Vec<_>>()
    );
}

/// Causal = non-causal = max I(X;Y|S_R) when both sides see the state:
/// 200 seeded channels with |X|,|Y|,|S| <= 3 and S_T = S_R = S.
#[test]
fn criterion_2_causal_noncausal_equality_sweep() {
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let nx = 2 + (seed % 2) as usize;
        let ny = 2 + ((seed / 2) % 2) as usize;
        let ns = 2 + ((seed / 4) % 2) as usize;
        let c = random_shared_state_channel(nx, ny, ns, derive_seed(seed, &[201]));
        let cfg = SolveConfig::sweep().with_seed(seed);
        let causal = capacity_causal(&c, &cfg).unwrap().value_bits;
        let noncausal = capacity_noncausal(&c, &cfg).unwrap().value_bits;
        let rx_knows = capacity_rx_knows_tx(&c, &cfg).unwrap().value_bits;
        let spread = (causal - noncausal)
            .abs()
            .max((causal - rx_knows).abs())
            .max((noncausal - rx_knows).abs());
        worst = worst.max(spread);
        assert!(
            spread <= 2e-3,
            "seed {seed}: causal {causal}, noncausal {noncausal}, rx-knows {rx_knows}"
        );
    }
    println!("criterion 2 PASS: 200/200 instances, worst spread {worst:.3e} bits");
}

/// Receiver-genie bound: 100 seeded instances with a binary genie,
/// `C_G - C <= H(G) + 1e-6`, both capacities exact.
#[test]
fn criterion_3_receiver_genie_sweep() {
    let mut worst_slack = f64::INFINITY;
    for seed in 0..100u64 {
        let nx = 2 + (seed % 2) as usize;
        let ny = 2 + ((seed / 2) % 2) as usize;
        let ns = 2 + ((seed / 4) % 2) as usize;
        let c = random_state_channel(nx, ny, ns, 2, 2, derive_seed(seed, &[301]));
        let cells = c.state_law.mass().len();
        let genie = if seed % 2 == 0 {
            let map: Vec<usize> = (0..cells)
                .map(|cell| (derive_seed(seed, &[302, cell as u64]) % 2) as usize)
                .collect();
            GenieSpec::deterministic(GenieTarget::Receiver, 2, &map, &c.state_law).unwrap()
        } else {
            let mut table = Vec::with_capacity(cells * 2);
            for cell in 0..cells {
                table.extend_from_slice(
                    sample_dist(2, derive_seed(seed, &[303, cell as u64])).weights(),
                );
            }
            GenieSpec::stochastic(GenieTarget::Receiver, 2, table, &c.state_law).unwrap()
        };
        let rep = check_receiver_genie_bound(&c, &genie, &SolveConfig::default()).unwrap();
        assert!(
            rep.lhs_bits <= rep.rhs_bits + 1e-6,
            "seed {seed}: gain {} vs entropy {}",
            rep.lhs_bits,
            rep.rhs_bits
        );
        worst_slack = worst_slack.min(rep.slack_bits);
    }
    println!("criterion 3 PASS: 100/100 genie bounds, min slack {worst_slack:.6} bits");
}

/// Non-causal over causal gain is at most `H(S_T|S_R)`: 50 seeded
/// instances.
#[test]
fn criterion_4_gap_bound_sweep() {
    let mut worst_slack = f64::INFINITY;
    for seed in 0..50u64 {
        let nx = 2 + (seed % 2) as usize;
        let ny = 2 + ((seed / 2) % 2) as usize;
        let ns = 2 + ((seed / 4) % 2) as usize;
        let nst = 1 + (seed % 3) as usize;
        let nsr = 1 + ((seed / 3) % 3) as usize;
        let c = random_state_channel(nx, ny, ns, nst, nsr, derive_seed(seed, &[401]));
        let rep = nc_minus_c_bound(&c, &SolveConfig::sweep().with_seed(seed)).unwrap();
        assert!(
            rep.satisfied,
            "seed {seed}: lhs {} rhs {} slack {}",
            rep.lhs_bits, rep.rhs_bits, rep.slack_bits
        );
        worst_slack = worst_slack.min(rep.slack_bits);
    }
    println!("criterion 4 PASS: 50/50 gap bounds, min slack {worst_slack:.6} bits");
}

/// Random-access switch: with the state revealed to the receiver the
/// capacity is exactly `p_on * C_0`; with a blind receiver the causal
/// capacity collapses to the no-side-information capacity.
#[test]
fn criterion_5_random_access_values() {
    let base = Dmc::noiseless(2);
    let cfg = SolveConfig::default();
    for p_on in [0.0, 0.25, 0.5, 1.0] {
        let c = make_random_access(&base, p_on, true);
        let rk = capacity_rx_knows_tx(&c, &cfg).unwrap().value_bits;
        assert!((rk - p_on).abs() <= 1e-6, "p_on {p_on}: rx-knows {rk}");
        let causal = capacity_causal(&c, &cfg).unwrap().value_bits;
        assert!((causal - p_on).abs() <= 1e-6, "p_on {p_on}: causal {causal}");

        let blind = make_random_access(&base, p_on, false);
        let causal_blind = capacity_causal(&blind, &cfg).unwrap().value_bits;
        let no_si = blahut_arimoto(&blind.plain_dmc(), 1e-9, 5000).value_bits;
        assert!(
            (causal_blind - no_si).abs() <= 1e-6,
            "p_on {p_on}: causal {causal_blind} vs no-SI {no_si}"
        );
        assert!(causal_blind >= p_on - 1.0 - 1e-9);
    }
    println!("criterion 5 PASS: random access matches p_on * C_0 and the blind collapse");
}

/// Auxiliary-code solver against the simplex-grid oracle: the stuck-at
/// defect channel hits the masking rate `1 - p`, and the solver dominates
/// the lattice on seeded tiny instances.
#[test]
fn criterion_6_gp_oracle_equivalence() {
    let cfg = SolveConfig::default();
    let defect = make_stuck_at(0.2);
    let oracle = gp_oracle_grid(&defect, 24, 2, &cfg).unwrap();
    assert!(
        (oracle.value_bits - 0.8).abs() <= 5e-3,
        "oracle {}",
        oracle.value_bits
    );
    let solver = capacity_noncausal(&defect, &cfg)
        .unwrap()
        .with_oracle_gap(oracle.value_bits);
    assert!(
        (solver.value_bits - 0.8).abs() <= 5e-3,
        "solver {}",
        solver.value_bits
    );
    assert!(solver.oracle_gap_bits.unwrap() >= -1e-9);

    let mut worst_gap = f64::INFINITY;
    for seed in 0..20u64 {
        let c = random_state_channel(2, 2, 2, 2, 1, derive_seed(seed, &[601]));
        let cfg = SolveConfig {
            restarts: 8,
            ..SolveConfig::default()
        }
        .with_seed(seed);
        let solver = capacity_noncausal(&c, &cfg).unwrap();
        assert!(solver.exhaustive);
        let oracle = gp_oracle_grid(&c, 6, 4, &cfg).unwrap();
        let gap = solver.value_bits - oracle.value_bits;
        worst_gap = worst_gap.min(gap);
        assert!(
            gap >= -1e-9,
            "seed {seed}: solver {} below oracle {}",
            solver.value_bits,
            oracle.value_bits
        );
    }
    println!(
        "criterion 6 PASS: defect solver {:.6}, oracle {:.6}, min solver-oracle gap {worst_gap:.3e}",
        solver.value_bits, oracle.value_bits
    );
}

/// MAC cross-check: alternating sum solver vs the region's sum vertex vs
/// the lattice oracle on binary independent-state instances; the two-user
/// random-access sum equals the base capacity when the receiver learns the
/// switch.
#[test]
fn criterion_7_mac_cross_check() {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let m = random_mac_independent(2, derive_seed(seed, &[701]), true);
        let cfg = SolveConfig {
            restarts: 8,
            ..SolveConfig::default()
        }
        .with_seed(seed);
        let solver = mac_sum_capacity_causal(&m, &cfg).unwrap();
        assert!(!solver.inner_bound_only);
        let region = mac_region_rx_knows(&m, 12, &cfg).unwrap();
        let oracle = mac_sum_grid_oracle(&m, 12, &cfg).unwrap();
        let d1 = (solver.value_bits - region.max_sum_bits).abs();
        let d2 = (solver.value_bits - oracle).abs();
        worst = worst.max(d1).max(d2);
        assert!(
            d1 <= 5e-3,
            "seed {seed}: solver {} vs region {}",
            solver.value_bits,
            region.max_sum_bits
        );
        assert!(
            d2 <= 5e-3,
            "seed {seed}: solver {} vs oracle {oracle}",
            solver.value_bits
        );
    }

    let mac = make_random_access_mac(&Dmc::noiseless(2), 0.5, true);
    let cfg = SolveConfig::default();
    let sum = mac_sum_capacity_causal(&mac, &cfg).unwrap();
    assert!(
        (sum.value_bits - 1.0).abs() <= 1e-6,
        "random-access sum {}",
        sum.value_bits
    );
    println!("criterion 7 PASS: 20/20 MAC instances, worst deviation {worst:.3e}; random-access sum {:.6}", sum.value_bits);
}

/// The two forms of the inner-bound equivalence defect agree to 1e-9 on
/// 500 seeded binary auxiliary laws, and hand-built positive/negative
/// instances classify correctly.
#[test]
fn criterion_8_observation_identity() {
    let mut worst = 0.0f64;
    for seed in 0..500u64 {
        let a = random_bc_aux(2, 2, 2, 2, 2, derive_seed(seed, &[801]));
        let pst = sample_dist(2, derive_seed(seed, &[802]));
        let rep = observation1_predicate(&a, &pst);
        let diff = (rep.delta_bits - rep.delta_alt_bits).abs();
        worst = worst.max(diff);
        assert!(diff <= 1e-9, "seed {seed}: {diff}");
    }

    // positive instance: auxiliaries independent of the state
    let independent = random_bc_aux(2, 2, 2, 2, 1, 31);
    assert!(observation1_predicate(&independent, &Dist::uniform(1)).holds);

    // negative instance: U = V = S_T uniform binary, W constant
    let mut aux = vec![0.0; 2 * 4];
    aux[0] = 1.0; // s_t = 0 -> (u, v) = (0, 0)
    aux[4 + 3] = 1.0; // s_t = 1 -> (u, v) = (1, 1)
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
    .unwrap();
    let rep = observation1_predicate(&law, &Dist::uniform(2));
    assert!(!rep.holds);
    assert!((rep.delta_bits + 1.0).abs() <= 1e-9);
    println!("criterion 8 PASS: 500/500 dual-form agreements, worst diff {worst:.3e}; classifications correct");
}

/// Degraded relay: composed instances verify with residual <= 1e-12, the
/// max-min solver matches the lattice oracle at binary sizes, and the
/// bottleneck value is the first-stage capacity.
#[test]
fn criterion_9_relay() {
    let cfg = SolveConfig::default();
    let mut worst = 0.0f64;
    for seed in 0..8u64 {
        let r = random_degraded_relay(derive_seed(seed, &[901]), seed % 2 == 0);
        let check = relay_check_degraded(&r);
        assert!(check.degraded && check.max_residual <= 1e-12);
        let solver = relay_degraded_capacity(&r, &cfg).unwrap();
        // one state axis: a fine lattice is cheap; two: k = 24 fills the
        // evaluation budget
        let resolution = if seed % 2 == 0 { 24 } else { 64 };
        let oracle = relay_grid_oracle(&r, resolution, &cfg).unwrap();
        let diff = (solver.value_bits - oracle).abs();
        worst = worst.max(diff);
        assert!(
            diff <= 5e-3,
            "seed {seed}: solver {} oracle {oracle}",
            solver.value_bits
        );
    }
    let bottleneck = relay_degraded_capacity(&make_relay_bottleneck(0.25), &cfg).unwrap();
    let expect = 1.0 - binary_entropy(0.25);
    assert!(
        (bottleneck.value_bits - expect).abs() <= 1e-4,
        "bottleneck {} vs {expect}",
        bottleneck.value_bits
    );
    println!(
        "criterion 9 PASS: 8/8 relay instances within {worst:.3e}; bottleneck {:.6} vs {expect:.6}",
        bottleneck.value_bits
    );
}

/// Data-processing sanity rider: revealing the full state to the receiver
/// never lowers any computed capacity.
#[test]
fn data_processing_sanity() {
    for seed in 0..10u64 {
        let c = random_state_channel(2, 2, 2, 2, 1, derive_seed(seed, &[1001]));
        let genie = GenieSpec::full_state(&c).unwrap();
        let richer = extend_receiver(&c, &genie);
        let cfg = SolveConfig::sweep().with_seed(seed);
        let base_causal = capacity_causal(&c, &cfg).unwrap().value_bits;
        let rich_causal = capacity_causal(&richer, &cfg).unwrap().value_bits;
        assert!(rich_causal >= base_causal - 1e-6, "seed {seed}");
        let base_nc = capacity_noncausal(&c, &cfg).unwrap().value_bits;
        let rich_nc = capacity_noncausal(&richer, &cfg).unwrap().value_bits;
        assert!(rich_nc >= base_nc - 2e-3, "seed {seed}");
    }
    println!("sanity PASS: receiver enrichment is monotone");
}
