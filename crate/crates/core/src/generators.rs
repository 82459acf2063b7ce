//! Constructors for the worked example channels and for seeded random
//! instances used by the verification sweeps.

// index arithmetic spells out unit-extent axes to keep strides readable
#![allow(clippy::identity_op)]

use crate::channel::{Dmc, MacChannel, RelayChannel, StateChannel};
use crate::prob::{derive_seed, sample_dist, Dist, JointTable};

/// Erasure/parity channel: inputs `0..2N`, outputs `0..2N` plus an erasure
/// symbol (always the last output index), binary state `S` uniform. The
/// input is conveyed noise-free when `X + S` is even and erased when odd.
/// The transmitter observes `S` (`S_T = S`); the receiver observes nothing.
pub fn make_erasure_parity(n_half: usize) -> StateChannel {
    assert!(n_half >= 1);
    let nx = 2 * n_half;
    let ny = nx + 1;
    let erasure = nx;
    let state_law = JointTable::from_fn(vec![2, 2, 1], |i| if i[0] == i[1] { 0.5 } else { 0.0 })
        .expect("valid state law");
    let mut transition = vec![0.0; nx * 2 * ny];
    for x in 0..nx {
        for s in 0..2 {
            let y = if (x + s) % 2 == 0 { x } else { erasure };
            transition[(x * 2 + s) * ny + y] = 1.0;
        }
    }
    StateChannel::new(nx, ny, 2, 2, 1, state_law, transition).expect("well-formed channel")
}

/// Random-access channel built over `base`: a binary switch state `S` with
/// `P(S=1) = p_on` decides whether the base channel's input is the user's
/// symbol (`S=1`) or an unobserved uniformly random symbol (`S=0`). The
/// transmitter observes `S`; the receiver observes `S` too when `rx_knows`
/// is set and nothing otherwise.
pub fn make_random_access(base: &Dmc, p_on: f64, rx_knows: bool) -> StateChannel {
    assert!((0.0..=1.0).contains(&p_on));
    let nx = base.n_in;
    let ny = base.n_out;
    let nsr = if rx_knows { 2 } else { 1 };
    let state_law = JointTable::from_fn(vec![2, 2, nsr], |i| {
        let (s, st, sr) = (i[0], i[1], i[2]);
        if st != s || (rx_knows && sr != s) {
            return 0.0;
        }
        if s == 1 {
            p_on
        } else {
            1.0 - p_on
        }
    })
    .expect("valid state law");
    // With the switch open the channel output is driven by the random
    // symbol, independently of the user's input.
    let mut mix = vec![0.0; ny];
    for x in 0..nx {
        for y in 0..ny {
            mix[y] += base.row(x)[y] / nx as f64;
        }
    }
    let mut transition = vec![0.0; nx * 2 * ny];
    for x in 0..nx {
        for y in 0..ny {
            transition[(x * 2) * ny + y] = mix[y];
            transition[(x * 2 + 1) * ny + y] = base.row(x)[y];
        }
    }
    StateChannel::new(nx, ny, 2, 2, nsr, state_law, transition).expect("well-formed channel")
}

/// Memory cells with stuck-at defects: binary input/output, state alphabet
/// `{stuck-0, stuck-1, free}` with probabilities `(p/2, p/2, 1-p)`. The
/// writer observes the defect state; the reader observes nothing.
pub fn make_stuck_at(p_defect: f64) -> StateChannel {
    assert!((0.0..=1.0).contains(&p_defect));
    let probs = [p_defect / 2.0, p_defect / 2.0, 1.0 - p_defect];
    let state_law = JointTable::from_fn(vec![3, 3, 1], |i| {
        if i[0] == i[1] {
            probs[i[0]]
        } else {
            0.0
        }
    })
    .expect("valid state law");
    let mut transition = vec![0.0; 2 * 3 * 2];
    for x in 0..2 {
        // stuck-0 / stuck-1 force the output; the free state is noiseless.
        transition[(x * 3) * 2] = 1.0;
        transition[(x * 3 + 1) * 2 + 1] = 1.0;
        transition[(x * 3 + 2) * 2 + x] = 1.0;
    }
    StateChannel::new(2, 2, 3, 3, 1, state_law, transition).expect("well-formed channel")
}

/// Two-user random-access channel: the switch routes user 1's symbol when
/// `S = 1` and user 2's when `S = 0`; both transmitters observe `S`.
pub fn make_random_access_mac(base: &Dmc, p_on: f64, rx_knows: bool) -> MacChannel {
    assert!((0.0..=1.0).contains(&p_on));
    let nx = base.n_in;
    let ny = base.n_out;
    let nsr = if rx_knows { 2 } else { 1 };
    let state_law = JointTable::from_fn(vec![2, 2, 2, nsr], |i| {
        let (s, st1, st2, sr) = (i[0], i[1], i[2], i[3]);
        if st1 != s || st2 != s || (rx_knows && sr != s) {
            return 0.0;
        }
        if s == 1 {
            p_on
        } else {
            1.0 - p_on
        }
    })
    .expect("valid state law");
    let mut transition = vec![0.0; nx * nx * 2 * ny];
    for x1 in 0..nx {
        for x2 in 0..nx {
            for y in 0..ny {
                transition[((x1 * nx + x2) * 2) * ny + y] = base.row(x2)[y];
                transition[((x1 * nx + x2) * 2 + 1) * ny + y] = base.row(x1)[y];
            }
        }
    }
    // The shared switch makes the transmitter states fully correlated
    // except in the degenerate p_on = 0 or 1 cases.
    let independent = p_on == 0.0 || p_on == 1.0;
    MacChannel::new(
        nx,
        nx,
        ny,
        2,
        2,
        2,
        nsr,
        state_law,
        transition,
        independent,
    )
    .expect("well-formed channel")
}

/// Seeded random single-user channel with a full joint state law.
pub fn random_state_channel(
    nx: usize,
    ny: usize,
    ns: usize,
    nst: usize,
    nsr: usize,
    seed: u64,
) -> StateChannel {
    let law = sample_dist(ns * nst * nsr, derive_seed(seed, &[1]));
    let state_law = JointTable::new(vec![ns, nst, nsr], law.weights().to_vec())
        .expect("sampled law is valid");
    let mut transition = Vec::with_capacity(nx * ns * ny);
    for x in 0..nx {
        for s in 0..ns {
            let row = sample_dist(ny, derive_seed(seed, &[2, x as u64, s as u64]));
            transition.extend_from_slice(row.weights());
        }
    }
    StateChannel::new(nx, ny, ns, nst, nsr, state_law, transition).expect("well-formed channel")
}

/// Seeded random channel in which the transmitter and receiver both observe
/// the full channel state (`S_T = S_R = S`).
pub fn random_shared_state_channel(nx: usize, ny: usize, ns: usize, seed: u64) -> StateChannel {
    let ps = sample_dist(ns, derive_seed(seed, &[1]));
    let state_law = JointTable::from_fn(vec![ns, ns, ns], |i| {
        if i[0] == i[1] && i[1] == i[2] {
            ps.weights()[i[0]]
        } else {
            0.0
        }
    })
    .expect("valid state law");
    let mut transition = Vec::with_capacity(nx * ns * ny);
    for x in 0..nx {
        for s in 0..ns {
            let row = sample_dist(ny, derive_seed(seed, &[2, x as u64, s as u64]));
            transition.extend_from_slice(row.weights());
        }
    }
    StateChannel::new(nx, ny, ns, ns, ns, state_law, transition).expect("well-formed channel")
}

/// Seeded random two-user MAC with independent binary transmitter states.
/// The channel state is the pair `(S_T1, S_T2)` (`s = s_t1 * 2 + s_t2`);
/// when `rx_knows` is set the receiver observes the pair as well.
pub fn random_mac_independent(ny: usize, seed: u64, rx_knows: bool) -> MacChannel {
    let p1 = sample_dist(2, derive_seed(seed, &[1]));
    let p2 = sample_dist(2, derive_seed(seed, &[2]));
    let nsr = if rx_knows { 4 } else { 1 };
    let state_law = JointTable::from_fn(vec![4, 2, 2, nsr], |i| {
        let (s, st1, st2, sr) = (i[0], i[1], i[2], i[3]);
        if s != st1 * 2 + st2 || (rx_knows && sr != s) {
            return 0.0;
        }
        p1.weights()[st1] * p2.weights()[st2]
    })
    .expect("valid state law");
    let mut transition = Vec::with_capacity(2 * 2 * 4 * ny);
    for x1 in 0..2 {
        for x2 in 0..2 {
            for s in 0..4 {
                let row = sample_dist(
                    ny,
                    derive_seed(seed, &[3, x1 as u64, x2 as u64, s as u64]),
                );
                transition.extend_from_slice(row.weights());
            }
        }
    }
    MacChannel::new(2, 2, ny, 4, 2, 2, nsr, state_law, transition, true)
        .expect("well-formed channel")
}

/// Composes a relay channel from two explicit stages,
/// `P(y_r | x_s, x_r, s)` and `P(y_d | y_r, x_r, s_d)`, which makes it
/// physically degraded by construction.
pub struct RelayStages {
    pub nxs: usize,
    pub nxr: usize,
    pub nyr: usize,
    pub nyd: usize,
    pub ns: usize,
    pub nsd: usize,
    /// `[x_s][x_r][s][y_r]`
    pub stage1: Vec<f64>,
    /// `[y_r][x_r][s_d][y_d]`
    pub stage2: Vec<f64>,
    /// Joint law over (S, S_D), axes `[ns, nsd]`.
    pub state_law: JointTable,
}

pub fn make_degraded_relay(stages: &RelayStages) -> RelayChannel {
    let RelayStages {
        nxs,
        nxr,
        nyr,
        nyd,
        ns,
        nsd,
        ..
    } = *stages;
    let mut transition = vec![0.0; nxs * nxr * ns * nsd * nyr * nyd];
    for xs in 0..nxs {
        for xr in 0..nxr {
            for s in 0..ns {
                for sd in 0..nsd {
                    let base = (((xs * nxr + xr) * ns + s) * nsd + sd) * nyr * nyd;
                    for yr in 0..nyr {
                        let p1 = stages.stage1[((xs * nxr + xr) * ns + s) * nyr + yr];
                        if p1 == 0.0 {
                            continue;
                        }
                        for yd in 0..nyd {
                            let p2 = stages.stage2[((yr * nxr + xr) * nsd + sd) * nyd + yd];
                            transition[base + yr * nyd + yd] = p1 * p2;
                        }
                    }
                }
            }
        }
    }
    RelayChannel::new(
        nxs,
        nxr,
        nyr,
        nyd,
        ns,
        nsd,
        stages.state_law.clone(),
        transition,
    )
    .expect("composed channel is well-formed")
}

/// Trivial-state relay in which `Y_R` copies `X_S` and the destination sees
/// `X_R` through a BSC(`p`), ignoring `Y_R`.
pub fn make_relay_copy_then_bsc(p: f64) -> RelayChannel {
    let mut stage1 = vec![0.0; 2 * 2 * 1 * 2];
    for xs in 0..2 {
        for xr in 0..2 {
            stage1[((xs * 2 + xr) * 1) * 2 + xs] = 1.0;
        }
    }
    let mut stage2 = vec![0.0; 2 * 2 * 1 * 2];
    for yr in 0..2 {
        for xr in 0..2 {
            stage2[((yr * 2 + xr) * 1) * 2 + xr] = 1.0 - p;
            stage2[((yr * 2 + xr) * 1) * 2 + (1 - xr)] = p;
        }
    }
    make_degraded_relay(&RelayStages {
        nxs: 2,
        nxr: 2,
        nyr: 2,
        nyd: 2,
        ns: 1,
        nsd: 1,
        stage1,
        stage2,
        state_law: JointTable::new(vec![1, 1], vec![1.0]).unwrap(),
    })
}

/// Bottleneck relay: the source reaches the relay through a BSC(`p`) and
/// the relay output is forwarded noise-free to the destination.
pub fn make_relay_bottleneck(p: f64) -> RelayChannel {
    let mut stage1 = vec![0.0; 2 * 2 * 1 * 2];
    for xs in 0..2 {
        for xr in 0..2 {
            stage1[((xs * 2 + xr) * 1) * 2 + xs] = 1.0 - p;
            stage1[((xs * 2 + xr) * 1) * 2 + (1 - xs)] = p;
        }
    }
    let mut stage2 = vec![0.0; 2 * 2 * 1 * 2];
    for yr in 0..2 {
        for xr in 0..2 {
            stage2[((yr * 2 + xr) * 1) * 2 + yr] = 1.0;
        }
    }
    make_degraded_relay(&RelayStages {
        nxs: 2,
        nxr: 2,
        nyr: 2,
        nyd: 2,
        ns: 1,
        nsd: 1,
        stage1,
        stage2,
        state_law: JointTable::new(vec![1, 1], vec![1.0]).unwrap(),
    })
}

/// Seeded random degraded relay with binary alphabets; `with_state` makes
/// `S = S_D` binary (the destination knows the stage-one state), otherwise
/// states are trivial.
pub fn random_degraded_relay(seed: u64, with_state: bool) -> RelayChannel {
    let (ns, nsd) = if with_state { (2, 2) } else { (1, 1) };
    let mut stage1 = Vec::with_capacity(2 * 2 * ns * 2);
    for xs in 0..2u64 {
        for xr in 0..2u64 {
            for s in 0..ns as u64 {
                let row = sample_dist(2, derive_seed(seed, &[10, xs, xr, s]));
                stage1.extend_from_slice(row.weights());
            }
        }
    }
    let mut stage2 = Vec::with_capacity(2 * 2 * nsd * 2);
    for yr in 0..2u64 {
        for xr in 0..2u64 {
            for sd in 0..nsd as u64 {
                let row = sample_dist(2, derive_seed(seed, &[11, yr, xr, sd]));
                stage2.extend_from_slice(row.weights());
            }
        }
    }
    let state_law = if with_state {
        let ps = sample_dist(2, derive_seed(seed, &[12]));
        JointTable::from_fn(vec![2, 2], |i| {
            if i[0] == i[1] {
                ps.weights()[i[0]]
            } else {
                0.0
            }
        })
        .unwrap()
    } else {
        JointTable::new(vec![1, 1], vec![1.0]).unwrap()
    };
    make_degraded_relay(&RelayStages {
        nxs: 2,
        nxr: 2,
        nyr: 2,
        nyd: 2,
        ns,
        nsd,
        stage1,
        stage2,
        state_law,
    })
}

/// A relay whose destination output depends on the source input directly:
/// `Y_D = X_S` while `Y_R` is pure noise, so no factorization through
/// `(Y_R, X_R)` can explain the destination output.
pub fn make_non_degraded_relay() -> RelayChannel {
    let mut transition = vec![0.0; 2 * 2 * 1 * 1 * 2 * 2];
    for xs in 0..2 {
        for xr in 0..2 {
            let base = (xs * 2 + xr) * 4;
            for yr in 0..2 {
                transition[base + yr * 2 + xs] = 0.5;
            }
        }
    }
    RelayChannel::new(
        2,
        2,
        2,
        2,
        1,
        1,
        JointTable::new(vec![1, 1], vec![1.0]).unwrap(),
        transition,
    )
    .expect("well-formed channel")
}

/// Seeded random Dist helper re-exported for sweep construction.
pub fn random_dist(dim: usize, seed: u64) -> Dist {
    sample_dist(dim, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erasure_parity_shapes_and_rows() {
        let c = make_erasure_parity(2);
        assert_eq!((c.nx, c.ny, c.ns, c.nst, c.nsr), (4, 5, 2, 2, 1));
        assert!(c.is_valid());
        // X = 1, S = 1 is parity-matched: conveyed noise-free.
        assert_eq!(c.transition_row(1, 1)[1], 1.0);
        // X = 1, S = 0 is erased (last output index).
        assert_eq!(c.transition_row(1, 0)[4], 1.0);
    }

    #[test]
    fn random_access_switch_edges() {
        let base = Dmc::noiseless(2);
        let c = make_random_access(&base, 0.5, true);
        assert!(c.is_valid());
        // Switch open: output is uniform regardless of the input.
        assert_eq!(c.transition_row(0, 0), &[0.5, 0.5]);
        // Switch closed: output copies the input.
        assert_eq!(c.transition_row(0, 1), &[1.0, 0.0]);
        let off = make_random_access(&base, 0.0, false);
        assert!((off.state_marginal().weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stuck_at_rows() {
        let c = make_stuck_at(0.2);
        assert!(c.is_valid());
        assert_eq!(c.transition_row(1, 0), &[1.0, 0.0]); // stuck at 0
        assert_eq!(c.transition_row(0, 1), &[0.0, 1.0]); // stuck at 1
        assert_eq!(c.transition_row(1, 2), &[0.0, 1.0]); // free
        let ps = c.state_marginal();
        assert!((ps.weights()[2] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn random_access_mac_routes_by_switch() {
        let base = Dmc::noiseless(2);
        let m = make_random_access_mac(&base, 0.5, true);
        assert!(m.validate().is_empty());
        assert!(!m.tx_states_independent);
        assert!(m.rx_determines_tx_states());
        assert_eq!(m.transition_row(1, 0, 1), &[0.0, 1.0]); // user 1 drives
        assert_eq!(m.transition_row(1, 0, 0), &[1.0, 0.0]); // user 2 drives
    }

    #[test]
    fn independent_mac_generator_satisfies_its_flag() {
        for seed in 0..10 {
            let m = random_mac_independent(2, seed, true);
            assert!(m.validate().is_empty());
            assert!(m.tx_states_factorize(1e-9));
            assert!(m.rx_determines_tx_states());
        }
    }

    #[test]
    fn composed_relay_is_consistent() {
        let r = make_relay_copy_then_bsc(0.11);
        assert!(r.validate().is_empty());
        // yr copies xs; yd flips xr with probability 0.11
        let row = r.transition_row(1, 0, 0, 0);
        assert!((row[2] - 0.89).abs() < 1e-15); // (yr=1, yd=0)
        assert!((row[3] - 0.11).abs() < 1e-15); // (yr=1, yd=1)
    }
}
