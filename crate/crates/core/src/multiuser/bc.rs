//! Broadcast-channel inner-bound evaluators.
//!
//! These are constraint evaluators, not optimizers: given a candidate
//! auxiliary law they compute the displayed rate bounds exactly from the
//! assembled joint. Three families are covered: the Marton-style bounds
//! with causal transmitter side information, the two-auxiliary (`U`, `V`)
//! binning extension with non-causal side information, and the full
//! three-auxiliary non-causal extension with its positive-part common-rate
//! term. A small lattice optimizer over binary auxiliary laws is provided
//! for region sketches.

use crate::capacity::{SolveConfig, SolveError};
use crate::channel::BcChannel;
use crate::multiuser::mac::RegionPoint;
use crate::prob::{
    conditional_mi, derive_seed, mutual_information, sample_dist, simplex_grid, Dist, JointTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcMode {
    /// Auxiliaries independent of `S_T`; the input adapts via
    /// `X = f(W, U, V, S_T)`.
    Causal,
    /// Full conditional law `P(W, U, V, X | S_T)`.
    NonCausal,
}

/// Auxiliary law for the broadcast evaluators: conditional joint
/// `P(W, U, V | S_T)` plus the input conditional `P(X | W, U, V, S_T)`.
#[derive(Debug, Clone)]
pub struct BcAuxLaw {
    pub nw: usize,
    pub nu: usize,
    pub nv: usize,
    pub nx: usize,
    pub nst: usize,
    pub mode: BcMode,
    /// `[st][w][u][v]`, each `st` slice a distribution.
    aux: Vec<f64>,
    /// `[st][w][u][v][x]`, each cell a distribution over `x`.
    x_given: Vec<f64>,
}

impl BcAuxLaw {
    pub fn new(
        nw: usize,
        nu: usize,
        nv: usize,
        nx: usize,
        nst: usize,
        mode: BcMode,
        aux: Vec<f64>,
        x_given: Vec<f64>,
    ) -> Result<Self, String> {
        let cells = nw * nu * nv;
        if aux.len() != nst * cells {
            return Err("aux law has the wrong shape".into());
        }
        if x_given.len() != nst * cells * nx {
            return Err("input conditional has the wrong shape".into());
        }
        for st in 0..nst {
            let slice = &aux[st * cells..(st + 1) * cells];
            let sum: f64 = slice.iter().sum();
            if slice.iter().any(|&v| !v.is_finite() || v < 0.0) || (sum - 1.0).abs() > 1e-12 {
                return Err(format!("aux slice for s_t = {st} is not a distribution"));
            }
        }
        for (cell, row) in x_given.chunks(nx).enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&v| !v.is_finite() || v < 0.0) || (sum - 1.0).abs() > 1e-12 {
                return Err(format!("input conditional cell {cell} is not a distribution"));
            }
        }
        if mode == BcMode::Causal {
            for st in 1..nst {
                for c in 0..cells {
                    if (aux[st * cells + c] - aux[c]).abs() > 1e-12 {
                        return Err("causal mode requires the auxiliary law to be identical across s_t".into());
                    }
                }
            }
        }
        Ok(Self {
            nw,
            nu,
            nv,
            nx,
            nst,
            mode,
            aux,
            x_given,
        })
    }

    /// Causal law from a state-independent joint `P(W,U,V)` and a
    /// deterministic input map `f(w, u, v, s_t)`.
    pub fn causal_deterministic(
        joint_wuv: &JointTable,
        nx: usize,
        nst: usize,
        f_map: &[usize],
    ) -> Result<Self, String> {
        if joint_wuv.axes().len() != 3 {
            return Err("expected a three-axis joint over (W, U, V)".into());
        }
        let (nw, nu, nv) = (
            joint_wuv.axes()[0],
            joint_wuv.axes()[1],
            joint_wuv.axes()[2],
        );
        let cells = nw * nu * nv;
        if f_map.len() != cells * nst || f_map.iter().any(|&x| x >= nx) {
            return Err("input map must cover (W, U, V, S_T)".into());
        }
        let mut aux = Vec::with_capacity(nst * cells);
        for _ in 0..nst {
            aux.extend_from_slice(joint_wuv.mass());
        }
        let mut x_given = vec![0.0; nst * cells * nx];
        for st in 0..nst {
            for c in 0..cells {
                x_given[(st * cells + c) * nx + f_map[c * nst + st]] = 1.0;
            }
        }
        Self::new(nw, nu, nv, nx, nst, BcMode::Causal, aux, x_given)
    }

    #[inline]
    fn aux_value(&self, st: usize, w: usize, u: usize, v: usize) -> f64 {
        self.aux[((st * self.nw + w) * self.nu + u) * self.nv + v]
    }

    #[inline]
    fn x_row(&self, st: usize, w: usize, u: usize, v: usize) -> &[f64] {
        let base = (((st * self.nw + w) * self.nu + u) * self.nv + v) * self.nx;
        &self.x_given[base..base + self.nx]
    }

    /// Joint over `(W, U, V, S_T)` given a transmitter-state marginal.
    pub fn aux_state_joint(&self, pst: &Dist) -> JointTable {
        assert_eq!(pst.len(), self.nst);
        JointTable::from_fn(vec![self.nw, self.nu, self.nv, self.nst], |i| {
            pst.weights()[i[3]] * self.aux_value(i[3], i[0], i[1], i[2])
        })
        .expect("aux law induces a valid joint")
    }
}

/// Seeded random non-causal auxiliary law with the given alphabet sizes.
pub fn random_bc_aux(
    nw: usize,
    nu: usize,
    nv: usize,
    nx: usize,
    nst: usize,
    seed: u64,
) -> BcAuxLaw {
    let cells = nw * nu * nv;
    let mut aux = Vec::with_capacity(nst * cells);
    for st in 0..nst {
        aux.extend_from_slice(sample_dist(cells, derive_seed(seed, &[1, st as u64])).weights());
    }
    let mut x_given = Vec::with_capacity(nst * cells * nx);
    for cell in 0..nst * cells {
        x_given
            .extend_from_slice(sample_dist(nx, derive_seed(seed, &[2, cell as u64])).weights());
    }
    BcAuxLaw::new(nw, nu, nv, nx, nst, BcMode::NonCausal, aux, x_given)
        .expect("sampled law is valid")
}

/// The three evaluated rate bounds. `r1`, `r2` and `sum` are clamped at
/// zero; raw mutual-information terms are listed in `components`.
#[derive(Debug, Clone)]
pub struct BcBounds {
    pub r1_bits: f64,
    pub r2_bits: f64,
    pub sum_bits: f64,
    pub components: Vec<(String, f64)>,
}

/// Joint over `(W, U, V, S_T, S_R1, S_R2, Y1, Y2)`, axes in that order.
fn assemble_joint(bc: &BcChannel, a: &BcAuxLaw) -> JointTable {
    assert_eq!(bc.nx, a.nx, "input alphabets must agree");
    assert_eq!(bc.nst, a.nst, "state alphabets must agree");
    let axes = vec![a.nw, a.nu, a.nv, bc.nst, bc.nsr1, bc.nsr2, bc.ny1, bc.ny2];
    let total: usize = axes.iter().product();
    let mut mass = vec![0.0; total];
    for st in 0..bc.nst {
        for sr1 in 0..bc.nsr1 {
            for sr2 in 0..bc.nsr2 {
                let wstate = bc.state_law.value(&[st, sr1, sr2]);
                if wstate == 0.0 {
                    continue;
                }
                for w in 0..a.nw {
                    for u in 0..a.nu {
                        for v in 0..a.nv {
                            let pa = a.aux_value(st, w, u, v);
                            if pa == 0.0 {
                                continue;
                            }
                            let xrow = a.x_row(st, w, u, v);
                            for (x, &px) in xrow.iter().enumerate() {
                                if px == 0.0 {
                                    continue;
                                }
                                let chan = bc.transition_row(x, st);
                                let scale = wstate * pa * px;
                                for y1 in 0..bc.ny1 {
                                    for y2 in 0..bc.ny2 {
                                        let p = chan[y1 * bc.ny2 + y2];
                                        if p == 0.0 {
                                            continue;
                                        }
                                        let idx = (((((w * a.nu + u) * a.nv + v) * bc.nst + st)
                                            * bc.nsr1
                                            + sr1)
                                            * bc.nsr2
                                            + sr2)
                                            * bc.ny1
                                            * bc.ny2
                                            + y1 * bc.ny2
                                            + y2;
                                        mass[idx] += scale * p;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    JointTable::new(axes, mass).expect("assembled joint is valid")
}

// axis indices in the assembled joint
const W: usize = 0;
const U: usize = 1;
const V: usize = 2;
const ST: usize = 3;
const SR1: usize = 4;
const SR2: usize = 5;
const Y1: usize = 6;
const Y2: usize = 7;

fn cmi(j: &JointTable, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    conditional_mi(&j.regroup(&[a, b, c]).expect("regroup")).expect("conditional information")
}

fn mi(j: &JointTable, a: &[usize], b: &[usize]) -> f64 {
    mutual_information(&j.regroup(&[a, b]).expect("regroup")).expect("information")
}

/// Marton-style bounds with causal side information:
/// `R1 <= I(W,U; Y1 | S_R1)`, `R2 <= I(W,V; Y2 | S_R2)`, and the sum bound
/// `min{I(W;Y1|S_R1), I(W;Y2|S_R2)} + I(U;Y1|S_R1,W) + I(V;Y2|S_R2,W) -
/// I(U;V|W)`. Both readings of the common-message term (the min of the
/// two link informations and their sum) are reported in the components.
pub fn bc_eval_causal(bc: &BcChannel, a: &BcAuxLaw) -> Result<BcBounds, SolveError> {
    if a.mode != BcMode::Causal {
        return Err(SolveError::WrongAuxMode { expected: "causal" });
    }
    let j = assemble_joint(bc, a);
    let r1 = cmi(&j, &[W, U], &[Y1], &[SR1]);
    let r2 = cmi(&j, &[W, V], &[Y2], &[SR2]);
    let iw1 = cmi(&j, &[W], &[Y1], &[SR1]);
    let iw2 = cmi(&j, &[W], &[Y2], &[SR2]);
    let iu = cmi(&j, &[U], &[Y1], &[SR1, W]);
    let iv = cmi(&j, &[V], &[Y2], &[SR2, W]);
    let iuv_w = cmi(&j, &[U], &[V], &[W]);
    let sum = iw1.min(iw2) + iu + iv - iuv_w;
    Ok(BcBounds {
        r1_bits: r1.max(0.0),
        r2_bits: r2.max(0.0),
        sum_bits: sum.max(0.0),
        components: vec![
            ("common_y1_bits".into(), iw1),
            ("common_y2_bits".into(), iw2),
            ("common_min_reading_bits".into(), iw1.min(iw2)),
            ("common_sum_reading_bits".into(), iw1 + iw2),
            ("private_y1_bits".into(), iu),
            ("private_y2_bits".into(), iv),
            ("aux_overlap_bits".into(), iuv_w),
        ],
    })
}

/// Two-auxiliary binning bounds with non-causal side information:
/// `R1 <= I(U;Y1,S_R1) - I(U;S_T)`, `R2 <= I(V;Y2,S_R2) - I(V;S_T)`,
/// `R1+R2 <= I(U;Y1,S_R1) + I(V;Y2,S_R2) - I(U;V) - I(U,V;S_T)`.
/// `W` is marginalized out of the law.
pub fn bc_eval_evdm_noncausal(bc: &BcChannel, a: &BcAuxLaw) -> Result<BcBounds, SolveError> {
    let j = assemble_joint(bc, a);
    let iu_y1 = mi(&j, &[U], &[Y1, SR1]);
    let iv_y2 = mi(&j, &[V], &[Y2, SR2]);
    let iu_st = mi(&j, &[U], &[ST]);
    let iv_st = mi(&j, &[V], &[ST]);
    let iuv = mi(&j, &[U], &[V]);
    let iuv_st = mi(&j, &[U, V], &[ST]);
    let r1 = iu_y1 - iu_st;
    let r2 = iv_y2 - iv_st;
    let sum = iu_y1 + iv_y2 - iuv - iuv_st;
    Ok(BcBounds {
        r1_bits: r1.max(0.0),
        r2_bits: r2.max(0.0),
        sum_bits: sum.max(0.0),
        components: vec![
            ("info_y1_bits".into(), iu_y1),
            ("info_y2_bits".into(), iv_y2),
            ("state_cost_u_bits".into(), iu_st),
            ("state_cost_v_bits".into(), iv_st),
            ("aux_overlap_bits".into(), iuv),
            ("state_cost_pair_bits".into(), iuv_st),
        ],
    })
}

/// Full three-auxiliary non-causal bounds with the positive-part term:
/// `R1 <= I(W,U;Y1,S_R1) - I(W,U;S_T)`, `R2` symmetric, and
/// `R1+R2 <= -[max{I(W;Y1,S_R1), I(W;Y2,S_R2)} - I(W;S_T)]_+ + R1raw +
/// R2raw - I(U;V|W,S_T)`.
pub fn bc_eval_steinberg_shamai(bc: &BcChannel, a: &BcAuxLaw) -> Result<BcBounds, SolveError> {
    let j = assemble_joint(bc, a);
    let r1 = mi(&j, &[W, U], &[Y1, SR1]) - mi(&j, &[W, U], &[ST]);
    let r2 = mi(&j, &[W, V], &[Y2, SR2]) - mi(&j, &[W, V], &[ST]);
    let iw1 = mi(&j, &[W], &[Y1, SR1]);
    let iw2 = mi(&j, &[W], &[Y2, SR2]);
    let iw_st = mi(&j, &[W], &[ST]);
    let positive_part = (iw1.max(iw2) - iw_st).max(0.0);
    let iuv_wst = cmi(&j, &[U], &[V], &[W, ST]);
    let sum = -positive_part + r1 + r2 - iuv_wst;
    Ok(BcBounds {
        r1_bits: r1.max(0.0),
        r2_bits: r2.max(0.0),
        sum_bits: sum.max(0.0),
        components: vec![
            ("common_y1_bits".into(), iw1),
            ("common_y2_bits".into(), iw2),
            ("common_state_cost_bits".into(), iw_st),
            ("positive_part_bits".into(), positive_part),
            ("aux_overlap_given_state_bits".into(), iuv_wst),
        ],
    })
}

/// Whether the causal and non-causal inner-bound extensions coincide for
/// this auxiliary law: the defect
/// `delta = I(U,V;S_T|W) - I(U;S_T|W) - I(V;S_T|W)` must vanish.
/// `delta_alt_bits` is the same quantity through the conditional-overlap
/// identity `I(U;V|W,S_T) - I(U;V|W)`; the two agree up to round-off.
#[derive(Debug, Clone)]
pub struct Observation1Report {
    pub holds: bool,
    pub delta_bits: f64,
    pub delta_alt_bits: f64,
}

pub fn observation1_predicate(a: &BcAuxLaw, pst: &Dist) -> Observation1Report {
    let j = a.aux_state_joint(pst);
    // axes: [w, u, v, st]
    let direct = conditional_mi(&j.regroup(&[&[1, 2], &[3], &[0]]).unwrap()).unwrap()
        - conditional_mi(&j.regroup(&[&[1], &[3], &[0]]).unwrap()).unwrap()
        - conditional_mi(&j.regroup(&[&[2], &[3], &[0]]).unwrap()).unwrap();
    let alt = conditional_mi(&j.regroup(&[&[1], &[2], &[0, 3]]).unwrap()).unwrap()
        - conditional_mi(&j.regroup(&[&[1], &[2], &[0]]).unwrap()).unwrap();
    Observation1Report {
        holds: direct.abs() <= 1e-9,
        delta_bits: direct,
        delta_alt_bits: alt,
    }
}

/// Small region sketch with causal auxiliaries: lattice over binary
/// `P(W,U,V)` laws crossed with seeded deterministic input maps. Limited to
/// binary alphabets and `resolution <= 8`; the auxiliary joint grows too
/// fast beyond that.
pub fn bc_region_causal(
    bc: &BcChannel,
    resolution: usize,
    f_samples: usize,
    cfg: &SolveConfig,
) -> Result<Vec<RegionPoint>, SolveError> {
    if resolution > 8 || bc.nx > 2 || bc.ny1 > 2 || bc.ny2 > 2 || bc.nst > 2 {
        return Err(SolveError::BcRegionScope);
    }
    let grid = simplex_grid(8, resolution)?;
    let cells = 8 * bc.nst;
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x6263]));
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(f_samples);
    maps.push((0..cells).map(|c| (c / bc.nst / 4) % 2).collect()); // x = w
    maps.push((0..cells).map(|c| (c / bc.nst / 2) % 2).collect()); // x = u
    while maps.len() < f_samples {
        maps.push((0..cells).map(|_| rng.gen_range(0..bc.nx)).collect());
    }
    let mut corners: Vec<RegionPoint> = Vec::new();
    for point in &grid {
        let joint =
            JointTable::new(vec![2, 2, 2], point.weights().to_vec()).expect("grid point valid");
        for f_map in &maps {
            let law = BcAuxLaw::causal_deterministic(&joint, bc.nx, bc.nst, f_map)
                .expect("constructed causal law");
            let b = bc_eval_causal(bc, &law)?;
            let (a_, b_, c_) = (b.r1_bits, b.r2_bits, b.sum_bits);
            let r1 = a_.min(c_);
            let r2c = b_.min((c_ - r1).max(0.0));
            let r2 = b_.min(c_);
            let r1c = a_.min((c_ - r2).max(0.0));
            corners.push(RegionPoint {
                r1_bits: r1,
                r2_bits: r2c,
                binding: vec!["r1", "sum"],
                bounds: [a_, b_, c_],
            });
            corners.push(RegionPoint {
                r1_bits: r1c,
                r2_bits: r2,
                binding: vec!["r2", "sum"],
                bounds: [a_, b_, c_],
            });
        }
    }
    super::mac::pareto_hull(&mut corners);
    Ok(corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::xlog2x;

    fn symmetric_bc(flip1: f64, flip2: f64) -> BcChannel {
        // X broadcast through two independent BSCs; trivial states.
        let law = JointTable::new(vec![1, 1, 1], vec![1.0]).unwrap();
        let mut transition = Vec::new();
        for x in 0..2usize {
            for _st in 0..1 {
                for y1 in 0..2usize {
                    for y2 in 0..2usize {
                        let p1 = if y1 == x { 1.0 - flip1 } else { flip1 };
                        let p2 = if y2 == x { 1.0 - flip2 } else { flip2 };
                        transition.push(p1 * p2);
                    }
                }
            }
        }
        BcChannel::new(2, 2, 2, 1, 1, 1, law, transition).unwrap()
    }

    /// BC whose state flips user 1's bit; transmitter sees the state.
    fn state_bc() -> BcChannel {
        let law = JointTable::new(vec![2, 1, 1], vec![0.5, 0.5]).unwrap();
        let mut transition = Vec::new();
        for x in 0..2usize {
            for st in 0..2usize {
                for y1 in 0..2usize {
                    for y2 in 0..2usize {
                        let want1 = x ^ st;
                        let p = if y1 == want1 && y2 == x { 1.0 } else { 0.0 };
                        transition.push(p);
                    }
                }
            }
        }
        BcChannel::new(2, 2, 2, 2, 1, 1, law, transition).unwrap()
    }

    #[test]
    fn constant_auxiliaries_give_zero_bounds() {
        let bc = symmetric_bc(0.1, 0.2);
        let joint = JointTable::new(vec![1, 1, 1], vec![1.0]).unwrap();
        let law = BcAuxLaw::causal_deterministic(&joint, 2, 1, &[0]).unwrap();
        let b = bc_eval_causal(&bc, &law).unwrap();
        assert_eq!(b.r1_bits, 0.0);
        assert_eq!(b.r2_bits, 0.0);
        assert_eq!(b.sum_bits, 0.0);
    }

    #[test]
    fn degenerate_receivers_make_symmetric_bounds() {
        // identical channels to both receivers and V = U => R1 bound = R2 bound
        let bc = symmetric_bc(0.1, 0.1);
        // W constant, U = V uniform binary, X = U
        let joint = JointTable::from_fn(vec![1, 2, 2], |i| if i[1] == i[2] { 0.5 } else { 0.0 })
            .unwrap();
        let f_map: Vec<usize> = (0..4).map(|c| (c / 2) % 2).collect(); // x = u
        let law = BcAuxLaw::causal_deterministic(&joint, 2, 1, &f_map).unwrap();
        let b = bc_eval_causal(&bc, &law).unwrap();
        assert!((b.r1_bits - b.r2_bits).abs() < 1e-12);
        let h = |p: f64| -xlog2x(p) - xlog2x(1.0 - p);
        assert!((b.r1_bits - (1.0 - h(0.1))).abs() < 1e-9);
    }

    #[test]
    fn evdm_trivial_state_matches_plain_binning_form() {
        // S_T trivial: the bounds reduce to I(U;Y1), I(V;Y2) minus overlap.
        let bc = symmetric_bc(0.05, 0.25);
        let a = random_bc_aux(1, 2, 2, 2, 1, 3);
        let b = bc_eval_evdm_noncausal(&bc, &a).unwrap();
        let zero = |name: &str| {
            b.components
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .unwrap()
        };
        assert!(zero("state_cost_u_bits").abs() < 1e-12);
        assert!(zero("state_cost_pair_bits").abs() < 1e-12);
    }

    #[test]
    fn steinberg_shamai_with_constant_w_matches_evdm() {
        // Identity: with |W| = 1 the positive-part term vanishes and the two
        // sum bounds agree on any law.
        let bc = state_bc();
        for seed in 0..20 {
            let a = random_bc_aux(1, 2, 2, 2, 2, seed);
            let ss = bc_eval_steinberg_shamai(&bc, &a).unwrap();
            let ev = bc_eval_evdm_noncausal(&bc, &a).unwrap();
            assert!(
                (ss.sum_bits - ev.sum_bits).abs() < 1e-9,
                "seed {seed}: {} vs {}",
                ss.sum_bits,
                ev.sum_bits
            );
        }
    }

    #[test]
    fn steinberg_shamai_on_causal_laws_matches_causal_eval() {
        // With auxiliaries independent of S_T the overlap condition holds
        // automatically and the non-causal bounds collapse to the causal ones.
        let bc = state_bc();
        for seed in 0..20 {
            let joint = JointTable::new(
                vec![2, 2, 2],
                sample_dist(8, derive_seed(seed, &[5])).weights().to_vec(),
            )
            .unwrap();
            let f_map: Vec<usize> = {
                use rand::{Rng, SeedableRng};
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, &[6]));
                (0..16).map(|_| rng.gen_range(0..2)).collect()
            };
            let law = BcAuxLaw::causal_deterministic(&joint, 2, 2, &f_map).unwrap();
            let causal = bc_eval_causal(&bc, &law).unwrap();
            let ss = bc_eval_steinberg_shamai(&bc, &law).unwrap();
            assert!((causal.r1_bits - ss.r1_bits).abs() < 1e-9, "seed {seed}");
            assert!((causal.r2_bits - ss.r2_bits).abs() < 1e-9, "seed {seed}");
            assert!((causal.sum_bits - ss.sum_bits).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn positive_part_term_is_never_negative() {
        let bc = state_bc();
        for seed in 0..10 {
            let a = random_bc_aux(2, 2, 2, 2, 2, derive_seed(seed, &[9]));
            let b = bc_eval_steinberg_shamai(&bc, &a).unwrap();
            let pp = b
                .components
                .iter()
                .find(|(n, _)| n == "positive_part_bits")
                .unwrap()
                .1;
            assert!(pp >= 0.0);
        }
    }

    #[test]
    fn observation_identity_positive_and_negative_cases() {
        // independent auxiliaries: holds with delta = 0
        let a = random_bc_aux(2, 2, 2, 2, 1, 11);
        let rep = observation1_predicate(&a, &Dist::uniform(1));
        assert!(rep.holds);
        assert!(rep.delta_bits.abs() < 1e-12);

        // U = V = S_T uniform binary, W constant: delta = -1 and fails
        let nst = 2;
        let mut aux = vec![0.0; nst * 4];
        // P(u, v | st) = 1 at u = v = st
        aux[0] = 1.0; // st = 0 -> (u=0, v=0)
        aux[4 + 3] = 1.0; // st = 1 -> (u=1, v=1)
        let x_given: Vec<f64> = (0..nst * 4).flat_map(|_| vec![1.0, 0.0]).collect();
        let law = BcAuxLaw::new(1, 2, 2, 2, nst, BcMode::NonCausal, aux, x_given).unwrap();
        let rep = observation1_predicate(&law, &Dist::uniform(2));
        assert!(!rep.holds);
        assert!((rep.delta_bits + 1.0).abs() < 1e-12);
        assert!((rep.delta_alt_bits + 1.0).abs() < 1e-12);
    }

    #[test]
    fn observation_dual_forms_agree_on_seeded_laws() {
        for seed in 0..100 {
            let a = random_bc_aux(2, 2, 2, 2, 2, derive_seed(seed, &[13]));
            let pst = sample_dist(2, derive_seed(seed, &[14]));
            let rep = observation1_predicate(&a, &pst);
            assert!(
                (rep.delta_bits - rep.delta_alt_bits).abs() <= 1e-9,
                "seed {seed}: {} vs {}",
                rep.delta_bits,
                rep.delta_alt_bits
            );
        }
    }

    #[test]
    fn evaluator_matches_independent_recomputation() {
        // assemble the joint independently and recompute one bound
        let bc = state_bc();
        let a = random_bc_aux(2, 2, 2, 2, 2, 21);
        let b = bc_eval_evdm_noncausal(&bc, &a).unwrap();
        // independent route: direct summation joint over (u, y1)
        let mut joint_uy1 = vec![0.0; 2 * 2]; // (u, y1); sr1 is trivial
        for st in 0..2 {
            let wst = bc.state_law.value(&[st, 0, 0]);
            for w in 0..2 {
                for u in 0..2 {
                    for v in 0..2 {
                        let pa = wst * a.aux_value(st, w, u, v);
                        for x in 0..2 {
                            let px = a.x_row(st, w, u, v)[x];
                            if px == 0.0 {
                                continue;
                            }
                            for y1 in 0..2 {
                                let mut py1 = 0.0;
                                for y2 in 0..2 {
                                    py1 += bc.transition_row(x, st)[y1 * 2 + y2];
                                }
                                joint_uy1[u * 2 + y1] += pa * px * py1;
                            }
                        }
                    }
                }
            }
        }
        let tab = JointTable::new(vec![2, 2], joint_uy1).unwrap();
        let direct = mutual_information(&tab).unwrap();
        let from_components = b
            .components
            .iter()
            .find(|(n, _)| n == "info_y1_bits")
            .unwrap()
            .1;
        assert!((direct - from_components).abs() < 1e-12);
    }
}
