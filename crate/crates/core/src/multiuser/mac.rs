//! Multiple access channel solvers: causal sum capacity over Shannon
//! strategy pairs, the receiver-knows-the-states rate region, the
//! non-causal achievable sum bound, and simplex-grid oracles for both.

use crate::capacity::{Achiever, AuxCode, CapacityReport, SolveConfig, SolveError};
use crate::channel::{ChannelError, MacChannel, Strategy};
use crate::prob::{
    derive_seed, entropy_bits, sample_dist, simplex_grid, Dist, JointTable,
};

const LN_2: f64 = std::f64::consts::LN_2;

/// Causal two-user auxiliary code: independent laws over per-user
/// auxiliary letters plus deterministic input maps `f_i: U_i x S_Ti -> X_i`.
/// Here the auxiliary letters are the Shannon strategies themselves and
/// the maps are strategy evaluation.
#[derive(Debug, Clone)]
pub struct MacAuxCode {
    pub u1_law: Dist,
    pub u2_law: Dist,
    /// Row-major over `(u1, s_t1)`.
    pub f1: Vec<usize>,
    /// Row-major over `(u2, s_t2)`.
    pub f2: Vec<usize>,
}

impl MacAuxCode {
    fn from_strategy_laws(
        p1: Dist,
        p2: Dist,
        t1: &[Strategy],
        t2: &[Strategy],
    ) -> Self {
        let f1 = t1.iter().flat_map(|t| t.map.iter().copied()).collect();
        let f2 = t2.iter().flat_map(|t| t.map.iter().copied()).collect();
        Self {
            u1_law: p1,
            u2_law: p2,
            f1,
            f2,
        }
    }
}

/// Pairwise strategy kernel `P(yext | t1, t2)` with `yext = y * nsr + sr`.
pub struct MacStrategySpace {
    pub t1: Vec<Strategy>,
    pub t2: Vec<Strategy>,
    pub nyext: usize,
    kernel: Vec<f64>,
}

impl MacStrategySpace {
    #[inline]
    pub fn row(&self, i1: usize, i2: usize) -> &[f64] {
        let base = (i1 * self.t2.len() + i2) * self.nyext;
        &self.kernel[base..base + self.nyext]
    }
}

/// Folds both transmitters' causal side information into strategy alphabets:
/// `P(y, sr | t1, t2) = sum_{s, st1, st2} P(s, st1, st2, sr)
/// P(y | t1(st1), t2(st2), s)`.
pub fn mac_strategy_transform(
    m: &MacChannel,
    cap: usize,
) -> Result<MacStrategySpace, SolveError> {
    for (nx, nst) in [(m.nx1, m.nst1), (m.nx2, m.nst2)] {
        let count = (nx as u128).saturating_pow(nst as u32);
        if count > cap as u128 {
            return Err(ChannelError::StrategyCapExceeded { count, cap }.into());
        }
    }
    let t1 = Strategy::enumerate_all(m.nx1, m.nst1);
    let t2 = Strategy::enumerate_all(m.nx2, m.nst2);
    let nyext = m.ny * m.nsr;
    let mut kernel = vec![0.0; t1.len() * t2.len() * nyext];
    let law = m.state_law.mass();
    for (i1, s1) in t1.iter().enumerate() {
        for (i2, s2) in t2.iter().enumerate() {
            let out = &mut kernel[(i1 * t2.len() + i2) * nyext..(i1 * t2.len() + i2 + 1) * nyext];
            let mut cell = 0usize;
            for s in 0..m.ns {
                for st1 in 0..m.nst1 {
                    for st2 in 0..m.nst2 {
                        let row = m.transition_row(s1.map[st1], s2.map[st2], s);
                        for sr in 0..m.nsr {
                            let w = law[cell];
                            cell += 1;
                            if w == 0.0 {
                                continue;
                            }
                            for (y, &wy) in row.iter().enumerate() {
                                out[y * m.nsr + sr] += w * wy;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(MacStrategySpace {
        t1,
        t2,
        nyext,
        kernel,
    })
}

/// `I(T1, T2; Yext)` in bits for product input laws.
fn pair_information(space: &MacStrategySpace, p1: &[f64], p2: &[f64]) -> f64 {
    let nyext = space.nyext;
    let mut col = vec![0.0; nyext];
    for (i1, &a) in p1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (i2, &b) in p2.iter().enumerate() {
            let w = a * b;
            if w == 0.0 {
                continue;
            }
            for (y, &k) in space.row(i1, i2).iter().enumerate() {
                col[y] += w * k;
            }
        }
    }
    let mut acc = 0.0;
    for (i1, &a) in p1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (i2, &b) in p2.iter().enumerate() {
            let w = a * b;
            if w == 0.0 {
                continue;
            }
            for (y, &k) in space.row(i1, i2).iter().enumerate() {
                if k > 0.0 {
                    acc += w * k * (k / col[y]).ln();
                }
            }
        }
    }
    acc / LN_2
}

/// One per-user multiplicative sweep; monotone in the objective.
fn pair_sweep(space: &MacStrategySpace, p1: &mut [f64], p2: &mut [f64]) {
    let nyext = space.nyext;
    let mut col = vec![0.0; nyext];
    for user in 0..2 {
        col.iter_mut().for_each(|v| *v = 0.0);
        for (i1, &a) in p1.iter().enumerate() {
            for (i2, &b) in p2.iter().enumerate() {
                let w = a * b;
                if w == 0.0 {
                    continue;
                }
                for (y, &k) in space.row(i1, i2).iter().enumerate() {
                    col[y] += w * k;
                }
            }
        }
        if user == 0 {
            let mut z = 0.0;
            let mut d = vec![0.0; p1.len()];
            for i1 in 0..p1.len() {
                let mut acc = 0.0;
                for (i2, &b) in p2.iter().enumerate() {
                    if b == 0.0 {
                        continue;
                    }
                    for (y, &k) in space.row(i1, i2).iter().enumerate() {
                        if k > 0.0 {
                            acc += b * k * (k / col[y]).ln();
                        }
                    }
                }
                d[i1] = acc;
            }
            let dmax = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for i1 in 0..p1.len() {
                p1[i1] *= (d[i1] - dmax).exp();
                z += p1[i1];
            }
            p1.iter_mut().for_each(|v| *v /= z);
        } else {
            let mut z = 0.0;
            let mut d = vec![0.0; p2.len()];
            for i2 in 0..p2.len() {
                let mut acc = 0.0;
                for (i1, &a) in p1.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for (y, &k) in space.row(i1, i2).iter().enumerate() {
                        if k > 0.0 {
                            acc += a * k * (k / col[y]).ln();
                        }
                    }
                }
                d[i2] = acc;
            }
            let dmax = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for i2 in 0..p2.len() {
                p2[i2] *= (d[i2] - dmax).exp();
                z += p2[i2];
            }
            p2.iter_mut().for_each(|v| *v /= z);
        }
    }
}

/// Maximum of `I(U1, U2; Y, S_R)` over independent strategy laws, computed
/// by per-user alternating maximization with restarts.
///
/// The value is always an achievable sum rate. It equals the sum capacity
/// when the transmitter states are independent, and also when the receiver
/// side information determines both transmitter states; otherwise the
/// report is flagged `inner_bound_only`.
pub fn mac_sum_capacity_causal(
    m: &MacChannel,
    cfg: &SolveConfig,
) -> Result<CapacityReport, SolveError> {
    let space = mac_strategy_transform(m, cfg.strategy_cap)?;
    let (n1, n2) = (space.t1.len(), space.t2.len());
    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut best_iterations = 0;
    let mut best_converged = false;
    for r in 0..cfg.restarts.max(1) {
        let mut p1 = if r == 0 {
            vec![1.0 / n1 as f64; n1]
        } else {
            sample_dist(n1, derive_seed(cfg.seed, &[1, r as u64]))
                .weights()
                .to_vec()
        };
        let mut p2 = if r == 0 {
            vec![1.0 / n2 as f64; n2]
        } else {
            sample_dist(n2, derive_seed(cfg.seed, &[2, r as u64]))
                .weights()
                .to_vec()
        };
        let mut value = pair_information(&space, &p1, &p2);
        let mut iterations = 0;
        let mut converged = false;
        for iter in 1..=cfg.max_iter {
            iterations = iter;
            pair_sweep(&space, &mut p1, &mut p2);
            let next = pair_information(&space, &p1, &p2);
            debug_assert!(next >= value - 1e-10);
            let improved = next - value;
            value = next;
            if improved < cfg.tol_bits {
                converged = true;
                break;
            }
        }
        if value > best_value {
            best_value = value;
            best = Some((p1, p2));
            best_iterations = iterations;
            best_converged = converged;
        }
    }
    let (p1, p2) = best.expect("at least one restart runs");
    let exact = (m.tx_states_independent && m.tx_states_factorize(1e-9))
        || m.rx_determines_tx_states();
    let code = MacAuxCode::from_strategy_laws(
        Dist::normalized(p1).expect("valid law"),
        Dist::normalized(p2).expect("valid law"),
        &space.t1,
        &space.t2,
    );
    Ok(CapacityReport {
        value_bits: best_value.max(0.0),
        achiever: Achiever::MacCausal(Box::new(code)),
        iterations: best_iterations,
        restarts_used: cfg.restarts.max(1),
        converged: best_converged,
        exhaustive: true,
        inner_bound_only: !exact,
        oracle_gap_bits: None,
    })
}

/// Exhaustive lattice search of the causal sum objective over product
/// strategy laws; the independent cross-check for the alternating solver.
pub fn mac_sum_grid_oracle(
    m: &MacChannel,
    resolution: usize,
    cfg: &SolveConfig,
) -> Result<f64, SolveError> {
    let space = mac_strategy_transform(m, cfg.strategy_cap)?;
    let g1 = simplex_grid(space.t1.len(), resolution)?;
    let g2 = simplex_grid(space.t2.len(), resolution)?;
    let total = (g1.len() as u128).saturating_mul(g2.len() as u128);
    if total > cfg.grid_budget {
        return Err(SolveError::GridBudget {
            count: total,
            budget: cfg.grid_budget,
        });
    }
    let mut best = f64::NEG_INFINITY;
    for a in &g1 {
        for b in &g2 {
            let v = pair_information(&space, a.weights(), b.weights());
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Receiver-knows-the-states region
// ---------------------------------------------------------------------------

/// A rate pair on (or under) the dominant face, with the constraints that
/// are tight at it and the `(I(X1;Y|S_R,X2), I(X2;Y|S_R,X1),
/// I(X1,X2;Y|S_R))` triple of its generating input law.
#[derive(Debug, Clone)]
pub struct RegionPoint {
    pub r1_bits: f64,
    pub r2_bits: f64,
    pub binding: Vec<&'static str>,
    pub bounds: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct MacRegion {
    /// Vertices of the convex hull that are not dominated, sorted by
    /// increasing `r1`.
    pub points: Vec<RegionPoint>,
    pub max_sum_bits: f64,
    pub exhaustive: bool,
    /// Whether the matching converse applies (independent transmitter
    /// states on top of the receiver determinism hypothesis).
    pub converse_exact: bool,
}

fn mac_constraint_triple(
    m: &MacChannel,
    rows1: &[&Dist],
    rows2: &[&Dist],
) -> (f64, f64, f64) {
    // joint over (x1, x2, y, sr)
    let law = m.state_law.mass();
    let axes = vec![m.nx1, m.nx2, m.ny, m.nsr];
    let mut mass = vec![0.0; m.nx1 * m.nx2 * m.ny * m.nsr];
    let mut cell = 0usize;
    for s in 0..m.ns {
        for st1 in 0..m.nst1 {
            for st2 in 0..m.nst2 {
                for sr in 0..m.nsr {
                    let w = law[cell];
                    cell += 1;
                    if w == 0.0 {
                        continue;
                    }
                    for x1 in 0..m.nx1 {
                        let a = rows1[st1].weights()[x1];
                        if a == 0.0 {
                            continue;
                        }
                        for x2 in 0..m.nx2 {
                            let b = rows2[st2].weights()[x2];
                            if b == 0.0 {
                                continue;
                            }
                            let row = m.transition_row(x1, x2, s);
                            for y in 0..m.ny {
                                mass[((x1 * m.nx2 + x2) * m.ny + y) * m.nsr + sr] +=
                                    w * a * b * row[y];
                            }
                        }
                    }
                }
            }
        }
    }
    let joint = JointTable::new(axes, mass).expect("assembled joint is valid");
    let a = crate::prob::conditional_mi(&joint.regroup(&[&[0], &[2], &[3, 1]]).unwrap())
        .expect("three-axis table");
    let b = crate::prob::conditional_mi(&joint.regroup(&[&[1], &[2], &[3, 0]]).unwrap())
        .expect("three-axis table");
    let c = crate::prob::conditional_mi(&joint.regroup(&[&[0, 1], &[2], &[3]]).unwrap())
        .expect("three-axis table");
    (a, b, c)
}

/// Reduces a corner cloud to the convex dominant face: Pareto-maximal
/// points first, then the concave upper chain, deduplicated at 1e-12.
pub(crate) fn pareto_hull(points: &mut Vec<RegionPoint>) {
    let mut pts = std::mem::take(points);
    pts.sort_by(|p, q| {
        p.r1_bits
            .partial_cmp(&q.r1_bits)
            .unwrap()
            .then(p.r2_bits.partial_cmp(&q.r2_bits).unwrap())
    });
    // scan r1 descending; a point survives only if its r2 beats everything
    // with larger-or-equal r1
    let mut pareto: Vec<RegionPoint> = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for p in pts.into_iter().rev() {
        if p.r2_bits > best_r2 + 1e-12 {
            best_r2 = p.r2_bits;
            pareto.push(p);
        }
    }
    pareto.reverse();
    let mut hull: Vec<RegionPoint> = Vec::new();
    for p in pareto {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (b.r1_bits - a.r1_bits) * (p.r2_bits - a.r2_bits)
                - (b.r2_bits - a.r2_bits) * (p.r1_bits - a.r1_bits);
            if cross >= -1e-15 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    *points = hull;
}

/// The capacity region when `(S_T1, S_T2)` is a deterministic function of
/// `S_R`: pentagon corners of `I(X1;Y|S_R,X2)`, `I(X2;Y|S_R,X1)`,
/// `I(X1,X2;Y|S_R)` over a lattice of conditional input laws
/// `P(X1|S_T1) P(X2|S_T2)`, hulled.
pub fn mac_region_rx_knows(
    m: &MacChannel,
    resolution: usize,
    cfg: &SolveConfig,
) -> Result<MacRegion, SolveError> {
    if let Some(sr) = m.rx_tx_ambiguous_sr() {
        return Err(SolveError::RxDoesNotDetermineTx { sr });
    }
    let row_grid1 = simplex_grid(m.nx1, resolution)?;
    let row_grid2 = simplex_grid(m.nx2, resolution)?;
    let combos1 = (row_grid1.len() as u128).saturating_pow(m.nst1 as u32);
    let combos2 = (row_grid2.len() as u128).saturating_pow(m.nst2 as u32);
    let total = combos1.saturating_mul(combos2);
    if total > cfg.grid_budget {
        return Err(SolveError::GridBudget {
            count: total,
            budget: cfg.grid_budget,
        });
    }
    let mut corners: Vec<RegionPoint> = Vec::new();
    let mut max_sum = 0.0f64;
    let mut idx = vec![0usize; m.nst1 + m.nst2];
    loop {
        let rows1: Vec<&Dist> = (0..m.nst1).map(|i| &row_grid1[idx[i]]).collect();
        let rows2: Vec<&Dist> = (0..m.nst2)
            .map(|i| &row_grid2[idx[m.nst1 + i]])
            .collect();
        let (a, b, c) = mac_constraint_triple(m, &rows1, &rows2);
        if c > max_sum {
            max_sum = c;
        }
        let bounds = [a, b, c];
        corners.push(RegionPoint {
            r1_bits: a,
            r2_bits: (c - a).max(0.0),
            binding: vec!["r1", "sum"],
            bounds,
        });
        corners.push(RegionPoint {
            r1_bits: (c - b).max(0.0),
            r2_bits: b,
            binding: vec!["r2", "sum"],
            bounds,
        });
        corners.push(RegionPoint {
            r1_bits: a,
            r2_bits: 0.0,
            binding: vec!["r1"],
            bounds,
        });
        corners.push(RegionPoint {
            r1_bits: 0.0,
            r2_bits: b,
            binding: vec!["r2"],
            bounds,
        });
        let mut done = true;
        for d in (0..idx.len()).rev() {
            idx[d] += 1;
            let limit = if d < m.nst1 {
                row_grid1.len()
            } else {
                row_grid2.len()
            };
            if idx[d] < limit {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }
    pareto_hull(&mut corners);
    Ok(MacRegion {
        points: corners,
        max_sum_bits: max_sum,
        exhaustive: true,
        converse_exact: m.tx_states_independent && m.tx_states_factorize(1e-9),
    })
}

// ---------------------------------------------------------------------------
// Non-causal achievable sum
// ---------------------------------------------------------------------------

/// Per-pair objective machinery for
/// `I(U1,U2;Y,S_R) - I(U1;S_T1) - I(U2;S_T2)`, written as
/// `H(U1|S_T1) + H(U2|S_T2) - H(U1,U2|Y,S_R)`.
struct MacGpObjective {
    u1: usize,
    u2: usize,
    nst1: usize,
    nst2: usize,
    nyext: usize,
    pst1: Vec<f64>,
    pst2: Vec<f64>,
    /// `C[(u1, st1), (u2, st2)][yext] = sum_s P(s, st1, st2, sr) W(...)`.
    c: Vec<f64>,
}

impl MacGpObjective {
    fn new(m: &MacChannel, u1: usize, u2: usize, f1: &[usize], f2: &[usize]) -> Self {
        let nyext = m.ny * m.nsr;
        let rows1 = u1 * m.nst1;
        let rows2 = u2 * m.nst2;
        let mut c = vec![0.0; rows1 * rows2 * nyext];
        let law = m.state_law.mass();
        for a1 in 0..rows1 {
            let (uu1, st1) = (a1 / m.nst1, a1 % m.nst1);
            let x1 = f1[uu1 * m.nst1 + st1];
            for a2 in 0..rows2 {
                let (uu2, st2) = (a2 / m.nst2, a2 % m.nst2);
                let x2 = f2[uu2 * m.nst2 + st2];
                let out = &mut c[(a1 * rows2 + a2) * nyext..(a1 * rows2 + a2 + 1) * nyext];
                for s in 0..m.ns {
                    let row = m.transition_row(x1, x2, s);
                    for sr in 0..m.nsr {
                        let w = law[((s * m.nst1 + st1) * m.nst2 + st2) * m.nsr + sr];
                        if w == 0.0 {
                            continue;
                        }
                        for (y, &wy) in row.iter().enumerate() {
                            out[y * m.nsr + sr] += w * wy;
                        }
                    }
                }
            }
        }
        Self {
            u1,
            u2,
            nst1: m.nst1,
            nst2: m.nst2,
            nyext,
            pst1: m.state_law.axis_dist(1).unwrap().weights().to_vec(),
            pst2: m.state_law.axis_dist(2).unwrap().weights().to_vec(),
            c,
        }
    }

    #[inline]
    fn c_row(&self, a1: usize, a2: usize) -> &[f64] {
        let rows2 = self.u2 * self.nst2;
        let base = (a1 * rows2 + a2) * self.nyext;
        &self.c[base..base + self.nyext]
    }

    /// Joint `J(u1, u2, yext)` under the current conditional laws.
    fn joint(&self, rows1: &[Vec<f64>], rows2: &[Vec<f64>], j: &mut [f64]) {
        j.iter_mut().for_each(|v| *v = 0.0);
        for uu1 in 0..self.u1 {
            for st1 in 0..self.nst1 {
                let p1 = rows1[st1][uu1];
                if p1 == 0.0 {
                    continue;
                }
                let a1 = uu1 * self.nst1 + st1;
                for uu2 in 0..self.u2 {
                    for st2 in 0..self.nst2 {
                        let p2 = rows2[st2][uu2];
                        if p2 == 0.0 {
                            continue;
                        }
                        let a2 = uu2 * self.nst2 + st2;
                        let c = self.c_row(a1, a2);
                        let out = &mut j[(uu1 * self.u2 + uu2) * self.nyext
                            ..(uu1 * self.u2 + uu2 + 1) * self.nyext];
                        for (o, &cv) in out.iter_mut().zip(c) {
                            *o += p1 * p2 * cv;
                        }
                    }
                }
            }
        }
    }

    fn objective_bits(&self, rows1: &[Vec<f64>], rows2: &[Vec<f64>]) -> f64 {
        let mut j = vec![0.0; self.u1 * self.u2 * self.nyext];
        self.joint(rows1, rows2, &mut j);
        let mut qy = vec![0.0; self.nyext];
        for uu in 0..self.u1 * self.u2 {
            for (y, q) in qy.iter_mut().enumerate() {
                *q += j[uu * self.nyext + y];
            }
        }
        let h1: f64 = (0..self.nst1)
            .map(|st| self.pst1[st] * entropy_bits(&rows1[st]))
            .sum();
        let h2: f64 = (0..self.nst2)
            .map(|st| self.pst2[st] * entropy_bits(&rows2[st]))
            .sum();
        let h_joint_given_y = entropy_bits(&j) - entropy_bits(&qy);
        h1 + h2 - h_joint_given_y
    }

    /// One two-user surrogate sweep; monotone in the objective.
    fn sweep(&self, rows1: &mut [Vec<f64>], rows2: &mut [Vec<f64>]) {
        for user in 0..2 {
            let mut j = vec![0.0; self.u1 * self.u2 * self.nyext];
            self.joint(rows1, rows2, &mut j);
            let mut qy = vec![0.0; self.nyext];
            for uu in 0..self.u1 * self.u2 {
                for (y, q) in qy.iter_mut().enumerate() {
                    *q += j[uu * self.nyext + y];
                }
            }
            if user == 0 {
                for st1 in 0..self.nst1 {
                    if self.pst1[st1] == 0.0 {
                        continue;
                    }
                    let mut g = vec![0.0; self.u1];
                    for (uu1, gv) in g.iter_mut().enumerate() {
                        let a1 = uu1 * self.nst1 + st1;
                        let mut acc = 0.0;
                        for uu2 in 0..self.u2 {
                            for st2 in 0..self.nst2 {
                                let p2 = rows2[st2][uu2];
                                if p2 == 0.0 {
                                    continue;
                                }
                                let c = self.c_row(a1, uu2 * self.nst2 + st2);
                                for y in 0..self.nyext {
                                    if c[y] > 0.0 {
                                        let q = j[(uu1 * self.u2 + uu2) * self.nyext + y] / qy[y];
                                        acc += p2 * c[y] * q.ln();
                                    }
                                }
                            }
                        }
                        *gv = acc / self.pst1[st1];
                    }
                    gibbs(&mut rows1[st1], &g);
                }
            } else {
                for st2 in 0..self.nst2 {
                    if self.pst2[st2] == 0.0 {
                        continue;
                    }
                    let mut g = vec![0.0; self.u2];
                    for (uu2, gv) in g.iter_mut().enumerate() {
                        let a2 = uu2 * self.nst2 + st2;
                        let mut acc = 0.0;
                        for uu1 in 0..self.u1 {
                            for st1 in 0..self.nst1 {
                                let p1 = rows1[st1][uu1];
                                if p1 == 0.0 {
                                    continue;
                                }
                                let c = self.c_row(uu1 * self.nst1 + st1, a2);
                                for y in 0..self.nyext {
                                    if c[y] > 0.0 {
                                        let q = j[(uu1 * self.u2 + uu2) * self.nyext + y] / qy[y];
                                        acc += p1 * c[y] * q.ln();
                                    }
                                }
                            }
                        }
                        *gv = acc / self.pst2[st2];
                    }
                    gibbs(&mut rows2[st2], &g);
                }
            }
        }
    }
}

fn gibbs(row: &mut [f64], g: &[f64]) {
    let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for (r, &gv) in row.iter_mut().zip(g) {
        *r = (gv - gmax).exp();
        z += *r;
    }
    row.iter_mut().for_each(|v| *v /= z);
}

fn enumerate_or_sample_pairs(
    m: &MacChannel,
    u1: usize,
    u2: usize,
    cfg: &SolveConfig,
) -> (Vec<(Vec<usize>, Vec<usize>)>, bool) {
    let cells1 = u1 * m.nst1;
    let cells2 = u2 * m.nst2;
    let mut count: u128 = 1;
    for _ in 0..cells1 {
        count = count.saturating_mul(m.nx1 as u128);
    }
    for _ in 0..cells2 {
        count = count.saturating_mul(m.nx2 as u128);
    }
    if count <= cfg.fmap_cap {
        let mut pairs = Vec::with_capacity(count as usize);
        let f1s = all_maps(m.nx1, cells1);
        let f2s = all_maps(m.nx2, cells2);
        for f1 in &f1s {
            for f2 in &f2s {
                pairs.push((f1.clone(), f2.clone()));
            }
        }
        (pairs, true)
    } else {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng =
            rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x6d63_6670]));
        let mut pairs = Vec::with_capacity(cfg.fmap_samples);
        pairs.push((
            (0..cells1).map(|cell| (cell / m.nst1) % m.nx1).collect(),
            (0..cells2).map(|cell| (cell / m.nst2) % m.nx2).collect(),
        ));
        while pairs.len() < cfg.fmap_samples {
            pairs.push((
                (0..cells1).map(|_| rng.gen_range(0..m.nx1)).collect(),
                (0..cells2).map(|_| rng.gen_range(0..m.nx2)).collect(),
            ));
        }
        (pairs, false)
    }
}

fn all_maps(nx: usize, cells: usize) -> Vec<Vec<usize>> {
    let total = nx.pow(cells as u32);
    let mut out = Vec::with_capacity(total);
    for i in 0..total {
        let mut map = vec![0usize; cells];
        let mut rem = i;
        for d in (0..cells).rev() {
            map[d] = rem % nx;
            rem /= nx;
        }
        out.push(map);
    }
    out
}

/// Maximum of the non-causal achievable sum bound
/// `I(U1,U2;Y,S_R) - I(U1;S_T1) - I(U2;S_T2)` over product auxiliary codes.
/// Requires independent transmitter states. The report is always flagged as
/// an achievable inner bound unless the receiver determines both states.
pub fn mac_noncausal_inner_sum(
    m: &MacChannel,
    cfg: &SolveConfig,
) -> Result<CapacityReport, SolveError> {
    if !m.tx_states_independent || !m.tx_states_factorize(1e-9) {
        return Err(SolveError::CorrelatedTxStates);
    }
    let u1 = cfg.u_size.unwrap_or(m.nx1 * m.nst1);
    let u2 = cfg.u_size.unwrap_or(m.nx2 * m.nst2);
    let (pairs, exhaustive) = enumerate_or_sample_pairs(m, u1, u2, cfg);

    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>, usize)> = None;
    let mut best_iterations = 0;
    let mut best_converged = false;
    for (pi, (f1, f2)) in pairs.iter().enumerate() {
        let obj = MacGpObjective::new(m, u1, u2, f1, f2);
        for r in 0..cfg.restarts.max(1) {
            let mut rows1: Vec<Vec<f64>> = (0..m.nst1)
                .map(|st| {
                    if r == 0 {
                        vec![1.0 / u1 as f64; u1]
                    } else {
                        sample_dist(u1, derive_seed(cfg.seed, &[3, pi as u64, r as u64, st as u64]))
                            .weights()
                            .to_vec()
                    }
                })
                .collect();
            let mut rows2: Vec<Vec<f64>> = (0..m.nst2)
                .map(|st| {
                    if r == 0 {
                        vec![1.0 / u2 as f64; u2]
                    } else {
                        sample_dist(u2, derive_seed(cfg.seed, &[4, pi as u64, r as u64, st as u64]))
                            .weights()
                            .to_vec()
                    }
                })
                .collect();
            let mut value = obj.objective_bits(&rows1, &rows2);
            let mut iterations = 0;
            let mut converged = false;
            for iter in 1..=cfg.max_iter {
                iterations = iter;
                obj.sweep(&mut rows1, &mut rows2);
                let next = obj.objective_bits(&rows1, &rows2);
                debug_assert!(next >= value - 1e-10);
                let improved = next - value;
                value = next;
                if improved < cfg.tol_bits {
                    converged = true;
                    break;
                }
            }
            if value > best_value {
                best_value = value;
                best = Some((rows1, rows2, pi));
                best_iterations = iterations;
                best_converged = converged;
            }
        }
    }

    let (rows1, rows2, pi) = best.expect("at least one pair is scored");
    let (f1, f2) = pairs[pi].clone();
    let to_dists = |rows: Vec<Vec<f64>>| -> Vec<Dist> {
        rows.into_iter()
            .map(|w| Dist::normalized(w).expect("rows stay normalized"))
            .collect()
    };
    let code1 = AuxCode::new(u1, m.nst1, m.nx1, to_dists(rows1), f1, false)
        .expect("solver output is a valid code");
    let code2 = AuxCode::new(u2, m.nst2, m.nx2, to_dists(rows2), f2, false)
        .expect("solver output is a valid code");
    let mut report = CapacityReport {
        value_bits: best_value.max(0.0),
        achiever: Achiever::ProductPair(
            Box::new(Achiever::Aux(code1)),
            Box::new(Achiever::Aux(code2)),
        ),
        iterations: best_iterations,
        restarts_used: cfg.restarts.max(1) * pairs.len(),
        converged: best_converged,
        exhaustive,
        inner_bound_only: !m.rx_determines_tx_states(),
        oracle_gap_bits: None,
    };
    // Causal strategy codes are non-causal codes too; keep the dominance.
    if let Ok(causal) = mac_sum_capacity_causal(m, cfg) {
        if causal.value_bits > report.value_bits {
            report.value_bits = causal.value_bits;
            report.achiever = causal.achiever;
            report.iterations = causal.iterations;
            report.converged = causal.converged;
        }
    }
    Ok(report)
}

/// Lattice oracle for the non-causal sum objective at explicit auxiliary
/// sizes, enumerating every deterministic map pair.
pub fn mac_noncausal_grid_oracle(
    m: &MacChannel,
    resolution: usize,
    u1: usize,
    u2: usize,
    cfg: &SolveConfig,
) -> Result<f64, SolveError> {
    if !m.tx_states_independent || !m.tx_states_factorize(1e-9) {
        return Err(SolveError::CorrelatedTxStates);
    }
    let cells1 = u1 * m.nst1;
    let cells2 = u2 * m.nst2;
    let mut f_count: u128 = 1;
    for _ in 0..cells1 {
        f_count = f_count.saturating_mul(m.nx1 as u128);
    }
    for _ in 0..cells2 {
        f_count = f_count.saturating_mul(m.nx2 as u128);
    }
    let grid1 = simplex_grid(u1, resolution)?;
    let grid2 = simplex_grid(u2, resolution)?;
    let combos = (grid1.len() as u128)
        .saturating_pow(m.nst1 as u32)
        .saturating_mul((grid2.len() as u128).saturating_pow(m.nst2 as u32));
    let total = f_count.saturating_mul(combos);
    if total > cfg.grid_budget {
        return Err(SolveError::GridBudget {
            count: total,
            budget: cfg.grid_budget,
        });
    }
    let f1s = all_maps(m.nx1, cells1);
    let f2s = all_maps(m.nx2, cells2);
    let mut best = f64::NEG_INFINITY;
    for f1 in &f1s {
        for f2 in &f2s {
            let obj = MacGpObjective::new(m, u1, u2, f1, f2);
            let mut idx = vec![0usize; m.nst1 + m.nst2];
            loop {
                let rows1: Vec<Vec<f64>> = (0..m.nst1)
                    .map(|i| grid1[idx[i]].weights().to_vec())
                    .collect();
                let rows2: Vec<Vec<f64>> = (0..m.nst2)
                    .map(|i| grid2[idx[m.nst1 + i]].weights().to_vec())
                    .collect();
                let v = obj.objective_bits(&rows1, &rows2);
                if v > best {
                    best = v;
                }
                let mut done = true;
                for d in (0..idx.len()).rev() {
                    idx[d] += 1;
                    let limit = if d < m.nst1 { grid1.len() } else { grid2.len() };
                    if idx[d] < limit {
                        done = false;
                        break;
                    }
                    idx[d] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    Ok(best)
}
