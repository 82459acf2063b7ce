//! Degraded relay channel: degradedness verification and the max-min
//! capacity with side information.
//!
//! The capacity of the physically degraded relay whose state is known at
//! the source, relay and destination is
//! `max_{P(X_S, X_R | S)} min[ I(X_S,X_R; Y_D | S_D), I(X_S; Y_R | X_R, S) ]`.
//! Both objectives are concave in the conditional input law, so the
//! max-min is solved as `min_lambda max_Q [lambda g1 + (1-lambda) g2]`
//! (the scalarized inner problem is smooth and concave, solved by
//! projected gradient ascent with backtracking; the outer minimization is
//! convex in lambda and handled by golden-section search). The report
//! carries both the achieved lower value and the scalarized upper value,
//! so convergence is certified by their gap.

use crate::capacity::{SolveConfig, SolveError};
use crate::channel::RelayChannel;
use crate::prob::{entropy_bits, simplex_grid, Dist};

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone)]
pub struct DegradednessReport {
    pub degraded: bool,
    pub max_residual: f64,
}

/// Tries to factor the transition law as
/// `P(Y_R | X_S, X_R, S) P(Y_D | Y_R, X_R, S_D)` by conditional averaging
/// and reports the worst reassembly residual over state pairs with
/// positive probability.
pub fn relay_check_degraded(r: &RelayChannel) -> DegradednessReport {
    let ps = r.state_law.axis_dist(0).expect("valid state law");
    let psd = r.state_law.axis_dist(1).expect("valid state law");

    // stage 1 fit: marginalize y_d and average over s_d given s
    let mut stage1 = vec![0.0; r.nxs * r.nxr * r.ns * r.nyr];
    for xs in 0..r.nxs {
        for xr in 0..r.nxr {
            for s in 0..r.ns {
                let out = &mut stage1[((xs * r.nxr + xr) * r.ns + s) * r.nyr
                    ..((xs * r.nxr + xr) * r.ns + s + 1) * r.nyr];
                for sd in 0..r.nsd {
                    let w = if ps.weights()[s] > 0.0 {
                        r.state_law.value(&[s, sd]) / ps.weights()[s]
                    } else {
                        1.0 / r.nsd as f64
                    };
                    if w == 0.0 {
                        continue;
                    }
                    let row = r.transition_row(xs, xr, s, sd);
                    for yr in 0..r.nyr {
                        for yd in 0..r.nyd {
                            out[yr] += w * row[yr * r.nyd + yd];
                        }
                    }
                }
            }
        }
    }

    // stage 2 fit: conditional average over (x_s, s) given s_d
    let mut stage2 = vec![0.0; r.nyr * r.nxr * r.nsd * r.nyd];
    for yr in 0..r.nyr {
        for xr in 0..r.nxr {
            for sd in 0..r.nsd {
                let mut num = vec![0.0; r.nyd];
                let mut den = 0.0;
                for xs in 0..r.nxs {
                    for s in 0..r.ns {
                        let w = if psd.weights()[sd] > 0.0 {
                            r.state_law.value(&[s, sd]) / psd.weights()[sd]
                        } else {
                            1.0 / r.ns as f64
                        };
                        if w == 0.0 {
                            continue;
                        }
                        let scale = w / r.nxs as f64;
                        let row = r.transition_row(xs, xr, s, sd);
                        for yd in 0..r.nyd {
                            num[yd] += scale * row[yr * r.nyd + yd];
                            den += scale * row[yr * r.nyd + yd];
                        }
                    }
                }
                let out = &mut stage2[((yr * r.nxr + xr) * r.nsd + sd) * r.nyd
                    ..((yr * r.nxr + xr) * r.nsd + sd + 1) * r.nyd];
                if den > 0.0 {
                    for yd in 0..r.nyd {
                        out[yd] = num[yd] / den;
                    }
                } else {
                    out.iter_mut().for_each(|v| *v = 1.0 / r.nyd as f64);
                }
            }
        }
    }

    // reassemble and compare on reachable state pairs
    let mut max_residual = 0.0f64;
    for xs in 0..r.nxs {
        for xr in 0..r.nxr {
            for s in 0..r.ns {
                for sd in 0..r.nsd {
                    if r.state_law.value(&[s, sd]) <= 0.0 {
                        continue;
                    }
                    let row = r.transition_row(xs, xr, s, sd);
                    for yr in 0..r.nyr {
                        let p1 = stage1[((xs * r.nxr + xr) * r.ns + s) * r.nyr + yr];
                        for yd in 0..r.nyd {
                            let p2 = stage2[((yr * r.nxr + xr) * r.nsd + sd) * r.nyd + yd];
                            let residual = (row[yr * r.nyd + yd] - p1 * p2).abs();
                            if residual > max_residual {
                                max_residual = residual;
                            }
                        }
                    }
                }
            }
        }
    }
    DegradednessReport {
        degraded: max_residual <= 1e-9,
        max_residual,
    }
}

/// Precomputed objective pieces for the relay max-min problem; the
/// optimization variable is one law over `a = (x_s, x_r)` per state `s`.
struct RelayObjective {
    na: usize,
    nxr: usize,
    ns: usize,
    ps: Vec<f64>,
    psd: Vec<f64>,
    /// `s` implied by each `s_d` with positive probability.
    s_of_sd: Vec<Option<usize>>,
    /// destination kernel `[a][sd][yd]`
    kd: Vec<f64>,
    nyd: usize,
    /// relay kernel `[a][s][yr]`
    vr: Vec<f64>,
    nyr: usize,
}

impl RelayObjective {
    fn new(r: &RelayChannel) -> Result<Self, SolveError> {
        let ps = r.state_law.axis_dist(0).expect("valid state law");
        let psd = r.state_law.axis_dist(1).expect("valid state law");
        let mut s_of_sd = vec![None; r.nsd];
        for sd in 0..r.nsd {
            if psd.weights()[sd] <= 0.0 {
                continue;
            }
            let mut best = 0.0;
            let mut best_s = 0;
            let mut total = 0.0;
            for s in 0..r.ns {
                let v = r.state_law.value(&[s, sd]);
                total += v;
                if v > best {
                    best = v;
                    best_s = s;
                }
            }
            if best < total * (1.0 - 1e-9) {
                return Err(SolveError::SdDoesNotDetermineS);
            }
            s_of_sd[sd] = Some(best_s);
        }
        let na = r.nxs * r.nxr;
        let mut kd = vec![0.0; na * r.nsd * r.nyd];
        for a in 0..na {
            let (xs, xr) = (a / r.nxr, a % r.nxr);
            for sd in 0..r.nsd {
                let Some(s) = s_of_sd[sd] else { continue };
                let row = r.transition_row(xs, xr, s, sd);
                let out = &mut kd[(a * r.nsd + sd) * r.nyd..(a * r.nsd + sd + 1) * r.nyd];
                for yr in 0..r.nyr {
                    for yd in 0..r.nyd {
                        out[yd] += row[yr * r.nyd + yd];
                    }
                }
            }
        }
        let mut vr = vec![0.0; na * r.ns * r.nyr];
        for a in 0..na {
            let (xs, xr) = (a / r.nxr, a % r.nxr);
            for s in 0..r.ns {
                let out = &mut vr[(a * r.ns + s) * r.nyr..(a * r.ns + s + 1) * r.nyr];
                for sd in 0..r.nsd {
                    let w = if ps.weights()[s] > 0.0 {
                        r.state_law.value(&[s, sd]) / ps.weights()[s]
                    } else if sd == 0 {
                        1.0
                    } else {
                        0.0
                    };
                    if w == 0.0 {
                        continue;
                    }
                    let row = r.transition_row(xs, xr, s, sd);
                    for yr in 0..r.nyr {
                        for yd in 0..r.nyd {
                            out[yr] += w * row[yr * r.nyd + yd];
                        }
                    }
                }
            }
        }
        Ok(Self {
            na,
            nxr: r.nxr,
            ns: r.ns,
            ps: ps.weights().to_vec(),
            psd: psd.weights().to_vec(),
            s_of_sd,
            kd,
            nyd: r.nyd,
            vr,
            nyr: r.nyr,
        })
    }

    #[inline]
    fn kd_row(&self, a: usize, sd: usize) -> &[f64] {
        &self.kd[(a * self.psd.len() + sd) * self.nyd..(a * self.psd.len() + sd + 1) * self.nyd]
    }

    #[inline]
    fn vr_row(&self, a: usize, s: usize) -> &[f64] {
        &self.vr[(a * self.ns + s) * self.nyr..(a * self.ns + s + 1) * self.nyr]
    }

    /// `I(X_S, X_R; Y_D | S_D)` in bits.
    fn dest_cut(&self, q: &[Vec<f64>]) -> f64 {
        let mut acc = 0.0;
        let mut out = vec![0.0; self.nyd];
        for sd in 0..self.psd.len() {
            let w = self.psd[sd];
            let Some(s) = self.s_of_sd[sd] else { continue };
            if w == 0.0 {
                continue;
            }
            out.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..self.na {
                let pa = q[s][a];
                if pa == 0.0 {
                    continue;
                }
                for (yd, &k) in self.kd_row(a, sd).iter().enumerate() {
                    out[yd] += pa * k;
                }
            }
            let mut info = 0.0;
            for a in 0..self.na {
                let pa = q[s][a];
                if pa == 0.0 {
                    continue;
                }
                for (yd, &k) in self.kd_row(a, sd).iter().enumerate() {
                    if k > 0.0 {
                        info += pa * k * (k / out[yd]).ln();
                    }
                }
            }
            acc += w * info;
        }
        acc / LN_2
    }

    /// `I(X_S; Y_R | X_R, S)` in bits.
    fn relay_cut(&self, q: &[Vec<f64>]) -> f64 {
        let mut acc = 0.0;
        for s in 0..self.ns {
            let w = self.ps[s];
            if w == 0.0 {
                continue;
            }
            // nu(x_r, y_r) and the per-pair linear entropy term
            let mut nu = vec![0.0; self.nxr * self.nyr];
            let mut h_pair = 0.0;
            for a in 0..self.na {
                let pa = q[s][a];
                if pa == 0.0 {
                    continue;
                }
                let xr = a % self.nxr;
                let row = self.vr_row(a, s);
                h_pair += pa * entropy_bits(row);
                for (yr, &v) in row.iter().enumerate() {
                    nu[xr * self.nyr + yr] += pa * v;
                }
            }
            let mut h_yr_given_xr = 0.0;
            for xr in 0..self.nxr {
                let slice = &nu[xr * self.nyr..(xr + 1) * self.nyr];
                let mass: f64 = slice.iter().sum();
                if mass > 0.0 {
                    h_yr_given_xr -= slice
                        .iter()
                        .map(|&v| crate::prob::xlog2x(v))
                        .sum::<f64>();
                    h_yr_given_xr += crate::prob::xlog2x(mass);
                }
            }
            acc += w * (h_yr_given_xr - h_pair);
        }
        acc
    }

    /// Supergradient of the destination cut, in bits per unit mass.
    fn dest_cut_grad(&self, q: &[Vec<f64>], grad: &mut [Vec<f64>]) {
        grad.iter_mut().for_each(|g| g.iter_mut().for_each(|v| *v = 0.0));
        let mut out = vec![0.0; self.nyd];
        for sd in 0..self.psd.len() {
            let w = self.psd[sd];
            let Some(s) = self.s_of_sd[sd] else { continue };
            if w == 0.0 {
                continue;
            }
            out.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..self.na {
                let pa = q[s][a];
                if pa == 0.0 {
                    continue;
                }
                for (yd, &k) in self.kd_row(a, sd).iter().enumerate() {
                    out[yd] += pa * k;
                }
            }
            for a in 0..self.na {
                let mut div = 0.0;
                for (yd, &k) in self.kd_row(a, sd).iter().enumerate() {
                    if k > 0.0 {
                        div += k * (k / out[yd].max(1e-300)).ln();
                    }
                }
                grad[s][a] += w * (div - 1.0) / LN_2;
            }
        }
    }

    /// Supergradient of the relay cut, in bits per unit mass.
    fn relay_cut_grad(&self, q: &[Vec<f64>], grad: &mut [Vec<f64>]) {
        grad.iter_mut().for_each(|g| g.iter_mut().for_each(|v| *v = 0.0));
        for s in 0..self.ns {
            let w = self.ps[s];
            if w == 0.0 {
                continue;
            }
            let mut nu = vec![0.0; self.nxr * self.nyr];
            for a in 0..self.na {
                let pa = q[s][a];
                if pa == 0.0 {
                    continue;
                }
                let xr = a % self.nxr;
                for (yr, &v) in self.vr_row(a, s).iter().enumerate() {
                    nu[xr * self.nyr + yr] += pa * v;
                }
            }
            let mut mass = vec![0.0; self.nxr];
            for xr in 0..self.nxr {
                mass[xr] = nu[xr * self.nyr..(xr + 1) * self.nyr].iter().sum();
            }
            for a in 0..self.na {
                let xr = a % self.nxr;
                let mut div = 0.0;
                for (yr, &v) in self.vr_row(a, s).iter().enumerate() {
                    if v > 0.0 {
                        let r_cond = (nu[xr * self.nyr + yr] / mass[xr].max(1e-300)).max(1e-300);
                        div += v * (v / r_cond).ln();
                    }
                }
                grad[s][a] += w * div / LN_2;
            }
        }
    }
}

/// Euclidean projection onto the simplex with a small interior floor, which
/// keeps gradients finite.
fn project_simplex(v: &mut [f64]) {
    const FLOOR: f64 = 1e-12;
    let n = v.len();
    let budget = 1.0 - FLOOR * n as f64;
    let mut shifted: Vec<f64> = v.iter().map(|&x| x - FLOOR).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    let mut rho = 0;
    for (i, &s) in sorted.iter().enumerate() {
        acc += s;
        let t = (acc - budget) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
            rho = i + 1;
        }
    }
    debug_assert!(rho > 0);
    for (out, s) in v.iter_mut().zip(&mut shifted) {
        *out = (*s - theta).max(0.0) + FLOOR;
    }
}

/// Maximizes `lambda g1 + (1 - lambda) g2` by projected gradient ascent
/// with backtracking, warm-started from `q`.
fn maximize_scalarized(
    obj: &RelayObjective,
    lambda: f64,
    q: &mut [Vec<f64>],
    max_iter: usize,
) -> f64 {
    let mut g1 = vec![vec![0.0; obj.na]; obj.ns];
    let mut g2 = vec![vec![0.0; obj.na]; obj.ns];
    let mut value = lambda * obj.dest_cut(q) + (1.0 - lambda) * obj.relay_cut(q);
    let mut step = 1.0;
    for _ in 0..max_iter {
        obj.dest_cut_grad(q, &mut g1);
        obj.relay_cut_grad(q, &mut g2);
        let mut improved = false;
        for _ in 0..50 {
            let mut trial: Vec<Vec<f64>> = q.to_vec();
            for s in 0..obj.ns {
                for a in 0..obj.na {
                    trial[s][a] += step * (lambda * g1[s][a] + (1.0 - lambda) * g2[s][a]);
                }
                project_simplex(&mut trial[s]);
            }
            let trial_value =
                lambda * obj.dest_cut(&trial) + (1.0 - lambda) * obj.relay_cut(&trial);
            if trial_value > value + 1e-15 {
                q.iter_mut().zip(trial).for_each(|(dst, src)| *dst = src);
                value = trial_value;
                improved = true;
                step *= 1.3;
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    value
}

#[derive(Debug, Clone)]
pub struct RelayCapacityReport {
    /// Best achieved `min(g1, g2)`; an achievable rate.
    pub value_bits: f64,
    /// Scalarized upper value `min_lambda max_Q F_lambda`; capacity lies in
    /// `[value_bits, upper_bits]`.
    pub upper_bits: f64,
    pub dest_cut_bits: f64,
    pub relay_cut_bits: f64,
    /// Which cut binds at the reported law.
    pub binding: &'static str,
    /// One law over `(x_s, x_r)` per state `s`.
    pub input_law: Vec<Dist>,
    pub iterations: usize,
    pub converged: bool,
}

/// Capacity of a physically degraded relay channel whose state `S` is
/// determined by the destination state `S_D` (causal and non-causal side
/// information coincide here; one solver serves both).
pub fn relay_degraded_capacity(
    r: &RelayChannel,
    cfg: &SolveConfig,
) -> Result<RelayCapacityReport, SolveError> {
    let check = relay_check_degraded(r);
    if !check.degraded {
        return Err(SolveError::NotDegraded {
            residual: check.max_residual,
        });
    }
    let obj = RelayObjective::new(r)?;

    let mut q: Vec<Vec<f64>> = vec![vec![1.0 / obj.na as f64; obj.na]; obj.ns];
    let mut best_q = q.clone();
    let mut best_lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let inner_iter = cfg.max_iter.max(500);

    let consider = |q: &[Vec<f64>], best_lower: &mut f64, best_q: &mut Vec<Vec<f64>>| {
        let lower = obj.dest_cut(q).min(obj.relay_cut(q));
        if lower > *best_lower {
            *best_lower = lower;
            *best_q = q.to_vec();
        }
    };

    // endpoints first: if one cut's unconstrained maximum already sits
    // below the other cut, the max-min is settled there
    for &lambda in &[1.0, 0.0] {
        let h = maximize_scalarized(&obj, lambda, &mut q, inner_iter);
        upper = upper.min(h);
        consider(&q, &mut best_lower, &mut best_q);
    }

    // golden-section on the convex outer function
    let golden = 0.5 * (3.0 - 5.0f64.sqrt());
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = lo + golden * (hi - lo);
    let mut x2 = hi - golden * (hi - lo);
    let mut f1 = maximize_scalarized(&obj, x1, &mut q, inner_iter);
    consider(&q, &mut best_lower, &mut best_q);
    upper = upper.min(f1);
    let mut f2 = maximize_scalarized(&obj, x2, &mut q, inner_iter);
    consider(&q, &mut best_lower, &mut best_q);
    upper = upper.min(f2);
    let mut iterations = 2;
    for _ in 0..60 {
        if upper - best_lower <= 1e-9 {
            break;
        }
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + golden * (hi - lo);
            f1 = maximize_scalarized(&obj, x1, &mut q, inner_iter);
            upper = upper.min(f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - golden * (hi - lo);
            f2 = maximize_scalarized(&obj, x2, &mut q, inner_iter);
            upper = upper.min(f2);
        }
        consider(&q, &mut best_lower, &mut best_q);
    }

    let dest = obj.dest_cut(&best_q);
    let relay = obj.relay_cut(&best_q);
    Ok(RelayCapacityReport {
        value_bits: best_lower.max(0.0),
        upper_bits: upper,
        dest_cut_bits: dest,
        relay_cut_bits: relay,
        binding: if dest <= relay { "dest_cut" } else { "relay_cut" },
        input_law: best_q
            .into_iter()
            .map(|w| Dist::normalized(w).expect("projected law is valid"))
            .collect(),
        iterations,
        converged: upper - best_lower <= 1e-6,
    })
}

/// Lattice oracle for the relay max-min objective.
pub fn relay_grid_oracle(
    r: &RelayChannel,
    resolution: usize,
    cfg: &SolveConfig,
) -> Result<f64, SolveError> {
    let check = relay_check_degraded(r);
    if !check.degraded {
        return Err(SolveError::NotDegraded {
            residual: check.max_residual,
        });
    }
    let obj = RelayObjective::new(r)?;
    let grid = simplex_grid(obj.na, resolution)?;
    let total = (grid.len() as u128).saturating_pow(obj.ns as u32);
    if total > cfg.grid_budget {
        return Err(SolveError::GridBudget {
            count: total,
            budget: cfg.grid_budget,
        });
    }
    let mut idx = vec![0usize; obj.ns];
    let mut best = f64::NEG_INFINITY;
    loop {
        let q: Vec<Vec<f64>> = idx.iter().map(|&i| grid[i].weights().to_vec()).collect();
        let v = obj.dest_cut(&q).min(obj.relay_cut(&q));
        if v > best {
            best = v;
        }
        let mut done = true;
        for d in (0..obj.ns).rev() {
            idx[d] += 1;
            if idx[d] < grid.len() {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }
    Ok(best)
}
