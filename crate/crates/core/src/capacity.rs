//! Single-user capacity solvers.
//!
//! Four views of the same channel are solved here:
//!
//! * no side information — plain Blahut-Arimoto on the state-averaged
//!   channel, exact to the requested tolerance via the duality-gap bound;
//! * causal transmitter side information — Blahut-Arimoto over the Shannon
//!   strategy alphabet (exact, the transform is capacity-preserving);
//! * non-causal transmitter side information — alternating ascent over the
//!   auxiliary-code parameters `(P(U|S_T), f: U x S_T -> X)` with f-map
//!   enumeration (or seeded sampling above the cap) and multi-restart; the
//!   returned value is always an achievable lower bound and never falls
//!   below the causal value;
//! * transmitter side information known at the receiver — per-group
//!   Blahut-Arimoto on the lifted channels `X -> (Y, S_R)`, exact.
//!
//! An independent simplex-grid oracle ([`gp_oracle_grid`]) exhaustively
//! scores the same auxiliary-code objective on a lattice and is used by the
//! test suites to corroborate the ascent.

use crate::channel::{
    strategy_transform, ChannelError, Dmc, StateChannel, Strategy,
};
use crate::prob::{derive_seed, entropy_bits, sample_dist, simplex_grid, Dist};
use thiserror::Error;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Prob(#[from] crate::prob::ProbError),
    #[error("grid oracle needs {count} objective evaluations, above the budget {budget}")]
    GridBudget { count: u128, budget: u128 },
    #[error("receiver side information does not determine the transmitter side information (P(s_t|s_r) is not 0/1 at s_r = {sr})")]
    RxDoesNotDetermineTx { sr: usize },
    #[error("transmitter state components must be independent here, and the state law does not factorize")]
    CorrelatedTxStates,
    #[error("channel is not physically degraded (max factorization residual {residual:.3e})")]
    NotDegraded { residual: f64 },
    #[error("destination side information does not determine the channel state (required for the degraded-relay solver)")]
    SdDoesNotDetermineS,
    #[error("genie must target the {expected}")]
    WrongGenieTarget { expected: &'static str },
    #[error("auxiliary law must be in {expected} mode")]
    WrongAuxMode { expected: &'static str },
    #[error("broadcast region sketches are limited to binary alphabets and resolution <= 8")]
    BcRegionScope,
}

/// Knobs shared by every solver; all randomized paths are driven by `seed`.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Convergence tolerance in bits (duality gap for Blahut-Arimoto,
    /// per-sweep improvement for the ascent solvers).
    pub tol_bits: f64,
    pub max_iter: usize,
    /// Random restarts per deterministic-map branch in the ascent solvers.
    pub restarts: usize,
    pub seed: u64,
    /// Cap on enumerated Shannon-strategy letters `|X|^|S_T|`.
    pub strategy_cap: usize,
    /// Above this many deterministic maps, enumeration degrades to seeded
    /// sampling of `fmap_samples` maps.
    pub fmap_cap: u128,
    pub fmap_samples: usize,
    /// Budget on grid-oracle objective evaluations.
    pub grid_budget: u128,
    /// Auxiliary alphabet size; defaults to `|X| * |S_T|`.
    pub u_size: Option<usize>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol_bits: 1e-9,
            max_iter: 5000,
            restarts: 32,
            seed: 0,
            strategy_cap: crate::channel::DEFAULT_STRATEGY_CAP,
            fmap_cap: 100_000,
            fmap_samples: 512,
            grid_budget: 10_000_000,
            u_size: None,
        }
    }
}

impl SolveConfig {
    /// A lighter preset for wide instance sweeps; the ascent solvers lose
    /// some search breadth but every reported value stays an achievable
    /// lower bound.
    pub fn sweep() -> Self {
        Self {
            restarts: 8,
            fmap_samples: 64,
            max_iter: 1500,
            fmap_cap: 4096,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Auxiliary-variable code: conditional law `P(U|S_T)` plus a deterministic
/// map `f: U x S_T -> X`. The non-causal search point; in causal mode all
/// rows of `P(U|S_T)` coincide.
#[derive(Debug, Clone)]
pub struct AuxCode {
    pub u_size: usize,
    pub nst: usize,
    pub nx: usize,
    /// One row per `s_t`.
    pub rows: Vec<Dist>,
    /// Row-major over `(u, s_t)`.
    pub f_map: Vec<usize>,
    pub causal: bool,
}

impl AuxCode {
    pub fn new(
        u_size: usize,
        nst: usize,
        nx: usize,
        rows: Vec<Dist>,
        f_map: Vec<usize>,
        causal: bool,
    ) -> Result<Self, String> {
        if rows.len() != nst {
            return Err(format!("expected {nst} rows, got {}", rows.len()));
        }
        if rows.iter().any(|r| r.len() != u_size) {
            return Err("row dimension does not match u_size".into());
        }
        if f_map.len() != u_size * nst {
            return Err("f_map is not total over U x S_T".into());
        }
        if f_map.iter().any(|&x| x >= nx) {
            return Err("f_map maps outside the input alphabet".into());
        }
        if causal {
            for r in &rows[1..] {
                for (a, b) in r.weights().iter().zip(rows[0].weights()) {
                    if (a - b).abs() > 1e-12 {
                        return Err("causal code requires identical rows".into());
                    }
                }
            }
        }
        Ok(Self {
            u_size,
            nst,
            nx,
            rows,
            f_map,
            causal,
        })
    }

    #[inline]
    pub fn f(&self, u: usize, st: usize) -> usize {
        self.f_map[u * self.nst + st]
    }
}

/// The distribution or code achieving a reported value.
#[derive(Debug, Clone)]
pub enum Achiever {
    /// Input law of a plain channel.
    InputDist(Dist),
    /// Law over Shannon strategies.
    StrategyDist {
        probs: Dist,
        strategies: Vec<Strategy>,
    },
    /// Conditional input law `P(X|S_T)`, one row per `s_t`.
    InputConditional(Vec<Dist>),
    /// Auxiliary-variable code.
    Aux(AuxCode),
    /// Independent per-user achievers of a two-user solver.
    ProductPair(Box<Achiever>, Box<Achiever>),
    /// Causal two-user auxiliary code over strategy letters.
    MacCausal(Box<crate::multiuser::mac::MacAuxCode>),
}

/// Outcome of a capacity computation.
#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub value_bits: f64,
    pub achiever: Achiever,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Whether every deterministic map in scope was enumerated (ascent
    /// solvers); `false` means seeded sampling was used.
    pub exhaustive: bool,
    /// Set when the solver only certifies an achievable inner bound for
    /// this instance (no matching converse).
    pub inner_bound_only: bool,
    pub oracle_gap_bits: Option<f64>,
}

impl CapacityReport {
    pub fn with_oracle_gap(mut self, oracle_value_bits: f64) -> Self {
        self.oracle_gap_bits = Some(self.value_bits - oracle_value_bits);
        self
    }
}

// ---------------------------------------------------------------------------
// Blahut-Arimoto
// ---------------------------------------------------------------------------

/// Computes the capacity of a plain DMC by alternating maximization.
///
/// The reported value is the mutual information of the final input law and
/// is monotone across iterations; convergence is certified by the standard
/// duality gap `max_x D(W_x || q) - I(p)` dropping below `tol_bits`, which
/// brackets the true capacity within the tolerance. Hitting `max_iter`
/// first yields `converged = false`.
pub fn blahut_arimoto(dmc: &Dmc, tol_bits: f64, max_iter: usize) -> CapacityReport {
    assert!(tol_bits > 0.0);
    let (n_in, n_out) = (dmc.n_in, dmc.n_out);
    let mut p = vec![1.0 / n_in as f64; n_in];
    let mut q = vec![0.0; n_out];
    let mut div = vec![0.0; n_in];
    let tol_nats = tol_bits * LN_2;
    let mut value_nats = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    for iter in 1..=max_iter {
        iterations = iter;
        q.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..n_in {
            if p[x] == 0.0 {
                continue;
            }
            let row = dmc.row(x);
            for y in 0..n_out {
                q[y] += p[x] * row[y];
            }
        }
        let mut lower = 0.0;
        let mut upper = f64::NEG_INFINITY;
        for x in 0..n_in {
            let row = dmc.row(x);
            let mut dx = 0.0;
            for y in 0..n_out {
                if row[y] > 0.0 {
                    dx += row[y] * (row[y] / q[y]).ln();
                }
            }
            div[x] = dx;
            lower += p[x] * dx;
            if dx > upper {
                upper = dx;
            }
        }
        debug_assert!(
            lower >= value_nats - 1e-12 * LN_2,
            "objective must not decrease"
        );
        value_nats = lower;
        if upper - lower <= tol_nats {
            converged = true;
            break;
        }
        let mut z = 0.0;
        for x in 0..n_in {
            p[x] *= div[x].exp();
            z += p[x];
        }
        for x in 0..n_in {
            p[x] /= z;
        }
    }
    CapacityReport {
        value_bits: (value_nats / LN_2).max(0.0),
        achiever: Achiever::InputDist(Dist::normalized(p).expect("positive input law")),
        iterations,
        restarts_used: 0,
        converged,
        exhaustive: true,
        inner_bound_only: false,
        oracle_gap_bits: None,
    }
}

// ---------------------------------------------------------------------------
// Causal side information
// ---------------------------------------------------------------------------

/// Capacity with causal transmitter side information: Blahut-Arimoto over
/// the Shannon-strategy alphabet of [`strategy_transform`], with the
/// receiver side information folded into the output.
pub fn capacity_causal(c: &StateChannel, cfg: &SolveConfig) -> Result<CapacityReport, SolveError> {
    let st = strategy_transform(c, cfg.strategy_cap)?;
    let mut report = blahut_arimoto(&st.dmc, cfg.tol_bits, cfg.max_iter);
    if let Achiever::InputDist(probs) = report.achiever {
        report.achiever = Achiever::StrategyDist {
            probs,
            strategies: st.strategies,
        };
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Non-causal side information
// ---------------------------------------------------------------------------

/// Per-f-map objective machinery for the auxiliary-code form
/// `I(U; Y, S_R) - I(U; S_T)`, written as `H(U|S_T) - H(U | Y, S_R)`.
pub(crate) struct GpObjective {
    pub u_size: usize,
    pub nst: usize,
    pub nyext: usize,
    /// `P(S_T)`.
    pub pst: Vec<f64>,
    /// `B[u][st][yext] = sum_s P(s, st, sr) W(y | f(u, st), s)`.
    b: Vec<f64>,
}

impl GpObjective {
    pub fn new(c: &StateChannel, u_size: usize, f_map: &[usize]) -> Self {
        let nyext = c.ny * c.nsr;
        let nst = c.nst;
        let pst = c.tx_marginal().weights().to_vec();
        let law = c.state_law.mass();
        let mut b = vec![0.0; u_size * nst * nyext];
        for u in 0..u_size {
            for st in 0..nst {
                let x = f_map[u * nst + st];
                let base = (u * nst + st) * nyext;
                for s in 0..c.ns {
                    let row = c.transition_row(x, s);
                    for sr in 0..c.nsr {
                        let w = law[(s * nst + st) * c.nsr + sr];
                        if w == 0.0 {
                            continue;
                        }
                        for (y, &wy) in row.iter().enumerate() {
                            b[base + y * c.nsr + sr] += w * wy;
                        }
                    }
                }
            }
        }
        Self {
            u_size,
            nst,
            nyext,
            pst,
            b,
        }
    }

    #[inline]
    fn b_row(&self, u: usize, st: usize) -> &[f64] {
        let base = (u * self.nst + st) * self.nyext;
        &self.b[base..base + self.nyext]
    }

    /// Joint `M(u, yext) = sum_st P(u|st) B(u, st, yext)`.
    fn joint(&self, rows: &[Vec<f64>], m: &mut [f64]) {
        m.iter_mut().for_each(|v| *v = 0.0);
        for u in 0..self.u_size {
            for st in 0..self.nst {
                let p = rows[st][u];
                if p == 0.0 {
                    continue;
                }
                let b = self.b_row(u, st);
                let out = &mut m[u * self.nyext..(u + 1) * self.nyext];
                for (o, &bv) in out.iter_mut().zip(b) {
                    *o += p * bv;
                }
            }
        }
    }

    /// `I(U; Y, S_R) - I(U; S_T)` in bits at the given conditional law.
    pub fn objective_bits(&self, rows: &[Vec<f64>]) -> f64 {
        let mut m = vec![0.0; self.u_size * self.nyext];
        self.joint(rows, &mut m);
        let mut qy = vec![0.0; self.nyext];
        for u in 0..self.u_size {
            for (y, q) in qy.iter_mut().enumerate() {
                *q += m[u * self.nyext + y];
            }
        }
        let h_u_given_st: f64 = (0..self.nst)
            .map(|st| self.pst[st] * entropy_bits(&rows[st]))
            .sum();
        let h_u_given_y = entropy_bits(&m) - entropy_bits(&qy);
        h_u_given_st - h_u_given_y
    }

    /// One surrogate-maximization sweep; monotonically non-decreasing in
    /// the true objective. Returns the updated objective value.
    pub fn ascend_step(&self, rows: &mut [Vec<f64>], m: &mut [f64], g: &mut [f64]) -> f64 {
        self.joint(rows, m);
        let mut qy = vec![0.0; self.nyext];
        for u in 0..self.u_size {
            for (y, q) in qy.iter_mut().enumerate() {
                *q += m[u * self.nyext + y];
            }
        }
        // g(u, st) = sum_yext (B/pst) ln Q(u|yext)
        for st in 0..self.nst {
            if self.pst[st] == 0.0 {
                continue;
            }
            for u in 0..self.u_size {
                let b = self.b_row(u, st);
                let mut acc = 0.0;
                for y in 0..self.nyext {
                    if b[y] > 0.0 {
                        let qcond = m[u * self.nyext + y] / qy[y];
                        acc += b[y] * qcond.ln();
                    }
                }
                g[st * self.u_size + u] = acc / self.pst[st];
            }
        }
        for st in 0..self.nst {
            if self.pst[st] == 0.0 {
                continue;
            }
            let gs = &g[st * self.u_size..(st + 1) * self.u_size];
            let gmax = gs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let row = &mut rows[st];
            let mut z = 0.0;
            for u in 0..self.u_size {
                let v = (gs[u] - gmax).exp();
                row[u] = v;
                z += v;
            }
            for v in row.iter_mut() {
                *v /= z;
            }
        }
        self.objective_bits(rows)
    }

    /// Runs the ascent from the given start until the per-sweep improvement
    /// drops below `tol_bits`.
    pub fn ascend(
        &self,
        rows: &mut [Vec<f64>],
        tol_bits: f64,
        max_iter: usize,
    ) -> (f64, usize, bool) {
        let mut m = vec![0.0; self.u_size * self.nyext];
        let mut g = vec![0.0; self.nst * self.u_size];
        let mut value = self.objective_bits(rows);
        for iter in 1..=max_iter {
            let next = self.ascend_step(rows, &mut m, &mut g);
            debug_assert!(next >= value - 1e-10, "ascent must not decrease: {value} -> {next}");
            let improved = next - value;
            value = next;
            if improved < tol_bits {
                return (value, iter, true);
            }
        }
        (value, max_iter, false)
    }
}

/// Enumerates all deterministic maps `(u, st) -> x` in lexicographic order
/// of the map table when their number is within `cap`; otherwise returns
/// `None`.
fn enumerate_f_maps(nx: usize, cells: usize, cap: u128) -> Option<Vec<Vec<usize>>> {
    let mut count: u128 = 1;
    for _ in 0..cells {
        count = count.saturating_mul(nx as u128);
        if count > cap {
            return None;
        }
    }
    let total = count as usize;
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
    Some(out)
}

fn sample_f_maps(nx: usize, nst: usize, cells: usize, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut out = Vec::with_capacity(samples);
    // Always include the alphabet-cycling map f(u, s_t) = u mod |X|; it
    // carries the common achievers where U indexes the intended input.
    out.push((0..cells).map(|cell| (cell / nst) % nx).collect::<Vec<_>>());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x6d61_7073]));
    while out.len() < samples {
        out.push((0..cells).map(|_| rng.gen_range(0..nx)).collect());
    }
    out
}

/// Capacity with non-causal transmitter side information.
///
/// For each deterministic map `f` (enumerated when feasible, sampled above
/// `fmap_cap`) the conditional law `P(U|S_T)` is optimized by multi-restart
/// alternating ascent. Every candidate evaluates the true single-letter
/// objective at a feasible code, so the result is an achievable lower
/// bound; the causal optimum is always included as a candidate, which keeps
/// the reported value at least the causal capacity.
pub fn capacity_noncausal(
    c: &StateChannel,
    cfg: &SolveConfig,
) -> Result<CapacityReport, SolveError> {
    let u_size = cfg.u_size.unwrap_or(c.nx * c.nst);
    assert!(u_size >= 1);
    let cells = u_size * c.nst;
    let (f_maps, exhaustive) = match enumerate_f_maps(c.nx, cells, cfg.fmap_cap) {
        Some(maps) => (maps, true),
        None => (
            sample_f_maps(c.nx, c.nst, cells, cfg.fmap_samples, cfg.seed),
            false,
        ),
    };

    let mut best_value = f64::NEG_INFINITY;
    let mut best_code: Option<AuxCode> = None;
    let mut best_iterations = 0;
    let mut best_converged = false;
    let mut restarts_used = 0;

    for (fi, f_map) in f_maps.iter().enumerate() {
        let obj = GpObjective::new(c, u_size, f_map);
        for r in 0..cfg.restarts.max(1) {
            restarts_used += 1;
            let mut rows: Vec<Vec<f64>> = (0..c.nst)
                .map(|st| {
                    if r == 0 {
                        vec![1.0 / u_size as f64; u_size]
                    } else {
                        sample_dist(
                            u_size,
                            derive_seed(cfg.seed, &[fi as u64, r as u64, st as u64]),
                        )
                        .weights()
                        .to_vec()
                    }
                })
                .collect();
            let (value, iterations, converged) = obj.ascend(&mut rows, cfg.tol_bits, cfg.max_iter);
            if value > best_value {
                best_value = value;
                best_iterations = iterations;
                best_converged = converged;
                let dist_rows: Vec<Dist> = rows
                    .into_iter()
                    .map(|w| Dist::normalized(w).expect("ascent rows stay normalized"))
                    .collect();
                best_code = Some(
                    AuxCode::new(u_size, c.nst, c.nx, dist_rows, f_map.clone(), false)
                        .expect("ascent output is a valid code"),
                );
            }
        }
    }

    let mut report = CapacityReport {
        value_bits: best_value.max(0.0),
        achiever: Achiever::Aux(best_code.expect("at least one f-map is always scored")),
        iterations: best_iterations,
        restarts_used,
        converged: best_converged,
        exhaustive,
        inner_bound_only: false,
        oracle_gap_bits: None,
    };

    // The causal optimum is an achievable non-causal code; folding it in
    // enforces the dominance contract even when the ascent stalls. A
    // strategy-cap failure only removes this floor.
    if let Ok(causal) = capacity_causal(c, cfg) {
        if causal.value_bits > report.value_bits {
            report.value_bits = causal.value_bits;
            report.achiever = causal.achiever;
            report.iterations = causal.iterations;
            report.converged = causal.converged;
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Receiver knows the transmitter side information
// ---------------------------------------------------------------------------

/// For each `s_r` on the support of `P(S_R)`, the unique `s_t` it implies.
/// Errors when some `s_r` leaves `S_T` ambiguous.
pub fn tx_state_given_rx(c: &StateChannel) -> Result<Vec<Option<usize>>, SolveError> {
    let joint = c.state_law.regroup(&[&[1], &[2]])?;
    let mut out = vec![None; c.nsr];
    for sr in 0..c.nsr {
        let mut total = 0.0;
        let mut best = 0.0;
        let mut best_st = 0;
        for st in 0..c.nst {
            let v = joint.value(&[st, sr]);
            total += v;
            if v > best {
                best = v;
                best_st = st;
            }
        }
        if total <= 0.0 {
            continue;
        }
        if best < total * (1.0 - 1e-9) {
            return Err(SolveError::RxDoesNotDetermineTx { sr });
        }
        out[sr] = Some(best_st);
    }
    Ok(out)
}

/// Capacity when the transmitter side information is a deterministic
/// function of the receiver side information: the concave maximization of
/// `I(X; Y | S_R)` over `P(X|S_T)`, solved exactly by one Blahut-Arimoto
/// run per transmitter state on the lifted channel `X -> (Y, S_R)`.
pub fn capacity_rx_knows_tx(
    c: &StateChannel,
    cfg: &SolveConfig,
) -> Result<CapacityReport, SolveError> {
    let st_of_sr = tx_state_given_rx(c)?;
    let psr = c.rx_marginal();
    let pst = c.tx_marginal();
    let s_given_sr = c.state_law.regroup(&[&[0], &[2]])?;

    let mut value = 0.0;
    let mut rows = Vec::with_capacity(c.nst);
    let mut iterations = 0;
    let mut converged = true;
    for st in 0..c.nst {
        let members: Vec<usize> = (0..c.nsr)
            .filter(|&sr| st_of_sr[sr] == Some(st) && psr.weights()[sr] > 0.0)
            .collect();
        let weight = pst.weights()[st];
        if members.is_empty() || weight == 0.0 {
            rows.push(Dist::uniform(c.nx));
            continue;
        }
        let n_out = c.ny * members.len();
        let mut lifted = vec![0.0; c.nx * n_out];
        for x in 0..c.nx {
            for (j, &sr) in members.iter().enumerate() {
                for s in 0..c.ns {
                    let mass = s_given_sr.value(&[s, sr]);
                    if mass == 0.0 {
                        continue;
                    }
                    let row = c.transition_row(x, s);
                    for y in 0..c.ny {
                        // joint weight of (y, sr) given x, scaled to the group
                        lifted[x * n_out + y * members.len() + j] += mass / weight * row[y];
                    }
                }
            }
        }
        let dmc = Dmc::new(c.nx, n_out, lifted).expect("lifted rows are valid");
        let rep = blahut_arimoto(&dmc, cfg.tol_bits, cfg.max_iter);
        value += weight * rep.value_bits;
        iterations = iterations.max(rep.iterations);
        converged &= rep.converged;
        match rep.achiever {
            Achiever::InputDist(d) => rows.push(d),
            _ => unreachable!(),
        }
    }
    Ok(CapacityReport {
        value_bits: value,
        achiever: Achiever::InputConditional(rows),
        iterations,
        restarts_used: 0,
        converged,
        exhaustive: true,
        inner_bound_only: false,
        oracle_gap_bits: None,
    })
}

// ---------------------------------------------------------------------------
// Simplex-grid oracle
// ---------------------------------------------------------------------------

/// Exhaustive evaluation of the auxiliary-code objective over all
/// deterministic maps and all `P(U|S_T)` whose rows lie on the `1/k`
/// lattice. Lower-bounds the true capacity; independent of the ascent path.
pub fn gp_oracle_grid(
    c: &StateChannel,
    resolution: usize,
    u_size: usize,
    cfg: &SolveConfig,
) -> Result<CapacityReport, SolveError> {
    let cells = u_size * c.nst;
    let mut f_count: u128 = 1;
    for _ in 0..cells {
        f_count = f_count.saturating_mul(c.nx as u128);
    }
    let grid = simplex_grid(u_size, resolution)?;
    let mut points: u128 = 1;
    for _ in 0..c.nst {
        points = points.saturating_mul(grid.len() as u128);
    }
    let total = f_count.saturating_mul(points);
    if total > cfg.grid_budget {
        return Err(SolveError::GridBudget {
            count: total,
            budget: cfg.grid_budget,
        });
    }

    let f_maps = enumerate_f_maps(c.nx, cells, f_count).expect("within computed budget");
    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    let mut evaluations = 0usize;
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; u_size]; c.nst];
    for f_map in &f_maps {
        let obj = GpObjective::new(c, u_size, f_map);
        let mut combo = vec![0usize; c.nst];
        loop {
            for (st, &gi) in combo.iter().enumerate() {
                rows[st].copy_from_slice(grid[gi].weights());
            }
            let value = obj.objective_bits(&rows);
            evaluations += 1;
            if value > best_value {
                best_value = value;
                best = Some((f_map.clone(), combo.clone()));
            }
            // advance the mixed-radix counter over grid indices
            let mut done = true;
            for d in (0..c.nst).rev() {
                combo[d] += 1;
                if combo[d] < grid.len() {
                    done = false;
                    break;
                }
                combo[d] = 0;
            }
            if done {
                break;
            }
        }
    }
    let (f_map, combo) = best.expect("grid is never empty");
    let code = AuxCode::new(
        u_size,
        c.nst,
        c.nx,
        combo.iter().map(|&gi| grid[gi].clone()).collect(),
        f_map,
        false,
    )
    .expect("grid point is a valid code");
    Ok(CapacityReport {
        value_bits: best_value,
        achiever: Achiever::Aux(code),
        iterations: evaluations,
        restarts_used: 0,
        converged: true,
        exhaustive: true,
        inner_bound_only: true,
        oracle_gap_bits: None,
    })
}

// ---------------------------------------------------------------------------
// Common-form table
// ---------------------------------------------------------------------------

/// One of the eight `{causal, non-causal} x {S_T, none} x {S_R, none}`
/// capacities of a channel.
#[derive(Debug, Clone)]
pub struct CommonFormRow {
    pub causal: bool,
    pub tx_si: bool,
    pub rx_si: bool,
    pub report: CapacityReport,
}

#[derive(Debug, Clone)]
pub struct CommonFormTable {
    pub rows: Vec<CommonFormRow>,
    /// Whether the structurally forced equalities (causal = non-causal when
    /// the transmitter has no side information) hold within tolerance.
    pub forced_equalities_ok: bool,
    pub max_forced_gap_bits: f64,
}

impl CommonFormTable {
    pub fn value(&self, causal: bool, tx_si: bool, rx_si: bool) -> f64 {
        self.rows
            .iter()
            .find(|r| r.causal == causal && r.tx_si == tx_si && r.rx_si == rx_si)
            .expect("all eight rows are present")
            .report
            .value_bits
    }
}

/// Computes all eight capacities of the common-form table by dropping
/// `S_T` and/or `S_R` from the state law and dispatching to the causal and
/// non-causal solvers.
pub fn common_form_table(
    c: &StateChannel,
    cfg: &SolveConfig,
) -> Result<CommonFormTable, SolveError> {
    let mut rows = Vec::with_capacity(8);
    for causal in [true, false] {
        for tx_si in [true, false] {
            for rx_si in [true, false] {
                let mut reduced = c.clone();
                if !tx_si {
                    reduced = reduced.drop_tx_si();
                }
                if !rx_si {
                    reduced = reduced.drop_rx_si();
                }
                let report = if causal {
                    capacity_causal(&reduced, cfg)?
                } else {
                    capacity_noncausal(&reduced, cfg)?
                };
                rows.push(CommonFormRow {
                    causal,
                    tx_si,
                    rx_si,
                    report,
                });
            }
        }
    }
    let table = CommonFormTable {
        rows,
        forced_equalities_ok: false,
        max_forced_gap_bits: 0.0,
    };
    let mut max_gap = 0.0f64;
    for rx_si in [true, false] {
        let gap = (table.value(true, false, rx_si) - table.value(false, false, rx_si)).abs();
        max_gap = max_gap.max(gap);
    }
    Ok(CommonFormTable {
        forced_equalities_ok: max_gap <= 1e-6,
        max_forced_gap_bits: max_gap,
        ..table
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Dmc;
    use crate::generators::{
        make_erasure_parity, make_random_access, make_stuck_at, random_shared_state_channel,
        random_state_channel,
    };
    use crate::prob::xlog2x;

    fn binary_entropy(p: f64) -> f64 {
        -xlog2x(p) - xlog2x(1.0 - p)
    }

    #[test]
    fn ba_noiseless_binary() {
        let rep = blahut_arimoto(&Dmc::noiseless(2), 1e-9, 5000);
        assert!(rep.converged);
        assert!((rep.value_bits - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ba_bsc_matches_analytic() {
        let rep = blahut_arimoto(&Dmc::bsc(0.11), 1e-9, 5000);
        let expect = 1.0 - binary_entropy(0.11);
        assert!((rep.value_bits - expect).abs() < 1e-8, "{}", rep.value_bits);
    }

    #[test]
    fn ba_erasure_matches_analytic() {
        let rep = blahut_arimoto(&Dmc::erasure(2, 0.25), 1e-9, 5000);
        assert!((rep.value_bits - 0.75).abs() < 1e-8);
    }

    #[test]
    fn ba_non_convergence_is_reported() {
        // asymmetric channel: the uniform start is not optimal, so two
        // iterations cannot reach a 1e-12 duality gap
        let z = Dmc::new(2, 2, vec![1.0, 0.0, 0.5, 0.5]).unwrap();
        let rep = blahut_arimoto(&z, 1e-12, 2);
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 2);
        let full = blahut_arimoto(&z, 1e-10, 5000);
        assert!(full.converged);
        assert!(full.value_bits >= rep.value_bits);
    }

    #[test]
    fn causal_erasure_parity_reaches_log3() {
        let c = make_erasure_parity(2);
        let rep = capacity_causal(&c, &SolveConfig::default()).unwrap();
        assert!((rep.value_bits - 3.0f64.log2()).abs() < 1e-6, "{}", rep.value_bits);
    }

    #[test]
    fn causal_random_access_equals_no_si() {
        let c = make_random_access(&Dmc::noiseless(2), 0.5, false);
        let causal = capacity_causal(&c, &SolveConfig::default()).unwrap();
        let plain = blahut_arimoto(&c.plain_dmc(), 1e-9, 5000);
        assert!((causal.value_bits - plain.value_bits).abs() < 1e-6);
    }

    #[test]
    fn causal_without_tx_si_equals_plain_on_extended_output() {
        // |S_T| = 1: the strategy alphabet is the input alphabet and the
        // transform only extends the output with S_R.
        for seed in 0..5 {
            let c = random_state_channel(2, 3, 2, 1, 2, seed);
            let causal = capacity_causal(&c, &SolveConfig::default()).unwrap();
            let t = strategy_transform(&c, 64).unwrap();
            assert_eq!(t.dmc.n_in, 2);
            let plain = blahut_arimoto(&t.dmc, 1e-9, 5000);
            assert!((causal.value_bits - plain.value_bits).abs() < 1e-12);
        }
    }

    #[test]
    fn noncausal_junk_tx_state_reduces_to_plain() {
        // S_T carries no information about the channel state.
        for seed in 0..3 {
            let c = random_state_channel(2, 2, 2, 1, 1, seed);
            // re-attach an independent binary S_T
            let law = crate::prob::JointTable::from_fn(vec![2, 2, 1], |i| {
                c.state_law.value(&[i[0], 0, 0]) * 0.5
            })
            .unwrap();
            let junk = StateChannel::new(2, 2, 2, 2, 1, law, c.transition_flat().to_vec()).unwrap();
            let nc = capacity_noncausal(&junk, &SolveConfig::sweep().with_seed(seed)).unwrap();
            let plain = blahut_arimoto(&junk.plain_dmc(), 1e-9, 5000);
            assert!(
                (nc.value_bits - plain.value_bits).abs() < 2e-3,
                "seed {seed}: {} vs {}",
                nc.value_bits,
                plain.value_bits
            );
        }
    }

    #[test]
    fn noncausal_stuck_at_defects_reaches_masking_rate() {
        let c = make_stuck_at(0.2);
        let rep = capacity_noncausal(&c, &SolveConfig::default()).unwrap();
        assert!(!rep.exhaustive, "default u makes the f space too big to enumerate");
        assert!(rep.value_bits >= 0.8 - 5e-3, "{}", rep.value_bits);
        assert!(rep.value_bits <= 1.0 + 1e-9);
    }

    #[test]
    fn noncausal_dominates_causal_on_seeded_channels() {
        for seed in 0..6 {
            let c = random_state_channel(2, 2, 2, 2, 2, seed);
            let cfg = SolveConfig::sweep().with_seed(seed);
            let nc = capacity_noncausal(&c, &cfg).unwrap();
            let ca = capacity_causal(&c, &cfg).unwrap();
            assert!(nc.value_bits >= ca.value_bits - 1e-9);
        }
    }

    #[test]
    fn rx_knows_tx_random_access_scales_base_capacity() {
        for p_on in [0.0, 0.25, 0.5, 1.0] {
            let c = make_random_access(&Dmc::noiseless(2), p_on, true);
            let rep = capacity_rx_knows_tx(&c, &SolveConfig::default()).unwrap();
            assert!(
                (rep.value_bits - p_on).abs() < 1e-6,
                "p_on {p_on}: {}",
                rep.value_bits
            );
        }
    }

    #[test]
    fn rx_knows_tx_requires_determinism() {
        // S_T uniform independent of S_R: ambiguous given s_r.
        let c = random_state_channel(2, 2, 2, 2, 2, 3);
        assert!(matches!(
            capacity_rx_knows_tx(&c, &SolveConfig::default()),
            Err(SolveError::RxDoesNotDetermineTx { .. })
        ));
    }

    #[test]
    fn rx_knows_tx_trivial_tx_state_is_conditional_capacity() {
        let c = random_state_channel(2, 3, 2, 1, 2, 9);
        let rep = capacity_rx_knows_tx(&c, &SolveConfig::default()).unwrap();
        let causal = capacity_causal(&c, &SolveConfig::default()).unwrap();
        // with |S_T| = 1 both are max_{P(X)} I(X; Y, S_R)... up to the
        // difference between I(X;Y|S_R) and I(X;Y,S_R), which coincide
        // because X is independent of S_R.
        assert!((rep.value_bits - causal.value_bits).abs() < 1e-6);
    }

    #[test]
    fn erasure_parity_with_revealed_state_keeps_log3() {
        let c = make_erasure_parity(2);
        let g = crate::bounds::GenieSpec::full_state(&c).unwrap();
        let revealed = crate::bounds::extend_receiver(&c, &g);
        let rep = capacity_rx_knows_tx(&revealed, &SolveConfig::default()).unwrap();
        // Independent route: with the state known everywhere the value is
        // the state-average of per-state capacities, each solved by its own
        // Blahut-Arimoto run on the frozen-state channel.
        let mut expect = 0.0;
        for s in 0..c.ns {
            let mut rows = Vec::with_capacity(c.nx * c.ny);
            for x in 0..c.nx {
                rows.extend_from_slice(c.transition_row(x, s));
            }
            let per_state = blahut_arimoto(&Dmc::new(c.nx, c.ny, rows).unwrap(), 1e-10, 5000);
            expect += c.state_marginal().weights()[s] * per_state.value_bits;
        }
        assert!((expect - 3.0f64.log2()).abs() < 1e-7);
        assert!((rep.value_bits - expect).abs() < 1e-6);
    }

    #[test]
    fn oracle_grid_nests_with_resolution() {
        let c = make_stuck_at(0.2);
        let cfg = SolveConfig::default();
        let v6 = gp_oracle_grid(&c, 6, 2, &cfg).unwrap().value_bits;
        let v12 = gp_oracle_grid(&c, 12, 2, &cfg).unwrap().value_bits;
        assert!(v12 >= v6 - 1e-12);
    }

    #[test]
    fn oracle_budget_is_enforced() {
        let c = make_stuck_at(0.2);
        let cfg = SolveConfig {
            grid_budget: 10,
            ..SolveConfig::default()
        };
        assert!(matches!(
            gp_oracle_grid(&c, 24, 2, &cfg),
            Err(SolveError::GridBudget { .. })
        ));
    }

    #[test]
    fn common_form_table_on_erasure_parity() {
        let c = make_erasure_parity(2);
        let cfg = SolveConfig::sweep();
        let table = common_form_table(&c, &cfg).unwrap();
        assert!(table.forced_equalities_ok, "gap {}", table.max_forced_gap_bits);
        assert!((table.value(true, true, false) - 3.0f64.log2()).abs() < 1e-6);
        assert!((table.value(true, false, false) - 1.0).abs() < 1e-6);
        // row dominance
        for rx in [true, false] {
            assert!(
                table.value(false, true, rx) >= table.value(true, true, rx) - 1e-9
            );
            assert!(
                table.value(true, true, rx) >= table.value(true, false, rx) - 1e-9
            );
        }
    }

    #[test]
    fn common_form_equality_under_shared_state() {
        // S_T = S_R = S: the causal and non-causal entries agree wherever
        // the receiver still sees the transmitter's information or the
        // transmitter has none. Dropping S_R breaks the equality (the
        // transmitter then knows strictly more), so that row only obeys
        // dominance.
        let c = random_shared_state_channel(2, 2, 2, 17);
        let cfg = SolveConfig::sweep().with_seed(17);
        let table = common_form_table(&c, &cfg).unwrap();
        assert!((table.value(true, true, true) - table.value(false, true, true)).abs() <= 2e-3);
        assert!((table.value(true, false, true) - table.value(false, false, true)).abs() <= 1e-6);
        assert!((table.value(true, false, false) - table.value(false, false, false)).abs() <= 1e-6);
        assert!(table.value(false, true, false) >= table.value(true, true, false) - 1e-9);
    }
}
