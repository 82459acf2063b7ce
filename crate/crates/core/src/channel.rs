//! Channel data model: single-user state channels, multiple access,
//! broadcast and relay variants, plus the Shannon-strategy alphabet
//! transform and block-static expansion.
//!
//! A [`StateChannel`] couples a joint state law `P(S, S_T, S_R)` with a
//! per-symbol transition law `P(Y | X, S)`. The transmitter observes `S_T`,
//! the receiver observes `S_R`, and the channel itself is driven by `S`.

use crate::prob::{Dist, JointTable, ProbError, NORMALIZATION_TOL};
use thiserror::Error;

/// Default cap on enumerated strategy letters `|X|^|S_T|`.
pub const DEFAULT_STRATEGY_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("strategy alphabet needs {count} letters (|X|^|S_T|), above the cap {cap}")]
    StrategyCapExceeded { count: u128, cap: usize },
    #[error("block expansion needs {count} super-symbols on the {axis} axis, above the cap {cap}")]
    ExpansionCapExceeded {
        axis: &'static str,
        count: u128,
        cap: usize,
    },
    #[error("invalid channel: {}", summarize(.diagnostics))]
    Invalid { diagnostics: Vec<Diagnostic> },
}

fn summarize(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// An invariant violation; the channel must not be used.
    Error,
    /// Informational flag (e.g. a zero-probability state value).
    Info,
}

/// One validation finding, naming the offending field.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn check_row(
    diagnostics: &mut Vec<Diagnostic>,
    field: String,
    row: &[f64],
) {
    let mut sum = 0.0;
    for (i, &v) in row.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: field.clone(),
                message: format!("entry {i} is {v}, expected >= 0"),
            });
        }
        sum += v;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        diagnostics.push(Diagnostic {
            severity: Severity::Error,
            field,
            message: format!("row sums to {sum:.17}, expected 1"),
        });
    }
}

fn check_joint(diagnostics: &mut Vec<Diagnostic>, field: &str, mass: &[f64]) {
    let mut sum = 0.0;
    for (i, &v) in mass.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: field.to_string(),
                message: format!("entry {i} is {v}, expected >= 0"),
            });
        }
        sum += v;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        diagnostics.push(Diagnostic {
            severity: Severity::Error,
            field: field.to_string(),
            message: format!("total mass is {sum:.17}, expected 1"),
        });
    }
}

// ---------------------------------------------------------------------------
// Plain DMC
// ---------------------------------------------------------------------------

/// A plain discrete memoryless channel `P(Y|X)`, rows stored `[x][y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    pub n_in: usize,
    pub n_out: usize,
    rows: Vec<f64>,
}

impl Dmc {
    pub fn new(n_in: usize, n_out: usize, rows: Vec<f64>) -> Result<Self, ChannelError> {
        assert!(n_in >= 1 && n_out >= 1);
        if rows.len() != n_in * n_out {
            return Err(ProbError::ShapeMismatch {
                expected: n_in * n_out,
                got: rows.len(),
            }
            .into());
        }
        let mut diagnostics = Vec::new();
        for x in 0..n_in {
            check_row(
                &mut diagnostics,
                format!("transition[{x}]"),
                &rows[x * n_out..(x + 1) * n_out],
            );
        }
        if diagnostics.is_empty() {
            Ok(Self { n_in, n_out, rows })
        } else {
            Err(ChannelError::Invalid { diagnostics })
        }
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.n_out..(x + 1) * self.n_out]
    }

    pub fn rows_flat(&self) -> &[f64] {
        &self.rows
    }

    /// Noiseless identity channel over `n` symbols.
    pub fn noiseless(n: usize) -> Self {
        let mut rows = vec![0.0; n * n];
        for x in 0..n {
            rows[x * n + x] = 1.0;
        }
        Self {
            n_in: n,
            n_out: n,
            rows,
        }
    }

    /// Binary symmetric channel with flip probability `p`.
    pub fn bsc(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p));
        Self {
            n_in: 2,
            n_out: 2,
            rows: vec![1.0 - p, p, p, 1.0 - p],
        }
    }

    /// `n`-ary erasure channel with erasure probability `eps`; the erasure
    /// symbol is the last output index.
    pub fn erasure(n: usize, eps: f64) -> Self {
        assert!((0.0..=1.0).contains(&eps));
        let n_out = n + 1;
        let mut rows = vec![0.0; n * n_out];
        for x in 0..n {
            rows[x * n_out + x] = 1.0 - eps;
            rows[x * n_out + n] = eps;
        }
        Self { n_in: n, n_out, rows }
    }
}

// ---------------------------------------------------------------------------
// Single-user state channel
// ---------------------------------------------------------------------------

/// Single-user channel with state: transition `P(Y|X,S)` plus the joint
/// state law `P(S, S_T, S_R)` over channel state, transmitter side
/// information and receiver side information.
#[derive(Debug, Clone, PartialEq)]
pub struct StateChannel {
    pub nx: usize,
    pub ny: usize,
    pub ns: usize,
    pub nst: usize,
    pub nsr: usize,
    /// Joint law over (S, S_T, S_R), axes `[ns, nst, nsr]`.
    pub state_law: JointTable,
    /// Flat transition array `[x][s][y]`.
    transition: Vec<f64>,
}

impl StateChannel {
    pub fn new(
        nx: usize,
        ny: usize,
        ns: usize,
        nst: usize,
        nsr: usize,
        state_law: JointTable,
        transition: Vec<f64>,
    ) -> Result<Self, ChannelError> {
        let c = Self::from_raw_parts(nx, ny, ns, nst, nsr, state_law, transition);
        let errors: Vec<Diagnostic> = c
            .validate()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(c)
        } else {
            Err(ChannelError::Invalid { diagnostics: errors })
        }
    }

    /// Builds without validation; pair with [`StateChannel::validate`].
    pub fn from_raw_parts(
        nx: usize,
        ny: usize,
        ns: usize,
        nst: usize,
        nsr: usize,
        state_law: JointTable,
        transition: Vec<f64>,
    ) -> Self {
        Self {
            nx,
            ny,
            ns,
            nst,
            nsr,
            state_law,
            transition,
        }
    }

    /// Checks every invariant; an empty error-severity list means the
    /// channel is usable. Zero-probability state values are reported at
    /// info severity.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        if self.state_law.axes() != [self.ns, self.nst, self.nsr] {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "state_law".into(),
                message: format!(
                    "axes {:?} do not match alphabet sizes [{}, {}, {}]",
                    self.state_law.axes(),
                    self.ns,
                    self.nst,
                    self.nsr
                ),
            });
            return diagnostics;
        }
        check_joint(&mut diagnostics, "state_law", self.state_law.mass());
        if self.transition.len() != self.nx * self.ns * self.ny {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "transition".into(),
                message: format!(
                    "length {} does not match |X|*|S|*|Y| = {}",
                    self.transition.len(),
                    self.nx * self.ns * self.ny
                ),
            });
            return diagnostics;
        }
        for x in 0..self.nx {
            for s in 0..self.ns {
                check_row(
                    &mut diagnostics,
                    format!("transition[{x}][{s}]"),
                    self.transition_row(x, s),
                );
            }
        }
        if diagnostics.iter().all(|d| d.severity != Severity::Error) {
            if let Ok(ps) = self.state_law.marginal(&[0]) {
                for (s, &m) in ps.mass().iter().enumerate() {
                    if m == 0.0 {
                        diagnostics.push(Diagnostic {
                            severity: Severity::Info,
                            field: "state_law".into(),
                            message: format!("state value {s} has zero probability"),
                        });
                    }
                }
            }
        }
        diagnostics
    }

    pub fn is_valid(&self) -> bool {
        self.validate()
            .iter()
            .all(|d| d.severity != Severity::Error)
    }

    #[inline]
    pub fn transition_row(&self, x: usize, s: usize) -> &[f64] {
        let base = (x * self.ns + s) * self.ny;
        &self.transition[base..base + self.ny]
    }

    pub fn transition_flat(&self) -> &[f64] {
        &self.transition
    }

    /// Marginal `P(S)`.
    pub fn state_marginal(&self) -> Dist {
        self.state_law.axis_dist(0).expect("valid state law")
    }

    /// Marginal `P(S_T)`.
    pub fn tx_marginal(&self) -> Dist {
        self.state_law.axis_dist(1).expect("valid state law")
    }

    /// Marginal `P(S_R)`.
    pub fn rx_marginal(&self) -> Dist {
        self.state_law.axis_dist(2).expect("valid state law")
    }

    /// The channel with the transmitter side information removed
    /// (`S_T` collapsed to a singleton).
    pub fn drop_tx_si(&self) -> StateChannel {
        let law = self
            .state_law
            .regroup(&[&[0], &[], &[2]])
            .expect("marginalizing S_T");
        StateChannel::from_raw_parts(
            self.nx,
            self.ny,
            self.ns,
            1,
            self.nsr,
            law,
            self.transition.clone(),
        )
    }

    /// The channel with the receiver side information removed.
    pub fn drop_rx_si(&self) -> StateChannel {
        let law = self
            .state_law
            .regroup(&[&[0], &[1], &[]])
            .expect("marginalizing S_R");
        StateChannel::from_raw_parts(
            self.nx,
            self.ny,
            self.ns,
            self.nst,
            1,
            law,
            self.transition.clone(),
        )
    }

    /// The plain state-averaged channel `P(y|x) = sum_s P(s) P(y|x,s)`;
    /// the no-side-information view of this channel.
    pub fn plain_dmc(&self) -> Dmc {
        let ps = self.state_marginal();
        let mut rows = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for (s, &w) in ps.weights().iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let row = self.transition_row(x, s);
                for y in 0..self.ny {
                    rows[x * self.ny + y] += w * row[y];
                }
            }
        }
        Dmc::new(self.nx, self.ny, rows).expect("averaged rows are valid")
    }
}

// ---------------------------------------------------------------------------
// Shannon strategies
// ---------------------------------------------------------------------------

/// A Shannon strategy: a total map from the transmitter-state alphabet to
/// the input alphabet. There are exactly `|X|^|S_T|` distinct strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub map: Vec<usize>,
}

impl Strategy {
    /// Enumerates all `|X|^|S_T|` strategies in mixed-radix order (the
    /// strategy with index `i` maps `s_t` to digit `s_t` of `i` base `nx`,
    /// most significant digit first).
    pub fn enumerate_all(nx: usize, nst: usize) -> Vec<Strategy> {
        let total = nx.pow(nst as u32);
        let mut out = Vec::with_capacity(total);
        for i in 0..total {
            let mut map = vec![0usize; nst];
            let mut rem = i;
            for d in (0..nst).rev() {
                map[d] = rem % nx;
                rem /= nx;
            }
            out.push(Strategy { map });
        }
        out
    }
}

/// Result of the strategy transform: a plain DMC over the extended input
/// alphabet `T` of strategies, with output alphabet `Y x S_R` (flattened as
/// `y * nsr + s_r`).
#[derive(Debug, Clone)]
pub struct StrategyDmc {
    pub dmc: Dmc,
    pub strategies: Vec<Strategy>,
    pub ny: usize,
    pub nsr: usize,
}

/// Folds causal transmitter side information into the input alphabet:
/// `P(y, s_r | t) = sum_{s, s_t} P(s, s_t, s_r) P(y | x = t(s_t), s)`.
pub fn strategy_transform(c: &StateChannel, cap: usize) -> Result<StrategyDmc, ChannelError> {
    let count = (c.nx as u128).checked_pow(c.nst as u32);
    match count {
        Some(n) if n <= cap as u128 => {}
        Some(n) => return Err(ChannelError::StrategyCapExceeded { count: n, cap }),
        None => {
            return Err(ChannelError::StrategyCapExceeded {
                count: u128::MAX,
                cap,
            })
        }
    }
    let strategies = Strategy::enumerate_all(c.nx, c.nst);
    let n_out = c.ny * c.nsr;
    let mut rows = vec![0.0; strategies.len() * n_out];
    let law = c.state_law.mass();
    for (ti, t) in strategies.iter().enumerate() {
        let out = &mut rows[ti * n_out..(ti + 1) * n_out];
        let mut cell = 0usize;
        for s in 0..c.ns {
            for st in 0..c.nst {
                let x = t.map[st];
                let w_row = c.transition_row(x, s);
                for sr in 0..c.nsr {
                    let w = law[cell];
                    cell += 1;
                    if w == 0.0 {
                        continue;
                    }
                    for (y, &wy) in w_row.iter().enumerate() {
                        out[y * c.nsr + sr] += w * wy;
                    }
                }
            }
        }
    }
    Ok(StrategyDmc {
        dmc: Dmc::new(strategies.len(), n_out, rows)?,
        strategies,
        ny: c.ny,
        nsr: c.nsr,
    })
}

// ---------------------------------------------------------------------------
// Block-static expansion
// ---------------------------------------------------------------------------

/// Holds the state fixed across `n` uses and treats the block as one
/// super-symbol: input/output alphabets become `n`-fold products while the
/// state law is unchanged. Per-use quantities of the original channel are
/// the expanded channel's values divided by `n`.
pub fn block_static_expand(
    c: &StateChannel,
    n: usize,
    alphabet_cap: usize,
) -> Result<StateChannel, ChannelError> {
    assert!(n >= 1);
    if n == 1 {
        return Ok(c.clone());
    }
    let nx_e = checked_pow(c.nx, n, alphabet_cap, "input")?;
    let ny_e = checked_pow(c.ny, n, alphabet_cap, "output")?;
    let mut transition = vec![0.0; nx_e * c.ns * ny_e];
    let mut xdigits = vec![0usize; n];
    for xe in 0..nx_e {
        digits(xe, c.nx, &mut xdigits);
        for s in 0..c.ns {
            let base = (xe * c.ns + s) * ny_e;
            let mut ydigits = vec![0usize; n];
            for ye in 0..ny_e {
                digits(ye, c.ny, &mut ydigits);
                let mut p = 1.0;
                for i in 0..n {
                    p *= c.transition_row(xdigits[i], s)[ydigits[i]];
                    if p == 0.0 {
                        break;
                    }
                }
                transition[base + ye] = p;
            }
        }
    }
    Ok(StateChannel::from_raw_parts(
        nx_e,
        ny_e,
        c.ns,
        c.nst,
        c.nsr,
        c.state_law.clone(),
        transition,
    ))
}

fn checked_pow(
    base: usize,
    n: usize,
    cap: usize,
    axis: &'static str,
) -> Result<usize, ChannelError> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(base as u128);
    }
    if acc > cap as u128 {
        Err(ChannelError::ExpansionCapExceeded {
            axis,
            count: acc,
            cap,
        })
    } else {
        Ok(acc as usize)
    }
}

fn digits(mut value: usize, base: usize, out: &mut [usize]) {
    for d in (0..out.len()).rev() {
        out[d] = value % base;
        value /= base;
    }
}

// ---------------------------------------------------------------------------
// Multiple access channel
// ---------------------------------------------------------------------------

/// Two-transmitter multiple access channel with per-terminal side
/// information: transition `P(Y|X1,X2,S)` and state law over
/// `(S, S_T1, S_T2, S_R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacChannel {
    pub nx1: usize,
    pub nx2: usize,
    pub ny: usize,
    pub ns: usize,
    pub nst1: usize,
    pub nst2: usize,
    pub nsr: usize,
    /// Joint law over (S, S_T1, S_T2, S_R), axes `[ns, nst1, nst2, nsr]`.
    pub state_law: JointTable,
    /// Flat transition array `[x1][x2][s][y]`.
    transition: Vec<f64>,
    /// Declares `P(S_T1, S_T2) = P(S_T1) P(S_T2)`; must match the state law
    /// within 1e-9 when set.
    pub tx_states_independent: bool,
}

impl MacChannel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        nx1: usize,
        nx2: usize,
        ny: usize,
        ns: usize,
        nst1: usize,
        nst2: usize,
        nsr: usize,
        state_law: JointTable,
        transition: Vec<f64>,
        tx_states_independent: bool,
    ) -> Result<Self, ChannelError> {
        let m = Self {
            nx1,
            nx2,
            ny,
            ns,
            nst1,
            nst2,
            nsr,
            state_law,
            transition,
            tx_states_independent,
        };
        let errors: Vec<Diagnostic> = m
            .validate()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(m)
        } else {
            Err(ChannelError::Invalid { diagnostics: errors })
        }
    }

    /// Builds without validation; pair with [`MacChannel::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw_parts(
        nx1: usize,
        nx2: usize,
        ny: usize,
        ns: usize,
        nst1: usize,
        nst2: usize,
        nsr: usize,
        state_law: JointTable,
        transition: Vec<f64>,
        tx_states_independent: bool,
    ) -> Self {
        Self {
            nx1,
            nx2,
            ny,
            ns,
            nst1,
            nst2,
            nsr,
            state_law,
            transition,
            tx_states_independent,
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        if self.state_law.axes() != [self.ns, self.nst1, self.nst2, self.nsr] {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "state_law".into(),
                message: "axes do not match alphabet sizes".into(),
            });
            return diagnostics;
        }
        check_joint(&mut diagnostics, "state_law", self.state_law.mass());
        let expected = self.nx1 * self.nx2 * self.ns * self.ny;
        if self.transition.len() != expected {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "transition".into(),
                message: format!(
                    "length {} does not match |X1|*|X2|*|S|*|Y| = {expected}",
                    self.transition.len()
                ),
            });
            return diagnostics;
        }
        for x1 in 0..self.nx1 {
            for x2 in 0..self.nx2 {
                for s in 0..self.ns {
                    check_row(
                        &mut diagnostics,
                        format!("transition[{x1}][{x2}][{s}]"),
                        self.transition_row(x1, x2, s),
                    );
                }
            }
        }
        if self.tx_states_independent
            && diagnostics.iter().all(|d| d.severity != Severity::Error)
            && !self.tx_states_factorize(1e-9)
        {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "tx_states_independent".into(),
                message: "flag is set but P(S_T1,S_T2) does not factorize".into(),
            });
        }
        diagnostics
    }

    /// Whether `P(S_T1, S_T2)` factorizes into its marginals within `tol`.
    pub fn tx_states_factorize(&self, tol: f64) -> bool {
        let joint = self
            .state_law
            .regroup(&[&[1], &[2]])
            .expect("valid state law");
        let p1 = joint.marginal(&[0]).expect("marginal");
        let p2 = joint.marginal(&[1]).expect("marginal");
        for a in 0..self.nst1 {
            for b in 0..self.nst2 {
                let lhs = joint.value(&[a, b]);
                let rhs = p1.mass()[a] * p2.mass()[b];
                if (lhs - rhs).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Whether `(S_T1, S_T2)` is a deterministic function of `S_R` on the
    /// support of `P(S_R)`.
    pub fn rx_determines_tx_states(&self) -> bool {
        self.rx_tx_ambiguous_sr().is_none()
    }

    /// First `s_r` value (if any) that leaves `(S_T1, S_T2)` ambiguous.
    pub fn rx_tx_ambiguous_sr(&self) -> Option<usize> {
        let joint = self
            .state_law
            .regroup(&[&[3], &[1, 2]])
            .expect("valid state law");
        let nsr = joint.axes()[0];
        let npair = joint.axes()[1];
        for sr in 0..nsr {
            let mut total = 0.0;
            let mut max = 0.0;
            for pair in 0..npair {
                let v = joint.value(&[sr, pair]);
                total += v;
                if v > max {
                    max = v;
                }
            }
            if total > 0.0 && max < total * (1.0 - 1e-9) {
                return Some(sr);
            }
        }
        None
    }

    #[inline]
    pub fn transition_row(&self, x1: usize, x2: usize, s: usize) -> &[f64] {
        let base = ((x1 * self.nx2 + x2) * self.ns + s) * self.ny;
        &self.transition[base..base + self.ny]
    }

    pub fn transition_flat(&self) -> &[f64] {
        &self.transition
    }

    pub fn state_marginal(&self) -> Dist {
        self.state_law.axis_dist(0).expect("valid state law")
    }
}

/// Block-static expansion of a MAC: both input alphabets and the output
/// alphabet become `n`-fold products while the state is held fixed across
/// the block.
pub fn block_static_expand_mac(
    m: &MacChannel,
    n: usize,
    alphabet_cap: usize,
) -> Result<MacChannel, ChannelError> {
    assert!(n >= 1);
    if n == 1 {
        return Ok(m.clone());
    }
    let nx1_e = checked_pow(m.nx1, n, alphabet_cap, "input")?;
    let nx2_e = checked_pow(m.nx2, n, alphabet_cap, "input")?;
    let ny_e = checked_pow(m.ny, n, alphabet_cap, "output")?;
    let mut transition = vec![0.0; nx1_e * nx2_e * m.ns * ny_e];
    let mut d1 = vec![0usize; n];
    let mut d2 = vec![0usize; n];
    let mut dy = vec![0usize; n];
    for x1 in 0..nx1_e {
        digits(x1, m.nx1, &mut d1);
        for x2 in 0..nx2_e {
            digits(x2, m.nx2, &mut d2);
            for s in 0..m.ns {
                let base = ((x1 * nx2_e + x2) * m.ns + s) * ny_e;
                for ye in 0..ny_e {
                    digits(ye, m.ny, &mut dy);
                    let mut p = 1.0;
                    for i in 0..n {
                        p *= m.transition_row(d1[i], d2[i], s)[dy[i]];
                        if p == 0.0 {
                            break;
                        }
                    }
                    transition[base + ye] = p;
                }
            }
        }
    }
    Ok(MacChannel {
        nx1: nx1_e,
        nx2: nx2_e,
        ny: ny_e,
        ns: m.ns,
        nst1: m.nst1,
        nst2: m.nst2,
        nsr: m.nsr,
        state_law: m.state_law.clone(),
        transition,
        tx_states_independent: m.tx_states_independent,
    })
}

// ---------------------------------------------------------------------------
// Broadcast channel
// ---------------------------------------------------------------------------

/// Two-receiver broadcast channel with transmitter side information `S_T`
/// and receiver side informations `S_R1`, `S_R2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BcChannel {
    pub nx: usize,
    pub ny1: usize,
    pub ny2: usize,
    pub nst: usize,
    pub nsr1: usize,
    pub nsr2: usize,
    /// Joint law over (S_T, S_R1, S_R2), axes `[nst, nsr1, nsr2]`.
    pub state_law: JointTable,
    /// Flat transition array `[x][s_t][y1][y2]`.
    transition: Vec<f64>,
}

impl BcChannel {
    pub fn new(
        nx: usize,
        ny1: usize,
        ny2: usize,
        nst: usize,
        nsr1: usize,
        nsr2: usize,
        state_law: JointTable,
        transition: Vec<f64>,
    ) -> Result<Self, ChannelError> {
        let b = Self {
            nx,
            ny1,
            ny2,
            nst,
            nsr1,
            nsr2,
            state_law,
            transition,
        };
        let errors: Vec<Diagnostic> = b
            .validate()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(b)
        } else {
            Err(ChannelError::Invalid { diagnostics: errors })
        }
    }

    /// Builds without validation; pair with [`BcChannel::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw_parts(
        nx: usize,
        ny1: usize,
        ny2: usize,
        nst: usize,
        nsr1: usize,
        nsr2: usize,
        state_law: JointTable,
        transition: Vec<f64>,
    ) -> Self {
        Self {
            nx,
            ny1,
            ny2,
            nst,
            nsr1,
            nsr2,
            state_law,
            transition,
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        if self.state_law.axes() != [self.nst, self.nsr1, self.nsr2] {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "state_law".into(),
                message: "axes do not match alphabet sizes".into(),
            });
            return diagnostics;
        }
        check_joint(&mut diagnostics, "state_law", self.state_law.mass());
        let expected = self.nx * self.nst * self.ny1 * self.ny2;
        if self.transition.len() != expected {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "transition".into(),
                message: format!(
                    "length {} does not match |X|*|S_T|*|Y1|*|Y2| = {expected}",
                    self.transition.len()
                ),
            });
            return diagnostics;
        }
        for x in 0..self.nx {
            for st in 0..self.nst {
                check_row(
                    &mut diagnostics,
                    format!("transition[{x}][{st}]"),
                    self.transition_row(x, st),
                );
            }
        }
        diagnostics
    }

    /// Joint output row `P(y1, y2 | x, s_t)`, flattened `y1 * ny2 + y2`.
    #[inline]
    pub fn transition_row(&self, x: usize, st: usize) -> &[f64] {
        let len = self.ny1 * self.ny2;
        let base = (x * self.nst + st) * len;
        &self.transition[base..base + len]
    }
}

// ---------------------------------------------------------------------------
// Relay channel
// ---------------------------------------------------------------------------

/// Relay channel with side information: source input `X_S`, relay input
/// `X_R`, relay output `Y_R`, destination output `Y_D`, channel state `S`
/// (known to source and relay) and destination state `S_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannel {
    pub nxs: usize,
    pub nxr: usize,
    pub nyr: usize,
    pub nyd: usize,
    pub ns: usize,
    pub nsd: usize,
    /// Joint law over (S, S_D), axes `[ns, nsd]`.
    pub state_law: JointTable,
    /// Flat transition array `[x_s][x_r][s][s_d][y_r][y_d]`.
    transition: Vec<f64>,
}

impl RelayChannel {
    pub fn new(
        nxs: usize,
        nxr: usize,
        nyr: usize,
        nyd: usize,
        ns: usize,
        nsd: usize,
        state_law: JointTable,
        transition: Vec<f64>,
    ) -> Result<Self, ChannelError> {
        let r = Self {
            nxs,
            nxr,
            nyr,
            nyd,
            ns,
            nsd,
            state_law,
            transition,
        };
        let errors: Vec<Diagnostic> = r
            .validate()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(r)
        } else {
            Err(ChannelError::Invalid { diagnostics: errors })
        }
    }

    /// Builds without validation; pair with [`RelayChannel::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw_parts(
        nxs: usize,
        nxr: usize,
        nyr: usize,
        nyd: usize,
        ns: usize,
        nsd: usize,
        state_law: JointTable,
        transition: Vec<f64>,
    ) -> Self {
        Self {
            nxs,
            nxr,
            nyr,
            nyd,
            ns,
            nsd,
            state_law,
            transition,
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diagnostics = Vec::new();
        if self.state_law.axes() != [self.ns, self.nsd] {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "state_law".into(),
                message: "axes do not match alphabet sizes".into(),
            });
            return diagnostics;
        }
        check_joint(&mut diagnostics, "state_law", self.state_law.mass());
        let expected = self.nxs * self.nxr * self.ns * self.nsd * self.nyr * self.nyd;
        if self.transition.len() != expected {
            diagnostics.push(Diagnostic {
                severity: Severity::Error,
                field: "transition".into(),
                message: format!(
                    "length {} does not match |X_S|*|X_R|*|S|*|S_D|*|Y_R|*|Y_D| = {expected}",
                    self.transition.len()
                ),
            });
            return diagnostics;
        }
        for xs in 0..self.nxs {
            for xr in 0..self.nxr {
                for s in 0..self.ns {
                    for sd in 0..self.nsd {
                        check_row(
                            &mut diagnostics,
                            format!("transition[{xs}][{xr}][{s}][{sd}]"),
                            self.transition_row(xs, xr, s, sd),
                        );
                    }
                }
            }
        }
        diagnostics
    }

    /// Joint output row `P(y_r, y_d | x_s, x_r, s, s_d)`, flattened
    /// `y_r * nyd + y_d`.
    #[inline]
    pub fn transition_row(&self, xs: usize, xr: usize, s: usize, sd: usize) -> &[f64] {
        let len = self.nyr * self.nyd;
        let base = (((xs * self.nxr + xr) * self.ns + s) * self.nsd + sd) * len;
        &self.transition[base..base + len]
    }

    /// Whether `S` is a deterministic function of `S_D` on the support of
    /// `P(S_D)`.
    pub fn sd_determines_s(&self) -> bool {
        for sd in 0..self.nsd {
            let mut total = 0.0;
            let mut max = 0.0;
            for s in 0..self.ns {
                let v = self.state_law.value(&[s, sd]);
                total += v;
                if v > max {
                    max = v;
                }
            }
            if total > 0.0 && max < total * (1.0 - 1e-9) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial_state_bsc(p: f64) -> StateChannel {
        let law = JointTable::new(vec![1, 1, 1], vec![1.0]).unwrap();
        StateChannel::new(2, 2, 1, 1, 1, law, vec![1.0 - p, p, p, 1.0 - p]).unwrap()
    }

    #[test]
    fn validate_well_formed_bsc_is_clean() {
        assert!(trivial_state_bsc(0.2).validate().is_empty());
    }

    #[test]
    fn validate_names_bad_transition_row() {
        let law = JointTable::new(vec![1, 1, 1], vec![1.0]).unwrap();
        let c = StateChannel::from_raw_parts(2, 2, 1, 1, 1, law, vec![0.8, 0.1, 0.5, 0.5]);
        let ds = c.validate();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].field, "transition[0][0]");
        assert_eq!(ds[0].severity, Severity::Error);
    }

    #[test]
    fn validate_names_negative_state_law_entry() {
        let law = JointTable::from_raw_unchecked(vec![2, 1, 1], vec![-0.5, 1.5]);
        let c = StateChannel::from_raw_parts(
            2,
            2,
            2,
            1,
            1,
            law,
            vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
        );
        let ds = c.validate();
        assert!(ds
            .iter()
            .any(|d| d.field == "state_law" && d.severity == Severity::Error));
    }

    #[test]
    fn validate_flags_zero_probability_state() {
        let law = JointTable::new(vec![2, 1, 1], vec![1.0, 0.0]).unwrap();
        let c = StateChannel::new(
            2,
            2,
            2,
            1,
            1,
            law,
            vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let ds = c.validate();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].severity, Severity::Info);
    }

    #[test]
    fn strategy_enumeration_is_complete_and_ordered() {
        let all = Strategy::enumerate_all(2, 2);
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].map, vec![0, 0]);
        assert_eq!(all[1].map, vec![0, 1]);
        assert_eq!(all[3].map, vec![1, 1]);
    }

    #[test]
    fn strategy_transform_rows_are_valid_on_seeded_channels() {
        for seed in 0..100 {
            let c = crate::generators::random_state_channel(2, 3, 2, 2, 2, seed);
            let t = strategy_transform(&c, DEFAULT_STRATEGY_CAP).unwrap();
            for ti in 0..t.dmc.n_in {
                let sum: f64 = t.dmc.row(ti).iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "seed {seed} row {ti}: {sum}");
            }
        }
    }

    #[test]
    fn strategy_transform_cap_is_enforced() {
        let c = crate::generators::random_state_channel(4, 2, 2, 8, 1, 0);
        match strategy_transform(&c, DEFAULT_STRATEGY_CAP) {
            Err(ChannelError::StrategyCapExceeded { count, cap }) => {
                assert_eq!(count, 65536);
                assert_eq!(cap, 4096);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn block_static_expand_identity_at_one() {
        let c = crate::generators::random_state_channel(2, 2, 2, 2, 1, 5);
        let e = block_static_expand(&c, 1, 4096).unwrap();
        assert_eq!(c, e);
    }

    #[test]
    fn block_static_expand_preserves_state_law_and_rows() {
        let c = crate::generators::random_state_channel(2, 2, 2, 2, 2, 11);
        let e = block_static_expand(&c, 2, 4096).unwrap();
        assert_eq!(e.nx, 4);
        assert_eq!(e.ny, 4);
        assert_eq!(e.state_law, c.state_law);
        assert!(e.is_valid());
        // spot-check the product law
        let p = e.transition_row(2, 1); // block symbol (x=1, x=0)
        let a = c.transition_row(1, 1);
        let b = c.transition_row(0, 1);
        let got = p[1]; // block symbol (y=0, y=1)
        assert!((got - a[0] * b[1]).abs() < 1e-15);
    }

    #[test]
    fn mac_independence_flag_must_match_law() {
        // Fully correlated transmitter states with the flag set is invalid.
        let law = JointTable::from_fn(vec![2, 2, 2, 1], |i| {
            if i[0] == i[1] && i[1] == i[2] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let rows: Vec<f64> = (0..2 * 2 * 2)
            .flat_map(|_| vec![0.5, 0.5])
            .collect();
        assert!(MacChannel::new(2, 2, 2, 2, 2, 2, 1, law.clone(), rows.clone(), true).is_err());
        let m = MacChannel::new(2, 2, 2, 2, 2, 2, 1, law, rows, false).unwrap();
        assert!(!m.tx_states_factorize(1e-9));
        assert!(!m.rx_determines_tx_states());
    }

    #[test]
    fn seeded_state_channels_validate() {
        for seed in 0..20 {
            let c = crate::generators::random_state_channel(3, 3, 3, 2, 2, seed);
            assert!(c.is_valid());
        }
    }

    #[test]
    fn plain_dmc_averages_states() {
        let law = JointTable::new(vec![2, 1, 1], vec![0.25, 0.75]).unwrap();
        let c = StateChannel::new(
            2,
            2,
            2,
            1,
            1,
            law,
            vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        let d = c.plain_dmc();
        assert!((d.row(0)[0] - 0.25).abs() < 1e-15);
        assert!((d.row(0)[1] - 0.75).abs() < 1e-15);
    }
}
