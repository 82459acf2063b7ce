//! Exact finite-probability primitives.
//!
//! Everything downstream (channel transforms, capacity solvers, bound
//! checkers) is built on the two value types here: [`Dist`], a probability
//! mass function over an indexed finite alphabet, and [`JointTable`], a
//! multi-axis joint law. All information quantities are in bits (base-2
//! logarithms) with the conventions `0·log 0 = 0` and `0·log(0/0) = 0`.
//!
//! Values are validated at construction and immutable afterwards; a vector
//! that does not sum to one within [`NORMALIZATION_TOL`] is rejected rather
//! than silently rescaled (use [`Dist::normalized`] when rescaling is what
//! you mean).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Tolerance on the total mass accepted at construction time.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Negative information values above this magnitude are treated as bugs
/// rather than round-off and rejected.
pub const NEG_INFO_TOL: f64 = 1e-12;

/// Hard cap on the number of points any enumeration here may produce.
pub const ENUMERATION_CAP: u128 = 100_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ProbError {
    #[error("distribution must have dimension >= 1")]
    EmptyDistribution,
    #[error("weight {value} at index {index} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum:.17e}, expected 1 within {tol:.1e}")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("cannot normalize: total mass {sum} is not positive and finite")]
    DegenerateMass { sum: f64 },
    #[error("expected a table with {expected} axes, got {got}")]
    AxisCount { expected: usize, got: usize },
    #[error("axis index {axis} out of range for a table with {axes} axes")]
    AxisOutOfRange { axis: usize, axes: usize },
    #[error("mass length {got} does not match the axis-size product {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("axis sizes must all be >= 1")]
    EmptyAxis,
    #[error("enumeration would produce {count} points, above the cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
    #[error("information value {value} is negative beyond round-off")]
    NegativeInformation { value: f64 },
}

/// `x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits of an arbitrary non-negative weight slice.
///
/// The slice is treated as a mass function; no normalization check is done
/// here, callers own that invariant.
#[inline]
pub fn entropy_bits(weights: &[f64]) -> f64 {
    -weights.iter().copied().map(xlog2x).sum::<f64>()
}

fn clamp_information(value: f64) -> Result<f64, ProbError> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEG_INFO_TOL {
        Ok(0.0)
    } else {
        Err(ProbError::NegativeInformation { value })
    }
}

/// A probability mass function over an indexed finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    weights: Vec<f64>,
}

impl Dist {
    /// Validates non-negativity and normalization (within
    /// [`NORMALIZATION_TOL`]) without rescaling.
    pub fn new(weights: Vec<f64>) -> Result<Self, ProbError> {
        if weights.is_empty() {
            return Err(ProbError::EmptyDistribution);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ProbError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProbError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        Ok(Self { weights })
    }

    /// Rescales a non-negative weight vector to total mass one.
    pub fn normalized(raw: Vec<f64>) -> Result<Self, ProbError> {
        if raw.is_empty() {
            return Err(ProbError::EmptyDistribution);
        }
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ProbError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(ProbError::DegenerateMass { sum });
        }
        Ok(Self {
            weights: raw.into_iter().map(|w| w / sum).collect(),
        })
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be >= 1");
        Self {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn point_mass(dim: usize, at: usize) -> Self {
        assert!(dim >= 1 && at < dim, "point mass index out of range");
        let mut weights = vec![0.0; dim];
        weights[at] = 1.0;
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Shannon entropy in bits; lies in `[0, log2(len)]`.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.weights)
    }
}

/// Entropy in bits of a distribution. See [`Dist::entropy`].
pub fn entropy(d: &Dist) -> f64 {
    d.entropy()
}

/// A joint probability mass function over an ordered list of finite axes,
/// stored flat in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    axes: Vec<usize>,
    mass: Vec<f64>,
}

impl JointTable {
    pub fn new(axes: Vec<usize>, mass: Vec<f64>) -> Result<Self, ProbError> {
        if axes.is_empty() || axes.contains(&0) {
            return Err(ProbError::EmptyAxis);
        }
        let expected: usize = axes.iter().product();
        if mass.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                got: mass.len(),
            });
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ProbError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProbError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        Ok(Self { axes, mass })
    }

    /// Builds a table without mass validation (shape is still checked).
    /// For staging data that will be reported through channel validation;
    /// the information operations assume validated mass.
    pub fn from_raw_unchecked(axes: Vec<usize>, mass: Vec<f64>) -> Self {
        let expected: usize = axes.iter().product();
        assert_eq!(mass.len(), expected, "mass length must match axis product");
        Self { axes, mass }
    }

    /// Builds a table by evaluating `f` at every multi-index.
    pub fn from_fn(
        axes: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self, ProbError> {
        if axes.is_empty() || axes.contains(&0) {
            return Err(ProbError::EmptyAxis);
        }
        let total: usize = axes.iter().product();
        let mut idx = vec![0usize; axes.len()];
        let mut mass = Vec::with_capacity(total);
        for _ in 0..total {
            mass.push(f(&idx));
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        Self::new(axes, mass)
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.axes.len());
        let mut flat = 0usize;
        for (d, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.axes[d]);
            flat = flat * self.axes[d] + i;
        }
        self.mass[flat]
    }

    /// Regroups axes: output axis `j` enumerates the product of the original
    /// axes listed in `groups[j]` (row-major within the group); original axes
    /// not listed anywhere are marginalized out.
    pub fn regroup(&self, groups: &[&[usize]]) -> Result<JointTable, ProbError> {
        if groups.is_empty() {
            return Err(ProbError::EmptyAxis);
        }
        for group in groups {
            for &axis in *group {
                if axis >= self.axes.len() {
                    return Err(ProbError::AxisOutOfRange {
                        axis,
                        axes: self.axes.len(),
                    });
                }
            }
        }
        let out_axes: Vec<usize> = groups
            .iter()
            .map(|g| g.iter().map(|&a| self.axes[a]).product())
            .collect();
        let out_total: usize = out_axes.iter().product();
        let mut out = vec![0.0; out_total];
        let n = self.axes.len();
        let mut idx = vec![0usize; n];
        for &m in &self.mass {
            if m != 0.0 {
                let mut flat = 0usize;
                for (j, group) in groups.iter().enumerate() {
                    let mut g = 0usize;
                    for &a in *group {
                        g = g * self.axes[a] + idx[a];
                    }
                    flat = flat * out_axes[j] + g;
                }
                out[flat] += m;
            }
            for d in (0..n).rev() {
                idx[d] += 1;
                if idx[d] < self.axes[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        JointTable::new(out_axes, out)
    }

    /// Marginal over the listed axes, in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointTable, ProbError> {
        let groups: Vec<&[usize]> = keep.iter().map(std::slice::from_ref).collect();
        self.regroup(&groups)
    }

    /// Marginal over a single axis, as a distribution.
    pub fn axis_dist(&self, axis: usize) -> Result<Dist, ProbError> {
        let m = self.marginal(&[axis])?;
        Dist::new(m.mass)
    }

    /// Joint Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.mass)
    }
}

/// Mutual information `I(A;B)` in bits of a two-axis joint table.
///
/// Tiny negative round-off (within [`NEG_INFO_TOL`]) is clamped to zero;
/// anything more negative is reported as an error.
pub fn mutual_information(j: &JointTable) -> Result<f64, ProbError> {
    if j.axes().len() != 2 {
        return Err(ProbError::AxisCount {
            expected: 2,
            got: j.axes().len(),
        });
    }
    let (na, nb) = (j.axes()[0], j.axes()[1]);
    let mut pa = vec![0.0; na];
    let mut pb = vec![0.0; nb];
    for a in 0..na {
        for b in 0..nb {
            let m = j.mass()[a * nb + b];
            pa[a] += m;
            pb[b] += m;
        }
    }
    let value = entropy_bits(&pa) + entropy_bits(&pb) - j.entropy();
    clamp_information(value)
}

/// Conditional mutual information `I(A;B|C)` in bits of a three-axis table,
/// computed as the `P(c)`-weighted average of the per-slice informations.
pub fn conditional_mi(j: &JointTable) -> Result<f64, ProbError> {
    if j.axes().len() != 3 {
        return Err(ProbError::AxisCount {
            expected: 3,
            got: j.axes().len(),
        });
    }
    let (na, nb, nc) = (j.axes()[0], j.axes()[1], j.axes()[2]);
    let mut total = 0.0;
    let mut pa = vec![0.0; na];
    let mut pb = vec![0.0; nb];
    for c in 0..nc {
        pa.iter_mut().for_each(|v| *v = 0.0);
        pb.iter_mut().for_each(|v| *v = 0.0);
        let mut pc = 0.0;
        for a in 0..na {
            for b in 0..nb {
                let m = j.mass()[(a * nb + b) * nc + c];
                pa[a] += m;
                pb[b] += m;
                pc += m;
            }
        }
        if pc <= 0.0 {
            continue;
        }
        let mut slice = 0.0;
        for a in 0..na {
            for b in 0..nb {
                let m = j.mass()[(a * nb + b) * nc + c];
                if m > 0.0 {
                    slice += m * (m * pc / (pa[a] * pb[b])).log2();
                }
            }
        }
        total += clamp_information(slice)?;
    }
    clamp_information(total)
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Number of points `simplex_grid(dim, k)` yields: `C(k + dim - 1, dim - 1)`.
pub fn simplex_grid_len(dim: usize, k: usize) -> Result<u128, ProbError> {
    assert!(dim >= 1 && k >= 1, "dim and k must be >= 1");
    let n = (k + dim - 1) as u128;
    binomial_u128(n, (dim - 1) as u128).ok_or(ProbError::EnumerationTooLarge {
        count: u128::MAX,
        cap: ENUMERATION_CAP,
    })
}

/// Enumerates every distribution over `dim` symbols whose weights are
/// multiples of `1/k`, without duplicates.
pub fn simplex_grid(dim: usize, k: usize) -> Result<Vec<Dist>, ProbError> {
    let count = simplex_grid_len(dim, k)?;
    if count > ENUMERATION_CAP {
        return Err(ProbError::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut counts = vec![0usize; dim];
    fill_compositions(k, 0, &mut counts, k, &mut out);
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn fill_compositions(k: usize, pos: usize, counts: &mut Vec<usize>, left: usize, out: &mut Vec<Dist>) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / k as f64).collect();
        out.push(Dist::new(weights).expect("grid point is a valid distribution"));
        return;
    }
    for take in (0..=left).rev() {
        counts[pos] = take;
        fill_compositions(k, pos + 1, counts, left - take, out);
    }
}

/// Deterministic seeded sampling of a strictly positive distribution
/// (a Dirichlet(1) draw with a tiny positivity floor).
pub fn sample_dist(dim: usize, seed: u64) -> Dist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_dist_with(dim, &mut rng)
}

/// As [`sample_dist`] but drawing from a caller-provided generator.
pub fn sample_dist_with(dim: usize, rng: &mut impl Rng) -> Dist {
    assert!(dim >= 1, "dimension must be >= 1");
    let raw: Vec<f64> = (0..dim)
        .map(|_| {
            let u: f64 = rng.gen();
            (-(1.0 - u).ln()).max(1e-12)
        })
        .collect();
    Dist::normalized(raw).expect("positive raw weights normalize")
}

/// Mixes a base seed with a stream of tags into a fresh sub-seed, so that
/// independent solver branches draw from disjoint deterministic streams.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut z = base ^ 0x9e37_79b9_7f4a_7c15;
    for &t in tags {
        z = z.wrapping_add(t).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_entropy(p: f64) -> f64 {
        -xlog2x(p) - xlog2x(1.0 - p)
    }

    #[test]
    fn entropy_uniform_binary_is_one_bit() {
        assert!((Dist::uniform(2).entropy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_point_mass_is_zero() {
        assert_eq!(Dist::point_mass(5, 2).entropy(), 0.0);
    }

    #[test]
    fn entropy_quarter_three_quarters() {
        // -0.25 log2 0.25 - 0.75 log2 0.75, evaluated by hand.
        let d = Dist::new(vec![0.25, 0.75]).unwrap();
        assert!((d.entropy() - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn construction_rejects_unnormalized_and_negative() {
        assert!(matches!(
            Dist::new(vec![0.5, 0.4]),
            Err(ProbError::NotNormalized { .. })
        ));
        assert!(matches!(
            Dist::new(vec![1.2, -0.2]),
            Err(ProbError::NegativeWeight { index: 1, .. })
        ));
        assert!(Dist::new(vec![]).is_err());
        // normalized() is the explicit rescaling path.
        let d = Dist::normalized(vec![2.0, 6.0]).unwrap();
        assert!((d.weights()[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_independent_uniforms_is_zero() {
        let j = JointTable::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert_eq!(mutual_information(&j).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_identity_coupling_four_symbols() {
        let j = JointTable::from_fn(vec![4, 4], |i| if i[0] == i[1] { 0.25 } else { 0.0 }).unwrap();
        assert!((mutual_information(&j).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_doubly_symmetric_binary() {
        // Uniform input through a symmetric flip with probability 0.11;
        // the analytic value 1 - h(0.11) is the oracle.
        let p = 0.11;
        let j = JointTable::new(
            vec![2, 2],
            vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0],
        )
        .unwrap();
        let expect = 1.0 - binary_entropy(p);
        assert!((mutual_information(&j).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_rejects_wrong_axis_count() {
        let j = JointTable::new(vec![2, 2, 1], vec![0.25; 4]).unwrap();
        assert_eq!(
            mutual_information(&j),
            Err(ProbError::AxisCount {
                expected: 2,
                got: 3
            })
        );
    }

    #[test]
    fn conditional_mi_irrelevant_conditioning() {
        // A = B uniform binary, C independent uniform: I(A;B|C) = 1 bit.
        let j = JointTable::from_fn(vec![2, 2, 2], |i| if i[0] == i[1] { 0.25 } else { 0.0 })
            .unwrap();
        assert!((conditional_mi(&j).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_mi_mutually_independent_is_zero() {
        let j = JointTable::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        assert_eq!(conditional_mi(&j).unwrap(), 0.0);
    }

    #[test]
    fn conditional_mi_chain_rule_on_seeded_tables() {
        // I(A;B,C) = I(A;C) + I(A;B|C), checking against mutual_information
        // on merged axes.
        for seed in 0..20 {
            let d = sample_dist(2 * 3 * 2, seed);
            let j = JointTable::new(vec![2, 3, 2], d.weights().to_vec()).unwrap();
            let lhs = mutual_information(&j.regroup(&[&[0], &[1, 2]]).unwrap()).unwrap();
            let rhs = mutual_information(&j.regroup(&[&[0], &[2]]).unwrap()).unwrap()
                + conditional_mi(&j).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn regroup_marginals_are_consistent() {
        let d = sample_dist(24, 9);
        let j = JointTable::new(vec![2, 3, 4], d.weights().to_vec()).unwrap();
        let m = j.marginal(&[1]).unwrap();
        assert_eq!(m.axes(), &[3]);
        let direct: f64 = j.mass().iter().sum();
        assert!((m.mass().iter().sum::<f64>() - direct).abs() < 1e-12);
        // order of kept axes is respected
        let swapped = j.marginal(&[2, 0]).unwrap();
        assert_eq!(swapped.axes(), &[4, 2]);
        assert!((swapped.value(&[1, 0]) - j.regroup(&[&[2], &[0]]).unwrap().value(&[1, 0])).abs() < 1e-15);
    }

    #[test]
    fn simplex_grid_small_cases() {
        let g = simplex_grid(2, 2).unwrap();
        assert_eq!(g.len(), 3);
        let pts: Vec<Vec<f64>> = g.iter().map(|d| d.weights().to_vec()).collect();
        assert!(pts.contains(&vec![1.0, 0.0]));
        assert!(pts.contains(&vec![0.5, 0.5]));
        assert!(pts.contains(&vec![0.0, 1.0]));

        assert_eq!(simplex_grid(3, 1).unwrap().len(), 3);
        // C(6, 2) = 15 by the closed form.
        assert_eq!(simplex_grid(3, 4).unwrap().len(), 15);
    }

    #[test]
    fn simplex_grid_overflow_is_an_error() {
        assert!(matches!(
            simplex_grid(30, 200),
            Err(ProbError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn sample_dist_contract() {
        let a = sample_dist(4, 7);
        let b = sample_dist(4, 7);
        assert_eq!(a, b);
        assert!(a.weights().iter().all(|&w| w > 0.0));
        assert!((a.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(sample_dist(1, 3).weights(), &[1.0]);
        assert_ne!(sample_dist(4, 7), sample_dist(4, 8));
    }
}
