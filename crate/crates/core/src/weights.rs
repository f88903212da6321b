//! Hilbert–Mumford weight calculus for block-embedded groups.
//!
//! The group is a product of general linear blocks, embedded block-
//! diagonally with multiplicities `ell` into a big `GL_R`, and `H` is the
//! preimage of `SL_R`. Points live in a direct sum of homogeneous
//! representations, one per block, carried here by their torus weights. A
//! one-parameter subgroup of `H` is an integer weight vector per block
//! subject to the null relation `sum ell_i * sum_j gamma^i_j = 0`.
//!
//! Sign convention, fixed once for the whole crate: for a 1-PS `gamma` and
//! a point with weight support `S`,
//!
//! ```text
//! mu(gamma, w) = -min { <m, gamma> : m in S }
//! ```
//!
//! and `w` is semistable when `mu >= 0` for every admissible `gamma`. With
//! this orientation the determinant part of a block 1-PS enters the SL/GL
//! split as its negative, which [`mu_pairing_block`] records as `delta_hat`
//! and verifies per block.

use crate::lp::{Problem, Rel, Solution};
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("block {index} has rank 0")]
    ZeroRankBlock { index: usize },
    #[error("block {index} has multiplicity 0")]
    ZeroMultiplicity { index: usize },
    #[error("representation degrees must be nonzero and share one sign (block {index})")]
    MixedDegreeSigns { index: usize },
    #[error("weight {weight:?} of block {index} has coordinate length {got}, rank is {rank}")]
    WeightLengthMismatch {
        index: usize,
        weight: Vec<i64>,
        got: usize,
        rank: usize,
    },
    #[error("weight {weight:?} of block {index} sums to {got}, declared degree is {degree}")]
    InhomogeneousWeight {
        index: usize,
        weight: Vec<i64>,
        got: i64,
        degree: i64,
    },
    #[error("the point is zero: every block support is empty")]
    AllBlocksZero,
    #[error("block support is empty")]
    EmptySupport,
    #[error("one-parameter subgroup has {got} blocks, group has {expected}")]
    BlockCountMismatch { got: usize, expected: usize },
    #[error("null relation violated: ell-weighted total weight is {value}")]
    NullRelationViolated { value: i64 },
}

/// Ranks, embedding multiplicities, and representation degrees per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGroupData {
    pub ranks: Vec<usize>,
    pub ells: Vec<i64>,
    pub degrees: Vec<i64>,
}

impl BlockGroupData {
    pub fn new(ranks: Vec<usize>, ells: Vec<i64>, degrees: Vec<i64>) -> Result<Self, WeightError> {
        assert_eq!(ranks.len(), ells.len());
        assert_eq!(ranks.len(), degrees.len());
        for (index, &r) in ranks.iter().enumerate() {
            if r == 0 {
                return Err(WeightError::ZeroRankBlock { index });
            }
        }
        for (index, &ell) in ells.iter().enumerate() {
            if ell <= 0 {
                return Err(WeightError::ZeroMultiplicity { index });
            }
        }
        let positive = degrees.iter().filter(|h| h.is_positive()).count();
        let negative = degrees.iter().filter(|h| h.is_negative()).count();
        if positive + negative != degrees.len() || (positive > 0 && negative > 0) {
            let index = degrees
                .iter()
                .position(|h| *h == 0 || (positive > 0 && h.is_negative()))
                .unwrap_or(0);
            return Err(WeightError::MixedDegreeSigns { index });
        }
        Ok(BlockGroupData {
            ranks,
            ells,
            degrees,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.ranks.len()
    }

    /// `R = sum ell_i * r_i`.
    pub fn embedded_rank(&self) -> i64 {
        self.ranks
            .iter()
            .zip(&self.ells)
            .map(|(&r, &l)| r as i64 * l)
            .sum()
    }
}

/// The torus weights carried by the nonzero coordinates of the point, per
/// block. An empty set means the block component of the point is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSupport {
    pub per_block: Vec<Vec<Vec<i64>>>,
}

impl WeightSupport {
    /// Validates coordinate lengths and the declared homogeneity: every
    /// weight of block `i` must sum to the block degree `h_i`.
    pub fn validate(&self, group: &BlockGroupData) -> Result<(), WeightError> {
        if self.per_block.len() != group.num_blocks() {
            return Err(WeightError::BlockCountMismatch {
                got: self.per_block.len(),
                expected: group.num_blocks(),
            });
        }
        for (index, weights) in self.per_block.iter().enumerate() {
            for weight in weights {
                if weight.len() != group.ranks[index] {
                    return Err(WeightError::WeightLengthMismatch {
                        index,
                        weight: weight.clone(),
                        got: weight.len(),
                        rank: group.ranks[index],
                    });
                }
                let total: i64 = weight.iter().sum();
                if total != group.degrees[index] {
                    return Err(WeightError::InhomogeneousWeight {
                        index,
                        weight: weight.clone(),
                        got: total,
                        degree: group.degrees[index],
                    });
                }
            }
        }
        if self.per_block.iter().all(|w| w.is_empty()) {
            return Err(WeightError::AllBlocksZero);
        }
        Ok(())
    }
}

/// A diagonal one-parameter subgroup of the block group: one integer weight
/// vector per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneParamData {
    pub per_block: Vec<Vec<i64>>,
}

impl OneParamData {
    pub fn block_weight_sum(&self, index: usize) -> i64 {
        self.per_block[index].iter().sum()
    }

    /// `sum ell_i * sum_j gamma^i_j`, which must vanish on `H`.
    pub fn ell_weighted_total(&self, group: &BlockGroupData) -> i64 {
        group
            .ells
            .iter()
            .zip(&self.per_block)
            .map(|(&ell, gamma)| ell * gamma.iter().sum::<i64>())
            .sum()
    }

    pub fn check_null_relation(&self, group: &BlockGroupData) -> Result<(), WeightError> {
        if self.per_block.len() != group.num_blocks() {
            return Err(WeightError::BlockCountMismatch {
                got: self.per_block.len(),
                expected: group.num_blocks(),
            });
        }
        let value = self.ell_weighted_total(group);
        if value != 0 {
            return Err(WeightError::NullRelationViolated { value });
        }
        Ok(())
    }
}

/// Per-block pairing data reported by [`mu_pairing_block`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPairing<S> {
    /// `mu_i = -min <m, gamma^i>`; `None` when the block support is empty.
    pub mu: Option<i64>,
    /// Determinant part `delta_i = (sum_j gamma^i_j) / r_i`.
    pub delta: S,
    /// The convention-adjusted determinant coefficient, `-delta_i`.
    pub delta_hat: S,
    /// `mu` of the trace-free part `gamma - delta * (1,..,1)`.
    pub mu_tilde: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuPairing<S> {
    /// `max { mu_i : block support nonempty }`.
    pub mu: i64,
    pub per_block: Vec<BlockPairing<S>>,
}

/// Evaluates the Hilbert–Mumford pairing blockwise and as the maximum over
/// the nonzero blocks, together with the SL/GL split of every block: the
/// identity `mu_i(gamma) = mu_i(gamma_tilde) + h_i * delta_hat_i` holds for
/// each block and is asserted.
pub fn mu_pairing_block<S: Scalar>(
    group: &BlockGroupData,
    ops: &OneParamData,
    support: &WeightSupport,
) -> Result<MuPairing<S>, WeightError> {
    support.validate(group)?;
    ops.check_null_relation(group)?;
    let mut per_block = Vec::with_capacity(group.num_blocks());
    let mut mu_max: Option<i64> = None;
    for (index, weights) in support.per_block.iter().enumerate() {
        let gamma = &ops.per_block[index];
        let rank = group.ranks[index] as i64;
        let delta = S::ratio(gamma.iter().sum::<i64>(), rank);
        let delta_hat = -delta.clone();
        let mu = (!weights.is_empty()).then(|| {
            -weights
                .iter()
                .map(|m| pair(m, gamma))
                .min()
                .expect("nonempty support")
        });
        let mu_tilde = mu.map(|mu_int| {
            // <m, gamma - delta*1> = <m, gamma> - delta*h_i, so the minimum
            // shifts as a whole.
            let shifted = S::from_int(mu_int) + delta.clone() * S::from_int(group.degrees[index]);
            let identity = S::from_int(mu_int)
                == shifted.clone() + S::from_int(group.degrees[index]) * delta_hat.clone();
            assert!(identity, "SL/GL split identity must hold per block");
            shifted
        });
        if let Some(mu_int) = mu {
            mu_max = Some(mu_max.map_or(mu_int, |current| current.max(mu_int)));
        }
        per_block.push(BlockPairing {
            mu,
            delta,
            delta_hat,
            mu_tilde,
        });
    }
    let mu = mu_max.ok_or(WeightError::AllBlocksZero)?;
    Ok(MuPairing { mu, per_block })
}

fn pair(m: &[i64], gamma: &[i64]) -> i64 {
    m.iter().zip(gamma).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusGroup {
    /// Trace-free 1-PS only.
    Sl,
    /// Arbitrary diagonal 1-PS.
    Gl,
}

/// Semistability of one block for its diagonal torus: no `gamma` (trace-free
/// for SL) makes every pairing strictly positive. Decided by an exact LP:
/// maximize the minimum pairing over the box `[-1, 1]`; the point is
/// semistable exactly when that maximum is nonpositive. Equivalently, `0`
/// lies in the convex hull of the support translated by the diagonal line
/// (for SL) or on the nose (for GL).
pub fn torus_semistable<S: Scalar>(
    rank: usize,
    support: &[Vec<i64>],
    group: TorusGroup,
) -> Result<bool, WeightError> {
    if support.is_empty() {
        return Err(WeightError::EmptySupport);
    }
    // Variables: gamma_1..gamma_rank (free), tau.
    let n = rank + 1;
    let mut p = Problem::<S>::new(n);
    for j in 0..rank {
        p.free(j);
    }
    let mut objective = vec![S::zero(); n];
    objective[rank] = S::one();
    p.maximize(objective);
    for m in support {
        // <m, gamma> - tau >= 0
        let mut row: Vec<S> = m.iter().map(|&v| S::from_int(v)).collect();
        row.push(-S::one());
        p.constrain(row, Rel::Ge, S::zero());
    }
    if group == TorusGroup::Sl {
        let mut row = vec![S::one(); n];
        row[rank] = S::zero();
        p.constrain(row, Rel::Eq, S::zero());
    }
    for j in 0..rank {
        let mut row = vec![S::zero(); n];
        row[j] = S::one();
        p.constrain(row.clone(), Rel::Le, S::one());
        row[j] = -S::one();
        p.constrain(row, Rel::Le, S::one());
    }
    match p.solve_max() {
        Solution::Optimal { value, .. } => Ok(!value.is_positive()),
        Solution::Unbounded => unreachable!("box-bounded objective"),
        Solution::Infeasible => unreachable!("gamma = 0 is feasible"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStatus {
    pub nonzero: bool,
    /// Componentwise SL-semistability; `None` for a zero block.
    pub sl_semistable: Option<bool>,
}

/// Outcome of the equivalence check between `H`-semistability and the
/// componentwise criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLemmaReport {
    /// Whether the two decisions agree.
    pub equivalence_holds: bool,
    /// `H`-semistability by exact LP over diagonal 1-PS.
    pub lp_semistable: bool,
    /// Every block nonzero and SL-semistable.
    pub componentwise_semistable: bool,
    pub blocks: Vec<BlockStatus>,
    /// A destabilizing 1-PS when one exists: from the explicit proof-side
    /// construction if the componentwise criterion fails, otherwise scaled
    /// from the LP certificate.
    pub destabilizer: Option<OneParamData>,
    /// 1-PS visited by the advisory box enumeration.
    pub enumerated: u64,
    /// Destabilizer found by the box enumeration, when any.
    pub enumerated_destabilizer: Option<OneParamData>,
    /// Set when the box enumeration was inconclusive although the LP found
    /// a destabilizer; the LP is authoritative.
    pub bound_warning: bool,
}

/// Checks, for one point, that `H`-semistability is equivalent to every
/// block being nonzero and componentwise SL-semistable. The left side is
/// decided by an exact LP over diagonal 1-PS and cross-checked against an
/// exhaustive enumeration of integer 1-PS in `[-bound, bound]` satisfying
/// the null relation.
pub fn verify_block_lemma<S: Scalar>(
    group: &BlockGroupData,
    support: &WeightSupport,
    bound: i64,
) -> Result<BlockLemmaReport, WeightError> {
    support.validate(group)?;
    assert!(bound >= 0);

    let blocks: Vec<BlockStatus> = support
        .per_block
        .iter()
        .enumerate()
        .map(|(i, weights)| {
            let nonzero = !weights.is_empty();
            let sl_semistable = nonzero
                .then(|| torus_semistable::<S>(group.ranks[i], weights, TorusGroup::Sl))
                .transpose()?;
            Ok(BlockStatus {
                nonzero,
                sl_semistable,
            })
        })
        .collect::<Result<_, WeightError>>()?;
    let componentwise_semistable = blocks
        .iter()
        .all(|b| b.nonzero && b.sl_semistable == Some(true));

    let lp_destabilizer = h_destabilizer_lp::<S>(group, support);
    let lp_semistable = lp_destabilizer.is_none();

    let destabilizer = if componentwise_semistable {
        lp_destabilizer.clone()
    } else {
        Some(proof_destabilizer::<S>(group, support, &blocks))
    };
    if let Some(candidate) = &destabilizer {
        let mu =
            mu_pairing_block::<S>(group, candidate, support).expect("destabilizer is a valid 1-PS");
        assert!(mu.mu < 0, "constructed destabilizer must destabilize");
    }

    let (enumerated, enumerated_destabilizer) = enumerate_box(group, support, bound);
    let bound_warning = !lp_semistable && enumerated_destabilizer.is_none();

    Ok(BlockLemmaReport {
        equivalence_holds: lp_semistable == componentwise_semistable,
        lp_semistable,
        componentwise_semistable,
        blocks,
        destabilizer,
        enumerated,
        enumerated_destabilizer,
        bound_warning,
    })
}

/// Searches for a diagonal `H`-1-PS with `mu < 0` by LP: all pairings of
/// all nonzero blocks strictly positive under the null relation. Returns a
/// scaled-to-integer destabilizer when one exists.
fn h_destabilizer_lp<S: Scalar>(
    group: &BlockGroupData,
    support: &WeightSupport,
) -> Option<OneParamData> {
    let t = group.num_blocks();
    let dims: Vec<usize> = group.ranks.clone();
    let total: usize = dims.iter().sum();
    // Variables: all gamma coordinates (free), then tau.
    let n = total + 1;
    let mut p = Problem::<S>::new(n);
    for j in 0..total {
        p.free(j);
    }
    let mut objective = vec![S::zero(); n];
    objective[total] = S::one();
    p.maximize(objective);

    let offsets: Vec<usize> = dims
        .iter()
        .scan(0usize, |acc, &d| {
            let here = *acc;
            *acc += d;
            Some(here)
        })
        .collect();
    for (i, weights) in support.per_block.iter().enumerate() {
        for m in weights {
            let mut row = vec![S::zero(); n];
            for (j, &coeff) in m.iter().enumerate() {
                row[offsets[i] + j] = S::from_int(coeff);
            }
            row[total] = -S::one();
            p.constrain(row, Rel::Ge, S::zero());
        }
    }
    // Null relation.
    let mut null_row = vec![S::zero(); n];
    for i in 0..t {
        for j in 0..dims[i] {
            null_row[offsets[i] + j] = S::from_int(group.ells[i]);
        }
    }
    p.constrain(null_row, Rel::Eq, S::zero());
    // Box to make the homogeneous problem bounded.
    for j in 0..total {
        let mut row = vec![S::zero(); n];
        row[j] = S::one();
        p.constrain(row.clone(), Rel::Le, S::one());
        row[j] = -S::one();
        p.constrain(row, Rel::Le, S::one());
    }

    let (value, point) = p.solve_max().optimal()?;
    if !value.is_positive() {
        return None;
    }
    let gamma = integerize::<S>(&point[..total]);
    let per_block = offsets
        .iter()
        .zip(&dims)
        .map(|(&o, &d)| gamma[o..o + d].to_vec())
        .collect();
    Some(OneParamData { per_block })
}

/// Clears denominators of a rational vector, preserving direction.
fn integerize<S: Scalar>(point: &[S]) -> Vec<i64> {
    // Denominators are tiny here; scan for the least common multiple by
    // trial scaling.
    let mut scale = 1i64;
    'outer: loop {
        for v in point {
            let scaled = v.clone() * S::from_int(scale);
            if scaled.clone() - round_to_int(&scaled) != S::zero() {
                scale += 1;
                assert!(
                    scale < 1_000_000,
                    "unexpectedly large denominator in LP vertex"
                );
                continue 'outer;
            }
        }
        break;
    }
    point
        .iter()
        .map(|v| {
            let scaled = v.clone() * S::from_int(scale);
            int_value(&scaled)
        })
        .collect()
}

fn round_to_int<S: Scalar>(v: &S) -> S {
    S::from_int(int_value(v))
}

fn int_value<S: Scalar>(v: &S) -> i64 {
    // Binary search the integer value of a scalar known to be integral and
    // small; avoids demanding a numerator accessor on the trait.
    let (mut lo, mut hi) = (-1_000_000_000i64, 1_000_000_000i64);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if S::from_int(mid) < *v {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The proof-side destabilizer when the componentwise criterion fails: a
/// zero block takes weight `-sum of the other multiplicities` against `+ell`
/// on the nonzero blocks (all scalar); an SL-unstable block additionally
/// carries a large multiple of its own SL destabilizer.
fn proof_destabilizer<S: Scalar>(
    group: &BlockGroupData,
    support: &WeightSupport,
    blocks: &[BlockStatus],
) -> OneParamData {
    let t = group.num_blocks();
    let sign = if group.degrees[0] > 0 { 1 } else { -1 };
    // A scalar weight delta_i on block i contributes ell_i * r_i * delta_i
    // to the embedded determinant.
    let det_load = |i: usize| group.ells[i] * group.ranks[i] as i64;
    if let Some(zero) = blocks.iter().position(|b| !b.nonzero) {
        // Scalar weights: positive on the nonzero blocks, compensating on
        // the zero block, signed so every nonzero block pairs negatively.
        let mut deltas = vec![0i64; t];
        let mut absorbed = 0i64;
        for i in 0..t {
            if i != zero && blocks[i].nonzero {
                deltas[i] = sign * det_load(zero);
                absorbed += det_load(i) * deltas[i];
            }
        }
        deltas[zero] = -absorbed / det_load(zero);
        debug_assert_eq!((0..t).map(|i| det_load(i) * deltas[i]).sum::<i64>(), 0);
        let per_block = (0..t).map(|i| vec![deltas[i]; group.ranks[i]]).collect();
        return OneParamData { per_block };
    }

    // Some block is SL-unstable: spread small determinant twists over the
    // other blocks and overpower the twist on the unstable one with a large
    // multiple of its SL destabilizer.
    let unstable = blocks
        .iter()
        .position(|b| b.sl_semistable == Some(false))
        .expect("componentwise failure without zero block has an unstable block");
    let tilde = sl_destabilizer::<S>(group.ranks[unstable], &support.per_block[unstable])
        .expect("SL-unstable block has an integral destabilizer");
    let mut deltas = vec![0i64; t];
    let mut absorbed = 0i64;
    for (i, delta) in deltas.iter_mut().enumerate() {
        if i != unstable {
            *delta = sign * det_load(unstable);
            absorbed += det_load(i) * *delta;
        }
    }
    deltas[unstable] = -absorbed / det_load(unstable);
    // mu of the unstable block under s*tilde + delta*1 is
    // s*mu(tilde) - h*delta; mu(tilde) < 0, so a large s wins.
    let mu_tilde = -support.per_block[unstable]
        .iter()
        .map(|m| pair(m, &tilde))
        .min()
        .expect("unstable block is nonzero");
    debug_assert!(mu_tilde < 0);
    let h = group.degrees[unstable];
    let drift = h * deltas[unstable];
    // mu_u = s*mu_tilde - drift < 0 needs s > drift/mu_tilde.
    let s = (drift / mu_tilde).max(0) + 1;
    let per_block = (0..t)
        .map(|i| {
            if i == unstable {
                tilde.iter().map(|&g| s * g + deltas[i]).collect()
            } else {
                vec![deltas[i]; group.ranks[i]]
            }
        })
        .collect();
    OneParamData { per_block }
}

/// An integral trace-free destabilizer of a single block, from the SL
/// feasibility LP.
fn sl_destabilizer<S: Scalar>(rank: usize, support: &[Vec<i64>]) -> Option<Vec<i64>> {
    let n = rank + 1;
    let mut p = Problem::<S>::new(n);
    for j in 0..rank {
        p.free(j);
    }
    let mut objective = vec![S::zero(); n];
    objective[rank] = S::one();
    p.maximize(objective);
    for m in support {
        let mut row: Vec<S> = m.iter().map(|&v| S::from_int(v)).collect();
        row.push(-S::one());
        p.constrain(row, Rel::Ge, S::zero());
    }
    let mut trace = vec![S::one(); n];
    trace[rank] = S::zero();
    p.constrain(trace, Rel::Eq, S::zero());
    for j in 0..rank {
        let mut row = vec![S::zero(); n];
        row[j] = S::one();
        p.constrain(row.clone(), Rel::Le, S::one());
        row[j] = -S::one();
        p.constrain(row, Rel::Le, S::one());
    }
    let (value, point) = p.solve_max().optimal()?;
    value.is_positive().then(|| integerize::<S>(&point[..rank]))
}

/// Advisory exhaustive check over the integer box. Returns the number of
/// null-relation 1-PS visited and the first destabilizer found in scan
/// order.
fn enumerate_box(
    group: &BlockGroupData,
    support: &WeightSupport,
    bound: i64,
) -> (u64, Option<OneParamData>) {
    let total: usize = group.ranks.iter().sum();
    let mut flat = vec![-bound; total];
    let mut visited = 0u64;
    let mut found: Option<OneParamData> = None;
    let offsets: Vec<usize> = group
        .ranks
        .iter()
        .scan(0usize, |acc, &d| {
            let here = *acc;
            *acc += d;
            Some(here)
        })
        .collect();
    loop {
        let null: i64 = (0..group.num_blocks())
            .map(|i| {
                group.ells[i]
                    * flat[offsets[i]..offsets[i] + group.ranks[i]]
                        .iter()
                        .sum::<i64>()
            })
            .sum();
        if null == 0 {
            visited += 1;
            if found.is_none() {
                let mu = (0..group.num_blocks())
                    .filter(|&i| !support.per_block[i].is_empty())
                    .map(|i| {
                        let gamma = &flat[offsets[i]..offsets[i] + group.ranks[i]];
                        -support.per_block[i]
                            .iter()
                            .map(|m| pair(m, gamma))
                            .min()
                            .expect("nonempty support")
                    })
                    .max();
                if let Some(mu) = mu {
                    if mu < 0 {
                        found = Some(OneParamData {
                            per_block: (0..group.num_blocks())
                                .map(|i| flat[offsets[i]..offsets[i] + group.ranks[i]].to_vec())
                                .collect(),
                        });
                    }
                }
            }
        }
        // Odometer step.
        let mut pos = 0;
        loop {
            if pos == total {
                return (visited, found);
            }
            if flat[pos] < bound {
                flat[pos] += 1;
                break;
            }
            flat[pos] = -bound;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::Q;

    fn group(ranks: &[usize], ells: &[i64], degrees: &[i64]) -> BlockGroupData {
        BlockGroupData::new(ranks.to_vec(), ells.to_vec(), degrees.to_vec()).unwrap()
    }

    #[test]
    fn mu_pairing_examples() {
        let g = group(&[2], &[1], &[2]);
        let w = WeightSupport {
            per_block: vec![vec![vec![1, 1]]],
        };
        let ops = OneParamData {
            per_block: vec![vec![1, -1]],
        };
        let report = mu_pairing_block::<Q>(&g, &ops, &w).unwrap();
        assert_eq!(report.mu, 0);

        let w = WeightSupport {
            per_block: vec![vec![vec![2, 0]]],
        };
        let report = mu_pairing_block::<Q>(&g, &ops, &w).unwrap();
        assert_eq!(report.mu, -2);
    }

    #[test]
    fn mu_pairing_skips_zero_blocks() {
        let g = group(&[1, 1], &[1, 1], &[1, 1]);
        let w = WeightSupport {
            per_block: vec![vec![vec![1]], vec![]],
        };
        let ops = OneParamData {
            per_block: vec![vec![-1], vec![1]],
        };
        let report = mu_pairing_block::<Q>(&g, &ops, &w).unwrap();
        assert_eq!(report.mu, 1);
        assert_eq!(report.per_block[1].mu, None);
    }

    #[test]
    fn mu_pairing_split_parts() {
        let g = group(&[2], &[1], &[2]);
        let w = WeightSupport {
            per_block: vec![vec![vec![2, 0], vec![0, 2]]],
        };
        let ops = OneParamData {
            per_block: vec![vec![3, 1]],
        };
        // Null relation: single block, sum 4 != 0 -> not an H 1-PS.
        assert!(matches!(
            mu_pairing_block::<Q>(&g, &ops, &w),
            Err(WeightError::NullRelationViolated { value: 4 })
        ));
        // Two blocks cancelling.
        let g = group(&[2, 1], &[1, 1], &[2, 1]);
        let w = WeightSupport {
            per_block: vec![vec![vec![2, 0], vec![0, 2]], vec![vec![1]]],
        };
        let ops = OneParamData {
            per_block: vec![vec![3, 1], vec![-4]],
        };
        let report = mu_pairing_block::<Q>(&g, &ops, &w).unwrap();
        // Block 1: min(<(2,0)>, <(0,2)>) = min(6, 2) = 2 -> mu = -2.
        // Block 2: -(1 * -4) = 4. Max = 4.
        assert_eq!(report.mu, 4);
        assert_eq!(report.per_block[0].delta, Q::from_int(2));
        assert_eq!(report.per_block[0].delta_hat, Q::from_int(-2));
        // mu_tilde = mu + delta * h = -2 + 2*2 = 2.
        assert_eq!(report.per_block[0].mu_tilde, Some(Q::from_int(2)));
    }

    #[test]
    fn homogeneity_is_validated() {
        let g = group(&[2], &[1], &[2]);
        let w = WeightSupport {
            per_block: vec![vec![vec![1, 0]]],
        };
        assert!(matches!(
            w.validate(&g),
            Err(WeightError::InhomogeneousWeight { .. })
        ));
    }

    #[test]
    fn torus_examples() {
        // Balanced pair: semistable under SL.
        assert!(torus_semistable::<Q>(2, &[vec![1, -1], vec![-1, 1]], TorusGroup::Sl).unwrap());
        // A single extreme weight is destabilized by (1, -1).
        assert!(!torus_semistable::<Q>(2, &[vec![2, 0]], TorusGroup::Sl).unwrap());
        // SL_1 is trivial.
        assert!(torus_semistable::<Q>(1, &[vec![5]], TorusGroup::Sl).unwrap());
        // Under GL the determinant direction destabilizes anything with all
        // pairings of one sign.
        assert!(!torus_semistable::<Q>(2, &[vec![1, 1]], TorusGroup::Gl).unwrap());
        assert!(matches!(
            torus_semistable::<Q>(2, &[], TorusGroup::Sl),
            Err(WeightError::EmptySupport)
        ));
    }

    #[test]
    fn block_lemma_balanced_blocks() {
        let g = group(&[1, 1], &[1, 1], &[1, 1]);
        let w = WeightSupport {
            per_block: vec![vec![vec![1]], vec![vec![1]]],
        };
        let report = verify_block_lemma::<Q>(&g, &w, 2).unwrap();
        assert!(report.equivalence_holds);
        assert!(report.lp_semistable);
        assert!(report.componentwise_semistable);
        assert!(report.destabilizer.is_none());
        assert!(!report.bound_warning);
    }

    #[test]
    fn block_lemma_zero_block_destabilizes() {
        let g = group(&[1, 1], &[1, 1], &[1, 1]);
        let w = WeightSupport {
            per_block: vec![vec![vec![1]], vec![]],
        };
        let report = verify_block_lemma::<Q>(&g, &w, 2).unwrap();
        assert!(report.equivalence_holds);
        assert!(!report.lp_semistable);
        assert!(!report.componentwise_semistable);
        let destab = report.destabilizer.unwrap();
        // Pattern (ell_2, -ell_1) with the positive entry on the nonzero
        // block.
        assert_eq!(destab.per_block, vec![vec![1], vec![-1]]);
        assert!(report.enumerated_destabilizer.is_some());
    }

    #[test]
    fn block_lemma_unstable_block_destabilizes() {
        let g = group(&[2, 1], &[1, 2], &[2, 2]);
        let w = WeightSupport {
            per_block: vec![vec![vec![2, 0]], vec![vec![2]]],
        };
        let report = verify_block_lemma::<Q>(&g, &w, 2).unwrap();
        assert!(report.equivalence_holds);
        assert!(!report.lp_semistable);
        assert!(!report.componentwise_semistable);
        assert!(report.destabilizer.is_some());
    }

    #[test]
    fn block_lemma_single_block() {
        let g = group(&[2], &[3], &[2]);
        let w = WeightSupport {
            per_block: vec![vec![vec![1, 1]]],
        };
        let report = verify_block_lemma::<Q>(&g, &w, 2).unwrap();
        assert!(report.equivalence_holds);
        assert!(report.lp_semistable);
    }

    #[test]
    fn negative_degrees_supported() {
        let g = group(&[1, 1], &[1, 1], &[-1, -1]);
        let w = WeightSupport {
            per_block: vec![vec![vec![-1]], vec![]],
        };
        let report = verify_block_lemma::<Q>(&g, &w, 2).unwrap();
        assert!(report.equivalence_holds);
        assert!(!report.lp_semistable);
        let destab = report.destabilizer.unwrap();
        let mu = mu_pairing_block::<Q>(&g, &destab, &w).unwrap();
        assert!(mu.mu < 0);
    }

    #[test]
    fn mixed_degree_signs_rejected() {
        assert!(BlockGroupData::new(vec![1, 1], vec![1, 1], vec![1, -1]).is_err());
        assert!(BlockGroupData::new(vec![1], vec![1], vec![0]).is_err());
    }
}
