//! The boundedness pipeline: piecewise-linear functions on simplicial cones
//! and the constant chain `D, K0, K1, B, K, delta_infinity`.
//!
//! For a fixed total rank `alpha` and tensor arity `a`, every weighted
//! filtration determines a rank tuple `r_1 < ... < r_{s+1} = alpha` and an
//! upward-closed support pattern `P`, and its `mu` is the value of the
//! piecewise-linear function `Phi(r, P)` at the Gamma vector inside the
//! cone spanned by the standard generators. There are finitely many such
//! functions; the minimum of `Phi` on the unit sphere of its cone, over all
//! functions that are positive on their cone, is the constant `K0` driving
//! every later bound. All norms are carried squared so the entire chain
//! stays rational.

use crate::filtration::TensorSupport;
use crate::invariant::KappaVector;
use crate::lp::{self, Problem, Rel, Solution};
use crate::model::CurveData;
use crate::scalar::{sqrt_upper, Rational, Scalar};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("{pairs} cone functions exceed the ceiling {ceiling}")]
    CombinatorialExplosion { pairs: u64, ceiling: u64 },
    #[error("the trivial rank tuple spans no cone")]
    DegenerateCone,
    #[error("no cone function is positive on its cone")]
    NoPositiveConeFunction,
    #[error("rank and curve data disagree: {0}")]
    BadPipelineInput(String),
    #[error("vertex enumeration too large: {0}")]
    VertexEnumeration(#[from] lp::TooManyBases),
}

/// A rank tuple together with an upward-closed support pattern: the
/// combinatorial datum of one piecewise-linear function `Phi(r, P)` on the
/// cone spanned by `Gamma^(r_1) .. Gamma^(r_s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeFunction {
    pub alpha: i64,
    pub arity: usize,
    /// `r_1 < ... < r_{s+1} = alpha`.
    pub ranks: Vec<i64>,
    pub support: TensorSupport,
}

impl ConeFunction {
    /// Number of proper steps spanned by the cone.
    pub fn s(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Gram matrix of the generators: `<Gamma^(i), Gamma^(j)> =
    /// alpha * i * (alpha - j)` for `i <= j`.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let s = self.s();
        (0..s)
            .map(|k| {
                (0..s)
                    .map(|l| {
                        let (i, j) = if self.ranks[k] <= self.ranks[l] {
                            (self.ranks[k], self.ranks[l])
                        } else {
                            (self.ranks[l], self.ranks[k])
                        };
                        self.alpha * i * (self.alpha - j)
                    })
                    .collect()
            })
            .collect()
    }

    /// The linear pieces of `Phi` in generator coordinates, one row per
    /// minimal support tuple: `Phi(sum x_k Gamma^(r_k)) = max over rows of
    /// row . x`.
    pub fn pieces(&self) -> Vec<Vec<i64>> {
        let s = self.s();
        self.support
            .minimal_tuples()
            .into_iter()
            .map(|tuple| {
                let mut row = vec![0i64; s];
                for &level in &tuple {
                    // Coefficient of x_k in v_{r_level}: r_k - alpha when
                    // r_level <= r_k, else r_k; negated for Phi.
                    for (k, slot) in row.iter_mut().enumerate() {
                        let coeff = if self.ranks[level - 1] <= self.ranks[k] {
                            self.ranks[k] - self.alpha
                        } else {
                            self.ranks[k]
                        };
                        *slot -= coeff;
                    }
                }
                row
            })
            .collect()
    }
}

/// Enumerates every `(rank tuple, upward-closed support)` pair for the
/// given total rank and arity. Supports are kept as sorted tuples; `Phi`
/// only sees sums of coordinates, so permutations of a tuple are the same
/// function. Refuses to enumerate past `ceiling` pairs.
pub fn enumerate_cone_functions(
    alpha: i64,
    arity: usize,
    ceiling: u64,
) -> Result<Vec<ConeFunction>, ConeError> {
    assert!(alpha >= 1 && arity >= 1);
    if alpha > 20 {
        return Err(ConeError::CombinatorialExplosion {
            pairs: u64::MAX,
            ceiling,
        });
    }
    let mut out = Vec::new();
    let mut count = 0u64;
    // Rank tuples: nonempty subsets of 1..alpha, terminated by alpha.
    for mask in 0u32..(1u32 << (alpha - 1)) {
        let mut ranks: Vec<i64> = (1..alpha).filter(|&r| mask & (1 << (r - 1)) != 0).collect();
        ranks.push(alpha);
        let levels = ranks.len();
        for support in upward_closed_supports(arity, levels) {
            count += 1;
            if count > ceiling {
                return Err(ConeError::CombinatorialExplosion {
                    pairs: count,
                    ceiling,
                });
            }
            let support = TensorSupport::new(arity, levels, support)
                .expect("enumerated supports are upward closed");
            out.push(ConeFunction {
                alpha,
                arity,
                ranks: ranks.clone(),
                support,
            });
        }
    }
    Ok(out)
}

/// All sorted `arity`-tuples over `1..=levels`, in lexicographic order.
fn sorted_tuples(arity: usize, levels: usize) -> Vec<Vec<usize>> {
    fn fill(arity: usize, levels: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == arity {
            out.push(prefix.clone());
            return;
        }
        let lo = prefix.last().copied().unwrap_or(1);
        for i in lo..=levels {
            prefix.push(i);
            fill(arity, levels, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(arity, levels, &mut Vec::new(), &mut out);
    out
}

/// All nonempty upward-closed sets of sorted `arity`-tuples over
/// `1..=levels`. Membership is decided tuple by tuple in reverse
/// lexicographic order; a tuple may enter only when all its +1-increment
/// covers (lexicographically larger, hence already decided) are in.
fn upward_closed_supports(arity: usize, levels: usize) -> Vec<Vec<Vec<usize>>> {
    let tuples = sorted_tuples(arity, levels);
    let mut results = Vec::new();
    let mut chosen: Vec<bool> = vec![false; tuples.len()];
    enumerate_closed(&tuples, levels, 0, &mut chosen, &mut results);
    results
}

fn enumerate_closed(
    tuples: &[Vec<usize>],
    levels: usize,
    index: usize,
    chosen: &mut Vec<bool>,
    results: &mut Vec<Vec<Vec<usize>>>,
) {
    if index == tuples.len() {
        let set: Vec<Vec<usize>> = tuples
            .iter()
            .zip(chosen.iter())
            .filter(|(_, &c)| c)
            .map(|(t, _)| t.clone())
            .collect();
        if !set.is_empty() {
            results.push(set);
        }
        return;
    }
    let position = tuples.len() - 1 - index;
    let tuple = &tuples[position];
    // Option 1: exclude.
    chosen[position] = false;
    enumerate_closed(tuples, levels, index + 1, chosen, results);
    // Option 2: include, allowed only when every +1 cover is included.
    let mut closed = true;
    for k in 0..tuple.len() {
        if tuple[k] < levels {
            let mut up = tuple.clone();
            up[k] += 1;
            up.sort_unstable();
            let pos = tuples.binary_search(&up).expect("cover is enumerated");
            if !chosen[pos] {
                closed = false;
                break;
            }
        }
    }
    if closed {
        chosen[position] = true;
        enumerate_closed(tuples, levels, index + 1, chosen, results);
        chosen[position] = false;
    }
}

/// `K0^2` of one cone function: the squared minimum of `Phi` on the unit
/// sphere of its cone, computed exactly as `1 / max { |v|^2 : v in cone,
/// Phi(v) <= 1 }` by vertex enumeration in generator coordinates. Returns
/// `None` when `Phi` is nonpositive somewhere on the cone (detected by a
/// recession LP), in which case the function does not constrain `K0`.
pub fn k0_compute<S: Scalar>(cf: &ConeFunction) -> Result<Option<S>, ConeError> {
    let s = cf.s();
    if s == 0 {
        return Err(ConeError::DegenerateCone);
    }
    let pieces = cf.pieces();

    // Recession check: maximize sum x on {x >= 0, pieces . x <= 0,
    // sum x <= 1}; a positive optimum is a ray with Phi <= 0.
    let mut p = Problem::<S>::new(s);
    p.maximize(vec![S::one(); s]);
    for piece in &pieces {
        p.constrain(
            piece.iter().map(|&c| S::from_int(c)).collect(),
            Rel::Le,
            S::zero(),
        );
    }
    p.constrain(vec![S::one(); s], Rel::Le, S::one());
    match p.solve_max() {
        Solution::Optimal { value, .. } => {
            if value.is_positive() {
                return Ok(None);
            }
        }
        _ => unreachable!("recession polytope contains 0 and is bounded"),
    }

    // Vertices of {x >= 0 : pieces . x <= 1}; bounded since the recession
    // cone is trivial.
    let mut ineqs: Vec<(Vec<S>, S)> = Vec::new();
    for j in 0..s {
        let mut row = vec![S::zero(); s];
        row[j] = -S::one();
        ineqs.push((row, S::zero()));
    }
    for piece in &pieces {
        ineqs.push((piece.iter().map(|&c| S::from_int(c)).collect(), S::one()));
    }
    let vertices = lp::vertices(&ineqs, &[], 1 << 22)?;
    let gram = cf.gram();
    let mut best: Option<S> = None;
    for x in &vertices {
        let mut norm_sq = S::zero();
        for k in 0..s {
            for l in 0..s {
                norm_sq = norm_sq + x[k].clone() * x[l].clone() * S::from_int(gram[k][l]);
            }
        }
        best = Some(match best {
            Some(current) => current.max(norm_sq),
            None => norm_sq,
        });
    }
    let max_norm_sq = best.expect("the polytope contains the origin");
    assert!(
        max_norm_sq.is_positive(),
        "Phi positive on the cone forces a nonzero optimum",
    );
    Ok(Some(S::one() / max_norm_sq))
}

/// The exact constant chain for fixed `(r, chi, kappa, t, curve, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsRecord<S> {
    pub alpha: i64,
    pub arity: usize,
    /// Window width `D = r * sum(ell) * sum(kappa_j t_j)`.
    pub d: S,
    /// Squared minimum of `Phi` over the unit spheres of all positive cones.
    pub k0_squared: S,
    /// `K1 = a * (chi + D + 1)`.
    pub k1: S,
    /// `B^2 = alpha * K1^2 / K0^2`.
    pub b_squared: S,
    /// Rational upper bound for `B` (squared comparisons stay exact; this
    /// enters only the derived slope constants).
    pub b_upper: S,
    /// Upper bound for the parabolic maximal slope: `chi_kappa/alpha + B`.
    pub kappa_slope_bound: S,
    /// Upper bound for the plain maximal slope: kappa bound + `D`.
    pub slope_bound: S,
    /// `K = max_i (ell_i * slope_bound - 1 + g_i)`: the subbundle slope
    /// bound of the boundedness theorem.
    pub k: S,
    /// Stability threshold from the per-shape LPs.
    pub delta_lp: S,
    /// Closed-form cap `alpha^2 (|chi| + alpha (slope_bound + D))`.
    pub delta_cap: S,
    /// `max(delta_lp, delta_cap, 1)`: beyond this, delta-semistability is
    /// asymptotic semistability on conforming families.
    pub delta_infinity: S,
    /// Number of enumerated cone functions.
    pub cone_functions: u64,
}

/// Runs the whole constant chain.
///
/// The threshold `delta_lp` is the maximum over positive cone functions of
/// `max { -Lbar(m) : m >= 0, M(m) <= 1 }` where `Lbar` bounds the chi-term
/// of any filtration whose step slopes respect `kappa_slope_bound`; that
/// maximum simplifies to `alpha * B * (step-rank pairing)`, and the shapes
/// on which the LP would be unbounded are exactly those with `K0`
/// undefined, which cannot pass the asymptotic test anyway.
pub fn bounds_pipeline<S: Rational>(
    r: u64,
    chi: i64,
    kappa: &KappaVector<S>,
    gps_types: &[u64],
    curve: &CurveData,
    arity: usize,
    ceiling: u64,
) -> Result<BoundsRecord<S>, ConeError> {
    if r == 0 {
        return Err(ConeError::BadPipelineInput(
            "uniform rank must be positive".into(),
        ));
    }
    if kappa.len() != gps_types.len() || kappa.len() != curve.num_pairs() {
        return Err(ConeError::BadPipelineInput(format!(
            "kappa has {} entries, types {}, curve pairs {}",
            kappa.len(),
            gps_types.len(),
            curve.num_pairs()
        )));
    }
    let alpha = r as i64 * curve.ell_sum();
    let d = S::from_int(r as i64)
        * S::from_int(curve.ell_sum())
        * kappa
            .pair(gps_types)
            .map_err(|e| ConeError::BadPipelineInput(e.to_string()))?;
    let k1 = S::from_int(arity as i64) * (S::from_int(chi) + d.clone() + S::one());

    let cone_functions = enumerate_cone_functions(alpha, arity, ceiling)?;
    let mut k0_squared: Option<S> = None;
    let mut rank_lp_max = S::zero();
    for cf in &cone_functions {
        if cf.s() == 0 {
            continue;
        }
        let Some(k0) = k0_compute::<S>(cf)? else {
            continue;
        };
        k0_squared = Some(match k0_squared {
            Some(current) => current.min(k0),
            None => k0,
        });
        // max sum r_i m_i over {m >= 0, all pieces <= 1}: bounded exactly
        // because this cone function has trivial recession cone.
        let s = cf.s();
        let mut p = Problem::<S>::new(s);
        p.maximize(cf.ranks[..s].iter().map(|&r| S::from_int(r)).collect());
        for piece in cf.pieces() {
            p.constrain(
                piece.iter().map(|&c| S::from_int(c)).collect(),
                Rel::Le,
                S::one(),
            );
        }
        match p.solve_max() {
            Solution::Optimal { value, .. } => rank_lp_max = rank_lp_max.max(value),
            Solution::Unbounded => {
                unreachable!("positive cone functions have bounded sublevel sets")
            }
            Solution::Infeasible => unreachable!("the origin is feasible"),
        }
    }
    let k0_squared = k0_squared.ok_or(ConeError::NoPositiveConeFunction)?;

    let b_squared = S::from_int(alpha) * k1.clone() * k1.clone() / k0_squared.clone();
    let b_upper = sqrt_upper(&b_squared);
    let chi_kappa_ambient = S::from_int(chi)
        - kappa
            .pair(gps_types)
            .map_err(|e| ConeError::BadPipelineInput(e.to_string()))?;
    let kappa_slope_bound = chi_kappa_ambient / S::from_int(alpha) + b_upper.clone();
    let slope_bound = kappa_slope_bound.clone() + d.clone();
    let k = curve
        .components
        .iter()
        .map(|comp| {
            S::from_int(comp.ell as i64) * slope_bound.clone() - S::one()
                + S::from_int(comp.genus as i64)
        })
        .max()
        .ok_or_else(|| ConeError::BadPipelineInput("curve has no components".into()))?;

    let delta_lp = S::from_int(alpha) * b_upper.clone() * rank_lp_max;
    let alpha_s = S::from_int(alpha);
    let delta_cap = alpha_s.clone()
        * alpha_s.clone()
        * (S::from_int(chi.abs()) + alpha_s * (slope_bound.clone() + d.clone()));
    let delta_infinity = delta_lp.clone().max(delta_cap.clone()).max(S::one());

    Ok(BoundsRecord {
        alpha,
        arity,
        d,
        k0_squared,
        k1,
        b_squared,
        b_upper,
        kappa_slope_bound,
        slope_bound,
        k,
        delta_lp,
        delta_cap,
        delta_infinity,
        cone_functions: cone_functions.len() as u64,
    })
}
