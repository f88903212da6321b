//! The weighted-filtration semistability engine.
//!
//! A weighted filtration contributes two positively homogeneous functions of
//! its weight vector `m`: the linear term `L(m)` coming from the parabolic
//! Euler characteristics of its steps, and the piecewise-linear term
//! `M(m) = mu`, a maximum of finitely many linear forms indexed by the
//! support pattern of the tensor field. A swamp is `(kappa, delta)`-
//! (semi)stable when `L + delta*M (>=) 0` for every positive `m`; by
//! homogeneity this is decided exactly by minimizing the convex function
//! over the standard weight simplex with an epigraph LP. Boundary points of
//! the simplex evaluate to the value of the induced sub-flag (the support
//! pattern is upward closed), so the closed simplex covers the full
//! quantifier.

use crate::invariant::{chi_kappa, KappaVector};
use crate::lp::{self, Problem, Rel, Solution};
use crate::model::{validate_instance, CurveData, LocalType, SheafData, SubsheafRecord};
use crate::scalar::Scalar;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiltrationError {
    #[error("step {step} has total rank {trk}, allowed range 1..{alpha}")]
    StepRankOutOfRange { step: usize, trk: i64, alpha: i64 },
    #[error("step total ranks must increase strictly at step {step}")]
    NonIncreasingRanks { step: usize },
    #[error("step {step} is not dominated by its successor or the ambient sheaf")]
    StepNotDominated { step: usize },
    #[error("the tensor field must be non-trivial: empty support")]
    EmptySupport,
    #[error("support tuple {tuple:?} has entries outside 1..={levels}")]
    SupportEntryOutOfRange { tuple: Vec<usize>, levels: usize },
    #[error("support is not upward closed: missing {missing:?} above {tuple:?}")]
    SupportNotUpwardClosed {
        tuple: Vec<usize>,
        missing: Vec<usize>,
    },
    #[error("support tuples have arity {got}, expected {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("step {step} carries {got} parabolic dimensions, expected {expected}")]
    MissingGpsDims {
        step: usize,
        got: usize,
        expected: usize,
    },
    #[error("kappa has {got} entries, curve has {expected} marked pairs")]
    KappaLengthMismatch { got: usize, expected: usize },
    #[error("weight vector has {got} entries for {expected} steps")]
    WeightLengthMismatch { got: usize, expected: usize },
    #[error("weights must be positive (step {step})")]
    NonPositiveWeight { step: usize },
    #[error("a flag needs at least one proper step")]
    EmptyFlag,
    #[error("the shape family is empty")]
    EmptyFamily,
    #[error("the stability parameter must be positive")]
    NonPositiveDelta,
    #[error("component flag {component} is malformed: {reason}")]
    MalformedComponentFlag {
        component: usize,
        reason: &'static str,
    },
    #[error("weights must increase strictly within component {component}")]
    NonIncreasingWeights { component: usize },
    #[error("merge constraint violated: weighted dimension pairing is {value}, expected 0")]
    ConstraintViolated { value: i64 },
    #[error("ambient sheaf invalid: {0}")]
    InvalidAmbient(String),
    #[error("wall scan vertex enumeration too large: {0}")]
    WallEnumeration(#[from] lp::TooManyBases),
}

/// The support pattern of a tensor field relative to an `(s+1)`-level flag:
/// the set of `a`-tuples of levels on which the field does not vanish.
/// Tuples are kept sorted; the evaluation of `mu` only ever sees the sums of
/// step weights, which are permutation invariant. Upward closure (in the
/// componentwise order) is demanded at construction: a field that is nonzero
/// on a product of steps is nonzero on any larger product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSupport {
    arity: usize,
    levels: usize,
    tuples: BTreeSet<Vec<usize>>,
}

impl TensorSupport {
    pub fn new(
        arity: usize,
        levels: usize,
        raw: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, FiltrationError> {
        assert!(arity >= 1, "tensor arity must be positive");
        assert!(levels >= 1);
        let mut tuples = BTreeSet::new();
        for mut tuple in raw {
            if tuple.len() != arity {
                return Err(FiltrationError::ArityMismatch {
                    got: tuple.len(),
                    expected: arity,
                });
            }
            if tuple.iter().any(|&i| i == 0 || i > levels) {
                return Err(FiltrationError::SupportEntryOutOfRange { tuple, levels });
            }
            tuple.sort_unstable();
            tuples.insert(tuple);
        }
        if tuples.is_empty() {
            return Err(FiltrationError::EmptySupport);
        }
        // Closure under single-coordinate increments is closure upward.
        for tuple in &tuples {
            for k in 0..arity {
                if tuple[k] < levels {
                    let mut up = tuple.clone();
                    up[k] += 1;
                    up.sort_unstable();
                    if !tuples.contains(&up) {
                        return Err(FiltrationError::SupportNotUpwardClosed {
                            tuple: tuple.clone(),
                            missing: up,
                        });
                    }
                }
            }
        }
        Ok(TensorSupport {
            arity,
            levels,
            tuples,
        })
    }

    /// The full support `{1..levels}^a`: a tensor field nonzero everywhere.
    pub fn full(arity: usize, levels: usize) -> Self {
        fn fill(
            arity: usize,
            levels: usize,
            prefix: &mut Vec<usize>,
            out: &mut BTreeSet<Vec<usize>>,
        ) {
            if prefix.len() == arity {
                out.insert(prefix.clone());
                return;
            }
            let lo = prefix.last().copied().unwrap_or(1);
            for i in lo..=levels {
                prefix.push(i);
                fill(arity, levels, prefix, out);
                prefix.pop();
            }
        }
        let mut tuples = BTreeSet::new();
        fill(arity, levels, &mut Vec::new(), &mut tuples);
        TensorSupport {
            arity,
            levels,
            tuples,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// The antichain of minimal tuples; `mu` is already determined by it.
    pub fn minimal_tuples(&self) -> Vec<Vec<usize>> {
        self.tuples
            .iter()
            .filter(|t| {
                !self
                    .tuples
                    .iter()
                    .any(|other| *other != **t && dominated(other, t))
            })
            .cloned()
            .collect()
    }
}

/// `lhs <= rhs` componentwise on sorted tuples.
fn dominated(lhs: &[usize], rhs: &[usize]) -> bool {
    lhs.iter().zip(rhs).all(|(a, b)| a <= b)
}

/// The standard weight vectors: `Gamma^(i)` has `i` entries `i - alpha`
/// followed by `alpha - i` entries `i`.
pub fn standard_gamma(alpha: i64, i: i64) -> Vec<i64> {
    assert!(alpha >= 1 && i >= 1 && i < alpha);
    (1..=alpha)
        .map(|pos| if pos <= i { i - alpha } else { i })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaData<S> {
    /// `Gamma_bullet`, all `alpha` entries.
    pub gamma: Vec<S>,
    /// `Gamma(1..s+1)`: the entry at each step rank, then at `alpha`.
    pub step_weights: Vec<S>,
}

/// `Gamma_bullet = sum m_i Gamma^(trk_i)` and the step weights read off at
/// the step ranks.
pub fn gamma_data<S: Scalar>(
    alpha: i64,
    step_ranks: &[i64],
    weights: &[S],
) -> Result<GammaData<S>, FiltrationError> {
    validate_ranks(alpha, step_ranks)?;
    if weights.len() != step_ranks.len() {
        return Err(FiltrationError::WeightLengthMismatch {
            got: weights.len(),
            expected: step_ranks.len(),
        });
    }
    if let Some(step) = weights.iter().position(|m| !m.is_positive()) {
        return Err(FiltrationError::NonPositiveWeight { step });
    }
    let mut gamma = vec![S::zero(); alpha as usize];
    for (&rank, m) in step_ranks.iter().zip(weights) {
        for (pos, slot) in gamma.iter_mut().enumerate() {
            let coeff = if (pos as i64) < rank {
                rank - alpha
            } else {
                rank
            };
            *slot = slot.clone() + m.clone() * S::from_int(coeff);
        }
    }
    let mut step_weights: Vec<S> = step_ranks
        .iter()
        .map(|&rank| gamma[rank as usize - 1].clone())
        .collect();
    step_weights.push(gamma[alpha as usize - 1].clone());
    Ok(GammaData {
        gamma,
        step_weights,
    })
}

fn validate_ranks(alpha: i64, step_ranks: &[i64]) -> Result<(), FiltrationError> {
    let mut previous = 0;
    for (step, &trk) in step_ranks.iter().enumerate() {
        if trk <= 0 || trk >= alpha {
            return Err(FiltrationError::StepRankOutOfRange { step, trk, alpha });
        }
        if trk <= previous {
            return Err(FiltrationError::NonIncreasingRanks { step });
        }
        previous = trk;
    }
    Ok(())
}

/// `mu = -min over the support of the sums of step weights`.
pub fn mu_of_filtration<S: Scalar>(
    alpha: i64,
    step_ranks: &[i64],
    weights: &[S],
    support: &TensorSupport,
) -> Result<S, FiltrationError> {
    if support.levels != step_ranks.len() + 1 {
        return Err(FiltrationError::SupportEntryOutOfRange {
            tuple: vec![support.levels],
            levels: step_ranks.len() + 1,
        });
    }
    let data = gamma_data(alpha, step_ranks, weights)?;
    let min = support
        .tuples()
        .map(|tuple| {
            tuple
                .iter()
                .fold(S::zero(), |acc, &i| acc + data.step_weights[i - 1].clone())
        })
        .min()
        .expect("support is nonempty");
    Ok(-min)
}

/// `chi_kappa(E_bullet, m_bullet) = sum m_i (chi_kappa(E) trk(E_i) -
/// chi_kappa(E_i) trk(E))`, with plain `chi` when no kappa is given.
pub fn chi_of_filtration<S: Scalar>(
    ambient_chi_kappa: &S,
    ambient_trk: i64,
    steps: &[(S, i64)],
    weights: &[S],
) -> Result<S, FiltrationError> {
    if weights.len() != steps.len() {
        return Err(FiltrationError::WeightLengthMismatch {
            got: weights.len(),
            expected: steps.len(),
        });
    }
    let mut total = S::zero();
    for ((chi_k, trk), m) in steps.iter().zip(weights) {
        let term = ambient_chi_kappa.clone() * S::from_int(*trk)
            - chi_k.clone() * S::from_int(ambient_trk);
        total = total + m.clone() * term;
    }
    Ok(total)
}

/// One flag shape: the proper steps (invariants only) and the support of
/// the tensor field relative to this flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagShape {
    pub steps: Vec<SubsheafRecord>,
    pub support: TensorSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Semistable,
    Stable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode<S> {
    Delta(S),
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailCondition {
    /// `L + delta*M < 0` (or `<= 0` for stable).
    DeltaValue,
    /// Asymptotic condition (a): `mu < 0` somewhere.
    MuNegative,
    /// Asymptotic condition (b): `chi (<=) 0` on the `mu = 0` locus.
    ChiOnMuZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness<S> {
    pub shape_index: usize,
    /// A point of the weight simplex; its positive support names the
    /// violating sub-flag.
    pub weights: Vec<S>,
    pub value: S,
    pub condition: FailCondition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<S> {
    pub pass: bool,
    pub witness: Option<Witness<S>>,
}

/// A semistability-testing instance: ambient data plus a finite family of
/// flag shapes. The family stands in for the quantifier over all weighted
/// filtrations, which has no finite presentation at this level of
/// abstraction; the engine decides each declared shape exactly over all
/// weights.
#[derive(Debug, Clone)]
pub struct Instance<S> {
    pub curve: CurveData,
    pub ambient: SheafData,
    pub kappa: Option<KappaVector<S>>,
    pub arity: usize,
    pub copies: u64,
    pub shapes: Vec<FlagShape>,
    alpha: i64,
    ambient_chi_kappa: S,
}

impl<S: Scalar> Instance<S> {
    pub fn new(
        curve: CurveData,
        ambient: SheafData,
        kappa: Option<KappaVector<S>>,
        arity: usize,
        copies: u64,
        shapes: Vec<FlagShape>,
    ) -> Result<Self, FiltrationError> {
        assert!(arity >= 1 && copies >= 1, "tensor type must be positive");
        let validated = validate_instance(&curve, &ambient).map_err(|errs| {
            FiltrationError::InvalidAmbient(
                errs.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        let alpha = validated.total_rank;
        if alpha <= 0 {
            return Err(FiltrationError::InvalidAmbient("zero total rank".into()));
        }
        let c = curve.num_pairs();
        let ambient_chi_kappa = match &kappa {
            Some(kappa) => {
                if kappa.len() != c {
                    return Err(FiltrationError::KappaLengthMismatch {
                        got: kappa.len(),
                        expected: c,
                    });
                }
                let types = match &ambient.local_type {
                    LocalType::GpsTypes(t) => t.as_slice(),
                    _ if c == 0 => &[],
                    _ => {
                        return Err(FiltrationError::InvalidAmbient(
                            "kappa weights need gps types on the ambient sheaf".into(),
                        ))
                    }
                };
                chi_kappa(ambient.euler, types, kappa)
                    .map_err(|e| FiltrationError::InvalidAmbient(e.to_string()))?
            }
            None => {
                if matches!(&ambient.local_type, LocalType::GpsTypes(_)) && c > 0 {
                    return Err(FiltrationError::InvalidAmbient(
                        "gps types need kappa weights".into(),
                    ));
                }
                S::from_int(ambient.euler)
            }
        };

        let instance = Instance {
            curve,
            ambient,
            kappa,
            arity,
            copies,
            shapes,
            alpha,
            ambient_chi_kappa,
        };
        for shape in &instance.shapes {
            instance.validate_shape(shape)?;
        }
        Ok(instance)
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn ambient_chi_kappa(&self) -> &S {
        &self.ambient_chi_kappa
    }

    fn validate_shape(&self, shape: &FlagShape) -> Result<(), FiltrationError> {
        if shape.steps.is_empty() {
            return Err(FiltrationError::EmptyFlag);
        }
        if shape.support.arity() != self.arity {
            return Err(FiltrationError::ArityMismatch {
                got: shape.support.arity(),
                expected: self.arity,
            });
        }
        if shape.support.levels() != shape.steps.len() + 1 {
            return Err(FiltrationError::SupportEntryOutOfRange {
                tuple: vec![shape.support.levels()],
                levels: shape.steps.len() + 1,
            });
        }
        let c = self.curve.num_pairs();
        let needs_gps = self.kappa.is_some();
        let mut previous_rank: Option<&SubsheafRecord> = None;
        let mut ranks = Vec::with_capacity(shape.steps.len());
        for (index, step) in shape.steps.iter().enumerate() {
            if step.multirank.len() != self.curve.num_components() {
                return Err(FiltrationError::StepNotDominated { step: index });
            }
            let dominated_by_ambient = step
                .multirank
                .iter()
                .zip(&self.ambient.multirank)
                .all(|(a, b)| a <= b);
            let dominates_previous = previous_rank.is_none_or(|prev| {
                prev.multirank
                    .iter()
                    .zip(&step.multirank)
                    .all(|(a, b)| a <= b)
                    && prev
                        .gps_dims
                        .iter()
                        .zip(&step.gps_dims)
                        .all(|(a, b)| a <= b)
            });
            if !dominated_by_ambient || !dominates_previous {
                return Err(FiltrationError::StepNotDominated { step: index });
            }
            if needs_gps {
                if step.gps_dims.len() != c {
                    return Err(FiltrationError::MissingGpsDims {
                        step: index,
                        got: step.gps_dims.len(),
                        expected: c,
                    });
                }
                if let Some(types) = self.ambient.gps_types() {
                    if step.gps_dims.iter().zip(types).any(|(s, t)| s > t) {
                        return Err(FiltrationError::StepNotDominated { step: index });
                    }
                }
                // The parabolic image of a step lives in the sum of its two
                // fibers.
                for (pair, &(a, b)) in self.curve.marked_pairs.iter().enumerate() {
                    if step.gps_dims[pair] > step.multirank[a] + step.multirank[b] {
                        return Err(FiltrationError::StepNotDominated { step: index });
                    }
                }
            }
            ranks.push(self.curve.total_rank(&step.multirank));
            previous_rank = Some(step);
        }
        validate_ranks(self.alpha, &ranks)?;
        Ok(())
    }

    pub fn step_ranks(&self, shape: &FlagShape) -> Vec<i64> {
        shape
            .steps
            .iter()
            .map(|s| self.curve.total_rank(&s.multirank))
            .collect()
    }

    fn step_chi_kappa(&self, step: &SubsheafRecord) -> S {
        match &self.kappa {
            Some(kappa) => chi_kappa(step.euler, &step.gps_dims, kappa)
                .expect("validated step has matching gps dims"),
            None => S::from_int(step.euler),
        }
    }

    /// The linear form `L` (coefficients per weight) and the linear pieces
    /// of `M` (one row per minimal support tuple) of a shape.
    pub fn shape_functions(&self, shape: &FlagShape) -> ShapeFunctions<S> {
        let ranks = self.step_ranks(shape);
        let s = ranks.len();
        let l: Vec<S> = shape
            .steps
            .iter()
            .zip(&ranks)
            .map(|(step, &trk)| {
                self.ambient_chi_kappa.clone() * S::from_int(trk)
                    - self.step_chi_kappa(step) * S::from_int(self.alpha)
            })
            .collect();
        // Gamma(i) as a linear form in m: coefficient of m_j is
        // trk_j - alpha for j >= i, else trk_j.
        let gamma_row = |i: usize| -> Vec<i64> {
            (0..s)
                .map(|j| {
                    if j + 1 >= i {
                        ranks[j] - self.alpha
                    } else {
                        ranks[j]
                    }
                })
                .collect()
        };
        let pieces = shape
            .support
            .minimal_tuples()
            .into_iter()
            .map(|tuple| {
                let mut row = vec![S::zero(); s];
                for &i in &tuple {
                    for (j, coeff) in gamma_row(i).into_iter().enumerate() {
                        row[j] = row[j].clone() - S::from_int(coeff);
                    }
                }
                row
            })
            .collect();
        ShapeFunctions { l, pieces }
    }

    /// Decides the (semi)stability condition for the whole family. Shapes
    /// are scanned in order; the first failing shape provides the witness.
    pub fn check(
        &self,
        mode: &Mode<S>,
        strictness: Strictness,
    ) -> Result<Verdict<S>, FiltrationError> {
        if self.shapes.is_empty() {
            return Err(FiltrationError::EmptyFamily);
        }
        if let Mode::Delta(delta) = mode {
            if !delta.is_positive() {
                return Err(FiltrationError::NonPositiveDelta);
            }
        }
        for (shape_index, shape) in self.shapes.iter().enumerate() {
            let fns = self.shape_functions(shape);
            if let Some(witness) = check_shape(&fns, mode, strictness, shape_index) {
                return Ok(Verdict {
                    pass: false,
                    witness: Some(witness),
                });
            }
        }
        Ok(Verdict {
            pass: true,
            witness: None,
        })
    }

    /// Exact delta walls of the family: the sign changes of
    /// `min over the simplex of L + delta*M`, per shape, merged.
    pub fn wall_scan(&self) -> Result<WallScan<S>, FiltrationError> {
        if self.shapes.is_empty() {
            return Err(FiltrationError::EmptyFamily);
        }
        let mut walls: BTreeSet<S> = BTreeSet::new();
        for shape in &self.shapes {
            let fns = self.shape_functions(shape);
            for wall in shape_walls(&fns)? {
                if wall.is_positive() {
                    walls.insert(wall);
                }
            }
        }
        let walls: Vec<S> = walls.into_iter().collect();
        let delta_threshold = walls.last().cloned().unwrap_or_else(S::zero);

        let asymptotic_semi = self.check(&Mode::Asymptotic, Strictness::Semistable)?.pass;
        let asymptotic_stable = self.check(&Mode::Asymptotic, Strictness::Stable)?.pass;

        let mut chambers = Vec::new();
        let mut lower = S::zero();
        for wall in &walls {
            let sample = (lower.clone() + wall.clone()) / S::from_int(2);
            chambers.push(self.chamber(lower.clone(), Some(wall.clone()), sample)?);
            lower = wall.clone();
        }
        let tail_sample = delta_threshold.clone() + S::one();
        chambers.push(self.chamber(lower, None, tail_sample.clone())?);

        // Beyond the last wall the delta-verdict must be the asymptotic one.
        let tail = chambers.last().expect("at least the unbounded chamber");
        assert_eq!(
            (tail.semistable, tail.stable),
            (asymptotic_semi, asymptotic_stable),
            "delta-verdict beyond the last wall disagrees with the asymptotic verdict",
        );

        Ok(WallScan {
            walls,
            delta_threshold,
            chambers,
            asymptotic_semi,
            asymptotic_stable,
        })
    }

    fn chamber(&self, from: S, to: Option<S>, sample: S) -> Result<Chamber<S>, FiltrationError> {
        let semistable = self
            .check(&Mode::Delta(sample.clone()), Strictness::Semistable)?
            .pass;
        let stable = self
            .check(&Mode::Delta(sample.clone()), Strictness::Stable)?
            .pass;
        Ok(Chamber {
            from,
            to,
            sample,
            semistable,
            stable,
        })
    }
}

/// `L` and the pieces of `M` for one shape, as coefficient rows over the
/// weight variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeFunctions<S> {
    pub l: Vec<S>,
    pub pieces: Vec<Vec<S>>,
}

fn fails<S: Scalar>(value: &S, strictness: Strictness) -> bool {
    match strictness {
        Strictness::Semistable => value.is_negative(),
        Strictness::Stable => !value.is_positive(),
    }
}

fn check_shape<S: Scalar>(
    fns: &ShapeFunctions<S>,
    mode: &Mode<S>,
    strictness: Strictness,
    shape_index: usize,
) -> Option<Witness<S>> {
    let s = fns.l.len();
    match mode {
        Mode::Delta(delta) => {
            let (value, point) = epigraph_minimum(fns, Some(delta)).expect("simplex is compact");
            fails(&value, strictness).then(|| Witness {
                shape_index,
                weights: point,
                value,
                condition: FailCondition::DeltaValue,
            })
        }
        Mode::Asymptotic => {
            // (a) min of M over the simplex must be >= 0.
            let (mu_min, point) = epigraph_minimum(fns, None).expect("simplex is compact");
            if mu_min.is_negative() {
                return Some(Witness {
                    shape_index,
                    weights: point,
                    value: mu_min,
                    condition: FailCondition::MuNegative,
                });
            }
            // (b) min of L over {m : M(m) <= 0} must be (>=) 0 when the
            // region is nonempty.
            let mut p = Problem::<S>::new(s);
            p.minimize(fns.l.clone());
            p.constrain(vec![S::one(); s], Rel::Eq, S::one());
            for piece in &fns.pieces {
                p.constrain(piece.clone(), Rel::Le, S::zero());
            }
            match p.solve() {
                Solution::Optimal { value, point } => fails(&value, strictness).then(|| Witness {
                    shape_index,
                    weights: point,
                    value,
                    condition: FailCondition::ChiOnMuZero,
                }),
                Solution::Infeasible => None,
                Solution::Unbounded => unreachable!("feasible set lies in the simplex"),
            }
        }
    }
}

/// Minimizes `L + delta*M` (or just `M` when `delta` is `None`) over the
/// weight simplex via the epigraph variable `u >= each piece of M`.
fn epigraph_minimum<S: Scalar>(fns: &ShapeFunctions<S>, delta: Option<&S>) -> Option<(S, Vec<S>)> {
    let s = fns.l.len();
    let mut p = Problem::<S>::new(s + 1);
    p.free(s);
    let mut objective: Vec<S> = match delta {
        Some(_) => fns.l.clone(),
        None => vec![S::zero(); s],
    };
    objective.push(delta.cloned().unwrap_or_else(S::one));
    p.minimize(objective);
    let mut simplex_row = vec![S::one(); s + 1];
    simplex_row[s] = S::zero();
    p.constrain(simplex_row, Rel::Eq, S::one());
    for piece in &fns.pieces {
        let mut row = piece.clone();
        row.push(-S::one());
        p.constrain(row, Rel::Le, S::zero());
    }
    p.solve().optimal().map(|(value, mut point)| {
        point.truncate(s);
        (value, point)
    })
}

/// The delta values where the shape's minimum changes sign. With
/// `g(delta) = min over simplex of L + delta*M = min over the vertex set of
/// linear functions of delta`, the pass set is a closed interval whose
/// endpoints are the walls.
fn shape_walls<S: Scalar>(fns: &ShapeFunctions<S>) -> Result<Vec<S>, FiltrationError> {
    let s = fns.l.len();
    // Vertices of {(m, u) : m in simplex, u >= pieces(m)}.
    let mut ineqs: Vec<(Vec<S>, S)> = Vec::new();
    for j in 0..s {
        let mut row = vec![S::zero(); s + 1];
        row[j] = -S::one();
        ineqs.push((row, S::zero()));
    }
    for piece in &fns.pieces {
        let mut row = piece.clone();
        row.push(-S::one());
        ineqs.push((row, S::zero()));
    }
    let mut simplex_row = vec![S::one(); s + 1];
    simplex_row[s] = S::zero();
    let eqs = vec![(simplex_row, S::one())];
    let vertices = lp::vertices(&ineqs, &eqs, 1 << 22)?;

    let mut lo = S::zero();
    let mut hi: Option<S> = None;
    let mut feasible = true;
    for vertex in &vertices {
        let m = &vertex[..s];
        let u = &vertex[s];
        let l_value = fns
            .l
            .iter()
            .zip(m)
            .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        if u.is_positive() {
            if l_value.is_negative() {
                let bound = -l_value / u.clone();
                lo = lo.max(bound);
            }
        } else if u.is_zero() {
            if l_value.is_negative() {
                feasible = false;
            }
        } else {
            let bound = l_value / -u.clone();
            hi = Some(match hi {
                Some(current) => bound.min(current),
                None => bound,
            });
        }
    }

    let mut walls = Vec::new();
    if !feasible {
        return Ok(walls);
    }
    match hi {
        Some(hi) => {
            if hi.is_positive() && lo <= hi {
                if lo.is_positive() {
                    walls.push(lo);
                }
                walls.push(hi);
            }
        }
        None => {
            if lo.is_positive() {
                walls.push(lo);
            }
        }
    }
    walls.dedup();
    Ok(walls)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber<S> {
    pub from: S,
    /// `None` on the unbounded tail chamber.
    pub to: Option<S>,
    pub sample: S,
    pub semistable: bool,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallScan<S> {
    pub walls: Vec<S>,
    pub delta_threshold: S,
    pub chambers: Vec<Chamber<S>>,
    pub asymptotic_semi: bool,
    pub asymptotic_stable: bool,
}

/// One component's weighted flag: strictly increasing dimensions ending at
/// the component rank, with strictly increasing integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentFlag {
    pub dims: Vec<u64>,
    pub weights: Vec<i64>,
}

impl ComponentFlag {
    /// The flag `0 < E(j)` with a single weight: a constant direction.
    pub fn trivial(rank: u64, weight: i64) -> Self {
        ComponentFlag {
            dims: vec![rank],
            weights: vec![weight],
        }
    }

    pub fn rank(&self) -> u64 {
        *self.dims.last().expect("flags are nonempty")
    }

    /// `sum over levels of (dim jump) * weight`.
    pub fn weighted_dimension_sum(&self) -> i64 {
        let mut prev = 0i64;
        let mut total = 0i64;
        for (&d, &w) in self.dims.iter().zip(&self.weights) {
            total += (d as i64 - prev) * w;
            prev = d as i64;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedFiltration<S> {
    /// Multiranks of the proper steps (length `s`).
    pub levels: Vec<Vec<u64>>,
    /// Positive weights `m_i = (Gamma(i+1) - Gamma(i)) / alpha`.
    pub weights: Vec<S>,
    /// The merged distinct weights `Gamma(1) < ... < Gamma(s+1)`.
    pub step_weights: Vec<S>,
    pub alpha: i64,
}

/// Merges per-component weighted flags into one weighted filtration.
///
/// The merged levels are the distinct weights in increasing order; at level
/// `i`, component `j` contributes the largest flag step whose weight is at
/// most `Gamma(i)` (the zero subspace when there is none). Requires the
/// exact constraint `sum_j ell_j * (dim-jump pairing) = 0`; the returned
/// filtration then satisfies `Gamma_bullet[trk(E_i)] = Gamma(i)`, which is
/// re-checked before returning.
pub fn merge_flags<S: Scalar>(
    curve: &CurveData,
    flags: &[ComponentFlag],
) -> Result<MergedFiltration<S>, FiltrationError> {
    if flags.is_empty() || flags.len() != curve.num_components() {
        return Err(FiltrationError::MalformedComponentFlag {
            component: flags.len(),
            reason: "one flag per component required",
        });
    }
    for (component, flag) in flags.iter().enumerate() {
        if flag.dims.is_empty() || flag.dims.len() != flag.weights.len() {
            return Err(FiltrationError::MalformedComponentFlag {
                component,
                reason: "dimension and weight lists must be nonempty and equally long",
            });
        }
        if flag.dims.windows(2).any(|w| w[0] >= w[1]) || flag.dims[0] == 0 {
            return Err(FiltrationError::MalformedComponentFlag {
                component,
                reason: "dimensions must be strictly increasing and positive",
            });
        }
        if flag.weights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FiltrationError::NonIncreasingWeights { component });
        }
    }

    let alpha: i64 = curve
        .components
        .iter()
        .zip(flags)
        .map(|(comp, flag)| comp.ell as i64 * flag.rank() as i64)
        .sum();
    let constraint: i64 = curve
        .components
        .iter()
        .zip(flags)
        .map(|(comp, flag)| comp.ell as i64 * flag.weighted_dimension_sum())
        .sum();
    if constraint != 0 {
        return Err(FiltrationError::ConstraintViolated { value: constraint });
    }

    let mut merged: Vec<i64> = flags
        .iter()
        .flat_map(|f| f.weights.iter().copied())
        .collect();
    merged.sort_unstable();
    merged.dedup();

    // Level dimensions per component; the last level is the full sheaf.
    let mut levels: Vec<Vec<u64>> = Vec::with_capacity(merged.len());
    for &weight in &merged {
        let multirank: Vec<u64> = flags
            .iter()
            .map(|flag| {
                flag.weights
                    .iter()
                    .rposition(|&w| w <= weight)
                    .map_or(0, |k| flag.dims[k])
            })
            .collect();
        levels.push(multirank);
    }
    debug_assert_eq!(
        levels.last().map(|l| curve.total_rank(l)),
        Some(alpha),
        "top level must be the full sheaf",
    );
    let step_weights: Vec<S> = merged.iter().map(|&w| S::from_int(w)).collect();
    let weights: Vec<S> = merged
        .windows(2)
        .map(|w| S::ratio(w[1] - w[0], alpha))
        .collect();
    let proper: Vec<Vec<u64>> = levels[..levels.len() - 1].to_vec();
    let ranks: Vec<i64> = proper.iter().map(|mr| curve.total_rank(mr)).collect();

    if !ranks.is_empty() {
        let data = gamma_data(alpha, &ranks, &weights)?;
        assert_eq!(
            data.step_weights, step_weights,
            "merged filtration must reproduce its step weights",
        );
    }

    Ok(MergedFiltration {
        levels: proper,
        weights,
        step_weights,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Component;
    use crate::scalar::Scalar;
    use crate::Q;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    #[test]
    fn standard_gamma_examples() {
        assert_eq!(standard_gamma(3, 1), vec![-2, 1, 1]);
        assert_eq!(standard_gamma(4, 3), vec![-1, -1, -1, 3]);
        for alpha in 1..7 {
            for i in 1..alpha {
                let sum: i64 = standard_gamma(alpha, i).iter().sum();
                assert_eq!(sum, 0);
            }
        }
    }

    #[test]
    fn gamma_data_worked_example() {
        let data = gamma_data::<Q>(4, &[1, 3], &[Q::ratio(1, 4), Q::ratio(1, 4)]).unwrap();
        assert_eq!(data.gamma, vec![q(-1), q(0), q(0), q(1)]);
        assert_eq!(data.step_weights, vec![q(-1), q(0), q(1)]);
    }

    #[test]
    fn gamma_rejects_bad_ranks() {
        assert!(matches!(
            gamma_data::<Q>(4, &[0], &[q(1)]),
            Err(FiltrationError::StepRankOutOfRange { .. })
        ));
        assert!(matches!(
            gamma_data::<Q>(4, &[2, 2], &[q(1), q(1)]),
            Err(FiltrationError::NonIncreasingRanks { .. })
        ));
    }

    #[test]
    fn mu_examples() {
        // Trivial filtration: mu = 0 whatever the support is.
        let support = TensorSupport::new(2, 1, vec![vec![1, 1]]).unwrap();
        assert_eq!(mu_of_filtration::<Q>(2, &[], &[], &support).unwrap(), q(0));

        // alpha = 2, one step of rank 1, m = 1, a = 1.
        let p1 = TensorSupport::new(1, 2, vec![vec![1], vec![2]]).unwrap();
        assert_eq!(mu_of_filtration(2, &[1], &[q(1)], &p1).unwrap(), q(1));
        let p2 = TensorSupport::new(2, 2, vec![vec![1, 2], vec![2, 2]]).unwrap();
        assert_eq!(mu_of_filtration(2, &[1], &[q(1)], &p2).unwrap(), q(0));
    }

    #[test]
    fn mu_is_homogeneous() {
        let support = TensorSupport::new(
            2,
            3,
            vec![vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 3]],
        )
        .unwrap();
        let base = mu_of_filtration(5, &[1, 3], &[q(1), q(2)], &support).unwrap();
        let scaled = mu_of_filtration(5, &[1, 3], &[q(3), q(6)], &support).unwrap();
        assert_eq!(scaled, q(3) * base);
    }

    #[test]
    fn support_validation() {
        assert!(matches!(
            TensorSupport::new(1, 2, Vec::<Vec<usize>>::new()),
            Err(FiltrationError::EmptySupport)
        ));
        // {(1)} is not upward closed in two levels.
        assert!(matches!(
            TensorSupport::new(1, 2, vec![vec![1]]),
            Err(FiltrationError::SupportNotUpwardClosed { .. })
        ));
        assert!(matches!(
            TensorSupport::new(1, 2, vec![vec![3]]),
            Err(FiltrationError::SupportEntryOutOfRange { .. })
        ));
        // Sorting makes (2,1) and (1,2) the same tuple.
        let support = TensorSupport::new(2, 2, vec![vec![2, 1], vec![2, 2]]).unwrap();
        assert_eq!(support.len(), 2);
        assert_eq!(support.minimal_tuples(), vec![vec![1, 2]]);
    }

    #[test]
    fn chi_of_filtration_examples() {
        assert_eq!(chi_of_filtration::<Q>(&q(5), 4, &[], &[]).unwrap(), q(0));
        let value = chi_of_filtration(&q(2), 2, &[(q(2), 1)], &[q(1)]).unwrap();
        assert_eq!(value, q(-2));
        let scaled = chi_of_filtration(&q(2), 2, &[(q(2), 1)], &[q(3)]).unwrap();
        assert_eq!(scaled, q(-6));
    }

    fn one_component_instance(shapes: Vec<FlagShape>) -> Instance<Q> {
        let curve = CurveData::smooth(vec![Component { genus: 0, ell: 1 }]);
        let ambient = SheafData {
            multirank: vec![2],
            euler: 2,
            local_type: LocalType::None,
        };
        Instance::new(curve, ambient, None, 1, 1, shapes).unwrap()
    }

    /// The documented single-step shape with L(m) = -2m, M(m) = m.
    fn docs_shape() -> FlagShape {
        // alpha = 2; step of rank 1 with chi = 2 gives L_1 = 2*1 - 2*2 = -2;
        // support {(1),(2)} gives M(m) = -Gamma(1) = m.
        FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1],
                euler: 2,
                gps_dims: vec![],
            }],
            support: TensorSupport::new(1, 2, vec![vec![1], vec![2]]).unwrap(),
        }
    }

    #[test]
    fn delta_check_examples() {
        let instance = one_component_instance(vec![docs_shape()]);
        let fns = instance.shape_functions(&instance.shapes[0]);
        assert_eq!(fns.l, vec![q(-2)]);

        let pass = instance
            .check(&Mode::Delta(q(3)), Strictness::Semistable)
            .unwrap();
        assert!(pass.pass);
        let fail = instance
            .check(&Mode::Delta(q(1)), Strictness::Semistable)
            .unwrap();
        assert!(!fail.pass);
        let witness = fail.witness.unwrap();
        assert_eq!(witness.weights, vec![q(1)]);
        assert_eq!(witness.value, q(-1));
        assert_eq!(witness.condition, FailCondition::DeltaValue);
    }

    #[test]
    fn stable_is_strict_at_zero() {
        // delta = 2 puts the value exactly at 0: semistable but not stable.
        let instance = one_component_instance(vec![docs_shape()]);
        assert!(
            instance
                .check(&Mode::Delta(q(2)), Strictness::Semistable)
                .unwrap()
                .pass
        );
        assert!(
            !instance
                .check(&Mode::Delta(q(2)), Strictness::Stable)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn asymptotic_examples() {
        // Support {(2)} only: M(m) = -Gamma(2) = -m < 0 fails condition (a).
        let shape = FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1],
                euler: 2,
                gps_dims: vec![],
            }],
            support: TensorSupport::new(1, 2, vec![vec![2]]).unwrap(),
        };
        let instance = one_component_instance(vec![shape]);
        let verdict = instance
            .check(&Mode::Asymptotic, Strictness::Semistable)
            .unwrap();
        assert!(!verdict.pass);
        let witness = verdict.witness.unwrap();
        assert_eq!(witness.condition, FailCondition::MuNegative);
        assert_eq!(witness.value, q(-1));

        // Full support: M >= 0, and M = 0 only at... M(m) = m > 0 on the
        // simplex, so (b) is vacuous.
        let instance = one_component_instance(vec![docs_shape()]);
        assert!(
            instance
                .check(&Mode::Asymptotic, Strictness::Stable)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn asymptotic_chi_on_mu_zero() {
        // Two steps, support forcing M(m) = 0 on a face where L < 0.
        // alpha = 3, ambient chi = 0; steps rank 1 and 2.
        let curve = CurveData::smooth(vec![Component { genus: 0, ell: 1 }]);
        let ambient = SheafData {
            multirank: vec![3],
            euler: 0,
            local_type: LocalType::None,
        };
        // L_j = -chi_j * 3. Step 1: chi = -1 -> L_1 = 3; step 2: chi = 1 ->
        // L_2 = -3.
        let steps = vec![
            SubsheafRecord {
                multirank: vec![1],
                euler: -1,
                gps_dims: vec![],
            },
            SubsheafRecord {
                multirank: vec![2],
                euler: 1,
                gps_dims: vec![],
            },
        ];
        // Support {(2),(3)}: M(m) = -Gamma(2) = -(m1 + 2m2 - 3m2) = -m1 + m2.
        // On m = (0,1): M = 1 > 0; on m = (1,0): M = -1 < 0 -> fails (a).
        let support = TensorSupport::new(1, 3, vec![vec![2], vec![3]]).unwrap();
        let instance = Instance::<Q>::new(
            curve,
            ambient,
            None,
            1,
            1,
            vec![FlagShape { steps, support }],
        )
        .unwrap();
        let verdict = instance
            .check(&Mode::Asymptotic, Strictness::Semistable)
            .unwrap();
        assert!(!verdict.pass);
        assert_eq!(
            verdict.witness.unwrap().condition,
            FailCondition::MuNegative
        );

        // M identically zero with L < 0: condition (b) is the one failing.
        let curve = CurveData::smooth(vec![Component { genus: 0, ell: 1 }]);
        let ambient = SheafData {
            multirank: vec![2],
            euler: 2,
            local_type: LocalType::None,
        };
        let steps = vec![SubsheafRecord {
            multirank: vec![1],
            euler: 2,
            gps_dims: vec![],
        }];
        // a = 2 support {(1,2),(2,2)}: M = -min(0, 2m) = 0 on the simplex;
        // L = 2*1 - 2*2 = -2.
        let support = TensorSupport::new(2, 2, vec![vec![1, 2], vec![2, 2]]).unwrap();
        let instance = Instance::<Q>::new(
            curve,
            ambient,
            None,
            2,
            1,
            vec![FlagShape { steps, support }],
        )
        .unwrap();
        let verdict = instance
            .check(&Mode::Asymptotic, Strictness::Semistable)
            .unwrap();
        assert!(!verdict.pass);
        let witness = verdict.witness.unwrap();
        assert_eq!(witness.condition, FailCondition::ChiOnMuZero);
        assert_eq!(witness.value, q(-2));
    }

    #[test]
    fn wall_scan_documented_example() {
        let instance = one_component_instance(vec![docs_shape()]);
        let scan = instance.wall_scan().unwrap();
        assert_eq!(scan.walls, vec![q(2)]);
        assert_eq!(scan.delta_threshold, q(2));
        assert!(scan.asymptotic_semi);
        // Chambers: (0,2) failing, (2,inf) passing.
        assert_eq!(scan.chambers.len(), 2);
        assert!(!scan.chambers[0].semistable);
        assert!(scan.chambers[1].semistable);
    }

    #[test]
    fn wall_scan_no_walls_when_l_nonnegative() {
        // chi of the step small enough that L >= 0.
        let shape = FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1],
                euler: 0,
                gps_dims: vec![],
            }],
            support: TensorSupport::new(1, 2, vec![vec![1], vec![2]]).unwrap(),
        };
        let instance = one_component_instance(vec![shape]);
        let scan = instance.wall_scan().unwrap();
        assert!(scan.walls.is_empty());
        assert_eq!(scan.delta_threshold, q(0));
    }

    #[test]
    fn kappa_enters_the_chi_coefficients() {
        // Two components glued by one GPS pair: kappa weights shift both
        // the ambient and the step chi.
        let curve = CurveData {
            components: vec![
                Component { genus: 0, ell: 1 },
                Component { genus: 0, ell: 1 },
            ],
            marked_pairs: vec![(0, 1)],
            connected: false,
        };
        let ambient = SheafData {
            multirank: vec![2, 2],
            euler: 3,
            local_type: LocalType::GpsTypes(vec![2]),
        };
        let kappa = KappaVector::new(vec![Q::ratio(1, 2)]).unwrap();
        let shape = FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1, 1],
                euler: 1,
                gps_dims: vec![1],
            }],
            support: TensorSupport::new(1, 2, vec![vec![1], vec![2]]).unwrap(),
        };
        let instance = Instance::new(curve, ambient, Some(kappa), 1, 1, vec![shape]).unwrap();
        // chi_kappa(E) = 3 - 1 = 2; chi_kappa(E_1) = 1 - 1/2 = 1/2;
        // L_1 = 2*2 - (1/2)*4 = 2.
        assert_eq!(instance.ambient_chi_kappa(), &q(2));
        let fns = instance.shape_functions(&instance.shapes[0]);
        assert_eq!(fns.l, vec![q(2)]);
    }

    #[test]
    fn wall_scan_crossing_from_above() {
        // L = 4m > 0 with M = -m < 0: passes up to delta = 4, then fails
        // forever; asymptotically unstable.
        let shape = FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1],
                euler: -1,
                gps_dims: vec![],
            }],
            support: TensorSupport::new(1, 2, vec![vec![2]]).unwrap(),
        };
        let instance = one_component_instance(vec![shape]);
        let scan = instance.wall_scan().unwrap();
        assert_eq!(scan.walls, vec![q(4)]);
        assert!(!scan.asymptotic_semi);
        assert!(scan.chambers[0].semistable);
        assert!(!scan.chambers[1].semistable);
    }

    #[test]
    fn wall_scan_plateau_at_zero() {
        // L = 0 and M = 0 at the only weight: semistable for every delta,
        // stable for none, no walls.
        let shape = FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1],
                euler: 1,
                gps_dims: vec![],
            }],
            support: TensorSupport::new(2, 2, vec![vec![1, 2], vec![2, 2]]).unwrap(),
        };
        let curve = CurveData::smooth(vec![Component { genus: 0, ell: 1 }]);
        let ambient = SheafData {
            multirank: vec![2],
            euler: 2,
            local_type: LocalType::None,
        };
        let instance = Instance::<Q>::new(curve, ambient, None, 2, 1, vec![shape]).unwrap();
        let scan = instance.wall_scan().unwrap();
        assert!(scan.walls.is_empty());
        assert!(scan.asymptotic_semi);
        assert!(!scan.asymptotic_stable);
        assert!(scan.chambers[0].semistable);
        assert!(!scan.chambers[0].stable);
    }

    #[test]
    fn wall_union_and_threshold() {
        // Second shape with L = -5m (chi = 7/2 not integral; use chi = 4 ->
        // L = 2*1 - 4*2 = -6, wall at 6... keep two distinct walls).
        let other = FlagShape {
            steps: vec![SubsheafRecord {
                multirank: vec![1],
                euler: 4,
                gps_dims: vec![],
            }],
            support: TensorSupport::new(1, 2, vec![vec![1], vec![2]]).unwrap(),
        };
        let instance = one_component_instance(vec![docs_shape(), other]);
        let scan = instance.wall_scan().unwrap();
        assert_eq!(scan.walls, vec![q(2), q(6)]);
        assert_eq!(scan.delta_threshold, q(6));
    }

    #[test]
    fn merge_flags_worked_example() {
        // Component 1 (rank 2): flag dim 1 with weights (-1, 1);
        // component 2 (rank 2): trivial with weight 0; ell = (1, 1).
        let curve = CurveData::smooth(vec![
            Component { genus: 0, ell: 1 },
            Component { genus: 0, ell: 1 },
        ]);
        let flags = vec![
            ComponentFlag {
                dims: vec![1, 2],
                weights: vec![-1, 1],
            },
            ComponentFlag::trivial(2, 0),
        ];
        let merged = merge_flags::<Q>(&curve, &flags).unwrap();
        assert_eq!(merged.alpha, 4);
        assert_eq!(merged.step_weights, vec![q(-1), q(0), q(1)]);
        assert_eq!(merged.levels, vec![vec![1, 0], vec![1, 2]]);
        assert_eq!(merged.weights, vec![Q::ratio(1, 4), Q::ratio(1, 4)]);
    }

    #[test]
    fn merge_flags_trivial_and_invalid() {
        let curve = CurveData::smooth(vec![
            Component { genus: 0, ell: 1 },
            Component { genus: 0, ell: 1 },
        ]);
        let trivial = vec![ComponentFlag::trivial(2, 0), ComponentFlag::trivial(2, 0)];
        let merged = merge_flags::<Q>(&curve, &trivial).unwrap();
        assert!(merged.levels.is_empty());
        assert!(merged.weights.is_empty());

        let violating = vec![ComponentFlag::trivial(2, 1), ComponentFlag::trivial(2, 0)];
        assert!(matches!(
            merge_flags::<Q>(&curve, &violating),
            Err(FiltrationError::ConstraintViolated { value: 2 })
        ));

        let bad_weights = vec![
            ComponentFlag {
                dims: vec![1, 2],
                weights: vec![1, 1],
            },
            ComponentFlag::trivial(2, -1),
        ];
        assert!(matches!(
            merge_flags::<Q>(&curve, &bad_weights),
            Err(FiltrationError::NonIncreasingWeights { component: 0 })
        ));
    }

    #[test]
    fn empty_family_is_rejected() {
        let instance = one_component_instance(vec![]);
        assert!(matches!(
            instance.check(&Mode::Delta(q(1)), Strictness::Semistable),
            Err(FiltrationError::EmptyFamily)
        ));
    }
}
