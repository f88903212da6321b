//! Slope and Euler-characteristic calculus.
//!
//! Covers the parabolic Euler characteristic `chi_kappa`, the declared
//! Harder–Narasimhan slope extremes, the `D`-window comparing parabolic and
//! plain slope extremes, and the duality identities for twists and duals on
//! the glued (Gorenstein) curve.

use crate::model::CurveData;
use crate::scalar::Scalar;
use thiserror::Error;

/// Positive weights, one per marked pair. Rational rather than real: the
/// weights only ever enter linear inequalities, so exact comparisons need
/// exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaVector<S>(Vec<S>);

impl<S: Scalar> KappaVector<S> {
    pub fn new(entries: Vec<S>) -> Result<Self, InvariantError> {
        if let Some(pos) = entries.iter().position(|k| !k.is_positive()) {
            return Err(InvariantError::NonPositiveKappa { index: pos });
        }
        Ok(KappaVector(entries))
    }

    /// The all-ones vector of length `c`.
    pub fn ones(c: usize) -> Self {
        KappaVector(vec![S::one(); c])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[S] {
        &self.0
    }

    /// `sum kappa_j * dims_j`.
    pub fn pair(&self, dims: &[u64]) -> Result<S, InvariantError> {
        if dims.len() != self.0.len() {
            return Err(InvariantError::MissingGpsDims {
                got: dims.len(),
                expected: self.0.len(),
            });
        }
        Ok(self.0.iter().zip(dims).fold(S::zero(), |acc, (k, &d)| {
            acc + k.clone() * S::from_int(d as i64)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("kappa entry {index} is not positive")]
    NonPositiveKappa { index: usize },
    #[error("got {got} parabolic dimensions, expected {expected}")]
    MissingGpsDims { got: usize, expected: usize },
    #[error("slope of a sheaf with zero total rank")]
    ZeroTotalRank,
    #[error("every component was declared zero")]
    AllComponentsZero,
    #[error("operation requires uniform rank")]
    NonUniformRank,
    #[error("declared mu_max < mu_min on component {index}")]
    InvertedSlopeExtremes { index: usize },
    #[error("profile has {got} components, curve has {expected}")]
    ProfileLengthMismatch { got: usize, expected: usize },
    #[error("twist vector has {got} entries, curve has {expected} components")]
    TwistLengthMismatch { got: usize, expected: usize },
}

/// `chi_kappa = chi - sum kappa_j * dim_j`.
pub fn chi_kappa<S: Scalar>(
    euler: i64,
    gps_dims: &[u64],
    kappa: &KappaVector<S>,
) -> Result<S, InvariantError> {
    Ok(S::from_int(euler) - kappa.pair(gps_dims)?)
}

/// `chi_kappa` together with the kappa-slope `chi_kappa / trk`.
pub fn chi_kappa_slope<S: Scalar>(
    euler: i64,
    gps_dims: &[u64],
    kappa: &KappaVector<S>,
    total_rank: i64,
) -> Result<(S, S), InvariantError> {
    let chi_k = chi_kappa(euler, gps_dims, kappa)?;
    if total_rank == 0 {
        return Err(InvariantError::ZeroTotalRank);
    }
    let slope = chi_k.clone() / S::from_int(total_rank);
    Ok((chi_k, slope))
}

/// Declared HN slope extremes per component; `None` marks a component on
/// which the sheaf vanishes. The extremes are inputs, not computed: they
/// would need section-level data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnProfile<S> {
    pub per_component: Vec<Option<(S, S)>>,
}

impl<S: Scalar> HnProfile<S> {
    pub fn new(per_component: Vec<Option<(S, S)>>) -> Result<Self, InvariantError> {
        for (index, entry) in per_component.iter().enumerate() {
            if let Some((max, min)) = entry {
                if max < min {
                    return Err(InvariantError::InvertedSlopeExtremes { index });
                }
            }
        }
        Ok(HnProfile { per_component })
    }
}

/// Slope extremes of the direct sum over components:
/// `chibar_max = max (mu_max + 1 - g_i)/ell_i` and the mirrored minimum.
pub fn hn_extremes<S: Scalar>(
    curve: &CurveData,
    profile: &HnProfile<S>,
) -> Result<(S, S), InvariantError> {
    if profile.per_component.len() != curve.num_components() {
        return Err(InvariantError::ProfileLengthMismatch {
            got: profile.per_component.len(),
            expected: curve.num_components(),
        });
    }
    let mut chibar_max: Option<S> = None;
    let mut chibar_min: Option<S> = None;
    for (comp, entry) in curve.components.iter().zip(&profile.per_component) {
        let Some((mu_max, mu_min)) = entry else {
            continue;
        };
        let shift = S::from_int(1 - comp.genus as i64);
        let ell = S::from_int(comp.ell as i64);
        let hi = (mu_max.clone() + shift.clone()) / ell.clone();
        let lo = (mu_min.clone() + shift) / ell;
        chibar_max = Some(match chibar_max {
            Some(current) => current.max(hi),
            None => hi,
        });
        chibar_min = Some(match chibar_min {
            Some(current) => current.min(lo),
            None => lo,
        });
    }
    match (chibar_max, chibar_min) {
        (Some(hi), Some(lo)) => Ok((hi, lo)),
        _ => Err(InvariantError::AllComponentsZero),
    }
}

/// The width `D = r * sum(ell) * sum(kappa_j * t_j)` of the window between
/// plain and parabolic slope extremes, with a checker for both windows.
pub fn d_window<S: Scalar>(
    curve: &CurveData,
    uniform_rank: Option<u64>,
    gps_types: &[u64],
    kappa: &KappaVector<S>,
) -> Result<(S, DWindowCheck<S>), InvariantError> {
    let r = uniform_rank.ok_or(InvariantError::NonUniformRank)?;
    let d = S::from_int(r as i64) * S::from_int(curve.ell_sum()) * kappa.pair(gps_types)?;
    Ok((d.clone(), DWindowCheck { d }))
}

/// Asserts `chibar_max - D <= chibar_kappa_max <= chibar_max` and
/// `chibar_min <= chibar_kappa_min <= chibar_min + D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DWindowCheck<S> {
    d: S,
}

impl<S: Scalar> DWindowCheck<S> {
    pub fn check(
        &self,
        chibar_max: &S,
        chibar_kappa_max: &S,
        chibar_min: &S,
        chibar_kappa_min: &S,
    ) -> bool {
        let lower = chibar_max.clone() - self.d.clone();
        let upper = chibar_min.clone() + self.d.clone();
        lower <= *chibar_kappa_max
            && *chibar_kappa_max <= *chibar_max
            && *chibar_min <= *chibar_kappa_min
            && *chibar_kappa_min <= upper
    }
}

/// Euler-characteristic transforms on the glued curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EulerOp {
    /// Tensor with a line bundle of the given component degrees.
    Twist(Vec<i64>),
    /// The plain dual.
    Dual,
    /// The dual against the dualizing sheaf.
    OmegaDual,
}

/// `chi` after the requested transform: `chi(E (x) N) = r*sum(n) + chi`,
/// `chi(E^dual) = -chi + 2r*chi(O)`, `chi(E^omega-dual) = -chi`.
pub fn euler_calculus(
    curve: &CurveData,
    uniform_rank: Option<u64>,
    euler: i64,
    op: &EulerOp,
) -> Result<i64, InvariantError> {
    let r = uniform_rank.ok_or(InvariantError::NonUniformRank)? as i64;
    match op {
        EulerOp::Twist(degrees) => {
            if degrees.len() != curve.num_components() {
                return Err(InvariantError::TwistLengthMismatch {
                    got: degrees.len(),
                    expected: curve.num_components(),
                });
            }
            let total: i64 = degrees.iter().sum();
            Ok(r * total + euler)
        }
        EulerOp::Dual => Ok(-euler + 2 * r * curve.euler_o_glued()),
        EulerOp::OmegaDual => Ok(-euler),
    }
}

/// Total degree of the dualizing sheaf: `-2 * chi(O)`.
pub fn canonical_degree_sum(curve: &CurveData) -> i64 {
    -2 * curve.euler_o_glued()
}

/// Whether the dual pairing is chi-neutral: `chi = r * chi(O)`, which is
/// exactly `deg_ell = 0`.
pub fn dual_iso_criterion(
    curve: &CurveData,
    uniform_rank: Option<u64>,
    euler: i64,
) -> Result<bool, InvariantError> {
    let r = uniform_rank.ok_or(InvariantError::NonUniformRank)? as i64;
    Ok(euler == r * curve.euler_o_glued())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Component;
    use crate::scalar::Scalar;
    use crate::Q;

    fn smooth(data: &[(u64, u64)]) -> CurveData {
        CurveData::smooth(
            data.iter()
                .map(|&(genus, ell)| Component { genus, ell })
                .collect(),
        )
    }

    #[test]
    fn chi_kappa_worked_example() {
        let kappa = KappaVector::new(vec![Q::from_int(1), Q::ratio(1, 2)]).unwrap();
        assert_eq!(chi_kappa(5, &[2, 2], &kappa).unwrap(), Q::from_int(2));
    }

    #[test]
    fn chi_kappa_empty_gps() {
        let kappa = KappaVector::<Q>::new(vec![]).unwrap();
        assert_eq!(chi_kappa(7, &[], &kappa).unwrap(), Q::from_int(7));
    }

    #[test]
    fn kappa_slope_division() {
        let kappa = KappaVector::new(vec![Q::from_int(1)]).unwrap();
        let (chi_k, slope) = chi_kappa_slope(4, &[2], &kappa, 4).unwrap();
        assert_eq!(chi_k, Q::from_int(2));
        assert_eq!(slope, Q::ratio(1, 2));
        assert_eq!(
            chi_kappa_slope(4, &[2], &kappa, 0).unwrap_err(),
            InvariantError::ZeroTotalRank
        );
    }

    #[test]
    fn kappa_must_be_positive() {
        assert!(KappaVector::new(vec![Q::from_int(0)]).is_err());
        assert!(KappaVector::new(vec![Q::from_int(-1)]).is_err());
    }

    #[test]
    fn hn_extremes_single_component() {
        let curve = smooth(&[(0, 1)]);
        let profile = HnProfile::new(vec![Some((Q::from_int(3), Q::from_int(3)))]).unwrap();
        let (hi, lo) = hn_extremes(&curve, &profile).unwrap();
        assert_eq!(hi, Q::from_int(4));
        assert_eq!(lo, Q::from_int(4));
    }

    #[test]
    fn hn_extremes_two_components() {
        // ell = (1,2), g = (0,1), mu_max = (1,4): both give chibar 2.
        let curve = smooth(&[(0, 1), (1, 2)]);
        let profile = HnProfile::new(vec![
            Some((Q::from_int(1), Q::from_int(0))),
            Some((Q::from_int(4), Q::from_int(2))),
        ])
        .unwrap();
        let (hi, lo) = hn_extremes(&curve, &profile).unwrap();
        assert_eq!(hi, Q::from_int(2));
        assert_eq!(lo, Q::from_int(1));
    }

    #[test]
    fn hn_extremes_semistable_sum_collapses() {
        // Both components semistable with equal normalized slope: the
        // extremes coincide.
        let curve = smooth(&[(0, 1), (1, 2)]);
        let profile = HnProfile::new(vec![
            Some((Q::from_int(1), Q::from_int(1))),
            Some((Q::from_int(4), Q::from_int(4))),
        ])
        .unwrap();
        let (hi, lo) = hn_extremes(&curve, &profile).unwrap();
        assert_eq!(hi, Q::from_int(2));
        assert_eq!(hi, lo);
    }

    #[test]
    fn hn_extremes_all_zero() {
        let curve = smooth(&[(0, 1)]);
        let profile = HnProfile::<Q>::new(vec![None]).unwrap();
        assert_eq!(
            hn_extremes(&curve, &profile).unwrap_err(),
            InvariantError::AllComponentsZero
        );
    }

    #[test]
    fn d_window_worked_examples() {
        let curve = smooth(&[(0, 1), (0, 1)]);
        let kappa = KappaVector::new(vec![Q::from_int(1)]).unwrap();
        let (d, check) = d_window(&curve, Some(2), &[2], &kappa).unwrap();
        assert_eq!(d, Q::from_int(8));
        // Windows around invented extremes.
        assert!(check.check(
            &Q::from_int(3),
            &Q::from_int(-1),
            &Q::from_int(-2),
            &Q::from_int(1)
        ));
        assert!(!check.check(
            &Q::from_int(3),
            &Q::from_int(4),
            &Q::from_int(-2),
            &Q::from_int(1)
        ));

        let tiny = smooth(&[(0, 1)]);
        let half = KappaVector::new(vec![Q::ratio(1, 2)]).unwrap();
        let (d, _) = d_window(&tiny, Some(1), &[1], &half).unwrap();
        assert_eq!(d, Q::ratio(1, 2));
    }

    #[test]
    fn d_window_collapses_without_parabolic_data() {
        let curve = smooth(&[(0, 1), (0, 1)]);
        let kappa = KappaVector::new(vec![Q::from_int(1)]).unwrap();
        let (d, check) = d_window(&curve, Some(2), &[0], &kappa).unwrap();
        assert_eq!(d, Q::from_int(0));
        let v = Q::ratio(5, 3);
        assert!(check.check(&v, &v, &v, &v));
    }

    #[test]
    fn euler_calculus_examples() {
        let curve = smooth(&[(0, 1), (0, 1)]);
        assert_eq!(
            euler_calculus(&curve, Some(2), 3, &EulerOp::Twist(vec![2, 1])).unwrap(),
            9
        );
        assert_eq!(
            euler_calculus(&curve, Some(2), 3, &EulerOp::Twist(vec![5, -5])).unwrap(),
            3
        );
        // Glued curve with euler_o = 1: dual of (r=2, chi=2) keeps chi = 2.
        let nodal = CurveData {
            components: vec![
                Component { genus: 0, ell: 1 },
                Component { genus: 0, ell: 1 },
            ],
            marked_pairs: vec![(0, 1)],
            connected: true,
        };
        assert_eq!(
            euler_calculus(&nodal, Some(2), 2, &EulerOp::Dual).unwrap(),
            2
        );
        assert_eq!(
            euler_calculus(&nodal, Some(2), 5, &EulerOp::OmegaDual).unwrap(),
            -5
        );
        assert_eq!(canonical_degree_sum(&nodal), -2);
        assert_eq!(
            euler_calculus(&nodal, None, 2, &EulerOp::Dual).unwrap_err(),
            InvariantError::NonUniformRank
        );
    }

    #[test]
    fn dual_iso_examples() {
        let nodal = CurveData {
            components: vec![
                Component { genus: 0, ell: 1 },
                Component { genus: 0, ell: 1 },
            ],
            marked_pairs: vec![(0, 1)],
            connected: true,
        };
        assert!(dual_iso_criterion(&nodal, Some(3), 3).unwrap());
        assert!(!dual_iso_criterion(&nodal, Some(3), 2).unwrap());
    }
}
