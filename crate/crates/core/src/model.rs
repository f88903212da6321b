//! Curves, marked points, and discrete sheaf invariants.
//!
//! A curve is modeled by its dual graph: components carry a genus and the
//! degree of the fixed polarization, and marked pairs either glue to nodes
//! or carry a generalized parabolic structure on the disjoint smooth curve.
//! Sheaves are carried purely by discrete invariants (multirank, Euler
//! characteristic, local type at the marked pairs); nothing section-level is
//! ever stored.

use crate::scalar::Scalar;
use thiserror::Error;

/// One irreducible component: genus and polarization degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub genus: u64,
    /// deg of the polarization on this component; must be >= 1.
    pub ell: u64,
}

/// Dual-graph model of a (possibly reducible) curve with marked pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveData {
    pub components: Vec<Component>,
    /// The pairs `(mu_i, nu_i)` of component indices. Glued, they are the
    /// nodes of the curve; unglued, the GPS marked points on the smooth
    /// disjoint curve.
    pub marked_pairs: Vec<(usize, usize)>,
    /// Asserts that the glued curve is connected.
    pub connected: bool,
}

impl CurveData {
    pub fn smooth(components: Vec<Component>) -> Self {
        CurveData {
            components,
            marked_pairs: Vec::new(),
            connected: false,
        }
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Number of marked pairs, written `c` throughout.
    pub fn num_pairs(&self) -> usize {
        self.marked_pairs.len()
    }

    pub fn ell_sum(&self) -> i64 {
        self.components.iter().map(|comp| comp.ell as i64).sum()
    }

    /// Euler characteristic of the structure sheaf of the glued curve:
    /// `sum(1 - g_i) - c`.
    pub fn euler_o_glued(&self) -> i64 {
        self.euler_o_smooth() - self.num_pairs() as i64
    }

    /// Euler characteristic of the structure sheaf of the disjoint smooth
    /// curve (marked pairs not glued): `sum(1 - g_i)`.
    pub fn euler_o_smooth(&self) -> i64 {
        self.components
            .iter()
            .map(|comp| 1 - comp.genus as i64)
            .sum()
    }

    /// `euler_o` in the interpretation matching the sheaf's local type:
    /// GPS data lives on the disjoint smooth curve, node data (or none) on
    /// the glued curve.
    pub fn euler_o_for(&self, local_type: &LocalType) -> i64 {
        match local_type {
            LocalType::GpsTypes(_) => self.euler_o_smooth(),
            LocalType::NodeTypes(_) | LocalType::None => self.euler_o_glued(),
        }
    }

    /// Arithmetic genus of the glued curve, `1 - euler_o_glued`.
    pub fn arithmetic_genus(&self) -> i64 {
        1 - self.euler_o_glued()
    }

    /// Total rank of a multirank vector against this polarization.
    pub fn total_rank(&self, multirank: &[u64]) -> i64 {
        self.components
            .iter()
            .zip(multirank)
            .map(|(comp, &r)| comp.ell as i64 * r as i64)
            .sum()
    }

    fn glued_graph_is_connected(&self) -> bool {
        let n = self.num_components();
        if n <= 1 {
            return true;
        }
        let mut reached = vec![false; n];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.marked_pairs {
                if a >= n || b >= n {
                    continue;
                }
                let next = if a == v && !reached[b] {
                    b
                } else if b == v && !reached[a] {
                    a
                } else {
                    continue;
                };
                reached[next] = true;
                stack.push(next);
            }
        }
        reached.into_iter().all(|r| r)
    }
}

/// Local structure of the sheaf at the marked pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalType {
    /// No local data (smooth interpretation without GPS, or `c = 0`).
    None,
    /// Nodal interpretation: free rank `a_i` of the stalk at each node.
    NodeTypes(Vec<u64>),
    /// GPS interpretation: `t_i = dim R_i` at each marked pair.
    GpsTypes(Vec<u64>),
}

/// Discrete invariants of a torsion-free module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafData {
    pub multirank: Vec<u64>,
    pub euler: i64,
    pub local_type: LocalType,
}

impl SheafData {
    pub fn uniform_rank(&self) -> Option<u64> {
        let first = *self.multirank.first()?;
        self.multirank.iter().all(|&r| r == first).then_some(first)
    }

    pub fn gps_types(&self) -> Option<&[u64]> {
        match &self.local_type {
            LocalType::GpsTypes(t) => Some(t),
            _ => None,
        }
    }

    pub fn node_types(&self) -> Option<&[u64]> {
        match &self.local_type {
            LocalType::NodeTypes(a) => Some(a),
            _ => None,
        }
    }
}

/// Invariants of a saturated subsheaf on the GPS side. Realizability as an
/// actual saturated submodule is the caller's responsibility; only the rank
/// and GPS bounds are checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsheafRecord {
    pub multirank: Vec<u64>,
    pub euler: i64,
    /// `s_i = dim S_i` per marked pair; empty when there is no GPS.
    pub gps_dims: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("component {index} has polarization degree 0")]
    NonPositivePolarization { index: usize },
    #[error("marked pair {pair} references component {index} of {count}")]
    DanglingMarkedPoint {
        pair: usize,
        index: usize,
        count: usize,
    },
    #[error("curve asserted connected but the glued dual graph is not")]
    DisconnectedButAssertedConnected,
    #[error("local type at pair {pair} is {value}, allowed range 0..={max}")]
    NodeTypeOutOfRange { pair: usize, value: u64, max: u64 },
    #[error("sheaf carries {got} local entries for {expected} marked pairs")]
    LocalTypeLengthMismatch { got: usize, expected: usize },
    #[error("multirank has {got} entries for {expected} components")]
    MultirankLengthMismatch { got: usize, expected: usize },
    #[error("node types require uniform rank")]
    NodeTypesRequireUniformRank,
}

/// A curve/sheaf pair that passed validation, together with the derived
/// quantities every downstream operation consumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedInstance {
    pub curve: CurveData,
    pub sheaf: SheafData,
    pub euler_o: i64,
    pub arithmetic_genus: i64,
    pub total_rank: i64,
    pub uniform_rank: Option<u64>,
}

/// Consistency gate for all downstream operations. Total: collects every
/// diagnostic instead of stopping at the first.
pub fn validate_instance(
    curve: &CurveData,
    sheaf: &SheafData,
) -> Result<ValidatedInstance, Vec<ModelError>> {
    let mut diagnostics = Vec::new();
    let n = curve.num_components();
    for (index, comp) in curve.components.iter().enumerate() {
        if comp.ell == 0 {
            diagnostics.push(ModelError::NonPositivePolarization { index });
        }
    }
    for (pair, &(a, b)) in curve.marked_pairs.iter().enumerate() {
        for index in [a, b] {
            if index >= n {
                diagnostics.push(ModelError::DanglingMarkedPoint {
                    pair,
                    index,
                    count: n,
                });
            }
        }
    }
    if curve.connected && !curve.glued_graph_is_connected() {
        diagnostics.push(ModelError::DisconnectedButAssertedConnected);
    }
    if sheaf.multirank.len() != n {
        diagnostics.push(ModelError::MultirankLengthMismatch {
            got: sheaf.multirank.len(),
            expected: n,
        });
    }

    let c = curve.num_pairs();
    let uniform = sheaf.uniform_rank();
    match &sheaf.local_type {
        LocalType::None => {}
        LocalType::NodeTypes(types) => {
            if types.len() != c {
                diagnostics.push(ModelError::LocalTypeLengthMismatch {
                    got: types.len(),
                    expected: c,
                });
            }
            match uniform {
                Some(r) => {
                    for (pair, &a) in types.iter().enumerate() {
                        if a > r {
                            diagnostics.push(ModelError::NodeTypeOutOfRange {
                                pair,
                                value: a,
                                max: r,
                            });
                        }
                    }
                }
                None => diagnostics.push(ModelError::NodeTypesRequireUniformRank),
            }
        }
        LocalType::GpsTypes(types) => {
            if types.len() != c {
                diagnostics.push(ModelError::LocalTypeLengthMismatch {
                    got: types.len(),
                    expected: c,
                });
            }
            for (pair, &t) in types.iter().enumerate() {
                if let Some(&(a, b)) = curve.marked_pairs.get(pair) {
                    if a < n && b < n && sheaf.multirank.len() == n {
                        let max = sheaf.multirank[a] + sheaf.multirank[b];
                        if t > max {
                            diagnostics.push(ModelError::NodeTypeOutOfRange {
                                pair,
                                value: t,
                                max,
                            });
                        }
                    }
                }
            }
        }
    }

    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    Ok(ValidatedInstance {
        euler_o: curve.euler_o_for(&sheaf.local_type),
        arithmetic_genus: curve.arithmetic_genus(),
        total_rank: curve.total_rank(&sheaf.multirank),
        uniform_rank: uniform,
        curve: curve.clone(),
        sheaf: sheaf.clone(),
    })
}

/// The rank/degree calculus of the polarized curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicInvariants<S> {
    pub total_rank: i64,
    pub rank_ell: S,
    pub degree_ell: S,
}

/// `trk`, `rk_ell = trk / sum(ell)`, and `deg_ell = chi - rk_ell*(1 - p_a)`.
/// The Riemann–Roch identity holds by construction and `deg_ell` is additive
/// on short exact sequences.
pub fn basic_invariants<S: Scalar>(curve: &CurveData, sheaf: &SheafData) -> BasicInvariants<S> {
    let total_rank = curve.total_rank(&sheaf.multirank);
    let rank_ell = if total_rank == 0 {
        S::zero()
    } else {
        S::from_int(total_rank) / S::from_int(curve.ell_sum())
    };
    let chi = S::from_int(sheaf.euler);
    let euler_o = curve.euler_o_for(&sheaf.local_type);
    let degree_ell = chi - rank_ell.clone() * S::from_int(euler_o);
    BasicInvariants {
        total_rank,
        rank_ell,
        degree_ell,
    }
}
