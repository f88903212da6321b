//! Transfer between a nodal curve and its normalization.
//!
//! A torsion-free sheaf on a nodal curve pulls back to the normalization,
//! where killing torsion leaves a locally free sheaf with a generalized
//! parabolic structure at the preimages of the nodes. The stalk at a node
//! splits as a free part of rank `a` and a maximal-ideal part; the transfer
//! shifts the Euler characteristic by `a` and contributes a GPS space of
//! dimension `a` per node. With the all-ones weight vector the parabolic
//! Euler characteristic on the normalization equals the plain one
//! downstairs, total ranks agree stepwise, and `mu` is blind to the change,
//! so every delta-verdict crosses the transfer unchanged.

use crate::filtration::{
    merge_flags, ComponentFlag, FiltrationError, FlagShape, Instance, MergedFiltration,
    TensorSupport,
};
use crate::invariant::KappaVector;
use crate::model::{
    validate_instance, CurveData, LocalType, ModelError, SheafData, SubsheafRecord,
};
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("nodal instance invalid: {0:?}")]
    InvalidInstance(Vec<ModelError>),
    #[error("nodal transfer needs uniform rank")]
    NonUniformRank,
    #[error("nodal transfer needs node types on the sheaf")]
    MissingNodeTypes,
    #[error("step node type {value} at node {node} exceeds the ambient type {max}")]
    StepNotDominatedByAmbient { node: usize, value: u64, max: u64 },
    #[error("step node type {value} at node {node} exceeds the step rank bound {max}")]
    StepNodeTypeOutOfRange { node: usize, value: u64, max: u64 },
    #[error("every component one-parameter subgroup is constant")]
    TrivialReduction,
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
}

/// A subsheaf on the nodal side: multirank, Euler characteristic, and the
/// free rank of its stalk at each node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodalSubsheaf {
    pub multirank: Vec<u64>,
    pub euler: i64,
    pub node_types: Vec<u64>,
}

/// A semistability instance on a nodal curve: uniform-rank sheaf with node
/// types, tensor type, and a family of flags whose steps carry their own
/// node types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodalInstance {
    pub curve: CurveData,
    pub sheaf: SheafData,
    pub arity: usize,
    pub copies: u64,
    pub flags: Vec<(Vec<NodalSubsheaf>, TensorSupport)>,
}

impl NodalInstance {
    fn ambient_node_types(&self) -> Result<&[u64], TransferError> {
        self.sheaf
            .node_types()
            .ok_or(TransferError::MissingNodeTypes)
    }

    fn validate(&self) -> Result<u64, TransferError> {
        let validated =
            validate_instance(&self.curve, &self.sheaf).map_err(TransferError::InvalidInstance)?;
        let rank = validated
            .uniform_rank
            .ok_or(TransferError::NonUniformRank)?;
        let ambient_types = self.ambient_node_types()?;
        for (steps, _) in &self.flags {
            for step in steps {
                if step.node_types.len() != ambient_types.len()
                    || step.multirank.len() != self.curve.num_components()
                {
                    return Err(TransferError::InvalidInstance(vec![
                        ModelError::LocalTypeLengthMismatch {
                            got: step.node_types.len(),
                            expected: ambient_types.len(),
                        },
                    ]));
                }
                for (node, (&a, &ambient)) in step.node_types.iter().zip(ambient_types).enumerate()
                {
                    if a > ambient {
                        return Err(TransferError::StepNotDominatedByAmbient {
                            node,
                            value: a,
                            max: ambient,
                        });
                    }
                    let (mu, nu) = self.curve.marked_pairs[node];
                    let max = step.multirank[mu].min(step.multirank[nu]);
                    if a > max {
                        return Err(TransferError::StepNodeTypeOutOfRange {
                            node,
                            value: a,
                            max,
                        });
                    }
                }
            }
        }
        Ok(rank)
    }
}

/// Transfers one subsheaf: same multirank, Euler characteristic shifted by
/// the total free rank at the nodes, node types becoming GPS dimensions.
pub fn transfer_subsheaf(step: &NodalSubsheaf) -> SubsheafRecord {
    let shift: i64 = step.node_types.iter().map(|&a| a as i64).sum();
    SubsheafRecord {
        multirank: step.multirank.clone(),
        euler: step.euler + shift,
        gps_dims: step.node_types.clone(),
    }
}

/// Transfers a whole flag. Total ranks are preserved stepwise by
/// construction (the multiranks do not change), which makes `mu` agree for
/// every weight vector and every support; the `chi` identity under the
/// all-ones weights is asserted per step.
pub fn transfer_filtration(
    instance: &NodalInstance,
    steps: &[NodalSubsheaf],
    support: &TensorSupport,
) -> Result<FlagShape, TransferError> {
    let ambient_types = instance.ambient_node_types()?;
    for step in steps {
        if step.node_types.len() != ambient_types.len() {
            return Err(TransferError::InvalidInstance(vec![
                ModelError::LocalTypeLengthMismatch {
                    got: step.node_types.len(),
                    expected: ambient_types.len(),
                },
            ]));
        }
        for (node, (&a, &ambient)) in step.node_types.iter().zip(ambient_types).enumerate() {
            if a > ambient {
                return Err(TransferError::StepNotDominatedByAmbient {
                    node,
                    value: a,
                    max: ambient,
                });
            }
        }
    }
    let transferred: Vec<SubsheafRecord> = steps.iter().map(transfer_subsheaf).collect();
    for (step, upstairs) in steps.iter().zip(&transferred) {
        let gps_sum: i64 = upstairs.gps_dims.iter().map(|&d| d as i64).sum();
        assert_eq!(
            upstairs.euler - gps_sum,
            step.euler,
            "chi under kappa = 1 is preserved"
        );
        assert_eq!(
            upstairs.multirank, step.multirank,
            "total ranks are preserved stepwise"
        );
    }
    Ok(FlagShape {
        steps: transferred,
        support: support.clone(),
    })
}

/// Transfers a whole instance to the normalization: the curve keeps its
/// components with the marked pairs now read as GPS pairs, the sheaf gains
/// `sum a_i` in its Euler characteristic and GPS types `t_i = a_i`, and
/// `kappa` is the all-ones vector. The identity
/// `chi_1(F, q) = chi(E)` is asserted, as is the stepwise agreement of the
/// filtration terms.
pub fn transfer_to_normalization<S: Scalar>(
    instance: &NodalInstance,
) -> Result<Instance<S>, TransferError> {
    instance.validate()?;
    let ambient_types = instance.ambient_node_types()?.to_vec();
    let shift: i64 = ambient_types.iter().map(|&a| a as i64).sum();
    let curve = CurveData {
        components: instance.curve.components.clone(),
        marked_pairs: instance.curve.marked_pairs.clone(),
        connected: false,
    };
    let sheaf = SheafData {
        multirank: instance.sheaf.multirank.clone(),
        euler: instance.sheaf.euler + shift,
        local_type: LocalType::GpsTypes(ambient_types.clone()),
    };
    let kappa = KappaVector::<S>::ones(curve.num_pairs());

    // chi_1(F, q) = chi(F) - sum t_i = chi(E).
    let chi_one = sheaf.euler - shift;
    assert_eq!(
        chi_one, instance.sheaf.euler,
        "transfer must preserve chi under kappa = 1"
    );

    let shapes: Vec<FlagShape> = instance
        .flags
        .iter()
        .map(|(steps, support)| transfer_filtration(instance, steps, support))
        .collect::<Result<_, _>>()?;

    Ok(Instance::new(
        curve,
        sheaf,
        Some(kappa),
        instance.arity,
        instance.copies,
        shapes,
    )?)
}

/// The plain-chi instance downstairs, for comparing verdicts across the
/// transfer.
pub fn nodal_side_instance<S: Scalar>(
    instance: &NodalInstance,
) -> Result<Instance<S>, TransferError> {
    instance.validate()?;
    let shapes: Vec<FlagShape> = instance
        .flags
        .iter()
        .map(|(steps, support)| FlagShape {
            steps: steps
                .iter()
                .map(|step| SubsheafRecord {
                    multirank: step.multirank.clone(),
                    euler: step.euler,
                    gps_dims: Vec::new(),
                })
                .collect(),
            support: support.clone(),
        })
        .collect();
    Ok(Instance::new(
        instance.curve.clone(),
        instance.sheaf.clone(),
        None,
        instance.arity,
        instance.copies,
        shapes,
    )?)
}

/// A reduction datum: one weighted flag per component, each trace-free
/// (weights pair to zero against the dimension jumps, as for a 1-PS of the
/// special linear group).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionDatum {
    pub component_flags: Vec<ComponentFlag>,
}

impl ReductionDatum {
    pub fn is_trivial(&self) -> bool {
        self.component_flags.iter().all(|flag| flag.dims.len() <= 1)
    }
}

/// Turns a reduction into the weighted filtration it induces, via the flag
/// merge. Each component flag must be trace-free, so the merge constraint
/// holds automatically; the reduction must be non-trivial.
pub fn reduction_to_filtration<S: Scalar>(
    curve: &CurveData,
    reduction: &ReductionDatum,
) -> Result<MergedFiltration<S>, TransferError> {
    if reduction.is_trivial() {
        return Err(TransferError::TrivialReduction);
    }
    for (component, flag) in reduction.component_flags.iter().enumerate() {
        if flag.weighted_dimension_sum() != 0 {
            return Err(FiltrationError::MalformedComponentFlag {
                component,
                reason: "reduction flags must be trace-free",
            }
            .into());
        }
    }
    Ok(merge_flags(curve, &reduction.component_flags)?)
}

/// `chi(E(beta)_bullet, m(beta)_bullet)` for a reduction-induced filtration
/// with caller-declared step Euler characteristics: the quantity whose sign
/// decides semistability of a singular principal bundle.
pub fn evaluate_reduction<S: Scalar>(
    ambient_euler: i64,
    alpha: i64,
    merged: &MergedFiltration<S>,
    step_eulers: &[i64],
    curve: &CurveData,
) -> Result<S, TransferError> {
    assert_eq!(step_eulers.len(), merged.levels.len());
    assert_eq!(alpha, merged.alpha, "reduction and sheaf ranks disagree");
    let steps: Vec<(S, i64)> = merged
        .levels
        .iter()
        .zip(step_eulers)
        .map(|(multirank, &chi)| (S::from_int(chi), curve.total_rank(multirank)))
        .collect();
    Ok(crate::filtration::chi_of_filtration(
        &S::from_int(ambient_euler),
        alpha,
        &steps,
        &merged.weights,
    )?)
}
