//! JSON schemas for instances, block representations, and reports.
//!
//! All rationals cross the process boundary as strings `"p/q"` (or plain
//! `"p"`); nothing is ever a float. Serialization goes through
//! [`crate::Q`], the crate's concrete scalar. Field order is fixed by
//! the struct definitions, so identical inputs produce identical bytes.

use crate::filtration::{FlagShape, Instance, TensorSupport};
use crate::invariant::KappaVector;
use crate::model::{Component, CurveData, LocalType, SheafData, SubsheafRecord};
use crate::nodal::{NodalInstance, NodalSubsheaf};
use crate::weights::{BlockGroupData, WeightSupport};
use crate::Q;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {text:?}: {reason}")]
    BadRational { text: String, reason: String },
    #[error("instance rejected: {0}")]
    Rejected(String),
}

pub fn parse_rational(text: &str) -> Result<Q, IoError> {
    Q::from_str(text.trim()).map_err(|e| IoError::BadRational {
        text: text.to_string(),
        reason: e.to_string(),
    })
}

pub fn rational_string(value: &Q) -> String {
    value.to_string()
}

/// Comma-separated rationals, as accepted on the command line.
pub fn parse_rational_list(text: &str) -> Result<Vec<Q>, IoError> {
    text.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(parse_rational)
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub genus: u64,
    pub ell: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SheafDoc {
    pub multirank: Vec<u64>,
    pub euler: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_types: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gps_types: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorDoc {
    pub a: usize,
    pub b: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDoc {
    pub multirank: Vec<u64>,
    pub euler: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gps_dims: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_types: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagDoc {
    pub steps: Vec<StepDoc>,
    pub support: Vec<Vec<usize>>,
}

/// The single instance document consumed by `check`, `walls`, `constants`,
/// and `transfer`. The sheaf's local type decides the interpretation:
/// `gps_types` with `kappa` on the normalization side, `node_types` without
/// `kappa` on the nodal side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub components: Vec<ComponentDoc>,
    #[serde(default)]
    pub marked_pairs: Vec<(usize, usize)>,
    #[serde(default)]
    pub connected: bool,
    #[serde(alias = "ambient")]
    pub sheaf: SheafDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<FlagDoc>,
}

impl InstanceDoc {
    pub fn curve(&self) -> CurveData {
        CurveData {
            components: self
                .components
                .iter()
                .map(|c| Component {
                    genus: c.genus,
                    ell: c.ell,
                })
                .collect(),
            marked_pairs: self.marked_pairs.clone(),
            connected: self.connected,
        }
    }

    pub fn sheaf_data(&self) -> Result<SheafData, IoError> {
        let local_type = match (&self.sheaf.node_types, &self.sheaf.gps_types) {
            (Some(_), Some(_)) => {
                return Err(IoError::Rejected(
                    "node_types and gps_types are mutually exclusive".into(),
                ))
            }
            (Some(node_types), None) => LocalType::NodeTypes(node_types.clone()),
            (None, Some(gps_types)) => LocalType::GpsTypes(gps_types.clone()),
            (None, None) => LocalType::None,
        };
        Ok(SheafData {
            multirank: self.sheaf.multirank.clone(),
            euler: self.sheaf.euler,
            local_type,
        })
    }

    pub fn kappa(&self) -> Result<Option<KappaVector<Q>>, IoError> {
        match &self.kappa {
            None => Ok(None),
            Some(entries) => {
                let parsed: Result<Vec<Q>, IoError> =
                    entries.iter().map(|e| parse_rational(e)).collect();
                let kappa =
                    KappaVector::new(parsed?).map_err(|e| IoError::Rejected(e.to_string()))?;
                Ok(Some(kappa))
            }
        }
    }

    pub fn tensor(&self) -> (usize, u64) {
        self.tensor.as_ref().map_or((1, 1), |t| (t.a, t.b))
    }

    pub fn is_nodal(&self) -> bool {
        self.sheaf.node_types.is_some()
    }

    /// Builds the GPS/plain-side instance for the filtration engine.
    pub fn to_instance(&self) -> Result<Instance<Q>, IoError> {
        let (arity, copies) = self.tensor();
        let shapes = self
            .flags
            .iter()
            .map(|flag| {
                let steps = flag
                    .steps
                    .iter()
                    .map(|step| SubsheafRecord {
                        multirank: step.multirank.clone(),
                        euler: step.euler,
                        gps_dims: step.gps_dims.clone().unwrap_or_default(),
                    })
                    .collect();
                let support =
                    TensorSupport::new(arity, flag.steps.len() + 1, flag.support.iter().cloned())
                        .map_err(|e| IoError::Rejected(e.to_string()))?;
                Ok(FlagShape { steps, support })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Instance::new(
            self.curve(),
            self.sheaf_data()?,
            self.kappa()?,
            arity,
            copies,
            shapes,
        )
        .map_err(|e| IoError::Rejected(e.to_string()))
    }

    /// Builds the nodal-side instance used by `transfer`.
    pub fn to_nodal_instance(&self) -> Result<NodalInstance, IoError> {
        if self.kappa.is_some() {
            return Err(IoError::Rejected(
                "a nodal instance carries no kappa".into(),
            ));
        }
        let (arity, copies) = self.tensor();
        let flags = self
            .flags
            .iter()
            .map(|flag| {
                let steps: Vec<NodalSubsheaf> = flag
                    .steps
                    .iter()
                    .map(|step| NodalSubsheaf {
                        multirank: step.multirank.clone(),
                        euler: step.euler,
                        node_types: step.node_types.clone().unwrap_or_default(),
                    })
                    .collect();
                let support =
                    TensorSupport::new(arity, flag.steps.len() + 1, flag.support.iter().cloned())
                        .map_err(|e| IoError::Rejected(e.to_string()))?;
                Ok((steps, support))
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(NodalInstance {
            curve: self.curve(),
            sheaf: self.sheaf_data()?,
            arity,
            copies,
            flags,
        })
    }

    /// The document for the transferred instance: GPS types, shifted Euler
    /// characteristics, all-ones kappa. Emitted by `transfer` and accepted
    /// unchanged by every other subcommand.
    pub fn transferred(&self) -> Result<InstanceDoc, IoError> {
        let nodal = self.to_nodal_instance()?;
        let upstairs = crate::nodal::transfer_to_normalization::<Q>(&nodal)
            .map_err(|e| IoError::Rejected(e.to_string()))?;
        let sheaf = SheafDoc {
            multirank: upstairs.ambient.multirank.clone(),
            euler: upstairs.ambient.euler,
            node_types: None,
            gps_types: upstairs.ambient.gps_types().map(|t| t.to_vec()),
        };
        let flags = upstairs
            .shapes
            .iter()
            .zip(&self.flags)
            .map(|(shape, original)| FlagDoc {
                steps: shape
                    .steps
                    .iter()
                    .map(|step| StepDoc {
                        multirank: step.multirank.clone(),
                        euler: step.euler,
                        gps_dims: Some(step.gps_dims.clone()),
                        node_types: None,
                    })
                    .collect(),
                support: original.support.clone(),
            })
            .collect();
        Ok(InstanceDoc {
            components: self.components.clone(),
            marked_pairs: self.marked_pairs.clone(),
            connected: false,
            sheaf,
            kappa: Some(vec!["1".to_string(); self.marked_pairs.len()]),
            tensor: self.tensor.clone(),
            flags,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDoc {
    pub rank: usize,
    pub ell: i64,
    pub degree: i64,
    pub support: Vec<Vec<i64>>,
}

/// Representation file for `verify-git`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlocksDoc {
    pub blocks: Vec<BlockDoc>,
}

impl BlocksDoc {
    pub fn to_group(&self) -> Result<(BlockGroupData, WeightSupport), IoError> {
        let group = BlockGroupData::new(
            self.blocks.iter().map(|b| b.rank).collect(),
            self.blocks.iter().map(|b| b.ell).collect(),
            self.blocks.iter().map(|b| b.degree).collect(),
        )
        .map_err(|e| IoError::Rejected(e.to_string()))?;
        let support = WeightSupport {
            per_block: self.blocks.iter().map(|b| b.support.clone()).collect(),
        };
        support
            .validate(&group)
            .map_err(|e| IoError::Rejected(e.to_string()))?;
        Ok((group, support))
    }
}
