//! Exact semistability calculus for swamps on reducible curves.
//!
//! A swamp is a torsion-free sheaf with a tensor field, possibly decorated
//! with a generalized parabolic structure (GPS). This crate decides the
//! numerical semistability notions attached to such objects — the
//! `(kappa, delta)` and asymptotic conditions, the Hilbert–Mumford pairing
//! for block-embedded groups, the boundedness constant chain, and the
//! transfer between a nodal curve and its normalization — entirely in exact
//! rational arithmetic. There are no tolerances anywhere: every verdict is
//! the sign of an exactly computed rational number.
//!
//! The numeric core is generic over [`scalar::Scalar`]; the crate root
//! exposes the concrete aliases used by the CLI and the test suites.
//!
//! ```
//! use swampstab::filtration::{FlagShape, Instance, Mode, Strictness, TensorSupport};
//! use swampstab::model::{Component, CurveData, LocalType, SheafData, SubsheafRecord};
//! use swampstab::{Q, Scalar};
//!
//! // Rank-two sheaf of Euler characteristic 2 on a rational curve, tensor
//! // field nonvanishing on a rank-one subsheaf of the same characteristic.
//! let curve = CurveData::smooth(vec![Component { genus: 0, ell: 1 }]);
//! let ambient = SheafData { multirank: vec![2], euler: 2, local_type: LocalType::None };
//! let shape = FlagShape {
//!     steps: vec![SubsheafRecord { multirank: vec![1], euler: 2, gps_dims: vec![] }],
//!     support: TensorSupport::new(1, 2, vec![vec![1], vec![2]])?,
//! };
//! let instance = Instance::<Q>::new(curve, ambient, None, 1, 1, vec![shape])?;
//!
//! // The chi-term loses to the mu-term exactly at delta = 2.
//! let scan = instance.wall_scan()?;
//! assert_eq!(scan.walls, vec![Q::from_int(2)]);
//! assert!(instance.check(&Mode::Delta(Q::from_int(3)), Strictness::Stable)?.pass);
//! assert!(!instance.check(&Mode::Delta(Q::from_int(1)), Strictness::Semistable)?.pass);
//! # Ok::<(), swampstab::filtration::FiltrationError>(())
//! ```

pub mod cone;
pub mod filtration;
pub mod invariant;
pub mod io;
pub mod lp;
pub mod model;
pub mod nodal;
pub mod scalar;
pub mod weights;

pub use scalar::{Rational, Scalar};

/// Arbitrary-precision rational scalar, the default instantiation.
pub type Q = num_rational::BigRational;

/// Machine-word rational scalar for small exact computations.
pub type Q64 = num_rational::Rational64;
