//! Curvature identities of quasi-Kähler manifolds with Norden metric.
//!
//! A manifold is given by left-invariant data on a Lie group (structure
//! constants, metric, almost complex structure at the identity). From it the
//! crate builds the Levi-Civita connection, `∇J`, the torsion potential `Q`,
//! the natural connection `∇' = ∇ + Q` with totally skew torsion, and every
//! curvature tensor and scalar the identity catalog in [`suite`] checks.

pub mod curvature;
pub mod error;
pub mod manifest;
pub mod manifold;
pub mod norden;
pub mod report;
pub mod search;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
pub use manifold::{LieFrameManifold, ValidationOutcome};
pub use norden::{ClassLabel, NordenClass};
pub use suite::{run_suite, CheckResult, CheckStatus, VerificationReport};
pub use tensor::DenseTensor;

/// Identity check tolerance unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
