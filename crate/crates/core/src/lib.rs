//! Growth rates of bilinear systems and joint spectral radii of matrix sets.
//!
//! * [`scalar`] and [`linalg`]: exact-rational / `f64` scalars, vectors,
//!   matrices and the ℓ1 / ℓ∞ norms.
//! * [`bilinear`]: sparse bilinear maps and systems `(B, v)`.
//! * [`growth`]: the levels `A_t(B, v)`, `λ_t` and growth profiles.
//! * [`jsr`]: product enumeration, upper/lower JSR brackets, zero-JSR
//!   decision.
//! * [`reduction`]: the bilinear map whose growth rates encode the JSR of a
//!   matrix set; [`joint`] folds several bilinear maps into one.
//! * [`oracle`]: independent brute-force references and checkers.

pub mod bilinear;
pub mod error;
pub mod growth;
pub mod joint;
pub mod jsr;
pub mod limits;
pub mod linalg;
pub mod oracle;
pub mod reduction;
pub mod scalar;

pub use bilinear::{BilinearMap, BilinearSystem, Term};
pub use error::{Error, Result};
pub use growth::{GrowthProfile, LevelSet, Norm, Pruning};
pub use joint::{build_joint_reduction, JointReduction};
pub use jsr::{JsrBracket, MatrixSet};
pub use limits::Limits;
pub use linalg::{Matrix, Vector};
pub use oracle::Report;
pub use reduction::{build_reduction, ReductionArtifact};
pub use scalar::{Mode, Scalar};
