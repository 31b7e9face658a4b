//! Generalized semifield groups `G(α, β)` over prime fields.
//!
//! The crate builds the group on `V × V × W` from a nonsingular biadditive
//! map `α` and an arbitrary biadditive `β`, checks its semi-extraspecial
//! structure, counts and exhibits abelian complements through the linear map
//! `φ_α`, relates maps up to isotopism and anti-isotopism, and cross-checks
//! all of it against brute-force multiplication tables at tiny orders.

pub mod bilinear;
pub mod complements;
pub mod embed;
pub mod error;
pub mod format;
pub mod group;
pub mod isotopy;
pub mod linalg;
pub mod oracle;

pub use bilinear::{AlternatingCoords, BilinearMap};
pub use embed::Class2Data;
pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
pub use isotopy::{Isotopism, IsotopyKind};
pub use linalg::{Budget, FieldParams, FpMatrix, FpVector};
