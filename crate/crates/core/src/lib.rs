//! Numerical harmonic analysis on the Heisenberg group `Hⁿ`.
//!
//! The crate is `no_std` and only needs `alloc`. It covers
//!
//! * the group law, dilations, the homogeneous norm and the induced distance ([`group`]),
//! * integration over boxes, balls, dyadic annuli and truncated `Hⁿ` ([`quadrature`]),
//! * graded matrices `(z, t) ↦ (Bz, a·t)` with their Heisenberg operator norm ([`graded`]),
//! * weights, Muckenhoupt `A_p` and reverse Hölder estimators ([`weights`]),
//! * weighted Lebesgue, Herz and central BMO norms ([`spaces`]),
//! * matrix Hausdorff operators, their commutators and the bound constants ([`hausdorff`]).
//!
//! Everything is deterministic: stochastic quadrature is driven by a seeded ChaCha stream and
//! reductions run in a fixed order.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod graded;
pub mod group;
pub mod hausdorff;
pub mod linalg;
pub mod quadrature;
pub mod rules;
pub mod spaces;
pub mod weights;

pub use error::{Error, Result};
pub use graded::{GradedMatrix, MatrixField};
pub use group::{Annulus, GroupDims, HPoint};
pub use hausdorff::{Kernel, TheoremCase, TheoremParams};
pub use quadrature::{Method, QuadResult, QuadSpec, Region};
pub use spaces::{HerzParams, TestFunction};
pub use weights::{Weight, WeightIndices};
