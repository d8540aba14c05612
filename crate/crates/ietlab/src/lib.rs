//! Interval exchange transformations: Rauzy–Veech renormalization, substitution
//! codings, twisted Birkhoff sums and correlation experiments.

pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod iet;
pub mod lattice;
pub mod matrix;
pub mod observable;
pub mod perm;
pub mod renormalize;
pub mod runs;
pub mod scalar;
pub mod substitution;
pub mod twisted;

pub use error::{Error, Result};
pub use iet::Iet;
pub use perm::{Permutation, StepKind};
pub use scalar::Scalar;
