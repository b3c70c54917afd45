//! Standing pulses of the FitzHugh-Nagumo system with a cubic inhibitor
//! nonlinearity, computed as constrained minimizers of a nonlocal energy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissible;
pub mod analysis;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod grid;
pub mod minimizer;
pub mod model;
pub mod operators;
pub mod stencil;

pub use error::{PulseError, Result};
pub use grid::{Grid, Profile};
pub use model::{ConstantsReport, Params};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
