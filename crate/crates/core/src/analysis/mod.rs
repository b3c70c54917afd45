//! Post-processing of computed pulses and randomized checks of the operator
//! inequalities.

pub mod lemma_suite;
pub mod linearize;
pub mod tail;
pub mod theorem2;

pub use lemma_suite::{verify_lemma_suite, SuiteReport};
pub use linearize::{linearize, LinearizationReport};
pub use tail::{fit_decay, hamiltonian_residual, max_interior};
pub use theorem2::{check_solution, check_theorem2, PropertyOptions, PropertyReport};
