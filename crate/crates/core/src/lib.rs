//! Exact verification toolkit for double Poisson brackets on free algebras, their trace
//! brackets on representation spaces, and the classical, quantum and dynamical exchange
//! relations built on them.

pub mod classical_rmatrix;
pub mod cli_harness;
pub mod double_bracket;
pub mod dynamical_shift;
pub mod error;
pub mod exact_tensor;
pub mod free_ncalgebra;
pub mod quantum_reflection;
pub mod report;
pub mod trace_poisson;

pub use error::{Result, YbxError};
pub use report::CheckReport;
