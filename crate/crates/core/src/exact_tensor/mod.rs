//! Exact scalars, the ħ-truncated jet ring, and labeled dense tensors.

pub mod jet;
pub mod ring;
pub mod scalar;
pub mod tensor;

pub use jet::HbarJet;
pub use ring::{Field, Ring};
pub use scalar::{fmt_q, parse_q, q, qf, show_q, Q};
pub use tensor::{dual_label, Axis, Kind, LabeledTensor, TResult, TensorError};

/// Shorthand for a tensor of rationals.
pub type QTensor = LabeledTensor<Q>;
