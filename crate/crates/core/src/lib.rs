//! Moments of Gaussian chaoses and the generic-chaining machinery behind
//! their estimation.
//!
//! * [`tensor`]: dense tensors, contractions and the set-partition lattice.
//! * [`norms`]: the partition norms `‖A‖_P`.
//! * [`chaos`]: Monte Carlo moments of decoupled and coupled chaoses, the
//!   partition-sum bound and probes of the supporting inequalities.
//! * [`chaining`]: covering numbers, Dudley's integral, admissible sequences
//!   and the tensor-induced distance families.
//! * [`suite`]: reproducible verification suites used by the `gchaos` binary.

pub mod chaining;
pub mod chaos;
pub mod error;
pub mod mc;
pub mod norms;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
