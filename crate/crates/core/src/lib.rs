//! Bell tests of an extended Wigner's-friend setup in which one laboratory is
//! uniformly accelerated.
//!
//! Bob's half of the experiment sees Alice's Minkowski field modes as two-mode
//! squeezed Rindler states. Tracing out the causally disconnected region turns
//! the shared state mixed, and the CHSH statistic `S` falls from `2 sqrt 2`
//! toward the classical bound as the acceleration grows.
//!
//! * [`fockspace`]: dense kets and operators on tensor-product spaces.
//! * [`rindler`]: squeeze/acceleration mapping and truncated Rindler states.
//! * [`wigner`]: the Bell setup, observables, and `S`.
//! * [`sweep`]: `S` over a grid of squeeze parameters, crossing detection,
//!   and output files.

pub mod error;
pub mod fockspace;
pub mod rindler;
pub mod sweep;
pub mod wigner;

pub use error::{Error, Result};
pub use fockspace::{DensityOperator, FactorDims, Ket};
pub use rindler::{AccelerationRatio, SqueezeParameter, TruncationSpec};
pub use sweep::{CrossingReport, SweepRow, SweepSpec};
pub use wigner::{BobObservables, ChshResult, ExperimentConfig, Mode};
