//! Differentiable conjugacies between one-dimensional maps.
//!
//! * [`algebra`]: exact rational-function arithmetic and the functional
//!   identities `H(F(x)) = G(F'(x)) H(x)` behind equal-multiplier families.
//! * [`maps`]: smooth and piecewise interval maps, the built-in catalog,
//!   Möbius compactification and JSON map specs.
//! * [`orbits`]: fixed points, periodic orbits of full unimodal maps,
//!   multiplier laws and invariant densities.
//! * [`linearize`]: Koenigs charts, basin extension, sampled conjugacies and
//!   their smoothness at kinks and junctions.
//! * [`normal_forms`]: fitting extended normal forms to saddle-node,
//!   pitchfork and border-collision families by multiplier matching.

pub mod algebra;
pub mod error;
pub mod linearize;
pub mod maps;
pub mod normal_forms;
pub mod numeric;
pub mod orbits;

pub use error::{Error, Result};
