//! Stabilizing-correction splitting schemes built from pairs of explicit and
//! diagonally implicit Runge-Kutta methods, with linear stability analysis
//! and a reaction-diffusion benchmark.

pub mod benchmark;
pub mod cli;
pub mod stability;
pub mod stepper;
pub mod tableau;

pub use stepper::{NamedScheme, SchemeSpec, SplitSystem};
pub use tableau::{CorrectionCoefficients, PairKind, RkPair};
