//! Numerical building blocks shared by the analysis modules.

pub mod banded;
pub mod grid;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod spline;

pub use grid::{level_crossing, UniformGrid};
