//! Single transition-layer steady states of mass-conserving bistable
//! reaction–diffusion systems
//!
//! ```text
//! u_t = ε² u_xx + f(u, v),   v_t = D v_xx − f(u, v),   x ∈ (0, 1),
//! ```
//!
//! with Neumann boundary conditions and conserved mass ∫(u + v) dx = ξ.
//!
//! The crate builds the matched-asymptotic layer solution, refines it to an
//! exact discrete steady state and decides its stability by an asymptotic
//! eigenvalue formula, an Evans function, a direct eigensolver and a
//! conservative time integrator.

pub mod branch;
pub mod config;
pub mod error;
pub mod layer;
pub mod model;
pub mod numerics;
pub mod report;
pub mod simulate;
pub mod spectrum;
pub mod steady;

pub use branch::{find_v_star, BranchData};
pub use error::{Error, Result};
pub use model::{builtin_cubic, validate_assumptions, BistableModel, ProblemParams, ValidationReport};
