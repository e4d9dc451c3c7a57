//! Semi-derivatives of solutions of linearly constrained convex QPs with
//! respect to their data, and model-targeted data-poisoning attacks built
//! on them.
//!
//! The crate is `no_std` (it needs `alloc`). IO, datasets and the
//! command-line driver live in the `semidiff` crate.
#![no_std]

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod attack;
pub mod qp;
pub mod sensitivity;
pub(crate) mod random;
pub mod victim;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use qp::{kkt_residuals, solve_qp, solve_qp_with, KktResiduals, KktSolution, QpOptions, QpProblem};
pub use victim::{SvmModel, ToyBilevelModel, VictimModel};
