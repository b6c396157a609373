//! Certified lower bounds and heuristic upper bounds for minimizing
//! (possibly indefinite) quadratic functions over the ℓ¹-ball and ℓᵖ-balls
//! with 1 ≤ p ≤ 2.
//!
//! The ball problem is lifted to a standard quadratic program over the
//! simplex, bounded from below by a doubly-nonnegative SDP relaxation
//! solved with a first-order splitting method, and bounded from above by
//! multistart replicator dynamics. An exact enumeration oracle covers small
//! instances, and every relaxation bound comes with an independently
//! verifiable certificate. See the `bench` module for the comparison
//! harness and the `qpball` binary for the command-line interface.

pub mod bench;
pub mod bounds;
pub mod conic;
pub mod error;
pub mod io;
pub mod linalg;
pub mod local_search;
pub mod oracle;
pub mod reformulation;
pub mod rng;

pub use bounds::{BoundMethod, BoundResult, Certificate};
pub use conic::{SolverOptions, SolverStats};
pub use error::{Error, Result};
pub use linalg::SymMatrix;
pub use reformulation::{L1Instance, StqpInstance};
