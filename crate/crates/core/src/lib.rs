//! No-swap-regret learning over combinatorial action sets with bandit
//! feedback.

pub mod action;
pub mod domains;
pub mod error;
pub mod estimator;
pub mod linalg;
pub mod geometry;
pub mod learners;
pub mod master;
pub mod regret;
pub mod rng;
pub mod spanner;

pub use action::{ActionVector, Policy};
pub use domains::{ActionSet, DomainKind};
pub use error::{Error, Result};
pub use spanner::{build_spanner, exploration_policy, Spanner};
