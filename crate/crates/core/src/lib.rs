//! Multi-sector capacity expansion planning models and the Benders
//! decomposition algorithms that solve them.
//!
//! The crate is organised around a pipeline:
//!
//! 1. [`caseio`] loads a case directory into a [`model::SystemSpec`].
//! 2. [`aggregate`] optionally clusters the horizon into weighted
//!    representative subperiods.
//! 3. [`model`] validates the spec into an immutable [`model::System`].
//! 4. [`builder`] assembles LPs: the monolithic problem, per-block
//!    operational subproblems, upper (master) problems and the level-set
//!    regularization problem.
//! 5. [`lp`] solves them with a dense revised simplex that reports dual
//!    multipliers.
//! 6. [`engine`] drives the decomposition loops; [`executor`] solves the
//!    independent subproblem batches in parallel.

pub mod aggregate;
pub mod builder;
pub mod caseio;
pub mod engine;
pub mod executor;
pub mod lp;
pub mod model;
