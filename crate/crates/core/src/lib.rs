//! Deterministic neuroevolution of recurrent agents on deceptive tasks.
//!
//! The crate evolves Elman recurrent networks with elitism and Gaussian
//! mutation, and scores them with one of several fitness-assignment
//! strategies:
//!
//! * objective distance to the goal,
//! * Novelty Search over final positions,
//! * Sugar Search, where agents are rewarded only for being the first to
//!   collect randomly placed reward cells,
//! * a weighted blend of distance and sugar,
//! * Pixel Novelty, rewarding the first agent to produce an unseen screen.
//!
//! Worlds are a continuous 2-D maze ([`maze`]) and two small channel-based
//! grid games ([`gridgames`]). [`harness`] runs batches of seeded runs and
//! writes CSV summaries; [`stats`] provides the descriptive statistics and
//! Student's t-test used in those summaries.

pub mod error;
pub mod evolution;
pub mod gridgames;
pub mod harness;
pub mod maze;
pub mod rng;
pub mod rnn;
pub mod stats;
pub mod strategies;

pub use error::{ConfigError, Error, Result};
