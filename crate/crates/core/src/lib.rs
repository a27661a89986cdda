//! Deterministic simulator for multi-agent secure multiparty computation.
//!
//! Parties split private inputs into additive fragments over a prime ring and
//! seal each fragment to a decision maker. Decision makers aggregate what
//! they hold into party-anonymous intermediate conclusions and hand them to
//! a reputation-selected set of redundant agents, whose reports are accepted
//! by a threshold vote. [`threat`] and [`analysis`] estimate the adversary
//! success probabilities of the architecture.

pub mod actors;
pub mod analysis;
pub mod consensus;
pub mod crypto;
pub mod error;
pub mod harness;
pub mod rng;
pub mod threat;

pub use crypto::{Ring, RingValue};
pub use error::{Error, Result};

/// Default probability scalar.
pub type Prob = f64;
/// Single-precision probability scalar.
pub type Prob32 = f32;
/// Exact rational probability, for closed-form identities.
pub type ExactProb = num_rational::Rational64;
