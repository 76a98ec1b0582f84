//! Noise-robust multi-round verification of delegated quantum computation.
//!
//! [`bounds`] holds the threshold calculus and exact tails, [`game`] the
//! avoidance game with an exact oracle, [`protocol`] the round-level model,
//! [`circuitsim`] a small state-vector simulator for the circuit claims, and
//! [`experiments`] the Monte Carlo harness behind the `robust-vqc` binary.

// Negated float comparisons are the NaN-rejecting form of parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod circuitsim;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod game;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
