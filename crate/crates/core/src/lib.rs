//! Uniform sampling of fixed-rank elements in graded posets.
//!
//! Every sampler here walks the Hasse diagram of a graded poset with a lazy
//! Metropolis chain whose stationary law is the Boltzmann distribution
//! `pi(x) ∝ lambda^rank(x)`. Conditioning such a draw on its rank gives a
//! uniform element of that rank, so the remaining work is choosing a bias
//! under which the target rank is not too rare ([`balance`]) and producing
//! stationary draws, either by running the chain ([`poset::run_chain`]) or
//! exactly by monotone coupling from the past ([`cftp`]).
//!
//! Concrete posets:
//!
//! - [`partitions`]: Young diagrams restricted to a region, including the
//!   compressed sampler for unrestricted partitions of `n`.
//! - [`permutations`]: the weak Bruhat order graded by inversions.
//! - [`lozenge`]: plane partitions in a box graded by volume.
//!
//! [`counts`] holds exact big-integer oracles and [`diagnostics`] the exact
//! finite-chain analysis used to check the bias inequalities numerically.

pub mod balance;
pub mod cftp;
pub mod counts;
pub mod diagnostics;
mod error;
pub mod lozenge;
pub mod partitions;
pub mod permutations;
pub mod poset;
pub mod rng;

pub use error::{Error, Result};
