//! Security analysis of B92-style quantum key distribution against an
//! eavesdropper who attacks the receiver's measurement result.
//!
//! The library models the attack in two equivalent structures (a
//! deterministic entangling machine and a probabilistic intercept-and-share
//! scheme), computes the eavesdropper's optimal success probability with its
//! interior/boundary branch logic, derives the Csiszár–Körner secret key
//! rate after inconclusive-discard post-processing, and simulates the whole
//! protocol on an imperfect linear-optics bench (lossy channels, noisy
//! entangled resource, inefficient on/off detectors).
//!
//! Start with the runnable examples (`cargo run --example fig5_key_rate`),
//! or the `sdqkd` binary for CSV parameter sweeps.

pub mod error;
pub mod qmath;
pub mod scenario;
pub mod eavesdrop;
pub mod keyrate;
pub mod optics;
pub mod selfcheck;
pub mod cli;

pub use error::{Error, Result};
