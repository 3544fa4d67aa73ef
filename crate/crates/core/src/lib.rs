//! Truthful single-item auctions for interdependent valuations that are
//! submodular over signals (SOS).
//!
//! The crate provides three ex-post IC allocation rules (contribution-based,
//! biased random sampling and their optimized mixture), discrete payment
//! synthesis, exhaustive verifiers for incentive compatibility and every
//! welfare bound, brute-force welfare oracles, and the exponential remapping
//! that turns an SOS instance into a strong-SOS one.

pub mod error;
pub mod fixtures;
pub mod harness;
pub mod mechanisms;
pub mod oracle;
pub mod reduction;
pub mod valuation;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::Verdict;
