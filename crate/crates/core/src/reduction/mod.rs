//! Lifting SOS valuations to strong-SOS ones.
//!
//! Signal `s` of an agent is placed at `c_s = c + c^2 + ... + c^s` on an
//! extended integer line, and every extended signal is split between its two
//! nearest grid points. The lifted valuation is the expectation of
//! `v(s) + epsilon |s|_1` under that split. With `c` at least
//! `max v_(1) / epsilon + 1`, segment slopes shrink fast enough that the
//! lifted valuation has decreasing increments in every coordinate.

pub mod build;
pub mod properties;
pub mod transfer;

pub use build::{base_for, build_reduced, grid_points, Decomposition, ReducedInstance};
pub use properties::{
    check_concave_sequences, check_cross_grid_domination, ConcavityViolation, DominationViolation,
};
pub use transfer::{measure_transfer, verify_reduction_transfer, InducedRule, TransferReport};
