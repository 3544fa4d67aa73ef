use std::fmt;

use super::allocation::{Allocation, AllocationRule};
use super::contribution::contribution_allocation;
use super::mixture::{combined_allocation, contribution_bound, sampling_bound, MixtureParams};
use super::sampling::{sampling_interim, InterimMode};
use crate::error::Result;
use crate::valuation::{AuctionInstance, SignalProfile};

/// The three allocation rules, with their per-profile welfare guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanism {
    Contribution,
    Sampling { p: f64 },
    Mixture(MixtureParams),
}

impl Mechanism {
    /// Guaranteed fraction of `v1` for top values `v1 >= v2`; 1 when `v1 = 0`.
    pub fn bound(&self, v1: f64, v2: f64) -> f64 {
        if v1 <= 0.0 {
            return 1.0;
        }
        let r = v2 / v1;
        match self {
            Mechanism::Contribution => contribution_bound(r),
            Mechanism::Sampling { p } => sampling_bound(*p, r),
            Mechanism::Mixture(params) => params.bound(r),
        }
    }

    pub fn with_mode(self, mode: InterimMode) -> MechanismRule {
        MechanismRule {
            mechanism: self,
            mode,
        }
    }

    pub fn exact(self) -> MechanismRule {
        self.with_mode(InterimMode::exact())
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::Contribution => write!(f, "contribution"),
            Mechanism::Sampling { p } => write!(f, "sampling(p={p})"),
            Mechanism::Mixture(m) => write!(f, "mixture(p={}, q={})", m.p, m.q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismRule {
    pub mechanism: Mechanism,
    pub mode: InterimMode,
}

impl AllocationRule for MechanismRule {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        match self.mechanism {
            Mechanism::Contribution => contribution_allocation(inst, s),
            Mechanism::Sampling { p } => sampling_interim(inst, s, p, self.mode),
            Mechanism::Mixture(params) => combined_allocation(inst, s, params, self.mode),
        }
    }
}

/// Gives the item outright to the highest-value agent (lowest index on ties).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EfficientRule;

impl AllocationRule for EfficientRule {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        inst.space().validate(s)?;
        let values = inst.values(s);
        Ok(match super::allocation::argmax(&values) {
            Some(w) => Allocation::unit(inst.agents(), w),
            None => Allocation::zeros(inst.agents()),
        })
    }
}
