//! Contribution-based allocation.
//!
//! With `V = max_j v_j(s)` attained by agent `i*`, agent `i` receives
//! `(V - max_{j != i} v_j(s_{-i}, 0)) / (2V)`. The subtracted term is the
//! best welfare once `i` is removed and its signal zeroed; halving keeps the
//! total at most one on SOS instances.

use super::allocation::{argmax, Allocation, AllocationRule};
use crate::error::Result;
use crate::valuation::{AuctionInstance, SignalProfile};

/// Intermediate quantities of the contribution rule at one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionBreakdown {
    /// `i*`, or `None` when every value is zero.
    pub top: Option<usize>,
    pub top_value: f64,
    /// `max_{j != i} v_j(s_{-i}, 0)` per agent (0 for a lone agent).
    pub excluded_best: Vec<f64>,
    pub allocation: Allocation,
}

impl ContributionBreakdown {
    /// All valuations vanish at the profile and nothing is allocated.
    pub fn is_degenerate(&self) -> bool {
        self.top.is_none()
    }
}

pub fn contribution_breakdown(inst: &AuctionInstance, s: &SignalProfile) -> ContributionBreakdown {
    let n = inst.agents();
    let values = inst.values(s);
    let excluded_best: Vec<f64> = (0..n)
        .map(|i| {
            let zeroed = s.with(i, 0);
            (0..n)
                .filter(|&j| j != i)
                .map(|j| inst.value(j, &zeroed))
                .fold(0.0, f64::max)
        })
        .collect();
    let top = argmax(&values).filter(|&k| values[k] > 0.0);
    let top_value = top.map_or(0.0, |k| values[k]);
    let allocation = match top {
        None => Allocation::zeros(n),
        Some(_) => Allocation::new(
            excluded_best
                .iter()
                // Non-negative for monotone valuations; the clamp absorbs
                // the checker's 1e-9 slack on weak monotonicity.
                .map(|m| ((top_value - m) / (2.0 * top_value)).max(0.0))
                .collect(),
        ),
    };
    ContributionBreakdown {
        top,
        top_value,
        excluded_best,
        allocation,
    }
}

pub fn contribution_allocation(inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
    inst.space().validate(s)?;
    Ok(contribution_breakdown(inst, s).allocation)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContributionRule;

impl AllocationRule for ContributionRule {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        contribution_allocation(inst, s)
    }
}
