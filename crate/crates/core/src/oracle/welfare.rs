use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanisms::AllocationRule;
use crate::valuation::{AuctionInstance, SignalProfile};

/// Largest and second-largest single-agent values at a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopValues {
    pub v1: f64,
    /// Lowest-index agent attaining `v1`.
    pub top: usize,
    /// Best value among the other agents; 0 for a single agent.
    pub v2: f64,
}

impl TopValues {
    pub fn ratio(&self) -> f64 {
        if self.v1 > 0.0 {
            self.v2 / self.v1
        } else {
            1.0
        }
    }
}

pub fn optimal_welfare(inst: &AuctionInstance, s: &SignalProfile) -> TopValues {
    let values = inst.values(s);
    let mut top = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[top] {
            top = k;
        }
    }
    let v2 = values
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != top)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    TopValues {
        v1: values[top],
        top,
        v2,
    }
}

/// `sum_i x_i(s) v_i(s)` from the rule's interim allocation.
pub fn expected_welfare<R: AllocationRule + ?Sized>(
    inst: &AuctionInstance,
    rule: &R,
    s: &SignalProfile,
) -> Result<f64> {
    Ok(rule.allocate(inst, s)?.welfare(&inst.values(s)))
}

/// Expected true value of the sampling rule's realized winner, by direct
/// enumeration of all partitions. Shares no code with the interim
/// computation in the mechanisms module.
pub fn sampling_realized_welfare(
    inst: &AuctionInstance,
    s: &SignalProfile,
    p: f64,
    max_agents: usize,
) -> Result<f64> {
    let n = inst.agents();
    if n > max_agents.min(63) {
        return Err(Error::ExactCapExceeded {
            agents: n,
            cap: max_agents.min(63),
        });
    }
    let mut total = 0.0;
    for mask in 0..1u64 << n {
        let sampled = |k: usize| mask >> k & 1 == 1;
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !sampled(i)) {
            let probe = SignalProfile::new(
                (0..n)
                    .map(|k| if k == i || sampled(k) { s.get(k) } else { 0 })
                    .collect(),
            );
            let w = inst.value(i, &probe);
            if best.is_none_or(|(_, b)| w > b) {
                best = Some((i, w));
            }
        }
        if let Some((winner, _)) = best {
            let a = mask.count_ones() as i32;
            let weight = p.powi(a) * (1.0 - p).powi(n as i32 - a);
            total += weight * inst.value(winner, s);
        }
    }
    Ok(total)
}
