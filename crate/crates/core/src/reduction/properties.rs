use serde::Serialize;

use super::build::ReducedInstance;
use crate::valuation::{SignalProfile, SLACK_TOL};
use crate::verdict::Verdict;

/// Step from `profile` along `coordinate` gains more than the step into it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityViolation {
    pub agent: usize,
    pub coordinate: usize,
    pub profile: SignalProfile,
    pub left_gain: f64,
    pub right_gain: f64,
}

/// `v(., c_{l+1}) - v(., c_l)` on coordinate `grid_coordinate` grows when
/// `coordinate` is raised from `profile`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationViolation {
    pub agent: usize,
    pub coordinate: usize,
    pub grid_coordinate: usize,
    pub segment: usize,
    pub profile: SignalProfile,
    pub low_gap: f64,
    pub high_gap: f64,
}

/// Every lifted valuation has non-increasing unit increments along every
/// coordinate of the extended space.
pub fn check_concave_sequences(reduced: &ReducedInstance) -> Verdict<ConcavityViolation> {
    let inst = reduced.instance();
    let space = inst.space();
    for s in space.iter() {
        for j in 0..space.agents() {
            let v = s.get(j);
            if v == 0 || v + 1 >= space.size(j) {
                continue;
            }
            for i in 0..inst.agents() {
                let mid = inst.value(i, &s);
                let left_gain = mid - inst.value(i, &s.with(j, v - 1));
                let right_gain = inst.value(i, &s.with(j, v + 1)) - mid;
                if right_gain > left_gain + SLACK_TOL {
                    return Verdict::Violation(ConcavityViolation {
                        agent: i,
                        coordinate: j,
                        profile: s,
                        left_gain,
                        right_gain,
                    });
                }
            }
        }
    }
    Verdict::Pass
}

/// For `k != j`, the jump of coordinate `k` across one grid segment is
/// non-increasing in the extended signal of `j`.
pub fn check_cross_grid_domination(reduced: &ReducedInstance) -> Verdict<DominationViolation> {
    let inst = reduced.instance();
    let space = inst.space();
    let n = space.agents();
    for s in space.iter() {
        for k in 0..n {
            // Coordinate k is overwritten below; visit each slice once.
            if s.get(k) != 0 {
                continue;
            }
            let grid = reduced.grid(k);
            for j in (0..n).filter(|&j| j != k) {
                let v = s.get(j);
                if v + 1 >= space.size(j) {
                    continue;
                }
                let up = s.with(j, v + 1);
                for segment in 0..grid.len() - 1 {
                    let (lo, hi) = (grid[segment] as usize, grid[segment + 1] as usize);
                    for i in 0..n {
                        let low_gap = inst.value(i, &s.with(k, hi)) - inst.value(i, &s.with(k, lo));
                        let high_gap =
                            inst.value(i, &up.with(k, hi)) - inst.value(i, &up.with(k, lo));
                        if high_gap > low_gap + SLACK_TOL {
                            return Verdict::Violation(DominationViolation {
                                agent: i,
                                coordinate: j,
                                grid_coordinate: k,
                                segment,
                                profile: s,
                                low_gap,
                                high_gap,
                            });
                        }
                    }
                }
            }
        }
    }
    Verdict::Pass
}
