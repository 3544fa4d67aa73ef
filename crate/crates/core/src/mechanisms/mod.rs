//! Allocation rules, payment synthesis and incentive verification.

pub mod allocation;
pub mod contribution;
pub mod mixture;
pub mod payments;
pub mod rules;
pub mod sampling;

pub use allocation::{argmax, Allocation, AllocationRule, AllocationTable, FEASIBILITY_TOL};
pub use contribution::{
    contribution_allocation, contribution_breakdown, ContributionBreakdown, ContributionRule,
};
pub use mixture::{
    balanced_ratio, balancing_weight, contribution_bound, sampling_bound, combined_allocation, optimal_params, MixtureParams,
    MixtureRule, OptimalParams,
};
pub use payments::{
    check_ex_post_ic_ir, check_monotone_allocation, payments_discrete, AllocationMonotoneViolation,
    IncentiveViolation, OutcomeTable,
};
pub use rules::{EfficientRule, Mechanism, MechanismRule};
pub use sampling::{
    DEFAULT_EXACT_AGENT_CAP, DEFAULT_MONTE_CARLO_SAMPLES,
    proxy_value, sampling_interim, sampling_realize, InterimMode, Partition, SamplingRule,
};
