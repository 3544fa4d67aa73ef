//! Brute-force ground truth: optimal and expected welfare, ratio reports and
//! exhaustive checks of the inequalities behind the approximation bounds.

pub mod lemmas;
pub mod report;
pub mod welfare;

pub use lemmas::{
    deviation_triples, sampling_expectation, uses_general_deviation, verify_amortized_monotonicity,
    verify_sampling_lower_bound, verify_value_deviation, AmortizedReport, AmortizedViolation,
    DeviationWitness, SamplingLowerBound, AMORTIZED_AGENT_CAP, GENERAL_DEVIATION_CAP,
};
pub use report::{
    compute_ratio_report, ratio_report, RatioRecord, RatioReport, BOUND_TOL, MONTE_CARLO_BOUND_TOL,
};
pub use welfare::{expected_welfare, optimal_welfare, sampling_realized_welfare, TopValues};
