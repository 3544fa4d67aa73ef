//! Experiment plumbing: configuration, generated campaigns, end-to-end
//! pipelines, sweeps and exit codes for the command-line tool.

pub mod campaign;
pub mod checks;
pub mod config;
pub mod pipeline;
pub mod reduce;
pub mod sweep;

pub use campaign::{generate_campaign, CampaignInstance, CampaignSpec};
pub use checks::{lemma_suite, CheckOutcome, Status};
pub use config::{ExperimentConfig, InstanceSource, MechanismKind, ModeChoice, QChoice, VerifierToggles};
pub use pipeline::{load_instances, run_experiment, run_instance, InstanceOutcome, RunOutcome, RunSummary};
pub use reduce::{reduce_pipeline, ReduceOutcome};
pub use sweep::{default_grid, sweep, SweepResult, SweepRow};

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EnumerationCap { .. } | Error::ExactCapExceeded { .. } | Error::ReductionBlowup { .. } => EXIT_CAP,
        Error::BoundViolation { .. }
        | Error::NonMonotoneAllocation { .. }
        | Error::Verification(_)
        | Error::GenerationFailed { .. } => EXIT_VERIFY_FAILED,
        Error::SignalOutOfRange { .. }
        | Error::ArityMismatch { .. }
        | Error::InvalidSpace(_)
        | Error::InvalidValuation(_)
        | Error::InvalidParameter(_)
        | Error::Parse(_)
        | Error::Csv(_)
        | Error::Io(_) => EXIT_USAGE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::ReductionBlowup { required: 10, cap: 1 }), 3);
        assert_eq!(exit_code(&Error::EnumerationCap { profiles: 10, cap: 1 }), 3);
        assert_eq!(exit_code(&Error::Verification("x".into())), 1);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        let parse = serde_json::from_str::<serde_json::Value>("{").unwrap_err();
        assert_eq!(exit_code(&Error::Parse(parse)), 2);
    }
}
