use thiserror::Error;

use crate::valuation::SignalProfile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal {signal} of agent {agent} is outside 0..{size}")]
    SignalOutOfRange {
        agent: usize,
        signal: usize,
        size: usize,
    },

    #[error("profile has {got} coordinates, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid signal space: {0}")]
    InvalidSpace(String),

    #[error("invalid valuation: {0}")]
    InvalidValuation(String),

    #[error("enumeration refused: {profiles} profiles exceed the cap of {cap} (raise SOS_MAX_PROFILES to override)")]
    EnumerationCap { profiles: u128, cap: u128 },

    #[error(
        "exact interim computation refused for {agents} agents (cap {cap}); use monte-carlo mode"
    )]
    ExactCapExceeded { agents: usize, cap: usize },

    #[error("reduced signal space needs {required} profiles but the cap is {cap}; choose a larger epsilon")]
    ReductionBlowup { required: u128, cap: u128 },

    #[error("instance generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error(
        "allocation of agent {agent} decreases in own signal at {profile}: {lower} -> {upper}"
    )]
    NonMonotoneAllocation {
        agent: usize,
        profile: SignalProfile,
        lower: f64,
        upper: f64,
    },

    #[error("bound violated at {profile}: ratio {ratio} < bound {bound}")]
    BoundViolation {
        profile: SignalProfile,
        ratio: f64,
        bound: f64,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
