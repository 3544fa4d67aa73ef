//! Signal spaces, valuation representations, generators and exhaustive
//! property checkers.

pub mod checks;
pub mod function;
pub mod generate;
pub mod instance;
pub mod space;

pub use checks::{
    check_monotone, check_sos, check_sos_by_definition, check_strong_sos,
    check_strong_sos_by_definition, IncrementViolation, MonotoneViolation, SLACK_TOL,
};
pub use function::{Curve, Family, Valuation};
pub use generate::{generate_instance, GeneratorFamily, GeneratorParams};
pub use instance::{AuctionInstance, InstanceFile, ReductionMeta, ValuationEntry};
pub use space::{Limits, Profiles, SignalProfile, SignalSpace, DEFAULT_MAX_PROFILES};
