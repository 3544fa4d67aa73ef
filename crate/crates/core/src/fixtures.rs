//! Small hand-built instances used in documentation, tests and the CLI.

use crate::valuation::{AuctionInstance, Curve, Family, SignalSpace, Valuation};

fn linear(weights: Vec<f64>) -> Valuation {
    Valuation::family(Family::AdditiveConcave {
        weights,
        curve: Curve::Linear,
        offset: 0.0,
    })
}

/// Two agents with `v_1 = s_1 + 0.5 s_2` and `v_2 = s_2 + 0.5 s_1`, signals
/// `s_1 in 0..4`, `s_2 in 0..3` (12 profiles).
pub fn worked_instance() -> AuctionInstance {
    AuctionInstance::new(
        SignalSpace::new(vec![4, 3]).expect("static space"),
        vec![linear(vec![1.0, 0.5]), linear(vec![0.5, 1.0])],
    )
    .expect("static instance")
}

/// The worked instance with a third additive agent `v_3 = s_3 + 0.25 (s_1 + s_2)`.
pub fn worked_instance_three() -> AuctionInstance {
    AuctionInstance::new(
        SignalSpace::new(vec![4, 3, 3]).expect("static space"),
        vec![
            linear(vec![1.0, 0.5, 0.0]),
            linear(vec![0.5, 1.0, 0.0]),
            linear(vec![0.25, 0.25, 1.0]),
        ],
    )
    .expect("static instance")
}
