//! Convex mixture of the contribution and sampling rules, and the parameter
//! choice that equalizes their worst cases.
//!
//! With `r = v_(2)/v_(1)`, the mixture guarantees
//! `q/2 (1 - r) + (1 - q) p (1 - p) (1 + p r)`. Picking
//! `q = 2p^2(1-p) / (1 + 2p^2(1-p))` cancels the `r` term and leaves
//! `p (1 - p^2) / (1 + 2p^2(1-p))`, maximized at the root of
//! `2x^4 - 4x^3 + 5x^2 - 1` in `(0.5, 0.6)`.

use super::allocation::{Allocation, AllocationRule};
use super::contribution::contribution_allocation;
use super::sampling::{sampling_interim, InterimMode};
use crate::error::{Error, Result};
use crate::valuation::{AuctionInstance, SignalProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    /// Probability an agent is placed in the sample set.
    pub p: f64,
    /// Probability of running the contribution rule.
    pub q: f64,
}

impl MixtureParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling bias p = {p} must lie in (0, 1)"
            )));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight q = {q} must lie in [0, 1]"
            )));
        }
        Ok(MixtureParams { p, q })
    }

    /// `p` together with the `q` that cancels the `v_(2)/v_(1)` term.
    pub fn balanced(p: f64) -> Result<Self> {
        MixtureParams::new(p, balancing_weight(p))
    }

    /// Per-profile welfare guarantee given `r = v_(2)/v_(1)`.
    pub fn bound(&self, r: f64) -> f64 {
        self.q * contribution_bound(r) + (1.0 - self.q) * sampling_bound(self.p, r)
    }
}

/// `q = 2p^2(1-p) / (1 + 2p^2(1-p))`.
pub fn balancing_weight(p: f64) -> f64 {
    let t = 2.0 * p * p * (1.0 - p);
    t / (1.0 + t)
}

/// `p (1 - p^2) / (1 + 2p^2(1-p))`: the mixture guarantee at the balancing `q`.
pub fn balanced_ratio(p: f64) -> f64 {
    p * (1.0 - p * p) / (1.0 + 2.0 * p * p * (1.0 - p))
}

/// Contribution-rule guarantee `(1 - r) / 2`.
pub fn contribution_bound(r: f64) -> f64 {
    0.5 * (1.0 - r)
}

/// Sampling-rule guarantee `p(1-p)(1 + p r)`.
pub fn sampling_bound(p: f64, r: f64) -> f64 {
    p * (1.0 - p) * (1.0 + p * r)
}

/// `2x^4 - 4x^3 + 5x^2 - 1`, whose root in `(0.5, 0.6)` maximizes
/// [`balanced_ratio`].
pub fn optimality_polynomial(x: f64) -> f64 {
    ((2.0 * x - 4.0) * x + 5.0) * x * x - 1.0
}

/// Bisection on a sign-changing bracket until its width drops below `width`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidParameter(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalParams {
    pub params: MixtureParams,
    /// Guaranteed welfare fraction at the optimum.
    pub ratio: f64,
    /// `|2p^4 - 4p^3 + 5p^2 - 1|` at the computed root.
    pub residual: f64,
}

impl OptimalParams {
    /// Approximation factor `1 / ratio`.
    pub fn approximation(&self) -> f64 {
        1.0 / self.ratio
    }
}

pub fn optimal_params() -> OptimalParams {
    let p = bisect(optimality_polynomial, 0.5, 0.6, 1e-14)
        .expect("the polynomial changes sign on [0.5, 0.6]");
    OptimalParams {
        params: MixtureParams {
            p,
            q: balancing_weight(p),
        },
        ratio: balanced_ratio(p),
        residual: optimality_polynomial(p).abs(),
    }
}

/// `q * contribution + (1 - q) * sampling(p)`. A component with zero weight
/// is not evaluated.
pub fn combined_allocation(
    inst: &AuctionInstance,
    s: &SignalProfile,
    params: MixtureParams,
    mode: InterimMode,
) -> Result<Allocation> {
    let MixtureParams { p, q } = params;
    if q >= 1.0 {
        return contribution_allocation(inst, s);
    }
    let sampled = sampling_interim(inst, s, p, mode)?;
    if q <= 0.0 {
        return Ok(sampled);
    }
    Ok(contribution_allocation(inst, s)?.blend(q, &sampled))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureRule {
    pub params: MixtureParams,
    pub mode: InterimMode,
}

impl MixtureRule {
    pub fn optimal() -> Self {
        MixtureRule {
            params: optimal_params().params,
            mode: InterimMode::exact(),
        }
    }
}

impl AllocationRule for MixtureRule {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        combined_allocation(inst, s, self.params, self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_instance;
    use crate::mechanisms::contribution::contribution_allocation;

    #[test]
    fn optimal_values() {
        let opt = optimal_params();
        assert!(opt.residual < 1e-12);
        assert!((opt.params.p - 0.54056).abs() < 5e-5);
        assert!((opt.params.q - 0.21167).abs() < 5e-5);
        assert!((opt.ratio - 0.30162).abs() < 1e-5);
        assert!((opt.approximation() - 3.31543).abs() < 1e-4);
    }

    #[test]
    fn root_maximizes_balanced_ratio() {
        // Dense scan of the guarantee curve as an independent check.
        let opt = optimal_params();
        let (best_p, best) = (1..10_000)
            .map(|k| k as f64 / 10_000.0)
            .map(|p| (p, balanced_ratio(p)))
            .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        assert!((best_p - opt.params.p).abs() < 2e-4);
        assert!(opt.ratio >= best - 1e-12);
    }

    #[test]
    fn balancing_weight_cancels_ratio_term() {
        for p in [0.1, 0.3, 0.5, 0.54, 0.8] {
            let m = MixtureParams::balanced(p).unwrap();
            let at0 = m.bound(0.0);
            let at1 = m.bound(1.0);
            assert!((at0 - at1).abs() < 1e-12);
            assert!((at0 - balanced_ratio(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoints_reproduce_components() {
        let inst = worked_instance();
        let s = SignalProfile::new(vec![2, 1]);
        let mode = InterimMode::exact();
        let samp = sampling_interim(&inst, &s, 0.5, mode).unwrap();
        let contrib = contribution_allocation(&inst, &s).unwrap();
        let q0 =
            combined_allocation(&inst, &s, MixtureParams::new(0.5, 0.0).unwrap(), mode).unwrap();
        let q1 =
            combined_allocation(&inst, &s, MixtureParams::new(0.5, 1.0).unwrap(), mode).unwrap();
        assert_eq!(q0, samp);
        assert_eq!(q1, contrib);
    }

    #[test]
    fn worked_mixture_values() {
        let inst = worked_instance();
        let s = SignalProfile::new(vec![2, 1]);
        let opt = optimal_params().params;
        let mode = InterimMode::exact();
        // q* with the p = 1/2 sampling component.
        let half = MixtureParams::new(0.5, opt.q).unwrap();
        let x = combined_allocation(&inst, &s, half, mode).unwrap();
        assert!((x.x[0] - 0.4577).abs() < 1e-4);
        assert!((x.x[1] - 0.2183).abs() < 1e-4);
        // Both components at p*: sampling gives (1 - p*, p*(1 - p*)).
        let x = combined_allocation(&inst, &s, opt, mode).unwrap();
        let p = opt.p;
        let expect0 = opt.q * 0.3 + (1.0 - opt.q) * (1.0 - p);
        let expect1 = opt.q * 0.1 + (1.0 - opt.q) * p * (1.0 - p);
        assert!((x.x[0] - expect0).abs() < 1e-12);
        assert!((x.x[1] - expect1).abs() < 1e-12);
    }

    #[test]
    fn params_validate() {
        assert!(MixtureParams::new(0.0, 0.5).is_err());
        assert!(MixtureParams::new(1.0, 0.5).is_err());
        assert!(MixtureParams::new(0.5, 1.1).is_err());
        assert!(MixtureParams::new(0.5, 1.0).is_ok());
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        let r = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
