//! Exhaustive property checkers for valuations on finite signal spaces.
//!
//! The fast checkers only inspect unit steps. Monotonicity, SOS and
//! strong-SOS are all closed under telescoping along unit steps, so the
//! local checks are equivalent to the quantified definitions. The
//! `*_by_definition` variants enumerate the quantifiers directly and are
//! intended for tiny spaces, where they cross-check the local versions.

use serde::Serialize;

use super::function::Valuation;
use super::space::{Limits, SignalProfile, SignalSpace};
use crate::error::Result;
use crate::verdict::Verdict;

/// Absolute slack below which an inequality counts as violated.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub profile: SignalProfile,
    pub coordinate: usize,
    pub lower: f64,
    pub upper: f64,
    /// Set when the failure is the strict own-signal requirement.
    pub strict: bool,
}

/// Increment of `coordinate` by `delta` taken at `raised` exceeds the same
/// increment taken at the dominated profile `base`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementViolation {
    pub coordinate: usize,
    pub delta: usize,
    pub base: SignalProfile,
    pub raised: SignalProfile,
    pub low_gain: f64,
    pub high_gain: f64,
}

fn bump(s: &SignalProfile, k: usize, by: usize) -> SignalProfile {
    let mut out = s.clone();
    out.0[k] += by;
    out
}

/// Weakly increasing in every coordinate, strictly in `owner`'s.
pub fn check_monotone(
    val: &Valuation,
    space: &SignalSpace,
    owner: usize,
    limits: &Limits,
) -> Result<Verdict<MonotoneViolation>> {
    check_monotone_with(|s| val.value(space, s), space, owner, limits)
}

pub fn check_monotone_with<F>(
    value: F,
    space: &SignalSpace,
    owner: usize,
    limits: &Limits,
) -> Result<Verdict<MonotoneViolation>>
where
    F: Fn(&SignalProfile) -> f64,
{
    for s in space.profiles(limits)? {
        let here = value(&s);
        for j in 0..space.agents() {
            if s.get(j) + 1 >= space.size(j) {
                continue;
            }
            let up = value(&bump(&s, j, 1));
            let strict = j == owner;
            let violated = if strict {
                !(up > here)
            } else {
                up - here < -SLACK_TOL
            };
            if violated {
                return Ok(Verdict::Violation(MonotoneViolation {
                    profile: s,
                    coordinate: j,
                    lower: here,
                    upper: up,
                    strict,
                }));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Local SOS check over all unit squares:
/// `v(s+e_i+e_j) - v(s+e_j) <= v(s+e_i) - v(s)` for `i != j`.
pub fn check_sos(
    val: &Valuation,
    space: &SignalSpace,
    limits: &Limits,
) -> Result<Verdict<IncrementViolation>> {
    check_sos_with(|s| val.value(space, s), space, limits)
}

pub fn check_sos_with<F>(
    value: F,
    space: &SignalSpace,
    limits: &Limits,
) -> Result<Verdict<IncrementViolation>>
where
    F: Fn(&SignalProfile) -> f64,
{
    let n = space.agents();
    for s in space.profiles(limits)? {
        let here = value(&s);
        for i in 0..n {
            if s.get(i) + 1 >= space.size(i) {
                continue;
            }
            let si = bump(&s, i, 1);
            let low_gain = value(&si) - here;
            for j in (0..n).filter(|&j| j != i) {
                if s.get(j) + 1 >= space.size(j) {
                    continue;
                }
                let sj = bump(&s, j, 1);
                let high_gain = value(&bump(&sj, i, 1)) - value(&sj);
                if low_gain - high_gain < -SLACK_TOL {
                    return Ok(Verdict::Violation(IncrementViolation {
                        coordinate: i,
                        delta: 1,
                        base: s,
                        raised: sj,
                        low_gain,
                        high_gain,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Local strong-SOS check: for every coordinate `i`, the unit increment
/// `g_i(s) = v(s+e_i) - v(s)` is non-increasing along every unit step,
/// including steps in `i` itself.
pub fn check_strong_sos(
    val: &Valuation,
    space: &SignalSpace,
    limits: &Limits,
) -> Result<Verdict<IncrementViolation>> {
    check_strong_sos_with(|s| val.value(space, s), space, limits)
}

pub fn check_strong_sos_with<F>(
    value: F,
    space: &SignalSpace,
    limits: &Limits,
) -> Result<Verdict<IncrementViolation>>
where
    F: Fn(&SignalProfile) -> f64,
{
    let n = space.agents();
    for s in space.profiles(limits)? {
        let here = value(&s);
        for i in 0..n {
            if s.get(i) + 1 >= space.size(i) {
                continue;
            }
            let low_gain = value(&bump(&s, i, 1)) - here;
            for j in 0..n {
                let need = if j == i { 2 } else { 1 };
                if s.get(j) + need >= space.size(j) {
                    continue;
                }
                let sj = bump(&s, j, 1);
                let high_gain = value(&bump(&sj, i, 1)) - value(&sj);
                if low_gain - high_gain < -SLACK_TOL {
                    return Ok(Verdict::Violation(IncrementViolation {
                        coordinate: i,
                        delta: 1,
                        base: s,
                        raised: sj,
                        low_gain,
                        high_gain,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// SOS checked straight from the quantified definition: for every `i`,
/// every `s'_{-i} >= s_{-i}` and every `s'_i >= s_i`. Quadratic in the
/// profile count.
pub fn check_sos_by_definition(
    val: &Valuation,
    space: &SignalSpace,
    limits: &Limits,
) -> Result<Verdict<IncrementViolation>> {
    let total = space.profile_count() as u128;
    limits.admit(total.saturating_mul(total))?;
    let profiles: Vec<_> = space.iter().collect();
    for i in 0..space.agents() {
        for base in &profiles {
            for raised in &profiles {
                if raised.get(i) != base.get(i) || !raised.dominates(base) {
                    continue;
                }
                for top in base.get(i) + 1..space.size(i) {
                    let delta = top - base.get(i);
                    let low_gain = val.value(space, &base.with(i, top)) - val.value(space, base);
                    let high_gain =
                        val.value(space, &raised.with(i, top)) - val.value(space, raised);
                    if low_gain - high_gain < -SLACK_TOL {
                        return Ok(Verdict::Violation(IncrementViolation {
                            coordinate: i,
                            delta,
                            base: base.clone(),
                            raised: raised.clone(),
                            low_gain,
                            high_gain,
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Strong-SOS from the definition: every `s' >= s`, every `delta >= 1`.
pub fn check_strong_sos_by_definition(
    val: &Valuation,
    space: &SignalSpace,
    limits: &Limits,
) -> Result<Verdict<IncrementViolation>> {
    let total = space.profile_count() as u128;
    limits.admit(total.saturating_mul(total))?;
    let profiles: Vec<_> = space.iter().collect();
    for i in 0..space.agents() {
        for base in &profiles {
            for raised in profiles.iter().filter(|r| r.dominates(base)) {
                for delta in 1..space.size(i) - raised.get(i) {
                    let low_gain = val.value(space, &bump(base, i, delta)) - val.value(space, base);
                    let high_gain =
                        val.value(space, &bump(raised, i, delta)) - val.value(space, raised);
                    if low_gain - high_gain < -SLACK_TOL {
                        return Ok(Verdict::Violation(IncrementViolation {
                            coordinate: i,
                            delta,
                            base: base.clone(),
                            raised: raised.clone(),
                            low_gain,
                            high_gain,
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Pass)
}
