use serde::Serialize;

use crate::error::{Error, Result};
use crate::valuation::{AuctionInstance, Limits, SignalProfile, SLACK_TOL};
use crate::verdict::Verdict;

/// Above this many (profile, subset, lowered profile) triples only the
/// zeroed deviation `s'_T = 0` is checked.
pub const GENERAL_DEVIATION_CAP: u128 = 10_000;
/// Largest agent count for subset enumeration in the amortized check.
pub const AMORTIZED_AGENT_CAP: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationWitness {
    pub agent: usize,
    pub profile: SignalProfile,
    pub subset: Vec<usize>,
    pub lowered: SignalProfile,
    /// `sum_{t in T} (v_i(s) - v_i(s_{-t}, s'_t))`.
    pub total_drop: f64,
    pub value: f64,
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&k| mask >> k & 1 == 1).collect()
}

/// Number of (profile, subset, lowered profile) triples in the general form.
pub fn deviation_triples(inst: &AuctionInstance) -> u128 {
    inst.space()
        .sizes()
        .iter()
        .map(|&m| (0..m as u128).map(|v| v + 2).sum::<u128>())
        .product()
}

/// Whether the check would use the general form on this instance.
pub fn uses_general_deviation(inst: &AuctionInstance) -> bool {
    deviation_triples(inst) <= GENERAL_DEVIATION_CAP
}

/// Total drop in agent `i`'s value when each `t` in `T` alone moves to `s'_t`.
fn total_drop(
    inst: &AuctionInstance,
    i: usize,
    s: &SignalProfile,
    t: &[usize],
    lowered: &SignalProfile,
) -> f64 {
    let base = inst.value(i, s);
    t.iter()
        .map(|&k| base - inst.value(i, &s.with(k, lowered.get(k))))
        .sum()
}

/// Every `s'` that agrees with `s` off `t` and is below it on `t`.
fn lowerings(s: &SignalProfile, t: &[usize]) -> Vec<SignalProfile> {
    let mut out = vec![s.clone()];
    for &k in t {
        out = out
            .into_iter()
            .flat_map(|p| (0..=s.get(k)).map(move |v| p.with(k, v)))
            .collect();
    }
    out
}

pub fn verify_value_deviation(
    inst: &AuctionInstance,
    limits: &Limits,
) -> Result<Verdict<DeviationWitness>> {
    let n = inst.agents();
    if n > 63 {
        return Err(Error::ExactCapExceeded { agents: n, cap: 63 });
    }
    let general = uses_general_deviation(inst);
    let subsets = 1u128 << n;
    limits.admit(inst.space().profile_count() as u128 * subsets)?;
    for s in inst.profiles(limits)? {
        for mask in 0..1u64 << n {
            let t = members(mask, n);
            let candidates = if general {
                lowerings(&s, &t)
            } else {
                vec![s.zero_out(&t)]
            };
            for lowered in candidates {
                for i in 0..n {
                    let value = inst.value(i, &s);
                    let drop = total_drop(inst, i, &s, &t, &lowered);
                    if drop > value + SLACK_TOL {
                        return Ok(Verdict::Violation(DeviationWitness {
                            agent: i,
                            profile: s,
                            subset: t,
                            lowered,
                            total_drop: drop,
                            value,
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AmortizedViolation {
    /// Amortized value at `size` exceeds the one at `size - 1`.
    Chain {
        size: usize,
        previous: f64,
        current: f64,
    },
    /// Subset sum at `size` falls short of `size C(n-1,size) v_i(s) / (n-1)`.
    Corollary { size: usize, sum: f64, floor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmortizedReport {
    /// `sum_{|A| = a} v_i(s_A, 0_B, s_i)` for `a = 0..n-1`.
    pub sums: Vec<f64>,
    /// `sums[a] / (a C(n-1, a))` for `a = 1..n-1`, stored at index `a - 1`.
    pub amortized: Vec<f64>,
    pub verdict: Verdict<AmortizedViolation>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Keeps `s_i` and the signals of `others` picked by `mask`; zeroes the rest.
fn restricted(s: &SignalProfile, i: usize, others: &[usize], mask: u64) -> SignalProfile {
    let mut out = SignalProfile::zeros(s.len()).with(i, s.get(i));
    for (bit, &k) in others.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            out = out.with(k, s.get(k));
        }
    }
    out
}

pub fn verify_amortized_monotonicity(
    inst: &AuctionInstance,
    i: usize,
    s: &SignalProfile,
) -> Result<AmortizedReport> {
    let n = inst.agents();
    if n > AMORTIZED_AGENT_CAP {
        return Err(Error::ExactCapExceeded {
            agents: n,
            cap: AMORTIZED_AGENT_CAP,
        });
    }
    inst.space().validate(s)?;
    let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let mut sums = vec![0.0; n];
    for mask in 0..1u64 << others.len() {
        sums[mask.count_ones() as usize] += inst.value(i, &restricted(s, i, &others, mask));
    }
    let amortized: Vec<f64> = (1..n)
        .map(|a| sums[a] / (a as f64 * binomial(n - 1, a)))
        .collect();

    let mut verdict = Verdict::Pass;
    for a in 2..n {
        let (previous, current) = (amortized[a - 2], amortized[a - 1]);
        if current > previous + SLACK_TOL {
            verdict = Verdict::Violation(AmortizedViolation::Chain {
                size: a,
                previous,
                current,
            });
            break;
        }
    }
    if verdict.is_pass() && n > 1 {
        let vi = inst.value(i, s);
        for a in 0..n {
            let floor = a as f64 * binomial(n - 1, a) / (n - 1) as f64 * vi;
            if sums[a] < floor - SLACK_TOL {
                verdict = Verdict::Violation(AmortizedViolation::Corollary {
                    size: a,
                    sum: sums[a],
                    floor,
                });
                break;
            }
        }
    }
    Ok(AmortizedReport {
        sums,
        amortized,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingLowerBound {
    /// `E_A[v_i(s_A, 0_B, s_i)]` with each other agent in `A` w.p. `p`.
    pub expectation: f64,
    /// `p v_i(s)`.
    pub bound: f64,
}

impl SamplingLowerBound {
    pub fn holds(&self) -> bool {
        self.expectation >= self.bound - SLACK_TOL
    }
}

pub fn sampling_expectation(
    inst: &AuctionInstance,
    i: usize,
    s: &SignalProfile,
    p: f64,
) -> Result<SamplingLowerBound> {
    let n = inst.agents();
    if n > AMORTIZED_AGENT_CAP {
        return Err(Error::ExactCapExceeded {
            agents: n,
            cap: AMORTIZED_AGENT_CAP,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} must lie in [0, 1]"
        )));
    }
    inst.space().validate(s)?;
    let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let m = others.len() as i32;
    let mut expectation = 0.0;
    for mask in 0..1u64 << others.len() {
        let a = mask.count_ones() as i32;
        let weight = p.powi(a) * (1.0 - p).powi(m - a);
        if weight > 0.0 {
            expectation += weight * inst.value(i, &restricted(s, i, &others, mask));
        }
    }
    Ok(SamplingLowerBound {
        expectation,
        bound: p * inst.value(i, s),
    })
}

pub fn verify_sampling_lower_bound(
    inst: &AuctionInstance,
    i: usize,
    s: &SignalProfile,
    p: f64,
) -> Result<Verdict<SamplingLowerBound>> {
    let r = sampling_expectation(inst, i, s, p)?;
    Ok(if r.holds() {
        Verdict::Pass
    } else {
        Verdict::Violation(r)
    })
}
