//! Payment synthesis for monotone allocation rules and the exhaustive
//! ex-post IC / IR verifier.
//!
//! With others' reports fixed, write `x(k)` and `v(k)` for agent `i`'s win
//! probability and value when it reports `k`, and `dv(k) = v(k) - v(k-1)`.
//! The payment at report `t` is
//!
//! ```text
//! p(t) = x(t) v(t) - sum_{k=1..t} x(k) dv(k)
//! ```
//!
//! so truthful utility is `sum_{k<=t} x(k) dv(k) >= 0`, and a misreport `r`
//! loses `sum_{k in (r, t]} (x(k) - x(r)) dv(k)` (or the mirror sum for
//! `r > t`), which is non-negative whenever `x` is non-decreasing.

use serde::Serialize;

use super::allocation::{Allocation, AllocationRule, AllocationTable};
use crate::error::{Error, Result};
use crate::valuation::{AuctionInstance, Limits, SignalProfile, SLACK_TOL};
use crate::verdict::Verdict;

/// Allocation of `agent` falls when its own report rises.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationMonotoneViolation {
    pub agent: usize,
    /// Lower report; the agent's signal is raised by one from here.
    pub profile: SignalProfile,
    pub lower: f64,
    pub upper: f64,
}

/// `misreport == None` marks an IR failure of the truthful report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncentiveViolation {
    pub agent: usize,
    pub profile: SignalProfile,
    pub misreport: Option<usize>,
    pub truthful_utility: f64,
    pub deviation_utility: f64,
}

fn own_payment(x: &[f64], v: &[f64]) -> f64 {
    let t = x.len() - 1;
    let rebate: f64 = (1..=t).map(|k| x[k] * (v[k] - v[k - 1])).sum();
    x[t] * v[t] - rebate
}

fn first_drop(x: &[f64]) -> Option<usize> {
    (0..x.len().saturating_sub(1)).find(|&k| x[k + 1] < x[k] - SLACK_TOL)
}

/// Payments at `s` for a rule whose allocation is monotone in own signals.
/// Evaluates the rule at `(s_{-i}, k)` for every `k <= s_i`.
pub fn payments_discrete<R: AllocationRule + ?Sized>(
    inst: &AuctionInstance,
    rule: &R,
    s: &SignalProfile,
) -> Result<Vec<f64>> {
    inst.space().validate(s)?;
    (0..inst.agents())
        .map(|i| {
            let reports: Vec<SignalProfile> = (0..=s.get(i)).map(|k| s.with(i, k)).collect();
            let x = reports
                .iter()
                .map(|r| Ok(rule.allocate(inst, r)?.get(i)))
                .collect::<Result<Vec<f64>>>()?;
            if let Some(k) = first_drop(&x) {
                return Err(Error::NonMonotoneAllocation {
                    agent: i,
                    profile: reports[k].clone(),
                    lower: x[k],
                    upper: x[k + 1],
                });
            }
            let v: Vec<f64> = reports.iter().map(|r| inst.value(i, r)).collect();
            Ok(own_payment(&x, &v))
        })
        .collect()
}

pub fn check_monotone_allocation<R: AllocationRule + ?Sized>(
    inst: &AuctionInstance,
    rule: &R,
    limits: &Limits,
) -> Result<Verdict<AllocationMonotoneViolation>> {
    let table = AllocationTable::tabulate(inst, rule, limits)?;
    Ok(monotone_table(inst, &table))
}

fn monotone_table(
    inst: &AuctionInstance,
    table: &AllocationTable,
) -> Verdict<AllocationMonotoneViolation> {
    let space = inst.space();
    for s in space.iter() {
        for i in 0..space.agents() {
            if s.get(i) + 1 >= space.size(i) {
                continue;
            }
            let lower = table.at(&s).get(i);
            let upper = table.at(&s.with(i, s.get(i) + 1)).get(i);
            if upper < lower - SLACK_TOL {
                return Verdict::Violation(AllocationMonotoneViolation {
                    agent: i,
                    profile: s,
                    lower,
                    upper,
                });
            }
        }
    }
    Verdict::Pass
}

/// Allocations and payments at every profile of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    allocations: AllocationTable,
    payments: Vec<Vec<f64>>,
}

impl OutcomeTable {
    /// Tabulates `rule` and synthesizes discrete payments from the table.
    pub fn from_rule<R: AllocationRule + ?Sized>(
        inst: &AuctionInstance,
        rule: &R,
        limits: &Limits,
    ) -> Result<Self> {
        let allocations = AllocationTable::tabulate(inst, rule, limits)?;
        OutcomeTable::from_allocations(inst, allocations)
    }

    pub fn from_allocations(inst: &AuctionInstance, allocations: AllocationTable) -> Result<Self> {
        if let Some(w) = monotone_table(inst, &allocations).into_witness() {
            return Err(Error::NonMonotoneAllocation {
                agent: w.agent,
                profile: w.profile,
                lower: w.lower,
                upper: w.upper,
            });
        }
        let space = inst.space();
        let payments = space
            .iter()
            .map(|s| {
                (0..space.agents())
                    .map(|i| {
                        let reports: Vec<SignalProfile> =
                            (0..=s.get(i)).map(|k| s.with(i, k)).collect();
                        let x: Vec<f64> =
                            reports.iter().map(|r| allocations.at(r).get(i)).collect();
                        let v: Vec<f64> = reports.iter().map(|r| inst.value(i, r)).collect();
                        own_payment(&x, &v)
                    })
                    .collect()
            })
            .collect();
        Ok(OutcomeTable {
            allocations,
            payments,
        })
    }

    /// Arbitrary payments, one vector per profile in space order.
    pub fn with_payments(allocations: AllocationTable, payments: Vec<Vec<f64>>) -> Self {
        assert_eq!(
            payments.len(),
            allocations.rows().len(),
            "one row per profile"
        );
        OutcomeTable {
            allocations,
            payments,
        }
    }

    pub fn allocations(&self) -> &AllocationTable {
        &self.allocations
    }

    pub fn allocation(&self, s: &SignalProfile) -> &Allocation {
        self.allocations.at(s)
    }

    pub fn payments(&self, s: &SignalProfile) -> &[f64] {
        &self.payments[self.allocations.space().index(s)]
    }
}

/// Every agent, true profile and misreport: truth-telling is a best
/// response and yields non-negative utility.
pub fn check_ex_post_ic_ir(
    inst: &AuctionInstance,
    outcomes: &OutcomeTable,
    limits: &Limits,
) -> Result<Verdict<IncentiveViolation>> {
    let space = inst.space();
    for s in space.profiles(limits)? {
        for i in 0..space.agents() {
            let value = inst.value(i, &s);
            let utility = |report: &SignalProfile| {
                outcomes.allocation(report).get(i) * value - outcomes.payments(report)[i]
            };
            let truthful = utility(&s);
            if truthful < -SLACK_TOL {
                return Ok(Verdict::Violation(IncentiveViolation {
                    agent: i,
                    profile: s,
                    misreport: None,
                    truthful_utility: truthful,
                    deviation_utility: 0.0,
                }));
            }
            for r in (0..space.size(i)).filter(|&r| r != s.get(i)) {
                let deviation = utility(&s.with(i, r));
                if truthful < deviation - SLACK_TOL {
                    return Ok(Verdict::Violation(IncentiveViolation {
                        agent: i,
                        profile: s,
                        misreport: Some(r),
                        truthful_utility: truthful,
                        deviation_utility: deviation,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}
