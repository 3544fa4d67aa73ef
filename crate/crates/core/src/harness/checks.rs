use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::mechanisms::{check_ex_post_ic_ir, AllocationRule, OutcomeTable};
use crate::oracle::{verify_amortized_monotonicity, verify_sampling_lower_bound, verify_value_deviation};
use crate::reduction::{check_concave_sequences, check_cross_grid_domination, ReducedInstance};
use crate::valuation::{check_monotone, check_sos, check_strong_sos, AuctionInstance, Limits};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One named check and, on failure, a JSON witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckOutcome {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: Value) -> Self {
        CheckOutcome {
            name: name.into(),
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: &str) -> Self {
        CheckOutcome {
            name: name.into(),
            status: Status::Skipped,
            witness: Some(Value::String(reason.into())),
        }
    }

    pub fn from_verdict<W: Serialize>(name: impl Into<String>, verdict: Verdict<W>) -> Self {
        match verdict {
            Verdict::Pass => CheckOutcome::pass(name),
            Verdict::Violation(w) => CheckOutcome::fail(name, serde_json::to_value(w).unwrap_or(Value::Null)),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        write!(f, "{tag} {}", self.name)?;
        if let Some(w) = &self.witness {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

fn first_failure<I>(name: &str, checks: I) -> Result<CheckOutcome>
where
    I: IntoIterator<Item = Result<CheckOutcome>>,
{
    for c in checks {
        let c = c?;
        if c.failed() {
            return Ok(CheckOutcome { name: name.into(), ..c });
        }
    }
    Ok(CheckOutcome::pass(name))
}

pub fn monotone_check(inst: &AuctionInstance, limits: &Limits) -> Result<CheckOutcome> {
    first_failure(
        "monotone",
        inst.valuations()
            .iter()
            .enumerate()
            .map(|(i, v)| Ok(CheckOutcome::from_verdict("", check_monotone(v, inst.space(), i, limits)?))),
    )
}

pub fn sos_check(inst: &AuctionInstance, limits: &Limits) -> Result<CheckOutcome> {
    first_failure(
        "sos",
        inst.valuations()
            .iter()
            .map(|v| Ok(CheckOutcome::from_verdict("", check_sos(v, inst.space(), limits)?))),
    )
}

pub fn strong_sos_check(inst: &AuctionInstance, limits: &Limits) -> Result<CheckOutcome> {
    first_failure(
        "strong-sos",
        inst.valuations()
            .iter()
            .map(|v| Ok(CheckOutcome::from_verdict("", check_strong_sos(v, inst.space(), limits)?))),
    )
}

pub fn deviation_check(inst: &AuctionInstance, limits: &Limits) -> Result<CheckOutcome> {
    Ok(CheckOutcome::from_verdict("value-deviation", verify_value_deviation(inst, limits)?))
}

pub fn amortized_check(inst: &AuctionInstance, limits: &Limits) -> Result<CheckOutcome> {
    for s in inst.profiles(limits)? {
        for i in 0..inst.agents() {
            let r = verify_amortized_monotonicity(inst, i, &s)?;
            if !r.verdict.is_pass() {
                let mut w = serde_json::to_value(&r).unwrap_or(Value::Null);
                w["agent"] = i.into();
                w["profile"] = serde_json::to_value(&s).unwrap_or(Value::Null);
                return Ok(CheckOutcome::fail("amortized-monotonicity", w));
            }
        }
    }
    Ok(CheckOutcome::pass("amortized-monotonicity"))
}

pub fn sampling_bound_check(inst: &AuctionInstance, ps: &[f64], limits: &Limits) -> Result<CheckOutcome> {
    for s in inst.profiles(limits)? {
        for i in 0..inst.agents() {
            for &p in ps {
                if let Verdict::Violation(w) = verify_sampling_lower_bound(inst, i, &s, p)? {
                    let mut v = serde_json::to_value(w).unwrap_or(Value::Null);
                    v["agent"] = i.into();
                    v["p"] = p.into();
                    v["profile"] = serde_json::to_value(&s).unwrap_or(Value::Null);
                    return Ok(CheckOutcome::fail("sampling-lower-bound", v));
                }
            }
        }
    }
    Ok(CheckOutcome::pass("sampling-lower-bound"))
}

/// Value deviation, amortized monotonicity with its corollary, and the
/// sampling expectation bound at each `p`.
pub fn lemma_suite(inst: &AuctionInstance, ps: &[f64], limits: &Limits) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        deviation_check(inst, limits)?,
        amortized_check(inst, limits)?,
        sampling_bound_check(inst, ps, limits)?,
    ])
}

/// Payment synthesis followed by the exhaustive IC / IR check. A rule that
/// is not monotone fails here, with the drop as witness.
pub fn incentive_check<R: AllocationRule + ?Sized>(
    name: &str,
    inst: &AuctionInstance,
    rule: &R,
    limits: &Limits,
) -> Result<CheckOutcome> {
    let outcomes = match OutcomeTable::from_rule(inst, rule, limits) {
        Ok(t) => t,
        Err(crate::Error::NonMonotoneAllocation {
            agent,
            profile,
            lower,
            upper,
        }) => {
            return Ok(CheckOutcome::fail(
                name,
                serde_json::json!({ "nonMonotone": { "agent": agent, "profile": profile, "lower": lower, "upper": upper } }),
            ))
        }
        Err(e) => return Err(e),
    };
    Ok(CheckOutcome::from_verdict(name, check_ex_post_ic_ir(inst, &outcomes, limits)?))
}

/// Structural checks of a lifted instance.
pub fn reduction_checks(reduced: &ReducedInstance, limits: &Limits) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        strong_sos_check(reduced.instance(), limits)?,
        sos_check(reduced.instance(), limits)?,
        monotone_check(reduced.instance(), limits)?,
        CheckOutcome::from_verdict("concave-sequences", check_concave_sequences(reduced)),
        CheckOutcome::from_verdict("cross-grid-domination", check_cross_grid_domination(reduced)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_instance;
    use crate::mechanisms::{ContributionRule, Allocation};
    use crate::valuation::{SignalProfile, SignalSpace, Valuation};

    #[test]
    fn worked_instance_passes_everything() {
        let inst = worked_instance();
        let limits = Limits::default();
        assert!(!monotone_check(&inst, &limits).unwrap().failed());
        assert!(!sos_check(&inst, &limits).unwrap().failed());
        for c in lemma_suite(&inst, &[0.25, 0.5], &limits).unwrap() {
            assert!(!c.failed(), "{c}");
        }
        assert!(!incentive_check("ic", &inst, &ContributionRule, &limits).unwrap().failed());
    }

    #[test]
    fn supermodular_table_fails_sos_with_witness() {
        let space = SignalSpace::uniform(2, 2).unwrap();
        let t = vec![0.0, 0.1, 0.1, 1.0];
        let inst = AuctionInstance::new(space, vec![Valuation::table(t.clone()), Valuation::table(t)]).unwrap();
        let c = sos_check(&inst, &Limits::default()).unwrap();
        assert!(c.failed());
        assert_eq!(c.name, "sos");
        assert!(c.witness.unwrap().get("base").is_some());
    }

    #[test]
    fn non_monotone_rule_fails_incentive_check() {
        let inst = worked_instance();
        let flip = |_: &AuctionInstance, s: &SignalProfile| {
            Ok(Allocation::new(vec![if s.get(0) == 0 { 0.5 } else { 0.0 }, 0.0]))
        };
        let c = incentive_check("ic", &inst, &flip, &Limits::default()).unwrap();
        assert!(c.failed());
        assert!(c.to_string().starts_with("FAIL ic"));
    }
}
