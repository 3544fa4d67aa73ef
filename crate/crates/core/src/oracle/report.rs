use std::io::Write;

use serde::Serialize;

use super::welfare::{expected_welfare, optimal_welfare};
use crate::error::{Error, Result};
use crate::mechanisms::{AllocationRule, InterimMode, Mechanism};
use crate::valuation::{AuctionInstance, Limits, SignalProfile};

/// Slack allowed on a per-profile bound in exact mode.
pub const BOUND_TOL: f64 = 1e-9;
/// Slack allowed when interim allocations are estimated by sampling.
pub const MONTE_CARLO_BOUND_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRecord {
    pub profile: SignalProfile,
    pub v1: f64,
    pub v2: f64,
    pub welfare: f64,
    /// `welfare / v1`, or 1 when `v1 = 0`.
    pub ratio: f64,
    pub bound: f64,
    /// `ratio - bound`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub mechanism: String,
    pub records: Vec<RatioRecord>,
    pub min_ratio: f64,
    pub min_profile: SignalProfile,
    pub min_slack: f64,
}

impl RatioReport {
    /// First record whose slack is below `-tol`.
    pub fn first_violation(&self, tol: f64) -> Option<&RatioRecord> {
        self.records.iter().find(|r| r.slack < -tol)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["profile", "v1", "v2", "welfare", "ratio", "bound", "slack"])?;
        for r in &self.records {
            w.write_record([
                r.profile.to_string(),
                r.v1.to_string(),
                r.v2.to_string(),
                r.welfare.to_string(),
                r.ratio.to_string(),
                r.bound.to_string(),
                r.slack.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Ratio at every profile against a caller-supplied bound `bound(v1, v2)`.
pub fn compute_ratio_report<R, B>(
    inst: &AuctionInstance,
    rule: &R,
    label: &str,
    bound: B,
    limits: &Limits,
) -> Result<RatioReport>
where
    R: AllocationRule + ?Sized,
    B: Fn(f64, f64) -> f64,
{
    let mut records = Vec::with_capacity(inst.space().profile_count());
    for s in inst.profiles(limits)? {
        let top = optimal_welfare(inst, &s);
        let welfare = expected_welfare(inst, rule, &s)?;
        let ratio = if top.v1 > 0.0 { welfare / top.v1 } else { 1.0 };
        let b = if top.v1 > 0.0 {
            bound(top.v1, top.v2)
        } else {
            1.0
        };
        records.push(RatioRecord {
            profile: s,
            v1: top.v1,
            v2: top.v2,
            welfare,
            ratio,
            bound: b,
            slack: ratio - b,
        });
    }
    let min = records
        .iter()
        .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("spaces are non-empty");
    let (min_ratio, min_profile) = (min.ratio, min.profile.clone());
    let min_slack = records
        .iter()
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(RatioReport {
        mechanism: label.to_string(),
        records,
        min_ratio,
        min_profile,
        min_slack,
    })
}

/// Ratio report for one of the three mechanisms, failing hard on any
/// profile that misses the mechanism's guarantee.
pub fn ratio_report(
    inst: &AuctionInstance,
    mechanism: Mechanism,
    mode: InterimMode,
    limits: &Limits,
) -> Result<RatioReport> {
    let rule = mechanism.with_mode(mode);
    let report = compute_ratio_report(
        inst,
        &rule,
        &mechanism.to_string(),
        |v1, v2| mechanism.bound(v1, v2),
        limits,
    )?;
    let tol = match mode {
        InterimMode::Exact { .. } => BOUND_TOL,
        InterimMode::MonteCarlo { .. } => MONTE_CARLO_BOUND_TOL,
    };
    if let Some(r) = report.first_violation(tol) {
        return Err(Error::BoundViolation {
            profile: r.profile.clone(),
            ratio: r.ratio,
            bound: r.bound,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_instance;
    use crate::mechanisms::{optimal_params, Allocation};

    #[test]
    fn worked_mixture_minimum() {
        let inst = worked_instance();
        let opt = optimal_params();
        let report = ratio_report(
            &inst,
            Mechanism::Mixture(opt.params),
            InterimMode::exact(),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(report.records.len(), 12);
        assert!(report.min_ratio >= 0.30162);
        // The zero profile has no welfare to approximate.
        assert_eq!(report.records[0].ratio, 1.0);
    }

    #[test]
    fn sampling_half_is_a_quarter_approximation() {
        let inst = worked_instance();
        let report = ratio_report(
            &inst,
            Mechanism::Sampling { p: 0.5 },
            InterimMode::exact(),
            &Limits::default(),
        )
        .unwrap();
        assert!(report.min_ratio >= 0.25);
    }

    #[test]
    fn contribution_bound_degenerates_on_ties() {
        let inst = worked_instance();
        let report = ratio_report(
            &inst,
            Mechanism::Contribution,
            InterimMode::exact(),
            &Limits::default(),
        )
        .unwrap();
        // At (1, 1) both agents value 1.5.
        let tie = report
            .records
            .iter()
            .find(|r| r.profile == SignalProfile::new(vec![1, 1]))
            .unwrap();
        assert_eq!(tie.v1, tie.v2);
        assert_eq!(tie.bound, 0.0);
    }

    #[test]
    fn a_null_rule_is_flagged() {
        let inst = worked_instance();
        let nothing =
            |inst: &AuctionInstance, _: &SignalProfile| Ok(Allocation::zeros(inst.agents()));
        let report =
            compute_ratio_report(&inst, &nothing, "null", |_, _| 0.25, &Limits::default()).unwrap();
        let r = report.first_violation(BOUND_TOL).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn csv_has_expected_columns() {
        let inst = worked_instance();
        let report = ratio_report(
            &inst,
            Mechanism::Contribution,
            InterimMode::exact(),
            &Limits::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "profile,v1,v2,welfare,ratio,bound,slack"
        );
        assert_eq!(text.lines().count(), 13);
        assert!(text.contains("\"(2,1)\",2.5,2,0.95"));
    }
}
