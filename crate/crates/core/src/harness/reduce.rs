use std::fs;
use std::path::Path;

use serde::Serialize;

use super::checks::{incentive_check, reduction_checks, CheckOutcome};
use crate::error::Result;
use crate::mechanisms::Mechanism;
use crate::reduction::{build_reduced, measure_transfer, InducedRule, ReducedInstance, TransferReport};
use crate::valuation::{AuctionInstance, Limits};

#[derive(Debug, Clone, Serialize)]
pub struct ReduceOutcome {
    pub mechanism: String,
    pub checks: Vec<CheckOutcome>,
    pub transfer: TransferReport,
    #[serde(skip)]
    pub reduced: ReducedInstance,
}

impl ReduceOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.failed())
    }

    /// `original.json`, `reduced.json`, `report.json` and `induced.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("original.json"), self.reduced.original().to_json()? + "\n")?;
        fs::write(dir.join("reduced.json"), self.reduced.to_json()? + "\n")?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        self.transfer.induced.write_csv(fs::File::create(dir.join("induced.csv"))?)?;
        Ok(())
    }
}

/// Lift, certify strong-SOS, run `mechanism` on the lifted instance, map it
/// back and check the transferred bound and incentives.
pub fn reduce_pipeline(
    inst: &AuctionInstance,
    epsilon: f64,
    mechanism: Mechanism,
    limits: &Limits,
) -> Result<ReduceOutcome> {
    let reduced = build_reduced(inst, epsilon, limits)?;
    let mut checks = reduction_checks(&reduced, limits)?;
    let rule = mechanism.exact();
    let transfer = measure_transfer(&reduced, rule, limits)?;
    checks.push(match transfer.ensure() {
        Ok(()) => CheckOutcome::pass("transfer-bound"),
        Err(e) => CheckOutcome::fail("transfer-bound", e.to_string().into()),
    });
    checks.push(incentive_check("ic-ir", inst, &InducedRule::new(&reduced, rule), limits)?);
    Ok(ReduceOutcome {
        mechanism: mechanism.to_string(),
        checks,
        transfer,
        reduced,
    })
}
