use std::fs;
use std::path::Path;

use serde::Serialize;

use super::campaign::generate_campaign;
use super::checks::{incentive_check, lemma_suite, monotone_check, reduction_checks, sos_check, CheckOutcome};
use super::config::{ExperimentConfig, InstanceSource, MechanismKind, ModeChoice};
use crate::error::Result;
use crate::mechanisms::{optimal_params, Mechanism, MechanismRule};
use crate::oracle::{compute_ratio_report, RatioReport, BOUND_TOL, MONTE_CARLO_BOUND_TOL};
use crate::reduction::{build_reduced, measure_transfer, InducedRule, TransferReport};
use crate::valuation::{AuctionInstance, Limits, SignalProfile};

/// Per-instance result without the per-profile rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub label: String,
    pub agents: usize,
    pub profiles: usize,
    pub min_ratio: f64,
    pub min_profile: SignalProfile,
    pub min_slack: f64,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferSummary {
    pub c: u64,
    pub epsilon: f64,
    pub alpha: f64,
    pub factor: f64,
    pub guarantee: f64,
}

impl From<&TransferReport> for TransferSummary {
    fn from(t: &TransferReport) -> Self {
        TransferSummary {
            c: t.c,
            epsilon: t.epsilon,
            alpha: t.alpha,
            factor: t.factor,
            guarantee: t.guarantee,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceOutcome {
    pub summary: InstanceSummary,
    pub report: RatioReport,
}

impl InstanceOutcome {
    pub fn passed(&self) -> bool {
        self.summary.checks.iter().all(|c| !c.failed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub mechanism: String,
    pub instances: Vec<InstanceSummary>,
    pub min_ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub mechanism: Mechanism,
    pub instances: Vec<InstanceOutcome>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(InstanceOutcome::passed)
    }

    pub fn min_ratio(&self) -> f64 {
        self.instances
            .iter()
            .map(|o| o.report.min_ratio)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            mechanism: self.mechanism.to_string(),
            instances: self.instances.iter().map(|o| o.summary.clone()).collect(),
            min_ratio: self.min_ratio(),
            passed: self.passed(),
        }
    }

    /// `<label>.csv` and `<label>.json` per instance plus `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for o in &self.instances {
            let csv = fs::File::create(dir.join(format!("{}.csv", o.summary.label)))?;
            o.report.write_csv(csv)?;
            fs::write(dir.join(format!("{}.json", o.summary.label)), o.report.to_json()? + "\n")?;
        }
        fs::write(
            dir.join("summary.json"),
            serde_json::to_string_pretty(&self.summary())? + "\n",
        )?;
        Ok(())
    }
}

pub fn load_instances(source: &InstanceSource, limits: &Limits) -> Result<Vec<(String, AuctionInstance)>> {
    match source {
        InstanceSource::Files(paths) => paths
            .iter()
            .map(|p| {
                let text = fs::read_to_string(p)?;
                let label = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "instance".into());
                Ok((label, AuctionInstance::from_json(&text)?))
            })
            .collect(),
        InstanceSource::Generator(spec) => Ok(generate_campaign(spec, limits)?
            .into_iter()
            .map(|c| (c.label, c.instance))
            .collect()),
    }
}

/// Certification checks, the selected mechanism's ratio report against its
/// bound, and incentive checks for one instance.
pub fn run_instance(
    label: &str,
    inst: &AuctionInstance,
    config: &ExperimentConfig,
    limits: &Limits,
) -> Result<InstanceOutcome> {
    let mechanism = config.resolved_mechanism()?;
    let mode = config.mode.interim();
    let mut checks = Vec::new();
    if config.verify.sos {
        checks.push(monotone_check(inst, limits)?);
        checks.push(sos_check(inst, limits)?);
    }
    if config.verify.lemmas {
        let p_star = optimal_params().params.p;
        checks.extend(lemma_suite(inst, &[0.25, 0.5, p_star], limits)?);
    }
    let exact = matches!(config.mode, ModeChoice::Exact);
    let tol = if exact { BOUND_TOL } else { MONTE_CARLO_BOUND_TOL };

    let (report, transfer) = if config.mechanism == MechanismKind::Reduced {
        let epsilon = config.epsilon.unwrap_or(1.0);
        let reduced = build_reduced(inst, epsilon, limits)?;
        checks.extend(reduction_checks(&reduced, limits)?);
        let rule = mechanism.with_mode(mode);
        let transfer = measure_transfer(&reduced, rule, limits)?;
        checks.push(match transfer.ensure() {
            Ok(()) => CheckOutcome::pass("transfer-bound"),
            Err(e) => CheckOutcome::fail("transfer-bound", e.to_string().into()),
        });
        if config.verify.ic {
            checks.push(incentive_gate(inst, &InducedRule::new(&reduced, rule), exact, limits)?);
        }
        let summary = TransferSummary::from(&transfer);
        (transfer.induced, Some(summary))
    } else {
        let rule: MechanismRule = mechanism.with_mode(mode);
        let report = compute_ratio_report(inst, &rule, &mechanism.to_string(), |a, b| mechanism.bound(a, b), limits)?;
        checks.push(match report.first_violation(tol) {
            None => CheckOutcome::pass("ratio-bound"),
            Some(r) => CheckOutcome::fail("ratio-bound", serde_json::to_value(r).unwrap_or_default()),
        });
        if config.verify.ic {
            checks.push(incentive_gate(inst, &rule, exact, limits)?);
        }
        (report, None)
    };

    Ok(InstanceOutcome {
        summary: InstanceSummary {
            label: label.into(),
            agents: inst.agents(),
            profiles: inst.space().profile_count(),
            min_ratio: report.min_ratio,
            min_profile: report.min_profile.clone(),
            min_slack: report.min_slack,
            checks,
            transfer,
        },
        report,
    })
}

/// Sampled interim allocations are too noisy for an exact monotonicity
/// test, so incentive checks only run in exact mode.
fn incentive_gate<R: crate::mechanisms::AllocationRule>(
    inst: &AuctionInstance,
    rule: &R,
    exact: bool,
    limits: &Limits,
) -> Result<CheckOutcome> {
    if exact {
        incentive_check("ic-ir", inst, rule, limits)
    } else {
        Ok(CheckOutcome::skipped("ic-ir", "monte-carlo mode"))
    }
}

pub fn run_experiment(config: &ExperimentConfig, limits: &Limits) -> Result<RunOutcome> {
    config.validate()?;
    let mechanism = config.resolved_mechanism()?;
    let instances = load_instances(&config.source, limits)?
        .iter()
        .map(|(label, inst)| run_instance(label, inst, config, limits))
        .collect::<Result<Vec<_>>>()?;
    let run = RunOutcome { mechanism, instances };
    if let Some(dir) = &config.out_dir {
        run.write(dir)?;
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::campaign::CampaignSpec;
    use crate::harness::config::QChoice;
    use crate::valuation::GeneratorFamily;

    fn campaign(count: usize) -> InstanceSource {
        InstanceSource::Generator(
            CampaignSpec::new(vec![GeneratorFamily::AdditiveConcave], count, 1)
                .with_agents(2, 3)
                .with_signals(2, 3),
        )
    }

    #[test]
    fn mixture_campaign_passes() {
        let config = ExperimentConfig::new(MechanismKind::Mixture, campaign(5));
        let run = run_experiment(&config, &Limits::default()).unwrap();
        assert!(run.passed());
        assert!(run.min_ratio() >= 0.30162);
    }

    #[test]
    fn sampling_half_is_at_least_a_quarter() {
        let mut config = ExperimentConfig::new(MechanismKind::Sampling, campaign(5));
        config.p = Some(0.5);
        let run = run_experiment(&config, &Limits::default()).unwrap();
        assert!(run.passed());
        assert!(run.min_ratio() >= 0.25);
    }

    #[test]
    fn reduced_mechanism_runs() {
        let mut config = ExperimentConfig::new(
            MechanismKind::Reduced,
            InstanceSource::Generator(
                CampaignSpec::new(vec![GeneratorFamily::AdditiveConcave], 1, 3)
                    .with_agents(2, 2)
                    .with_signals(2, 2),
            ),
        );
        config.epsilon = Some(1.0);
        config.q = QChoice::Optimal;
        let run = run_experiment(&config, &Limits::default()).unwrap();
        assert!(run.passed(), "{:?}", run.summary());
        assert!(run.instances[0].summary.transfer.is_some());
    }

    #[test]
    fn outputs_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::new(MechanismKind::Contribution, campaign(2));
        for sub in ["a", "b"] {
            config.out_dir = Some(dir.path().join(sub));
            run_experiment(&config, &Limits::default()).unwrap();
        }
        let names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 5);
        for name in names {
            let a = fs::read(dir.path().join("a").join(&name)).unwrap();
            let b = fs::read(dir.path().join("b").join(&name)).unwrap();
            assert_eq!(a, b);
        }
    }
}
