use serde::Serialize;

use super::build::{build_reduced, ReducedInstance};
use crate::error::{Error, Result};
use crate::mechanisms::{Allocation, AllocationRule};
use crate::oracle::{compute_ratio_report, optimal_welfare, RatioReport, BOUND_TOL};
use crate::valuation::{AuctionInstance, Limits, SignalProfile};

/// Runs a rule of the lifted instance on the original space through the
/// grid map: `x(s) = xbar(c_s)`. The instance passed to `allocate` only
/// supplies the profile's arity; values always come from the lifted
/// instance.
#[derive(Debug, Clone, Copy)]
pub struct InducedRule<'a, R> {
    pub reduced: &'a ReducedInstance,
    pub rule: R,
}

impl<'a, R> InducedRule<'a, R> {
    pub fn new(reduced: &'a ReducedInstance, rule: R) -> Self {
        InducedRule { reduced, rule }
    }
}

impl<R: AllocationRule> AllocationRule for InducedRule<'_, R> {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        inst.space().validate(s)?;
        self.reduced.original().space().validate(s)?;
        self.rule
            .allocate(self.reduced.instance(), &self.reduced.grid_profile(s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    pub c: u64,
    pub epsilon: f64,
    /// Worst ratio of the lifted rule over every extended profile.
    pub alpha: f64,
    pub alpha_profile: SignalProfile,
    /// `1 - epsilon max |s|_1 / min_{v1 > 0} v1`.
    pub factor: f64,
    /// `alpha * factor`.
    pub guarantee: f64,
    /// Per-profile ratios of the induced rule; the bound column holds
    /// `alpha - (1 - alpha) epsilon |s|_1 / v1(s)`.
    pub induced: RatioReport,
}

impl TransferReport {
    /// The guarantee is vacuous once the factor is non-positive.
    pub fn is_vacuous(&self) -> bool {
        self.factor <= 0.0
    }

    pub fn guarantee_holds(&self) -> bool {
        self.induced.min_ratio >= self.guarantee - BOUND_TOL
    }

    pub fn profile_bound_holds(&self) -> bool {
        self.induced.first_violation(BOUND_TOL).is_none()
    }

    /// Fails with the worst profile when either bound is missed.
    pub fn ensure(&self) -> Result<()> {
        if !self.guarantee_holds() {
            return Err(Error::BoundViolation {
                profile: self.induced.min_profile.clone(),
                ratio: self.induced.min_ratio,
                bound: self.guarantee,
            });
        }
        if let Some(r) = self.induced.first_violation(BOUND_TOL) {
            return Err(Error::BoundViolation {
                profile: r.profile.clone(),
                ratio: r.ratio,
                bound: r.bound,
            });
        }
        Ok(())
    }
}

/// Lifts `inst`, measures `rule` on the lifted instance, and checks the
/// induced rule on the original instance against the transferred bound.
pub fn verify_reduction_transfer<R: AllocationRule>(
    inst: &AuctionInstance,
    epsilon: f64,
    rule: R,
    limits: &Limits,
) -> Result<TransferReport> {
    let reduced = build_reduced(inst, epsilon, limits)?;
    let report = measure_transfer(&reduced, rule, limits)?;
    report.ensure()?;
    Ok(report)
}

/// Transfer measurements without asserting the bounds.
pub fn measure_transfer<R: AllocationRule>(
    reduced: &ReducedInstance,
    rule: R,
    limits: &Limits,
) -> Result<TransferReport> {
    let lifted = compute_ratio_report(reduced.instance(), &rule, "lifted", |_, _| 0.0, limits)?;
    let alpha = lifted.min_ratio;
    let original = reduced.original();
    let epsilon = reduced.epsilon();

    let mut longest = 0usize;
    let mut smallest = f64::INFINITY;
    for s in original.profiles(limits)? {
        longest = longest.max(s.l1());
        let v1 = optimal_welfare(original, &s).v1;
        if v1 > 0.0 {
            smallest = smallest.min(v1);
        }
    }
    let factor = if smallest.is_finite() {
        1.0 - epsilon * longest as f64 / smallest
    } else {
        1.0
    };
    let guarantee = alpha * factor;

    let induced_rule = InducedRule::new(reduced, rule);
    // Computed per profile, where the explicit norm is known.
    let mut induced = compute_ratio_report(original, &induced_rule, "induced", |_, _| 0.0, limits)?;
    for r in &mut induced.records {
        r.bound = if r.v1 > 0.0 {
            alpha - (1.0 - alpha) * epsilon * r.profile.l1() as f64 / r.v1
        } else {
            1.0
        };
        r.slack = r.ratio - r.bound;
    }
    induced.min_slack = induced
        .records
        .iter()
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);

    Ok(TransferReport {
        c: reduced.c(),
        epsilon,
        alpha,
        alpha_profile: lifted.min_profile,
        factor,
        guarantee,
        induced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_instance;
    use crate::mechanisms::{
        check_monotone_allocation, ContributionRule, EfficientRule, MixtureRule,
    };
    use crate::valuation::{SignalSpace, Valuation};

    #[test]
    fn induced_rule_reads_the_grid() {
        let inst = worked_instance();
        let reduced = build_reduced(&inst, 1.0, &Limits::default()).unwrap();
        let induced = InducedRule::new(&reduced, ContributionRule);
        for s in inst.space().iter() {
            let direct = ContributionRule
                .allocate(reduced.instance(), &reduced.grid_profile(&s))
                .unwrap();
            assert_eq!(induced.allocate(&inst, &s).unwrap(), direct);
        }
        assert!(
            check_monotone_allocation(&inst, &induced, &Limits::default())
                .unwrap()
                .is_pass()
        );
    }

    #[test]
    fn constant_rule_stays_constant() {
        let inst = worked_instance();
        let reduced = build_reduced(&inst, 1.0, &Limits::default()).unwrap();
        let constant = |_: &AuctionInstance, _: &SignalProfile| Ok(Allocation::new(vec![0.2, 0.7]));
        let induced = InducedRule::new(&reduced, constant);
        for s in inst.space().iter() {
            assert_eq!(induced.allocate(&inst, &s).unwrap().x, vec![0.2, 0.7]);
        }
    }

    #[test]
    fn worked_transfer_of_mixture() {
        let report = verify_reduction_transfer(
            &worked_instance(),
            1.0,
            MixtureRule::optimal(),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(report.c, 5);
        assert!(report.alpha >= 0.30162);
        // max |s|_1 = 5 and min v1 = 1.
        assert!((report.factor - (1.0 - 5.0)).abs() < 1e-12);
        assert!(report.is_vacuous());
        assert!(report.profile_bound_holds());
    }

    #[test]
    fn efficient_rule_transfers_at_fine_epsilon() {
        let space = SignalSpace::uniform(2, 2).unwrap();
        let v0 = vec![1.0, 1.2, 2.0, 2.1];
        let v1 = vec![0.5, 1.5, 0.8, 1.7];
        let inst =
            AuctionInstance::new(space, vec![Valuation::table(v0), Valuation::table(v1)]).unwrap();
        let report =
            verify_reduction_transfer(&inst, 0.05, EfficientRule, &Limits::default()).unwrap();
        assert_eq!(report.c, 43);
        assert_eq!(report.alpha, 1.0);
        assert!(!report.is_vacuous());
        assert!((report.factor - (1.0 - 0.05 * 2.0 / 1.0)).abs() < 1e-12);
        assert!(report.induced.min_ratio >= report.guarantee - 1e-9);
    }

    #[test]
    fn factor_tends_to_one() {
        let space = SignalSpace::uniform(1, 2).unwrap();
        let inst = AuctionInstance::new(space, vec![Valuation::table(vec![1.0, 2.0])]).unwrap();
        let mut last = f64::MIN;
        for eps in [0.5, 0.1, 0.01, 0.001] {
            let r =
                verify_reduction_transfer(&inst, eps, EfficientRule, &Limits::default()).unwrap();
            assert!(r.factor > last);
            last = r.factor;
        }
        assert!(last > 0.99);
    }
}
