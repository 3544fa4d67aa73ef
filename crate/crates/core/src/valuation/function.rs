use serde::{Deserialize, Serialize};

use super::space::{Limits, SignalProfile, SignalSpace};
use crate::error::{Error, Result};

/// Concave, increasing curve with `phi(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    Linear,
    Sqrt,
    Log1p,
    /// `x^exponent` with exponent in `(0, 1]`.
    Power(f64),
}

impl Curve {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Curve::Linear => x,
            Curve::Sqrt => x.sqrt(),
            Curve::Log1p => x.ln_1p(),
            Curve::Power(e) => x.powf(e),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Curve::Power(e) if !(e > 0.0 && e <= 1.0) => Err(Error::InvalidValuation(format!(
                "power curve exponent {e} must lie in (0, 1]"
            ))),
            _ => Ok(()),
        }
    }
}

/// Parametric valuation families. Every family is SOS by construction
/// when its parameters validate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    /// `offset + sum_j weights[j] * curve(s_j)`
    AdditiveConcave {
        weights: Vec<f64>,
        curve: Curve,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + curve(sum_j weights[j] * s_j) + alpha * s_owner`
    ConcaveOfSum {
        weights: Vec<f64>,
        curve: Curve,
        owner: usize,
        alpha: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + min(budget, sum_j weights[j] * s_j) + alpha * s_owner`
    BudgetCapped {
        weights: Vec<f64>,
        budget: f64,
        owner: usize,
        alpha: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl Family {
    pub fn arity(&self) -> usize {
        match self {
            Family::AdditiveConcave { weights, .. }
            | Family::ConcaveOfSum { weights, .. }
            | Family::BudgetCapped { weights, .. } => weights.len(),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Family::AdditiveConcave { .. } => "additive-concave",
            Family::ConcaveOfSum { .. } => "concave-of-sum",
            Family::BudgetCapped { .. } => "budget-capped",
        }
    }

    fn value(&self, s: &[usize]) -> f64 {
        match self {
            Family::AdditiveConcave {
                weights,
                curve,
                offset,
            } => {
                offset
                    + weights
                        .iter()
                        .zip(s)
                        .map(|(w, &x)| w * curve.apply(x as f64))
                        .sum::<f64>()
            }
            Family::ConcaveOfSum {
                weights,
                curve,
                owner,
                alpha,
                offset,
            } => offset + curve.apply(dot(weights, s)) + alpha * s[*owner] as f64,
            Family::BudgetCapped {
                weights,
                budget,
                owner,
                alpha,
                offset,
            } => offset + dot(weights, s).min(*budget) + alpha * s[*owner] as f64,
        }
    }

    fn validate(&self) -> Result<()> {
        let (weights, offset) = match self {
            Family::AdditiveConcave {
                weights,
                curve,
                offset,
            } => {
                curve.validate()?;
                (weights, offset)
            }
            Family::ConcaveOfSum {
                weights,
                curve,
                owner,
                alpha,
                offset,
            } => {
                curve.validate()?;
                check_owner(*owner, weights.len(), *alpha)?;
                (weights, offset)
            }
            Family::BudgetCapped {
                weights,
                budget,
                owner,
                alpha,
                offset,
            } => {
                if !(budget.is_finite() && *budget >= 0.0) {
                    return Err(Error::InvalidValuation(format!(
                        "budget {budget} must be finite and non-negative"
                    )));
                }
                check_owner(*owner, weights.len(), *alpha)?;
                (weights, offset)
            }
        };
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidValuation(
                "weights must be finite and non-negative".into(),
            ));
        }
        if !(offset.is_finite() && *offset >= 0.0) {
            return Err(Error::InvalidValuation(format!(
                "offset {offset} must be finite and non-negative"
            )));
        }
        Ok(())
    }
}

fn dot(weights: &[f64], s: &[usize]) -> f64 {
    weights.iter().zip(s).map(|(w, &x)| w * x as f64).sum()
}

fn check_owner(owner: usize, n: usize, alpha: f64) -> Result<()> {
    if owner >= n {
        return Err(Error::InvalidValuation(format!(
            "owner {owner} out of range for {n} agents"
        )));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidValuation(format!(
            "own bonus {alpha} must be finite and non-negative"
        )));
    }
    Ok(())
}

/// A valuation over a signal space: a dense table or a parametric family.
#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    /// Row-major values over every profile of the space.
    Table(Vec<f64>),
    Family(Family),
}

impl Valuation {
    pub fn table(values: Vec<f64>) -> Self {
        Valuation::Table(values)
    }

    pub fn family(family: Family) -> Self {
        Valuation::Family(family)
    }

    /// Structural checks against a space: arity, table length, finite
    /// non-negative values and family parameter ranges.
    pub fn validate(&self, space: &SignalSpace) -> Result<()> {
        match self {
            Valuation::Table(values) => {
                if values.len() != space.profile_count() {
                    return Err(Error::InvalidValuation(format!(
                        "table has {} entries, space has {} profiles",
                        values.len(),
                        space.profile_count()
                    )));
                }
                if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::InvalidValuation(format!(
                        "table entry {k} at {} is {} (must be finite and non-negative)",
                        space.profile_at(k),
                        values[k]
                    )));
                }
                Ok(())
            }
            Valuation::Family(f) => {
                if f.arity() != space.agents() {
                    return Err(Error::ArityMismatch {
                        expected: space.agents(),
                        got: f.arity(),
                    });
                }
                f.validate()
            }
        }
    }

    pub fn eval(&self, space: &SignalSpace, s: &SignalProfile) -> Result<f64> {
        space.validate(s)?;
        Ok(self.value(space, s))
    }

    /// Evaluation without range checks; `s` must lie in `space`.
    #[inline]
    pub fn value(&self, space: &SignalSpace, s: &SignalProfile) -> f64 {
        match self {
            Valuation::Table(values) => values[space.index(s)],
            Valuation::Family(f) => f.value(s.as_slice()),
        }
    }

    /// Dense table with the same values at every profile.
    pub fn materialize(&self, space: &SignalSpace, limits: &Limits) -> Result<Valuation> {
        let values = space
            .profiles(limits)?
            .map(|s| self.value(space, &s))
            .collect();
        Ok(Valuation::Table(values))
    }

    pub fn is_table(&self) -> bool {
        matches!(self, Valuation::Table(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(v: &[usize]) -> SignalProfile {
        SignalProfile::new(v.to_vec())
    }

    #[test]
    fn additive_family_evaluates() {
        let space = SignalSpace::uniform(2, 4).unwrap();
        let v = Valuation::family(Family::AdditiveConcave {
            weights: vec![1.0, 0.5],
            curve: Curve::Linear,
            offset: 0.0,
        });
        assert_eq!(v.eval(&space, &profile(&[2, 1])).unwrap(), 2.5);
        assert_eq!(v.eval(&space, &profile(&[0, 0])).unwrap(), 0.0);
    }

    #[test]
    fn concave_of_sum_evaluates() {
        let space = SignalSpace::uniform(2, 4).unwrap();
        let v = Valuation::family(Family::ConcaveOfSum {
            weights: vec![1.0, 1.0],
            curve: Curve::Sqrt,
            owner: 0,
            alpha: 0.0,
            offset: 0.0,
        });
        assert_eq!(v.eval(&space, &profile(&[1, 3])).unwrap(), 2.0);
    }

    #[test]
    fn out_of_range_is_an_error() {
        let space = SignalSpace::uniform(2, 3).unwrap();
        let v = Valuation::table(vec![0.0; 9]);
        assert!(matches!(
            v.eval(&space, &profile(&[3, 0])),
            Err(Error::SignalOutOfRange { agent: 0, .. })
        ));
    }

    #[test]
    fn materialized_table_matches_family() {
        let space = SignalSpace::new(vec![3, 4, 2]).unwrap();
        let fam = Valuation::family(Family::BudgetCapped {
            weights: vec![0.7, 0.2, 1.1],
            budget: 1.5,
            owner: 2,
            alpha: 0.1,
            offset: 0.25,
        });
        let table = fam.materialize(&space, &Limits::default()).unwrap();
        assert!(table.is_table());
        for s in space.iter() {
            assert_eq!(table.value(&space, &s), fam.value(&space, &s));
        }
    }

    #[test]
    fn validation_catches_bad_parameters() {
        let space = SignalSpace::uniform(2, 2).unwrap();
        assert!(Valuation::table(vec![0.0, 1.0, -1.0, 2.0])
            .validate(&space)
            .is_err());
        assert!(Valuation::table(vec![0.0; 3]).validate(&space).is_err());
        let bad_curve = Valuation::family(Family::AdditiveConcave {
            weights: vec![1.0, 1.0],
            curve: Curve::Power(1.5),
            offset: 0.0,
        });
        assert!(bad_curve.validate(&space).is_err());
        let bad_owner = Valuation::family(Family::ConcaveOfSum {
            weights: vec![1.0, 1.0],
            curve: Curve::Sqrt,
            owner: 2,
            alpha: 0.1,
            offset: 0.0,
        });
        assert!(bad_owner.validate(&space).is_err());
    }
}
