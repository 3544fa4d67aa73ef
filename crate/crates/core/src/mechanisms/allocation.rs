use serde::Serialize;

use crate::error::Result;
use crate::valuation::{AuctionInstance, Limits, SignalProfile, SignalSpace};

/// Feasibility slack on the total allocated probability.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Per-agent win probabilities at one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Allocation {
    pub x: Vec<f64>,
}

impl Allocation {
    pub fn new(x: Vec<f64>) -> Self {
        Allocation { x }
    }

    pub fn zeros(n: usize) -> Self {
        Allocation { x: vec![0.0; n] }
    }

    /// Everything to `winner`.
    pub fn unit(n: usize, winner: usize) -> Self {
        let mut x = vec![0.0; n];
        x[winner] = 1.0;
        Allocation { x }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, agent: usize) -> f64 {
        self.x[agent]
    }

    pub fn total(&self) -> f64 {
        self.x.iter().sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.x.iter().all(|&v| v >= 0.0) && self.total() <= 1.0 + FEASIBILITY_TOL
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn blend(&self, weight: f64, other: &Allocation) -> Allocation {
        Allocation {
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(a, b)| weight * a + (1.0 - weight) * b)
                .collect(),
        }
    }

    /// Expected welfare `sum_i x_i * values_i`.
    pub fn welfare(&self, values: &[f64]) -> f64 {
        self.x.iter().zip(values).map(|(x, v)| x * v).sum()
    }
}

/// An allocation rule maps reported profiles to (interim) win probabilities.
pub trait AllocationRule {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation>;
}

impl<F> AllocationRule for F
where
    F: Fn(&AuctionInstance, &SignalProfile) -> Result<Allocation>,
{
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        self(inst, s)
    }
}

/// Allocation at every profile of an instance, indexed like the space.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationTable {
    space: SignalSpace,
    rows: Vec<Allocation>,
}

impl AllocationTable {
    pub fn tabulate<R: AllocationRule + ?Sized>(
        inst: &AuctionInstance,
        rule: &R,
        limits: &Limits,
    ) -> Result<Self> {
        let rows = inst
            .profiles(limits)?
            .map(|s| rule.allocate(inst, &s))
            .collect::<Result<Vec<_>>>()?;
        Ok(AllocationTable {
            space: inst.space().clone(),
            rows,
        })
    }

    pub fn from_rows(space: SignalSpace, rows: Vec<Allocation>) -> Self {
        assert_eq!(rows.len(), space.profile_count(), "one row per profile");
        AllocationTable { space, rows }
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn at(&self, s: &SignalProfile) -> &Allocation {
        &self.rows[self.space.index(s)]
    }

    pub fn rows(&self) -> &[Allocation] {
        &self.rows
    }
}

impl AllocationRule for AllocationTable {
    fn allocate(&self, _inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        self.space.validate(s)?;
        Ok(self.at(s).clone())
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((k, v)),
        }
    }
    best.map(|(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax(&[2.0, 2.0]), Some(0));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn blend_endpoints_are_exact() {
        let a = Allocation::new(vec![0.3, 0.1]);
        let b = Allocation::new(vec![0.5, 0.25]);
        assert_eq!(a.blend(1.0, &b), a);
        assert_eq!(a.blend(0.0, &b), b);
        assert!(a.is_feasible());
        assert!(!Allocation::new(vec![0.7, 0.4]).is_feasible());
        assert!(!Allocation::new(vec![-0.1, 0.4]).is_feasible());
    }
}
