use serde::{Deserialize, Serialize};

use super::checks::{check_monotone, check_sos, check_strong_sos};
use super::function::{Family, Valuation};
use super::space::{Limits, SignalProfile, SignalSpace};
use crate::error::{Error, Result};

/// A single-item auction: `n` agents, a finite signal space, and one public
/// valuation per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionInstance {
    space: SignalSpace,
    valuations: Vec<Valuation>,
}

impl AuctionInstance {
    /// Structural construction: arity, table sizes and parameter ranges.
    /// Use [`AuctionInstance::verified`] to also run the exhaustive checks.
    pub fn new(space: SignalSpace, valuations: Vec<Valuation>) -> Result<Self> {
        if valuations.len() != space.agents() {
            return Err(Error::ArityMismatch {
                expected: space.agents(),
                got: valuations.len(),
            });
        }
        for v in &valuations {
            v.validate(&space)?;
        }
        Ok(AuctionInstance { space, valuations })
    }

    /// Construction plus monotonicity (and SOS when `sos` is set) checks.
    pub fn verified(
        space: SignalSpace,
        valuations: Vec<Valuation>,
        sos: bool,
        limits: &Limits,
    ) -> Result<Self> {
        let inst = AuctionInstance::new(space, valuations)?;
        inst.ensure_monotone(limits)?;
        if sos {
            inst.ensure_sos(limits)?;
        }
        Ok(inst)
    }

    pub fn agents(&self) -> usize {
        self.space.agents()
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.valuations[agent]
    }

    /// `v_agent(s)` for an in-range profile.
    #[inline]
    pub fn value(&self, agent: usize, s: &SignalProfile) -> f64 {
        self.valuations[agent].value(&self.space, s)
    }

    pub fn eval(&self, agent: usize, s: &SignalProfile) -> Result<f64> {
        self.valuations[agent].eval(&self.space, s)
    }

    pub fn values(&self, s: &SignalProfile) -> Vec<f64> {
        (0..self.agents()).map(|i| self.value(i, s)).collect()
    }

    pub fn profiles(&self, limits: &Limits) -> Result<super::space::Profiles<'_>> {
        self.space.profiles(limits)
    }

    /// Same instance with every valuation stored as a dense table.
    pub fn materialized(&self, limits: &Limits) -> Result<Self> {
        let valuations = self
            .valuations
            .iter()
            .map(|v| v.materialize(&self.space, limits))
            .collect::<Result<Vec<_>>>()?;
        Ok(AuctionInstance {
            space: self.space.clone(),
            valuations,
        })
    }

    /// Same instance with every valuation multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64, limits: &Limits) -> Result<Self> {
        let valuations = self
            .valuations
            .iter()
            .map(|v| {
                let values = self
                    .space
                    .profiles(limits)?
                    .map(|s| factor * v.value(&self.space, &s))
                    .collect();
                Ok(Valuation::Table(values))
            })
            .collect::<Result<Vec<_>>>()?;
        AuctionInstance::new(self.space.clone(), valuations)
    }

    pub fn ensure_monotone(&self, limits: &Limits) -> Result<()> {
        for (i, v) in self.valuations.iter().enumerate() {
            if let Some(w) = check_monotone(v, &self.space, i, limits)?.into_witness() {
                return Err(Error::Verification(format!(
                    "valuation of agent {i} is not monotone: coordinate {} at {} goes {} -> {}{}",
                    w.coordinate,
                    w.profile,
                    w.lower,
                    w.upper,
                    if w.strict {
                        " (own signal must strictly increase)"
                    } else {
                        ""
                    }
                )));
            }
        }
        Ok(())
    }

    pub fn ensure_sos(&self, limits: &Limits) -> Result<()> {
        for (i, v) in self.valuations.iter().enumerate() {
            if let Some(w) = check_sos(v, &self.space, limits)?.into_witness() {
                return Err(Error::Verification(format!(
                    "valuation of agent {i} is not SOS: raising coordinate {} at {} gains {} but {} at {}",
                    w.coordinate, w.base, w.low_gain, w.high_gain, w.raised
                )));
            }
        }
        Ok(())
    }

    pub fn is_strong_sos(&self, limits: &Limits) -> Result<bool> {
        for v in &self.valuations {
            if !check_strong_sos(v, &self.space, limits)?.is_pass() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.agents(),
            sizes: self.space.sizes().to_vec(),
            valuations: self
                .valuations
                .iter()
                .map(|v| match v {
                    Valuation::Table(values) => ValuationEntry::Table {
                        values: values.clone(),
                    },
                    Valuation::Family(f) => ValuationEntry::Family(f.clone()),
                })
                .collect(),
            reduction: None,
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        if file.sizes.len() != file.n {
            return Err(Error::ArityMismatch {
                expected: file.n,
                got: file.sizes.len(),
            });
        }
        let space = SignalSpace::new(file.sizes.clone())?;
        let valuations = file
            .valuations
            .iter()
            .map(|e| match e {
                ValuationEntry::Table { values } => Valuation::Table(values.clone()),
                ValuationEntry::Family(f) => Valuation::Family(f.clone()),
            })
            .collect();
        AuctionInstance::new(space, valuations)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        AuctionInstance::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk instance layout. Tables are row-major over profiles with agent 1
/// varying slowest; `valuations` lists agents in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub sizes: Vec<usize>,
    pub valuations: Vec<ValuationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValuationEntry {
    Table { values: Vec<f64> },
    Family(Family),
}

/// Metadata attached to instances produced by the strong-SOS reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionMeta {
    pub c: u64,
    pub epsilon: f64,
    pub grid_points: Vec<Vec<u64>>,
}
