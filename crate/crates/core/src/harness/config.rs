use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use super::campaign::CampaignSpec;
use crate::error::{Error, Result};
use crate::mechanisms::{optimal_params, InterimMode, Mechanism, MixtureParams, DEFAULT_MONTE_CARLO_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    Contribution,
    Sampling,
    Mixture,
    /// The mixture run on the lifted strong-SOS instance and mapped back.
    Reduced,
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contribution" => Ok(MechanismKind::Contribution),
            "sampling" => Ok(MechanismKind::Sampling),
            "mixture" => Ok(MechanismKind::Mixture),
            "reduced" => Ok(MechanismKind::Reduced),
            _ => Err(Error::InvalidParameter(format!("unknown mechanism `{s}`"))),
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MechanismKind::Contribution => "contribution",
            MechanismKind::Sampling => "sampling",
            MechanismKind::Mixture => "mixture",
            MechanismKind::Reduced => "reduced",
        })
    }
}

/// How the mixing weight is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QChoice {
    /// `(p*, q*)`, or the balancing `q` for an explicit `p`.
    Optimal,
    Fixed(f64),
}

impl FromStr for QChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "optimal" || s == "balanced" {
            return Ok(QChoice::Optimal);
        }
        s.parse::<f64>()
            .map(QChoice::Fixed)
            .map_err(|_| Error::InvalidParameter(format!("q must be a number or `optimal`, got `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceSource {
    Files(Vec<PathBuf>),
    Generator(CampaignSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl ModeChoice {
    pub fn monte_carlo(seed: u64) -> Self {
        ModeChoice::MonteCarlo {
            samples: DEFAULT_MONTE_CARLO_SAMPLES,
            seed,
        }
    }

    pub fn interim(self) -> InterimMode {
        match self {
            ModeChoice::Exact => InterimMode::exact(),
            ModeChoice::MonteCarlo { samples, seed } => InterimMode::MonteCarlo { samples, seed },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifierToggles {
    pub sos: bool,
    pub ic: bool,
    pub lemmas: bool,
}

impl Default for VerifierToggles {
    fn default() -> Self {
        VerifierToggles {
            sos: true,
            ic: true,
            lemmas: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mechanism: MechanismKind,
    pub p: Option<f64>,
    pub q: QChoice,
    /// Perturbation for the reduced mechanism.
    pub epsilon: Option<f64>,
    pub source: InstanceSource,
    pub mode: ModeChoice,
    pub verify: VerifierToggles,
    /// Per-instance CSV and JSON reports plus a summary land here.
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(mechanism: MechanismKind, source: InstanceSource) -> Self {
        ExperimentConfig {
            mechanism,
            p: None,
            q: QChoice::Optimal,
            epsilon: None,
            source,
            mode: ModeChoice::Exact,
            verify: VerifierToggles::default(),
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
            }
        }
        if let QChoice::Fixed(q) = self.q {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("q = {q} must lie in [0, 1]")));
            }
        }
        if let ModeChoice::MonteCarlo { samples: 0, .. } = self.mode {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        if self.mechanism == MechanismKind::Reduced {
            match self.epsilon {
                Some(e) if e > 0.0 && e.is_finite() => {}
                Some(e) => return Err(Error::InvalidParameter(format!("epsilon {e} must be positive"))),
                None => return Err(Error::InvalidParameter("the reduced mechanism needs --epsilon".into())),
            }
        }
        if let InstanceSource::Generator(spec) = &self.source {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn mixture_params(&self) -> Result<MixtureParams> {
        resolve_mixture(self.p, self.q)
    }

    /// The mechanism run on each instance; `Reduced` runs the mixture.
    pub fn resolved_mechanism(&self) -> Result<Mechanism> {
        Ok(match self.mechanism {
            MechanismKind::Contribution => Mechanism::Contribution,
            MechanismKind::Sampling => Mechanism::Sampling {
                p: self.p.unwrap_or(0.5),
            },
            MechanismKind::Mixture | MechanismKind::Reduced => Mechanism::Mixture(self.mixture_params()?),
        })
    }
}

pub fn resolve_mixture(p: Option<f64>, q: QChoice) -> Result<MixtureParams> {
    match (p, q) {
        (None, QChoice::Optimal) => Ok(optimal_params().params),
        (Some(p), QChoice::Optimal) => MixtureParams::balanced(p),
        (p, QChoice::Fixed(q)) => MixtureParams::new(p.unwrap_or(optimal_params().params.p), q),
    }
}
