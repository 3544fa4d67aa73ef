use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the number of profiles any exhaustive routine
/// will enumerate.
pub const DEFAULT_MAX_PROFILES: u128 = 1_000_000;

/// Enumeration limits shared by every exhaustive routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_profiles: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_profiles: DEFAULT_MAX_PROFILES,
        }
    }
}

impl Limits {
    pub fn with_max_profiles(max_profiles: u128) -> Self {
        Limits { max_profiles }
    }

    /// Reads `SOS_MAX_PROFILES` from the environment, falling back to the
    /// default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var("SOS_MAX_PROFILES")
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
            .map(Limits::with_max_profiles)
            .unwrap_or_default()
    }

    pub fn admit(&self, profiles: u128) -> Result<()> {
        if profiles > self.max_profiles {
            Err(Error::EnumerationCap {
                profiles,
                cap: self.max_profiles,
            })
        } else {
            Ok(())
        }
    }
}

/// One signal per agent. Agent `i` reports a level in `0..sizes[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignalProfile(pub Vec<usize>);

impl SignalProfile {
    pub fn new(signals: Vec<usize>) -> Self {
        SignalProfile(signals)
    }

    pub fn zeros(n: usize) -> Self {
        SignalProfile(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, agent: usize) -> usize {
        self.0[agent]
    }

    /// Copy with `agent`'s signal replaced.
    pub fn with(&self, agent: usize, signal: usize) -> Self {
        let mut out = self.clone();
        out.0[agent] = signal;
        out
    }

    /// Copy with every agent in `agents` reset to signal 0.
    pub fn zero_out(&self, agents: &[usize]) -> Self {
        let mut out = self.clone();
        for &t in agents {
            out.0[t] = 0;
        }
        out
    }

    /// Copy with every agent whose bit is set in `mask` reset to signal 0.
    pub fn zero_out_mask(&self, mask: u64) -> Self {
        let mut out = self.clone();
        for (t, s) in out.0.iter_mut().enumerate() {
            if mask >> t & 1 == 1 {
                *s = 0;
            }
        }
        out
    }

    /// L1 norm of the signal vector.
    pub fn l1(&self) -> usize {
        self.0.iter().sum()
    }

    /// Coordinate-wise `self >= other`.
    pub fn dominates(&self, other: &SignalProfile) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for SignalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for SignalProfile {
    fn from(v: Vec<usize>) -> Self {
        SignalProfile(v)
    }
}

/// Product of per-agent consecutive integer signal sets `{0, .., m_i - 1}`.
///
/// Profiles are indexed row-major: agent 0 varies slowest, the last agent
/// fastest. This is also the order of `profiles()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SignalSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl SignalSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSpace("at least one agent is required".into()));
        }
        if let Some(agent) = sizes.iter().position(|&m| m == 0) {
            return Err(Error::InvalidSpace(format!(
                "agent {agent} has an empty signal set"
            )));
        }
        let mut strides = vec![1usize; sizes.len()];
        let mut total: usize = 1;
        for k in (0..sizes.len()).rev() {
            strides[k] = total;
            total = total.checked_mul(sizes[k]).ok_or_else(|| {
                Error::InvalidSpace("profile count overflows the address space".into())
            })?;
        }
        Ok(SignalSpace {
            sizes,
            strides,
            total,
        })
    }

    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        SignalSpace::new(vec![m; n])
    }

    pub fn agents(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, agent: usize) -> usize {
        self.sizes[agent]
    }

    pub fn profile_count(&self) -> usize {
        self.total
    }

    pub fn validate(&self, s: &SignalProfile) -> Result<()> {
        if s.len() != self.sizes.len() {
            return Err(Error::ArityMismatch {
                expected: self.sizes.len(),
                got: s.len(),
            });
        }
        for (agent, (&signal, &size)) in s.0.iter().zip(&self.sizes).enumerate() {
            if signal >= size {
                return Err(Error::SignalOutOfRange {
                    agent,
                    signal,
                    size,
                });
            }
        }
        Ok(())
    }

    /// Row-major index of an in-range profile.
    pub fn index(&self, s: &SignalProfile) -> usize {
        s.0.iter().zip(&self.strides).map(|(a, b)| a * b).sum()
    }

    pub fn profile_at(&self, mut index: usize) -> SignalProfile {
        let mut out = vec![0; self.sizes.len()];
        for (k, &stride) in self.strides.iter().enumerate() {
            out[k] = index / stride;
            index %= stride;
        }
        SignalProfile(out)
    }

    /// Largest profile (every agent at its top signal).
    pub fn top(&self) -> SignalProfile {
        SignalProfile(self.sizes.iter().map(|m| m - 1).collect())
    }

    /// All profiles in row-major order, refusing spaces above the cap.
    pub fn profiles(&self, limits: &Limits) -> Result<Profiles<'_>> {
        limits.admit(self.total as u128)?;
        Ok(self.iter())
    }

    /// Uncapped iteration; callers are responsible for size checks.
    pub fn iter(&self) -> Profiles<'_> {
        Profiles {
            space: self,
            next: Some(SignalProfile::zeros(self.sizes.len())),
        }
    }
}

impl TryFrom<Vec<usize>> for SignalSpace {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        SignalSpace::new(sizes)
    }
}

impl From<SignalSpace> for Vec<usize> {
    fn from(space: SignalSpace) -> Self {
        space.sizes
    }
}

/// Lexicographic profile iterator (agent 0 slowest).
pub struct Profiles<'a> {
    space: &'a SignalSpace,
    next: Option<SignalProfile>,
}

impl Iterator for Profiles<'_> {
    type Item = SignalProfile;

    fn next(&mut self) -> Option<SignalProfile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.0.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ.0[k] += 1;
            if succ.0[k] < self.space.sizes[k] {
                self.next = Some(succ);
                break;
            }
            succ.0[k] = 0;
        }
        Some(current)
    }
}
