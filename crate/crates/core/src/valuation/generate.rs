//! Seeded random instance generators.
//!
//! The three parametric families are SOS by construction. Random tables are
//! drawn cell by cell inside the interval allowed by monotonicity and the
//! unit-square SOS inequalities, then re-verified with the exhaustive
//! checkers; a draw whose interval empties out is discarded and retried.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checks::{check_monotone, check_sos};
use super::function::{Curve, Family, Valuation};
use super::instance::AuctionInstance;
use super::space::{Limits, SignalProfile, SignalSpace};
use crate::error::{Error, Result};

pub const DEFAULT_RETRY_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorFamily {
    AdditiveConcave,
    ConcaveOfSum,
    BudgetCapped,
    RandomTable,
}

impl GeneratorFamily {
    pub const ALL: [GeneratorFamily; 4] = [
        GeneratorFamily::AdditiveConcave,
        GeneratorFamily::ConcaveOfSum,
        GeneratorFamily::BudgetCapped,
        GeneratorFamily::RandomTable,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GeneratorFamily::AdditiveConcave => "additive-concave",
            GeneratorFamily::ConcaveOfSum => "concave-of-sum",
            GeneratorFamily::BudgetCapped => "budget-capped",
            GeneratorFamily::RandomTable => "random-table",
        }
    }
}

impl fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for GeneratorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorFamily::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown generator family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    /// Valuations get a constant offset drawn from `[0, max_offset)`.
    pub max_offset: f64,
    pub retry_budget: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            max_offset: 0.0,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

/// Draws an SOS instance with `n` agents and `m` signal levels each.
/// Identical arguments always produce the identical instance.
pub fn generate_instance(
    family: GeneratorFamily,
    n: usize,
    m: usize,
    seed: u64,
    params: &GeneratorParams,
    limits: &Limits,
) -> Result<AuctionInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(
            "generators need at least one agent and one signal level".into(),
        ));
    }
    let space = SignalSpace::uniform(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let valuations = match family {
        GeneratorFamily::RandomTable => random_tables(&space, &mut rng, params, limits)?,
        _ => (0..n)
            .map(|owner| Valuation::Family(draw_family(family, n, m, owner, &mut rng, params)))
            .collect(),
    };
    AuctionInstance::verified(space, valuations, true, limits)
}

fn draw_curve(rng: &mut ChaCha8Rng) -> Curve {
    match rng.random_range(0..4) {
        0 => Curve::Linear,
        1 => Curve::Sqrt,
        2 => Curve::Log1p,
        _ => Curve::Power(rng.random_range(0.3..1.0)),
    }
}

fn draw_offset(rng: &mut ChaCha8Rng, params: &GeneratorParams) -> f64 {
    if params.max_offset > 0.0 {
        rng.random_range(0.0..params.max_offset)
    } else {
        0.0
    }
}

fn draw_weights(n: usize, owner: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n)
        .map(|j| {
            if j == owner {
                rng.random_range(0.5..1.5)
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect()
}

fn draw_family(
    family: GeneratorFamily,
    n: usize,
    m: usize,
    owner: usize,
    rng: &mut ChaCha8Rng,
    params: &GeneratorParams,
) -> Family {
    match family {
        GeneratorFamily::AdditiveConcave => Family::AdditiveConcave {
            weights: draw_weights(n, owner, rng),
            curve: draw_curve(rng),
            offset: draw_offset(rng, params),
        },
        GeneratorFamily::ConcaveOfSum => Family::ConcaveOfSum {
            weights: draw_weights(n, owner, rng),
            curve: draw_curve(rng),
            owner,
            alpha: rng.random_range(0.05..0.5),
            offset: draw_offset(rng, params),
        },
        GeneratorFamily::BudgetCapped => {
            let weights = draw_weights(n, owner, rng);
            let reach: f64 = weights.iter().sum::<f64>() * (m.saturating_sub(1)) as f64;
            Family::BudgetCapped {
                budget: rng.random_range(0.3..1.0) * reach.max(1.0),
                weights,
                owner,
                alpha: rng.random_range(0.05..0.5),
                offset: draw_offset(rng, params),
            }
        }
        GeneratorFamily::RandomTable => unreachable!("tables are drawn separately"),
    }
}

fn random_tables(
    space: &SignalSpace,
    rng: &mut ChaCha8Rng,
    params: &GeneratorParams,
    limits: &Limits,
) -> Result<Vec<Valuation>> {
    limits.admit(space.profile_count() as u128)?;
    let mut out = Vec::with_capacity(space.agents());
    let mut attempts = 0;
    for owner in 0..space.agents() {
        loop {
            if attempts >= params.retry_budget {
                return Err(Error::GenerationFailed {
                    attempts,
                    reason: format!("no SOS table found for agent {owner}"),
                });
            }
            attempts += 1;
            let v = Valuation::Table(draw_table(space, owner, rng, params));
            if check_monotone(&v, space, owner, limits)?.is_pass()
                && check_sos(&v, space, limits)?.is_pass()
            {
                out.push(v);
                break;
            }
        }
    }
    Ok(out)
}

/// Minimum own-signal increment of a random table.
const OWN_GAP: f64 = 1e-3;

/// A random table built as `offset + sum_k f_k(s_k) + sum_{i<j} g_ij(s_i, s_j)`.
/// Each `f_k` is a random non-decreasing sequence (strictly increasing for
/// the owner) and each `g_ij` a random monotone SOS table on two signals.
/// Every summand is monotone and SOS, hence so is the sum.
fn draw_table(
    space: &SignalSpace,
    owner: usize,
    rng: &mut ChaCha8Rng,
    params: &GeneratorParams,
) -> Vec<f64> {
    let n = space.agents();
    let singles: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let gap = if k == owner { OWN_GAP } else { 0.0 };
            let mut acc = 0.0;
            (0..space.size(k))
                .map(|v| {
                    if v > 0 {
                        acc += gap + rng.random_range(0.0..1.0);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let plane =
                SignalSpace::new(vec![space.size(i), space.size(j)]).expect("sizes are positive");
            let scale = rng.random_range(0.0..1.0);
            let g = draw_plane(&plane, rng);
            pairs.push((i, j, plane, scale, g));
        }
    }
    let offset = draw_offset(rng, params);
    space
        .iter()
        .map(|s| {
            let single: f64 = (0..n).map(|k| singles[k][s.get(k)]).sum();
            let pair: f64 = pairs
                .iter()
                .map(|(i, j, plane, scale, g)| {
                    scale * g[plane.index(&SignalProfile::new(vec![s.get(*i), s.get(*j)]))]
                })
                .sum();
            offset + single + pair
        })
        .collect()
}

/// Monotone SOS table on a two-signal plane, filled cell by cell: each value
/// is drawn between the largest predecessor and the cap set by the unit
/// square below it.
fn draw_plane(plane: &SignalSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut values = vec![0.0f64; plane.profile_count()];
    for s in plane.iter() {
        let (a, b) = (s.get(0), s.get(1));
        let at = |x: usize, y: usize| values[plane.index(&SignalProfile::new(vec![x, y]))];
        let v = match (a, b) {
            (0, 0) => 0.0,
            (_, 0) => at(a - 1, 0) + rng.random_range(0.0..1.0),
            (0, _) => at(0, b - 1) + rng.random_range(0.0..1.0),
            _ => {
                let lo = at(a - 1, b).max(at(a, b - 1));
                // Non-empty because the two lower neighbours dominate the corner.
                let hi = at(a - 1, b) + at(a, b - 1) - at(a - 1, b - 1);
                lo + rng.random_range(0.0..1.0) * (hi - lo)
            }
        };
        values[plane.index(&s)] = v;
    }
    values
}
