use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::optimal_welfare;
use crate::valuation::{
    AuctionInstance, InstanceFile, Limits, ReductionMeta, SignalProfile, SignalSpace, Valuation,
};

/// Convex decomposition of one extended signal onto its two nearest grid
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub lower: usize,
    pub upper: usize,
    pub lower_weight: f64,
    pub upper_weight: f64,
}

impl Decomposition {
    pub fn is_atom(&self) -> bool {
        self.lower == self.upper
    }

    fn atom(signal: usize) -> Self {
        Decomposition {
            lower: signal,
            upper: signal,
            lower_weight: 1.0,
            upper_weight: 0.0,
        }
    }
}

/// An SOS instance lifted to a strong-SOS one on an exponentially larger
/// signal space.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    original: AuctionInstance,
    epsilon: f64,
    c: u64,
    grid: Vec<Vec<u64>>,
    reduced: AuctionInstance,
}

/// `c_s = sum_{k=1}^{s} c^k` for `s = 0..m`, or `None` on overflow.
pub fn grid_points(c: u64, m: usize) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(m);
    let (mut acc, mut pow) = (0u64, 1u64);
    out.push(0);
    for _ in 1..m {
        pow = pow.checked_mul(c)?;
        acc = acc.checked_add(pow)?;
        out.push(acc);
    }
    Some(out)
}

/// `ceil(top / epsilon) + 1`, at least 2.
pub fn base_for(top: f64, epsilon: f64) -> Result<u64> {
    let ratio = (top / epsilon).ceil();
    if !ratio.is_finite() || ratio >= u64::MAX as f64 {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} is too small for top value {top}"
        )));
    }
    Ok((ratio as u64 + 1).max(2))
}

pub fn build_reduced(
    inst: &AuctionInstance,
    epsilon: f64,
    limits: &Limits,
) -> Result<ReducedInstance> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    inst.ensure_sos(limits)?;
    let mut top = 0.0f64;
    for s in inst.profiles(limits)? {
        top = top.max(optimal_welfare(inst, &s).v1);
    }
    let c = base_for(top, epsilon)?;

    let mut grid = Vec::with_capacity(inst.agents());
    let mut required: u128 = 1;
    for &m in inst.space().sizes() {
        let points = grid_points(c, m).ok_or(Error::ReductionBlowup {
            required: u128::MAX,
            cap: limits.max_profiles,
        })?;
        required = required.saturating_mul(*points.last().unwrap() as u128 + 1);
        grid.push(points);
    }
    if required > limits.max_profiles {
        return Err(Error::ReductionBlowup {
            required,
            cap: limits.max_profiles,
        });
    }
    let space = SignalSpace::new(
        grid.iter()
            .map(|g| *g.last().unwrap() as usize + 1)
            .collect(),
    )?;
    let mut tables = vec![Vec::with_capacity(space.profile_count()); inst.agents()];
    for sbar in space.iter() {
        for (i, table) in tables.iter_mut().enumerate() {
            table.push(lifted_value(inst, &grid, epsilon, i, &sbar));
        }
    }
    let reduced = AuctionInstance::new(space, tables.into_iter().map(Valuation::Table).collect())?;
    Ok(ReducedInstance {
        original: inst.clone(),
        epsilon,
        c,
        grid,
        reduced,
    })
}

impl ReducedInstance {
    pub fn original(&self) -> &AuctionInstance {
        &self.original
    }

    /// The lifted instance, with table valuations on the extended space.
    pub fn instance(&self) -> &AuctionInstance {
        &self.reduced
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn grid(&self, agent: usize) -> &[u64] {
        &self.grid[agent]
    }

    pub fn extended_space(&self) -> &SignalSpace {
        self.reduced.space()
    }

    /// `(c_{s_1}, ..., c_{s_n})`.
    pub fn grid_profile(&self, s: &SignalProfile) -> SignalProfile {
        SignalProfile::new(
            s.as_slice()
                .iter()
                .zip(&self.grid)
                .map(|(&k, g)| g[k] as usize)
                .collect(),
        )
    }

    pub fn decompose(&self, agent: usize, sbar: usize) -> Result<Decomposition> {
        let grid = self.grid.get(agent).ok_or(Error::ArityMismatch {
            expected: self.grid.len(),
            got: agent + 1,
        })?;
        let size = *grid.last().unwrap() as usize + 1;
        if sbar >= size {
            return Err(Error::SignalOutOfRange {
                agent,
                signal: sbar,
                size,
            });
        }
        Ok(decompose_on(grid, sbar))
    }

    /// `E_{s ~ mu(sbar)} [v_i(s) + epsilon |s|_1]`, computed from the
    /// original valuation.
    pub fn eval_reduced(&self, agent: usize, sbar: &SignalProfile) -> Result<f64> {
        if agent >= self.original.agents() {
            return Err(Error::ArityMismatch {
                expected: self.original.agents(),
                got: agent + 1,
            });
        }
        self.extended_space().validate(sbar)?;
        Ok(lifted_value(
            &self.original,
            &self.grid,
            self.epsilon,
            agent,
            sbar,
        ))
    }

    pub fn meta(&self) -> ReductionMeta {
        ReductionMeta {
            c: self.c,
            epsilon: self.epsilon,
            grid_points: self.grid.clone(),
        }
    }

    /// The lifted instance in the ordinary instance file layout, tagged with
    /// the reduction parameters.
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            reduction: Some(self.meta()),
            ..self.reduced.to_file()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }
}

fn lifted_value(
    original: &AuctionInstance,
    grid: &[Vec<u64>],
    epsilon: f64,
    agent: usize,
    sbar: &SignalProfile,
) -> f64 {
    let parts: Vec<Decomposition> = sbar
        .as_slice()
        .iter()
        .zip(grid)
        .map(|(&v, g)| decompose_on(g, v))
        .collect();
    let n = parts.len();
    let mut total = 0.0;
    for mask in 0..1u64 << n {
        let mut weight = 1.0;
        let mut s = Vec::with_capacity(n);
        for (k, d) in parts.iter().enumerate() {
            if mask >> k & 1 == 1 {
                weight *= d.upper_weight;
                s.push(d.upper);
            } else {
                weight *= d.lower_weight;
                s.push(d.lower);
            }
        }
        if weight == 0.0 {
            continue;
        }
        let s = SignalProfile::new(s);
        total += weight * (original.value(agent, &s) + epsilon * s.l1() as f64);
    }
    total
}

fn decompose_on(grid: &[u64], sbar: usize) -> Decomposition {
    let v = sbar as u64;
    let upper = grid.partition_point(|&g| g < v);
    if grid[upper] == v {
        return Decomposition::atom(upper);
    }
    let lower = upper - 1;
    let (lo, hi) = (grid[lower] as f64, grid[upper] as f64);
    let x = sbar as f64;
    Decomposition {
        lower,
        upper,
        lower_weight: (hi - x) / (hi - lo),
        upper_weight: (x - lo) / (hi - lo),
    }
}
