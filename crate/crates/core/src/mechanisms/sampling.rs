//! Biased random-sampling allocation.
//!
//! Each agent lands in the sample set `A` with probability `p`, otherwise in
//! the bidding set `B`. A bidder `i` in `B` is scored with the proxy value
//! `w_i = v_i(s_A, s_i, 0_{B \ {i}})`: the signals of the other bidders are
//! zeroed, so `w_i` does not react to their reports. The highest proxy value
//! wins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::allocation::{argmax, Allocation, AllocationRule};
use crate::error::{Error, Result};
use crate::valuation::{AuctionInstance, SignalProfile};

pub const DEFAULT_EXACT_AGENT_CAP: usize = 20;
pub const DEFAULT_MONTE_CARLO_SAMPLES: usize = 100_000;

/// Split of agents into the sample set `A` and the bidding set `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    in_sample: Vec<bool>,
}

impl Partition {
    pub fn new(in_sample: Vec<bool>) -> Self {
        Partition { in_sample }
    }

    /// Bit `k` of `mask` set means agent `k` is in `A`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Partition {
            in_sample: (0..n).map(|k| mask >> k & 1 == 1).collect(),
        }
    }

    pub fn from_sample_set(n: usize, sample: &[usize]) -> Self {
        let mut in_sample = vec![false; n];
        for &k in sample {
            in_sample[k] = true;
        }
        Partition { in_sample }
    }

    pub fn agents(&self) -> usize {
        self.in_sample.len()
    }

    pub fn in_sample(&self, agent: usize) -> bool {
        self.in_sample[agent]
    }

    pub fn sample_size(&self) -> usize {
        self.in_sample.iter().filter(|&&a| a).count()
    }

    pub fn bidders(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_sample
            .iter()
            .enumerate()
            .filter(|(_, &a)| !a)
            .map(|(k, _)| k)
    }

    /// `p^|A| (1-p)^|B|`.
    pub fn weight(&self, p: f64) -> f64 {
        let a = self.sample_size() as i32;
        let b = self.agents() as i32 - a;
        p.powi(a) * (1.0 - p).powi(b)
    }
}

/// Proxy value `w_i` of a bidder: other bidders' signals zeroed.
pub fn proxy_value(
    inst: &AuctionInstance,
    s: &SignalProfile,
    partition: &Partition,
    bidder: usize,
) -> f64 {
    let mut probe = s.clone();
    for j in partition.bidders().filter(|&j| j != bidder) {
        probe.0[j] = 0;
    }
    inst.value(bidder, &probe)
}

/// Winner of one realization, `None` when nobody bids.
pub fn sampling_realize(
    inst: &AuctionInstance,
    s: &SignalProfile,
    partition: &Partition,
) -> Option<usize> {
    let bidders: Vec<usize> = partition.bidders().collect();
    let scores: Vec<f64> = bidders
        .iter()
        .map(|&i| proxy_value(inst, s, partition, i))
        .collect();
    argmax(&scores).map(|k| bidders[k])
}

/// How interim win probabilities of the sampling rule are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterimMode {
    /// Sum over all `2^n` partitions; refused above `max_agents`.
    Exact { max_agents: usize },
    /// Average over seeded random partitions.
    MonteCarlo { samples: usize, seed: u64 },
}

impl InterimMode {
    pub fn exact() -> Self {
        InterimMode::Exact {
            max_agents: DEFAULT_EXACT_AGENT_CAP,
        }
    }

    pub fn monte_carlo(seed: u64) -> Self {
        InterimMode::MonteCarlo {
            samples: DEFAULT_MONTE_CARLO_SAMPLES,
            seed,
        }
    }
}

impl Default for InterimMode {
    fn default() -> Self {
        InterimMode::exact()
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "sampling probability {p} must lie in [0, 1]"
        )))
    }
}

/// Interim win probabilities of the sampling rule at `s`.
pub fn sampling_interim(
    inst: &AuctionInstance,
    s: &SignalProfile,
    p: f64,
    mode: InterimMode,
) -> Result<Allocation> {
    check_probability(p)?;
    inst.space().validate(s)?;
    let n = inst.agents();
    let mut x = vec![0.0; n];
    match mode {
        InterimMode::Exact { max_agents } => {
            if n > max_agents.min(63) {
                return Err(Error::ExactCapExceeded {
                    agents: n,
                    cap: max_agents.min(63),
                });
            }
            for mask in 0..1u64 << n {
                let partition = Partition::from_mask(n, mask);
                if let Some(winner) = sampling_realize(inst, s, &partition) {
                    x[winner] += partition.weight(p);
                }
            }
        }
        InterimMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidParameter(
                    "monte-carlo mode needs at least one sample".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut wins = vec![0u64; n];
            for _ in 0..samples {
                let partition = Partition::new((0..n).map(|_| rng.random::<f64>() < p).collect());
                if let Some(winner) = sampling_realize(inst, s, &partition) {
                    wins[winner] += 1;
                }
            }
            for (xi, w) in x.iter_mut().zip(wins) {
                *xi = w as f64 / samples as f64;
            }
        }
    }
    Ok(Allocation::new(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRule {
    pub p: f64,
    pub mode: InterimMode,
}

impl SamplingRule {
    pub fn exact(p: f64) -> Self {
        SamplingRule {
            p,
            mode: InterimMode::exact(),
        }
    }
}

impl AllocationRule for SamplingRule {
    fn allocate(&self, inst: &AuctionInstance, s: &SignalProfile) -> Result<Allocation> {
        sampling_interim(inst, s, self.p, self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_instance;

    fn s21() -> SignalProfile {
        SignalProfile::new(vec![2, 1])
    }

    #[test]
    fn realizations_on_worked_example() {
        let inst = worked_instance();
        // A = {2}, B = {1} (zero-based: agent 1 sampled, agent 0 bids).
        let p = Partition::from_sample_set(2, &[1]);
        assert_eq!(proxy_value(&inst, &s21(), &p, 0), 2.5);
        assert_eq!(sampling_realize(&inst, &s21(), &p), Some(0));
        let p = Partition::from_sample_set(2, &[0]);
        assert_eq!(proxy_value(&inst, &s21(), &p, 1), 2.0);
        assert_eq!(sampling_realize(&inst, &s21(), &p), Some(1));
        let all = Partition::from_sample_set(2, &[0, 1]);
        assert_eq!(sampling_realize(&inst, &s21(), &all), None);
        let none = Partition::from_sample_set(2, &[]);
        assert_eq!(sampling_realize(&inst, &s21(), &none), Some(0));
    }

    #[test]
    fn exact_interim_on_worked_example() {
        let inst = worked_instance();
        let x = sampling_interim(&inst, &s21(), 0.5, InterimMode::exact()).unwrap();
        assert_eq!(x.x, vec![0.5, 0.25]);
    }

    #[test]
    fn p_zero_puts_everyone_in_b() {
        let inst = worked_instance();
        let x = sampling_interim(&inst, &s21(), 0.0, InterimMode::exact()).unwrap();
        // w_1 = v_1(2, 0) = 2, w_2 = v_2(0, 1) = 1.
        assert_eq!(x.x, vec![1.0, 0.0]);
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let inst = worked_instance();
        let exact = sampling_interim(&inst, &s21(), 0.5, InterimMode::exact()).unwrap();
        let mc = sampling_interim(&inst, &s21(), 0.5, InterimMode::monte_carlo(42)).unwrap();
        for (a, b) in exact.x.iter().zip(&mc.x) {
            assert!((a - b).abs() < 0.01);
        }
        let again = sampling_interim(&inst, &s21(), 0.5, InterimMode::monte_carlo(42)).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn exact_cap_is_enforced() {
        let inst = worked_instance();
        let err = sampling_interim(&inst, &s21(), 0.5, InterimMode::Exact { max_agents: 1 });
        assert!(matches!(
            err,
            Err(Error::ExactCapExceeded { agents: 2, cap: 1 })
        ));
    }

    #[test]
    fn rejects_bad_probability() {
        let inst = worked_instance();
        assert!(sampling_interim(&inst, &s21(), 1.5, InterimMode::exact()).is_err());
    }

    #[test]
    fn partition_weights_sum_to_one() {
        let p = 0.37;
        let total: f64 = (0..1u64 << 4)
            .map(|m| Partition::from_mask(4, m).weight(p))
            .sum();
        assert!((total - 1.0).abs() < 1e-15);
    }
}
