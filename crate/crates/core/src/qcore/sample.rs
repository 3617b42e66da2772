use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::qcore::observable::expectation_ones;
use crate::qcore::state::StateVector;
use crate::scalar::Real;

/// Measurement histogram over all `2^n` outcomes, indexed by basis state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    n: usize,
    counts: Vec<u64>,
}

/// Renders `index` as `q_{n−1} … q_0`.
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n).rev().map(|k| if index >> k & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a `q_{n−1} … q_0` bit string.
pub fn parse_bitstring(s: &str) -> QResult<usize> {
    if s.is_empty() || s.len() > 64 {
        return Err(QError::Malformed(format!("bad bit string {s:?}")));
    }
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(QError::Malformed(format!("bad bit string {s:?}"))),
    })
}

impl Counts {
    pub fn zeros(n: usize) -> Self {
        Counts { n, counts: vec![0; 1 << n] }
    }

    pub fn from_vec(counts: Vec<u64>) -> QResult<Self> {
        if counts.len() < 2 || !counts.len().is_power_of_two() {
            return Err(QError::Malformed("histogram length must be a power of two".into()));
        }
        Ok(Counts { n: counts.len().trailing_zeros() as usize, counts })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn record(&mut self, outcome: usize) {
        self.counts[outcome] += 1;
    }

    pub fn get(&self, outcome: usize) -> u64 {
        self.counts[outcome]
    }

    /// Count for a bit string such as `"01101"`; zero for unseen or malformed strings.
    pub fn get_str(&self, bits: &str) -> u64 {
        parse_bitstring(bits).ok().filter(|&i| i < self.counts.len()).map_or(0, |i| self.counts[i])
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Nonzero entries keyed by bit string.
    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (bitstring(i, self.n), c))
            .collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.shots().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn expectation_ones(&self) -> QResult<f64> {
        expectation_ones(&self.counts.iter().map(|&c| c as f64).collect::<Vec<_>>())
    }
}

/// Cumulative distribution used for inverse-transform sampling.
#[derive(Clone, Debug)]
pub(crate) struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    pub(crate) fn new(probs: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .into_iter()
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect();
        Sampler { cumulative }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // Skip trailing zero-probability outcomes that rounding could land on.
        idx.min(self.cumulative.len() - 1)
    }
}

/// Draws `shots` i.i.d. computational-basis measurements of `state`.
pub fn sample<T: Real, R: Rng + ?Sized>(state: &StateVector<T>, shots: u64, rng: &mut R) -> QResult<Counts> {
    if shots == 0 {
        return Err(QError::ZeroShots);
    }
    let sampler = Sampler::new(state.probabilities().into_iter().map(Real::to_f64_lossy));
    let mut counts = Counts::zeros(state.num_qubits());
    for _ in 0..shots {
        counts.record(sampler.draw(rng));
    }
    Ok(counts)
}
