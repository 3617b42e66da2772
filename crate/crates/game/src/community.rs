use qpoker_core::{Circuit, Gate, Tag};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::card::{CardKind, Placement};
use crate::error::{GameError, GameResult};

/// Independent single-qubit preparations plus an optional Bell pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomStates {
    /// Weights of |0⟩, |1⟩, |+⟩, |−⟩.
    pub weights: [f64; 4],
    pub pair_probability: f64,
}

impl Default for RandomStates {
    fn default() -> Self {
        RandomStates { weights: [0.3, 0.3, 0.2, 0.2], pair_probability: 0.4 }
    }
}

impl RandomStates {
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Circuit {
        let mut c = Circuit::new(n).with_name("community");
        let pair = (n >= 2 && rng.random_bool(self.pair_probability)).then(|| {
            let v = sample(rng, n, 2);
            (v.index(0), v.index(1))
        });
        let total: f64 = self.weights.iter().sum();
        for q in 0..n {
            let mut u = rng.random::<f64>() * total;
            let mut pick = 3;
            for (k, w) in self.weights.iter().enumerate() {
                if u < *w {
                    pick = k;
                    break;
                }
                u -= w;
            }
            if pair.is_some_and(|(a, b)| q == a || q == b) {
                continue;
            }
            match pick {
                1 => {
                    c.push(Gate::x(q));
                }
                2 => {
                    c.push(Gate::h(q));
                }
                3 => {
                    c.push(Gate::x(q)).push(Gate::h(q));
                }
                _ => {}
            }
        }
        if let Some((a, b)) = pair {
            c.push(Gate::h(a)).push(Gate::cx(a, b));
        }
        c.ops = c.ops.into_iter().map(|g| g.tagged(Tag::Community)).collect();
        c
    }
}

/// Where the community circuit of a hand comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CommunitySource {
    Random(RandomStates),
    Fixed { circuit: Circuit },
}

impl Default for CommunitySource {
    fn default() -> Self {
        CommunitySource::Random(RandomStates::default())
    }
}

impl CommunitySource {
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> GameResult<Circuit> {
        match self {
            CommunitySource::Random(r) => Ok(r.generate(n, rng)),
            CommunitySource::Fixed { circuit } => {
                let mut c = circuit.widened(n)?;
                c.ops = c.ops.into_iter().map(|g| g.tagged(Tag::Community)).collect();
                Ok(c)
            }
        }
    }

    pub fn validate(&self, n: usize) -> GameResult<()> {
        match self {
            CommunitySource::Random(r) => {
                if r.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || r.weights.iter().sum::<f64>() <= 0.0 {
                    return Err(GameError::Config("community weights must be non-negative with positive sum".into()));
                }
                if !(0.0..=1.0).contains(&r.pair_probability) {
                    return Err(GameError::Config("pair probability outside [0, 1]".into()));
                }
                Ok(())
            }
            CommunitySource::Fixed { circuit } => {
                if circuit.n > n {
                    return Err(GameError::Config(format!("community circuit has {} qubits, table has {n}", circuit.n)));
                }
                circuit.validate().map_err(GameError::from)
            }
        }
    }
}

/// Cards that undo `community` when played in order, or `None` if some gate has no card.
pub fn reversal_hand(community: &Circuit) -> Option<Vec<Placement>> {
    community
        .ops
        .iter()
        .rev()
        .filter(|g| g.kind != qpoker_core::GateKind::PauliI)
        .map(|g| CardKind::inverting(g.kind).map(|card| Placement::new(card, g.targets.clone())))
        .collect()
}
