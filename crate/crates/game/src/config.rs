use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::card::CardKind;
use crate::community::CommunitySource;
use crate::error::{GameError, GameResult};

/// How a player's final state is turned into a score.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scoring {
    /// One measurement shot; the score is the number of 1s.
    #[default]
    Shot,
    /// The exact expected number of 1s. Teaching variant.
    Expectation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub n_community_qubits: usize,
    pub deck: BTreeMap<CardKind, usize>,
    pub hand_size: usize,
    pub small_blind: u64,
    pub big_blind: u64,
    pub seed: u64,
    pub scoring: Scoring,
    pub community: CommunitySource,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            n_community_qubits: 5,
            deck: CardKind::ALL.into_iter().map(|k| (k, 4)).collect(),
            hand_size: 3,
            small_blind: 1,
            big_blind: 2,
            seed: 0,
            scoring: Scoring::Shot,
            community: CommunitySource::default(),
        }
    }
}

impl GameConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn deck_size(&self) -> usize {
        self.deck.values().sum()
    }

    /// The deck as a flat list, in card-kind order.
    pub fn deck_cards(&self) -> Vec<CardKind> {
        self.deck.iter().flat_map(|(&k, &n)| std::iter::repeat_n(k, n)).collect()
    }

    pub fn validate(&self, players: usize) -> GameResult<()> {
        if !(1..=qpoker_core::qcore::state::MAX_QUBITS).contains(&self.n_community_qubits) {
            return Err(GameError::Config(format!("{} community qubits unsupported", self.n_community_qubits)));
        }
        if self.small_blind == 0 || self.big_blind == 0 {
            return Err(GameError::Config("blinds must be positive".into()));
        }
        if self.small_blind > self.big_blind {
            return Err(GameError::Config("small blind exceeds big blind".into()));
        }
        if self.hand_size == 0 {
            return Err(GameError::Config("hand size must be at least 1".into()));
        }
        if self.n_community_qubits < 2 && self.deck.get(&CardKind::CX).copied().unwrap_or(0) > 0 {
            return Err(GameError::Config("CX cards need two qubits".into()));
        }
        if self.deck_size() < self.hand_size * players {
            return Err(GameError::Config(format!(
                "deck of {} cannot deal {} cards to {players} players",
                self.deck_size(),
                self.hand_size
            )));
        }
        self.community.validate(self.n_community_qubits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_deck() {
        let c = GameConfig::default();
        assert_eq!(c.deck_size(), 20);
        assert_eq!(c.deck_cards().iter().filter(|&&k| k == CardKind::ZH).count(), 4);
        c.validate(6).unwrap();
        assert!(c.validate(7).is_err());
    }

    #[test]
    fn bad_configs() {
        let c = GameConfig { big_blind: 0, ..Default::default() };
        assert!(c.validate(2).is_err());
        let c = GameConfig { hand_size: 0, ..Default::default() };
        assert!(c.validate(2).is_err());
        let c = GameConfig { small_blind: 5, big_blind: 2, ..Default::default() };
        assert!(c.validate(2).is_err());
    }

    #[test]
    fn json_defaults() {
        let c: GameConfig = serde_json::from_str(r#"{"seed": 9, "big_blind": 4}"#).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.hand_size, 3);
        let back: GameConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<GameConfig>(r#"{"sead": 9}"#).is_err());
    }
}
