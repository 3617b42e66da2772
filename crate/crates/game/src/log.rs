use serde::{Deserialize, Serialize};

use crate::card::CardKind;
use crate::config::GameConfig;
use crate::error::{GameError, GameResult};
use crate::state::{Action, GameState};

/// One line of a hand's JSON-lines log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum GameEvent {
    NewHand { config: GameConfig, stacks: Vec<u64>, dealer: usize, benchmark: bool },
    Act { seat: usize, action: Action },
    Place { seat: usize, card: CardKind, targets: Vec<usize> },
    Showdown,
}

pub fn to_jsonl(events: &[GameEvent]) -> String {
    events.iter().map(|e| serde_json::to_string(e).expect("event serializes") + "\n").collect()
}

pub fn from_jsonl(text: &str) -> GameResult<Vec<GameEvent>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| GameError::Replay(format!("line {}: {e}", i + 1))))
        .collect()
}

/// Rebuilds a hand by re-applying its events.
pub fn replay(events: &[GameEvent]) -> GameResult<GameState> {
    let (first, rest) = events.split_first().ok_or_else(|| GameError::Replay("empty log".into()))?;
    let GameEvent::NewHand { config, stacks, dealer, benchmark } = first else {
        return Err(GameError::Replay("log must start with new_hand".into()));
    };
    let mut state = if *benchmark {
        GameState::benchmark_hand(config, stacks, *dealer)?
    } else {
        GameState::new_hand(config, stacks, *dealer)?
    };
    for e in rest {
        match e {
            GameEvent::NewHand { .. } => return Err(GameError::Replay("second new_hand in one log".into())),
            GameEvent::Act { seat, action } => state.act(*seat, *action)?,
            GameEvent::Place { seat, card, targets } => state.place_gate(*seat, *card, targets)?,
            GameEvent::Showdown => {
                state.showdown()?;
            }
        }
    }
    Ok(state)
}
