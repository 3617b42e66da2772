//! Quantum Texas hold'em: five community qubits, gate cards and betting.
//!
//! Players bet over flop, turn and river while qubits are revealed, then place their gate
//! cards on a personal copy of the community circuit. One measurement per player decides
//! the pot.

pub mod bot;
pub mod card;
pub mod community;
pub mod config;
pub mod error;
pub mod log;
pub mod pots;
pub mod state;

pub use card::{CardKind, Placement};
pub use community::{reversal_hand, CommunitySource, RandomStates};
pub use config::{GameConfig, Scoring};
pub use error::{GameError, GameResult};
pub use log::{replay, GameEvent};
pub use state::{Action, GameState, HandOutcome, LegalActions, QubitPreview, Round, Score};
