use qpoker_core::QError;
use thiserror::Error;

pub type GameResult<T> = Result<T, GameError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("seat {0} does not exist")]
    NoSuchSeat(usize),
    #[error("not seat {0}'s turn")]
    OutOfTurn(usize),
    #[error("seat {0} has folded")]
    Folded(usize),
    #[error("illegal action: {0}")]
    IllegalAction(String),
    #[error("raise of {got} is below the minimum {min}")]
    RaiseBelowMinimum { min: u64, got: u64 },
    #[error("action not allowed during {0}")]
    WrongPhase(String),
    #[error("card {0} is not in hand")]
    CardNotInHand(String),
    #[error("bad targets: {0}")]
    BadTargets(String),
    #[error("replay failed: {0}")]
    Replay(String),
    #[error(transparent)]
    Quantum(#[from] QError),
}
