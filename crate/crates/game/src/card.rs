use std::fmt;
use std::str::FromStr;

use qpoker_core::{Gate, GateKind, Tag};
use serde::{Deserialize, Serialize};

use crate::error::GameError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CardKind {
    X,
    H,
    Z,
    ZH,
    CX,
}

impl CardKind {
    pub const ALL: [CardKind; 5] = [CardKind::X, CardKind::H, CardKind::Z, CardKind::ZH, CardKind::CX];

    pub fn arity(self) -> usize {
        match self {
            CardKind::CX => 2,
            _ => 1,
        }
    }

    /// Gates the card applies, in order. `ZH` is Z followed by H.
    pub fn gates(self, targets: &[usize]) -> Vec<Gate> {
        let q = targets[0];
        let gates = match self {
            CardKind::X => vec![Gate::x(q)],
            CardKind::H => vec![Gate::h(q)],
            CardKind::Z => vec![Gate::z(q)],
            CardKind::ZH => vec![Gate::z(q), Gate::h(q)],
            CardKind::CX => vec![Gate::cx(q, targets[1])],
        };
        gates.into_iter().map(|g| g.tagged(Tag::Player)).collect()
    }

    /// The card undoing a single gate of the community circuit, if any.
    pub fn inverting(kind: GateKind) -> Option<CardKind> {
        match kind {
            GateKind::X | GateKind::PauliX => Some(CardKind::X),
            GateKind::Z | GateKind::PauliZ => Some(CardKind::Z),
            GateKind::H => Some(CardKind::H),
            GateKind::CX => Some(CardKind::CX),
            _ => None,
        }
    }
}

impl fmt::Display for CardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for CardKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CardKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| GameError::CardNotInHand(s.to_string()))
    }
}

/// A card played onto specific qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub card: CardKind,
    pub targets: Vec<usize>,
}

impl Placement {
    pub fn new(card: CardKind, targets: impl Into<Vec<usize>>) -> Self {
        Placement { card, targets: targets.into() }
    }
}
