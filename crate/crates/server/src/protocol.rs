//! Version 1 of the table protocol.

use qpoker_game::{CardKind, GameState, HandOutcome, LegalActions, Placement, QubitPreview, Round};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageType {
    Join,
    State,
    Act,
    Place,
    Preview,
    Reveal,
    Showdown,
    Error,
}

/// Envelope for every frame in either direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionMessage {
    pub v: u32,
    #[serde(rename = "type")]
    pub kind: MessageType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub payload: Value,
}

impl SessionMessage {
    pub fn new(kind: MessageType, game: &str, seq: u64, payload: impl Serialize) -> Self {
        SessionMessage {
            v: PROTOCOL_VERSION,
            kind,
            game: Some(game.to_string()),
            token: None,
            seq: Some(seq),
            payload: serde_json::to_value(payload).expect("payload serializes"),
        }
    }

    pub fn error(game: Option<&str>, message: impl Into<String>) -> Self {
        SessionMessage {
            v: PROTOCOL_VERSION,
            kind: MessageType::Error,
            game: game.map(str::to_string),
            token: None,
            seq: None,
            payload: serde_json::json!({ "message": message.into() }),
        }
    }

    pub fn request(kind: MessageType, game: &str, token: &str, payload: Value) -> Self {
        SessionMessage {
            v: PROTOCOL_VERSION,
            kind,
            game: Some(game.to_string()),
            token: Some(token.to_string()),
            seq: None,
            payload,
        }
    }
}

/// Display band of a qubit: cyan at P(1) = 0, blue at 1/2, pink at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Color {
    Cyan,
    CyanBlue,
    Blue,
    BluePink,
    Pink,
}

impl Color {
    pub fn of(p_one: f64) -> Color {
        const TOL: f64 = 1e-9;
        if p_one < TOL {
            Color::Cyan
        } else if (p_one - 0.5).abs() < TOL {
            Color::Blue
        } else if p_one > 1.0 - TOL {
            Color::Pink
        } else if p_one < 0.5 {
            Color::CyanBlue
        } else {
            Color::BluePink
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitView {
    pub qubit: usize,
    pub p_one: f64,
    pub paired: bool,
    pub color: Color,
}

impl From<QubitPreview> for QubitView {
    fn from(p: QubitPreview) -> Self {
        QubitView { qubit: p.qubit, p_one: p.p_one, paired: p.paired, color: Color::of(p.p_one) }
    }
}

/// What everyone may know about a seat. Cards in hand appear only as a count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeatView {
    pub seat: usize,
    pub name: String,
    pub stack: u64,
    pub bet: u64,
    pub folded: bool,
    pub all_in: bool,
    pub cards: usize,
    pub ready: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placements: Option<Vec<Placement>>,
}

/// One seat's redacted view of the table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlayerView {
    pub seat: usize,
    pub round: Round,
    pub dealer: usize,
    pub pot: u64,
    pub current_bet: u64,
    pub to_act: Option<usize>,
    pub revealed: usize,
    pub benchmark: bool,
    pub seats: Vec<SeatView>,
    pub hand: Vec<CardKind>,
    pub placements: Vec<Placement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub legal: Option<LegalActions>,
    pub preview: Vec<QubitView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<HandOutcome>,
}

impl PlayerView {
    pub fn build(state: &GameState, names: &[String], ready: &[bool], seat: usize) -> PlayerView {
        let done = state.round == Round::Complete;
        let seats = state
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| SeatView {
                seat: i,
                name: names[i].clone(),
                stack: p.stack,
                bet: p.bet,
                folded: p.folded,
                all_in: p.all_in(),
                cards: p.hand.len(),
                ready: ready[i],
                placements: (done && !p.folded).then(|| p.placements.clone()),
            })
            .collect();
        let me = &state.players[seat];
        let preview = if me.folded {
            vec![]
        } else {
            state.preview(seat).map(|v| v.into_iter().map(QubitView::from).collect()).unwrap_or_default()
        };
        PlayerView {
            seat,
            round: state.round,
            dealer: state.dealer,
            pot: state.pot(),
            current_bet: state.current_bet,
            to_act: state.to_act,
            revealed: state.revealed,
            benchmark: state.benchmark,
            seats,
            hand: me.hand.clone(),
            placements: me.placements.clone(),
            legal: state.legal_actions(seat).ok(),
            preview,
            outcome: state.outcome.clone(),
        }
    }
}

/// Request body of the place message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacePayload {
    pub card: CardKind,
    pub targets: Vec<usize>,
}

/// Request body of the preview message: placements to try without committing them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreviewPayload {
    #[serde(default)]
    pub placements: Vec<Placement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevealPayload {
    pub round: Round,
    pub revealed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShowdownPayload {
    pub outcome: HandOutcome,
    pub placements: Vec<(usize, Vec<Placement>)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_bands() {
        assert_eq!(Color::of(0.0), Color::Cyan);
        assert_eq!(Color::of(0.5), Color::Blue);
        assert_eq!(Color::of(1.0), Color::Pink);
        assert_eq!(Color::of(0.2), Color::CyanBlue);
        assert_eq!(Color::of(0.8), Color::BluePink);
        assert_eq!(serde_json::to_value(Color::BluePink).unwrap(), "blue-pink");
    }

    #[test]
    fn envelope_shape() {
        let m = SessionMessage::request(MessageType::Act, "g1", "t", serde_json::json!({"type": "raise", "amount": 4}));
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["v"], 1);
        assert_eq!(v["type"], "act");
        assert_eq!(v["payload"]["amount"], 4);
        let back: SessionMessage = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let action: qpoker_game::Action = serde_json::from_value(back.payload).unwrap();
        assert_eq!(action, qpoker_game::Action::Raise(4));
        let fold: qpoker_game::Action = serde_json::from_str(r#"{"type":"fold"}"#).unwrap();
        assert_eq!(fold, qpoker_game::Action::Fold);
    }
}
