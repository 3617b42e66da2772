use qpoker_game::{Action, GameConfig, GameError, GameState, Round};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::{
    MessageType, PlacePayload, PlayerView, PreviewPayload, QubitView, RevealPayload, SessionMessage, ShowdownPayload,
    PROTOCOL_VERSION,
};

pub const DEFAULT_STACK: u64 = 100;

/// Body of `POST /games`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    pub players: Vec<String>,
    #[serde(default)]
    pub stacks: Option<Vec<u64>>,
    #[serde(default)]
    pub dealer: usize,
    #[serde(default)]
    pub config: GameConfig,
    #[serde(default)]
    pub benchmark: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeatToken {
    pub seat: usize,
    pub name: String,
    pub token: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Created {
    pub v: u32,
    pub game: String,
    pub tokens: Vec<SeatToken>,
}

/// Who a server message goes to.
#[derive(Clone, Debug, PartialEq)]
pub struct Outgoing {
    pub to: Option<usize>,
    pub msg: SessionMessage,
}

impl Outgoing {
    fn all(msg: SessionMessage) -> Self {
        Outgoing { to: None, msg }
    }

    fn seat(seat: usize, msg: SessionMessage) -> Self {
        Outgoing { to: Some(seat), msg }
    }
}

/// Identity and seating of a game, persisted next to its event log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionMeta {
    pub id: String,
    pub tokens: Vec<SeatToken>,
}

pub struct Session {
    pub meta: SessionMeta,
    pub state: GameState,
    pub ready: Vec<bool>,
}

pub fn new_token<R: Rng + ?Sized>(rng: &mut R) -> String {
    hex::encode(rng.random::<[u8; 16]>())
}

impl Session {
    pub fn create<R: Rng + ?Sized>(id: String, req: &CreateGame, rng: &mut R) -> Result<Session, GameError> {
        let n = req.players.len();
        if n < 2 {
            return Err(GameError::Config("a game needs at least two players".into()));
        }
        let stacks = req.stacks.clone().unwrap_or_else(|| vec![DEFAULT_STACK; n]);
        if stacks.len() != n {
            return Err(GameError::Config(format!("{} stacks for {n} players", stacks.len())));
        }
        let state = if req.benchmark {
            GameState::benchmark_hand(&req.config, &stacks, req.dealer)?
        } else {
            GameState::new_hand(&req.config, &stacks, req.dealer)?
        };
        let mut tokens: Vec<SeatToken> = Vec::with_capacity(n);
        for (seat, name) in req.players.iter().enumerate() {
            let mut token = new_token(rng);
            while tokens.iter().any(|t| t.token == token) {
                token = new_token(rng);
            }
            tokens.push(SeatToken { seat, name: name.clone(), token });
        }
        Ok(Session { meta: SessionMeta { id, tokens }, state, ready: vec![false; n] })
    }

    /// Rebuilds a session from its metadata and event log.
    pub fn restore(meta: SessionMeta, events: &[qpoker_game::GameEvent]) -> Result<Session, GameError> {
        let state = qpoker_game::replay(events)?;
        let n = state.num_players();
        if meta.tokens.len() != n {
            return Err(GameError::Replay(format!("{} tokens for {n} seats", meta.tokens.len())));
        }
        Ok(Session { meta, state, ready: vec![false; n] })
    }

    /// Number of committed game events after the deal.
    pub fn seq(&self) -> u64 {
        self.state.log.len() as u64 - 1
    }

    pub fn id(&self) -> &str {
        &self.meta.id
    }

    pub fn seat_of(&self, token: &str) -> Option<usize> {
        self.meta.tokens.iter().find(|t| t.token == token).map(|t| t.seat)
    }

    fn names(&self) -> Vec<String> {
        self.meta.tokens.iter().map(|t| t.name.clone()).collect()
    }

    pub fn view(&self, seat: usize) -> PlayerView {
        PlayerView::build(&self.state, &self.names(), &self.ready, seat)
    }

    fn state_msg(&self, seat: usize) -> Outgoing {
        Outgoing::seat(seat, SessionMessage::new(MessageType::State, self.id(), self.seq(), self.view(seat)))
    }

    fn states_for_all(&self) -> Vec<Outgoing> {
        (0..self.state.num_players()).map(|s| self.state_msg(s)).collect()
    }

    fn showdown_msg(&self) -> Outgoing {
        let outcome = self.state.outcome.clone().expect("hand is complete");
        let placements = (0..self.state.num_players())
            .filter(|&s| !self.state.players[s].folded)
            .map(|s| (s, self.state.players[s].placements.clone()))
            .collect();
        Outgoing::all(SessionMessage::new(MessageType::Showdown, self.id(), self.seq(), ShowdownPayload { outcome, placements }))
    }

    /// Applies one client message from `seat`. On error nothing changes and only the
    /// sender is told.
    pub fn handle(&mut self, seat: usize, msg: &SessionMessage) -> Result<Vec<Outgoing>, String> {
        if msg.v != PROTOCOL_VERSION {
            return Err(format!("unsupported protocol version {}", msg.v));
        }
        if let Some(g) = &msg.game {
            if g != self.id() {
                return Err(format!("message for game {g} sent to game {}", self.id()));
            }
        }
        if let Some(t) = &msg.token {
            if self.seat_of(t) != Some(seat) {
                return Err("token does not match this connection".into());
            }
        }
        match msg.kind {
            MessageType::Join | MessageType::State => Ok(vec![self.state_msg(seat)]),
            MessageType::Act => {
                let action: Action = payload(msg)?;
                let before = self.state.revealed;
                self.state.act(seat, action).map_err(|e| e.to_string())?;
                let mut out = Vec::new();
                if self.state.revealed != before {
                    let reveal = RevealPayload { round: self.state.round, revealed: self.state.revealed };
                    out.push(Outgoing::all(SessionMessage::new(MessageType::Reveal, self.id(), self.seq(), reveal)));
                }
                out.extend(self.states_for_all());
                if self.state.is_complete() {
                    out.push(self.showdown_msg());
                }
                Ok(out)
            }
            MessageType::Place => {
                let p: PlacePayload = payload(msg)?;
                self.state.place_gate(seat, p.card, &p.targets).map_err(|e| e.to_string())?;
                Ok(vec![self.preview_msg(seat, self.view(seat).preview), self.state_msg(seat)])
            }
            MessageType::Preview => {
                let p: PreviewPayload = if msg.payload.is_null() { PreviewPayload::default() } else { payload(msg)? };
                let mut trial = self.state.clone();
                for pl in &p.placements {
                    trial.place_gate(seat, pl.card, &pl.targets).map_err(|e| e.to_string())?;
                }
                let preview = trial.preview(seat).map_err(|e| e.to_string())?;
                Ok(vec![self.preview_msg(seat, preview.into_iter().map(QubitView::from).collect())])
            }
            MessageType::Reveal => {
                if self.state.round != Round::Showdown {
                    return Err(format!("cannot reveal during {}", self.state.round.name()));
                }
                if self.state.players[seat].folded {
                    return Err(GameError::Folded(seat).to_string());
                }
                if self.ready[seat] {
                    return Err("already revealed".into());
                }
                self.ready[seat] = true;
                let waiting = (0..self.ready.len()).any(|s| !self.state.players[s].folded && !self.ready[s]);
                if waiting {
                    return Ok(self.states_for_all());
                }
                self.state.showdown().map_err(|e| e.to_string())?;
                let mut out = self.states_for_all();
                out.push(self.showdown_msg());
                Ok(out)
            }
            MessageType::Showdown | MessageType::Error => Err(format!("clients cannot send {:?} messages", msg.kind)),
        }
    }

    fn preview_msg(&self, seat: usize, preview: Vec<QubitView>) -> Outgoing {
        Outgoing::seat(seat, SessionMessage::new(MessageType::Preview, self.id(), self.seq(), serde_json::json!({ "qubits": preview })))
    }
}

fn payload<T: serde::de::DeserializeOwned>(msg: &SessionMessage) -> Result<T, String> {
    serde_json::from_value(msg.payload.clone()).map_err(|e| format!("bad {:?} payload: {e}", msg.kind))
}
