//! Authoritative table server for quantum poker.
//!
//! `POST /games` seats players and hands out bearer tokens, `GET /games/{id}/log` returns
//! a finished hand's JSON-lines log and `/game/{id}` is the WebSocket every client joins.

pub mod app;
pub mod protocol;
pub mod session;

pub use app::{router, AppState};
pub use protocol::{MessageType, PlayerView, SessionMessage, PROTOCOL_VERSION};
pub use session::{CreateGame, Created, Session};
