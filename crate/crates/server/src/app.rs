use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures_util::{SinkExt, StreamExt};
use qpoker_game::log::{from_jsonl, to_jsonl};
use tokio::io::AsyncWriteExt;
use tokio::sync::{broadcast, Mutex, RwLock};

use crate::protocol::{MessageType, SessionMessage, PROTOCOL_VERSION};
use crate::session::{CreateGame, Created, Outgoing, Session, SessionMeta};

const CHANNEL_CAPACITY: usize = 1024;

/// A live game: its session behind a lock and the fan-out channel for committed updates.
pub struct GameHandle {
    session: Mutex<Session>,
    persisted: Mutex<usize>,
    updates: broadcast::Sender<Arc<Vec<Outgoing>>>,
}

#[derive(Clone, Default)]
pub struct AppState {
    games: Arc<RwLock<HashMap<String, Arc<GameHandle>>>>,
    data_dir: Option<PathBuf>,
}

impl AppState {
    pub fn in_memory() -> Self {
        AppState::default()
    }

    /// Persists games under `dir` and reloads every game already logged there.
    pub async fn with_data_dir(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        tokio::fs::create_dir_all(&dir).await?;
        let state = AppState { games: Arc::default(), data_dir: Some(dir.clone()) };
        let mut entries = tokio::fs::read_dir(&dir).await?;
        while let Some(entry) = entries.next_entry().await? {
            let path = entry.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            let Some(id) = name.strip_suffix(".meta.json") else { continue };
            match load_session(&dir, id).await {
                Ok(session) => {
                    let persisted = session.state.log.len();
                    state.games.write().await.insert(id.to_string(), Arc::new(GameHandle::new(session, persisted)));
                }
                Err(e) => tracing::warn!("skipping game {id}: {e}"),
            }
        }
        Ok(state)
    }

    pub async fn game(&self, id: &str) -> Option<Arc<GameHandle>> {
        self.games.read().await.get(id).cloned()
    }

    /// Hash of a game's current state, for replay checks.
    pub async fn state_hash(&self, id: &str) -> Option<String> {
        Some(self.game(id).await?.session.lock().await.state.state_hash())
    }

    async fn persist(&self, handle: &GameHandle, session: &Session) -> std::io::Result<()> {
        let Some(dir) = &self.data_dir else { return Ok(()) };
        let mut written = handle.persisted.lock().await;
        let fresh = &session.state.log[*written..];
        if fresh.is_empty() {
            return Ok(());
        }
        let mut file = tokio::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(format!("{}.jsonl", session.id())))
            .await?;
        file.write_all(to_jsonl(fresh).as_bytes()).await?;
        file.flush().await?;
        *written = session.state.log.len();
        Ok(())
    }
}

async fn load_session(dir: &Path, id: &str) -> Result<Session, String> {
    let meta = tokio::fs::read_to_string(dir.join(format!("{id}.meta.json"))).await.map_err(|e| e.to_string())?;
    let meta: SessionMeta = serde_json::from_str(&meta).map_err(|e| e.to_string())?;
    let log = tokio::fs::read_to_string(dir.join(format!("{id}.jsonl"))).await.map_err(|e| e.to_string())?;
    let events = from_jsonl(&log).map_err(|e| e.to_string())?;
    Session::restore(meta, &events).map_err(|e| e.to_string())
}

impl GameHandle {
    fn new(session: Session, persisted: usize) -> Self {
        GameHandle { session: Mutex::new(session), persisted: Mutex::new(persisted), updates: broadcast::channel(CHANNEL_CAPACITY).0 }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}/log", get(game_log))
        .route("/game/{id}", get(game_socket))
        .with_state(state)
}

fn json_error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(serde_json::json!({ "v": PROTOCOL_VERSION, "error": message.into() }))).into_response()
}

fn new_game_id() -> String {
    hex::encode(rand::random::<[u8; 8]>())
}

async fn create_game(State(app): State<AppState>, Json(req): Json<CreateGame>) -> Response {
    let id = new_game_id();
    let session = match Session::create(id.clone(), &req, &mut rand::rng()) {
        Ok(s) => s,
        Err(e) => return json_error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let created = Created { v: PROTOCOL_VERSION, game: id.clone(), tokens: session.meta.tokens.clone() };
    if let Some(dir) = &app.data_dir {
        let meta = serde_json::to_string(&session.meta).expect("meta serializes");
        if let Err(e) = tokio::fs::write(dir.join(format!("{id}.meta.json")), meta).await {
            return json_error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string());
        }
    }
    let handle = Arc::new(GameHandle::new(session, 0));
    {
        let session = handle.session.lock().await;
        if let Err(e) = app.persist(&handle, &session).await {
            return json_error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string());
        }
    }
    app.games.write().await.insert(id, handle);
    (StatusCode::CREATED, Json(created)).into_response()
}

/// The event log, once the hand is over. Earlier it would reveal the deal.
async fn game_log(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(handle) = app.game(&id).await else {
        return json_error(StatusCode::NOT_FOUND, format!("no game {id}"));
    };
    let session = handle.session.lock().await;
    if !session.state.is_complete() {
        return json_error(StatusCode::CONFLICT, "hand in progress");
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], to_jsonl(&session.state.log)).into_response()
}

async fn game_socket(State(app): State<AppState>, UrlPath(id): UrlPath<String>, ws: WebSocketUpgrade) -> Response {
    let Some(handle) = app.game(&id).await else {
        return json_error(StatusCode::NOT_FOUND, format!("no game {id}"));
    };
    ws.on_upgrade(move |socket| serve_socket(app, handle, id, socket))
}

async fn send(sink: &mut futures_util::stream::SplitSink<WebSocket, Message>, msg: &SessionMessage) -> bool {
    let text = serde_json::to_string(msg).expect("message serializes");
    sink.send(Message::Text(text.into())).await.is_ok()
}

async fn serve_socket(app: AppState, handle: Arc<GameHandle>, id: String, socket: WebSocket) {
    let (mut sink, mut stream) = socket.split();

    // The first frame must be a join carrying a seat token.
    let seat = loop {
        let Some(Ok(frame)) = stream.next().await else { return };
        let Message::Text(text) = frame else { continue };
        let parsed: Result<SessionMessage, _> = serde_json::from_str(&text);
        let seat = match &parsed {
            Ok(m) if m.v == PROTOCOL_VERSION && m.kind == MessageType::Join => {
                let session = handle.session.lock().await;
                m.token.as_deref().and_then(|t| session.seat_of(t))
            }
            _ => None,
        };
        match seat {
            Some(s) => break s,
            None => {
                send(&mut sink, &SessionMessage::error(Some(&id), "expected a v1 join with a valid token")).await;
                return;
            }
        }
    };

    let mut updates = handle.updates.subscribe();
    {
        let session = handle.session.lock().await;
        let hello = SessionMessage::new(MessageType::State, &id, session.seq(), session.view(seat));
        drop(session);
        if !send(&mut sink, &hello).await {
            return;
        }
    }

    loop {
        tokio::select! {
            frame = stream.next() => {
                let Some(Ok(frame)) = frame else { break };
                let text = match frame {
                    Message::Text(t) => t,
                    Message::Close(_) => break,
                    _ => continue,
                };
                let reply = match serde_json::from_str::<SessionMessage>(&text) {
                    Err(e) => Some(SessionMessage::error(Some(&id), format!("malformed message: {e}"))),
                    Ok(msg) => {
                        let mut session = handle.session.lock().await;
                        match session.handle(seat, &msg) {
                            Err(e) => Some(SessionMessage::error(Some(&id), e)),
                            Ok(out) => {
                                if let Err(e) = app.persist(&handle, &session).await {
                                    tracing::error!("persisting game {id}: {e}");
                                }
                                let _ = handle.updates.send(Arc::new(out));
                                None
                            }
                        }
                    }
                };
                if let Some(r) = reply {
                    if !send(&mut sink, &r).await {
                        break;
                    }
                }
            }
            batch = updates.recv() => {
                let batch = match batch {
                    Ok(b) => b,
                    Err(broadcast::error::RecvError::Lagged(_)) => {
                        let session = handle.session.lock().await;
                        let resync = SessionMessage::new(MessageType::State, &id, session.seq(), session.view(seat));
                        drop(session);
                        Arc::new(vec![Outgoing { to: Some(seat), msg: resync }])
                    }
                    Err(broadcast::error::RecvError::Closed) => break,
                };
                for o in batch.iter().filter(|o| o.to.is_none_or(|s| s == seat)) {
                    if !send(&mut sink, &o.msg).await {
                        return;
                    }
                }
            }
        }
    }
}
