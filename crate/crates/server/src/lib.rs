//! Live Cards sessions over HTTP and websockets.
//!
//! [`SessionManager`] holds the game logic and can be driven directly; [`http::router`]
//! exposes it on the network. See `PROTOCOL.md` for the message schemas.

pub mod http;
pub mod protocol;
pub mod session;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use cards_core::agent::PartnerAgent;
use cards_core::engine::{new_game, Action, ActionError, ConfigError, PlayerId};
use cards_core::model::LogRegModel;
use rand::Rng;
use thiserror::Error;
use tokio::sync::broadcast;

use protocol::{CreateRequest, Envelope, Opponent, SeatGrant};
use session::{SeatKind, Session};

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("invalid game config: {0}")]
    InvalidConfig(#[from] ConfigError),
    #[error("model not found: {0}")]
    ModelNotFound(String),
    #[error("model {path} is unusable: {message}")]
    InvalidModel { path: String, message: String },
    #[error("token does not hold a seat in this session")]
    NotYourSeat,
    #[error("no open seat to join")]
    SeatTaken,
    #[error("session is closed")]
    SessionClosed,
    #[error("session not found")]
    SessionNotFound,
    #[error(transparent)]
    Action(#[from] ActionError),
}

impl ServerError {
    pub fn code(&self) -> &'static str {
        match self {
            ServerError::InvalidConfig(_) => "invalid_config",
            ServerError::ModelNotFound(_) => "model_not_found",
            ServerError::InvalidModel { .. } => "invalid_model",
            ServerError::NotYourSeat => "not_your_seat",
            ServerError::SeatTaken => "seat_taken",
            ServerError::SessionClosed => "session_closed",
            ServerError::SessionNotFound => "session_not_found",
            ServerError::Action(_) => "action_rejected",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServerOptions {
    /// Model used when a create request names none.
    pub default_model: Option<PathBuf>,
    /// Where finished games are written as transcript JSONL.
    pub transcript_dir: Option<PathBuf>,
}

pub type SharedSession = Arc<Mutex<Session>>;

#[derive(Default)]
pub struct SessionManager {
    options: ServerOptions,
    sessions: Mutex<HashMap<String, SharedSession>>,
}

fn fresh_token() -> String {
    format!("{:032x}", rand::thread_rng().gen::<u128>())
}

fn load_model(path: &Path) -> Result<LogRegModel, ServerError> {
    let text = std::fs::read_to_string(path).map_err(|_| ServerError::ModelNotFound(path.display().to_string()))?;
    serde_json::from_str(&text)
        .map_err(|e| ServerError::InvalidModel { path: path.display().to_string(), message: e.to_string() })
}

/// Poisoning only means another request panicked mid-update; the game state is
/// still the last consistent one.
pub fn lock(session: &SharedSession) -> MutexGuard<'_, Session> {
    session.lock().unwrap_or_else(|e| e.into_inner())
}

impl SessionManager {
    pub fn new(options: ServerOptions) -> SessionManager {
        SessionManager { options, sessions: Mutex::new(HashMap::new()) }
    }

    /// Starts a game. The creator sits as P1; an agent opponent takes P2.
    pub fn create_session(&self, req: &CreateRequest) -> Result<SeatGrant, ServerError> {
        let config = req.config.clone().unwrap_or_default();
        config.validate()?;
        let agent_model = match req.opponent {
            Opponent::Human => None,
            Opponent::Agent => {
                let path = req
                    .model
                    .as_deref()
                    .map(PathBuf::from)
                    .or_else(|| self.options.default_model.clone())
                    .ok_or_else(|| ServerError::ModelNotFound("no model given".into()))?;
                Some((load_model(&path)?, path))
            }
        };
        let seed = req.seed.unwrap_or_else(|| rand::thread_rng().gen());
        let state = new_game(&config, seed)?;
        let token = fresh_token();
        let p2 = match agent_model {
            None => SeatKind::Human { token: None },
            Some((model, path)) => {
                let start = state.player(PlayerId::P2).pos;
                let agent = PartnerAgent::new(PlayerId::P2, model, &config, start).map_err(|e| {
                    ServerError::InvalidModel { path: path.display().to_string(), message: e.to_string() }
                })?;
                SeatKind::Agent(Box::new(agent))
            }
        };
        let mut sessions = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        let id = loop {
            let id = format!("s{:016x}", rand::thread_rng().gen::<u64>());
            if !sessions.contains_key(&id) {
                break id;
            }
        };
        let seats = [SeatKind::Human { token: Some(token.clone()) }, p2];
        let session = Session::new(id.clone(), state, seats, self.options.transcript_dir.clone());
        sessions.insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(SeatGrant { session_id: id, seat: PlayerId::P1, token })
    }

    /// Claims the open human seat of a session.
    pub fn join(&self, session_id: &str) -> Result<SeatGrant, ServerError> {
        let shared = self.get(session_id)?;
        let mut s = lock(&shared);
        if s.ended.is_some() {
            return Err(ServerError::SessionClosed);
        }
        for p in PlayerId::BOTH {
            if let SeatKind::Human { token: slot @ None } = &mut s.seats[p.index()].kind {
                let token = fresh_token();
                *slot = Some(token.clone());
                return Ok(SeatGrant { session_id: session_id.to_string(), seat: p, token });
            }
        }
        Err(ServerError::SeatTaken)
    }

    pub fn get(&self, session_id: &str) -> Result<SharedSession, ServerError> {
        self.sessions
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(session_id)
            .cloned()
            .ok_or(ServerError::SessionNotFound)
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.lock().unwrap_or_else(|e| e.into_inner()).keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn submit(&self, session_id: &str, token: &str, action: &Action) -> Result<u64, ServerError> {
        let shared = self.get(session_id)?;
        let mut s = lock(&shared);
        let seat = s.seat_of(token).ok_or(ServerError::NotYourSeat)?;
        s.submit(seat, action)
    }

    /// Messages for `token`'s seat after `since`, and a receiver for what follows.
    /// Both are taken under the session lock, so nothing falls between them.
    pub fn event_stream(
        &self,
        session_id: &str,
        token: &str,
        since: u64,
    ) -> Result<(PlayerId, Vec<Envelope>, broadcast::Receiver<Envelope>), ServerError> {
        let shared = self.get(session_id)?;
        let s = lock(&shared);
        let seat = s.seat_of(token).ok_or(ServerError::NotYourSeat)?;
        let stream = &s.seats[seat.index()].stream;
        Ok((seat, stream.since(since), stream.subscribe()))
    }

    /// One agent action in the given session. Returns whether it acted.
    pub fn agent_step(&self, session_id: &str) -> Result<bool, ServerError> {
        let shared = self.get(session_id)?;
        let mut s = lock(&shared);
        Ok(s.agent_step())
    }
}
