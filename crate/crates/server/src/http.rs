//! HTTP bootstrap routes and the per-player websocket.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cards_core::engine::Action;
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

use crate::protocol::{ClientMessage, CreateRequest, Envelope, ServerMessage};
use crate::{lock, ServerError, ServerOptions, SessionManager};

#[derive(Clone)]
pub struct AppState {
    pub manager: Arc<SessionManager>,
    /// Pause between agent actions.
    pub agent_tick: Duration,
}

impl AppState {
    pub fn new(options: ServerOptions, agent_tick: Duration) -> AppState {
        AppState { manager: Arc::new(SessionManager::new(options)), agent_tick }
    }
}

impl IntoResponse for ServerError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServerError::InvalidConfig(_) => StatusCode::BAD_REQUEST,
            ServerError::ModelNotFound(_) | ServerError::SessionNotFound => StatusCode::NOT_FOUND,
            ServerError::InvalidModel { .. } | ServerError::Action(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServerError::NotYourSeat => StatusCode::FORBIDDEN,
            ServerError::SeatTaken | ServerError::SessionClosed => StatusCode::CONFLICT,
        };
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let ServerError::Action(err) = &self {
            body["error"] = serde_json::to_value(err).expect("action errors serialize");
        }
        (status, Json(body)).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/join", post(join))
        .route("/sessions/{id}/actions", post(submit))
        .route("/sessions/{id}/events", get(events))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/ws", get(ws))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

fn bearer(headers: &HeaderMap) -> Result<&str, ServerError> {
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .ok_or(ServerError::NotYourSeat)
}

/// Runs the agent of a session until the game ends.
fn spawn_agent(state: &AppState, session_id: String) {
    let manager = state.manager.clone();
    let tick = state.agent_tick;
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(tick);
        loop {
            interval.tick().await;
            let Ok(shared) = manager.get(&session_id) else { return };
            let mut s = lock(&shared);
            if s.ended.is_some() {
                return;
            }
            s.agent_step();
        }
    });
}

async fn create(State(state): State<AppState>, Json(req): Json<CreateRequest>) -> Result<impl IntoResponse, ServerError> {
    let grant = state.manager.create_session(&req)?;
    if lock(&state.manager.get(&grant.session_id)?).agent_seat().is_some() {
        spawn_agent(&state, grant.session_id.clone());
    }
    Ok((StatusCode::CREATED, Json(grant)))
}

async fn join(State(state): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ServerError> {
    Ok(Json(state.manager.join(&id)?))
}

async fn submit(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    Json(action): Json<Action>,
) -> Result<impl IntoResponse, ServerError> {
    let seq = state.manager.submit(&id, bearer(&headers)?, &action)?;
    Ok(Json(json!({ "event_seq": seq })))
}

#[derive(Deserialize)]
struct Since {
    #[serde(default)]
    since: u64,
}

async fn events(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<Since>,
    headers: HeaderMap,
) -> Result<Json<Vec<Envelope>>, ServerError> {
    let (_, backlog, _) = state.manager.event_stream(&id, bearer(&headers)?, q.since)?;
    Ok(Json(backlog))
}

/// The full transcript, available once the game is over.
async fn transcript(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ServerError> {
    let shared = state.manager.get(&id)?;
    let s = lock(&shared);
    if s.ended.is_none() {
        // The log reveals both players' positions, so it stays private until the end.
        let body = json!({ "code": "game_in_progress", "message": "transcript is available once the game ends" });
        return Ok((StatusCode::CONFLICT, Json(body)).into_response());
    }
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], s.transcript().to_jsonl()).into_response())
}

#[derive(Deserialize)]
struct WsQuery {
    token: String,
    #[serde(default)]
    since: u64,
}

async fn ws(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<WsQuery>,
    upgrade: WebSocketUpgrade,
) -> Result<Response, ServerError> {
    // Reject bad sessions and tokens before upgrading.
    state.manager.event_stream(&id, &q.token, q.since)?;
    Ok(upgrade.on_upgrade(move |socket| run_socket(state, id, q.token, q.since, socket)))
}

async fn send(socket: &mut WebSocket, env: &Envelope) -> bool {
    let text = serde_json::to_string(env).expect("envelopes serialize");
    socket.send(Message::Text(text.into())).await.is_ok()
}

/// Replies that are not part of the numbered stream carry seq 0.
fn reply(message: ServerMessage) -> Envelope {
    Envelope { seq: 0, message }
}

fn handle_client_text(state: &AppState, id: &str, token: &str, text: &str) -> Envelope {
    match serde_json::from_str::<ClientMessage>(text) {
        Ok(ClientMessage::Submit(action)) => match state.manager.submit(id, token, &action) {
            Ok(event_seq) => reply(ServerMessage::Ack { event_seq }),
            Err(ServerError::Action(error)) => reply(ServerMessage::Rejected { error }),
            Err(e) => reply(ServerMessage::Error { code: e.code().into(), message: e.to_string() }),
        },
        Err(e) => reply(ServerMessage::Error { code: "bad_message".into(), message: e.to_string() }),
    }
}

async fn run_socket(state: AppState, id: String, token: String, since: u64, mut socket: WebSocket) {
    let Ok((_, backlog, mut rx)) = state.manager.event_stream(&id, &token, since) else { return };
    let mut last = since;
    for env in &backlog {
        if !send(&mut socket, env).await {
            return;
        }
        last = env.seq;
    }
    loop {
        tokio::select! {
            live = rx.recv() => match live {
                Ok(env) => {
                    if env.seq <= last {
                        continue;
                    }
                    last = env.seq;
                    if !send(&mut socket, &env).await {
                        return;
                    }
                }
                Err(RecvError::Lagged(_)) => {
                    // Fell behind the live buffer: refill from history.
                    let Ok((_, missed, fresh)) = state.manager.event_stream(&id, &token, last) else { return };
                    rx = fresh;
                    for env in &missed {
                        if !send(&mut socket, env).await {
                            return;
                        }
                        last = env.seq;
                    }
                }
                Err(RecvError::Closed) => return,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Text(text))) => {
                    let env = handle_client_text(&state, &id, &token, text.as_str());
                    if !send(&mut socket, &env).await {
                        return;
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
