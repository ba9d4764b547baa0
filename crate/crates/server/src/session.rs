//! One live game. All mutation goes through `&mut Session`, which the manager
//! keeps behind a per-session mutex.

use std::path::PathBuf;
use std::time::Instant;

use cards_core::agent::PartnerAgent;
use cards_core::corpus::{EventKind, Transcript};
use cards_core::engine::{check_win, Action, GameState, PlayerId};
use tokio::sync::broadcast;

use crate::protocol::{EndReason, Envelope, PlayerView, ServerMessage};
use crate::ServerError;

const STREAM_BUFFER: usize = 256;

/// A player's outgoing stream: full history for resumption plus live fan-out.
pub struct Stream {
    pub history: Vec<Envelope>,
    live: broadcast::Sender<Envelope>,
    last_view: Option<PlayerView>,
}

impl Stream {
    fn new() -> Stream {
        Stream { history: Vec::new(), live: broadcast::channel(STREAM_BUFFER).0, last_view: None }
    }

    fn push(&mut self, message: ServerMessage) {
        let env = Envelope { seq: self.history.len() as u64 + 1, message };
        // No subscribers is fine; the history keeps everything.
        let _ = self.live.send(env.clone());
        self.history.push(env);
    }

    pub fn since(&self, seq: u64) -> Vec<Envelope> {
        self.history.iter().filter(|e| e.seq > seq).cloned().collect()
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Envelope> {
        self.live.subscribe()
    }
}

pub enum SeatKind {
    Human { token: Option<String> },
    Agent(Box<PartnerAgent>),
}

pub struct Seat {
    pub kind: SeatKind,
    pub stream: Stream,
}

pub struct Session {
    pub id: String,
    pub state: GameState,
    pub seats: [Seat; 2],
    pub ended: Option<EndReason>,
    started: Instant,
    transcript_dir: Option<PathBuf>,
}

impl Session {
    pub fn new(id: String, state: GameState, seats: [SeatKind; 2], transcript_dir: Option<PathBuf>) -> Session {
        let mut s = Session {
            id,
            state,
            seats: seats.map(|kind| Seat { kind, stream: Stream::new() }),
            ended: None,
            started: Instant::now(),
            transcript_dir,
        };
        for p in PlayerId::BOTH {
            let config = &s.state.config;
            let welcome = ServerMessage::Welcome {
                session_id: s.id.clone(),
                seat: p,
                width: config.width,
                height: config.height,
                move_budget: s.state.move_budget,
                visibility_radius: config.visibility_radius,
            };
            s.seats[p.index()].stream.push(welcome);
        }
        s.refresh_views();
        s
    }

    pub fn seat_of(&self, token: &str) -> Option<PlayerId> {
        PlayerId::BOTH
            .into_iter()
            .find(|p| matches!(&self.seats[p.index()].kind, SeatKind::Human { token: Some(t) } if t == token))
    }

    pub fn agent_seat(&self) -> Option<PlayerId> {
        PlayerId::BOTH.into_iter().find(|p| matches!(self.seats[p.index()].kind, SeatKind::Agent(_)))
    }

    pub fn view_of(&self, p: PlayerId) -> PlayerView {
        let me = self.state.player(p);
        PlayerView {
            pos: me.pos,
            hand: me.hand,
            moves_left: self.state.moves_left(p),
            cells: self.state.visible_from(me.pos),
        }
    }

    pub fn transcript(&self) -> Transcript {
        Transcript::new(self.id.clone(), self.state.event_log.clone())
    }

    /// Applies a player's action and fans out what each side may observe.
    pub fn submit(&mut self, actor: PlayerId, action: &Action) -> Result<u64, ServerError> {
        if self.ended.is_some() {
            return Err(ServerError::SessionClosed);
        }
        self.state.clock_ms = self.started.elapsed().as_millis() as u64;
        let seq = self.state.apply(actor, action)?;
        self.after_event(seq);
        Ok(seq)
    }

    /// Lets the agent take its next action, if it has one. Returns whether it acted.
    pub fn agent_step(&mut self) -> bool {
        let Some(p) = self.agent_seat() else { return false };
        if self.ended.is_some() {
            return false;
        }
        let SeatKind::Agent(agent) = &mut self.seats[p.index()].kind else { unreachable!() };
        let Some(action) = agent.next_action() else { return false };
        match self.submit(p, &action) {
            Ok(_) => true,
            Err(ServerError::Action(err)) => {
                if let SeatKind::Agent(agent) = &mut self.seats[p.index()].kind {
                    agent.on_error(&err);
                }
                true
            }
            Err(_) => false,
        }
    }

    fn after_event(&mut self, seq: u64) {
        let event = self.state.event_log.last().expect("just logged").clone();
        debug_assert_eq!(event.seq, seq);
        let actor = event.actor.player().expect("players act");
        match &event.kind {
            EventKind::Utterance { text } => {
                for p in PlayerId::BOTH {
                    let seat = &mut self.seats[p.index()];
                    seat.stream.push(ServerMessage::Utterance { event_seq: seq, speaker: actor, text: text.clone() });
                    if let SeatKind::Agent(agent) = &mut seat.kind {
                        agent.hear(actor, text);
                    }
                }
            }
            EventKind::Bump { at, dir } => {
                let seat = &mut self.seats[actor.index()];
                seat.stream.push(ServerMessage::Bump { at: *at, dir: *dir });
                if let SeatKind::Agent(agent) = &mut seat.kind {
                    agent.on_bump(*at, *dir);
                }
            }
            _ => {}
        }
        self.refresh_views();
        self.check_end();
    }

    /// Sends each player their view when it changed, and keeps the agent current.
    fn refresh_views(&mut self) {
        for p in PlayerId::BOTH {
            let view = self.view_of(p);
            let seat = &mut self.seats[p.index()];
            if let SeatKind::Agent(agent) = &mut seat.kind {
                agent.observe(view.pos, view.hand, &view.cells);
            }
            if seat.stream.last_view.as_ref() != Some(&view) {
                seat.stream.last_view = Some(view.clone());
                seat.stream.push(ServerMessage::View(view));
            }
        }
    }

    fn check_end(&mut self) {
        let reason = if check_win(&self.state).is_some() {
            EndReason::Win
        } else if PlayerId::BOTH.iter().all(|p| self.state.moves_left(*p) == 0) {
            EndReason::OutOfMoves
        } else {
            return;
        };
        self.ended = Some(reason);
        let straight = check_win(&self.state);
        for seat in &mut self.seats {
            seat.stream.push(ServerMessage::GameOver { reason, straight });
        }
        self.persist();
    }

    fn persist(&self) {
        let Some(dir) = &self.transcript_dir else { return };
        let path = dir.join(format!("{}.jsonl", self.id));
        let written = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, self.transcript().to_jsonl()));
        if let Err(e) = written {
            eprintln!("could not write transcript {}: {e}", path.display());
        }
    }
}
