use thiserror::Error;

use super::{EventKind, Transcript};
use crate::engine::{state_from_init, Action, ActionError, ConfigError, Direction, GameState};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("bad board_init: {0}")]
    Config(#[from] ConfigError),
    #[error("event {seq}: {source}")]
    Illegal {
        seq: u64,
        #[source]
        source: ActionError,
    },
    #[error("event {seq}: engine produced {produced} but the transcript records {recorded}")]
    Diverged { seq: u64, produced: String, recorded: String },
}

/// Re-executes a transcript through the engine, checking every recorded event is
/// exactly what the engine produces. Returns the final state.
pub fn replay(transcript: &Transcript) -> Result<GameState, ReplayError> {
    let mut state = state_from_init(transcript.board_init())?;
    for event in &transcript.events[1..] {
        let Some(actor) = event.actor.player() else {
            return Err(ReplayError::Diverged {
                seq: event.seq,
                produced: "nothing".into(),
                recorded: "system event".into(),
            });
        };
        let pos = state.player(actor).pos;
        let action = match &event.kind {
            EventKind::Utterance { text } => Action::Utter(text.clone()),
            EventKind::Pickup { card } => Action::Pickup(*card),
            EventKind::Drop { card } => Action::Drop(*card),
            EventKind::Bump { dir, .. } => Action::Move(*dir),
            EventKind::MoveTo { to } => {
                let dir = Direction::ALL.into_iter().find(|d| pos.step(*d) == *to);
                match dir {
                    Some(d) => Action::Move(d),
                    None => {
                        return Err(ReplayError::Diverged {
                            seq: event.seq,
                            produced: format!("no single step from {pos}"),
                            recorded: format!("move_to {to}"),
                        })
                    }
                }
            }
            EventKind::BoardInit(_) => {
                return Err(ReplayError::Diverged {
                    seq: event.seq,
                    produced: "nothing".into(),
                    recorded: "second board_init".into(),
                })
            }
        };
        state.clock_ms = event.time;
        state.apply(actor, &action).map_err(|source| ReplayError::Illegal { seq: event.seq, source })?;
        let produced = state.event_log.last().expect("just logged");
        if produced.kind != event.kind {
            return Err(ReplayError::Diverged {
                seq: event.seq,
                produced: format!("{:?}", produced.kind),
                recorded: format!("{:?}", event.kind),
            });
        }
    }
    Ok(state)
}
