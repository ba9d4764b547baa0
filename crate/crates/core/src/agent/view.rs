use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::card::{Card, CardSet};
use crate::engine::{Coord, Direction, Edge, VisibleCell};

/// What one player knows about the board: its own position and hand, walls it has
/// seen or bumped into, and where it last saw each card.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentView {
    pub width: i32,
    pub height: i32,
    pub pos: Coord,
    pub hand: CardSet,
    pub known_walls: BTreeSet<Edge>,
    pub seen: BTreeMap<Card, Coord>,
}

impl AgentView {
    pub fn new(width: i32, height: i32, pos: Coord) -> AgentView {
        AgentView {
            width,
            height,
            pos,
            hand: CardSet::new(),
            known_walls: BTreeSet::new(),
            seen: BTreeMap::new(),
        }
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    /// Folds in a fresh neighbourhood observation. Cards no longer where they were
    /// last seen are forgotten.
    pub fn observe(&mut self, cells: &[VisibleCell]) {
        let visible: BTreeSet<Coord> = cells.iter().map(|c| c.at).collect();
        self.seen.retain(|_, at| !visible.contains(at));
        for cell in cells {
            for card in &cell.cards {
                self.seen.insert(*card, cell.at);
            }
            self.known_walls.extend(cell.walls.iter().copied());
        }
    }

    pub fn record_bump(&mut self, at: Coord, dir: Direction) {
        if let Some(edge) = Edge::between(at, at.step(dir)) {
            self.known_walls.insert(edge);
        }
    }

    fn passable(&self, from: Coord, dir: Direction) -> Option<Coord> {
        let to = from.step(dir);
        let blocked = Edge::between(from, to).is_some_and(|e| self.known_walls.contains(&e));
        (self.in_bounds(to) && !blocked).then_some(to)
    }

    /// Breadth-first distances from `from` over cells not separated by known walls.
    pub fn distances_from(&self, from: Coord) -> BTreeMap<Coord, u32> {
        let mut dist = BTreeMap::from([(from, 0u32)]);
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            let d = dist[&c];
            for dir in Direction::ALL {
                if let Some(n) = self.passable(c, dir) {
                    dist.entry(n).or_insert_with(|| {
                        queue.push_back(n);
                        d + 1
                    });
                }
            }
        }
        dist
    }
}

/// Shortest move sequence from the view's position to `target`, avoiding known
/// walls. Direction order breaks ties, so the result is deterministic.
pub fn plan_path(view: &AgentView, target: Coord) -> Result<Vec<Direction>, AgentError> {
    if !view.in_bounds(target) {
        return Err(AgentError::OutOfBounds(target));
    }
    let mut parent: BTreeMap<Coord, (Coord, Direction)> = BTreeMap::new();
    let mut queue = VecDeque::from([view.pos]);
    let mut visited = BTreeSet::from([view.pos]);
    while let Some(c) = queue.pop_front() {
        if c == target {
            let mut path = Vec::new();
            let mut cur = c;
            while let Some((prev, dir)) = parent.get(&cur) {
                path.push(*dir);
                cur = *prev;
            }
            path.reverse();
            return Ok(path);
        }
        for dir in Direction::ALL {
            if let Some(n) = view.passable(c, dir) {
                if visited.insert(n) {
                    parent.insert(n, (c, dir));
                    queue.push_back(n);
                }
            }
        }
    }
    Err(AgentError::Unreachable(target))
}
