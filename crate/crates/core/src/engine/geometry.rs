use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Cell coordinate. `x` grows to the east, `y` grows to the south; `(0, 0)` is the
/// top-left corner. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Coord {
        Coord { x, y }
    }

    pub fn step(self, dir: Direction) -> Coord {
        let (dx, dy) = dir.delta();
        Coord::new(self.x + dx, self.y + dy)
    }

    pub fn chebyshev(self, other: Coord) -> u32 {
        (self.x - other.x).unsigned_abs().max((self.y - other.y).unsigned_abs())
    }

    pub fn manhattan(self, other: Coord) -> u32 {
        (self.x - other.x).unsigned_abs() + (self.y - other.y).unsigned_abs()
    }

    pub fn is_adjacent(self, other: Coord) -> bool {
        self.manhattan(other) == 1
    }
}

impl From<[i32; 2]> for Coord {
    fn from([x, y]: [i32; 2]) -> Self {
        Coord { x, y }
    }
}

impl From<Coord> for [i32; 2] {
    fn from(c: Coord) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::East, Direction::West];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "north" | "n" | "up" => Ok(Direction::North),
            "south" | "s" | "down" => Ok(Direction::South),
            "east" | "e" | "right" => Ok(Direction::East),
            "west" | "w" | "left" => Ok(Direction::West),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

/// The edge shared by two orthogonally adjacent cells, stored with the smaller
/// coordinate first so each physical edge has one representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Coord; 2]", into = "[Coord; 2]")]
pub struct Edge {
    a: Coord,
    b: Coord,
}

impl Edge {
    /// `None` unless the two cells are orthogonal neighbours.
    pub fn between(p: Coord, q: Coord) -> Option<Edge> {
        if !p.is_adjacent(q) {
            return None;
        }
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        Some(Edge { a, b })
    }

    pub fn cells(self) -> (Coord, Coord) {
        (self.a, self.b)
    }

    pub fn touches(self, c: Coord) -> bool {
        self.a == c || self.b == c
    }
}

impl TryFrom<[Coord; 2]> for Edge {
    type Error = String;

    fn try_from([p, q]: [Coord; 2]) -> Result<Self, Self::Error> {
        Edge::between(p, q).ok_or_else(|| format!("cells {p} and {q} are not adjacent"))
    }
}

impl From<Edge> for [Coord; 2] {
    fn from(e: Edge) -> Self {
        [e.a, e.b]
    }
}

/// One ninth of the board under a 3x3 partition; the coarse vocabulary players
/// use to describe where things are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    TopLeft,
    Top,
    TopRight,
    Left,
    Middle,
    Right,
    BottomLeft,
    Bottom,
    BottomRight,
}

impl Region {
    pub const ALL: [Region; 9] = [
        Region::TopLeft,
        Region::Top,
        Region::TopRight,
        Region::Left,
        Region::Middle,
        Region::Right,
        Region::BottomLeft,
        Region::Bottom,
        Region::BottomRight,
    ];

    fn grid(self) -> (i32, i32) {
        let i = Region::ALL.iter().position(|r| *r == self).unwrap_or(4) as i32;
        (i % 3, i / 3)
    }

    fn from_grid(col: i32, row: i32) -> Region {
        Region::ALL[(row.clamp(0, 2) * 3 + col.clamp(0, 2)) as usize]
    }

    pub fn of(c: Coord, width: i32, height: i32) -> Region {
        Region::from_grid(c.x * 3 / width.max(1), c.y * 3 / height.max(1))
    }

    /// Cells belonging to this ninth, as half-open ranges `(x0..x1, y0..y1)`.
    pub fn bounds(self, width: i32, height: i32) -> (std::ops::Range<i32>, std::ops::Range<i32>) {
        let (col, row) = self.grid();
        // Inverse of `of`: the smallest x with x*3/width >= col.
        let lo = |k: i32, n: i32| (k * n + 2) / 3;
        (lo(col, width)..lo(col + 1, width), lo(row, height)..lo(row + 1, height))
    }

    /// Representative cell: the centroid of the ninth, rounded down.
    pub fn centroid(self, width: i32, height: i32) -> Coord {
        let (xs, ys) = self.bounds(width, height);
        Coord::new((xs.start + xs.end - 1) / 2, (ys.start + ys.end - 1) / 2)
    }

    /// Phrase used in generated dialogue.
    pub fn phrase(self) -> &'static str {
        match self {
            Region::TopLeft => "top left",
            Region::Top => "top middle",
            Region::TopRight => "top right",
            Region::Left => "left side",
            Region::Middle => "middle",
            Region::Right => "right side",
            Region::BottomLeft => "bottom left",
            Region::Bottom => "bottom middle",
            Region::BottomRight => "bottom right",
        }
    }

    pub fn is_corner(self) -> bool {
        matches!(self, Region::TopLeft | Region::TopRight | Region::BottomLeft | Region::BottomRight)
    }

    /// Finds a region mention in free text ("the very top left corner", "upper right").
    pub fn find_in(text: &str) -> Option<Region> {
        let t = text.to_lowercase().replace('-', " ");
        let vertical = if t.contains("top") || t.contains("upper") {
            Some(0)
        } else if t.contains("bottom") || t.contains("lower") {
            Some(2)
        } else {
            None
        };
        let has_word = |w: &str| t.split(|c: char| !c.is_alphanumeric()).any(|tok| tok == w);
        let horizontal = if has_word("left") {
            Some(0)
        } else if has_word("right") {
            Some(2)
        } else {
            None
        };
        let central = has_word("middle") || has_word("center") || has_word("centre");
        match (vertical, horizontal) {
            (Some(row), Some(col)) => Some(Region::from_grid(col, row)),
            (Some(row), None) => Some(Region::from_grid(1, row)),
            (None, Some(col)) => Some(Region::from_grid(col, 1)),
            (None, None) if central => Some(Region::Middle),
            _ => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}
