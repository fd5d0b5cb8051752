//! Tile coordinates and Manhattan geometry.

use serde::{Deserialize, Serialize};

/// A tile coordinate. Stored signed so arithmetic near the map edge cannot
/// wrap; validity against a concrete map is checked at use sites.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Coord) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    /// 4-neighbourhood in the deterministic expansion order used by the
    /// planner: lexicographic (y, then x).
    pub fn neighbors4(self) -> [Coord; 4] {
        [
            Coord::new(self.x, self.y - 1),
            Coord::new(self.x - 1, self.y),
            Coord::new(self.x + 1, self.y),
            Coord::new(self.x, self.y + 1),
        ]
    }
}

/// Cardinal heading, used for one-way street directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heading {
    North,
    South,
    East,
    West,
}

impl Heading {
    pub fn delta(self) -> (i32, i32) {
        match self {
            Heading::North => (0, -1),
            Heading::South => (0, 1),
            Heading::East => (1, 0),
            Heading::West => (-1, 0),
        }
    }

    pub fn opposite(self) -> Heading {
        match self {
            Heading::North => Heading::South,
            Heading::South => Heading::North,
            Heading::East => Heading::West,
            Heading::West => Heading::East,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manhattan_identity() {
        assert_eq!(Coord::new(0, 0).manhattan(Coord::new(0, 0)), 0);
    }

    #[test]
    fn manhattan_direct() {
        assert_eq!(Coord::new(1, 2).manhattan(Coord::new(4, 6)), 7);
    }

    #[test]
    fn manhattan_corners() {
        assert_eq!(Coord::new(0, 0).manhattan(Coord::new(63, 63)), 126);
    }
}
