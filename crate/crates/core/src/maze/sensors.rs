use super::geometry::Vec2;
use super::map::MazeMap;

/// Rangefinders (+x, −x, +y, −y) followed by the four radar quadrants in
/// the same order.
pub const SENSOR_COUNT: usize = 8;

/// World-axis direction. The discriminant is the sensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PosX = 0,
    NegX = 1,
    PosY = 2,
    NegY = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::PosX,
        Direction::NegX,
        Direction::PosY,
        Direction::NegY,
    ];

    pub fn unit(self) -> Vec2 {
        match self {
            Direction::PosX => Vec2::new(1.0, 0.0),
            Direction::NegX => Vec2::new(-1.0, 0.0),
            Direction::PosY => Vec2::new(0.0, 1.0),
            Direction::NegY => Vec2::new(0.0, -1.0),
        }
    }
}

/// Exact distance from `origin` along `dir` to the nearest wall or
/// bounding edge.
///
/// Panics if `origin` is outside the map bounds; legal agent positions
/// never are.
pub fn raycast(map: &MazeMap, origin: Vec2, dir: Direction) -> f64 {
    assert!(
        origin.x >= 0.0 && origin.x <= map.width() && origin.y >= 0.0 && origin.y <= map.height(),
        "raycast origin ({}, {}) outside the map",
        origin.x,
        origin.y
    );
    let mut best = match dir {
        Direction::PosX => map.width() - origin.x,
        Direction::NegX => origin.x,
        Direction::PosY => map.height() - origin.y,
        Direction::NegY => origin.y,
    };
    let unit = dir.unit();
    for wall in map.walls() {
        if let Some(d) = wall.ray_hit(origin, unit) {
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Radar slot of the goal bearing from `pos`. Quadrant boundaries are the
/// 45° diagonals; on a boundary, and when `pos` is the goal, the lower slot
/// wins.
pub fn radar_quadrant(pos: Vec2, goal: Vec2) -> Direction {
    let d = goal - pos;
    let (ax, ay) = (d.x.abs(), d.y.abs());
    if d.x >= ay {
        Direction::PosX
    } else if -d.x >= ay {
        Direction::NegX
    } else if d.y >= ax {
        Direction::PosY
    } else {
        Direction::NegY
    }
}

/// The eight sensor readings at `pos`, each in `[0, 1]`.
pub fn sense(map: &MazeMap, pos: Vec2) -> [f64; SENSOR_COUNT] {
    let mut out = [0.0; SENSOR_COUNT];
    sense_into(map, pos, &mut out);
    out
}

pub(crate) fn sense_into(map: &MazeMap, pos: Vec2, out: &mut [f64]) {
    let diag = map.diagonal();
    for dir in Direction::ALL {
        out[dir as usize] = (raycast(map, pos, dir) / diag).clamp(0.0, 1.0);
    }
    for slot in &mut out[4..8] {
        *slot = 0.0;
    }
    out[4 + radar_quadrant(pos, map.goal()) as usize] = 1.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::geometry::Segment;

    fn open_map(walls: Vec<Segment>) -> MazeMap {
        MazeMap::new(
            "open",
            100.0,
            100.0,
            Vec2::new(50.0, 50.0),
            Vec2::new(90.0, 50.0),
            5.0,
            walls,
        )
        .unwrap()
    }

    #[test]
    fn open_map_distances() {
        let m = open_map(vec![]);
        let o = Vec2::new(50.0, 50.0);
        for d in Direction::ALL {
            assert_eq!(raycast(&m, o, d), 50.0);
        }
        assert_eq!(raycast(&m, Vec2::new(20.0, 30.0), Direction::NegY), 30.0);
    }

    #[test]
    fn wall_blocks_ray() {
        let m = open_map(vec![Segment::new(
            Vec2::new(60.0, 0.0),
            Vec2::new(60.0, 100.0),
        )]);
        assert_eq!(raycast(&m, Vec2::new(50.0, 50.0), Direction::PosX), 10.0);
        assert_eq!(raycast(&m, Vec2::new(50.0, 50.0), Direction::NegX), 50.0);
    }

    #[test]
    #[should_panic]
    fn origin_outside_panics() {
        raycast(&open_map(vec![]), Vec2::new(-1.0, 5.0), Direction::PosX);
    }

    #[test]
    fn radar_quadrants() {
        let p = Vec2::new(0.0, 0.0);
        assert_eq!(radar_quadrant(p, Vec2::new(10.0, 1.0)), Direction::PosX);
        assert_eq!(radar_quadrant(p, Vec2::new(-10.0, 1.0)), Direction::NegX);
        assert_eq!(radar_quadrant(p, Vec2::new(1.0, 10.0)), Direction::PosY);
        assert_eq!(radar_quadrant(p, Vec2::new(1.0, -10.0)), Direction::NegY);
        // diagonals: lower slot wins
        assert_eq!(radar_quadrant(p, Vec2::new(5.0, 5.0)), Direction::PosX);
        assert_eq!(radar_quadrant(p, Vec2::new(5.0, -5.0)), Direction::PosX);
        assert_eq!(radar_quadrant(p, Vec2::new(-5.0, 5.0)), Direction::NegX);
        assert_eq!(radar_quadrant(p, Vec2::new(-5.0, -5.0)), Direction::NegX);
        assert_eq!(radar_quadrant(p, p), Direction::PosX);
    }

    #[test]
    fn sense_open_map() {
        let m = open_map(vec![]);
        let s = sense(&m, Vec2::new(50.0, 50.0));
        let expected = 50.0 / (100.0f64 * 100.0 + 100.0 * 100.0).sqrt();
        for v in &s[..4] {
            assert!((v - expected).abs() < 1e-12);
            assert!((v - 0.3536).abs() < 1e-4);
        }
        assert_eq!(&s[4..], &[1.0, 0.0, 0.0, 0.0]);
    }
}
