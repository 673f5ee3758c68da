use std::path::Path;

use crate::error::{Error, Result};

use super::geometry::{Segment, Vec2};

/// Built-in maps, shipped under `maps/`.
pub const BUILTIN_MAPS: [(&str, &str); 3] = [
    ("medium", include_str!("../../maps/medium.maze")),
    ("hard", include_str!("../../maps/hard.maze")),
    ("superhard", include_str!("../../maps/superhard.maze")),
];

pub fn builtin_map(name: &str) -> Option<MazeMap> {
    let name = name.strip_suffix(".maze").unwrap_or(name);
    BUILTIN_MAPS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| MazeMap::parse(text, n).expect("built-in map is valid"))
}

/// The static world: bounds, start, goal and wall segments.
///
/// The four edges of `[0, width] × [0, height]` are walls as well; they
/// are not stored in `walls`. The y axis points down, as in the rendered
/// pictures.
#[derive(Debug, Clone, PartialEq)]
pub struct MazeMap {
    name: String,
    width: f64,
    height: f64,
    start: Vec2,
    goal: Vec2,
    goal_radius: f64,
    walls: Vec<Segment>,
}

impl MazeMap {
    pub fn new(
        name: impl Into<String>,
        width: f64,
        height: f64,
        start: Vec2,
        goal: Vec2,
        goal_radius: f64,
        walls: Vec<Segment>,
    ) -> std::result::Result<Self, String> {
        let map = MazeMap {
            name: name.into(),
            width,
            height,
            start,
            goal,
            goal_radius,
            walls,
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err("map size must be positive".into());
        }
        if self.goal_radius.is_nan() || self.goal_radius <= 0.0 {
            return Err("goal radius must be positive".into());
        }
        for (label, p) in [("start", self.start), ("goal", self.goal)] {
            if !self.strictly_inside(p) {
                return Err(format!(
                    "{label} ({}, {}) is not strictly inside the bounds",
                    p.x, p.y
                ));
            }
            if self.walls.iter().any(|w| w.distance_to(p) == 0.0) {
                return Err(format!("{label} lies on a wall"));
            }
        }
        if self.start.distance(self.goal) <= self.goal_radius {
            return Err("start lies within the goal radius".into());
        }
        Ok(())
    }

    /// Parses the line-oriented map format:
    ///
    /// ```text
    /// size W H
    /// start X Y
    /// goal X Y
    /// goalradius R
    /// wall X1 Y1 X2 Y2
    /// # comment
    /// ```
    pub fn parse(text: &str, source_name: &str) -> Result<MazeMap> {
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut size = None;
        let mut start = None;
        let mut goal = None;
        let mut radius = None;
        let mut walls = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let directive = parts.next().unwrap_or_default();
            let nums: Vec<f64> = parts
                .map(|p| {
                    p.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(line_no, format!("`{p}` is not a finite number")))
                })
                .collect::<Result<_>>()?;
            let expect = |n: usize| {
                if nums.len() == n {
                    Ok(())
                } else {
                    Err(err(
                        line_no,
                        format!("`{directive}` takes {n} numbers, found {}", nums.len()),
                    ))
                }
            };
            match directive {
                "size" => {
                    expect(2)?;
                    size = Some((nums[0], nums[1]));
                }
                "start" => {
                    expect(2)?;
                    start = Some(Vec2::new(nums[0], nums[1]));
                }
                "goal" => {
                    expect(2)?;
                    goal = Some(Vec2::new(nums[0], nums[1]));
                }
                "goalradius" => {
                    expect(1)?;
                    radius = Some(nums[0]);
                }
                "wall" => {
                    expect(4)?;
                    walls.push(Segment::new(
                        Vec2::new(nums[0], nums[1]),
                        Vec2::new(nums[2], nums[3]),
                    ));
                }
                other => return Err(err(line_no, format!("unknown directive `{other}`"))),
            }
        }

        let missing = |what: &str| err(last_line, format!("missing `{what}` directive"));
        let (width, height) = size.ok_or_else(|| missing("size"))?;
        let start = start.ok_or_else(|| missing("start"))?;
        let goal = goal.ok_or_else(|| missing("goal"))?;
        let radius = radius.ok_or_else(|| missing("goalradius"))?;
        MazeMap::new(source_name, width, height, start, goal, radius, walls)
            .map_err(|m| err(last_line, m))
    }

    /// Loads a map from a file, or a built-in map by name (`medium`,
    /// `hard`, `superhard`) when no such file exists.
    pub fn load(path_or_name: &str) -> Result<MazeMap> {
        let path = Path::new(path_or_name);
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path_or_name.to_string());
            return MazeMap::parse(&text, &stem).map_err(|e| match e {
                Error::Parse { line, message, .. } => Error::Parse {
                    source_name: path.display().to_string(),
                    line,
                    message,
                },
                other => other,
            });
        }
        builtin_map(path_or_name).ok_or_else(|| Error::Parse {
            source_name: path_or_name.to_string(),
            line: 0,
            message: "no such map file or built-in map".into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn start(&self) -> Vec2 {
        self.start
    }

    pub fn goal(&self) -> Vec2 {
        self.goal
    }

    pub fn goal_radius(&self) -> f64 {
        self.goal_radius
    }

    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn strictly_inside(&self, p: Vec2) -> bool {
        p.x > 0.0 && p.x < self.width && p.y > 0.0 && p.y < self.height
    }

    pub fn bounds(&self) -> [Segment; 4] {
        let (w, h) = (self.width, self.height);
        let c = [
            Vec2::new(0.0, 0.0),
            Vec2::new(w, 0.0),
            Vec2::new(w, h),
            Vec2::new(0.0, h),
        ];
        [
            Segment::new(c[0], c[1]),
            Segment::new(c[1], c[2]),
            Segment::new(c[2], c[3]),
            Segment::new(c[3], c[0]),
        ]
    }

    pub fn in_goal(&self, p: Vec2) -> bool {
        p.distance(self.goal) <= self.goal_radius
    }
}
