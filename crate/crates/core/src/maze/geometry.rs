use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).length()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// A wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub const fn new(a: Vec2, b: Vec2) -> Self {
        Segment { a, b }
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let ab = self.b - self.a;
        let len2 = ab.dot(ab);
        if len2 == 0.0 {
            return p.distance(self.a);
        }
        let t = ((p - self.a).dot(ab) / len2).clamp(0.0, 1.0);
        p.distance(self.a + ab * t)
    }

    /// Distance along the ray `origin + s·dir` (s ≥ 0, `dir` unit length)
    /// to the first point of this segment, if the ray meets it.
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let ab = self.b - self.a;
        let denom = dir.cross(ab);
        let ao = self.a - origin;
        if denom == 0.0 {
            // Parallel; only a collinear segment can be hit.
            if ao.cross(dir) != 0.0 {
                return None;
            }
            let sa = ao.dot(dir);
            let sb = (self.b - origin).dot(dir);
            let (lo, hi) = if sa <= sb { (sa, sb) } else { (sb, sa) };
            return if hi < 0.0 { None } else { Some(lo.max(0.0)) };
        }
        let s = ao.cross(ab) / denom;
        let t = ao.cross(dir) / denom;
        if s >= 0.0 && (0.0..=1.0).contains(&t) {
            Some(s)
        } else {
            None
        }
    }

    /// Whether the segment touches the closed axis-aligned box
    /// `[min.x, max.x] × [min.y, max.y]` (Liang–Barsky clipping).
    pub fn touches_box(&self, min: Vec2, max: Vec2) -> bool {
        let d = self.b - self.a;
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        let checks = [
            (-d.x, self.a.x - min.x),
            (d.x, max.x - self.a.x),
            (-d.y, self.a.y - min.y),
            (d.y, max.y - self.a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}
