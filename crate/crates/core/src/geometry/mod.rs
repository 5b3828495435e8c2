//! Planar primitives used by the decision procedure: points, segments,
//! simple polygons, goal ellipses, visibility graphs and a grid oracle.
//!
//! All functions here are pure. Coordinates are meters.

mod ellipse;
mod grid;
mod polygon;
mod visibility;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Sub};

pub use ellipse::{closest_point_on_ellipse, point_in_ellipse, GoalEllipse};
pub use grid::grid_path_oracle;
pub use polygon::{Containment, Polygon};
pub use visibility::{
    build_visibility_graph, dijkstra, shortest_path_to_ellipse, VisibilityGraph,
    DEFAULT_ELLIPSE_SAMPLES,
};
pub(crate) use visibility::{build_graph_with, shortest_path_between};

/// Threshold applied to raw cross products by the orientation predicate.
pub const ORIENT_EPS: f64 = 1e-12;

/// Absolute tolerance used when comparing path lengths.
pub const LENGTH_TIE_EPS: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({x}, {y}) lies inside the ellipse")]
    PointInsideEllipse { x: f64, y: f64 },
    #[error("no target is reachable from ({x}, {y})")]
    Unreachable { x: f64, y: f64 },
    #[error("invalid ellipse: {0}")]
    InvalidEllipse(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        self.lerp(o, 0.5)
    }

    /// Unit vector, or zero for the zero vector.
    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        if n > 0.0 {
            Point2::new(self.x / n, self.y / n)
        } else {
            Point2::default()
        }
    }

    /// Rotated by +90 degrees.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[Point2; 2]", into = "[Point2; 2]")]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    pub fn direction(&self) -> Point2 {
        self.b - self.a
    }

    /// Euclidean distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let d = self.direction();
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.a.lerp(self.b, t))
    }

    /// Parameter of the orthogonal projection of `p` onto the carrier line.
    pub fn project(&self, p: Point2) -> f64 {
        let d = self.direction();
        (p - self.a).dot(d) / d.dot(d)
    }
}

impl From<[Point2; 2]> for Segment {
    fn from(v: [Point2; 2]) -> Self {
        Segment::new(v[0], v[1])
    }
}

impl From<Segment> for [Point2; 2] {
    fn from(s: Segment) -> Self {
        [s.a, s.b]
    }
}

/// Sign of the turn a -> b -> c: 1 left, -1 right, 0 collinear (|cross| <= [`ORIENT_EPS`]).
pub fn orient(a: Point2, b: Point2, c: Point2) -> i8 {
    let v = (b - a).cross(c - a);
    if v > ORIENT_EPS {
        1
    } else if v < -ORIENT_EPS {
        -1
    } else {
        0
    }
}

/// Whether the open interior of `s` properly crosses `w` or overlaps it
/// along a collinear stretch of positive length. Touching at a single point
/// (an endpoint of either segment) is not an intersection.
pub fn segments_intersect(s: &Segment, w: &Segment) -> bool {
    if s.length() == 0.0 || w.length() == 0.0 {
        return false;
    }
    let o1 = orient(s.a, s.b, w.a);
    let o2 = orient(s.a, s.b, w.b);
    let o3 = orient(w.a, w.b, s.a);
    let o4 = orient(w.a, w.b, s.b);
    if o1 == 0 && o2 == 0 {
        // collinear: positive-length overlap blocks
        let d = s.direction();
        let len2 = d.dot(d);
        let t0 = (w.a - s.a).dot(d) / len2;
        let t1 = (w.b - s.a).dot(d) / len2;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let overlap = (hi.min(1.0) - lo.max(0.0)) * len2.sqrt();
        return overlap > LENGTH_TIE_EPS;
    }
    o1 * o2 < 0 && o3 * o4 < 0
}

/// True iff `s` intersects any wall in the sense of [`segments_intersect`].
pub fn segment_intersects_walls(s: &Segment, walls: &[Segment]) -> bool {
    walls.iter().any(|w| segments_intersect(s, w))
}
