use super::{GeometryError, Point2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// An agent's fuzzy memory of where a destination lies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipseRecord", into = "EllipseRecord")]
pub struct GoalEllipse {
    center: Point2,
    semi_major: f64,
    semi_minor: f64,
    rotation: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipseRecord {
    center: Point2,
    semi_major: f64,
    semi_minor: f64,
    #[serde(default)]
    rotation: f64,
}

impl TryFrom<EllipseRecord> for GoalEllipse {
    type Error = GeometryError;
    fn try_from(r: EllipseRecord) -> Result<Self, GeometryError> {
        GoalEllipse::new(r.center, r.semi_major, r.semi_minor, r.rotation)
    }
}

impl From<GoalEllipse> for EllipseRecord {
    fn from(e: GoalEllipse) -> Self {
        EllipseRecord {
            center: e.center,
            semi_major: e.semi_major,
            semi_minor: e.semi_minor,
            rotation: e.rotation,
        }
    }
}

impl GoalEllipse {
    /// Requires `semi_major >= semi_minor > 0` and `rotation` in `[0, pi)`.
    pub fn new(
        center: Point2,
        semi_major: f64,
        semi_minor: f64,
        rotation: f64,
    ) -> Result<Self, GeometryError> {
        if !center.is_finite() || !semi_major.is_finite() || !rotation.is_finite() {
            return Err(GeometryError::InvalidEllipse("non-finite parameter".into()));
        }
        if !(semi_minor > 0.0) {
            return Err(GeometryError::InvalidEllipse(format!(
                "semi_minor must be positive, got {semi_minor}"
            )));
        }
        if semi_major < semi_minor {
            return Err(GeometryError::InvalidEllipse(format!(
                "semi_major {semi_major} is smaller than semi_minor {semi_minor}"
            )));
        }
        if !(0.0..PI).contains(&rotation) {
            return Err(GeometryError::InvalidEllipse(format!(
                "rotation {rotation} outside [0, pi)"
            )));
        }
        Ok(Self {
            center,
            semi_major,
            semi_minor,
            rotation,
        })
    }

    pub fn circle(center: Point2, radius: f64) -> Result<Self, GeometryError> {
        Self::new(center, radius, radius, 0.0)
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn semi_major(&self) -> f64 {
        self.semi_major
    }

    pub fn semi_minor(&self) -> f64 {
        self.semi_minor
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    /// World point -> ellipse axis frame.
    pub fn to_local(&self, p: Point2) -> Point2 {
        let (s, c) = self.rotation.sin_cos();
        let d = p - self.center;
        Point2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    pub fn to_world(&self, q: Point2) -> Point2 {
        let (s, c) = self.rotation.sin_cos();
        self.center + Point2::new(c * q.x - s * q.y, s * q.x + c * q.y)
    }

    /// `(x'/a)^2 + (y'/b)^2` in the axis frame; <= 1 means inside.
    pub fn level(&self, p: Point2) -> f64 {
        let q = self.to_local(p);
        (q.x / self.semi_major).powi(2) + (q.y / self.semi_minor).powi(2)
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.level(p) <= 1.0
    }

    /// Boundary point at parameter angle `t`.
    pub fn boundary_point(&self, t: f64) -> Point2 {
        let (s, c) = t.sin_cos();
        self.to_world(Point2::new(self.semi_major * c, self.semi_minor * s))
    }

    /// `n` boundary points uniformly spaced in parameter angle, starting at t = 0.
    pub fn sample_boundary(&self, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|k| self.boundary_point(2.0 * PI * k as f64 / n as f64))
            .collect()
    }

    pub fn scaled(&self, s: f64) -> GoalEllipse {
        GoalEllipse {
            center: self.center * s,
            semi_major: self.semi_major * s,
            semi_minor: self.semi_minor * s,
            rotation: self.rotation,
        }
    }
}

pub fn point_in_ellipse(p: Point2, e: &GoalEllipse) -> bool {
    e.contains(p)
}

/// Closest boundary point to an exterior `p` and its distance.
///
/// Works in the first quadrant of the axis frame and bisects the
/// monotone secular function of the Lagrange multiplier until the
/// bracket collapses to adjacent floats.
pub fn closest_point_on_ellipse(
    p: Point2,
    e: &GoalEllipse,
) -> Result<(Point2, f64), GeometryError> {
    if e.contains(p) {
        return Err(GeometryError::PointInsideEllipse { x: p.x, y: p.y });
    }
    let q = e.to_local(p);
    let (a, b) = (e.semi_major, e.semi_minor);
    let (y0, y1) = (q.x.abs(), q.y.abs());
    let (x0, x1) = first_quadrant_closest(a, b, y0, y1);
    let local = Point2::new(x0.copysign(q.x), x1.copysign(q.y));
    let world = e.to_world(local);
    Ok((world, (local - q).norm()))
}

fn first_quadrant_closest(e0: f64, e1: f64, y0: f64, y1: f64) -> (f64, f64) {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1).powi(2);
                let s = secular_root(r0, z0, z1, g);
                (r0 * y0 / (s + r0), y1 / (s + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer = e0 * y0;
        let denom = e0 * e0 - e1 * e1;
        if numer < denom {
            let xde = numer / denom;
            (e0 * xde, e1 * (1.0 - xde * xde).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    }
}

fn secular_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..2100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let r_0 = n0 / (s + r0);
        let r_1 = z1 / (s + 1.0);
        let val = r_0 * r_0 + r_1 * r_1 - 1.0;
        if val > 0.0 {
            s0 = s;
        } else if val < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}
