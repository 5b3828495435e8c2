use super::{orient, GeometryError, Point2, Segment, LENGTH_TIE_EPS};
use serde::{Deserialize, Serialize};

/// Where a point lies relative to a closed polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// A simple polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for Polygon {
    type Error = GeometryError;
    fn try_from(v: Vec<Point2>) -> Result<Self, Self::Error> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point2> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
}

impl Polygon {
    /// Validates and stores the ring. Clockwise input is reversed.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::InvalidPolygon(format!(
                "needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(GeometryError::InvalidPolygon(format!("non-finite vertex {p}")));
        }
        let area = signed_area(&vertices);
        if area.abs() <= LENGTH_TIE_EPS {
            return Err(GeometryError::InvalidPolygon("zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let poly = Polygon { vertices };
        poly.check_simple()?;
        Ok(poly)
    }

    fn check_simple(&self) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        let edges: Vec<Segment> = self.edges().collect();
        for (i, e) in edges.iter().enumerate() {
            if e.length() <= LENGTH_TIE_EPS {
                return Err(GeometryError::InvalidPolygon(format!(
                    "repeated vertex {}",
                    e.a
                )));
            }
            for (j, f) in edges.iter().enumerate().skip(i + 1) {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // neighbours share a vertex; they may only fold back collinearly
                    let shared = if j == i + 1 { e.b } else { e.a };
                    let other_e = if j == i + 1 { e.a } else { e.b };
                    let other_f = if j == i + 1 { f.b } else { f.a };
                    if orient(other_e, shared, other_f) == 0
                        && (other_e - shared).dot(other_f - shared) > 0.0
                    {
                        return Err(GeometryError::InvalidPolygon(format!(
                            "edges fold back at {shared}"
                        )));
                    }
                    continue;
                }
                if segments_touch(e, f) {
                    return Err(GeometryError::InvalidPolygon(format!(
                        "self-intersection between edges {i} and {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Boundary edges, edge `i` running from vertex `i` to vertex `i + 1`.
    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices[1..] {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let c = p.cross(q);
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        let a6 = 6.0 * self.area();
        Point2::new(cx / a6, cy / a6)
    }

    /// Classifies `p`; points within 1e-9 m of an edge count as boundary.
    pub fn locate(&self, p: Point2) -> Containment {
        if self.edges().any(|e| e.distance_to(p) <= LENGTH_TIE_EPS) {
            return Containment::Boundary;
        }
        let mut inside = false;
        for e in self.edges() {
            let (a, b) = (e.a, e.b);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    /// Closed containment (boundary counts).
    pub fn contains(&self, p: Point2) -> bool {
        self.locate(p) != Containment::Outside
    }

    pub fn contains_strictly(&self, p: Point2) -> bool {
        self.locate(p) == Containment::Inside
    }

    /// Whether the whole closed segment stays in the closed polygon.
    pub fn contains_segment(&self, s: &Segment) -> bool {
        if !self.contains(s.a) || !self.contains(s.b) {
            return false;
        }
        let len = s.length();
        if len == 0.0 {
            return true;
        }
        let mut cuts = vec![0.0, 1.0];
        for e in self.edges() {
            // boundary vertices lying on s
            if s.distance_to(e.a) <= LENGTH_TIE_EPS {
                cuts.push(s.project(e.a).clamp(0.0, 1.0));
            }
            // proper crossings
            let o1 = orient(s.a, s.b, e.a);
            let o2 = orient(s.a, s.b, e.b);
            let o3 = orient(e.a, e.b, s.a);
            let o4 = orient(e.a, e.b, s.b);
            if o1 * o2 < 0 && o3 * o4 < 0 {
                let d = s.direction();
                let f = e.direction();
                let t = (e.a - s.a).cross(f) / d.cross(f);
                cuts.push(t.clamp(0.0, 1.0));
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .filter(|w| (w[1] - w[0]) * len > LENGTH_TIE_EPS)
            .all(|w| self.contains(s.a.lerp(s.b, 0.5 * (w[0] + w[1]))))
    }

    /// Whether the interior angle at vertex `i` exceeds 180 degrees.
    pub fn is_reflex(&self, i: usize) -> bool {
        let n = self.vertices.len();
        let prev = self.vertices[(i + n - 1) % n];
        let next = self.vertices[(i + 1) % n];
        orient(prev, self.vertices[i], next) < 0
    }

    /// Unit direction pointing into the interior, bisecting the angle at vertex `i`.
    pub fn inward_bisector(&self, i: usize) -> Point2 {
        let n = self.vertices.len();
        let v = self.vertices[i];
        let d_in = (v - self.vertices[(i + n - 1) % n]).normalized();
        let d_out = (self.vertices[(i + 1) % n] - v).normalized();
        let b = d_in.perp() + d_out.perp();
        if b.norm() < 1e-12 {
            d_in.perp()
        } else {
            b.normalized()
        }
    }

    /// A point strictly inside the polygon, found on a horizontal scanline.
    pub fn interior_point(&self) -> Point2 {
        let c = self.centroid();
        if self.contains_strictly(c) {
            return c;
        }
        let mut ys: Vec<f64> = self.vertices.iter().map(|p| p.y).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        // widest gap between distinct vertex heights avoids degenerate scanlines
        let (lo, hi) = ys
            .windows(2)
            .map(|w| (w[0], w[1]))
            .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
            .unwrap_or((ys[0], ys[0]));
        let y = 0.5 * (lo + hi);
        let mut xs: Vec<f64> = self
            .edges()
            .filter(|e| (e.a.y > y) != (e.b.y > y))
            .map(|e| e.a.x + (y - e.a.y) / (e.b.y - e.a.y) * (e.b.x - e.a.x))
            .collect();
        xs.sort_by(f64::total_cmp);
        Point2::new(0.5 * (xs[0] + xs[1]), y)
    }

    /// Whether two polygons share interior area.
    pub fn interiors_overlap(&self, other: &Polygon) -> bool {
        for e in self.edges() {
            for f in other.edges() {
                let o1 = orient(e.a, e.b, f.a);
                let o2 = orient(e.a, e.b, f.b);
                let o3 = orient(f.a, f.b, e.a);
                let o4 = orient(f.a, f.b, e.b);
                if o1 * o2 < 0 && o3 * o4 < 0 {
                    return true;
                }
            }
        }
        let probes = |p: &Polygon, q: &Polygon| {
            p.vertices
                .iter()
                .copied()
                .chain(p.edges().map(|e| e.midpoint()))
                .chain(std::iter::once(p.interior_point()))
                .any(|v| q.contains_strictly(v))
        };
        probes(self, other) || probes(other, self)
    }

    pub fn scaled(&self, s: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| p * s).collect(),
        }
    }
}

/// Any contact between two segments, including endpoints.
fn segments_touch(e: &Segment, f: &Segment) -> bool {
    let o1 = orient(e.a, e.b, f.a);
    let o2 = orient(e.a, e.b, f.b);
    let o3 = orient(f.a, f.b, e.a);
    let o4 = orient(f.a, f.b, e.b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    f.distance_to(e.a) <= LENGTH_TIE_EPS
        || f.distance_to(e.b) <= LENGTH_TIE_EPS
        || e.distance_to(f.a) <= LENGTH_TIE_EPS
        || e.distance_to(f.b) <= LENGTH_TIE_EPS
}
