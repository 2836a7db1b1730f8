//! Integer-lattice geometry: convex hulls, Newton polygons, lattice-point counts.

use std::cmp::Ordering;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A point (or vector) of the integer lattice, `[x, y]`.
pub type Point = [i64; 2];

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn neg(a: Point) -> Point {
    [-a[0], -a[1]]
}

#[inline]
pub fn scale(a: Point, k: i64) -> Point {
    [a[0] * k, a[1] * k]
}

/// `det([a, b])`, positive when `b` is counterclockwise from `a`.
#[inline]
pub fn cross(a: Point, b: Point) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dot(a: Point, b: Point) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Lattice length of a vector: gcd of the absolute coordinates.
pub fn lattice_length(v: Point) -> i64 {
    v[0].abs().gcd(&v[1].abs())
}

/// Primitive vector in the direction of `v` (zero stays zero).
pub fn primitive(v: Point) -> Point {
    let g = lattice_length(v);
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g]
    }
}

/// Which half-turn `v` lies in, measured counterclockwise from `reference`.
fn half(reference: Point, v: Point) -> u8 {
    let c = cross(reference, v);
    if c > 0 || (c == 0 && dot(reference, v) > 0) {
        0
    } else {
        1
    }
}

/// Exact comparison of counterclockwise angles from `reference` to `a` and to `b`,
/// with angles taken in `[0, 2π)`. Vectors must be nonzero.
pub fn cmp_angle_from(reference: Point, a: Point, b: Point) -> Ordering {
    let (ha, hb) = (half(reference, a), half(reference, b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    0.cmp(&cross(a, b))
}

/// Exact comparison of polar angles in `[0, 2π)` from the positive x-axis.
pub fn cmp_angle(a: Point, b: Point) -> Ordering {
    cmp_angle_from([1, 0], a, b)
}

/// True if `x` lies strictly inside the counterclockwise sweep from `a` to `b`.
/// When `a` and `b` point the same way the sweep is the full turn minus that ray.
pub fn strictly_between_ccw(a: Point, x: Point, b: Point) -> bool {
    if same_direction(a, x) {
        return false;
    }
    if same_direction(a, b) {
        return true;
    }
    cmp_angle_from(a, x, b) == Ordering::Less
}

pub fn same_direction(a: Point, b: Point) -> bool {
    cross(a, b) == 0 && dot(a, b) > 0
}

/// Where a point sits relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Interior,
    Boundary,
    Outside,
}

/// One boundary edge of a [`NewtonPolygon`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonEdge {
    pub start: Point,
    pub end: Point,
    /// Primitive direction `end - start`, divided by its lattice length.
    pub primitive: Point,
    pub lattice_length: i64,
}

/// Convex hull of a finite lattice point set, stored as counterclockwise vertices
/// without collinear points, starting from the lexicographically smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NewtonPolygon {
    vertices: Vec<Point>,
}

impl NewtonPolygon {
    /// Convex hull of `points`. Returns `None` for an empty set.
    pub fn hull<I: IntoIterator<Item = Point>>(points: I) -> Option<Self> {
        let mut pts: Vec<Point> = points.into_iter().collect();
        pts.sort_unstable();
        pts.dedup();
        if pts.is_empty() {
            return None;
        }
        if pts.len() <= 2 {
            return Some(Self { vertices: pts });
        }
        // Andrew's monotone chain, dropping collinear points.
        let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
        for &p in &pts {
            while lower.len() >= 2
                && cross(
                    sub(lower[lower.len() - 1], lower[lower.len() - 2]),
                    sub(p, lower[lower.len() - 1]),
                ) <= 0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(
                    sub(upper[upper.len() - 1], upper[upper.len() - 2]),
                    sub(p, upper[upper.len() - 1]),
                ) <= 0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Some(Self::from_ccw_vertices(lower))
    }

    /// Builds a polygon from vertices that are already convex and counterclockwise.
    /// Collinear points are removed and the start is normalized.
    pub fn from_ccw_vertices(mut vertices: Vec<Point>) -> Self {
        vertices.dedup();
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() > 2 {
            let n = vertices.len();
            let keep: Vec<Point> = (0..n)
                .filter(|&i| {
                    let prev = vertices[(i + n - 1) % n];
                    let next = vertices[(i + 1) % n];
                    cross(sub(vertices[i], prev), sub(next, vertices[i])) != 0
                })
                .map(|i| vertices[i])
                .collect();
            vertices = keep;
        }
        if let Some(start) = (0..vertices.len()).min_by_key(|&i| vertices[i]) {
            vertices.rotate_left(start);
        }
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_vertex(&self, p: Point) -> bool {
        self.vertices.contains(&p)
    }

    /// Boundary edges in counterclockwise order. A single point has no edges; a segment
    /// has two (there and back).
    pub fn edges(&self) -> Vec<PolygonEdge> {
        let n = self.vertices.len();
        if n < 2 {
            return Vec::new();
        }
        (0..n)
            .map(|i| {
                let start = self.vertices[i];
                let end = self.vertices[(i + 1) % n];
                let d = sub(end, start);
                PolygonEdge {
                    start,
                    end,
                    primitive: primitive(d),
                    lattice_length: lattice_length(d),
                }
            })
            .collect()
    }

    /// Twice the enclosed area (an integer for lattice polygons).
    pub fn twice_area(&self) -> i64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0;
        }
        (0..n)
            .map(|i| cross(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum()
    }

    pub fn boundary_count(&self) -> i64 {
        match self.vertices.len() {
            0 => 0,
            1 => 1,
            2 => lattice_length(sub(self.vertices[1], self.vertices[0])) + 1,
            _ => self.edges().iter().map(|e| e.lattice_length).sum(),
        }
    }

    /// Interior lattice point count from Pick's theorem.
    pub fn interior_count_pick(&self) -> i64 {
        if self.vertices.len() < 3 {
            return 0;
        }
        (self.twice_area() - self.boundary_count() + 2) / 2
    }

    /// Interior lattice point count by scanning the bounding box.
    pub fn interior_count_enumerated(&self) -> i64 {
        self.interior_points().len() as i64
    }

    /// Interior lattice point count; Pick and enumeration must agree.
    pub fn interior_count(&self) -> i64 {
        let pick = self.interior_count_pick();
        debug_assert_eq!(pick, self.interior_count_enumerated());
        pick
    }

    /// `interior - 1`, the genus of a generic curve with this polygon minus one,
    /// i.e. the expected spectral-divisor degree for a network.
    pub fn divisor_degree(&self) -> i64 {
        self.interior_count() - 1
    }

    fn bounding_box(&self) -> (Point, Point) {
        let xs = self.vertices.iter().map(|p| p[0]);
        let ys = self.vertices.iter().map(|p| p[1]);
        (
            [xs.clone().min().unwrap_or(0), ys.clone().min().unwrap_or(0)],
            [xs.max().unwrap_or(0), ys.max().unwrap_or(0)],
        )
    }

    pub fn contains(&self, p: Point) -> Containment {
        match self.vertices.len() {
            0 => Containment::Outside,
            1 => {
                if p == self.vertices[0] {
                    Containment::Boundary
                } else {
                    Containment::Outside
                }
            }
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let on_line = cross(sub(b, a), sub(p, a)) == 0;
                let within = dot(sub(p, a), sub(b, a)) >= 0 && dot(sub(p, b), sub(a, b)) >= 0;
                if on_line && within {
                    Containment::Boundary
                } else {
                    Containment::Outside
                }
            }
            n => {
                let mut on_edge = false;
                for i in 0..n {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    let c = cross(sub(b, a), sub(p, a));
                    if c < 0 {
                        return Containment::Outside;
                    }
                    if c == 0 {
                        on_edge = true;
                    }
                }
                if on_edge {
                    Containment::Boundary
                } else {
                    Containment::Interior
                }
            }
        }
    }

    pub fn lattice_points(&self) -> Vec<Point> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                if self.contains([x, y]) != Containment::Outside {
                    out.push([x, y]);
                }
            }
        }
        out
    }

    pub fn interior_points(&self) -> Vec<Point> {
        self.lattice_points()
            .into_iter()
            .filter(|&p| self.contains(p) == Containment::Interior)
            .collect()
    }

    /// Boundary lattice points in counterclockwise order, starting at the first vertex.
    pub fn boundary_points(&self) -> Vec<Point> {
        match self.vertices.len() {
            0 => Vec::new(),
            1 => self.vertices.clone(),
            _ => {
                let mut out = Vec::new();
                for e in self.edges() {
                    for k in 0..e.lattice_length {
                        out.push(add(e.start, scale(e.primitive, k)));
                    }
                }
                if self.vertices.len() == 2 {
                    out.sort_unstable();
                    out.dedup();
                }
                out
            }
        }
    }

    /// Image under `p ↦ -p`.
    pub fn reflect(&self) -> Self {
        Self::from_ccw_vertices(self.vertices.iter().map(|&p| neg(p)).collect())
    }

    pub fn translate(&self, t: Point) -> Self {
        Self::from_ccw_vertices(self.vertices.iter().map(|&p| add(p, t)).collect())
    }

    /// Symmetric about the origin.
    pub fn is_centrally_symmetric(&self) -> bool {
        *self == self.reflect()
    }

    /// The vertex that follows `v` counterclockwise, with the edge between them.
    pub fn edge_from_vertex(&self, v: Point) -> Option<PolygonEdge> {
        self.edges().into_iter().find(|e| e.start == v)
    }

    /// The edge that ends at vertex `v`.
    pub fn edge_into_vertex(&self, v: Point) -> Option<PolygonEdge> {
        self.edges().into_iter().find(|e| e.end == v)
    }

    /// All points of `other` lie in this polygon and the polygons differ.
    pub fn strictly_contains_polygon(&self, other: &NewtonPolygon) -> bool {
        other
            .vertices
            .iter()
            .all(|&p| self.contains(p) != Containment::Outside)
            && self != other
    }

    /// Lexicographically maximal vertex.
    pub fn lex_max_vertex(&self) -> Option<Point> {
        self.vertices.iter().copied().max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diamond() -> NewtonPolygon {
        NewtonPolygon::hull([[1, 0], [0, 1], [-1, 0], [0, -1], [0, 0]]).unwrap()
    }

    fn hexagon() -> NewtonPolygon {
        NewtonPolygon::hull([[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1], [0, 0]]).unwrap()
    }

    #[test]
    fn diamond_counts() {
        let d = diamond();
        assert_eq!(d.vertices(), &[[-1, 0], [0, -1], [1, 0], [0, 1]]);
        assert_eq!(d.twice_area(), 4);
        assert_eq!(d.boundary_count(), 4);
        assert_eq!(d.interior_count_pick(), 1);
        assert_eq!(d.interior_count_enumerated(), 1);
        assert_eq!(d.divisor_degree(), 0);
        assert!(d.is_centrally_symmetric());
    }

    #[test]
    fn hexagon_counts() {
        let h = hexagon();
        assert_eq!(h.vertices().len(), 6);
        assert_eq!(h.interior_points(), vec![[0, 0]]);
        assert_eq!(h.boundary_count(), 6);
        assert!(h.is_centrally_symmetric());
    }

    #[test]
    fn degenerate_hulls() {
        let p = NewtonPolygon::hull([[2, 1]]).unwrap();
        assert_eq!(p.interior_count(), 0);
        assert_eq!(p.boundary_count(), 1);
        let s = NewtonPolygon::hull([[0, 0], [2, 2], [1, 1]]).unwrap();
        assert_eq!(s.vertices(), &[[0, 0], [2, 2]]);
        assert_eq!(s.boundary_count(), 3);
        assert_eq!(s.boundary_points(), vec![[0, 0], [1, 1], [2, 2]]);
        assert!(NewtonPolygon::hull(std::iter::empty()).is_none());
    }

    #[test]
    fn collinear_vertices_are_dropped() {
        let sq = NewtonPolygon::from_ccw_vertices(vec![[0, 0], [1, 0], [2, 0], [2, 2], [0, 2]]);
        assert_eq!(sq.vertices(), &[[0, 0], [2, 0], [2, 2], [0, 2]]);
        assert_eq!(sq.interior_count(), 1);
        assert_eq!(sq.boundary_points().len(), 8);
    }

    #[test]
    fn angular_order() {
        let mut v: Vec<Point> = vec![[0, -1], [1, 1], [-1, 0], [1, 0], [-1, -1], [0, 1]];
        v.sort_by(|a, b| cmp_angle(*a, *b));
        assert_eq!(v, vec![[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]]);
        assert!(strictly_between_ccw([1, 0], [1, 1], [0, 1]));
        assert!(!strictly_between_ccw([1, 0], [0, -1], [0, 1]));
        assert!(strictly_between_ccw([0, 1], [0, -1], [1, 0]));
        assert!(strictly_between_ccw([1, 0], [-1, 0], [1, 0]));
    }

    #[test]
    fn strict_containment() {
        let h = hexagon();
        let pt = NewtonPolygon::hull([[0, 0]]).unwrap();
        assert!(h.strictly_contains_polygon(&pt));
        assert!(!h.strictly_contains_polygon(&h));
    }

    proptest! {
        #[test]
        fn pick_matches_enumeration(pts in proptest::collection::vec((-6i64..6, -6i64..6), 1..12)) {
            let poly = NewtonPolygon::hull(pts.into_iter().map(|(x, y)| [x, y])).unwrap();
            prop_assert_eq!(poly.interior_count_pick(), poly.interior_count_enumerated());
            prop_assert_eq!(poly.boundary_count() as usize,
                poly.lattice_points().len() - poly.interior_points().len());
            prop_assert_eq!(poly.reflect().reflect(), poly);
        }
    }
}
