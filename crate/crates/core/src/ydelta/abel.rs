//! Integer-lattice discrete Abel map on lifted vertices and faces.
//!
//! Stepping from a vertex into an adjacent face through corner `i` crosses the one
//! medial edge at that corner: the strand turning right there crosses the step from
//! right to left (+1), and its reverse crosses from left to right (−1).

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::TorusGraph;
use crate::laurent::lattice::{add, cross, Point};
use crate::zigzag::{minimality_check, trace_strands, StrandSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelError {
    #[error("graph is not minimal")]
    NotMinimal,
    #[error("base object lies outside the window")]
    BaseOutsideWindow,
    #[error("transport is path dependent at {0:?}")]
    PathDependence(Lifted),
}

/// A vertex or face together with the cell of its lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Lifted {
    Vertex(usize, Point),
    Face(usize, Point),
}

impl Lifted {
    pub fn cell(self) -> Point {
        match self {
            Lifted::Vertex(_, t) | Lifted::Face(_, t) => t,
        }
    }

    pub fn translate(self, h: Point) -> Lifted {
        match self {
            Lifted::Vertex(v, t) => Lifted::Vertex(v, add(t, h)),
            Lifted::Face(f, t) => Lifted::Face(f, add(t, h)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbelChart {
    pub base: Lifted,
    /// Cells `t` with `|t.x|, |t.y| ≤ radius`.
    pub radius: i64,
    pub strand_classes: Vec<Point>,
    pub values: BTreeMap<Lifted, Vec<i64>>,
}

impl AbelChart {
    pub fn get(&self, x: Lifted) -> Option<&[i64]> {
        self.values.get(&x).map(Vec::as_slice)
    }

    /// `d′(u + h) − d′(u)` equals the embedding of `h` wherever both are charted.
    pub fn is_equivariant(&self, h: Point) -> bool {
        let e = embed(&self.strand_classes, h);
        self.values.iter().all(|(&u, du)| match self.get(u.translate(h)) {
            Some(dv) => dv.iter().zip(du).zip(&e).all(|((a, b), c)| a - b == *c),
            None => true,
        })
    }
}

fn embed(classes: &[Point], h: Point) -> Vec<i64> {
    classes.iter().map(|&a| cross(h, a)).collect()
}

/// `h ↦ Σ_α (h, [α]) α`, one coordinate per oriented strand.
pub fn homology_embedding(strands: &StrandSet, h: Point) -> Vec<i64> {
    embed(&strands.classes(), h)
}

/// Neighbours of a lifted object with the increment of `d′` along the step.
fn neighbours(g: &TorusGraph, strands: &StrandSet, x: Lifted) -> Vec<(Lifted, Vec<(usize, i64)>)> {
    let corner = |v: usize, i: usize| {
        vec![(strands.right_strand_at_corner(g, v, i), 1), (strands.left_strand_at_corner(g, v, i), -1)]
    };
    match x {
        Lifted::Vertex(v, t) => (0..g.degree(v))
            .map(|i| {
                let (f, s) = g.left_face_lift(g.rotation(v)[i], t);
                (Lifted::Face(f, s), corner(v, i))
            })
            .collect(),
        Lifted::Face(f, s) => g.faces()[f]
            .iter()
            .map(|&d| {
                let u = g.tail(d);
                let i = g.rotation_index(d);
                let inc = corner(u, i).into_iter().map(|(a, k)| (a, -k)).collect();
                (Lifted::Vertex(u, add(s, g.face_offset(d))), inc)
            })
            .collect(),
    }
}

/// Breadth-first transport of `d′` from `base` over the window, then a consistency
/// pass over every charted adjacency.
pub fn discrete_abel(g: &TorusGraph, base: Lifted, radius: i64) -> Result<AbelChart, AbelError> {
    let strands = trace_strands(g);
    if !minimality_check(g, &strands).minimal {
        return Err(AbelError::NotMinimal);
    }
    let inside = |x: Lifted| x.cell().iter().all(|c| c.abs() <= radius);
    if !inside(base) {
        return Err(AbelError::BaseOutsideWindow);
    }
    let n = strands.len();
    let mut values: BTreeMap<Lifted, Vec<i64>> = BTreeMap::new();
    values.insert(base, vec![0; n]);
    let mut queue = VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        let dx = values[&x].clone();
        for (y, inc) in neighbours(g, &strands, x) {
            if !inside(y) || values.contains_key(&y) {
                continue;
            }
            let mut dy = dx.clone();
            for (a, k) in inc {
                dy[a] += k;
            }
            values.insert(y, dy);
            queue.push_back(y);
        }
    }
    for (&x, dx) in &values {
        for (y, inc) in neighbours(g, &strands, x) {
            let Some(dy) = values.get(&y) else { continue };
            let mut expect = dx.clone();
            for (a, k) in inc {
                expect[a] += k;
            }
            if *dy != expect {
                return Err(AbelError::PathDependence(y));
            }
        }
    }
    Ok(AbelChart { base, radius, strand_classes: strands.classes(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn base_is_zero() {
        let g = fixtures::sq1().graph;
        let base = Lifted::Vertex(0, [0, 0]);
        let chart = discrete_abel(&g, base, 2).unwrap();
        assert!(chart.get(base).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn sq1_is_equivariant() {
        let g = fixtures::sq1().graph;
        let chart = discrete_abel(&g, Lifted::Vertex(0, [0, 0]), 3).unwrap();
        assert!(chart.is_equivariant([1, 0]));
        assert!(chart.is_equivariant([0, 1]));
        let d = chart.get(Lifted::Vertex(0, [1, 0])).unwrap();
        assert_eq!(d, homology_embedding(&trace_strands(&g), [1, 0]).as_slice());
    }

    #[test]
    fn charts_are_consistent_on_fixtures() {
        for net in [fixtures::hex1(), fixtures::tri1(), fixtures::tri2(), fixtures::sq22()] {
            let chart = discrete_abel(&net.graph, Lifted::Face(0, [0, 0]), 2).unwrap();
            assert!(chart.is_equivariant([1, 0]) && chart.is_equivariant([0, 1]));
            assert_eq!(chart.values.len(), 25 * (net.graph.num_vertices() + net.graph.num_faces()));
        }
    }

    #[test]
    fn non_minimal_graph_is_rejected() {
        use crate::graph::Edge;
        let g = TorusGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, disp: [0, 0] },
                Edge { tail: 1, head: 0, disp: [1, 0] },
                Edge { tail: 0, head: 0, disp: [0, 1] },
            ],
            vec![vec![0, 4, 3, 5], vec![2, 1]],
        )
        .unwrap();
        assert_eq!(discrete_abel(&g, Lifted::Vertex(0, [0, 0]), 1).unwrap_err(), AbelError::NotMinimal);
    }
}
