//! Graphs embedded in the torus, stored as combinatorial maps with homology data.
//!
//! Edge `e` owns two darts: `2e` runs tail to head with displacement `disp`, and
//! `2e + 1` runs head to tail with `-disp`. The rotation at each vertex lists its
//! outgoing darts counterclockwise. The face to the left of a dart `d` continues
//! with the dart preceding `rev(d)` in the rotation at `head(d)`.
//!
//! A vertex lift is a pair `(v, cell)` with `cell ∈ ℤ²`; dart `d` leaving `(tail, t)`
//! arrives at `(head, t + disp(d))`.

mod dual;
mod io;
mod iso;

pub use dual::{Superposition, SuperposedEdgeRole};
pub use io::{parse_rational, NetworkJson};
pub use iso::{all_isomorphisms, check_isomorphism, find_isomorphism, IsoMode, Isomorphism};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::laurent::lattice::{add, neg, sub, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("Euler characteristic V - E + F = {v} - {e} + {f} = {chi} is not 0; the embedding is not cellular on the torus")]
    NonTorusEuler { v: usize, e: usize, f: usize, chi: i64 },
    #[error("face {face} (starting at dart {dart}) has displacement sum {sum:?}; faces must be contractible")]
    NonContractibleFace { face: usize, dart: usize, sum: Point },
    #[error("bad rotation at vertex {vertex}: {reason}")]
    BadRotation { vertex: usize, reason: String },
    #[error("edge {edge}: {reason}")]
    BadEdge { edge: usize, reason: String },
    #[error("graph is not connected: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {edge}: conductance must be a nonzero rational, got {value:?}")]
    BadConductance { edge: usize, value: String },
    #[error("malformed graph file: {0}")]
    Format(String),
}

/// An undirected edge with a chosen orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub disp: Point,
}

/// Resolved view of one dart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub id: usize,
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub disp: Point,
}

#[inline]
pub fn rev(d: usize) -> usize {
    d ^ 1
}

#[inline]
pub fn edge_of(d: usize) -> usize {
    d >> 1
}

/// A validated torus graph. Immutable; all derived face data is computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGraph {
    num_vertices: usize,
    edges: Vec<Edge>,
    rotation: Vec<Vec<usize>>,
    positions: Vec<Option<[f64; 2]>>,
    rot_index: Vec<usize>,
    faces: Vec<Vec<usize>>,
    dart_face: Vec<usize>,
    // Offset of tail(d) from the anchor of face(d), accumulated along the face orbit.
    dart_offset: Vec<Point>,
}

/// Summary of the checks performed by [`TorusGraph::new`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub face_displacements_zero: bool,
    pub rotation_consistent: bool,
    pub connected: bool,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "V = {}, E = {}, F = {}", self.vertices, self.edges, self.faces)?;
        writeln!(f, "euler characteristic: {}", self.euler_characteristic)?;
        writeln!(f, "rotation consistent: {}", self.rotation_consistent)?;
        writeln!(f, "connected: {}", self.connected)?;
        write!(f, "face displacement sums zero: {}", self.face_displacements_zero)
    }
}

impl TorusGraph {
    /// Validates and builds a torus graph. `rotation[v]` lists the darts leaving `v`
    /// in counterclockwise order.
    pub fn new(num_vertices: usize, edges: Vec<Edge>, rotation: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        Self::with_positions(num_vertices, edges, rotation, vec![None; num_vertices])
    }

    pub fn with_positions(
        num_vertices: usize,
        edges: Vec<Edge>,
        rotation: Vec<Vec<usize>>,
        mut positions: Vec<Option<[f64; 2]>>,
    ) -> Result<Self, GraphError> {
        if num_vertices == 0 {
            return Err(GraphError::Empty);
        }
        positions.resize(num_vertices, None);
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= num_vertices || e.head >= num_vertices {
                return Err(GraphError::BadEdge {
                    edge: i,
                    reason: format!("endpoint out of range ({} -> {})", e.tail, e.head),
                });
            }
        }
        if rotation.len() != num_vertices {
            return Err(GraphError::BadRotation {
                vertex: rotation.len().min(num_vertices),
                reason: format!("expected rotations for {num_vertices} vertices, got {}", rotation.len()),
            });
        }
        let nd = 2 * edges.len();
        let tail_of = |d: usize| {
            let e = &edges[edge_of(d)];
            if d & 1 == 0 { e.tail } else { e.head }
        };
        let mut rot_index = vec![usize::MAX; nd];
        for (v, list) in rotation.iter().enumerate() {
            for (i, &d) in list.iter().enumerate() {
                if d >= nd {
                    return Err(GraphError::BadRotation { vertex: v, reason: format!("dart {d} does not exist") });
                }
                if tail_of(d) != v {
                    return Err(GraphError::BadRotation {
                        vertex: v,
                        reason: format!("dart {d} leaves vertex {}, not {v}", tail_of(d)),
                    });
                }
                if rot_index[d] != usize::MAX {
                    return Err(GraphError::BadRotation { vertex: v, reason: format!("dart {d} listed twice") });
                }
                rot_index[d] = i;
            }
        }
        if let Some(d) = rot_index.iter().position(|&i| i == usize::MAX) {
            return Err(GraphError::BadRotation {
                vertex: tail_of(d),
                reason: format!("dart {d} missing from rotation"),
            });
        }

        let mut g = TorusGraph {
            num_vertices,
            edges,
            rotation,
            positions,
            rot_index,
            faces: Vec::new(),
            dart_face: vec![usize::MAX; nd],
            dart_offset: vec![[0, 0]; nd],
        };
        g.check_connected()?;
        g.trace_faces()?;
        let chi = num_vertices as i64 - g.edges.len() as i64 + g.faces.len() as i64;
        if chi != 0 {
            return Err(GraphError::NonTorusEuler {
                v: num_vertices,
                e: g.edges.len(),
                f: g.faces.len(),
                chi,
            });
        }
        Ok(g)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &d in &self.rotation[v] {
                let h = self.head(d);
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(GraphError::Disconnected { vertex: v }),
            None => Ok(()),
        }
    }

    fn trace_faces(&mut self) -> Result<(), GraphError> {
        for start in 0..self.num_darts() {
            if self.dart_face[start] != usize::MAX {
                continue;
            }
            let f = self.faces.len();
            let mut orbit = Vec::new();
            let mut offset = [0, 0];
            let mut d = start;
            loop {
                self.dart_face[d] = f;
                self.dart_offset[d] = offset;
                orbit.push(d);
                offset = add(offset, self.disp(d));
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            if offset != [0, 0] {
                return Err(GraphError::NonContractibleFace { face: f, dart: start, sum: offset });
            }
            self.faces.push(orbit);
        }
        Ok(())
    }

    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            vertices: self.num_vertices,
            edges: self.edges.len(),
            faces: self.faces.len(),
            euler_characteristic: self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64,
            face_displacements_zero: true,
            rotation_consistent: true,
            connected: true,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn position(&self, v: usize) -> Option<[f64; 2]> {
        self.positions[v]
    }

    pub fn positions(&self) -> &[Option<[f64; 2]>] {
        &self.positions
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn dart(&self, d: usize) -> Dart {
        Dart {
            id: d,
            edge: edge_of(d),
            tail: self.tail(d),
            head: self.head(d),
            disp: self.disp(d),
        }
    }

    #[inline]
    pub fn tail(&self, d: usize) -> usize {
        let e = &self.edges[edge_of(d)];
        if d & 1 == 0 { e.tail } else { e.head }
    }

    #[inline]
    pub fn head(&self, d: usize) -> usize {
        self.tail(rev(d))
    }

    #[inline]
    pub fn disp(&self, d: usize) -> Point {
        let p = self.edges[edge_of(d)].disp;
        if d & 1 == 0 { p } else { neg(p) }
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].tail == self.edges[e].head
    }

    /// Next dart counterclockwise around `tail(d)`.
    #[inline]
    pub fn succ(&self, d: usize) -> usize {
        let list = &self.rotation[self.tail(d)];
        list[(self.rot_index[d] + 1) % list.len()]
    }

    /// Previous dart counterclockwise (next clockwise) around `tail(d)`.
    #[inline]
    pub fn pred(&self, d: usize) -> usize {
        let list = &self.rotation[self.tail(d)];
        list[(self.rot_index[d] + list.len() - 1) % list.len()]
    }

    /// Position of `d` in the rotation at its tail.
    pub fn rotation_index(&self, d: usize) -> usize {
        self.rot_index[d]
    }

    /// Successor of `d` along the boundary of the face on its left.
    #[inline]
    pub fn face_next(&self, d: usize) -> usize {
        self.pred(rev(d))
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Face to the left of `d`.
    pub fn face_of(&self, d: usize) -> usize {
        self.dart_face[d]
    }

    /// Offset of `tail(d)` from the anchor of `face_of(d)`. If `tail(d)` is lifted to
    /// cell `t`, the face lies in lift `t - face_offset(d)`.
    pub fn face_offset(&self, d: usize) -> Point {
        self.dart_offset[d]
    }

    /// Face lift `(f, cell)` on the left of dart `d` whose tail is lifted to `tail_cell`.
    pub fn left_face_lift(&self, d: usize, tail_cell: Point) -> (usize, Point) {
        (self.dart_face[d], sub(tail_cell, self.dart_offset[d]))
    }

    /// Sum of displacements along a dart sequence.
    pub fn homology(&self, darts: &[usize]) -> Point {
        darts.iter().fold([0, 0], |acc, &d| add(acc, self.disp(d)))
    }

    /// Replaces vertex positions; cosmetic only.
    pub fn set_positions(&mut self, positions: Vec<Option<[f64; 2]>>) {
        self.positions = positions;
        self.positions.resize(self.num_vertices, None);
    }
}

/// Nonzero exact edge weights. Defined up to a global scalar, so comparisons that
/// should ignore scaling go through [`Conductances::projectively_equal`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conductances(Vec<BigRational>);

impl serde::Serialize for Conductances {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

impl Conductances {
    pub fn new(values: Vec<BigRational>) -> Result<Self, GraphError> {
        if let Some(i) = values.iter().position(|c| c.is_zero()) {
            return Err(GraphError::BadConductance { edge: i, value: "0".into() });
        }
        Ok(Conductances(values))
    }

    pub fn uniform(n: usize) -> Self {
        Conductances(vec![BigRational::one(); n])
    }

    pub fn from_ints(values: &[i64]) -> Result<Self, GraphError> {
        Self::new(values.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
    }

    pub fn get(&self, e: usize) -> &BigRational {
        &self.0[e]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// True if `self = k · other` for some nonzero constant `k`.
    pub fn projectively_equal(&self, other: &Conductances) -> bool {
        if self.len() != other.len() || self.is_empty() {
            return self.len() == other.len();
        }
        let k = &self.0[0] / &other.0[0];
        self.0.iter().zip(&other.0).all(|(a, b)| *a == &k * b)
    }

    /// Rescales so that the first value is 1.
    pub fn normalized(&self) -> Conductances {
        match self.0.first() {
            Some(c0) => Conductances(self.0.iter().map(|c| c / c0).collect()),
            None => self.clone(),
        }
    }
}

/// A torus graph with conductances on its edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub graph: TorusGraph,
    pub conductance: Conductances,
}

impl Network {
    pub fn new(graph: TorusGraph, conductance: Conductances) -> Result<Self, GraphError> {
        if conductance.len() != graph.num_edges() {
            return Err(GraphError::Format(format!(
                "{} conductances for {} edges",
                conductance.len(),
                graph.num_edges()
            )));
        }
        Ok(Network { graph, conductance })
    }

    pub fn uniform(graph: TorusGraph) -> Self {
        let c = Conductances::uniform(graph.num_edges());
        Network { graph, conductance: c }
    }
}
