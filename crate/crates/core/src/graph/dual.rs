//! Dual graph and the bipartite superposition of a graph with its dual.

use super::{edge_of, rev, Edge, TorusGraph};
use crate::laurent::lattice::{add, sub};

impl TorusGraph {
    /// Dual graph: face `f` becomes vertex `f`, and edge `e*` crosses `e` from its
    /// right face to its left face. Dart `2e` of the dual is the dual of dart `2e`.
    pub fn dual(&self) -> TorusGraph {
        let edges = (0..self.num_edges())
            .map(|e| {
                let d = 2 * e;
                Edge {
                    tail: self.face_of(rev(d)),
                    head: self.face_of(d),
                    disp: self.dual_disp(d),
                }
            })
            .collect();
        // Going around a face boundary is counterclockwise around the dual vertex.
        let rotation = self
            .faces()
            .iter()
            .map(|orbit| orbit.iter().map(|&d| rev(d)).collect())
            .collect();
        TorusGraph::new(self.num_faces(), edges, rotation)
            .expect("dual of a valid torus graph is a valid torus graph")
    }

    /// Displacement of the dual dart crossing `d` from right to left.
    pub fn dual_disp(&self, d: usize) -> [i64; 2] {
        sub(sub(self.face_offset(rev(d)), self.face_offset(d)), self.disp(d))
    }

    /// Superposition `Γ_G`: black vertices are `V ⊔ F` (ids `0..V`, then `V..V+F`),
    /// white vertices are edges (ids `V+F+e`). Each white vertex has degree four.
    pub fn superpose(&self) -> Superposition {
        let nv = self.num_vertices();
        let nf = self.num_faces();
        let white = |e: usize| nv + nf + e;
        let mut edges = Vec::with_capacity(4 * self.num_edges());
        for e in 0..self.num_edges() {
            let d = 2 * e;
            let disp = self.disp(d);
            // The white vertex sits in the cell of head(e).
            edges.push(Edge { tail: self.tail(d), head: white(e), disp });
            edges.push(Edge { tail: nv + self.face_of(d), head: white(e), disp: add(disp, self.face_offset(d)) });
            edges.push(Edge { tail: self.head(d), head: white(e), disp: [0, 0] });
            edges.push(Edge { tail: nv + self.face_of(rev(d)), head: white(e), disp: self.face_offset(rev(d)) });
        }
        let mut rotation = vec![Vec::new(); nv + nf + self.num_edges()];
        for v in 0..nv {
            rotation[v] = self
                .rotation(v)
                .iter()
                .map(|&d| {
                    let k = if d & 1 == 0 { 0 } else { 2 };
                    2 * (4 * edge_of(d) + k)
                })
                .collect();
        }
        for (f, orbit) in self.faces().iter().enumerate() {
            rotation[nv + f] = orbit
                .iter()
                .map(|&d| {
                    let k = if d & 1 == 0 { 1 } else { 3 };
                    2 * (4 * edge_of(d) + k)
                })
                .collect();
        }
        for e in 0..self.num_edges() {
            rotation[white(e)] = [2, 1, 0, 3].iter().map(|k| 2 * (4 * e + k) + 1).collect();
        }
        let graph = TorusGraph::new(nv + nf + self.num_edges(), edges, rotation)
            .expect("superposition of a valid torus graph is a valid torus graph");
        Superposition { graph, num_primal_vertices: nv, num_faces: nf }
    }
}

/// What a superposition edge `4e + k` joins white vertex `e` to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperposedEdgeRole {
    Tail,
    LeftFace,
    Head,
    RightFace,
}

/// The bipartite graph `Γ_G` with its black/white bookkeeping.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub graph: TorusGraph,
    pub num_primal_vertices: usize,
    pub num_faces: usize,
}

impl Superposition {
    pub fn num_black(&self) -> usize {
        self.num_primal_vertices + self.num_faces
    }

    pub fn num_white(&self) -> usize {
        self.graph.num_vertices() - self.num_black()
    }

    pub fn is_black(&self, v: usize) -> bool {
        v < self.num_black()
    }

    /// Edge of `Γ_G` joining white `e` to the given neighbour.
    pub fn edge_for(e: usize, role: SuperposedEdgeRole) -> usize {
        4 * e
            + match role {
                SuperposedEdgeRole::Tail => 0,
                SuperposedEdgeRole::LeftFace => 1,
                SuperposedEdgeRole::Head => 2,
                SuperposedEdgeRole::RightFace => 3,
            }
    }

    pub fn role_of(edge: usize) -> (usize, SuperposedEdgeRole) {
        let role = match edge % 4 {
            0 => SuperposedEdgeRole::Tail,
            1 => SuperposedEdgeRole::LeftFace,
            2 => SuperposedEdgeRole::Head,
            _ => SuperposedEdgeRole::RightFace,
        };
        (edge / 4, role)
    }

    /// Every edge joins a black vertex to a white one.
    pub fn is_bipartite(&self) -> bool {
        self.graph
            .edges()
            .iter()
            .all(|e| self.is_black(e.tail) != self.is_black(e.head))
    }
}
