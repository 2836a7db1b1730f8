//! Y-Δ and Δ-Y moves with conductance transport, exact spectral-curve invariance,
//! move programs iterated as birational maps, and the discrete Abel map.

pub mod abel;
mod program;

pub use abel::{discrete_abel, homology_embedding, AbelChart, AbelError, Lifted};
pub use program::{run_program, IsoSpec, Move, MoveProgram, Trajectory};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{edge_of, rev, Conductances, Edge, GraphError, Network, TorusGraph};
use crate::laplacian::{build_laplacian, charpoly, LaplacianError};
use crate::laurent::lattice::sub;
use crate::zigzag::{sorted_classes, trace_strands};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum YDeltaError {
    #[error("vertex {vertex} has degree {degree}, not 3")]
    BadDegree { vertex: usize, degree: usize },
    #[error("vertex {0} carries a loop")]
    LoopAtVertex(usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("face {0} out of range")]
    FaceOutOfRange(usize),
    #[error("face {0} is not a triangle on three distinct edges")]
    NotATriangle(usize),
    #[error("move is singular: {0} vanishes")]
    SingularDenominator(String),
    #[error("closing isomorphism mismatch: {0}")]
    IsomorphismMismatch(String),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<YDeltaError>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Laplacian(#[from] LaplacianError),
}

/// What a move created, for addressing later moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Created {
    /// Face bounded by the new triangle.
    Triangle(usize),
    /// The new star vertex.
    Star(usize),
}

/// Rebuilds a graph after local surgery. `edge_id[e]` is the new id of a kept edge;
/// in `finish`, `patch(x)` lists the new darts replacing old dart `x` in its rotation.
struct Surgery<'a> {
    g: &'a TorusGraph,
    vertex_id: Vec<Option<usize>>,
    edge_id: Vec<Option<usize>>,
    edges: Vec<Edge>,
    conductance: Vec<BigRational>,
}

impl Surgery<'_> {
    fn new_dart(&self, x: usize) -> usize {
        2 * self.edge_id[edge_of(x)].expect("kept edge") + (x & 1)
    }

    fn finish(
        self,
        num_vertices: usize,
        patch: impl Fn(usize) -> Option<Vec<usize>>,
        extra: Vec<(usize, Vec<usize>)>,
    ) -> Result<Network, YDeltaError> {
        let mut rotation = vec![Vec::new(); num_vertices];
        for u in 0..self.g.num_vertices() {
            let Some(nu) = self.vertex_id[u] else { continue };
            rotation[nu] = self
                .g
                .rotation(u)
                .iter()
                .flat_map(|&x| patch(x).unwrap_or_else(|| vec![self.new_dart(x)]))
                .collect();
        }
        for (v, r) in extra {
            rotation[v] = r;
        }
        let graph = TorusGraph::new(num_vertices, self.edges, rotation)?;
        Ok(Network::new(graph, Conductances::new(self.conductance)?)?)
    }
}

/// Replaces the degree-3 vertex `v` by a triangle on its neighbours. The new edge
/// opposite the leg of conductance `a` gets `bc/(a+b+c)`.
pub fn y_to_delta(net: &Network, v: usize) -> Result<(Network, Created), YDeltaError> {
    let g = &net.graph;
    if v >= g.num_vertices() {
        return Err(YDeltaError::VertexOutOfRange(v));
    }
    let rot = g.rotation(v);
    if rot.len() != 3 {
        return Err(YDeltaError::BadDegree { vertex: v, degree: rot.len() });
    }
    if rot.iter().any(|&d| g.is_loop(edge_of(d))) {
        return Err(YDeltaError::LoopAtVertex(v));
    }
    let legs = [rot[0], rot[1], rot[2]];
    let a: Vec<BigRational> = legs.iter().map(|&d| net.conductance.get(edge_of(d)).clone()).collect();
    let sum = &a[0] + &a[1] + &a[2];
    if sum.is_zero() {
        return Err(YDeltaError::SingularDenominator("a + b + c".into()));
    }
    let vertex_id = (0..g.num_vertices())
        .map(|u| match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(u),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(u - 1),
        })
        .collect::<Vec<_>>();
    let mut edge_id = vec![None; g.num_edges()];
    let mut edges = Vec::new();
    let mut conductance = Vec::new();
    for e in 0..g.num_edges() {
        if legs.iter().any(|&d| edge_of(d) == e) {
            continue;
        }
        let old = g.edge(e);
        edge_id[e] = Some(edges.len());
        edges.push(Edge { tail: vertex_id[old.tail].unwrap(), head: vertex_id[old.head].unwrap(), disp: old.disp });
        conductance.push(net.conductance.get(e).clone());
    }
    let base = edges.len();
    // Triangle edge i joins head(leg i) to head(leg i+1), opposite leg i+2.
    for i in 0..3 {
        let (p, q) = (legs[i], legs[(i + 1) % 3]);
        edges.push(Edge {
            tail: vertex_id[g.head(p)].unwrap(),
            head: vertex_id[g.head(q)].unwrap(),
            disp: sub(g.disp(q), g.disp(p)),
        });
        conductance.push(&a[i] * &a[(i + 1) % 3] / &sum);
    }
    let s = Surgery { g, vertex_id, edge_id, edges, conductance };
    let out = s.finish(
        g.num_vertices() - 1,
        |x| {
            let i = legs.iter().position(|&d| rev(d) == x)?;
            Some(vec![2 * (base + i), 2 * (base + (i + 2) % 3) + 1])
        },
        Vec::new(),
    )?;
    let face = out.graph.face_of(2 * base);
    Ok((out, Created::Triangle(face)))
}

/// Replaces triangular face `f` by a star on its corners. The leg to the corner
/// opposite the edge of conductance `A` gets `(AB+BC+CA)/A`.
pub fn delta_to_y(net: &Network, f: usize) -> Result<(Network, Created), YDeltaError> {
    let g = &net.graph;
    if f >= g.num_faces() {
        return Err(YDeltaError::FaceOutOfRange(f));
    }
    let orbit = &g.faces()[f];
    if orbit.len() != 3 {
        return Err(YDeltaError::NotATriangle(f));
    }
    let sides = [orbit[0], orbit[1], orbit[2]];
    let side_edges = sides.map(edge_of);
    if side_edges[0] == side_edges[1] || side_edges[1] == side_edges[2] || side_edges[0] == side_edges[2] {
        return Err(YDeltaError::NotATriangle(f));
    }
    // Side i+1 is opposite corner i = tail(side i).
    let big_a: Vec<BigRational> = (0..3).map(|i| net.conductance.get(side_edges[(i + 1) % 3]).clone()).collect();
    let s2 = &big_a[0] * &big_a[1] + &big_a[1] * &big_a[2] + &big_a[2] * &big_a[0];
    if s2.is_zero() {
        return Err(YDeltaError::SingularDenominator("AB + BC + CA".into()));
    }
    let star = g.num_vertices();
    let vertex_id: Vec<Option<usize>> = (0..g.num_vertices()).map(Some).collect();
    let mut edge_id = vec![None; g.num_edges()];
    let mut edges = Vec::new();
    let mut conductance = Vec::new();
    for e in 0..g.num_edges() {
        if side_edges.contains(&e) {
            continue;
        }
        edge_id[e] = Some(edges.len());
        edges.push(g.edge(e));
        conductance.push(net.conductance.get(e).clone());
    }
    let base = edges.len();
    for i in 0..3 {
        edges.push(Edge { tail: star, head: g.tail(sides[i]), disp: g.face_offset(sides[i]) });
        conductance.push(&s2 / &big_a[i]);
    }
    let s = Surgery { g, vertex_id, edge_id, edges, conductance };
    let out = s.finish(
        star + 1,
        |x| {
            if let Some(i) = sides.iter().position(|&d| d == x) {
                return Some(vec![2 * (base + i) + 1]);
            }
            sides.iter().any(|&d| rev(d) == x).then(Vec::new)
        },
        vec![(star, vec![2 * base, 2 * (base + 1), 2 * (base + 2)])],
    )?;
    Ok((out, Created::Star(star)))
}

pub fn apply_move(net: &Network, mv: &Move) -> Result<(Network, Created), YDeltaError> {
    match *mv {
        Move::YToDelta { vertex } => y_to_delta(net, vertex),
        Move::DeltaToY { face } => delta_to_y(net, face),
    }
}

/// Comparison of the network before and after one move.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    /// `P_before / P_after`, when it is a constant.
    #[serde(serialize_with = "ser_opt_rat")]
    pub ratio: Option<BigRational>,
    /// Star conductance sum `a+b+c` for Y-Δ, its reciprocal for Δ-Y.
    #[serde(serialize_with = "crate::laurent::serialize_rational")]
    pub expected: BigRational,
    pub polygon_equal: bool,
    pub strand_classes_equal: bool,
}

impl InvarianceReport {
    pub fn ok(&self) -> bool {
        self.ratio.as_ref() == Some(&self.expected) && self.polygon_equal && self.strand_classes_equal
    }
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

pub fn invariance_check(net: &Network, mv: &Move) -> Result<InvarianceReport, YDeltaError> {
    let (after, _) = apply_move(net, mv)?;
    let star_sum = |n: &Network, v: usize| -> BigRational {
        n.graph.rotation(v).iter().map(|&d| n.conductance.get(edge_of(d)).clone()).sum()
    };
    let expected = match *mv {
        Move::YToDelta { vertex } => star_sum(net, vertex),
        Move::DeltaToY { .. } => BigRational::from_integer(1.into()) / star_sum(&after, after.graph.num_vertices() - 1),
    };
    let p1 = charpoly(&build_laplacian(&net.graph, &net.conductance))?;
    let p2 = charpoly(&build_laplacian(&after.graph, &after.conductance))?;
    let s1 = trace_strands(&net.graph);
    let s2 = trace_strands(&after.graph);
    Ok(InvarianceReport {
        ratio: p1.constant_ratio(&p2),
        expected,
        polygon_equal: p1.newton_polygon().ok() == p2.newton_polygon().ok(),
        strand_classes_equal: sorted_classes(&s1) == sorted_classes(&s2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{find_isomorphism, IsoMode};
    use crate::laurent::{rat, LaurentPoly2};
    use rand::{Rng, SeedableRng};

    fn hex(a: i64, b: i64, c: i64) -> Network {
        let n = fixtures::hex1();
        Network::new(n.graph, Conductances::from_ints(&[a, b, c]).unwrap()).unwrap()
    }

    #[test]
    fn star_to_triangle_formula() {
        let (t, created) = y_to_delta(&hex(1, 2, 3), 0).unwrap();
        assert_eq!(t.graph.num_vertices(), 1);
        let canon = |d: [i64; 2]| if d < [0, 0] { [-d[0], -d[1]] } else { d };
        let mut disps: Vec<_> = t.graph.edges().iter().map(|e| canon(e.disp)).collect();
        disps.sort();
        assert_eq!(disps, vec![[0, 1], [1, -1], [1, 0]]);
        // The edge opposite each leg carries the product of the other two over the sum.
        let by_disp = |d: [i64; 2]| {
            let e = t.graph.edges().iter().position(|e| e.disp == d || e.disp == [-d[0], -d[1]]).unwrap();
            t.conductance.get(e).clone()
        };
        assert_eq!(by_disp([1, 0]), rat(1, 3));
        assert_eq!(by_disp([0, 1]), rat(1, 2));
        assert_eq!(by_disp([-1, 1]), rat(1, 1));
        let Created::Triangle(f) = created else { panic!() };
        assert_eq!(t.graph.faces()[f].len(), 3);
        assert!(find_isomorphism(&t.graph, &fixtures::tri1().graph, IsoMode::Exact).is_some());
    }

    #[test]
    fn symmetric_star() {
        let (t, _) = y_to_delta(&hex(1, 1, 1), 0).unwrap();
        assert!(t.conductance.values().iter().all(|x| *x == rat(1, 3)));
        let (back, _) = delta_to_y(&t, 0).unwrap();
        assert!(back.conductance.values().iter().all(|x| *x == rat(1, 1)));
    }

    #[test]
    fn triangle_to_star_inverts() {
        let (t, created) = y_to_delta(&hex(1, 2, 3), 0).unwrap();
        let Created::Triangle(f) = created else { panic!() };
        let (back, created) = delta_to_y(&t, f).unwrap();
        assert_eq!(created, Created::Star(1));
        let iso = find_isomorphism(&back.graph, &fixtures::hex1().graph, IsoMode::Exact).unwrap();
        for e in 0..3 {
            let (img, _) = iso.edge_image(e);
            assert_eq!(back.conductance.get(e), &rat(img as i64 + 1, 1));
        }
    }

    #[test]
    fn random_round_trips_are_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut r = || rat(rng.random_range(1..40), rng.random_range(1..40));
            let c = Conductances::new(vec![r(), r(), r()]).unwrap();
            let net = Network::new(fixtures::hex1().graph, c.clone()).unwrap();
            let (t, Created::Triangle(f)) = y_to_delta(&net, 0).unwrap() else { panic!() };
            let (back, _) = delta_to_y(&t, f).unwrap();
            let iso = find_isomorphism(&back.graph, &net.graph, IsoMode::Exact).unwrap();
            for e in 0..3 {
                assert_eq!(back.conductance.get(e), c.get(iso.edge_image(e).0));
            }
        }
    }

    #[test]
    fn preconditions() {
        let sq = fixtures::sq1();
        assert_eq!(y_to_delta(&sq, 0), Err(YDeltaError::BadDegree { vertex: 0, degree: 4 }));
        assert_eq!(delta_to_y(&sq, 0), Err(YDeltaError::NotATriangle(0)));
        let neg = Network::new(fixtures::hex1().graph, Conductances::from_ints(&[1, 1, -2]).unwrap()).unwrap();
        assert!(matches!(y_to_delta(&neg, 0), Err(YDeltaError::SingularDenominator(_))));
    }

    #[test]
    fn hex1_curve_scales_by_three() {
        let net = hex(1, 1, 1);
        let r = invariance_check(&net, &Move::YToDelta { vertex: 0 }).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.ratio, Some(rat(3, 1)));
        let (t, _) = y_to_delta(&net, 0).unwrap();
        let p2 = charpoly(&build_laplacian(&t.graph, &t.conductance)).unwrap();
        let expect = LaurentPoly2::from_int_terms(&[
            (0, 0, 6),
            (1, 0, -1),
            (-1, 0, -1),
            (0, 1, -1),
            (0, -1, -1),
            (1, -1, -1),
            (-1, 1, -1),
        ])
        .scale(&rat(1, 3));
        assert_eq!(p2, expect);
    }

    #[test]
    fn invariance_on_random_draws() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut r = || rat(rng.random_range(1..30), rng.random_range(1..30));
            let net = Network::new(fixtures::hex1().graph, Conductances::new(vec![r(), r(), r()]).unwrap()).unwrap();
            assert!(invariance_check(&net, &Move::YToDelta { vertex: 1 }).unwrap().ok());
        }
        let tri = fixtures::tri2();
        for f in 0..tri.graph.num_faces() {
            let r = invariance_check(&tri, &Move::DeltaToY { face: f }).unwrap();
            assert!(r.ok(), "face {f}: {r:?}");
        }
    }
}
