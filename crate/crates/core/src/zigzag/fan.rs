//! Global and local zig-zag fans and the edge each global cone selects at a vertex.
//!
//! At vertex `v` with outgoing darts `o_0, …, o_{k-1}` (counterclockwise), the strand
//! turning right at corner `i` enters along `rev(o_i)` and leaves along `o_{i+1}`.
//! Corners `i` and `i+1` share `o_{i+1}`, so the local cone between their rays
//! selects the outgoing dart `o_{i+1}`. Left-turning strands give the reverse fan,
//! whose cone between corners `i` and `i+1` selects the incoming dart `rev(o_{i+1})`.

use serde::Serialize;

use super::{families, StrandSet, ZigZagError};
use crate::graph::{rev, TorusGraph};
use crate::laurent::lattice::{add, primitive, same_direction, strictly_between_ccw, Point};
use crate::laurent::NewtonPolygon;

/// Rays of a local fan, one per corner in rotation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalFan {
    pub vertex: usize,
    pub rays: Vec<Point>,
}

/// Two-dimensional cone of the global fan between consecutive ray directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalCone {
    pub from: Point,
    pub to: Point,
    /// Vertex of the strand polygon between the edges with directions `from` and `to`.
    pub polygon_vertex: Point,
}

/// Per-vertex edge selection of one global cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanSelection {
    pub cone: usize,
    /// Outgoing dart selected at each vertex.
    pub outgoing: Vec<usize>,
    /// Incoming dart selected at each vertex by the reverse fan.
    pub incoming: Vec<usize>,
}

impl FanSelection {
    /// The selected darts as a sorted set; equal for both fans on minimal graphs.
    pub fn forward_darts(&self) -> Vec<usize> {
        let mut v = self.outgoing.clone();
        v.sort_unstable();
        v
    }

    pub fn reverse_darts(&self) -> Vec<usize> {
        let mut v = self.incoming.clone();
        v.sort_unstable();
        v
    }

    pub fn forward_equals_reverse(&self) -> bool {
        self.forward_darts() == self.reverse_darts()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fans {
    /// Primitive ray directions counterclockwise, with strand multiplicity.
    pub global_rays: Vec<(Point, usize)>,
    pub cones: Vec<GlobalCone>,
    pub local: Vec<LocalFan>,
    pub local_reverse: Vec<LocalFan>,
    pub selections: Vec<FanSelection>,
}

impl Fans {
    /// Selection for the cone whose polygon vertex is `p`.
    pub fn selection_for_vertex(&self, p: Point) -> Option<&FanSelection> {
        let i = self.cones.iter().position(|c| c.polygon_vertex == p)?;
        self.selections.iter().find(|s| s.cone == i)
    }
}

fn in_closed_cone(a: Point, x: Point, b: Point) -> bool {
    same_direction(a, x) || same_direction(b, x) || strictly_between_ccw(a, x, b)
}

/// Index `i` of the unique local cone (between rays `i` and `i+1`) containing the
/// global cone `(g1, g2)`.
fn locate(rays: &[Point], g1: Point, g2: Point) -> Option<usize> {
    let k = rays.len();
    let mid = add(g1, g2);
    let mut found = None;
    for i in 0..k {
        let (a, b) = (primitive(rays[i]), primitive(rays[(i + 1) % k]));
        if a == [0, 0] || b == [0, 0] || (k > 1 && same_direction(a, b)) {
            continue;
        }
        if strictly_between_ccw(a, mid, b) && in_closed_cone(a, g1, b) && in_closed_cone(a, g2, b) {
            if found.is_some() {
                return None;
            }
            found = Some(i);
        }
    }
    found
}

/// Builds all fans and selections. `polygon` is the strand polygon.
pub fn fans(g: &TorusGraph, strands: &StrandSet, polygon: &NewtonPolygon) -> Result<Fans, ZigZagError> {
    let fam = families(strands);
    if fam.len() < 3 {
        return Err(ZigZagError::Degenerate);
    }
    let global_rays: Vec<(Point, usize)> = fam.iter().map(|(d, m)| (*d, m.len())).collect();
    let edges = polygon.edges();
    let cones: Vec<GlobalCone> = (0..global_rays.len())
        .map(|i| {
            let from = global_rays[i].0;
            let to = global_rays[(i + 1) % global_rays.len()].0;
            let polygon_vertex = edges
                .iter()
                .find(|e| e.primitive == from)
                .map(|e| e.end)
                .ok_or(ZigZagError::NotCentrallySymmetric)?;
            Ok(GlobalCone { from, to, polygon_vertex })
        })
        .collect::<Result<_, ZigZagError>>()?;

    let mut local = Vec::with_capacity(g.num_vertices());
    let mut local_reverse = Vec::with_capacity(g.num_vertices());
    for v in 0..g.num_vertices() {
        let k = g.degree(v);
        let rays = (0..k).map(|i| strands.strands[strands.right_strand_at_corner(g, v, i)].homology).collect();
        let rev_rays = (0..k).map(|i| strands.strands[strands.left_strand_at_corner(g, v, i)].homology).collect();
        local.push(LocalFan { vertex: v, rays });
        local_reverse.push(LocalFan { vertex: v, rays: rev_rays });
    }

    let mut selections = Vec::with_capacity(cones.len());
    for (ci, cone) in cones.iter().enumerate() {
        let mut outgoing = Vec::with_capacity(g.num_vertices());
        let mut incoming = Vec::with_capacity(g.num_vertices());
        for v in 0..g.num_vertices() {
            let rot = g.rotation(v);
            let k = rot.len();
            let i = locate(&local[v].rays, cone.from, cone.to)
                .ok_or(ZigZagError::AmbiguousCone { vertex: v, cone: ci })?;
            outgoing.push(rot[(i + 1) % k]);
            let j = locate(&local_reverse[v].rays, cone.from, cone.to)
                .ok_or(ZigZagError::AmbiguousCone { vertex: v, cone: ci })?;
            incoming.push(rev(rot[(j + 1) % k]));
        }
        selections.push(FanSelection { cone: ci, outgoing, incoming });
    }
    Ok(Fans { global_rays, cones, local, local_reverse, selections })
}

#[cfg(test)]
mod tests {
    use super::super::{trace_strands, zigzag_polygon};
    use super::*;
    use crate::graph::Edge;

    fn sq1() -> TorusGraph {
        TorusGraph::new(
            1,
            vec![Edge { tail: 0, head: 0, disp: [1, 0] }, Edge { tail: 0, head: 0, disp: [0, 1] }],
            vec![vec![0, 2, 1, 3]],
        )
        .unwrap()
    }

    fn hex1() -> TorusGraph {
        TorusGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, disp: [0, 0] },
                Edge { tail: 0, head: 1, disp: [1, 0] },
                Edge { tail: 0, head: 1, disp: [0, 1] },
            ],
            vec![vec![4, 0, 2], vec![1, 3, 5]],
        )
        .unwrap()
    }

    fn build(g: &TorusGraph) -> Fans {
        let s = trace_strands(g);
        let p = zigzag_polygon(&s).unwrap();
        fans(g, &s, &p).unwrap()
    }

    #[test]
    fn sq1_cone_selects_loop_of_its_vertex() {
        let g = sq1();
        let f = build(&g);
        let ci = f.cones.iter().position(|c| c.from == [1, 1] && c.to == [-1, 1]).unwrap();
        assert_eq!(f.cones[ci].polygon_vertex, [1, 0]);
        let sel = &f.selections[ci];
        assert_eq!(g.disp(sel.outgoing[0]), [1, 0]);
    }

    #[test]
    fn hex1_local_fans_have_three_rays() {
        let g = hex1();
        let f = build(&g);
        assert!(f.local.iter().all(|l| l.rays.len() == 3));
        assert_eq!(f.cones.len(), 6);
    }

    #[test]
    fn selections_are_cycles_with_polygon_class() {
        for g in [sq1(), hex1()] {
            let f = build(&g);
            for (sel, cone) in f.selections.iter().zip(&f.cones) {
                assert!(sel.forward_equals_reverse());
                assert_eq!(g.homology(&sel.outgoing), cone.polygon_vertex);
            }
        }
    }
}
