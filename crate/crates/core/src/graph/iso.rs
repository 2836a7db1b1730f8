//! Isomorphism of torus graphs by rotation-preserving dart propagation.

use std::collections::VecDeque;

use super::{rev, TorusGraph};
use crate::laurent::lattice::{add, cross, sub, Point};

/// How displacements must correspond under an isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoMode {
    /// Same displacements up to a per-vertex change of fundamental domain.
    Exact,
    /// As `Exact`, after an orientation-preserving change of basis of `ℤ²`.
    Linear,
}

/// `disp(dart_map[d]) = linear · disp(d) + shift[head(d)] - shift[tail(d)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: Vec<usize>,
    pub dart_map: Vec<usize>,
    pub linear: [[i64; 2]; 2],
    pub shift: Vec<Point>,
}

impl Isomorphism {
    /// Edge of the target carrying edge `e`, and whether the orientation flips.
    pub fn edge_image(&self, e: usize) -> (usize, bool) {
        let d = self.dart_map[2 * e];
        (d / 2, d % 2 == 1)
    }
}

fn apply(a: &[[i64; 2]; 2], x: Point) -> Point {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// Finds an isomorphism `g → h` preserving rotations and displacements (per `mode`).
/// Brute force over the image of dart 0; intended for small graphs.
pub fn find_isomorphism(g: &TorusGraph, h: &TorusGraph, mode: IsoMode) -> Option<Isomorphism> {
    if g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges() || g.num_faces() != h.num_faces() {
        return None;
    }
    let mut dg: Vec<usize> = (0..g.num_vertices()).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..h.num_vertices()).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh || g.num_edges() == 0 {
        return None;
    }
    (0..h.num_darts()).find_map(|target| candidate(g, h, target, mode))
}

/// Every isomorphism `g → h`, one per admissible image of dart 0.
pub fn all_isomorphisms(g: &TorusGraph, h: &TorusGraph, mode: IsoMode) -> Vec<Isomorphism> {
    if find_isomorphism(g, h, mode).is_none() {
        return Vec::new();
    }
    (0..h.num_darts()).filter_map(|target| candidate(g, h, target, mode)).collect()
}

fn candidate(g: &TorusGraph, h: &TorusGraph, target: usize, mode: IsoMode) -> Option<Isomorphism> {
    let (vmap, dmap) = propagate(g, h, target)?;
    let (linear, shift) = match_displacements(g, h, &dmap, mode)?;
    Some(Isomorphism { vertex_map: vmap, dart_map: dmap, linear, shift })
}

/// Checks that `iso` is a valid isomorphism `g → h` under `mode`.
pub fn check_isomorphism(g: &TorusGraph, h: &TorusGraph, iso: &Isomorphism) -> bool {
    if iso.dart_map.len() != g.num_darts() || iso.vertex_map.len() != g.num_vertices() {
        return false;
    }
    let mut hit = vec![false; h.num_darts()];
    for d in 0..g.num_darts() {
        let t = iso.dart_map[d];
        if t >= h.num_darts() || hit[t] {
            return false;
        }
        hit[t] = true;
        if iso.dart_map[rev(d)] != rev(t)
            || iso.dart_map[g.succ(d)] != h.succ(t)
            || iso.vertex_map[g.tail(d)] != h.tail(t)
        {
            return false;
        }
        let expect = add(apply(&iso.linear, g.disp(d)), sub(iso.shift[g.head(d)], iso.shift[g.tail(d)]));
        if h.disp(t) != expect {
            return false;
        }
    }
    true
}

fn propagate(g: &TorusGraph, h: &TorusGraph, target: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    const UNSET: usize = usize::MAX;
    let mut dmap = vec![UNSET; g.num_darts()];
    let mut used = vec![false; h.num_darts()];
    let mut vmap = vec![UNSET; g.num_vertices()];
    let mut queue = VecDeque::new();
    let mut assign = |d: usize, t: usize, dmap: &mut Vec<usize>, queue: &mut VecDeque<usize>| -> bool {
        if dmap[d] != UNSET {
            return dmap[d] == t;
        }
        if used[t] {
            return false;
        }
        let v = g.tail(d);
        if vmap[v] == UNSET {
            vmap[v] = h.tail(t);
        } else if vmap[v] != h.tail(t) {
            return false;
        }
        if g.degree(v) != h.degree(h.tail(t)) {
            return false;
        }
        used[t] = true;
        dmap[d] = t;
        queue.push_back(d);
        true
    };
    if !assign(0, target, &mut dmap, &mut queue) {
        return None;
    }
    while let Some(d) = queue.pop_front() {
        let t = dmap[d];
        if !assign(rev(d), rev(t), &mut dmap, &mut queue) || !assign(g.succ(d), h.succ(t), &mut dmap, &mut queue) {
            return None;
        }
    }
    if dmap.contains(&UNSET) {
        return None;
    }
    // Vertex injectivity follows from dart bijectivity plus equal vertex counts.
    let mut seen = vec![false; h.num_vertices()];
    for &v in &vmap {
        if std::mem::replace(&mut seen[v], true) {
            return None;
        }
    }
    Some((vmap, dmap))
}

fn match_displacements(
    g: &TorusGraph,
    h: &TorusGraph,
    dmap: &[usize],
    mode: IsoMode,
) -> Option<([[i64; 2]; 2], Vec<Point>)> {
    // p_v, c_v: homology of the tree path to v in g and of its image in h.
    let n = g.num_vertices();
    let mut p = vec![None; n];
    let mut c = vec![[0, 0]; n];
    p[0] = Some([0, 0]);
    let mut tree = vec![false; g.num_darts()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &d in g.rotation(v) {
            let w = g.head(d);
            if p[w].is_none() {
                p[w] = Some(add(p[v].unwrap(), g.disp(d)));
                c[w] = add(c[v], h.disp(dmap[d]));
                tree[d] = true;
                tree[rev(d)] = true;
                queue.push_back(w);
            }
        }
    }
    let p: Vec<Point> = p.into_iter().map(|x| x.expect("connected")).collect();
    let cycles: Vec<(Point, Point)> = (0..g.num_darts())
        .filter(|&d| !tree[d])
        .map(|d| {
            let (t, hd) = (g.tail(d), g.head(d));
            (sub(add(g.disp(d), p[t]), p[hd]), sub(add(h.disp(dmap[d]), c[t]), c[hd]))
        })
        .collect();
    let a = match mode {
        IsoMode::Exact => [[1, 0], [0, 1]],
        IsoMode::Linear => {
            let (x1, y1) = *cycles.iter().find(|(x, _)| *x != [0, 0])?;
            let (x2, y2) = *cycles.iter().find(|(x, _)| cross(x1, *x) != 0)?;
            let det = cross(x1, x2);
            // A = Y X^{-1} with X = [x1 x2], Y = [y1 y2] as columns.
            let num = [
                [y1[0] * x2[1] - y2[0] * x1[1], y2[0] * x1[0] - y1[0] * x2[0]],
                [y1[1] * x2[1] - y2[1] * x1[1], y2[1] * x1[0] - y1[1] * x2[0]],
            ];
            if num.iter().flatten().any(|v| v % det != 0) {
                return None;
            }
            let a = [[num[0][0] / det, num[0][1] / det], [num[1][0] / det, num[1][1] / det]];
            if a[0][0] * a[1][1] - a[0][1] * a[1][0] != 1 {
                return None;
            }
            a
        }
    };
    if cycles.iter().any(|(x, y)| apply(&a, *x) != *y) {
        return None;
    }
    let shift = (0..n).map(|v| sub(c[v], apply(&a, p[v]))).collect();
    Some((a, shift))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{hex1, sq1};
    use super::*;

    #[test]
    fn self_isomorphism_is_identity_compatible() {
        for g in [sq1(), hex1()] {
            let iso = find_isomorphism(&g, &g, IsoMode::Exact).unwrap();
            assert!(check_isomorphism(&g, &g, &iso));
        }
    }

    #[test]
    fn sq1_and_hex1_are_not_isomorphic() {
        assert!(find_isomorphism(&sq1(), &hex1(), IsoMode::Linear).is_none());
    }

    #[test]
    fn shear_needs_linear_mode() {
        let g = sq1();
        let sheared = TorusGraph::new(
            1,
            vec![
                super::super::Edge { tail: 0, head: 0, disp: [1, 0] },
                super::super::Edge { tail: 0, head: 0, disp: [1, 1] },
            ],
            vec![vec![0, 2, 1, 3]],
        )
        .unwrap();
        assert!(find_isomorphism(&g, &sheared, IsoMode::Exact).is_none());
        let iso = find_isomorphism(&g, &sheared, IsoMode::Linear).unwrap();
        assert_eq!(iso.linear, [[1, 1], [0, 1]]);
        assert!(check_isomorphism(&g, &sheared, &iso));
    }
}
