//! Zig-zag strands: tracing, crossing counts, the polygon they bound, and fans.
//!
//! A state `(d, turn)` means the strand traverses dart `d` and then turns at
//! `head(d)`. A right turn leaves along `succ(rev d)`, the first dart counterclockwise
//! after the way back; a left turn along `pred(rev d)`. Turns alternate.
//! The reverse of state `(d, t)` is `(rev d, t)`.

mod fan;

pub use fan::{fans, FanSelection, Fans, GlobalCone, LocalFan};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{edge_of, rev, TorusGraph};
use crate::laurent::lattice::{add, cmp_angle, cross, same_direction, Point};
use crate::laurent::NewtonPolygon;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZigZagError {
    #[error("strand classes sum to {sum:?}, not zero; the boundary does not close")]
    NonClosingBoundary { sum: Point },
    #[error("strand polygon is not centrally symmetric about a lattice point")]
    NotCentrallySymmetric,
    #[error("graph has no strands with nonzero homology")]
    Degenerate,
    #[error("vertex {vertex}: global cone {cone} lies in no single local cone")]
    AmbiguousCone { vertex: usize, cone: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Turn {
    Right,
    Left,
}

impl Turn {
    pub fn flip(self) -> Turn {
        match self {
            Turn::Right => Turn::Left,
            Turn::Left => Turn::Right,
        }
    }

    fn bit(self) -> usize {
        match self {
            Turn::Right => 0,
            Turn::Left => 1,
        }
    }
}

/// Index of state `(d, t)` in the flat state space of size `2 · num_darts`.
#[inline]
pub fn state_index(d: usize, t: Turn) -> usize {
    2 * d + t.bit()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZigZagStrand {
    pub id: usize,
    pub states: Vec<(usize, Turn)>,
    pub homology: Point,
    /// Id of the strand traversing the same darts backwards.
    pub reverse: usize,
}

impl ZigZagStrand {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn darts(&self) -> impl Iterator<Item = usize> + '_ {
        self.states.iter().map(|s| s.0)
    }
}

/// All strands, with the strand id of every state.
#[derive(Debug, Clone)]
pub struct StrandSet {
    pub strands: Vec<ZigZagStrand>,
    state_strand: Vec<usize>,
    state_pos: Vec<usize>,
}

impl StrandSet {
    pub fn strand_of(&self, d: usize, t: Turn) -> usize {
        self.state_strand[state_index(d, t)]
    }

    /// Position of state `(d, t)` along its strand.
    pub fn position_of(&self, d: usize, t: Turn) -> usize {
        self.state_pos[state_index(d, t)]
    }

    pub fn len(&self) -> usize {
        self.strands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strands.is_empty()
    }

    pub fn classes(&self) -> Vec<Point> {
        self.strands.iter().map(|s| s.homology).collect()
    }

    /// Representative id of the unoriented strand containing `s`.
    pub fn unoriented(&self, s: usize) -> usize {
        s.min(self.strands[s].reverse)
    }

    /// Strand turning right at `v` through the corner between `rotation(v)[i]`
    /// and `rotation(v)[i+1]`.
    pub fn right_strand_at_corner(&self, g: &TorusGraph, v: usize, i: usize) -> usize {
        self.strand_of(rev(g.rotation(v)[i]), Turn::Right)
    }

    /// Strand turning left at `v` through the same corner.
    pub fn left_strand_at_corner(&self, g: &TorusGraph, v: usize, i: usize) -> usize {
        let rot = g.rotation(v);
        self.strand_of(rev(rot[(i + 1) % rot.len()]), Turn::Left)
    }
}

/// Next state along a strand.
#[inline]
pub fn step(g: &TorusGraph, d: usize, t: Turn) -> (usize, Turn) {
    let back = rev(d);
    let next = match t {
        Turn::Right => g.succ(back),
        Turn::Left => g.pred(back),
    };
    (next, t.flip())
}

/// Traces every strand. Strand ids follow the order of the first unvisited state.
pub fn trace_strands(g: &TorusGraph) -> StrandSet {
    let ns = 2 * g.num_darts();
    let mut state_strand = vec![usize::MAX; ns];
    let mut state_pos = vec![0; ns];
    let mut strands = Vec::new();
    for d0 in 0..g.num_darts() {
        for t0 in [Turn::Right, Turn::Left] {
            if state_strand[state_index(d0, t0)] != usize::MAX {
                continue;
            }
            let id = strands.len();
            let mut states = Vec::new();
            let (mut d, mut t) = (d0, t0);
            loop {
                state_strand[state_index(d, t)] = id;
                state_pos[state_index(d, t)] = states.len();
                states.push((d, t));
                (d, t) = step(g, d, t);
                if (d, t) == (d0, t0) {
                    break;
                }
            }
            let homology = states.iter().fold([0, 0], |acc, &(d, _)| add(acc, g.disp(d)));
            strands.push(ZigZagStrand { id, states, homology, reverse: usize::MAX });
        }
    }
    for s in 0..strands.len() {
        let (d, t) = strands[s].states[0];
        strands[s].reverse = state_strand[state_index(rev(d), t)];
    }
    StrandSet { strands, state_strand, state_pos }
}

/// Crossing counts between unoriented strands, measured at edge midpoints.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    /// One entry per unoriented strand: `(representative id, class, self crossings)`.
    pub self_crossings: Vec<(usize, Point, usize)>,
    /// `(a, b, crossings, |det|)` for each unordered pair of unoriented strands.
    pub pair_crossings: Vec<(usize, usize, usize, i64)>,
    pub minimal: bool,
}

/// Counts crossings on the torus. Each edge is crossed by exactly two unoriented
/// strand passages, `{(2e,R),(2e+1,R)}` and `{(2e,L),(2e+1,L)}`, which meet once at
/// the midpoint. Taut curves in classes `a`, `b` meet `|det(a, b)|` times.
pub fn minimality_check(g: &TorusGraph, strands: &StrandSet) -> MinimalityReport {
    let reps: Vec<usize> = (0..strands.len()).filter(|&s| strands.unoriented(s) == s).collect();
    let slot = |s: usize| reps.binary_search(&strands.unoriented(s)).expect("representative");
    let n = reps.len();
    let mut counts = vec![vec![0usize; n]; n];
    for e in 0..g.num_edges() {
        let a = slot(strands.strand_of(2 * e, Turn::Right));
        let b = slot(strands.strand_of(2 * e, Turn::Left));
        counts[a.min(b)][a.max(b)] += 1;
    }
    let class = |i: usize| strands.strands[reps[i]].homology;
    let self_crossings: Vec<_> = (0..n).map(|i| (reps[i], class(i), counts[i][i])).collect();
    let mut pair_crossings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pair_crossings.push((reps[i], reps[j], counts[i][j], cross(class(i), class(j)).abs()));
        }
    }
    let minimal = self_crossings.iter().all(|s| s.2 == 0)
        && pair_crossings.iter().all(|p| p.2 as i64 == p.3)
        && (0..n).all(|i| class(i) != [0, 0]);
    MinimalityReport { self_crossings, pair_crossings, minimal }
}

/// Strand classes sorted counterclockwise by angle; equal directions stay adjacent.
pub fn sorted_classes(strands: &StrandSet) -> Vec<Point> {
    let mut classes: Vec<Point> = strands.classes().into_iter().filter(|c| *c != [0, 0]).collect();
    classes.sort_by(|a, b| cmp_angle(*a, *b).then(a.cmp(b)));
    classes
}

/// Polygon whose boundary, traversed counterclockwise, is the concatenation of all
/// oriented strand classes in angular order, translated to be symmetric about 0.
pub fn zigzag_polygon(strands: &StrandSet) -> Result<NewtonPolygon, ZigZagError> {
    let classes = sorted_classes(strands);
    if classes.is_empty() {
        return Err(ZigZagError::Degenerate);
    }
    let sum = classes.iter().fold([0, 0], |a, c| add(a, *c));
    if sum != [0, 0] {
        return Err(ZigZagError::NonClosingBoundary { sum });
    }
    let mut pts = Vec::with_capacity(classes.len());
    let mut p = [0, 0];
    for c in &classes {
        pts.push(p);
        p = add(p, *c);
    }
    let poly = NewtonPolygon::from_ccw_vertices(pts);
    let vs = poly.vertices();
    let lo = *vs.iter().min().unwrap();
    let hi = *vs.iter().max().unwrap();
    let twice_center = add(lo, hi);
    if twice_center[0] % 2 != 0 || twice_center[1] % 2 != 0 {
        return Err(ZigZagError::NotCentrallySymmetric);
    }
    let centered = poly.translate([-twice_center[0] / 2, -twice_center[1] / 2]);
    if !centered.is_centrally_symmetric() {
        return Err(ZigZagError::NotCentrallySymmetric);
    }
    Ok(centered)
}

/// Distinct primitive directions among strand classes, counterclockwise, each with
/// the oriented strands of that direction.
pub fn families(strands: &StrandSet) -> Vec<(Point, Vec<usize>)> {
    let mut ids: Vec<usize> = (0..strands.len()).filter(|&s| strands.strands[s].homology != [0, 0]).collect();
    ids.sort_by(|&a, &b| {
        cmp_angle(strands.strands[a].homology, strands.strands[b].homology).then(a.cmp(&b))
    });
    let mut out: Vec<(Point, Vec<usize>)> = Vec::new();
    for s in ids {
        let c = crate::laurent::lattice::primitive(strands.strands[s].homology);
        match out.last_mut() {
            Some((dir, members)) if same_direction(*dir, c) => members.push(s),
            _ => out.push((c, vec![s])),
        }
    }
    out
}

/// 1-chain that is `+1` on each dart a strand traverses, as a map dart → multiplicity.
pub fn strand_chain(g: &TorusGraph, strand: &ZigZagStrand) -> Vec<i64> {
    let mut chain = vec![0i64; g.num_edges()];
    for d in strand.darts() {
        chain[edge_of(d)] += if d & 1 == 0 { 1 } else { -1 };
    }
    chain
}

#[cfg(test)]
mod tests {
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

    // Independent oracle: follow the transition function from every state with a
    // visited set, collecting orbit classes as a sorted multiset.
    fn orbit_classes(g: &TorusGraph) -> Vec<Point> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for d in 0..g.num_darts() {
            for t in [Turn::Right, Turn::Left] {
                if seen.contains(&(d, t)) {
                    continue;
                }
                let mut h = [0, 0];
                let mut s = (d, t);
                while seen.insert(s) {
                    h = add(h, g.disp(s.0));
                    s = step(g, s.0, s.1);
                }
                out.push(h);
            }
        }
        out.sort();
        out
    }

    fn classes_sorted(s: &StrandSet) -> Vec<Point> {
        let mut c = s.classes();
        c.sort();
        c
    }

    #[test]
    fn sq1_strands_are_diagonal() {
        let g = sq1();
        let s = trace_strands(&g);
        assert_eq!(s.len(), 4);
        assert_eq!(classes_sorted(&s), vec![[-1, -1], [-1, 1], [1, -1], [1, 1]]);
        assert_eq!(classes_sorted(&s), orbit_classes(&g));
    }

    #[test]
    fn hex1_strands() {
        let g = hex1();
        let s = trace_strands(&g);
        assert_eq!(s.len(), 6);
        assert_eq!(classes_sorted(&s), vec![[-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0]]);
        assert_eq!(classes_sorted(&s), orbit_classes(&g));
    }

    #[test]
    fn reversal_closure() {
        for g in [sq1(), hex1()] {
            let s = trace_strands(&g);
            for st in &s.strands {
                let r = &s.strands[st.reverse];
                assert_eq!(r.reverse, st.id);
                assert_eq!(add(r.homology, st.homology), [0, 0]);
                assert_eq!(r.len(), st.len());
            }
            let total: usize = s.strands.iter().map(|x| x.len()).sum();
            assert_eq!(total, 2 * g.num_darts());
        }
    }

    #[test]
    fn fixtures_are_minimal() {
        for g in [sq1(), hex1()] {
            let s = trace_strands(&g);
            let rep = minimality_check(&g, &s);
            assert!(rep.minimal, "{rep:?}");
        }
        let s = trace_strands(&sq1());
        let rep = minimality_check(&sq1(), &s);
        assert!(rep.pair_crossings.iter().any(|p| p.2 == 2 && p.3 == 2));
    }

    #[test]
    fn subdivided_square_is_not_minimal() {
        // Loop (1,0) split into 0 -> 1 -> 0 through a degree-2 vertex.
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
        let s = trace_strands(&g);
        assert!(!minimality_check(&g, &s).minimal);
    }

    #[test]
    fn polygons_from_strands() {
        let sq = zigzag_polygon(&trace_strands(&sq1())).unwrap();
        assert_eq!(sq.vertices(), &[[-1, 0], [0, -1], [1, 0], [0, 1]]);
        let hex = zigzag_polygon(&trace_strands(&hex1())).unwrap();
        assert_eq!(hex, NewtonPolygon::hull([[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]]).unwrap());
    }

    #[test]
    fn families_group_parallel_strands() {
        let f = families(&trace_strands(&hex1()));
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|(_, m)| m.len() == 1));
        assert_eq!(f[0].0, [1, 0]);
    }
}
