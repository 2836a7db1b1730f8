//! Oriented cycle-rooted spanning forests (OCRSFs): enumeration, the forest expansion
//! of `det Δ`, dual pairs, and extremal/external forests built from zig-zag fans.
//!
//! An OCRSF is stored as one outgoing dart per vertex: cycle edges follow the cycle
//! orientation and tree edges point toward the cycle of their component.

mod external;

pub use external::{extremal_ocrsf, external_ocrsf, family_of_edge};

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::exec::Exec;
use crate::graph::{edge_of, rev, Conductances, TorusGraph};
use crate::laurent::lattice::{add, Point};
use crate::laurent::LaurentPoly2;
use crate::zigzag::ZigZagError;

pub const DEFAULT_EDGE_BOUND: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("{edges} edges exceed the enumeration bound {bound}")]
    TooManyEdges { edges: usize, bound: usize },
    #[error("{0:?} is not a vertex of the polygon")]
    NotAPolygonVertex(Point),
    #[error("{0:?} does not start a boundary edge of the polygon")]
    NotAPolygonEdge(Point),
    #[error("strand {0} is not in the family of the chosen polygon edge")]
    StrandNotOnEdgeFamily(usize),
    #[error("constructed chain is not an OCRSF: {0}")]
    NotAnOcrsf(String),
    #[error("half-integral dual pair class {0:?}/2")]
    HalfIntegralClass(Point),
    #[error(transparent)]
    FanAmbiguity(#[from] ZigZagError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Ocrsf {
    /// Outgoing dart at each vertex.
    pub out: Vec<usize>,
    /// Each cycle as its dart sequence.
    pub cycles: Vec<Vec<usize>>,
    pub cycle_classes: Vec<Point>,
}

impl Ocrsf {
    /// Sum of the cycle classes.
    pub fn class(&self) -> Point {
        self.cycle_classes.iter().fold([0, 0], |a, c| add(a, *c))
    }

    pub fn edge_mask(&self) -> u64 {
        self.out.iter().fold(0u64, |m, &d| m | (1 << edge_of(d)))
    }

    pub fn weight(&self, c: &Conductances) -> BigRational {
        self.out.iter().fold(BigRational::one(), |acc, &d| acc * c.get(edge_of(d)))
    }

    /// True if every cycle is non-contractible.
    pub fn is_essential(&self) -> bool {
        self.cycle_classes.iter().all(|c| *c != [0, 0])
    }

    /// Every vertex also has in-degree one, so the forest has no tree edges.
    pub fn is_union_of_cycles(&self, g: &TorusGraph) -> bool {
        let mut indeg = vec![0usize; self.out.len()];
        for &d in &self.out {
            indeg[g.head(d)] += 1;
        }
        indeg.iter().all(|&k| k == 1)
    }

    /// Sorted dart set, a canonical key.
    pub fn dart_set(&self) -> Vec<usize> {
        let mut v = self.out.clone();
        v.sort_unstable();
        v
    }

    /// `∏ (1 − m(η))` over cycles, times the weight.
    pub fn expansion_term(&self, c: &Conductances) -> LaurentPoly2 {
        let mut term = LaurentPoly2::constant(self.weight(c));
        for h in &self.cycle_classes {
            let factor = &LaurentPoly2::one() - &LaurentPoly2::monomial(BigRational::one(), *h);
            term = &term * &factor;
        }
        term
    }
}

/// Verifies that `out` (one dart leaving each vertex) is an OCRSF on distinct edges
/// and returns it with its cycles.
pub fn ocrsf_from_out(g: &TorusGraph, out: Vec<usize>) -> Result<Ocrsf, ForestError> {
    let n = g.num_vertices();
    if out.len() != n {
        return Err(ForestError::NotAnOcrsf(format!("{} darts for {n} vertices", out.len())));
    }
    let mut used = vec![false; g.num_edges()];
    for (v, &d) in out.iter().enumerate() {
        if g.tail(d) != v {
            return Err(ForestError::NotAnOcrsf(format!("dart {d} does not leave vertex {v}")));
        }
        if std::mem::replace(&mut used[edge_of(d)], true) {
            return Err(ForestError::NotAnOcrsf(format!("edge {} used twice", edge_of(d))));
        }
    }
    // Functional graph: every component has exactly one cycle.
    let mut state = vec![0u8; n];
    let mut cycles = Vec::new();
    for s in 0..n {
        let mut path = Vec::new();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = g.head(out[v]);
        }
        if state[v] == 1 {
            let start = path.iter().position(|&x| x == v).expect("on path");
            cycles.push(path[start..].iter().map(|&x| out[x]).collect::<Vec<_>>());
        }
        for x in path {
            state[x] = 2;
        }
    }
    let cycle_classes = cycles.iter().map(|c: &Vec<usize>| g.homology(c)).collect();
    Ok(Ocrsf { out, cycles, cycle_classes })
}

/// Unicyclic check by union-find. Returns false as soon as a component gets a
/// second cycle.
fn is_unicyclic_subset(g: &TorusGraph, mask: u64) -> bool {
    let n = g.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut cyclic = vec![false; n];
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize;
        m &= m - 1;
        let edge = g.edge(e);
        let (a, b) = (find(&mut parent, edge.tail), find(&mut parent, edge.head));
        if a == b {
            if cyclic[a] {
                return false;
            }
            cyclic[a] = true;
        } else {
            if cyclic[a] && cyclic[b] {
                return false;
            }
            parent[a] = b;
            cyclic[b] |= cyclic[a];
        }
    }
    true
}

/// All orientations of a unicyclic edge subset with `|V|` edges.
fn orient_subset(g: &TorusGraph, mask: u64) -> Vec<Ocrsf> {
    let n = g.num_vertices();
    let mut deg = vec![0usize; n];
    let mut alive = mask;
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize;
        m &= m - 1;
        deg[g.edge(e).tail] += 1;
        deg[g.edge(e).head] += 1;
    }
    // Strip leaves; what survives is the disjoint union of the cycles.
    let mut out = vec![usize::MAX; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if deg[v] != 1 {
            continue;
        }
        let d = g
            .rotation(v)
            .iter()
            .copied()
            .find(|&d| alive & (1 << edge_of(d)) != 0)
            .expect("leaf has an edge");
        alive &= !(1 << edge_of(d));
        out[v] = d;
        deg[v] = 0;
        let h = g.head(d);
        deg[h] -= 1;
        if deg[h] == 1 {
            stack.push(h);
        }
    }
    // Each remaining component is a cycle; walk it in its two directions.
    let mut cycle_starts: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    for v in 0..n {
        if out[v] != usize::MAX || seen[v] {
            continue;
        }
        let first = g
            .rotation(v)
            .iter()
            .copied()
            .find(|&d| alive & (1 << edge_of(d)) != 0)
            .expect("cycle vertex has an edge");
        let mut darts = vec![first];
        seen[v] = true;
        let mut d = first;
        loop {
            let h = g.head(d);
            if h == v {
                break;
            }
            seen[h] = true;
            let next = g
                .rotation(h)
                .iter()
                .copied()
                .find(|&x| alive & (1 << edge_of(x)) != 0 && x != rev(d))
                .expect("cycle continues");
            darts.push(next);
            d = next;
        }
        cycle_starts.push(darts);
    }
    let k = cycle_starts.len();
    let mut result = Vec::with_capacity(1 << k);
    for choice in 0u32..(1 << k) {
        let mut o = out.clone();
        for (i, cyc) in cycle_starts.iter().enumerate() {
            let forward = choice & (1 << i) == 0;
            for &d in cyc {
                let dd = if forward { d } else { rev(d) };
                o[g.tail(dd)] = dd;
            }
        }
        result.push(ocrsf_from_out(g, o).expect("oriented unicyclic subset"));
    }
    result
}

fn check_bound(g: &TorusGraph, bound: usize) -> Result<(), ForestError> {
    if g.num_edges() > bound.min(60) {
        return Err(ForestError::TooManyEdges { edges: g.num_edges(), bound });
    }
    Ok(())
}

/// Unicyclic subsets of `|V|` edges, as bitmasks, in increasing order.
fn unicyclic_masks(g: &TorusGraph, exec: Exec) -> Vec<u64> {
    let (n, e) = (g.num_vertices() as u32, g.num_edges());
    let total = 1usize << e;
    exec.flat_map_chunks(total, 1 << 14, |range| {
        range
            .map(|m| m as u64)
            .filter(|m| m.count_ones() == n && is_unicyclic_subset(g, *m))
            .collect()
    })
}

/// Every OCRSF, including those with contractible cycles (which contribute zero to
/// the determinant).
pub fn enumerate_all_ocrsfs(g: &TorusGraph, bound: usize, exec: Exec) -> Result<Vec<Ocrsf>, ForestError> {
    check_bound(g, bound)?;
    let masks = unicyclic_masks(g, exec);
    Ok(exec.map_slice(&masks, |&m| orient_subset(g, m)).into_iter().flatten().collect())
}

/// OCRSFs whose cycles are all non-contractible.
pub fn enumerate_ocrsfs(g: &TorusGraph, bound: usize, exec: Exec) -> Result<Vec<Ocrsf>, ForestError> {
    Ok(enumerate_all_ocrsfs(g, bound, exec)?.into_iter().filter(Ocrsf::is_essential).collect())
}

/// `Σ_γ wt(γ) ∏_η (1 − m(η))` over all OCRSFs.
pub fn pfnlap_sum(g: &TorusGraph, c: &Conductances, bound: usize, exec: Exec) -> Result<LaurentPoly2, ForestError> {
    let forests = enumerate_all_ocrsfs(g, bound, exec)?;
    let terms = exec.map_slice(&forests, |f| f.expansion_term(c));
    Ok(terms.iter().fold(LaurentPoly2::zero(), |mut acc, t| {
        acc += t;
        acc
    }))
}

/// An OCRSF on `G` with a crossing-free OCRSF on the dual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualPair {
    pub primal: Ocrsf,
    pub dual: Ocrsf,
    /// Half the sum of all cycle classes.
    pub class: Point,
}

/// All dual pairs. The dual forest must use exactly the dual edges of the primal
/// complement, so it is determined up to cycle orientations.
pub fn enumerate_dual_pairs(g: &TorusGraph, bound: usize, exec: Exec) -> Result<Vec<DualPair>, ForestError> {
    check_bound(g, bound)?;
    let dual = g.dual();
    let full = if g.num_edges() == 64 { u64::MAX } else { (1u64 << g.num_edges()) - 1 };
    let masks = unicyclic_masks(g, exec);
    let chunks = exec.map_slice(&masks, |&m| -> Result<Vec<DualPair>, ForestError> {
        let comp = full & !m;
        if !is_unicyclic_subset(&dual, comp) {
            return Ok(Vec::new());
        }
        let primals: Vec<Ocrsf> = orient_subset(g, m);
        if primals.iter().any(|p| !p.is_essential()) {
            return Ok(Vec::new());
        }
        let duals = orient_subset(&dual, comp);
        let mut out = Vec::with_capacity(primals.len() * duals.len());
        for p in &primals {
            for d in &duals {
                let twice = add(p.class(), d.class());
                if twice[0] % 2 != 0 || twice[1] % 2 != 0 {
                    return Err(ForestError::HalfIntegralClass(twice));
                }
                out.push(DualPair { primal: p.clone(), dual: d.clone(), class: [twice[0] / 2, twice[1] / 2] });
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::laplacian::{build_laplacian, charpoly};
    use crate::laurent::NewtonPolygon;

    fn classes(fs: &[Ocrsf]) -> Vec<Point> {
        let mut v: Vec<Point> = fs.iter().map(Ocrsf::class).collect();
        v.sort();
        v
    }

    #[test]
    fn sq1_forests() {
        let g = fixtures::sq1().graph;
        let fs = enumerate_ocrsfs(&g, DEFAULT_EDGE_BOUND, Exec::Sequential).unwrap();
        assert_eq!(fs.len(), 4);
        assert_eq!(classes(&fs), vec![[-1, 0], [0, -1], [0, 1], [1, 0]]);
    }

    #[test]
    fn hex1_forests() {
        let g = fixtures::hex1().graph;
        let fs = enumerate_ocrsfs(&g, DEFAULT_EDGE_BOUND, Exec::Parallel).unwrap();
        assert_eq!(fs.len(), 6);
        assert_eq!(classes(&fs), vec![[-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0]]);
        assert!(fs.iter().all(|f| f.is_union_of_cycles(&g)));
    }

    #[test]
    fn expansion_matches_determinant() {
        for net in [fixtures::sq1(), fixtures::hex1(), fixtures::tri1(), fixtures::tri2()] {
            let p = charpoly(&build_laplacian(&net.graph, &net.conductance)).unwrap();
            let s = pfnlap_sum(&net.graph, &net.conductance, DEFAULT_EDGE_BOUND, Exec::Parallel).unwrap();
            assert_eq!(p, s);
        }
    }

    #[test]
    fn sq1_dual_pairs() {
        let g = fixtures::sq1().graph;
        let pairs = enumerate_dual_pairs(&g, DEFAULT_EDGE_BOUND, Exec::Sequential).unwrap();
        assert_eq!(pairs.len(), 8);
        let hull = NewtonPolygon::hull(pairs.iter().map(|p| p.class)).unwrap();
        assert_eq!(hull.vertices(), &[[-1, 0], [0, -1], [1, 0], [0, 1]]);
        let with_x: Vec<Point> = pairs
            .iter()
            .filter(|p| p.primal.class() == [1, 0])
            .map(|p| p.class)
            .collect();
        assert_eq!(with_x.len(), 2);
        assert!(with_x.contains(&[1, 0]) && with_x.contains(&[0, 0]));
    }

    #[test]
    fn bound_is_enforced() {
        let g = fixtures::hex1().graph;
        assert_eq!(
            enumerate_ocrsfs(&g, 2, Exec::Sequential),
            Err(ForestError::TooManyEdges { edges: 3, bound: 2 })
        );
    }
}
