//! Extremal and external OCRSFs assembled from fan selections and strand chains.

use super::{ocrsf_from_out, ForestError, Ocrsf};
use crate::zigzag::strand_chain;
use crate::graph::{edge_of, TorusGraph};
use crate::laurent::lattice::{primitive, Point};
use crate::laurent::NewtonPolygon;
use crate::zigzag::{Fans, StrandSet};

/// The OCRSF `γ_σ` selected by the fan cone of polygon vertex `vertex`. It must be a
/// union of cycles with class `vertex`.
pub fn extremal_ocrsf(g: &TorusGraph, fans: &Fans, polygon: &NewtonPolygon, vertex: Point) -> Result<Ocrsf, ForestError> {
    if !polygon.is_vertex(vertex) {
        return Err(ForestError::NotAPolygonVertex(vertex));
    }
    let sel = fans
        .selection_for_vertex(vertex)
        .ok_or(ForestError::NotAPolygonVertex(vertex))?;
    let f = ocrsf_from_out(g, sel.outgoing.clone())?;
    if !sel.forward_equals_reverse() || !f.is_union_of_cycles(g) {
        return Err(ForestError::NotAnOcrsf(format!("selection at {vertex:?} is not a union of cycles")));
    }
    if f.class() != vertex {
        return Err(ForestError::NotAnOcrsf(format!("selection at {vertex:?} has class {:?}", f.class())));
    }
    Ok(f)
}

/// Strands whose class is parallel to the polygon edge leaving `v1` counterclockwise,
/// with that edge's primitive vector and lattice length.
pub fn family_of_edge(strands: &StrandSet, polygon: &NewtonPolygon, v1: Point) -> Result<(Point, i64, Vec<usize>), ForestError> {
    let edge = polygon.edge_from_vertex(v1).ok_or(ForestError::NotAPolygonEdge(v1))?;
    let members = (0..strands.len())
        .filter(|&s| {
            let h = strands.strands[s].homology;
            h != [0, 0] && primitive(h) == edge.primitive
        })
        .collect();
    Ok((edge.primitive, edge.lattice_length, members))
}

/// `γ_A = γ_{V₁} + Σ_{α∈A} ω_α` for the polygon edge leaving `v1`.
pub fn external_ocrsf(
    g: &TorusGraph,
    strands: &StrandSet,
    fans: &Fans,
    polygon: &NewtonPolygon,
    v1: Point,
    subset: &[usize],
) -> Result<Ocrsf, ForestError> {
    let (_, _, family) = family_of_edge(strands, polygon, v1)?;
    if let Some(&bad) = subset.iter().find(|s| !family.contains(s)) {
        return Err(ForestError::StrandNotOnEdgeFamily(bad));
    }
    let base = extremal_ocrsf(g, fans, polygon, v1)?;
    let mut chain = vec![0i64; g.num_edges()];
    let sign = |d: usize| if d & 1 == 0 { 1 } else { -1 };
    for &d in &base.out {
        chain[edge_of(d)] += sign(d);
    }
    for &s in subset {
        for (c, w) in chain.iter_mut().zip(strand_chain(g, &strands.strands[s])) {
            *c += w;
        }
    }
    let mut darts = Vec::new();
    for (e, &c) in chain.iter().enumerate() {
        match c {
            0 => {}
            1 => darts.push(2 * e),
            -1 => darts.push(2 * e + 1),
            _ => return Err(ForestError::NotAnOcrsf(format!("edge {e} has multiplicity {c}"))),
        }
    }
    let mut out = vec![usize::MAX; g.num_vertices()];
    for d in darts {
        let t = g.tail(d);
        if out[t] != usize::MAX {
            return Err(ForestError::NotAnOcrsf(format!("vertex {t} has two outgoing edges")));
        }
        out[t] = d;
    }
    if let Some(v) = out.iter().position(|&d| d == usize::MAX) {
        return Err(ForestError::NotAnOcrsf(format!("vertex {v} has no outgoing edge")));
    }
    let f = ocrsf_from_out(g, out)?;
    if !f.is_union_of_cycles(g) {
        return Err(ForestError::NotAnOcrsf("external chain is not a union of cycles".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::fixtures;
    use crate::forests::{enumerate_ocrsfs, DEFAULT_EDGE_BOUND};
    use crate::zigzag::{fans, trace_strands, zigzag_polygon};

    fn setup(g: &TorusGraph) -> (StrandSet, NewtonPolygon, Fans) {
        let s = trace_strands(g);
        let p = zigzag_polygon(&s).unwrap();
        let f = fans(g, &s, &p).unwrap();
        (s, p, f)
    }

    #[test]
    fn sq1_extremal_and_external() {
        let g = fixtures::sq1().graph;
        let (s, p, f) = setup(&g);
        let x = extremal_ocrsf(&g, &f, &p, [1, 0]).unwrap();
        assert_eq!(x.out, vec![0]);
        let empty = external_ocrsf(&g, &s, &f, &p, [1, 0], &[]).unwrap();
        assert_eq!(empty, x);
        let (prim, len, fam) = family_of_edge(&s, &p, [1, 0]).unwrap();
        assert_eq!((prim, len, fam.len()), ([-1, 1], 1, 1));
        let y = external_ocrsf(&g, &s, &f, &p, [1, 0], &fam).unwrap();
        assert_eq!(y.class(), [0, 1]);
        assert_eq!(y, extremal_ocrsf(&g, &f, &p, [0, 1]).unwrap());
        assert_eq!(extremal_ocrsf(&g, &f, &p, [0, 0]), Err(ForestError::NotAPolygonVertex([0, 0])));
    }

    #[test]
    fn hex1_extremal_is_two_cycle() {
        let g = fixtures::hex1().graph;
        let (_, p, f) = setup(&g);
        let x = extremal_ocrsf(&g, &f, &p, [1, 0]).unwrap();
        let mut edges: Vec<usize> = x.out.iter().map(|&d| edge_of(d)).collect();
        edges.sort();
        assert_eq!(edges, vec![0, 1]);
        assert_eq!(x.class(), [1, 0]);
    }

    #[test]
    fn extremal_forests_are_unique() {
        for net in [fixtures::sq1(), fixtures::hex1(), fixtures::tri1(), fixtures::sq2()] {
            let g = net.graph;
            let (_, p, f) = setup(&g);
            let all = enumerate_ocrsfs(&g, DEFAULT_EDGE_BOUND, Exec::Sequential).unwrap();
            for &v in p.vertices() {
                let x = extremal_ocrsf(&g, &f, &p, v).unwrap();
                let matching: Vec<&Ocrsf> = all.iter().filter(|o| o.class() == v).collect();
                assert_eq!(matching.len(), 1);
                assert_eq!(matching[0].dart_set(), x.dart_set());
            }
        }
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn external_forests_are_counted_by_binomials() {
        for net in [fixtures::sq2(), fixtures::tri2(), fixtures::sq22()] {
            let g = net.graph;
            let (s, p, f) = setup(&g);
            let all = enumerate_ocrsfs(&g, DEFAULT_EDGE_BOUND, Exec::Parallel).unwrap();
            for &v1 in p.vertices() {
                let (prim, len, fam) = family_of_edge(&s, &p, v1).unwrap();
                assert_eq!(fam.len() as i64, len);
                let mut built: Vec<Vec<usize>> = Vec::new();
                for mask in 0u32..1 << fam.len() {
                    let subset: Vec<usize> = (0..fam.len()).filter(|i| mask >> i & 1 == 1).map(|i| fam[i]).collect();
                    let x = external_ocrsf(&g, &s, &f, &p, v1, &subset).unwrap();
                    let k = subset.len() as i64;
                    assert_eq!(x.class(), [v1[0] + k * prim[0], v1[1] + k * prim[1]]);
                    built.push(x.dart_set());
                }
                built.sort();
                built.dedup();
                assert_eq!(built.len(), 1 << fam.len());
                for j in 0..=fam.len() {
                    let target = [v1[0] + j as i64 * prim[0], v1[1] + j as i64 * prim[1]];
                    let n = all.iter().filter(|o| o.class() == target).count();
                    assert_eq!(n, binomial(fam.len(), j), "class {target:?}");
                }
            }
        }
    }
}
