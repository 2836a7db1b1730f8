//! Dimer covers of the superposition graph `Γ_G` and Temperley's bijection from dual
//! pairs of OCRSFs.
//!
//! Edges of `Γ_G` are oriented black → white, so a cover's homology relative to a
//! reference cover is the displacement sum over its edges minus the reference's.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::exec::Exec;
use crate::forests::DualPair;
use crate::graph::{edge_of, Conductances, SuperposedEdgeRole, Superposition, TorusGraph};
use crate::laurent::lattice::{add, sub, Point};

/// Backtracking stops accepting graphs with more vertices than this.
pub const DEFAULT_VERTEX_BOUND: usize = 96;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemperleyError {
    #[error("{vertices} vertices exceed the dimer enumeration bound {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("image of a dual pair is not a perfect matching: {0}")]
    NotAMatching(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DimerCover {
    /// Sorted edge ids of `Γ_G`.
    pub edges: Vec<usize>,
    #[serde(serialize_with = "crate::laurent::serialize_rational")]
    pub weight: BigRational,
}

impl DimerCover {
    pub fn new(edges: Vec<usize>, c: &Conductances) -> Self {
        let mut edges = edges;
        edges.sort_unstable();
        let weight = edges.iter().fold(BigRational::one(), |acc, &x| match Superposition::role_of(x) {
            (e, SuperposedEdgeRole::Tail | SuperposedEdgeRole::Head) => acc * c.get(e),
            _ => acc,
        });
        DimerCover { edges, weight }
    }

    /// Sum of black → white displacements over the matched edges.
    pub fn displacement_sum(&self, gamma: &TorusGraph) -> Point {
        self.edges.iter().fold([0, 0], |a, &x| add(a, gamma.edge(x).disp))
    }
}

/// All perfect matchings of a bipartite torus graph, as sorted edge lists.
pub fn perfect_matchings(
    g: &TorusGraph,
    is_black: impl Fn(usize) -> bool + Sync,
    bound: usize,
    exec: Exec,
) -> Result<Vec<Vec<usize>>, TemperleyError> {
    let n = g.num_vertices();
    if n > bound {
        return Err(TemperleyError::TooLarge { vertices: n, bound });
    }
    let blacks: Vec<usize> = (0..n).filter(|&v| is_black(v)).collect();
    if 2 * blacks.len() != n {
        return Ok(Vec::new());
    }
    // Incident edges of each black vertex with the white endpoint.
    let options: Vec<Vec<(usize, usize)>> = blacks
        .iter()
        .map(|&b| {
            let mut opts: Vec<(usize, usize)> = g
                .rotation(b)
                .iter()
                .map(|&d| (edge_of(d), g.head(d)))
                .filter(|&(_, w)| !is_black(w))
                .collect();
            opts.sort_unstable();
            opts.dedup();
            opts
        })
        .collect();
    let Some(first) = options.first() else {
        return Ok(vec![Vec::new()]);
    };
    let branches = exec.map_slice(first, |&(e, w)| {
        let mut used = vec![false; n];
        used[w] = true;
        let mut chosen = vec![e];
        let mut out = Vec::new();
        extend(&options, 1, &mut used, &mut chosen, &mut out);
        out
    });
    Ok(branches.into_iter().flatten().collect())
}

fn extend(options: &[Vec<(usize, usize)>], i: usize, used: &mut [bool], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if i == options.len() {
        let mut m = chosen.clone();
        m.sort_unstable();
        out.push(m);
        return;
    }
    for &(e, w) in &options[i] {
        if !used[w] {
            used[w] = true;
            chosen.push(e);
            extend(options, i + 1, used, chosen, out);
            chosen.pop();
            used[w] = false;
        }
    }
}

/// Dimer covers of `Γ_G` weighted by the network conductances.
pub fn enumerate_dimers(s: &Superposition, c: &Conductances, bound: usize, exec: Exec) -> Result<Vec<DimerCover>, TemperleyError> {
    let ms = perfect_matchings(&s.graph, |v| s.is_black(v), bound, exec)?;
    Ok(ms.into_iter().map(|m| DimerCover::new(m, c)).collect())
}

/// Temperley's map: the out-dart of each primal vertex and each face picks the white
/// vertex of the edge it crosses.
pub fn temperley_map(s: &Superposition, c: &Conductances, pair: &DualPair) -> Result<DimerCover, TemperleyError> {
    let mut edges = Vec::with_capacity(pair.primal.out.len() + pair.dual.out.len());
    for &d in &pair.primal.out {
        let role = if d & 1 == 0 { SuperposedEdgeRole::Tail } else { SuperposedEdgeRole::Head };
        edges.push(Superposition::edge_for(edge_of(d), role));
    }
    // Dual dart 2e leaves the right face of 2e.
    for &d in &pair.dual.out {
        let role = if d & 1 == 0 { SuperposedEdgeRole::RightFace } else { SuperposedEdgeRole::LeftFace };
        edges.push(Superposition::edge_for(edge_of(d), role));
    }
    let m = DimerCover::new(edges, c);
    check_matching(&s.graph, &m.edges)?;
    Ok(m)
}

fn check_matching(g: &TorusGraph, edges: &[usize]) -> Result<(), TemperleyError> {
    let mut seen = vec![false; g.num_vertices()];
    for &x in edges {
        let e = g.edge(x);
        for v in [e.tail, e.head] {
            if std::mem::replace(&mut seen[v], true) {
                return Err(TemperleyError::NotAMatching(format!("vertex {v} covered twice")));
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(v) => Err(TemperleyError::NotAMatching(format!("vertex {v} uncovered"))),
        None => Ok(()),
    }
}

/// Class of `ω_M − ω_{M₀}`.
pub fn dimer_homology(gamma: &TorusGraph, m: &DimerCover, m0: &DimerCover) -> Point {
    sub(m.displacement_sum(gamma), m0.displacement_sum(gamma))
}

/// The dual pair whose class is the lexicographically largest, used to anchor dimer
/// classes so that `[M_F] = [F]`.
pub fn reference_pair(pairs: &[DualPair]) -> Option<&DualPair> {
    pairs.iter().max_by(|a, b| a.class.cmp(&b.class).then_with(|| b.primal.dart_set().cmp(&a.primal.dart_set())))
}

/// Outcome of checking the bijection on one network.
#[derive(Debug, Clone, Serialize)]
pub struct TemperleyReport {
    pub dual_pairs: usize,
    pub dimers: usize,
    pub injective: bool,
    pub surjective: bool,
    pub weights_preserved: bool,
    pub classes_preserved: bool,
    /// Anchored dimer classes span the same polygon as the pair classes.
    pub polygon_equal: bool,
}

impl TemperleyReport {
    pub fn ok(&self) -> bool {
        self.injective && self.surjective && self.weights_preserved && self.classes_preserved && self.polygon_equal
    }
}

pub fn temperley_check(
    g: &TorusGraph,
    c: &Conductances,
    pairs: &[DualPair],
    bound: usize,
    exec: Exec,
) -> Result<TemperleyReport, TemperleyError> {
    use crate::laurent::NewtonPolygon;
    use std::collections::HashSet;

    let s = g.superpose();
    let dimers = enumerate_dimers(&s, c, bound, exec)?;
    let images = pairs.iter().map(|p| temperley_map(&s, c, p)).collect::<Result<Vec<_>, _>>()?;
    let image_set: HashSet<&DimerCover> = images.iter().collect();
    let dimer_set: HashSet<&DimerCover> = dimers.iter().collect();
    let weights_preserved = pairs.iter().zip(&images).all(|(p, m)| p.primal.weight(c) == m.weight);
    let (classes_preserved, polygon_equal) = match reference_pair(pairs) {
        Some(r) => {
            let m0 = temperley_map(&s, c, r)?;
            let anchored = |m: &DimerCover| add(dimer_homology(&s.graph, m, &m0), r.class);
            let classes = pairs.iter().zip(&images).all(|(p, m)| anchored(m) == p.class);
            let hull_pairs = NewtonPolygon::hull(pairs.iter().map(|p| p.class));
            let hull_dimers = NewtonPolygon::hull(dimers.iter().map(anchored));
            (classes, hull_pairs == hull_dimers)
        }
        None => (true, dimers.is_empty()),
    };
    Ok(TemperleyReport {
        dual_pairs: pairs.len(),
        dimers: dimers.len(),
        injective: image_set.len() == images.len(),
        surjective: image_set == dimer_set,
        weights_preserved,
        classes_preserved,
        polygon_equal,
    })
}
