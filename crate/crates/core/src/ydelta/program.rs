//! Move programs: a move sequence plus a closing isomorphism, iterated as a
//! birational map on conductances.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{apply_move, YDeltaError};
use crate::graph::{all_isomorphisms, find_isomorphism, Conductances, IsoMode, Isomorphism, Network, TorusGraph};
use crate::laplacian::{build_laplacian, charpoly};
use crate::laurent::lattice::Point;
use crate::laurent::LaurentPoly2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum Move {
    #[serde(rename = "y2d")]
    YToDelta { vertex: usize },
    #[serde(rename = "d2y")]
    DeltaToY { face: usize },
}

/// Closing relabeling from the final graph onto the initial one, keyed by final ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoSpec {
    #[serde(default)]
    pub vertices: BTreeMap<String, usize>,
    #[serde(default)]
    pub edges: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveProgram {
    pub moves: Vec<Move>,
    /// When absent, the closing isomorphism is found automatically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso: Option<IsoSpec>,
    #[serde(default = "one")]
    pub steps: usize,
}

fn one() -> usize {
    1
}

impl MoveProgram {
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    /// Conductances on the initial graph after each step, starting with the input.
    pub conductances: Vec<Conductances>,
    /// `P` divided by its coefficient at `anchor`, per step.
    pub normalized: Vec<LaurentPoly2>,
    pub anchor: Point,
    /// The lexicographically largest polygon vertex had a zero coefficient.
    pub anchor_fallback: bool,
    pub conserved: bool,
}

fn matches_spec(iso: &Isomorphism, spec: &IsoSpec) -> bool {
    let ok_v = spec.vertices.iter().all(|(k, &v)| k.parse::<usize>().ok().and_then(|u| iso.vertex_map.get(u)) == Some(&v));
    let ok_e = spec.edges.iter().all(|(k, &e)| {
        k.parse::<usize>().ok().filter(|&x| 2 * x < iso.dart_map.len()).map(|x| iso.edge_image(x).0) == Some(e)
    });
    ok_v && ok_e
}

fn closing_iso(last: &TorusGraph, first: &TorusGraph, spec: Option<&IsoSpec>) -> Result<Isomorphism, YDeltaError> {
    let found = match spec {
        Some(spec) => all_isomorphisms(last, first, IsoMode::Exact).into_iter().find(|i| matches_spec(i, spec)),
        None if last == first => Some(identity(first)),
        None => find_isomorphism(last, first, IsoMode::Exact),
    };
    found.ok_or_else(|| YDeltaError::IsomorphismMismatch("final graph is not isomorphic to the initial one as specified".into()))
}

fn identity(g: &TorusGraph) -> Isomorphism {
    Isomorphism {
        vertex_map: (0..g.num_vertices()).collect(),
        dart_map: (0..g.num_darts()).collect(),
        linear: [[1, 0], [0, 1]],
        shift: vec![[0, 0]; g.num_vertices()],
    }
}

/// Iterates the program `steps` times (the program's own count when `None`).
pub fn run_program(net: &Network, program: &MoveProgram, steps: Option<usize>) -> Result<Trajectory, YDeltaError> {
    let steps = steps.unwrap_or(program.steps);
    let p0 = charpoly(&build_laplacian(&net.graph, &net.conductance))?;
    let polygon = p0.newton_polygon().map_err(crate::laplacian::LaplacianError::from)?;
    let mut verts = polygon.vertices().to_vec();
    verts.sort_unstable_by(|a, b| b.cmp(a));
    let anchor = *verts.iter().find(|v| !p0.coeff(**v).is_zero()).expect("polygon vertices carry nonzero coefficients");
    let anchor_fallback = anchor != verts[0];
    let normalize = |p: &LaurentPoly2| p.scale(&(num_rational::BigRational::from_integer(1.into()) / p.coeff(anchor)));

    let mut conductances = vec![net.conductance.clone()];
    let mut normalized = vec![normalize(&p0)];
    let mut iso: Option<Isomorphism> = None;
    let mut current = net.clone();
    for step in 1..=steps {
        let at = |e: YDeltaError| YDeltaError::AtStep { step, source: Box::new(e) };
        let mut g = current.clone();
        for mv in &program.moves {
            g = apply_move(&g, mv).map_err(at)?.0;
        }
        let phi = match &iso {
            Some(phi) => phi.clone(),
            None => closing_iso(&g.graph, &net.graph, program.iso.as_ref()).map_err(at)?,
        };
        let mut vals = vec![num_rational::BigRational::zero(); net.graph.num_edges()];
        for e in 0..g.graph.num_edges() {
            vals[phi.edge_image(e).0] = g.conductance.get(e).clone();
        }
        let c = Conductances::new(vals).map_err(|e| at(e.into()))?;
        current = Network::new(net.graph.clone(), c.clone()).map_err(|e| at(e.into()))?;
        let p = charpoly(&build_laplacian(&current.graph, &current.conductance)).map_err(|e| at(e.into()))?;
        if p.coeff(anchor).is_zero() {
            return Err(at(YDeltaError::SingularDenominator(format!("anchor coefficient at {anchor:?}"))));
        }
        normalized.push(normalize(&p));
        conductances.push(c);
        iso = Some(phi);
    }
    let conserved = normalized.windows(2).all(|w| w[0] == w[1]);
    Ok(Trajectory { conductances, normalized, anchor, anchor_fallback, conserved })
}
