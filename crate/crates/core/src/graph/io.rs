//! JSON graph format.
//!
//! ```json
//! {"vertices":[{"id":0,"pos":[0.5,0.5]}],
//!  "edges":[{"id":0,"tail":0,"head":0,"disp":[1,0],"conductance":"3/2"}],
//!  "rotation":{"0":[0,2,1,3]}}
//! ```
//!
//! Conductances are exact: strings such as `"3/2"`, `"0.25"` or `"1e-3"`, or JSON
//! numbers read through their shortest decimal form. A missing conductance is 1.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Conductances, Edge, GraphError, Network, TorusGraph};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub rotation: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub disp: [i64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductance: Option<Value>,
}

/// Parses an exact rational from `"p/q"`, a decimal such as `"-0.125"`, or scientific
/// notation such as `"2.5e-3"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    value = if scale >= 0 { value * factor } else { value / factor };
    Some(if neg { -value } else { value })
}

fn conductance_value(edge: usize, v: &Option<Value>) -> Result<BigRational, GraphError> {
    let bad = |value: String| GraphError::BadConductance { edge, value };
    let c = match v {
        None | Some(Value::Null) => BigRational::one(),
        Some(Value::String(s)) => parse_rational(s).ok_or_else(|| bad(s.clone()))?,
        Some(Value::Number(n)) => parse_rational(&n.to_string()).ok_or_else(|| bad(n.to_string()))?,
        Some(other) => return Err(bad(other.to_string())),
    };
    if c.is_zero() {
        return Err(bad("0".into()));
    }
    Ok(c)
}

impl NetworkJson {
    pub fn into_network(self) -> Result<Network, GraphError> {
        let nv = self.vertices.len();
        let mut positions = vec![None; nv];
        let mut seen = vec![false; nv];
        for v in &self.vertices {
            if v.id >= nv || std::mem::replace(&mut seen[v.id], true) {
                return Err(GraphError::Format(format!("vertex ids must be 0..{nv} without repeats, got {}", v.id)));
            }
            positions[v.id] = v.pos;
        }
        let ne = self.edges.len();
        let mut edges = vec![None; ne];
        let mut cond = vec![None; ne];
        for e in &self.edges {
            if e.id >= ne || edges[e.id].is_some() {
                return Err(GraphError::Format(format!("edge ids must be 0..{ne} without repeats, got {}", e.id)));
            }
            edges[e.id] = Some(Edge { tail: e.tail, head: e.head, disp: e.disp });
            cond[e.id] = Some(conductance_value(e.id, &e.conductance)?);
        }
        let mut rotation = vec![Vec::new(); nv];
        for (k, darts) in self.rotation {
            let v: usize = k
                .parse()
                .map_err(|_| GraphError::Format(format!("rotation key {k:?} is not a vertex id")))?;
            if v >= nv {
                return Err(GraphError::BadRotation { vertex: v, reason: "no such vertex".into() });
            }
            rotation[v] = darts;
        }
        let graph = TorusGraph::with_positions(
            nv,
            edges.into_iter().map(Option::unwrap).collect(),
            rotation,
            positions,
        )?;
        let conductance = Conductances::new(cond.into_iter().map(Option::unwrap).collect())?;
        Network::new(graph, conductance)
    }

    pub fn from_network(net: &Network) -> Self {
        let g = &net.graph;
        NetworkJson {
            vertices: (0..g.num_vertices()).map(|id| VertexJson { id, pos: g.position(id) }).collect(),
            edges: g
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeJson {
                    id,
                    tail: e.tail,
                    head: e.head,
                    disp: e.disp,
                    conductance: Some(Value::String(net.conductance.get(id).to_string())),
                })
                .collect(),
            rotation: (0..g.num_vertices()).map(|v| (v.to_string(), g.rotation(v).to_vec())).collect(),
        }
    }
}

impl Network {
    pub fn from_json_str(s: &str) -> Result<Network, GraphError> {
        let raw: NetworkJson = serde_json::from_str(s).map_err(|e| GraphError::Format(e.to_string()))?;
        raw.into_network()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&NetworkJson::from_network(self)).expect("network serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/2"), Some(r(3, 2)));
        assert_eq!(parse_rational("0.25"), Some(r(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(r(-3, 2)));
        assert_eq!(parse_rational("2.5e-3"), Some(r(1, 400)));
        assert_eq!(parse_rational("7"), Some(r(7, 1)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn json_roundtrip() {
        let src = r#"{"vertices":[{"id":0,"pos":[0.5,0.5]}],
            "edges":[{"id":0,"tail":0,"head":0,"disp":[1,0],"conductance":"3/2"},
                     {"id":1,"tail":0,"head":0,"disp":[0,1],"conductance":0.1}],
            "rotation":{"0":[0,2,1,3]}}"#;
        let net = Network::from_json_str(src).unwrap();
        assert_eq!(net.conductance.get(0), &r(3, 2));
        assert_eq!(net.conductance.get(1), &r(1, 10));
        assert_eq!(net.graph.position(0), Some([0.5, 0.5]));
        let again = Network::from_json_str(&net.to_json_string()).unwrap();
        assert_eq!(again, net);
    }

    #[test]
    fn json_errors() {
        let zero = r#"{"vertices":[{"id":0}],"edges":[{"id":0,"tail":0,"head":0,"disp":[1,0],"conductance":"0"},
            {"id":1,"tail":0,"head":0,"disp":[0,1]}],"rotation":{"0":[0,2,1,3]}}"#;
        assert!(matches!(Network::from_json_str(zero), Err(GraphError::BadConductance { edge: 0, .. })));
        assert!(matches!(Network::from_json_str("{"), Err(GraphError::Format(_))));
        let loop0 = r#"{"vertices":[{"id":0}],"edges":[{"id":0,"tail":0,"head":0,"disp":[0,0]}],"rotation":{"0":[0,1]}}"#;
        assert!(matches!(Network::from_json_str(loop0), Err(GraphError::NonTorusEuler { .. })));
    }
}
