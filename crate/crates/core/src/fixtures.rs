//! Bundled example networks.

use crate::graph::{GraphError, Network};

pub const SQ1: &str = include_str!("../../../fixtures/sq1.json");
pub const TRI1: &str = include_str!("../../../fixtures/tri1.json");
pub const HEX1: &str = include_str!("../../../fixtures/hex1.json");
pub const TRI2: &str = include_str!("../../../fixtures/tri2.json");
pub const SQ2: &str = include_str!("../../../fixtures/sq2.json");
pub const SQ22: &str = include_str!("../../../fixtures/sq22.json");
pub const HEX1_PROGRAM: &str = include_str!("../../../fixtures/hex1_program.json");
pub const CUBE_PROGRAM: &str = include_str!("../../../fixtures/tri2_cube.json");

/// Bundled networks by name.
pub const NETWORKS: [(&str, &str); 6] = [
    ("sq1", SQ1),
    ("tri1", TRI1),
    ("hex1", HEX1),
    ("tri2", TRI2),
    ("sq2", SQ2),
    ("sq22", SQ22),
];

pub fn network(name: &str) -> Result<Network, GraphError> {
    let src = NETWORKS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| GraphError::Format(format!("no bundled fixture named {name:?}")))?;
    Network::from_json_str(src)
}

pub fn sq1() -> Network {
    network("sq1").expect("bundled fixture")
}

pub fn tri1() -> Network {
    network("tri1").expect("bundled fixture")
}

pub fn hex1() -> Network {
    network("hex1").expect("bundled fixture")
}

pub fn tri2() -> Network {
    network("tri2").expect("bundled fixture")
}

pub fn sq2() -> Network {
    network("sq2").expect("bundled fixture")
}

pub fn sq22() -> Network {
    network("sq22").expect("bundled fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::{build_laplacian, charpoly};

    #[test]
    fn all_fixtures_validate() {
        for (name, _) in NETWORKS {
            let net = network(name).unwrap();
            assert_eq!(net.graph.report().euler_characteristic, 0, "{name}");
        }
        assert_eq!(tri2().graph.num_faces(), 4);
        assert_eq!(sq22().graph.num_faces(), 4);
    }

    #[test]
    fn genus_of_fixtures() {
        let g = |net: Network| {
            let p = charpoly(&build_laplacian(&net.graph, &net.conductance)).unwrap();
            p.newton_polygon().unwrap().divisor_degree()
        };
        assert_eq!(g(sq1()), 0);
        assert_eq!(g(tri1()), 0);
        assert_eq!(g(hex1()), 0);
        // Central symmetry forces an odd interior count, so g is even.
        assert_eq!(g(tri2()), 2);
        assert_eq!(g(sq2()), 2);
    }
}
