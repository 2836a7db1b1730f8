//! Points at infinity of the spectral curve (experimental).
//!
//! Along the tentacle in outward normal direction `n` of a polygon edge with primitive
//! direction `p`, only monomials on that edge survive, so the monomial `z^p` tends to
//! a root of the edge polynomial `Σ c_j s^j`. Each edge of lattice length `k` carries
//! `k` tentacles, one per oriented strand of class `p`. The limit is also estimated
//! independently by following the tentacle out to large radius.

use num_complex::Complex64;
use serde::Serialize;

use super::{newton_polish, polynomial_roots, NumPoly, SpectralError};
use crate::exec::Exec;
use crate::laurent::lattice::{add, dot, scale, Point};
use crate::laurent::LaurentPoly2;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Serialize)]
pub struct InfinityPoint {
    pub edge_start: Point,
    /// Primitive edge direction, equal to the class of the matching strands.
    pub edge_direction: Point,
    /// Outward normal; the tentacle escapes to infinity in this direction.
    pub direction: Point,
    /// Exponent of the monomial whose limit is reported (the edge direction).
    pub monomial: Point,
    /// Root of the edge polynomial.
    pub limit: Complex64,
    /// Value of the monomial on the curve far out along the tentacle.
    pub estimate: Complex64,
    /// Change of the estimate between the two largest radii.
    pub uncertainty: f64,
}

/// Log-radii at which the tentacle is sampled, each by Newton iteration from the limit.
const RADII: [f64; 3] = [10.0, 14.0, 18.0];

/// Integer `g` with `g · p = 1` for primitive `p`.
fn dual_vector(p: Point) -> Point {
    let (g, x, y) = ext_gcd(p[0], p[1]);
    debug_assert_eq!(g.abs(), 1);
    [x * g, y * g]
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub fn infinity_coordinates(p: &LaurentPoly2, exec: Exec) -> Result<Vec<InfinityPoint>, SpectralError> {
    let polygon = p.newton_polygon().map_err(|_| SpectralError::NonHarnack("zero polynomial".into()))?;
    let np = NumPoly::new(p);
    let mut jobs = Vec::new();
    for edge in polygon.edges() {
        let e = edge.primitive;
        let coeffs: Vec<Complex64> = (0..=edge.lattice_length)
            .map(|j| Complex64::new(p.coeff(add(edge.start, scale(e, j))).to_f64().unwrap_or(f64::NAN), 0.0))
            .collect();
        for s in polynomial_roots(&coeffs) {
            jobs.push((edge.start, e, s));
        }
    }
    // Coordinates (u, t) with z^m = u^{n·m} t^{g·m}; on the edge t = z^e.
    let follow = |&(start, e, limit): &(Point, Point, Complex64)| {
        let n = [e[1], -e[0]];
        let g = dual_vector(e);
        let q = np.map_exponents(|m| [dot(n, m), dot(g, m)]);
        let mut track = Vec::new();
        for r in RADII {
            let t = newton_polish(&q.w_coefficients(Complex64::new(r.exp(), 0.0)), limit);
            if t.is_finite() {
                track.push(t);
            }
        }
        if track.len() < 2 {
            return Err(SpectralError::NoConvergence(format!("tentacle {n:?} from edge at {start:?}")));
        }
        let (a, b) = (track[track.len() - 2], track[track.len() - 1]);
        Ok(InfinityPoint {
            edge_start: start,
            edge_direction: e,
            direction: n,
            monomial: e,
            limit,
            estimate: b,
            uncertainty: (b - a).norm(),
        })
    };
    exec.map_slice(&jobs, follow).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Network;
    use crate::laplacian::{build_laplacian, charpoly};
    use crate::zigzag::{sorted_classes, trace_strands};

    fn points(net: &Network) -> Vec<InfinityPoint> {
        let p = charpoly(&build_laplacian(&net.graph, &net.conductance)).unwrap();
        infinity_coordinates(&p, Exec::Sequential).unwrap()
    }

    #[test]
    fn sq1_directions_are_diagonal() {
        let net = fixtures::sq1();
        let pts = points(&net);
        let mut dirs: Vec<Point> = pts.iter().map(|x| x.direction).collect();
        dirs.sort();
        let mut classes = sorted_classes(&trace_strands(&net.graph));
        classes.sort();
        assert_eq!(dirs, classes);
        assert_eq!(dirs, vec![[-1, -1], [-1, 1], [1, -1], [1, 1]]);
        for x in &pts {
            assert!((x.limit + Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((x.estimate - x.limit).norm() < 1e-4, "{x:?}");
        }
    }

    #[test]
    fn one_tentacle_per_strand() {
        for net in [fixtures::hex1(), fixtures::tri1(), fixtures::tri2(), fixtures::sq2(), fixtures::sq22()] {
            let pts = points(&net);
            let mut a: Vec<Point> = pts.iter().map(|x| x.edge_direction).collect();
            let mut b = sorted_classes(&trace_strands(&net.graph));
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn limits_come_in_reciprocal_pairs() {
        let base = fixtures::tri2();
        let c = crate::graph::Conductances::new((0..base.graph.num_edges()).map(|k| crate::laurent::rat(k as i64 + 2, 3)).collect()).unwrap();
        let net = Network::new(base.graph, c).unwrap();
        let pts = points(&net);
        for x in &pts {
            // σ maps the tentacle with monomial z^e to the one with z^{-e}, where the
            // value of z^e is inverted.
            let partner = pts.iter().any(|y| y.monomial == [-x.monomial[0], -x.monomial[1]] && (y.limit - x.limit).norm() < 1e-9);
            assert!(partner, "{x:?}");
            assert!(x.uncertainty < 1e-2 * x.limit.norm().max(1.0), "{x:?}");
        }
    }
}
