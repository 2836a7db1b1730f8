//! Amoeba sampling and grid-based hole detection.
//!
//! A point `(x, y)` off the amoeba lies in the complement component whose order is
//! the pair of winding numbers of `P` around the torus `|z| = eˣ, |w| = eʸ`. Holes
//! are the components whose order is a nonzero interior point of the polygon.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::{fiber_roots, null_vectors, NumPoly, SpectralError};
use crate::exec::Exec;
use crate::laplacian::LaplacianMatrix;
use crate::laurent::lattice::{Containment, Point};
use crate::laurent::{LaurentPoly2, NewtonPolygon};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmoebaGrid {
    /// Samples of `log|z|` over `[-extent, extent]`.
    pub radial: usize,
    /// Phase samples of `z`.
    pub angular: usize,
    pub extent: f64,
    /// Cells per axis of the hole-detection grid.
    pub resolution: usize,
}

impl Default for AmoebaGrid {
    fn default() -> Self {
        AmoebaGrid { radial: 60, angular: 60, extent: 3.0, resolution: 60 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveSample {
    pub z: Complex64,
    pub w: Complex64,
    pub log_abs: [f64; 2],
    pub sigma_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmoebaReport {
    pub samples: Vec<CurveSample>,
    /// Fibers skipped as degenerate.
    pub skipped: usize,
    /// Orders of bounded complement components found on the grid.
    pub holes: Vec<Point>,
    /// Every component order realized on the grid.
    pub orders: Vec<Point>,
    pub grid: AmoebaGrid,
}

/// Winding number of `θ ↦ f(e^{iθ})`, or `None` if the loop passes too close to 0.
fn winding(f: impl Fn(Complex64) -> Complex64, steps: usize, floor: f64) -> Option<i64> {
    let mut total = 0.0;
    let mut prev = f(Complex64::new(1.0, 0.0));
    if prev.norm() <= floor {
        return None;
    }
    for k in 1..=steps {
        let cur = f(Complex64::from_polar(1.0, TAU * k as f64 / steps as f64));
        if cur.norm() <= floor {
            return None;
        }
        let d = (cur / prev).arg();
        if d.abs() > std::f64::consts::FRAC_PI_2 {
            return None;
        }
        total += d;
        prev = cur;
    }
    Some((total / TAU).round() as i64)
}

/// Order of the complement component containing `(x, y)`, if the point is clearly
/// off the amoeba.
pub fn component_order(p: &NumPoly, x: f64, y: f64) -> Option<Point> {
    const STEPS: usize = 96;
    let (rz, rw) = (x.exp(), y.exp());
    let floor = 1e-6 * p.abs_scale(Complex64::new(rz, 0.0), Complex64::new(rw, 0.0));
    let mut order = None;
    for phase in [0.0, 0.5 * TAU / 3.0, TAU / 3.0 + 0.3] {
        let wf = Complex64::from_polar(rw, phase);
        let zf = Complex64::from_polar(rz, phase);
        let oz = winding(|u| p.eval(u * rz, wf), STEPS, floor)?;
        let ow = winding(|u| p.eval(zf, u * rw), STEPS, floor)?;
        match order {
            None => order = Some([oz, ow]),
            Some(o) if o != [oz, ow] => return None,
            _ => {}
        }
    }
    order
}

/// Component orders realized on a square grid over `[-extent, extent]²`.
pub fn grid_orders(p: &NumPoly, extent: f64, resolution: usize, exec: Exec) -> BTreeSet<Point> {
    let n = resolution.max(2);
    let coord = |k: usize| -extent + 2.0 * extent * (k as f64 + 0.5) / n as f64;
    exec.map_range(n * n, |idx| component_order(p, coord(idx / n), coord(idx % n)))
        .into_iter()
        .flatten()
        .collect()
}

/// Nonzero interior lattice points of `polygon` among `orders`.
pub fn holes_among(orders: &BTreeSet<Point>, polygon: &NewtonPolygon) -> Vec<Point> {
    orders
        .iter()
        .copied()
        .filter(|&o| o != [0, 0] && polygon.contains(o) == Containment::Interior)
        .collect()
}

pub fn amoeba(p: &LaurentPoly2, l: &LaplacianMatrix, grid: AmoebaGrid, exec: Exec) -> Result<AmoebaReport, SpectralError> {
    let np = NumPoly::new(p);
    let polygon = p.newton_polygon().map_err(|_| SpectralError::NonHarnack("zero polynomial".into()))?;
    let (nr, na) = (grid.radial.max(2), grid.angular.max(1));
    let per_z = exec.map_range(nr * na, |idx| {
        let x = -grid.extent + 2.0 * grid.extent * (idx / na) as f64 / (nr - 1) as f64;
        let theta = TAU * ((idx % na) as f64 + 0.5) / na as f64;
        let z = Complex64::from_polar(x.exp(), theta);
        let Ok(roots) = fiber_roots(&np, z) else { return None };
        Some(
            roots
                .into_iter()
                .filter(|w| w.norm() > 0.0 && np.eval(z, *w).norm() <= 1e-9 * np.abs_scale(z, *w))
                .map(|w| {
                    let sigma_min = null_vectors(l, z, w, 0.0).map(|nv| nv.sigma_min).unwrap_or(f64::NAN);
                    CurveSample { z, w, log_abs: [z.norm().ln(), w.norm().ln()], sigma_min }
                })
                .collect::<Vec<_>>(),
        )
    });
    let skipped = per_z.iter().filter(|s| s.is_none()).count();
    let samples = per_z.into_iter().flatten().flatten().collect();
    let orders = grid_orders(&np, grid.extent, grid.resolution, exec);
    let holes = holes_among(&orders, &polygon);
    Ok(AmoebaReport { samples, skipped, holes, orders: orders.into_iter().collect(), grid })
}

pub fn to_csv(samples: &[CurveSample]) -> String {
    let mut out = String::from("z_re,z_im,w_re,w_im,log|z|,log|w|,sigma_min\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:e}",
            s.z.re, s.z.im, s.w.re, s.w.im, s.log_abs[0], s.log_abs[1], s.sigma_min
        );
    }
    out
}

/// Scatter plot of the amoeba with `marks` drawn as red dots.
pub fn to_svg(samples: &[CurveSample], marks: &[[f64; 2]]) -> String {
    const SIZE: f64 = 600.0;
    let pts = samples.iter().map(|s| s.log_abs).chain(marks.iter().copied());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let map = |p: [f64; 2]| (10.0 + (p[0] - lo[0]) / span * (SIZE - 20.0), SIZE - 10.0 - (p[1] - lo[1]) / span * (SIZE - 20.0));
    let mut out = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    out.push_str("\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for s in samples {
        let (x, y) = map(s.log_abs);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="0.8" fill="black"/>"#);
    }
    for &m in marks {
        let (x, y) = map(m);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="red"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::laplacian::{build_laplacian, charpoly};

    fn poly(net: &crate::graph::Network) -> (LaurentPoly2, LaplacianMatrix) {
        let l = build_laplacian(&net.graph, &net.conductance);
        (charpoly(&l).unwrap(), l)
    }

    #[test]
    fn sq1_has_no_holes() {
        let (p, l) = poly(&fixtures::sq1());
        let grid = AmoebaGrid { radial: 12, angular: 12, extent: 3.0, resolution: 30 };
        let r = amoeba(&p, &l, grid, Exec::Parallel).unwrap();
        assert!(r.holes.is_empty());
        let b: BTreeSet<Point> = r.orders.iter().copied().collect();
        assert_eq!(b, BTreeSet::from([[-1, 0], [0, -1], [0, 1], [1, 0]]));
    }

    #[test]
    fn point_reflection_symmetry() {
        let (p, l) = poly(&fixtures::tri2());
        let grid = AmoebaGrid { radial: 9, angular: 8, extent: 2.0, resolution: 4 };
        let r = amoeba(&p, &l, grid, Exec::Sequential).unwrap();
        let np = NumPoly::new(&p);
        for s in &r.samples {
            let (z, w) = (s.z.inv(), s.w.inv());
            assert!(np.eval(z, w).norm() <= 1e-8 * np.abs_scale(z, w));
        }
    }

    #[test]
    fn tri2_holes_match_genus() {
        let (p, _) = poly(&fixtures::tri2());
        let np = NumPoly::new(&p);
        let polygon = p.newton_polygon().unwrap();
        let holes = holes_among(&grid_orders(&np, 3.0, 80, Exec::Parallel), &polygon);
        assert_eq!(holes.len() as i64, polygon.divisor_degree(), "{holes:?}");
    }

    #[test]
    fn csv_header() {
        assert!(to_csv(&[]).starts_with("z_re,z_im,w_re,w_im,log|z|,log|w|,sigma_min"));
        assert!(to_svg(&[], &[[0.0, 0.0]]).contains("<circle"));
    }
}
