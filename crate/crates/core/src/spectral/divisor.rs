//! The spectral divisor on the real ovals of a Harnack curve.
//!
//! `Q = adj Δ[v₀, v₀] = U_{v₀} V_{v₀}` vanishes on the curve exactly at `S + σ(S)`.
//! Real zeros of `Q` are bracketed along the real curve in each sign quadrant, refined
//! by Newton's method on `(P, Q)`, and split by which null vector has a vanishing
//! `v₀` component.

use num_complex::Complex64;
use num_traits::Signed;
use serde::Serialize;

use super::amoeba::component_order;
use super::{fiber_roots, null_vectors, NumPoly, SpectralError};
use crate::exec::Exec;
use crate::graph::Network;
use crate::laplacian::{build_laplacian, charpoly, principal_minor, LaplacianMatrix};
use crate::laurent::lattice::{Containment, Point};
use crate::laurent::NewtonPolygon;

#[derive(Debug, Clone, Serialize)]
pub struct DivisorOptions {
    /// Samples per real sweep.
    pub grid: usize,
    /// Bound on the normalized `v₀` component and on `|Q|` residuals.
    pub tol: f64,
    /// Sign quadrants `(sign z, sign w)` to sweep.
    pub quadrants: Vec<[i8; 2]>,
    /// Sweeps cover `log|z|, log|w| ∈ [-extent, extent]`.
    pub extent: f64,
    /// Points this close to `(1, 1)` in log coordinates are ignored.
    pub node_radius: f64,
}

impl Default for DivisorOptions {
    fn default() -> Self {
        DivisorOptions {
            grid: 800,
            tol: 1e-9,
            quadrants: vec![[1, 1], [1, -1], [-1, 1], [-1, -1]],
            extent: 4.0,
            node_radius: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorPoint {
    pub z: f64,
    pub w: f64,
    pub log_abs: [f64; 2],
    /// `|V_{v₀}|` for unit `V` (for points of `σ(S)`, `|U_{v₀}|`).
    pub component: f64,
    /// `|Q| / Σ|terms|` here and at the σ-image.
    pub q_residual: f64,
    pub q_sigma_residual: f64,
    /// Hole whose boundary the point lies on, found by probing nearby orders.
    pub hole: Option<Point>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorReport {
    pub v0: usize,
    /// `g`, the number of nonzero interior lattice points.
    pub expected: usize,
    pub points: Vec<DivisorPoint>,
    /// Zeros of the kernel component, expected to be `σ(S)`.
    pub sigma_points: Vec<DivisorPoint>,
    /// Sign changes of `Q` found along the sweeps, before deduplication.
    pub brackets: usize,
}

impl DivisorReport {
    pub fn count_ok(&self) -> bool {
        self.points.len() == self.expected
    }

    /// Count, residual, `Q`-vanishing and hole-boundary checks all pass.
    pub fn all_ok(&self, tol: f64) -> bool {
        self.count_ok()
            && self.points.iter().all(|p| {
                p.component <= tol && p.q_residual <= tol && p.q_sigma_residual <= tol && p.hole.is_some()
            })
    }
}

/// Real roots of `P(x, ·)` of sign `sign`, ascending.
fn real_roots(p: &NumPoly, x: f64, sign: f64) -> Option<Vec<f64>> {
    let roots = fiber_roots(p, Complex64::new(x, 0.0)).ok()?;
    let mut out: Vec<f64> = roots
        .into_iter()
        .filter(|r| r.im.abs() <= 1e-7 * r.norm().max(1e-300) && r.re * sign > 0.0)
        .map(|r| r.re)
        .collect();
    out.sort_by(f64::total_cmp);
    Some(out)
}

/// Brackets of sign changes of `q` along real branches of `p = 0`, parametrized by
/// the first variable. Returned as pairs of real points.
fn sweep(p: &NumPoly, q: &NumPoly, quadrant: [i8; 2], opts: &DivisorOptions, exec: Exec) -> Vec<([f64; 2], [f64; 2])> {
    let (sx, sy) = (quadrant[0] as f64, quadrant[1] as f64);
    let n = opts.grid.max(2);
    let xs: Vec<f64> = (0..n).map(|k| sx * (-opts.extent + 2.0 * opts.extent * k as f64 / (n - 1) as f64).exp()).collect();
    let fibers = exec.map_slice(&xs, |&x| real_roots(p, x, sy));
    let qv = |x: f64, y: f64| q.eval(Complex64::new(x, 0.0), Complex64::new(y, 0.0)).re;
    let mut out = Vec::new();
    for k in 0..n - 1 {
        let (Some(a), Some(b)) = (&fibers[k], &fibers[k + 1]) else { continue };
        if a.len() != b.len() {
            continue;
        }
        for (ya, yb) in a.iter().zip(b) {
            if qv(xs[k], *ya).signum() != qv(xs[k + 1], *yb).signum() {
                out.push(([xs[k], *ya], [xs[k + 1], *yb]));
            }
        }
    }
    out
}

/// Newton's method for the real system `P = Q = 0`.
fn refine(p: &NumPoly, q: &NumPoly, start: [f64; 2]) -> Option<[f64; 2]> {
    let mut x = start;
    for _ in 0..80 {
        let (z, w) = (Complex64::new(x[0], 0.0), Complex64::new(x[1], 0.0));
        let (fp, fq) = (p.eval(z, w).re, q.eval(z, w).re);
        let (pz, pw) = p.gradient(z, w);
        let (qz, qw) = q.gradient(z, w);
        let det = pz.re * qw.re - pw.re * qz.re;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (fp * qw.re - pw.re * fq) / det;
        let dy = (pz.re * fq - fp * qz.re) / det;
        x = [x[0] - dx, x[1] - dy];
        if dx.abs() + dy.abs() <= 1e-15 * (x[0].abs() + x[1].abs()) {
            break;
        }
    }
    x.iter().all(|v| v.is_finite() && *v != 0.0).then_some(x)
}

fn relative(p: &NumPoly, z: f64, w: f64) -> f64 {
    let (z, w) = (Complex64::new(z, 0.0), Complex64::new(w, 0.0));
    p.eval(z, w).norm() / p.abs_scale(z, w)
}

/// Nonzero interior order found just off `a` in log coordinates.
fn adjacent_hole(p: &NumPoly, polygon: &NewtonPolygon, a: [f64; 2]) -> Option<Point> {
    for r in [1e-3, 3e-3, 1e-2, 3e-2] {
        for k in 0..24 {
            let t = std::f64::consts::TAU * k as f64 / 24.0;
            if let Some(o) = component_order(p, a[0] + r * t.cos(), a[1] + r * t.sin()) {
                if o != [0, 0] && polygon.contains(o) == Containment::Interior {
                    return Some(o);
                }
            }
        }
    }
    None
}

pub fn spectral_divisor(net: &Network, v0: usize, opts: &DivisorOptions, exec: Exec) -> Result<DivisorReport, SpectralError> {
    let g = &net.graph;
    if g.num_vertices() < 2 {
        return Err(SpectralError::SingleVertex);
    }
    if v0 >= g.num_vertices() {
        return Err(SpectralError::VertexOutOfRange(v0));
    }
    if net.conductance.values().iter().any(|c| !c.is_positive()) {
        return Err(SpectralError::NonHarnack("conductances must be positive".into()));
    }
    let l: LaplacianMatrix = build_laplacian(g, &net.conductance);
    let pe = charpoly(&l)?;
    let polygon = pe.newton_polygon().map_err(|_| SpectralError::NonHarnack("zero polynomial".into()))?;
    let expected = polygon.divisor_degree().max(0) as usize;
    let p = NumPoly::new(&pe);
    let q = NumPoly::new(&principal_minor(&l, v0)?);

    let mut brackets = Vec::new();
    for &quad in &opts.quadrants {
        brackets.extend(sweep(&p, &q, quad, opts, exec));
        let swapped = |b: ([f64; 2], [f64; 2])| ([b.0[1], b.0[0]], [b.1[1], b.1[0]]);
        brackets.extend(sweep(&p.swapped(), &q.swapped(), [quad[1], quad[0]], opts, exec).into_iter().map(swapped));
    }
    let mut found: Vec<[f64; 2]> = Vec::new();
    for (a, b) in &brackets {
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let Some(x) = refine(&p, &q, mid) else { continue };
        if x[0].signum() != a[0].signum() || x[1].signum() != a[1].signum() {
            continue;
        }
        let la = [x[0].abs().ln(), x[1].abs().ln()];
        if la[0].abs() > opts.extent + 1.0 || la[1].abs() > opts.extent + 1.0 {
            continue;
        }
        if x[0] > 0.0 && x[1] > 0.0 && la[0].hypot(la[1]) < opts.node_radius {
            continue;
        }
        if relative(&p, x[0], x[1]) > 1e-10 || relative(&q, x[0], x[1]) > 1e-10 {
            continue;
        }
        if found.iter().all(|y| (y[0] - x[0]).abs() + (y[1] - x[1]).abs() > 1e-7 * (x[0].abs() + x[1].abs())) {
            found.push(x);
        }
    }

    let mut points = Vec::new();
    let mut sigma_points = Vec::new();
    for x in found {
        let (z, w) = (Complex64::new(x[0], 0.0), Complex64::new(x[1], 0.0));
        let nv = null_vectors(&l, z, w, 1e-12)?;
        let cv = nv.cokernel[v0].norm();
        let cu = nv.kernel[v0].norm();
        let la = [x[0].abs().ln(), x[1].abs().ln()];
        let point = DivisorPoint {
            z: x[0],
            w: x[1],
            log_abs: la,
            component: cv.min(cu),
            q_residual: relative(&q, x[0], x[1]),
            q_sigma_residual: relative(&q, 1.0 / x[0], 1.0 / x[1]),
            hole: adjacent_hole(&p, &polygon, la),
        };
        if cv <= cu {
            points.push(point);
        } else {
            sigma_points.push(point);
        }
    }
    let by_pos = |a: &DivisorPoint, b: &DivisorPoint| a.log_abs[0].total_cmp(&b.log_abs[0]).then(a.log_abs[1].total_cmp(&b.log_abs[1]));
    points.sort_by(by_pos);
    sigma_points.sort_by(by_pos);
    let report = DivisorReport { v0, expected, points, sigma_points, brackets: brackets.len() };
    if !report.count_ok() {
        return Err(SpectralError::WrongDivisorCount { found: report.points.len(), expected, report: Box::new(report) });
    }
    Ok(report)
}
