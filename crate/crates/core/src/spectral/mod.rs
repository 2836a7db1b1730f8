//! Floating-point spectral data: fibers of the spectral curve, null vectors of
//! `Δ(z, w)`, amoeba sampling, the spectral divisor and points at infinity.

pub mod amoeba;
pub mod divisor;
pub mod infinity;

pub use amoeba::{amoeba, component_order, to_csv, to_svg, AmoebaGrid, AmoebaReport, CurveSample};
pub use divisor::{spectral_divisor, DivisorOptions, DivisorPoint, DivisorReport};
pub use infinity::{infinity_coordinates, InfinityPoint};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::laplacian::{LaplacianError, LaplacianMatrix};
use crate::laurent::lattice::Point;
use crate::laurent::LaurentPoly2;

#[derive(Debug, Error, Clone)]
pub enum SpectralError {
    #[error("evaluation point has a zero coordinate")]
    ZeroPoint,
    #[error("fiber over z = {z} is degenerate (extreme w-coefficient vanishes)")]
    DegenerateFiber { z: Complex64 },
    #[error("corank two: two smallest singular values {0:e} and {1:e}")]
    CorankTwo(f64, f64),
    #[error("the graph has a single vertex, so there is no section to track")]
    SingleVertex,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("found {found} divisor points, expected {expected}")]
    WrongDivisorCount { found: usize, expected: usize, report: Box<DivisorReport> },
    #[error("input does not look Harnack: {0}")]
    NonHarnack(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Laplacian(#[from] LaplacianError),
}

/// `f64` copy of a Laurent polynomial for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct NumPoly {
    terms: Vec<(Point, f64)>,
    jmin: i64,
    jmax: i64,
}

impl NumPoly {
    pub fn new(p: &LaurentPoly2) -> Self {
        let terms: Vec<(Point, f64)> = p.terms().map(|(e, c)| (*e, c.to_f64().unwrap_or(f64::NAN))).collect();
        let jmin = terms.iter().map(|t| t.0[1]).min().unwrap_or(0);
        let jmax = terms.iter().map(|t| t.0[1]).max().unwrap_or(0);
        NumPoly { terms, jmin, jmax }
    }

    /// The same polynomial with exponents mapped by `f`, which must be injective.
    pub fn map_exponents(&self, f: impl Fn(Point) -> Point) -> Self {
        let terms: Vec<(Point, f64)> = self.terms.iter().map(|&(e, c)| (f(e), c)).collect();
        let jmin = terms.iter().map(|t| t.0[1]).min().unwrap_or(0);
        let jmax = terms.iter().map(|t| t.0[1]).max().unwrap_or(0);
        NumPoly { terms, jmin, jmax }
    }

    /// Exchanges the roles of `z` and `w`.
    pub fn swapped(&self) -> Self {
        self.map_exponents(|e| [e[1], e[0]])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms.iter().map(|&(e, c)| c * z.powi(e[0] as i32) * w.powi(e[1] as i32)).sum()
    }

    /// `Σ |c z^i w^j|`, the natural scale for residuals at `(z, w)`.
    pub fn abs_scale(&self, z: Complex64, w: Complex64) -> f64 {
        let (az, aw) = (z.norm(), w.norm());
        self.terms.iter().map(|&(e, c)| c.abs() * az.powi(e[0] as i32) * aw.powi(e[1] as i32)).sum()
    }

    /// Partial derivatives `(∂_z, ∂_w)`.
    pub fn gradient(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        let mut gz = Complex64::zero();
        let mut gw = Complex64::zero();
        for &(e, c) in &self.terms {
            let m = c * z.powi(e[0] as i32) * w.powi(e[1] as i32);
            gz += m * e[0] as f64 / z;
            gw += m * e[1] as f64 / w;
        }
        (gz, gw)
    }

    /// Coefficients of `w^jmin ..= w^jmax` at fixed `z`.
    pub fn w_coefficients(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); (self.jmax - self.jmin + 1) as usize];
        for &(e, c) in &self.terms {
            out[(e[1] - self.jmin) as usize] += c * z.powi(e[0] as i32);
        }
        out
    }
}

/// Roots of the polynomial `Σ a_k w^k` (ascending coefficients) by companion-matrix
/// eigenvalues, polished by Newton iteration.
pub fn polynomial_roots(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = a[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -a[i] / lead;
    }
    let eig = comp.eigenvalues().map(|v| v.iter().copied().collect::<Vec<_>>());
    let mut roots = eig.unwrap_or_else(|| comp.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default());
    for r in &mut roots {
        *r = newton_polish(a, *r);
    }
    roots
}

pub(crate) fn newton_polish(a: &[Complex64], mut x: Complex64) -> Complex64 {
    let eval = |x: Complex64| {
        let mut f = Complex64::zero();
        let mut df = Complex64::zero();
        for c in a.iter().rev() {
            df = df * x + f;
            f = f * x + c;
        }
        let scale: f64 = a.iter().rev().fold(0.0, |acc, c| acc * x.norm() + c.norm());
        (f, df, scale)
    };
    let (mut f, _, scale) = eval(x);
    for _ in 0..50 {
        if f.norm() <= 1e-15 * scale {
            break;
        }
        let (_, df, _) = eval(x);
        if df.norm() == 0.0 {
            break;
        }
        let next = x - f / df;
        let (fn_, _, _) = eval(next);
        if fn_.norm() >= f.norm() {
            break;
        }
        x = next;
        f = fn_;
    }
    x
}

/// All `w` with `P(z, w) = 0`, counted with multiplicity.
pub fn fiber_roots(p: &NumPoly, z: Complex64) -> Result<Vec<Complex64>, SpectralError> {
    if z.is_zero() {
        return Err(SpectralError::ZeroPoint);
    }
    let a = p.w_coefficients(z);
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let degenerate = |c: &Complex64| c.norm() <= 1e-13 * scale;
    if scale == 0.0 || degenerate(&a[0]) || degenerate(&a[a.len() - 1]) {
        return Err(SpectralError::DegenerateFiber { z });
    }
    Ok(polynomial_roots(&a))
}

/// Singular data of `Δ(z, w)` at its smallest singular value.
#[derive(Debug, Clone)]
pub struct NullVectors {
    /// Unit `U` with `Δ U ≈ 0`.
    pub kernel: DVector<Complex64>,
    /// Unit `V` with `Vᵀ Δ ≈ 0`; its `v₀` component is the section defining the divisor.
    pub cokernel: DVector<Complex64>,
    pub sigma_min: f64,
    /// Second smallest singular value (`∞` for a 1×1 matrix).
    pub sigma_next: f64,
    pub sigma_max: f64,
}

/// Rotates `v` so that its largest component is real and positive.
fn fix_phase(v: DVector<Complex64>) -> DVector<Complex64> {
    let k = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(i, _)| i).unwrap_or(0);
    let ph = v[k] / v[k].norm();
    if ph.is_nan() {
        return v;
    }
    v.map(|x| x / ph)
}

pub fn null_vectors(l: &LaplacianMatrix, z: Complex64, w: Complex64, tol: f64) -> Result<NullVectors, SpectralError> {
    let m = l.eval_complex(z, w).map_err(|_| SpectralError::ZeroPoint)?;
    let svd = m.svd(true, true);
    let s = &svd.singular_values;
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let i = idx[0];
    let sigma_min = s[i];
    let sigma_next = idx.get(1).map(|&j| s[j]).unwrap_or(f64::INFINITY);
    let sigma_max = s[idx[idx.len() - 1]];
    if sigma_next <= tol * sigma_max.max(1.0) {
        return Err(SpectralError::CorankTwo(sigma_min, sigma_next));
    }
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    let kernel = fix_phase(v_t.row(i).adjoint());
    let cokernel = fix_phase(u.column(i).map(|x| x.conj()));
    Ok(NullVectors { kernel, cokernel, sigma_min, sigma_next, sigma_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::laplacian::{build_laplacian, charpoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sq1_poly() -> NumPoly {
        let n = fixtures::sq1();
        NumPoly::new(&charpoly(&build_laplacian(&n.graph, &n.conductance)).unwrap())
    }

    #[test]
    fn sq1_fibers() {
        let p = sq1_poly();
        let mut r = fiber_roots(&p, c(1.0, 0.0)).unwrap();
        assert_eq!(r.len(), 2);
        for x in &r {
            assert!((x - c(1.0, 0.0)).norm() < 1e-6);
        }
        r = fiber_roots(&p, c(-1.0, 0.0)).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        let s = 2f64.sqrt();
        assert!((r[0] - c(3.0 - 2.0 * s, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(3.0 + 2.0 * s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn root_count_is_degree_spread() {
        let n = fixtures::tri2();
        let p = NumPoly::new(&charpoly(&build_laplacian(&n.graph, &n.conductance)).unwrap());
        let r = fiber_roots(&p, c(0.7, 0.3)).unwrap();
        assert_eq!(r.len() as i64, p.jmax - p.jmin);
        for w in r {
            assert!(p.eval(c(0.7, 0.3), w).norm() <= 1e-12 * p.abs_scale(c(0.7, 0.3), w));
        }
    }

    #[test]
    fn node_has_constant_kernel() {
        let n = fixtures::hex1();
        let l = build_laplacian(&n.graph, &n.conductance);
        let nv = null_vectors(&l, c(1.0, 0.0), c(1.0, 0.0), 1e-9).unwrap();
        let k = 1.0 / (2f64).sqrt();
        for x in nv.kernel.iter().chain(nv.cokernel.iter()) {
            assert!((x - c(k, 0.0)).norm() < 1e-12);
        }
        assert!(nv.sigma_min < 1e-12);
    }

    #[test]
    fn smooth_point_has_rank_one_adjugate() {
        let n = fixtures::tri2();
        let lap = build_laplacian(&n.graph, &n.conductance);
        let p = NumPoly::new(&charpoly(&lap).unwrap());
        let z = c(0.4, 0.9);
        let w = fiber_roots(&p, z).unwrap()[0];
        let nv = null_vectors(&lap, z, w, 1e-9).unwrap();
        assert!(nv.sigma_min <= 1e-10 * nv.sigma_max);
        assert!(nv.sigma_next > 1e-3);
        let m = lap.eval_complex(z, w).unwrap();
        assert!((&m * &nv.kernel).norm() < 1e-10);
        assert!((nv.cokernel.transpose() * &m).norm() < 1e-10);
        // Δ(z,w)ᵀ = Δ(1/z,1/w): the kernel here is the cokernel there.
        let other = null_vectors(&lap, z.inv(), w.inv(), 1e-9).unwrap();
        assert!((&nv.kernel - &other.cokernel).norm() < 1e-8);
    }
}
