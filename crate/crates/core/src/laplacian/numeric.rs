//! Floating-point characteristic polynomial for matrices beyond the exact bound.
//!
//! Not exact. `det Δ` is sampled on a grid of roots of unity covering a bounding box
//! of its support, and coefficients are recovered by a 2D discrete Fourier transform.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::LaplacianMatrix;
use crate::exec::Exec;
use crate::laurent::lattice::Point;

#[derive(Debug, Clone, Serialize)]
pub struct NumericCharpoly {
    /// `(exponent, coefficient)` for coefficients above `1e-9` relative magnitude.
    pub coefficients: Vec<(Point, f64)>,
    /// Largest imaginary part seen; a sanity gauge for real-coefficient inputs.
    pub max_imag: f64,
    pub exact: bool,
}

/// Box `[lo, hi]` per coordinate guaranteed to contain the support of `det`.
fn support_box(l: &LaplacianMatrix) -> ([i64; 2], [i64; 2]) {
    let mut lo = [0i64; 2];
    let mut hi = [0i64; 2];
    for row in l.entries() {
        for k in 0..2 {
            let exps = row.iter().flat_map(|p| p.support().map(move |e| e[k]));
            let (mn, mx) = exps.fold((i64::MAX, i64::MIN), |(a, b), x| (a.min(x), b.max(x)));
            if mn <= mx {
                lo[k] += mn;
                hi[k] += mx;
            }
        }
    }
    (lo, hi)
}

pub fn numeric_charpoly(l: &LaplacianMatrix, exec: Exec) -> NumericCharpoly {
    let (lo, hi) = support_box(l);
    let m = [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize];
    let root = |k: usize, n: usize| Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
    let samples: Vec<Complex64> = exec.map_range(m[0] * m[1], |idx| {
        let (a, b) = (idx / m[1], idx % m[1]);
        let mat = l.eval_complex(root(a, m[0]), root(b, m[1])).expect("unit circle avoids 0");
        mat.determinant()
    });
    let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max).max(1.0);
    let mut coefficients = Vec::new();
    let mut max_imag: f64 = 0.0;
    for i in lo[0]..=hi[0] {
        for j in lo[1]..=hi[1] {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..m[0] {
                for b in 0..m[1] {
                    let phase = -TAU * ((i * a as i64) as f64 / m[0] as f64 + (j * b as i64) as f64 / m[1] as f64);
                    acc += samples[a * m[1] + b] * Complex64::from_polar(1.0, phase);
                }
            }
            acc /= (m[0] * m[1]) as f64;
            max_imag = max_imag.max(acc.im.abs());
            if acc.norm() > 1e-9 * scale {
                coefficients.push(([i, j], acc.re));
            }
        }
    }
    NumericCharpoly { coefficients, max_imag, exact: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Conductances, Edge, TorusGraph};
    use crate::laplacian::{build_laplacian, charpoly};
    use num_traits::ToPrimitive;

    #[test]
    fn agrees_with_exact_on_hex1() {
        let g = TorusGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, disp: [0, 0] },
                Edge { tail: 0, head: 1, disp: [1, 0] },
                Edge { tail: 0, head: 1, disp: [0, 1] },
            ],
            vec![vec![4, 0, 2], vec![1, 3, 5]],
        )
        .unwrap();
        let l = build_laplacian(&g, &Conductances::from_ints(&[1, 2, 3]).unwrap());
        let exact = charpoly(&l).unwrap();
        let num = numeric_charpoly(&l, Exec::Parallel);
        assert_eq!(num.coefficients.len(), exact.len());
        for (e, c) in &num.coefficients {
            assert!((c - exact.coeff(*e).to_f64().unwrap()).abs() < 1e-9);
        }
        assert!(num.max_imag < 1e-9);
    }
}
