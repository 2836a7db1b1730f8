//! Line-bundle Laplacian `Δ(z, w)` over the Laurent ring and its exact determinant.
//!
//! Each dart `u → v` with displacement `d` and conductance `c` contributes `c` to
//! `Δ[u][u]` and `-c·z^{d₀}w^{d₁}` to `Δ[u][v]`.

mod det;
mod numeric;

pub use det::{determinant, DEFAULT_EXACT_BOUND};
pub use numeric::{numeric_charpoly, NumericCharpoly};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exec::Exec;
use crate::graph::{Conductances, TorusGraph};
use crate::laurent::{LaurentError, LaurentPoly2, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaplacianError {
    #[error("matrix of size {n} exceeds the exact determinant bound {bound}")]
    MatrixTooLarge { n: usize, bound: usize },
    #[error("principal minor needs at least two vertices")]
    SingleVertexGraph,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplacianMatrix {
    entries: Vec<Vec<LaurentPoly2>>,
}

pub fn build_laplacian(g: &TorusGraph, c: &Conductances) -> LaplacianMatrix {
    let n = g.num_vertices();
    let mut entries = vec![vec![LaurentPoly2::zero(); n]; n];
    for d in 0..g.num_darts() {
        let (u, v) = (g.tail(d), g.head(d));
        let cond = c.get(d / 2);
        entries[u][u].add_term([0, 0], cond.clone());
        entries[u][v].add_term(g.disp(d), -cond.clone());
    }
    LaplacianMatrix { entries }
}

impl LaplacianMatrix {
    pub fn from_entries(entries: Vec<Vec<LaurentPoly2>>) -> Self {
        LaplacianMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly2 {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<LaurentPoly2>] {
        &self.entries
    }

    /// `Δ(z,w)ᵀ = Δ(1/z,1/w)`, entrywise.
    pub fn is_transpose_involutive(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i].involution()))
    }

    /// Row sums at `(1, 1)`; all zero for a Laplacian.
    pub fn row_sums_at_one(&self) -> Vec<BigRational> {
        let one = BigRational::one();
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.eval_rational(&one, &one).expect("nonzero point"))
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect()
    }

    pub fn eval_complex(&self, z: Complex64, w: Complex64) -> Result<DMatrix<Complex64>, LaurentError> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entries[i][j].eval_complex(z, w)?;
            }
        }
        Ok(m)
    }

    /// Submatrix with row and column `v0` removed.
    pub fn delete(&self, v0: usize) -> LaplacianMatrix {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v0)
            .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != v0).map(|(_, p)| p.clone()).collect())
            .collect();
        LaplacianMatrix { entries }
    }
}

/// `det Δ(z, w)`, exactly, with the default size bound.
pub fn charpoly(l: &LaplacianMatrix) -> Result<LaurentPoly2, LaplacianError> {
    determinant(l, DEFAULT_EXACT_BOUND, Exec::default())
}

/// Determinant `Q(z, w)` of `Δ` with row and column `v0` removed.
pub fn principal_minor(l: &LaplacianMatrix, v0: usize) -> Result<LaurentPoly2, LaplacianError> {
    if l.size() < 2 {
        return Err(LaplacianError::SingleVertexGraph);
    }
    if v0 >= l.size() {
        return Err(LaplacianError::VertexOutOfRange(v0));
    }
    determinant(&l.delete(v0), DEFAULT_EXACT_BOUND, Exec::default())
}

/// Value, gradient and Hessian of `P` at `(1, 1)`, exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    #[serde(serialize_with = "crate::laurent::serialize_rational")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_rats")]
    pub gradient: [BigRational; 2],
    #[serde(serialize_with = "ser_rat_matrix")]
    pub hessian: [[BigRational; 2]; 2],
    #[serde(serialize_with = "crate::laurent::serialize_rational")]
    pub hessian_det: BigRational,
    pub is_node: bool,
}

fn ser_rats<S: serde::Serializer>(r: &[BigRational; 2], s: S) -> Result<S::Ok, S::Error> {
    [r[0].to_string(), r[1].to_string()].serialize(s)
}

fn ser_rat_matrix<S: serde::Serializer>(r: &[[BigRational; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
    let m: Vec<Vec<String>> = r.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect();
    m.serialize(s)
}

pub fn node_check(p: &LaurentPoly2) -> NodeReport {
    let one = BigRational::one();
    let at = |q: &LaurentPoly2| q.eval_rational(&one, &one).expect("(1,1) is a valid point");
    let pz = p.derivative(Var::Z);
    let pw = p.derivative(Var::W);
    let hessian = [
        [at(&pz.derivative(Var::Z)), at(&pz.derivative(Var::W))],
        [at(&pw.derivative(Var::Z)), at(&pw.derivative(Var::W))],
    ];
    let hessian_det = &hessian[0][0] * &hessian[1][1] - &hessian[0][1] * &hessian[1][0];
    let value = at(p);
    let gradient = [at(&pz), at(&pw)];
    let is_node = value.is_zero() && gradient.iter().all(Zero::is_zero) && !hessian_det.is_zero();
    NodeReport { value, gradient, hessian, hessian_det, is_node }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::laurent::rat;

    fn sq1() -> TorusGraph {
        TorusGraph::new(
            1,
            vec![Edge { tail: 0, head: 0, disp: [1, 0] }, Edge { tail: 0, head: 0, disp: [0, 1] }],
            vec![vec![0, 2, 1, 3]],
        )
        .unwrap()
    }

    fn hex1() -> TorusGraph {
        TorusGraph::new(
            2,
            vec![
                Edge { tail: 0, head: 1, disp: [0, 0] },
                Edge { tail: 0, head: 1, disp: [1, 0] },
                Edge { tail: 0, head: 1, disp: [0, 1] },
            ],
            vec![vec![4, 0, 2], vec![1, 3, 5]],
        )
        .unwrap()
    }

    fn sq1_poly() -> LaurentPoly2 {
        LaurentPoly2::from_int_terms(&[(0, 0, 4), (1, 0, -1), (-1, 0, -1), (0, 1, -1), (0, -1, -1)])
    }

    fn hex1_poly() -> LaurentPoly2 {
        LaurentPoly2::from_int_terms(&[
            (0, 0, 6),
            (1, 0, -1),
            (-1, 0, -1),
            (0, 1, -1),
            (0, -1, -1),
            (1, -1, -1),
            (-1, 1, -1),
        ])
    }

    #[test]
    fn sq1_laplacian() {
        let l = build_laplacian(&sq1(), &Conductances::uniform(2));
        assert_eq!(l.size(), 1);
        assert_eq!(l.entry(0, 0), &sq1_poly());
        assert_eq!(charpoly(&l).unwrap(), sq1_poly());
    }

    #[test]
    fn hex1_laplacian_entries() {
        let c = Conductances::from_ints(&[2, 3, 5]).unwrap();
        let l = build_laplacian(&hex1(), &c);
        assert_eq!(l.entry(0, 0), &LaurentPoly2::from_int_terms(&[(0, 0, 10)]));
        assert_eq!(l.entry(0, 1), &LaurentPoly2::from_int_terms(&[(0, 0, -2), (1, 0, -3), (0, 1, -5)]));
        assert_eq!(l.entry(1, 0), &LaurentPoly2::from_int_terms(&[(0, 0, -2), (-1, 0, -3), (0, -1, -5)]));
        assert!(l.is_transpose_involutive());
        assert!(l.row_sums_at_one().iter().all(Zero::is_zero));
    }

    #[test]
    fn hex1_charpoly_matches_expansion() {
        let l = build_laplacian(&hex1(), &Conductances::uniform(3));
        let p = charpoly(&l).unwrap();
        assert_eq!(p, hex1_poly());
        // 9 - (1+z+w)(1+1/z+1/w)
        let s = LaurentPoly2::from_int_terms(&[(0, 0, 1), (1, 0, 1), (0, 1, 1)]);
        assert_eq!(p, &LaurentPoly2::from_int_terms(&[(0, 0, 9)]) - &(&s * &s.involution()));
    }

    #[test]
    fn node_reports() {
        let r = node_check(&sq1_poly());
        assert!(r.is_node);
        assert_eq!(r.hessian, [[rat(-2, 1), rat(0, 1)], [rat(0, 1), rat(-2, 1)]]);
        assert_eq!(r.hessian_det, rat(4, 1));
        assert!(node_check(&hex1_poly()).is_node);
        let z = node_check(&LaurentPoly2::z());
        assert_eq!(z.value, rat(1, 1));
        assert!(!z.is_node);
    }

    #[test]
    fn hex1_minor() {
        let l = build_laplacian(&hex1(), &Conductances::uniform(3));
        let q = principal_minor(&l, 0).unwrap();
        assert_eq!(q, LaurentPoly2::from_int_terms(&[(0, 0, 3)]));
        let n = charpoly(&l).unwrap().newton_polygon().unwrap();
        assert!(n.strictly_contains_polygon(&q.newton_polygon().unwrap()));
        let l1 = build_laplacian(&sq1(), &Conductances::uniform(2));
        assert_eq!(principal_minor(&l1, 0), Err(LaplacianError::SingleVertexGraph));
    }

    #[test]
    fn too_large_is_reported() {
        let l = build_laplacian(&hex1(), &Conductances::uniform(3));
        assert_eq!(
            determinant(&l, 1, Exec::Sequential),
            Err(LaplacianError::MatrixTooLarge { n: 2, bound: 1 })
        );
    }
}
