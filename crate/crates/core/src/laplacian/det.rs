//! Exact determinant over the Laurent ring by column-subset dynamic programming.
//!
//! `D[S]` is the determinant of rows `0..|S|` restricted to the columns in `S`:
//! `D[S] = Σ_{j∈S} (-1)^{#{k∈S : k>j}} · a[|S|-1][j] · D[S∖{j}]`.
//! Layers of equal `|S|` are independent and are computed in parallel.

use std::collections::HashMap;

use super::{LaplacianError, LaplacianMatrix};
use crate::exec::Exec;
use crate::laurent::LaurentPoly2;

pub const DEFAULT_EXACT_BOUND: usize = 20;

pub fn determinant(l: &LaplacianMatrix, bound: usize, exec: Exec) -> Result<LaurentPoly2, LaplacianError> {
    let n = l.size();
    if n > bound || n > 30 {
        return Err(LaplacianError::MatrixTooLarge { n, bound });
    }
    if n == 0 {
        return Ok(LaurentPoly2::one());
    }
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for mask in 0u32..(1u32 << n) {
        by_size[mask.count_ones() as usize].push(mask);
    }
    let mut prev: HashMap<u32, LaurentPoly2> = HashMap::from([(0u32, LaurentPoly2::one())]);
    for (k, masks) in by_size.iter().enumerate().skip(1) {
        let row = &l.entries()[k - 1];
        let prev_ref = &prev;
        let layer = exec.map_slice(masks, |&mask| {
            let mut acc = LaurentPoly2::zero();
            for j in 0..n {
                if mask & (1 << j) == 0 || row[j].is_zero() {
                    continue;
                }
                let Some(minor) = prev_ref.get(&(mask & !(1 << j))) else { continue };
                let term = &row[j] * minor;
                let above = (mask >> (j + 1)).count_ones();
                if above % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            (mask, acc)
        });
        prev = layer.into_iter().filter(|(_, p)| !p.is_zero()).collect();
    }
    Ok(prev.remove(&((1u32 << n) - 1)).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;
    use proptest::prelude::*;

    fn from_ints(m: &[Vec<i64>]) -> LaplacianMatrix {
        LaplacianMatrix::from_entries(
            m.iter()
                .map(|r| r.iter().map(|&v| LaurentPoly2::constant(rat(v, 1))).collect())
                .collect(),
        )
    }

    // Leibniz formula over all permutations: independent oracle for small sizes.
    fn leibniz(m: &[Vec<i64>]) -> i64 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..n {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        perms(n)
            .into_iter()
            .map(|p| {
                let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let sign = if inv % 2 == 0 { 1 } else { -1 };
                sign * (0..n).map(|i| m[i][p[i]]).product::<i64>()
            })
            .sum()
    }

    #[test]
    fn small_integer_matrices() {
        let m = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        let d = determinant(&from_ints(&m), 20, Exec::Sequential).unwrap();
        assert_eq!(d, LaurentPoly2::constant(rat(4, 1)));
    }

    #[test]
    fn laurent_entries() {
        // det [[z, 1], [1, 1/z]] = 0
        let z = LaurentPoly2::z();
        let m = LaplacianMatrix::from_entries(vec![
            vec![z.clone(), LaurentPoly2::one()],
            vec![LaurentPoly2::one(), z.involution()],
        ]);
        assert!(determinant(&m, 20, Exec::Parallel).unwrap().is_zero());
    }

    proptest! {
        #[test]
        fn matches_leibniz(n in 1usize..=5, seed in proptest::collection::vec(-3i64..=3, 25)) {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 5 + j]).collect()).collect();
            let expect = LaurentPoly2::constant(rat(leibniz(&m), 1));
            prop_assert_eq!(determinant(&from_ints(&m), 20, Exec::Sequential).unwrap(), expect.clone());
            prop_assert_eq!(determinant(&from_ints(&m), 20, Exec::Parallel).unwrap(), expect);
        }
    }
}
