//! Exact bivariate Laurent polynomials over arbitrary-precision rationals.
//!
//! A [`LaurentPoly2`] is a sparse map from exponent pairs `(i, j)` to nonzero
//! coefficients of `z^i w^j`. Iteration is in sorted exponent order, so serialized
//! output is byte-stable.

pub mod lattice;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lattice::{NewtonPolygon, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("Laurent polynomial evaluated at z = 0 or w = 0")]
    ZeroEvaluationPoint,
    #[error("the zero polynomial has no Newton polygon")]
    ZeroPolynomial,
}

/// Differentiation variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z,
    W,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly2 {
    terms: BTreeMap<Point, BigRational>,
}

/// Builds a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, [0, 0])
    }

    /// `c · z^e[0] · w^e[1]`
    pub fn monomial(c: BigRational, e: Point) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn z() -> Self {
        Self::monomial(BigRational::one(), [1, 0])
    }

    pub fn w() -> Self {
        Self::monomial(BigRational::one(), [0, 1])
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (Point, BigRational)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(terms: &[(i64, i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(i, j, c)| ([i, j], rat(c, 1))))
    }

    pub fn add_term(&mut self, e: Point, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Point) -> BigRational {
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Point, &BigRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.terms.keys().copied()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `z^e[0] w^e[1]`.
    pub fn shift(&self, e: Point) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (lattice::add(*k, e), v.clone()))
                .collect(),
        }
    }

    /// `p(1/z, 1/w)`.
    pub fn involution(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (lattice::neg(*e), v.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self, var: Var) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let (k, shifted) = match var {
                Var::Z => (e[0], [e[0] - 1, e[1]]),
                Var::W => (e[1], [e[0], e[1] - 1]),
            };
            if k != 0 {
                out.add_term(shifted, c * BigRational::from_integer(BigInt::from(k)));
            }
        }
        out
    }

    /// Exact evaluation at nonzero rationals.
    pub fn eval_rational(&self, z: &BigRational, w: &BigRational) -> Result<BigRational, LaurentError> {
        if z.is_zero() || w.is_zero() {
            return Err(LaurentError::ZeroEvaluationPoint);
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * pow_rational(z, e[0]) * pow_rational(w, e[1]);
        }
        Ok(acc)
    }

    /// Complex evaluation: Horner in `z` within each row of constant `w`-degree,
    /// then Horner across rows in `w`. Negative powers are handled by factoring out
    /// the minimal exponents.
    pub fn eval_complex(&self, z: Complex64, w: Complex64) -> Result<Complex64, LaurentError> {
        if z == Complex64::zero() || w == Complex64::zero() {
            return Err(LaurentError::ZeroEvaluationPoint);
        }
        if self.is_zero() {
            return Ok(Complex64::zero());
        }
        let rows = self.rows_f64();
        let jmin = *rows.keys().next().unwrap();
        let jmax = *rows.keys().next_back().unwrap();
        let mut acc = Complex64::zero();
        for j in (jmin..=jmax).rev() {
            acc *= w;
            if let Some(row) = rows.get(&j) {
                acc += horner_row(row, z);
            }
        }
        Ok(acc * w.powi(jmin as i32))
    }

    /// Sum of `|c · z^i w^j|` over terms; the natural scale for residual checks.
    pub fn abs_scale(&self, z: Complex64, w: Complex64) -> f64 {
        let (lz, lw) = (z.norm().ln(), w.norm().ln());
        self.terms
            .iter()
            .map(|(e, c)| {
                c.to_f64().unwrap_or(f64::NAN).abs() * (e[0] as f64 * lz + e[1] as f64 * lw).exp()
            })
            .sum()
    }

    /// Coefficients grouped by `w`-exponent, each row mapping `z`-exponent to `f64`.
    pub fn rows_f64(&self) -> BTreeMap<i64, BTreeMap<i64, f64>> {
        let mut rows: BTreeMap<i64, BTreeMap<i64, f64>> = BTreeMap::new();
        for (e, c) in &self.terms {
            rows.entry(e[1])
                .or_default()
                .insert(e[0], c.to_f64().unwrap_or(f64::NAN));
        }
        rows
    }

    /// Complex coefficients of `w^j` as Laurent polynomials in `z`, evaluated at `z`.
    /// Returns `(jmin, coefficients for jmin..=jmax)`.
    pub fn w_coefficients_at(&self, z: Complex64) -> Option<(i64, Vec<Complex64>)> {
        let rows = self.rows_f64();
        let jmin = *rows.keys().next()?;
        let jmax = *rows.keys().next_back()?;
        let coeffs = (jmin..=jmax)
            .map(|j| rows.get(&j).map(|r| horner_row(r, z)).unwrap_or_default())
            .collect();
        Some((jmin, coeffs))
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon, LaurentError> {
        NewtonPolygon::hull(self.support()).ok_or(LaurentError::ZeroPolynomial)
    }

    /// If `self = k · other` for a rational constant `k`, returns `k`.
    pub fn constant_ratio(&self, other: &Self) -> Option<BigRational> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut ratio: Option<BigRational> = None;
        for ((ea, ca), (eb, cb)) in self.terms.iter().zip(other.terms.iter()) {
            if ea != eb {
                return None;
            }
            let r = ca / cb;
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev != r => return None,
                Some(_) => {}
            }
        }
        ratio
    }

    /// Sorted `(i, j, "num/den")` triples.
    pub fn to_triples(&self) -> Vec<CoefficientTriple> {
        self.terms
            .iter()
            .map(|(e, c)| CoefficientTriple(e[0], e[1], c.to_string()))
            .collect()
    }

    pub fn from_triples(triples: &[CoefficientTriple]) -> Result<Self, num_rational::ParseRatioError> {
        let mut p = Self::zero();
        for t in triples {
            p.add_term([t.0, t.1], t.2.parse::<BigRational>()?);
        }
        Ok(p)
    }
}

/// Serialized coefficient `(i, j, "num/den")`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTriple(pub i64, pub i64, pub String);

fn horner_row(row: &BTreeMap<i64, f64>, z: Complex64) -> Complex64 {
    let imin = *row.keys().next().unwrap();
    let imax = *row.keys().next_back().unwrap();
    let mut acc = Complex64::zero();
    for i in (imin..=imax).rev() {
        acc = acc * z + row.get(&i).copied().unwrap_or(0.0);
    }
    acc * z.powi(imin as i32)
}

/// Serializes a rational as its `p/q` string, for `serialize_with`.
pub fn serialize_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn pow_rational(x: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Descending total degree reads more naturally; constant first for centered polys.
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let is_const = *e == [0, 0];
            if !mag.is_one() || is_const {
                if mag.is_integer() {
                    write!(f, "{}", mag)?;
                } else {
                    write!(f, "({})", mag)?;
                }
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut parts = Vec::new();
            for (name, k) in [("z", e[0]), ("w", e[1])] {
                match k {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    k => parts.push(format!("{name}^{k}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Add<&LaurentPoly2> for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn add(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly2 {
    type Output = LaurentPoly2;
    fn add(mut self, rhs: LaurentPoly2) -> LaurentPoly2 {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly2> for LaurentPoly2 {
    fn add_assign(&mut self, rhs: &LaurentPoly2) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly2> for LaurentPoly2 {
    fn sub_assign(&mut self, rhs: &LaurentPoly2) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Sub<&LaurentPoly2> for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn sub(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly2 {
    type Output = LaurentPoly2;
    fn sub(mut self, rhs: LaurentPoly2) -> LaurentPoly2 {
        self -= &rhs;
        self
    }
}

impl Neg for LaurentPoly2 {
    type Output = LaurentPoly2;
    fn neg(self) -> LaurentPoly2 {
        Self {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul<&LaurentPoly2> for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn mul(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(lattice::add(*ea, *eb), ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly2 {
    type Output = LaurentPoly2;
    fn mul(self, rhs: LaurentPoly2) -> LaurentPoly2 {
        &self * &rhs
    }
}

impl Serialize for LaurentPoly2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let triples = Vec::<CoefficientTriple>::deserialize(d)?;
        Self::from_triples(&triples).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sq1() -> LaurentPoly2 {
        LaurentPoly2::from_int_terms(&[(0, 0, 4), (1, 0, -1), (-1, 0, -1), (0, 1, -1), (0, -1, -1)])
    }

    #[test]
    fn cancellation_and_expansion() {
        let z = LaurentPoly2::z();
        let zi = z.involution();
        assert_eq!(&(&z + &zi) + &(-zi.clone()), z);
        let one = LaurentPoly2::one();
        let prod = &(&one - &z) * &(&one - &zi);
        assert_eq!(prod, LaurentPoly2::from_int_terms(&[(0, 0, 2), (1, 0, -1), (-1, 0, -1)]));
    }

    #[test]
    fn involution_examples() {
        assert_eq!(sq1().involution(), sq1());
        assert_eq!(LaurentPoly2::z().involution(), LaurentPoly2::from_int_terms(&[(-1, 0, 1)]));
    }

    #[test]
    fn evaluation() {
        let one = rat(1, 1);
        assert!(sq1().eval_rational(&one, &one).unwrap().is_zero());
        let zw = LaurentPoly2::from_int_terms(&[(1, 1, 1)]);
        assert_eq!(zw.eval_rational(&rat(2, 1), &rat(3, 1)).unwrap(), rat(6, 1));
        assert_eq!(
            sq1().eval_rational(&rat(0, 1), &one),
            Err(LaurentError::ZeroEvaluationPoint)
        );
        let v = zw.eval_complex(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)).unwrap();
        assert!((v - Complex64::new(6.0, 0.0)).norm() < 1e-14);
        assert!(sq1().eval_complex(Complex64::zero(), Complex64::one()).is_err());
    }

    #[test]
    fn derivatives() {
        let p = LaurentPoly2::from_int_terms(&[(1, 0, 1), (-1, 0, 1)]);
        assert_eq!(
            p.derivative(Var::Z),
            LaurentPoly2::from_int_terms(&[(0, 0, 1), (-2, 0, -1)])
        );
        let one = rat(1, 1);
        let dz = sq1().derivative(Var::Z);
        assert!(dz.eval_rational(&one, &one).unwrap().is_zero());
        let zw = LaurentPoly2::from_int_terms(&[(1, 1, 1)]);
        assert_eq!(zw.derivative(Var::Z).derivative(Var::W), LaurentPoly2::one());
    }

    #[test]
    fn newton_polygons() {
        let n = sq1().newton_polygon().unwrap();
        assert_eq!(n.vertices(), &[[-1, 0], [0, -1], [1, 0], [0, 1]]);
        assert_eq!(n.interior_count(), 1);
        assert_eq!(n.divisor_degree(), 0);
        let m = LaurentPoly2::from_int_terms(&[(2, 1, 5)]).newton_polygon().unwrap();
        assert_eq!(m.vertices(), &[[2, 1]]);
        assert_eq!(m.interior_count(), 0);
        assert_eq!(LaurentPoly2::zero().newton_polygon(), Err(LaurentError::ZeroPolynomial));
    }

    #[test]
    fn display_and_triples() {
        assert_eq!(sq1().to_string(), "-z^-1 - w^-1 + 4 - w - z");
        let p = LaurentPoly2::from_terms([([1, -1], rat(-3, 2))]);
        assert_eq!(p.to_string(), "-(3/2)*z*w^-1");
        let json = serde_json::to_string(&sq1()).unwrap();
        assert_eq!(json, r#"[[-1,0,"-1"],[0,-1,"-1"],[0,0,"4"],[0,1,"-1"],[1,0,"-1"]]"#);
        let back: LaurentPoly2 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sq1());
    }

    #[test]
    fn constant_ratio_detects_proportionality() {
        let p = sq1();
        assert_eq!(p.scale(&rat(3, 1)).constant_ratio(&p), Some(rat(3, 1)));
        assert_eq!(p.constant_ratio(&(&p + &LaurentPoly2::z())), None);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly2> {
        proptest::collection::vec((-3i64..=3, -3i64..=3, -5i64..=5, 1i64..=4), 0..6).prop_map(|v| {
            LaurentPoly2::from_terms(v.into_iter().map(|(i, j, n, d)| ([i, j], rat(n, d))))
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn involution_is_an_involution(a in arb_poly()) {
            prop_assert_eq!(a.involution().involution(), a.clone());
            if !a.is_zero() {
                prop_assert_eq!(a.involution().newton_polygon().unwrap(), a.newton_polygon().unwrap().reflect());
            }
        }

        #[test]
        fn complex_eval_matches_exact(a in arb_poly(), zn in 1i64..5, wn in -4i64..-1) {
            let (z, w) = (rat(zn, 2), rat(wn, 3));
            let exact = a.eval_rational(&z, &w).unwrap().to_f64().unwrap();
            let num = a.eval_complex(Complex64::new(zn as f64 / 2.0, 0.0), Complex64::new(wn as f64 / 3.0, 0.0)).unwrap();
            prop_assert!((num.re - exact).abs() <= 1e-9 * (1.0 + exact.abs()));
            prop_assert!(num.im.abs() < 1e-9);
        }
    }
}
