//! Exact arithmetic in the ring `Z[q, q^-1]` of integer Laurent polynomials.
//!
//! Values are kept in canonical form: a list of `(exponent, coefficient)`
//! pairs sorted by exponent with no zero coefficients, so structural equality
//! is semantic equality.  Coefficients are arbitrary-precision integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An integer Laurent polynomial in the variable `q`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    /// `(exp, coef)` pairs, sorted ascending by `exp`, all `coef` nonzero.
    terms: Vec<(i64, BigInt)>,
}

impl LaurentPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `coef * q^exp`, canonicalized (a zero coefficient yields zero).
    pub fn monomial(coef: impl Into<BigInt>, exp: i64) -> Self {
        let coef = coef.into();
        if coef.is_zero() {
            LaurentPoly::zero()
        } else {
            LaurentPoly { terms: vec![(exp, coef)] }
        }
    }

    /// The monomial `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(1, exp)
    }

    /// `z = q - q^-1`.
    pub fn z() -> Self {
        Self::q_pow(1) - Self::q_pow(-1)
    }

    /// Build from arbitrary (possibly unsorted / duplicated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut v: Vec<(i64, BigInt)> = terms.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i64, BigInt)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        LaurentPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Iterate `(exp, coef)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `q^exp` (zero if absent).
    pub fn coef(&self, exp: i64) -> BigInt {
        match self.terms.binary_search_by_key(&exp, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Lowest and highest exponents, if nonzero.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        self.terms
            .first()
            .map(|lo| (lo.0, self.terms.last().unwrap().0))
    }

    /// Multiply by `q^exp`.
    pub fn shift(&self, exp: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.checked_add(exp).expect("exponent overflow"), c.clone()))
                .collect(),
        }
    }

    /// Exact substitution of a nonzero rational for `q`.
    pub fn eval_rational(&self, q_value: &BigRational) -> Result<BigRational, LaurentError> {
        if q_value.is_zero() {
            return Err(LaurentError::ZeroSubstitution);
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let p = pow_rational(q_value, *e);
            acc += BigRational::from(c.clone()) * p;
        }
        Ok(acc)
    }

    /// Exact division: returns `self / d` when the quotient exists in
    /// `Z[q, q^-1]`, and `None` otherwise.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        // Shift both to ordinary polynomials and long-divide; the divisor's
        // leading coefficient must divide exactly at every step.
        let (nlo, _) = self.degree_range().unwrap();
        let (dlo, dhi) = d.degree_range().unwrap();
        let num = self.shift(-nlo);
        let den = d.shift(-dlo);
        let ddeg = (dhi - dlo) as usize;
        let mut rem: Vec<BigInt> = dense(&num);
        let dv: Vec<BigInt> = dense(&den);
        if rem.len() < dv.len() {
            return None;
        }
        let qdeg = rem.len() - dv.len();
        let mut quot = vec![BigInt::zero(); qdeg + 1];
        let lead = &dv[ddeg];
        for k in (0..=qdeg).rev() {
            let top = rem[k + ddeg].clone();
            if top.is_zero() {
                continue;
            }
            let (qc, r) = num_integer::div_rem(top, lead.clone());
            if !r.is_zero() {
                return None;
            }
            for (i, dc) in dv.iter().enumerate() {
                let sub = dc * &qc;
                rem[k + i] -= sub;
            }
            quot[k] = qc;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let poly = LaurentPoly::from_terms(
            quot.into_iter()
                .enumerate()
                .map(|(i, c)| (i as i64, c)),
        );
        Some(poly.shift(nlo - dlo))
    }

    /// Render in ascending exponent order, e.g. `-q^-1 + 2 + q^3`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let unit_coef = mag.is_one();
            match (*e, unit_coef) {
                (0, _) => out.push_str(&mag.to_string()),
                (1, true) => out.push('q'),
                (1, false) => out.push_str(&format!("{}q", mag)),
                (_, true) => out.push_str(&format!("q^{}", e)),
                (_, false) => out.push_str(&format!("{}q^{}", mag, e)),
            }
        }
        out
    }
}

fn dense(p: &LaurentPoly) -> Vec<BigInt> {
    let (_, hi) = p.degree_range().unwrap();
    let mut v = vec![BigInt::zero(); hi as usize + 1];
    for (e, c) in p.terms() {
        v[e as usize] = c.clone();
    }
    v
}

fn pow_rational(q: &BigRational, e: i64) -> BigRational {
    let base = if e >= 0 { q.clone() } else { q.recip() };
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base.clone();
    }
    acc
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("cannot substitute q = 0 into a Laurent polynomial")]
    ZeroSubstitution,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        // Merge two sorted term lists.
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let take_left = match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        let c = &a.1 + &b.1;
                        if !c.is_zero() {
                            out.push((a.0, c));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else {
                out.push(rhs.terms[j].clone());
                j += 1;
            }
        }
        LaurentPoly { terms: out }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly::from_terms(self.terms.iter().flat_map(|(ea, ca)| {
            rhs.terms.iter().map(move |(eb, cb)| {
                (ea.checked_add(*eb).expect("exponent overflow"), ca * cb)
            })
        }))
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

macro_rules! owned_ops {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly { $tr::$m(&self, &rhs) }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly { $tr::$m(&self, rhs) }
        }
    )*};
}
owned_ops!(Add::add, Mul::mul, Sub::sub);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl std::ops::AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self + rhs;
    }
}

impl From<i64> for LaurentPoly {
    fn from(v: i64) -> Self {
        LaurentPoly::monomial(v, 0)
    }
}

// --- JSON serialization: list of {"exp": int, "coef": int}, or an integer
// --- shorthand for constant polynomials.

impl serde::Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        if self.is_zero() {
            return s.serialize_i64(0);
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            if let Ok(v) = i64::try_from(&self.terms[0].1) {
                return s.serialize_i64(v);
            }
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            let coef: serde_json::Number = c
                .to_string()
                .parse()
                .map_err(serde::ser::Error::custom)?;
            seq.serialize_element(&serde_json::json!({"exp": e, "coef": coef}))?;
        }
        seq.end()
    }
}

impl<'de> serde::Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        poly_from_json(&v).map_err(D::Error::custom)
    }
}

/// Parse the JSON form of a polynomial: integer shorthand or term list.
pub fn poly_from_json(v: &serde_json::Value) -> Result<LaurentPoly, String> {
    match v {
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| format!("constant polynomial must be an integer, got {n}"))?;
            Ok(LaurentPoly::monomial(i, 0))
        }
        serde_json::Value::Array(items) => {
            let mut terms = Vec::new();
            for item in items {
                let obj = item
                    .as_object()
                    .ok_or_else(|| "polynomial term must be an object".to_string())?;
                let exp = obj
                    .get("exp")
                    .and_then(|e| e.as_i64())
                    .ok_or_else(|| "polynomial term missing integer \"exp\"".to_string())?;
                let coef = obj
                    .get("coef")
                    .ok_or_else(|| "polynomial term missing \"coef\"".to_string())?;
                let coef: BigInt = match coef {
                    serde_json::Value::Number(n) => n
                        .to_string()
                        .parse()
                        .map_err(|_| format!("bad coefficient {n}"))?,
                    serde_json::Value::String(s) => {
                        s.parse().map_err(|_| format!("bad coefficient {s}"))?
                    }
                    other => return Err(format!("bad coefficient {other}")),
                };
                terms.push((exp, coef));
            }
            Ok(LaurentPoly::from_terms(terms))
        }
        other => Err(format!("expected polynomial (integer or term list), got {other}")),
    }
}

/// Serialize to the JSON form used across the CLI.
pub fn poly_to_json(p: &LaurentPoly) -> serde_json::Value {
    serde_json::to_value(p).expect("polynomial serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> LaurentPoly {
        LaurentPoly::q_pow(1)
    }

    #[test]
    fn monomial_canonicalizes() {
        assert!(LaurentPoly::monomial(0, 5).is_zero());
        assert_eq!(LaurentPoly::monomial(1, 0), LaurentPoly::one());
        let z = LaurentPoly::monomial(1, 1) + LaurentPoly::monomial(-1, -1);
        assert_eq!(z, LaurentPoly::z());
    }

    #[test]
    fn add_cancels() {
        let p = q() + LaurentPoly::one();
        let r = p + LaurentPoly::monomial(-1, 0);
        assert_eq!(r, q());
        let two_z = LaurentPoly::z() + LaurentPoly::z();
        assert_eq!(
            two_z,
            LaurentPoly::from_terms([(1, 2.into()), (-1, BigInt::from(-2))])
        );
        let p = LaurentPoly::from_terms([(3, 7.into()), (-2, 5.into())]);
        assert_eq!(&p + &LaurentPoly::zero(), p);
    }

    #[test]
    fn mul_expands() {
        let z = LaurentPoly::z();
        let zbar = q() + LaurentPoly::q_pow(-1);
        assert_eq!(&z * &zbar, LaurentPoly::q_pow(2) - LaurentPoly::q_pow(-2));
        assert_eq!(
            &z * &z,
            LaurentPoly::q_pow(2) - LaurentPoly::monomial(2, 0) + LaurentPoly::q_pow(-2)
        );
        let p = LaurentPoly::from_terms([(4, 3.into()), (0, (-1).into())]);
        assert_eq!(&p * &LaurentPoly::one(), p);
    }

    #[test]
    fn eval_rational_values() {
        let z = LaurentPoly::z();
        let two = BigRational::from(BigInt::from(2));
        assert_eq!(
            z.eval_rational(&two).unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        let any = LaurentPoly::from_terms([(5, 9.into()), (-3, 4.into())]);
        let prod = &z * &any;
        assert!(prod
            .eval_rational(&BigRational::one())
            .unwrap()
            .is_zero());
        let p = LaurentPoly::q_pow(2) - LaurentPoly::q_pow(-2);
        assert_eq!(
            p.eval_rational(&BigRational::from(BigInt::from(3))).unwrap(),
            BigRational::new(80.into(), 9.into())
        );
        assert_eq!(
            p.eval_rational(&BigRational::zero()),
            Err(LaurentError::ZeroSubstitution)
        );
    }

    #[test]
    fn div_exact_roundtrip() {
        let a = LaurentPoly::z();
        let b = q() + LaurentPoly::q_pow(-1) + LaurentPoly::one();
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        // Non-divisible cases.
        assert_eq!(b.div_exact(&a), None);
        assert_eq!(LaurentPoly::monomial(3, 0).div_exact(&LaurentPoly::monomial(2, 0)), None);
        assert_eq!(a.div_exact(&LaurentPoly::zero()), None);
        assert_eq!(LaurentPoly::zero().div_exact(&a), Some(LaurentPoly::zero()));
    }

    #[test]
    fn text_rendering() {
        assert_eq!(LaurentPoly::zero().to_text(), "0");
        assert_eq!(LaurentPoly::z().to_text(), "-q^-1 + q");
        let p = LaurentPoly::from_terms([(0, 2.into()), (3, (-1).into()), (1, 1.into())]);
        assert_eq!(p.to_text(), "2 + q - q^3");
    }

    #[test]
    fn json_roundtrip() {
        for p in [
            LaurentPoly::zero(),
            LaurentPoly::one(),
            LaurentPoly::monomial(-7, 0),
            LaurentPoly::z(),
            LaurentPoly::from_terms([(-4, 11.into()), (9, (-2).into())]),
        ] {
            let j = poly_to_json(&p);
            assert_eq!(poly_from_json(&j).unwrap(), p);
        }
        // Integer shorthand parses as a constant.
        assert_eq!(
            poly_from_json(&serde_json::json!(5)).unwrap(),
            LaurentPoly::monomial(5, 0)
        );
    }
}
