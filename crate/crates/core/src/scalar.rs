//! Exact multiplicative coefficients.
//!
//! A [`UnitScalar`] is an invertible scalar of the form
//! `sign * (positive rational) * (monomial in named formal parameters)`.
//! The rational part is stored factored over primes, so multiplicative
//! equations between unit scalars become integer linear equations on
//! exponent vectors (plus a parity equation for the sign).  This is exactly
//! the shape the gauge solver in [`crate::dgcat`] needs.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Invertible coefficient: `±1 * prod p_i^{e_i} * prod t_j^{f_j}` with the
/// `p_i` prime and the `t_j` named formal parameters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitScalar {
    negative: bool,
    primes: BTreeMap<u64, i64>,
    params: BTreeMap<String, i64>,
}

impl UnitScalar {
    pub fn one() -> Self {
        UnitScalar {
            negative: false,
            primes: BTreeMap::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn minus_one() -> Self {
        UnitScalar {
            negative: true,
            primes: BTreeMap::new(),
            params: BTreeMap::new(),
        }
    }

    /// Named formal parameter, e.g. a symplectic area weight or a holonomy.
    pub fn param(name: &str) -> Self {
        let mut params = BTreeMap::new();
        params.insert(name.to_string(), 1);
        UnitScalar {
            negative: false,
            primes: BTreeMap::new(),
            params,
        }
    }

    /// Nonzero integer, factored by trial division.
    pub fn from_integer(n: i64) -> Self {
        assert!(n != 0, "unit scalars are invertible; 0 is not allowed");
        let mut s = UnitScalar::one();
        s.negative = n < 0;
        let mut m = n.unsigned_abs();
        let mut p = 2u64;
        while p * p <= m {
            while m.is_multiple_of(p) {
                *s.primes.entry(p).or_insert(0) += 1;
                m /= p;
            }
            p += 1;
        }
        if m > 1 {
            *s.primes.entry(m).or_insert(0) += 1;
        }
        s
    }

    /// `num/den`, both nonzero.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        UnitScalar::from_integer(num).mul(&UnitScalar::from_integer(den).inv())
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.primes.is_empty() && self.params.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn mul(&self, other: &UnitScalar) -> UnitScalar {
        let mut out = self.clone();
        out.negative ^= other.negative;
        for (&p, &e) in &other.primes {
            let entry = out.primes.entry(p).or_insert(0);
            *entry += e;
            if *entry == 0 {
                out.primes.remove(&p);
            }
        }
        for (t, &e) in &other.params {
            let entry = out.params.entry(t.clone()).or_insert(0);
            *entry += e;
            if *entry == 0 {
                out.params.remove(t);
            }
        }
        out
    }

    pub fn inv(&self) -> UnitScalar {
        UnitScalar {
            negative: self.negative,
            primes: self.primes.iter().map(|(&p, &e)| (p, -e)).collect(),
            params: self.params.iter().map(|(t, &e)| (t.clone(), -e)).collect(),
        }
    }

    pub fn neg(&self) -> UnitScalar {
        let mut out = self.clone();
        out.negative = !out.negative;
        out
    }

    pub fn pow(&self, k: i64) -> UnitScalar {
        if k == 0 {
            return UnitScalar::one();
        }
        UnitScalar {
            negative: self.negative && k % 2 != 0,
            primes: self.primes.iter().map(|(&p, &e)| (p, e * k)).collect(),
            params: self
                .params
                .iter()
                .map(|(t, &e)| (t.clone(), e * k))
                .collect(),
        }
    }

    pub fn div(&self, other: &UnitScalar) -> UnitScalar {
        self.mul(&other.inv())
    }

    /// Exponent of a prime in the rational part.
    pub fn prime_exponent(&self, p: u64) -> i64 {
        self.primes.get(&p).copied().unwrap_or(0)
    }

    /// Exponent of a named formal parameter.
    pub fn param_exponent(&self, name: &str) -> i64 {
        self.params.get(name).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.primes.iter().map(|(&p, &e)| (p, e))
    }

    pub fn params(&self) -> impl Iterator<Item = (&str, i64)> + '_ {
        self.params.iter().map(|(t, &e)| (t.as_str(), e))
    }

    pub fn has_params(&self) -> bool {
        !self.params.is_empty()
    }

    /// Numerator and denominator of the rational part as big integers.
    pub fn rational_parts(&self) -> (BigInt, BigInt) {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&p, &e) in &self.primes {
            let base = BigInt::from(p);
            if e > 0 {
                num *= base.pow(e as u32);
            } else {
                den *= base.pow((-e) as u32);
            }
        }
        (num, den)
    }

    /// Evaluate to an exact rational, substituting `assignment` for the
    /// formal parameters.  Every parameter present must be assigned a
    /// nonzero value.
    pub fn eval(&self, assignment: &BTreeMap<String, BigRational>) -> Option<BigRational> {
        let (num, den) = self.rational_parts();
        let mut value = BigRational::new(num, den);
        if self.negative {
            value = -value;
        }
        for (t, &e) in &self.params {
            let v = assignment.get(t)?;
            if v.is_zero() {
                return None;
            }
            value *= v.pow(e as i32);
        }
        Some(value)
    }

    /// Evaluate a scalar with no formal parameters.
    pub fn eval_rational(&self) -> Option<BigRational> {
        if self.has_params() {
            return None;
        }
        self.eval(&BTreeMap::new())
    }

    /// A unit scalar from an exact nonzero rational.
    pub fn from_big_rational(r: &BigRational) -> Self {
        assert!(!r.is_zero());
        let mut out = UnitScalar::one();
        out.negative = r.is_negative();
        let factor_into = |n: &BigInt, sign: i64, out: &mut UnitScalar| {
            let mut m = n.abs();
            let mut p = BigInt::from(2u64);
            while &p * &p <= m {
                while (&m % &p).is_zero() {
                    let pu: u64 = (&p).try_into().expect("prime fits in u64");
                    let entry = out.primes.entry(pu).or_insert(0);
                    *entry += sign;
                    if *entry == 0 {
                        out.primes.remove(&pu);
                    }
                    m /= &p;
                }
                p += 1;
            }
            if m > BigInt::one() {
                let pu: u64 = (&m).try_into().expect("prime fits in u64");
                let entry = out.primes.entry(pu).or_insert(0);
                *entry += sign;
                if *entry == 0 {
                    out.primes.remove(&pu);
                }
            }
        };
        factor_into(r.numer(), 1, &mut out);
        factor_into(r.denom(), -1, &mut out);
        out
    }
}

impl fmt::Display for UnitScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        if self.negative {
            write!(f, "-")?;
        }
        let mut wrote = false;
        let (num, den) = self.rational_parts();
        if !num.is_one() || !den.is_one() {
            if den.is_one() {
                write!(f, "{num}")?;
            } else {
                write!(f, "{num}/{den}")?;
            }
            wrote = true;
        }
        for (t, &e) in &self.params {
            if wrote {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{t}")?;
            } else {
                write!(f, "{t}^{e}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for UnitScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serialized form: sign, rational numerator/denominator, parameter exponents.
#[derive(Serialize, Deserialize)]
pub struct UnitScalarRepr {
    pub sign: i8,
    pub numerator: String,
    pub denominator: String,
    pub params: BTreeMap<String, i64>,
}

impl Serialize for UnitScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (num, den) = self.rational_parts();
        UnitScalarRepr {
            sign: if self.negative { -1 } else { 1 },
            numerator: num.to_string(),
            denominator: den.to_string(),
            params: self.params.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnitScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = UnitScalarRepr::deserialize(deserializer)?;
        let num: BigInt = repr
            .numerator
            .parse()
            .map_err(serde::de::Error::custom)?;
        let den: BigInt = repr
            .denominator
            .parse()
            .map_err(serde::de::Error::custom)?;
        if num.is_zero() || den.is_zero() {
            return Err(serde::de::Error::custom("unit scalar must be nonzero"));
        }
        let mut out = UnitScalar::from_big_rational(&BigRational::new(num, den));
        out.negative = repr.sign < 0;
        for (t, e) in repr.params {
            if e != 0 {
                out.params.insert(t, e);
            }
        }
        Ok(out)
    }
}

/// Formal integer combination of terms `coefficient * item`, kept as a list
/// and compared after cancelling opposite pairs.  Unit scalars form a group,
/// not a ring, so a sum collapses only when terms cancel exactly; that is
/// all the algebra in this crate ever needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCombination<T: Ord + Clone> {
    terms: Vec<(UnitScalar, T)>,
}

impl<T: Ord + Clone> Default for UnitCombination<T> {
    fn default() -> Self {
        UnitCombination { terms: Vec::new() }
    }
}

impl<T: Ord + Clone> UnitCombination<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coeff: UnitScalar, item: T) -> Self {
        UnitCombination {
            terms: vec![(coeff, item)],
        }
    }

    pub fn push(&mut self, coeff: UnitScalar, item: T) {
        self.terms.push((coeff, item));
        self.cancel();
    }

    pub fn add(&mut self, other: &UnitCombination<T>) {
        self.terms.extend(other.terms.iter().cloned());
        self.cancel();
    }

    pub fn scale(&self, c: &UnitScalar) -> UnitCombination<T> {
        UnitCombination {
            terms: self
                .terms
                .iter()
                .map(|(k, t)| (c.mul(k), t.clone()))
                .collect(),
        }
    }

    pub fn negate(&self) -> UnitCombination<T> {
        UnitCombination {
            terms: self.terms.iter().map(|(k, t)| (k.neg(), t.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(UnitScalar, T)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(UnitScalar, T)> {
        self.terms
    }

    /// Cancel `c*t` against `-c*t` pairs and sort for canonical form.
    fn cancel(&mut self) {
        self.terms
            .sort_by(|(c1, t1), (c2, t2)| t1.cmp(t2).then_with(|| c1.cmp(c2)));
        let mut out: Vec<(UnitScalar, T)> = Vec::with_capacity(self.terms.len());
        'outer: for (c, t) in self.terms.drain(..) {
            for i in 0..out.len() {
                if out[i].1 == t && out[i].0 == c.neg() {
                    out.remove(i);
                    continue 'outer;
                }
            }
            out.push((c, t));
        }
        out.sort_by(|(c1, t1), (c2, t2)| t1.cmp(t2).then_with(|| c1.cmp(c2)));
        self.terms = out;
    }

    /// `self - other == 0` after cancellation.
    pub fn equals(&self, other: &UnitCombination<T>) -> bool {
        let mut diff = self.clone();
        diff.add(&other.negate());
        diff.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factored_arithmetic() {
        let a = UnitScalar::from_ratio(6, 35);
        let b = UnitScalar::from_ratio(35, 6);
        assert!(a.mul(&b).is_one());
        assert_eq!(a.prime_exponent(2), 1);
        assert_eq!(a.prime_exponent(5), -1);
        assert_eq!(a.prime_exponent(7), -1);
        let t = UnitScalar::param("t");
        assert_eq!(t.pow(3).param_exponent("t"), 3);
        assert!(t.mul(&t.inv()).is_one());
    }

    #[test]
    fn eval_matches_factored_form() {
        let s = UnitScalar::from_ratio(-9, 20);
        let v = s.eval_rational().unwrap();
        assert_eq!(v, BigRational::new(BigInt::from(-9), BigInt::from(20)));
        assert_eq!(UnitScalar::from_big_rational(&v), s);
    }

    #[test]
    fn combination_cancels() {
        let mut c = UnitCombination::zero();
        c.push(UnitScalar::param("t"), "g");
        c.push(UnitScalar::param("t").neg(), "g");
        assert!(c.is_zero());
        let mut d = UnitCombination::zero();
        d.push(UnitScalar::one(), "g");
        d.push(UnitScalar::param("t"), "g");
        assert_eq!(d.terms().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let s = UnitScalar::from_ratio(-14, 9).mul(&UnitScalar::param("q").pow(-2));
        let text = serde_json::to_string(&s).unwrap();
        let back: UnitScalar = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    proptest! {
        #[test]
        fn group_laws(n1 in 1i64..500, n2 in 1i64..500, d1 in 1i64..500, e in -3i64..4) {
            let a = UnitScalar::from_ratio(n1, d1).mul(&UnitScalar::param("t").pow(e));
            let b = UnitScalar::from_ratio(n2, 7);
            prop_assert!(a.mul(&a.inv()).is_one());
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.pow(2), a.mul(&a));
        }
    }
}
