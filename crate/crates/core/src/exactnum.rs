//! Exact rational numbers and open intervals.
//!
//! Every quantity in this crate (coordinates, widths, distances, Lipschitz
//! constants) is a [`Rational`]. Values are always kept in lowest terms with a
//! positive denominator, so structural equality is numeric equality.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("interval endpoints out of order: ({left}, {right})")]
    Reversed { left: Rational, right: Rational },
}

/// An exact rational number backed by arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// `num / den`, reduced. Fails only on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self, NumError> {
        if den == 0 {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num.into(), den.into())))
    }

    /// Shorthand for literals in code and tests; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("zero denominator")
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, NumError> {
        if den.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^(-k)`.
    pub fn pow2_neg(k: u32) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::one() << k as usize))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn checked_div(&self, other: &Rational) -> Option<Rational> {
        if other.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &other.0))
        }
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Rational) -> Rational {
        (self + other) / Rational::from_integer(2)
    }

    /// Lossy conversion, for drawing only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest multiple of `step` that is `<= self`. `step` must be positive.
    pub fn floor_to(&self, step: &Rational) -> Rational {
        let q = (&self.0 / &step.0).floor();
        Rational(q * &step.0)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumError;

    /// Accepts `p/q` or a bare integer `p`, with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NumError::Parse(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| err())?;
        let den: BigInt = d.parse().map_err(|_| err())?;
        Rational::from_bigints(num, den).map_err(|_| err())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Panics on a zero divisor, like integer division; use `checked_div` when unsure.
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Shorthand used throughout tests and fixtures: `q(1, 2)` is one half.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::frac(num, den)
}

/// An open interval `(left, right)`; empty when `left == right`.
///
/// Serialized as a two-element array of rational strings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenInterval {
    left: Rational,
    right: Rational,
}

impl OpenInterval {
    pub fn new(left: Rational, right: Rational) -> Result<Self, NumError> {
        if left > right {
            return Err(NumError::Reversed { left, right });
        }
        Ok(OpenInterval { left, right })
    }

    /// The empty interval located at `at`.
    pub fn empty_at(at: Rational) -> Self {
        OpenInterval { left: at.clone(), right: at }
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn is_empty(&self) -> bool {
        self.left >= self.right
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    /// Strict membership: `left < x < right`.
    pub fn contains_point(&self, x: &Rational) -> bool {
        &self.left < x && x < &self.right
    }

    /// Whether the two open sets share a point.
    pub fn intersects(&self, other: &OpenInterval) -> bool {
        !self.is_empty()
            && !other.is_empty()
            && self.left < other.right
            && other.left < self.right
    }

    /// Set containment `other ⊆ self`. The empty set is contained in everything.
    pub fn contains(&self, other: &OpenInterval) -> bool {
        other.is_empty() || (self.left <= other.left && other.right <= self.right)
    }

    pub fn shifted(&self, by: &Rational) -> OpenInterval {
        OpenInterval { left: &self.left + by, right: &self.right + by }
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

impl fmt::Debug for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for OpenInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.left, &self.right).serialize(s)
    }
}

impl<'de> Deserialize<'de> for OpenInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (left, right) = <(Rational, Rational)>::deserialize(d)?;
        OpenInterval::new(left, right).map_err(serde::de::Error::custom)
    }
}

/// A finite union of open intervals, kept as disjoint sorted components.
///
/// Two intervals that only touch at an endpoint stay separate components,
/// since the shared endpoint is not covered.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalUnion {
    parts: Vec<OpenInterval>,
}

impl IntervalUnion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, iv: &OpenInterval) {
        if iv.is_empty() {
            return;
        }
        let mut merged = iv.clone();
        let mut kept = Vec::with_capacity(self.parts.len() + 1);
        for p in self.parts.drain(..) {
            if p.intersects(&merged) {
                let left = p.left.clone().min(merged.left.clone());
                let right = p.right.clone().max(merged.right.clone());
                merged = OpenInterval { left, right };
            } else {
                kept.push(p);
            }
        }
        kept.push(merged);
        kept.sort();
        self.parts = kept;
    }

    /// `iv ⊆ union`; an open interval is connected, so it must sit inside one component.
    pub fn covers(&self, iv: &OpenInterval) -> bool {
        iv.is_empty() || self.parts.iter().any(|p| p.contains(iv))
    }

    pub fn parts(&self) -> &[OpenInterval] {
        &self.parts
    }

    pub fn measure(&self) -> Rational {
        self.parts.iter().map(|p| p.length()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_reduces() {
        assert_eq!((q(1, 3) + q(1, 6)).to_string(), "1/2");
    }

    #[test]
    fn zero_prints_canonically() {
        assert_eq!(Rational::zero().to_string(), "0/1");
        assert_eq!((q(1, 4) - q(1, 4)).to_string(), "0/1");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(Rational::new(1, 0), Err(NumError::DivisionByZero));
        assert!("3/0".parse::<Rational>().is_err());
        assert!(q(1, 2).checked_div(&Rational::zero()).is_none());
    }

    #[test]
    fn parsing_normalizes() {
        assert_eq!("2/4".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("-3/-6".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("5".parse::<Rational>().unwrap(), q(5, 1));
        assert!("1/2/3".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(Rational::pow2_neg(0), q(1, 1));
        assert_eq!(Rational::pow2_neg(5), q(1, 32));
    }

    #[test]
    fn floor_to_grid() {
        assert_eq!(q(7, 10).floor_to(&q(1, 4)), q(1, 2));
        assert_eq!(q(3, 4).floor_to(&q(1, 4)), q(3, 4));
    }

    #[test]
    fn interval_basics() {
        let a = OpenInterval::new(q(1, 4), q(1, 2)).unwrap();
        let b = OpenInterval::new(q(1, 2), q(3, 4)).unwrap();
        assert!(!a.intersects(&b));
        assert!(a.contains_point(&q(1, 3)));
        assert!(!a.contains_point(&q(1, 2)));
        assert_eq!(a.length(), q(1, 4));
        assert!(OpenInterval::new(q(1, 2), q(1, 4)).is_err());
        assert!(OpenInterval::empty_at(q(1, 3)).is_empty());
    }

    #[test]
    fn union_keeps_touching_parts_apart() {
        let mut u = IntervalUnion::new();
        u.insert(&OpenInterval::new(q(0, 1), q(1, 2)).unwrap());
        u.insert(&OpenInterval::new(q(1, 2), q(1, 1)).unwrap());
        assert_eq!(u.parts().len(), 2);
        assert!(!u.covers(&OpenInterval::new(q(1, 4), q(3, 4)).unwrap()));
        u.insert(&OpenInterval::new(q(1, 3), q(2, 3)).unwrap());
        assert_eq!(u.parts().len(), 1);
        assert!(u.covers(&OpenInterval::new(q(1, 4), q(3, 4)).unwrap()));
        assert_eq!(u.measure(), q(1, 1));
    }

    #[test]
    fn serde_string_form() {
        let iv = OpenInterval::new(q(1, 3), q(19, 48)).unwrap();
        let s = serde_json::to_string(&iv).unwrap();
        assert_eq!(s, r#"["1/3","19/48"]"#);
        let back: OpenInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, iv);
        assert!(serde_json::from_str::<OpenInterval>(r#"["1/2","1/3"]"#).is_err());
    }
}
