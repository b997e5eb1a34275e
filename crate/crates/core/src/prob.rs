//! Exact nonnegative rationals.
//!
//! Every probability, weight and ratio in the crate is a [`Prob`]. There is no
//! floating point anywhere in evaluation; `to_f64` exists only for CSV
//! summaries.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::UaiError;

/// An exact nonnegative rational number.
///
/// Values are allowed to exceed one (mixture weights before normalization,
/// domination ratios); the `<= 1` bound is a property of evaluations and is
/// checked where it matters, not enforced here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Prob(BigRational);

impl Prob {
    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Prob(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `2^{-k}`.
    pub fn dyadic(k: u32) -> Self {
        Prob(BigRational::new(BigInt::one(), BigInt::one() << k as usize))
    }

    /// `count / 2^k`.
    pub fn dyadic_count(count: u64, k: u32) -> Self {
        Prob(BigRational::new(BigInt::from(count), BigInt::one() << k as usize))
    }

    pub fn from_rational(r: BigRational) -> Option<Self> {
        (!r.is_negative()).then_some(Prob(r))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `self - rhs`, or `None` if the result would be negative.
    pub fn checked_sub(&self, rhs: &Prob) -> Option<Prob> {
        Prob::from_rational(&self.0 - &rhs.0)
    }

    /// `self / rhs`, or `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Prob) -> Option<Prob> {
        (!rhs.is_zero()).then(|| Prob(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: u32) -> Prob {
        let mut acc = Prob::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Lossy conversion, for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prob({self})")
    }
}

impl FromStr for Prob {
    type Err = UaiError;

    /// Accepts `"3/4"`, `"1"` or `"0"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || UaiError::ParseProb(s.to_string());
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Prob::from_rational(BigRational::new(num, den)).ok_or_else(bad)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Prob> for &Prob {
            type Output = Prob;
            fn $method(self, rhs: &Prob) -> Prob {
                Prob(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Prob> for Prob {
            type Output = Prob;
            fn $method(self, rhs: Prob) -> Prob {
                Prob(self.0 $op rhs.0)
            }
        }
        impl $trait<&Prob> for Prob {
            type Output = Prob;
            fn $method(self, rhs: &Prob) -> Prob {
                Prob(self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Mul, mul, *);

impl Div<&Prob> for &Prob {
    type Output = Prob;
    /// Panics on division by zero; use [`Prob::checked_div`] when the
    /// denominator comes from an evaluation.
    fn div(self, rhs: &Prob) -> Prob {
        assert!(!rhs.is_zero(), "division by zero probability");
        Prob(&self.0 / &rhs.0)
    }
}

impl AddAssign<&Prob> for Prob {
    fn add_assign(&mut self, rhs: &Prob) {
        self.0 += &rhs.0;
    }
}

impl MulAssign<&Prob> for Prob {
    fn mul_assign(&mut self, rhs: &Prob) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Prob {
    fn sum<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(), |acc, p| acc + p)
    }
}

impl<'a> Sum<&'a Prob> for Prob {
    fn sum<I: Iterator<Item = &'a Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(), |acc, p| acc + p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let p: Prob = "6/8".parse().unwrap();
        assert_eq!(p.to_string(), "3/4");
        assert_eq!("1".parse::<Prob>().unwrap(), Prob::one());
        assert!("-1/2".parse::<Prob>().is_err());
        assert!("1/0".parse::<Prob>().is_err());
        assert!("half".parse::<Prob>().is_err());
    }

    #[test]
    fn dyadic_values() {
        assert_eq!(Prob::dyadic(3), Prob::new(1, 8));
        assert_eq!(Prob::dyadic_count(3, 2), Prob::new(3, 4));
        assert_eq!(Prob::new(1, 2).pow(3), Prob::new(1, 8));
    }

    #[test]
    fn checked_ops() {
        let a = Prob::new(1, 4);
        let b = Prob::new(1, 2);
        assert_eq!(b.checked_sub(&a), Some(Prob::new(1, 4)));
        assert_eq!(a.checked_sub(&b), None);
        assert_eq!(a.checked_div(&Prob::zero()), None);
        assert_eq!(a.checked_div(&b), Some(b.clone()));
    }

    proptest! {
        #[test]
        fn add_then_sub_is_exact(pn in 0u64..10_000, pd in 1u64..10_000, qn in 0u64..10_000, qd in 1u64..10_000) {
            let p = Prob::new(pn, pd);
            let q = Prob::new(qn, qd);
            prop_assert_eq!((&p + &q).checked_sub(&q), Some(p));
        }
    }
}
