//! Exact rational worth used for characteristic values and allocations.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GameError;

/// An exact rational number in canonical form.
///
/// Serialized as `"p/q"`, or as a plain integer string when the denominator is one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GameValue(BigRational);

impl GameValue {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Self(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`, reduced. Fails on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self, GameError> {
        Self::from_bigints(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, GameError> {
        if den.is_zero() {
            return Err(GameError::ZeroDenominator);
        }
        Ok(Self(BigRational::new(num, den)))
    }

    pub(crate) fn from_i128_ratio(num: i128, den: i128) -> Self {
        Self(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for GameValue {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<i64> for GameValue {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for GameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for GameValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GameValue {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || GameError::InvalidRational(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let num: BigInt = p.trim().parse().map_err(|_| bad())?;
                let den: BigInt = q.trim().parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(GameError::ZeroDenominator);
                }
                Ok(Self(BigRational::new(num, den)))
            }
            None => {
                let num: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Self(BigRational::from_integer(num)))
            }
        }
    }
}

impl Serialize for GameValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GameValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = GameValue;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<GameValue, E> {
                Ok(GameValue::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<GameValue, E> {
                Ok(GameValue(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<GameValue, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GameValue {
            type Output = GameValue;
            fn $method(self, rhs: GameValue) -> GameValue {
                GameValue(self.0.$method(rhs.0))
            }
        }

        impl<'a> $trait<&'a GameValue> for &'a GameValue {
            type Output = GameValue;
            fn $method(self, rhs: &'a GameValue) -> GameValue {
                GameValue((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&GameValue> for GameValue {
    fn add_assign(&mut self, rhs: &GameValue) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&GameValue> for GameValue {
    fn sub_assign(&mut self, rhs: &GameValue) {
        self.0 -= &rhs.0;
    }
}

impl Neg for GameValue {
    type Output = GameValue;
    fn neg(self) -> GameValue {
        GameValue(-self.0)
    }
}

impl Sum for GameValue {
    fn sum<I: Iterator<Item = GameValue>>(iter: I) -> Self {
        iter.fold(GameValue::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a GameValue> for GameValue {
    fn sum<I: Iterator<Item = &'a GameValue>>(iter: I) -> Self {
        iter.fold(GameValue::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

/// Shorthand used heavily in tests and closed-form expectations.
pub fn q(num: i64, den: i64) -> GameValue {
    GameValue::new(num, den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_display() {
        assert_eq!(q(10, 6).to_string(), "5/3");
        assert_eq!(q(-4, 2).to_string(), "-2");
        assert_eq!(q(3, -9).to_string(), "-1/3");
        assert_eq!(GameValue::zero().to_string(), "0");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("1/0".parse::<GameValue>(), Err(GameError::ZeroDenominator)));
        assert!(matches!("x".parse::<GameValue>(), Err(GameError::InvalidRational(_))));
        assert!(matches!(
            "1/2/3".parse::<GameValue>(),
            Err(GameError::InvalidRational(_))
        ));
    }

    #[test]
    fn json_accepts_integers_and_strings() {
        let v: Vec<GameValue> = serde_json::from_str(r#"[0, "5/3", "-7", 12]"#).unwrap();
        assert_eq!(v, vec![q(0, 1), q(5, 3), q(-7, 1), q(12, 1)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["0","5/3","-7","12"]"#);
    }

    proptest! {
        #[test]
        fn string_round_trip(p in -10_000i64..10_000, d in 1i64..500) {
            let v = q(p, d);
            let back: GameValue = v.to_string().parse().unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(back.to_string(), v.to_string());
        }
    }
}
