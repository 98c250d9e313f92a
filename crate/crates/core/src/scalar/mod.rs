//! Exact coefficient domains: arbitrary-precision rationals and the field
//! Q(p, s), where `s` stands for the square root of `p + q`.

mod gcd;
mod param;
mod parse;
mod poly;

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use param::ParamScalar;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("expression is not (p,q)-homogeneous")]
    NotHomogeneous,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Exact field arithmetic shared by [`Rational`] and [`ParamScalar`].
pub trait Scalar:
    Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn try_inv(&self) -> Result<Self, ScalarError>;
    fn parse_text(text: &str) -> Result<Self, ScalarError>;
    /// The value as a rational, if it is a constant.
    fn as_rational(&self) -> Option<Rational>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.times(&other.try_inv()?))
    }

    fn scale(&self, r: &Rational) -> Self {
        self.times(&Self::from_rational(r))
    }

    fn plus_assign(&mut self, other: &Self) {
        *self = self.plus(other);
    }

    fn pow_u(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.times(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Result<Self, ScalarError> {
        if Zero::is_zero(self) {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn parse_text(text: &str) -> Result<Self, ScalarError> {
        let t = text.trim();
        if let Ok(r) = Rational::from_str(t) {
            return Ok(r);
        }
        ParamScalar::parse_text(t)?
            .as_rational()
            .ok_or_else(|| ScalarError::Parse {
                pos: 0,
                msg: "expression depends on p or s".into(),
            })
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn plus_assign(&mut self, other: &Self) {
        *self += other;
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sum() {
        assert_eq!(rat(1, 2).plus(&rat(1, 3)), rat(5, 6));
    }

    #[test]
    fn rational_zero_inverse_errors() {
        assert_eq!(<Rational as Scalar>::zero().try_inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn rational_parse_accepts_expressions() {
        assert_eq!(Rational::parse_text("-5/7").unwrap(), rat(-5, 7));
        assert_eq!(Rational::parse_text("(1/2 + 1/3)*6").unwrap(), rat(5, 1));
        assert!(Rational::parse_text("p + 1").is_err());
    }
}
