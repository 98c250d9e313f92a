//! Reduced fractions of integer polynomials in `(p, s)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::gcd::{poly_div_exact, poly_gcd};
use super::poly::IntPoly;
use super::{Rational, Scalar, ScalarError};

/// Element of Q(p, s). `q` is not a variable: it is rewritten as `s^2 - p`.
///
/// Canonical form: numerator and denominator have integer coefficients, are
/// coprime including integer content, and the denominator's leading
/// coefficient (lexicographic in `p`, then `s`) is positive. Zero is `0/1`.
/// Structural equality is therefore field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamScalar {
    num: IntPoly,
    den: IntPoly,
}

impl ParamScalar {
    pub fn p() -> Self {
        Self::from_poly(IntPoly::monomial((1, 0), BigInt::one()))
    }

    pub fn s() -> Self {
        Self::from_poly(IntPoly::monomial((0, 1), BigInt::one()))
    }

    /// `s^2 - p`.
    pub fn q() -> Self {
        Self::from_poly(
            IntPoly::monomial((0, 2), BigInt::one()).sub(&IntPoly::monomial((1, 0), BigInt::one())),
        )
    }

    pub(crate) fn from_poly(num: IntPoly) -> Self {
        ParamScalar {
            num,
            den: IntPoly::one(),
        }
    }

    #[cfg(test)]
    pub(crate) fn from_parts(num: IntPoly, den: IntPoly) -> Result<Self, ScalarError> {
        reduce(num, den)
    }

    /// Substitute `p = p0`, `s = s0` (so `q = s0^2 - p0`).
    pub fn specialize(&self, p0: &Rational, s0: &Rational) -> Result<Rational, ScalarError> {
        let d = self.den.eval(p0, s0);
        if Zero::is_zero(&d) {
            return Err(ScalarError::PoleAtPoint);
        }
        Ok(self.num.eval(p0, s0) / d)
    }

    /// Homogeneity weight `w` with `x(λp, λq) = λ^w x(p, q)`.
    ///
    /// `s` carries weight 1/2 and `p` weight 1. Zero has no weight.
    pub fn weight_of(&self) -> Result<Rational, ScalarError> {
        if self.num.is_zero() {
            return Err(ScalarError::NotHomogeneous);
        }
        let wn = self
            .num
            .homogeneous_weight()
            .ok_or(ScalarError::NotHomogeneous)?;
        let wd = self
            .den
            .homogeneous_weight()
            .ok_or(ScalarError::NotHomogeneous)?;
        Ok(Rational::new(
            BigInt::from(wn as i64 - wd as i64),
            BigInt::from(2),
        ))
    }

    /// True if the denominator is a constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, n: i64) -> Result<Self, ScalarError> {
        let base = if n < 0 { self.try_inv()? } else { self.clone() };
        Ok(base.pow_u(n.unsigned_abs() as u32))
    }

    /// Rational scalar factor `c` and primitive parts with `self = c·N/D`.
    fn split_content(&self) -> (Rational, IntPoly, IntPoly) {
        let mut cn = self.num.content();
        if self
            .num
            .leading()
            .is_some_and(|(_, c)| c.is_negative())
        {
            cn = -cn;
        }
        let cd = self.den.content();
        (
            Rational::new(cn.clone(), cd.clone()),
            self.num.div_int_exact(&cn),
            self.den.div_int_exact(&cd),
        )
    }
}

fn reduce(mut num: IntPoly, mut den: IntPoly) -> Result<ParamScalar, ScalarError> {
    if den.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    if num.is_zero() {
        return Ok(ParamScalar {
            num,
            den: IntPoly::one(),
        });
    }
    let (np, ns) = num.min_exps();
    let (dp, ds) = den.min_exps();
    let shift = (np.min(dp), ns.min(ds));
    if shift != (0, 0) {
        num = num.shift_down(shift);
        den = den.shift_down(shift);
    }
    let g = num.content().gcd(&den.content());
    if !g.is_one() {
        num = num.div_int_exact(&g);
        den = den.div_int_exact(&g);
    }
    // A single-term side leaves only monomial and integer content to cancel.
    if !num.is_single_term() && !den.is_single_term() {
        let g = poly_gcd(&num, &den);
        if !g.is_constant() {
            num = poly_div_exact(&num, &g).expect("gcd divides numerator");
            den = poly_div_exact(&den, &g).expect("gcd divides denominator");
            let c = num.content().gcd(&den.content());
            if !c.is_one() {
                num = num.div_int_exact(&c);
                den = den.div_int_exact(&c);
            }
        }
    }
    if den.leading().is_some_and(|(_, c)| c.is_negative()) {
        num = num.neg();
        den = den.neg();
    }
    Ok(ParamScalar { num, den })
}

fn lcm_monomial(a: &IntPoly, b: &IntPoly) -> ((u32, u32), BigInt) {
    let (ea, ca) = &a.terms()[0];
    let (eb, cb) = &b.terms()[0];
    ((ea.0.max(eb.0), ea.1.max(eb.1)), ca.lcm(cb))
}

fn cofactor(l: &((u32, u32), BigInt), m: &IntPoly) -> IntPoly {
    let (e, c) = &m.terms()[0];
    let mut k = &l.1 / c;
    if c.is_negative() {
        k = -k;
    }
    IntPoly::monomial((l.0 .0 - e.0, l.0 .1 - e.1), k)
}

impl Scalar for ParamScalar {
    fn zero() -> Self {
        Self::from_poly(IntPoly::zero())
    }
    fn one() -> Self {
        Self::from_poly(IntPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    fn from_rational(r: &Rational) -> Self {
        ParamScalar {
            num: IntPoly::constant(r.numer().clone()),
            den: if Zero::is_zero(r) {
                IntPoly::one()
            } else {
                IntPoly::constant(r.denom().clone())
            },
        }
    }
    fn plus(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let res = if self.den == other.den {
            reduce(self.num.add(&other.num), self.den.clone())
        } else if self.den.is_single_term() && other.den.is_single_term() {
            let l = lcm_monomial(&self.den, &other.den);
            let a = self.num.mul(&cofactor(&l, &self.den));
            let b = other.num.mul(&cofactor(&l, &other.den));
            reduce(a.add(&b), IntPoly::monomial(l.0, l.1))
        } else {
            reduce(
                self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                self.den.mul(&other.den),
            )
        };
        res.expect("nonzero denominators")
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        reduce(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero denominators")
    }
    fn negate(&self) -> Self {
        ParamScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn try_inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        reduce(self.den.clone(), self.num.clone())
    }
    fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return Self::zero();
        }
        reduce(
            self.num.mul_int(r.numer()),
            self.den.mul_int(r.denom()),
        )
        .expect("nonzero denominator")
    }
    fn parse_text(text: &str) -> Result<Self, ScalarError> {
        super::parse::parse_param(text)
    }
    fn as_rational(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(Rational::new(n, d))
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (c, n, d) = self.split_content();
        if n.is_one() && d.is_one() {
            return write!(f, "{c}");
        }
        if !One::is_one(&c) {
            write!(f, "({c})*")?;
        }
        write!(f, "({n})")?;
        if !d.is_one() {
            write!(f, "/({d})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
