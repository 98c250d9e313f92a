//! Truncated Laurent series in one variable `z` over a [`Scalar`] domain.
//!
//! Every value records the exclusive order `trunc` up to which its
//! coefficients are exact, or `None` for an exact Laurent polynomial.
//! Reading at or beyond `trunc` is an error, never a silent zero.

use std::fmt;

use num_bigint::BigInt;

use crate::scalar::{Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("coefficient of z^{requested} is beyond the truncation order {trunc}")]
    Truncated { requested: i64, trunc: i64 },
    #[error("nonzero z^-1 coefficient has no antiderivative")]
    NonzeroResidue,
    #[error("operation needs a truncated input: exact input has an infinite expansion")]
    NeedsTruncation,
    #[error("series is not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("invalid argument: {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub type SeriesResult<T> = Result<T, SeriesError>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries<S: Scalar> {
    min_exp: i64,
    coeffs: Vec<S>,
    trunc: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<S: Scalar> LaurentSeries<S> {
    /// Builds and normalizes: drops coefficients at or beyond `trunc` and
    /// strips zero coefficients at both ends.
    pub fn new(min_exp: i64, mut coeffs: Vec<S>, trunc: Option<i64>) -> Self {
        if let Some(t) = trunc {
            let keep = (t - min_exp).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return LaurentSeries {
                min_exp: trunc.unwrap_or(0),
                coeffs: Vec::new(),
                trunc,
            };
        }
        coeffs.drain(..lead);
        LaurentSeries {
            min_exp: min_exp + lead as i64,
            coeffs,
            trunc,
        }
    }

    pub fn zero() -> Self {
        Self::new(0, Vec::new(), None)
    }

    /// `O(z^trunc)`.
    pub fn zero_to(trunc: i64) -> Self {
        Self::new(trunc, Vec::new(), Some(trunc))
    }

    pub fn monomial(c: S, e: i64) -> Self {
        Self::new(e, vec![c], None)
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// The series `z`.
    pub fn var() -> Self {
        Self::monomial(S::one(), 1)
    }

    /// Series with `coeff(e) = f(e)` for `e` in `[min_exp, trunc)`.
    pub fn from_fn(min_exp: i64, trunc: i64, f: impl Fn(i64) -> S) -> Self {
        Self::new(min_exp, (min_exp..trunc).map(f).collect(), Some(trunc))
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// True if all known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the lowest nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.min_exp)
    }

    /// Lower bound on the valuation, valid also for an inexact zero.
    fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.trunc
        } else {
            Some(self.min_exp)
        }
    }

    /// Highest stored exponent.
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.min_exp + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, m: i64) -> SeriesResult<S> {
        if let Some(t) = self.trunc {
            if m >= t {
                return Err(SeriesError::Truncated {
                    requested: m,
                    trunc: t,
                });
            }
        }
        Ok(self.coeff_unchecked(m))
    }

    fn coeff_unchecked(&self, m: i64) -> S {
        let i = m - self.min_exp;
        if i < 0 || i >= self.coeffs.len() as i64 {
            S::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    fn coeff_ref(&self, m: i64) -> Option<&S> {
        let i = m - self.min_exp;
        if i < 0 {
            None
        } else {
            self.coeffs.get(i as usize)
        }
    }

    pub fn residue(&self) -> SeriesResult<S> {
        self.coeff(-1)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.min_exp + i as i64, c))
    }

    /// Lowers the truncation order to `t` (never raises it).
    pub fn truncate(&self, t: i64) -> Self {
        Self::new(self.min_exp, self.coeffs.clone(), min_opt(self.trunc, Some(t)))
    }

    /// Asserts that the stored coefficients are exact up to `t`. Used by
    /// Newton iterations whose correction step provably doubles precision.
    fn remark_trunc(mut self, t: i64) -> Self {
        if self.coeffs.is_empty() {
            self.min_exp = t;
        }
        self.trunc = Some(t);
        self
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T, ScalarError>) -> SeriesResult<LaurentSeries<T>> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        Ok(LaurentSeries::new(self.min_exp, coeffs, self.trunc))
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| c.negate()).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(
            self.min_exp,
            self.coeffs.iter().map(|x| x.times(c)).collect(),
            self.trunc,
        )
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        Self::new(
            self.min_exp,
            self.coeffs.iter().map(|x| x.scale(r)).collect(),
            self.trunc,
        )
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc.map(|t| t + k),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = min_opt(self.trunc, other.trunc);
        if self.coeffs.is_empty() {
            return other.truncate_opt(trunc);
        }
        if other.coeffs.is_empty() {
            return self.truncate_opt(trunc);
        }
        let lo = self.min_exp.min(other.min_exp);
        let hi = self.top().unwrap().max(other.top().unwrap()) + 1;
        let hi = trunc.map_or(hi, |t| hi.min(t));
        let coeffs = (lo..hi)
            .map(|e| match (self.coeff_ref(e), other.coeff_ref(e)) {
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => S::zero(),
            })
            .collect();
        Self::new(lo, coeffs, trunc)
    }

    fn truncate_opt(&self, t: Option<i64>) -> Self {
        match t {
            Some(t) => self.truncate(t),
            None => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let trunc = match (self.valuation(), other.valuation()) {
            (Some(va), Some(vb)) => min_opt(
                other.trunc.map(|t| t + va),
                self.trunc.map(|t| t + vb),
            ),
            // Exact zero times anything is exact zero.
            _ => return Self::zero(),
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(0, Vec::new(), trunc);
        }
        let lo = self.min_exp + other.min_exp;
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = match trunc {
            Some(t) => ((t - lo).max(0) as usize).min(full),
            None => full,
        };
        let mut out = vec![S::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j].plus_assign(&a.times(b));
                }
            }
        }
        Self::new(lo, out, trunc)
    }

    /// Multiplicative inverse. Exact multi-term input needs truncation first.
    pub fn inv(&self) -> SeriesResult<Self> {
        if self.coeffs.is_empty() {
            return Err(SeriesError::NotInvertible("zero series"));
        }
        let a = self.min_exp;
        let c0inv = self.coeffs[0].try_inv()?;
        let rel = match self.trunc {
            None if self.coeffs.len() == 1 => return Ok(Self::monomial(c0inv, -a)),
            None => return Err(SeriesError::NeedsTruncation),
            Some(t) => (t - a) as usize,
        };
        let mut d: Vec<S> = Vec::with_capacity(rel);
        d.push(c0inv.clone());
        for n in 1..rel {
            let mut acc = S::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                let ck = &self.coeffs[k];
                if !ck.is_zero() {
                    acc.plus_assign(&ck.times(&d[n - k]));
                }
            }
            d.push(acc.times(&c0inv).negate());
        }
        Ok(Self::new(-a, d, Some(-a + rel as i64)))
    }

    pub fn div(&self, other: &Self) -> SeriesResult<Self> {
        if other.is_exact() && other.coeffs.len() > 1 {
            // Divide within the numerator's precision when the divisor is exact.
            let t = self.trunc.ok_or(SeriesError::NeedsTruncation)?;
            let vb = other.min_exp;
            let va = self.valuation().unwrap_or(t);
            let rel = t - va;
            return Ok(self.mul(&other.truncate(vb + rel).inv()?));
        }
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents go through [`Self::inv`].
    pub fn pow_int(&self, n: i64) -> SeriesResult<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.times(&S::from_int(self.min_exp + i as i64)))
            .collect();
        Self::new(self.min_exp - 1, coeffs, self.trunc.map(|t| t - 1))
    }

    /// Errors if the `z^-1` coefficient is nonzero or not known.
    pub fn antiderivative(&self) -> SeriesResult<Self> {
        if !self.coeff(-1)?.is_zero() {
            return Err(SeriesError::NonzeroResidue);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = self.min_exp + i as i64;
                if e == -1 {
                    S::zero()
                } else {
                    c.scale(&Rational::new(BigInt::from(1), BigInt::from(e + 1)))
                }
            })
            .collect();
        Ok(Self::new(self.min_exp + 1, coeffs, self.trunc.map(|t| t + 1)))
    }

    /// Part with exponents of the given parity.
    pub fn parity_part(&self, odd: bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.min_exp + i as i64).rem_euclid(2) == odd as i64 {
                    c.clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        Self::new(self.min_exp, coeffs, self.trunc)
    }

    /// `F(c·z)`.
    pub fn rescale_var(&self, c: &S) -> SeriesResult<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let cinv = if self.min_exp < 0 { Some(c.try_inv()?) } else { None };
        for (i, x) in self.coeffs.iter().enumerate() {
            let e = self.min_exp + i as i64;
            let f = if e >= 0 {
                c.pow_u(e as u32)
            } else {
                cinv.as_ref().unwrap().pow_u((-e) as u32)
            };
            out.push(x.times(&f));
        }
        Ok(Self::new(self.min_exp, out, self.trunc))
    }

    /// `F(G(z))`.
    ///
    /// Exact `F` composes with any `G` (negative powers need `G` invertible).
    /// Truncated `F` requires `ord(G) >= 1`; the result is then exact below
    /// `ord(G)·trunc(F)` and within what `G`'s own precision supports.
    pub fn compose(&self, g: &Self) -> SeriesResult<Self> {
        let Some(m) = self.order() else {
            return match self.trunc {
                None => Ok(Self::zero()),
                Some(tf) => {
                    let v = g.order().ok_or(SeriesError::Invalid("inner series is zero"))?;
                    if v < 1 {
                        return Err(SeriesError::Invalid("inner series must have positive order"));
                    }
                    Ok(Self::zero_to(v * tf))
                }
            };
        };
        let top = self.top().unwrap();
        match self.trunc {
            None => {
                let mut p = Self::constant(self.coeff_unchecked(top));
                for n in (m..top).rev() {
                    p = p.mul(g).add(&Self::constant(self.coeff_unchecked(n)));
                }
                Ok(g.pow_int(m)?.mul(&p))
            }
            Some(tf) => {
                let v = g.order().ok_or(SeriesError::Invalid("inner series is zero"))?;
                if v < 1 {
                    return Err(SeriesError::Invalid("inner series must have positive order"));
                }
                let cap = v * tf;
                let pcap = cap - v * m;
                let gc = g.truncate(v + pcap);
                let mut p = Self::constant(self.coeff_unchecked(top)).truncate(pcap);
                for n in (m..top).rev() {
                    p = p
                        .mul(&gc)
                        .add(&Self::constant(self.coeff_unchecked(n)))
                        .truncate(pcap);
                }
                let gm = if m >= 0 {
                    gc.pow_int(m)?
                } else {
                    gc.inv()?.pow_int(-m)?
                };
                Ok(gm.mul(&p).truncate(cap))
            }
        }
    }

    /// Compositional inverse of `F = c1·z + O(z^2)`, by Newton iteration.
    pub fn revert(&self) -> SeriesResult<Self> {
        let target = self.trunc.ok_or(SeriesError::NeedsTruncation)?;
        let c1 = self.coeff(1)?;
        if self.order() != Some(1) || c1.is_zero() {
            return Err(SeriesError::NotInvertible("leading term must be c1*z with c1 != 0"));
        }
        let c1inv = c1.try_inv()?;
        let mut g = Self::monomial(c1inv, 1).truncate(2.min(target));
        let fp = self.derivative();
        let mut prec = 2;
        while prec < target {
            prec = (2 * prec).min(target);
            let gp = g.remark_trunc(prec);
            let e = self.truncate(prec).compose(&gp)?.sub(&Self::var());
            let d = fp.truncate(prec - 1).compose(&gp)?;
            g = gp.sub(&e.div(&d)?).truncate(prec);
        }
        Ok(g)
    }

    /// `F^r` for `F = 1 + O(z)` and rational `r`, via the recurrence
    /// `n g_n = sum_{k=1}^{n} ((r+1)k - n) f_k g_{n-k}`.
    pub fn pow_unit(&self, r: &Rational) -> SeriesResult<Self> {
        if !self.coeff(0)?.is_one() || self.min_exp < 0 {
            return Err(SeriesError::Invalid("series must be 1 + O(z)"));
        }
        let t = self.trunc.ok_or(SeriesError::NeedsTruncation)?;
        let n_max = t as usize;
        let r1 = r + Rational::from_integer(BigInt::from(1));
        let f: Vec<S> = (0..n_max as i64).map(|k| self.coeff_unchecked(k)).collect();
        let mut g: Vec<S> = Vec::with_capacity(n_max);
        g.push(S::one());
        for n in 1..n_max {
            let mut acc = S::zero();
            for k in 1..=n {
                if f[k].is_zero() {
                    continue;
                }
                let w = &r1 * Rational::from_integer(BigInt::from(k)) - Rational::from_integer(BigInt::from(n));
                if w == Rational::from_integer(BigInt::from(0)) {
                    continue;
                }
                acc.plus_assign(&f[k].times(&g[n - k]).scale(&w));
            }
            g.push(acc.scale(&Rational::new(BigInt::from(1), BigInt::from(n))));
        }
        Ok(Self::new(0, g, Some(t)))
    }

    /// Square root of a series `1 + O(z)`.
    pub fn sqrt_unit(&self) -> SeriesResult<Self> {
        self.pow_unit(&Rational::new(BigInt::from(1), BigInt::from(2)))
    }

    fn require_positive_order(&self) -> SeriesResult<i64> {
        let t = self.trunc.ok_or(SeriesError::NeedsTruncation)?;
        if self.valuation().is_some_and(|v| v < 1) {
            return Err(SeriesError::Invalid("argument must have positive order"));
        }
        Ok(t)
    }

    /// `log(1 + F)` for `ord(F) >= 1`.
    pub fn log1p(&self) -> SeriesResult<Self> {
        let t = self.require_positive_order()?;
        let one_plus = Self::one().add(self);
        let integrand = self.derivative().mul(&one_plus.inv()?);
        Ok(integrand.antiderivative()?.truncate(t))
    }

    /// `exp(F)` for `ord(F) >= 1`.
    pub fn exp(&self) -> SeriesResult<Self> {
        let t = self.require_positive_order()?;
        let n_max = t.max(0) as usize;
        let f: Vec<S> = (0..n_max as i64).map(|k| self.coeff_unchecked(k)).collect();
        let mut e: Vec<S> = Vec::with_capacity(n_max);
        e.push(S::one());
        for n in 1..n_max {
            let mut acc = S::zero();
            for k in 1..=n {
                if !f[k].is_zero() {
                    acc.plus_assign(&f[k].times(&e[n - k]).times(&S::from_int(k as i64)));
                }
            }
            e.push(acc.scale(&Rational::new(BigInt::from(1), BigInt::from(n))));
        }
        Ok(Self::new(0, e, Some(t)))
    }

    /// `artanh(F)` for `ord(F) >= 1`.
    pub fn arctanh(&self) -> SeriesResult<Self> {
        let t = self.require_positive_order()?;
        let den = Self::one().sub(&self.mul(self));
        let integrand = self.derivative().mul(&den.inv()?);
        Ok(integrand.antiderivative()?.truncate(t))
    }

    /// `z·sqrt(2x/z^2)` for `x = z^2/2 + O(z^3)`: the square root `f` with
    /// `f^2/2 = x` and `f = z + O(z^2)`.
    pub fn sqrt_two_x(&self) -> SeriesResult<Self> {
        let u = self.shift(-2).scale_rational(&Rational::from_integer(BigInt::from(2)));
        Ok(u.sqrt_unit()?.shift(1))
    }

    /// Time-`t` flow of the vector field `V(z)∂_z` applied to `z`:
    /// `sum_n t^n/n! D^n(z)` with `D g = V g'`, exact below `trunc`.
    pub fn flow_of_field(v: &Self, time: &S, trunc: i64) -> SeriesResult<Self> {
        if v.valuation().is_some_and(|o| o < 2) {
            return Err(SeriesError::Invalid("vector field must have order >= 2"));
        }
        let mut term = Self::var().truncate(trunc);
        let mut acc = term.clone();
        let mut n: i64 = 0;
        while !term.is_zero() {
            n += 1;
            term = v
                .mul(&term.derivative())
                .scale(time)
                .scale_rational(&Rational::new(BigInt::from(1), BigInt::from(n)))
                .truncate(trunc);
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Coefficients `a_1..a_kmax` with `f = flow of -sum a_k z^{k+1} ∂_z` at time 1.
    pub fn field_coeffs_from_flow(f: &Self, kmax: usize) -> SeriesResult<Vec<S>> {
        if !f.coeff(0)?.is_zero() || !f.coeff(1)?.is_one() || f.min_exp < 1 {
            return Err(SeriesError::Invalid("flow target must be z + O(z^2)"));
        }
        let trunc = kmax as i64 + 2;
        let mut a: Vec<S> = Vec::with_capacity(kmax);
        for k in 1..=kmax as i64 {
            let v = Self::new(
                2,
                a.iter().map(|x| x.negate()).collect(),
                None,
            );
            let flow = Self::flow_of_field(&v, &S::one(), trunc)?;
            let ak = flow.coeff(k + 1)?.minus(&f.coeff(k + 1)?);
            a.push(ak);
        }
        Ok(a)
    }
}

impl<S: Scalar> fmt::Display for LaurentSeries<S> {
    /// One `exponent: coefficient` line per nonzero term, then `trunc: N`
    /// (or `trunc: exact`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in self.terms() {
            writeln!(f, "{e}: {c}")?;
        }
        match self.trunc {
            Some(t) => write!(f, "trunc: {t}"),
            None => write!(f, "trunc: exact"),
        }
    }
}

impl<S: Scalar> fmt::Debug for LaurentSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*z^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(t) = self.trunc {
            write!(f, " + O(z^{t})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ParamScalar};
    use proptest::prelude::*;

    type Q = LaurentSeries<Rational>;

    fn q(coeffs: &[(i64, i64)], min: i64, trunc: Option<i64>) -> Q {
        Q::new(min, coeffs.iter().map(|&(n, d)| rat(n, d)).collect(), trunc)
    }

    fn ints(v: &[i64], min: i64, trunc: Option<i64>) -> Q {
        Q::new(min, v.iter().map(|&n| rat(n, 1)).collect(), trunc)
    }

    #[test]
    fn coeff_and_residue() {
        let f = ints(&[1, 0, 0, 0, 3], -1, None);
        assert_eq!(f.coeff(-1).unwrap(), rat(1, 1));
        assert_eq!(f.residue().unwrap(), rat(1, 1));
        assert_eq!(f.coeff(3).unwrap(), rat(3, 1));
        let g = f.truncate(2);
        assert!(matches!(g.coeff(2), Err(SeriesError::Truncated { .. })));
    }

    #[test]
    fn antiderivative_rejects_residue() {
        let f = ints(&[1, 0, 1], -1, Some(5));
        assert_eq!(f.antiderivative(), Err(SeriesError::NonzeroResidue));
    }

    #[test]
    fn identity_gives_kronecker_sigma() {
        // [z^{m+1}] f^{k+1}/f' with f = z is delta_{k,m}.
        let f = Q::var().truncate(12);
        for k in 0..5 {
            let s = f.pow_int(k + 1).unwrap().div(&f.derivative()).unwrap();
            for m in 0..5 {
                let expected = if k == m { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(s.coeff(m + 1).unwrap(), expected);
            }
        }
    }

    #[test]
    fn compose_polynomials() {
        let f = ints(&[1], 2, None);
        let g = ints(&[1, 1], 1, None);
        assert_eq!(f.compose(&g).unwrap(), ints(&[1, 2, 1], 2, None));
        let h = ints(&[2, 5, 7], 1, Some(6));
        assert_eq!(h.compose(&Q::var()).unwrap(), h);
    }

    #[test]
    fn compose_rejects_constant_inner() {
        let f = ints(&[1, 1], 0, Some(4));
        let g = ints(&[1, 1], 0, None);
        assert!(matches!(f.compose(&g), Err(SeriesError::Invalid(_))));
    }

    /// Lagrange inversion: `[z^n] G = (1/n) [w^{n-1}] (w/F(w))^n`.
    fn lagrange_oracle(f: &Q, n_max: i64) -> Vec<Rational> {
        let w_over_f = f.shift(-1).inv().unwrap();
        (1..n_max)
            .map(|n| {
                w_over_f.pow_int(n).unwrap().coeff(n - 1).unwrap() * rat(1, n)
            })
            .collect()
    }

    #[test]
    fn revert_catalan() {
        let f = ints(&[1, -1], 1, Some(12));
        let g = f.revert().unwrap();
        let catalan = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (i, c) in catalan.iter().enumerate() {
            assert_eq!(g.coeff(i as i64 + 1).unwrap(), rat(*c, 1));
        }
        assert_eq!(g.trunc(), Some(12));
        let oracle = lagrange_oracle(&f, 12);
        for (i, c) in oracle.iter().enumerate() {
            assert_eq!(&g.coeff(i as i64 + 1).unwrap(), c);
        }
        assert_eq!(Q::var().truncate(9).revert().unwrap(), Q::var().truncate(9));
    }

    #[test]
    fn revert_rejects_bad_leading_term() {
        assert!(ints(&[1, 1], 2, Some(6)).revert().is_err());
    }

    #[test]
    fn exp_log_roundtrip() {
        let f = q(&[(1, 2), (-3, 1), (2, 7), (0, 1), (5, 3)], 1, Some(10));
        let back = f.log1p().unwrap().exp().unwrap();
        assert_eq!(back, Q::one().add(&f));
    }

    #[test]
    fn arctanh_of_scaled_var() {
        // artanh(u z)/u = sum u^{2k} z^{2k+1}/(2k+1)
        let u = ParamScalar::s();
        let z = LaurentSeries::<ParamScalar>::var().truncate(12);
        let at = z.scale(&u).arctanh().unwrap().scale(&u.try_inv().unwrap());
        for k in 0..6i64 {
            let expected = u.pow_u(2 * k as u32).scale(&rat(1, 2 * k + 1));
            assert_eq!(at.coeff(2 * k + 1).unwrap(), expected);
            assert!(at.coeff(2 * k).unwrap().is_zero());
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let x = q(&[(1, 2), (1, 3), (-2, 5), (7, 11)], 2, Some(14));
        let f = x.sqrt_two_x().unwrap();
        let back = f.mul(&f).scale_rational(&rat(1, 2));
        assert_eq!(back.trunc(), Some(14));
        for e in 0..14 {
            assert_eq!(back.coeff(e).unwrap(), x.coeff(e).unwrap());
        }
    }

    #[test]
    fn cube_root_cubes_back() {
        let x = q(&[(1, 1), (2, 3), (-1, 5), (3, 1)], 0, Some(10));
        let r = x.pow_unit(&rat(1, 3)).unwrap();
        assert_eq!(r.pow_int(3).unwrap(), x);
    }

    #[test]
    fn zero_field_flow_is_identity() {
        let flow = Q::flow_of_field(&Q::zero(), &rat(1, 1), 8).unwrap();
        assert_eq!(flow, Q::var().truncate(8));
    }

    #[test]
    fn flow_field_roundtrip() {
        let a = [rat(1, 2), rat(-3, 1), rat(2, 7), rat(5, 4)];
        let v = Q::new(2, a.iter().map(|x| -x.clone()).collect(), None);
        let f = Q::flow_of_field(&v, &rat(1, 1), 6).unwrap();
        let back = Q::field_coeffs_from_flow(&f, 4).unwrap();
        assert_eq!(back, a.to_vec());
    }

    #[test]
    fn flow_of_single_generator() {
        // Flow of -a z^2 ∂_z is z/(1 + a z).
        let a = rat(3, 1);
        let v = Q::monomial(-a.clone(), 2);
        let f = Q::flow_of_field(&v, &rat(1, 1), 8).unwrap();
        let expected = Q::var().mul(&ints(&[1, 3], 0, None).truncate(7).inv().unwrap());
        assert_eq!(f, expected.truncate(8));
    }

    #[test]
    fn display_dump() {
        let f = q(&[(1, 1), (0, 1), (-1, 2)], -1, Some(3));
        assert_eq!(f.to_string(), "-1: 1\n1: -1/2\ntrunc: 3");
    }

    fn arb_series(min: i64, len: usize) -> impl Strategy<Value = Q> {
        prop::collection::vec((-5i64..=5, 1i64..=4), len).prop_map(move |v| {
            Q::new(min, v.iter().map(|&(n, d)| rat(n, d)).collect(), Some(min + len as i64))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_rule(f in arb_series(-2, 8), g in arb_series(1, 8)) {
            let lhs = f.mul(&g).derivative();
            let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn derivative_has_no_residue(f in arb_series(-4, 9)) {
            prop_assert!(f.derivative().residue().unwrap().is_zero());
        }

        #[test]
        fn antiderivative_inverts_derivative(f in arb_series(0, 9)) {
            let g = f.sub(&Q::constant(f.coeff(0).unwrap()));
            prop_assert_eq!(g.derivative().antiderivative().unwrap(), g.clone());
            let h = f.antiderivative().unwrap().derivative();
            prop_assert_eq!(h, f);
        }

        #[test]
        fn revert_is_two_sided(tail in arb_series(2, 8), c in 1i64..4) {
            let f = Q::monomial(rat(c, 1), 1).add(&tail);
            let g = f.revert().unwrap();
            prop_assert_eq!(f.compose(&g).unwrap(), Q::var().truncate(10));
            prop_assert_eq!(g.compose(&f).unwrap(), Q::var().truncate(10));
            let oracle = lagrange_oracle(&f, 10);
            for (i, c) in oracle.iter().enumerate() {
                prop_assert_eq!(&g.coeff(i as i64 + 1).unwrap(), c);
            }
        }

        #[test]
        fn inverse_multiplies_to_one(f in arb_series(-1, 8)) {
            prop_assume!(!f.coeff(-1).unwrap().is_zero());
            let prod = f.mul(&f.inv().unwrap());
            prop_assert_eq!(prod, Q::one().truncate(8));
        }
    }
}
