//! Sparse polynomials in `(p, s)` with integer coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Exponent pair `(deg_p, deg_s)`.
pub(crate) type Exp = (u32, u32);

/// Terms are kept sorted ascending by exponent (lexicographic, `p` first) with
/// no zero coefficients, so the leading term is the last one.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub(crate) struct IntPoly {
    terms: Vec<(Exp, BigInt)>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { terms: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::monomial((0, 0), c)
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn monomial(e: Exp, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            IntPoly { terms: vec![(e, c)] }
        }
    }

    pub fn from_terms(mut terms: Vec<(Exp, BigInt)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Exp, BigInt)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((e, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        IntPoly { terms: out }
    }

    pub fn terms(&self) -> &[(Exp, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == (0, 0) && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == (0, 0))
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Exp, BigInt)> {
        self.terms.last()
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [((0, 0), c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IntPoly { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.is_single_term() {
            let (e2, c2) = &other.terms[0];
            return IntPoly {
                terms: self
                    .terms
                    .iter()
                    .map(|(e, c)| ((e.0 + e2.0, e.1 + e2.1), c * c2))
                    .collect(),
            };
        }
        if self.is_single_term() {
            return other.mul(self);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                prods.push(((e1.0 + e2.0, e1.1 + e2.1), c1 * c2));
            }
        }
        Self::from_terms(prods)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        IntPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Panics in debug builds if some coefficient is not divisible by `k`.
    pub fn div_int_exact(&self, k: &BigInt) -> Self {
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    debug_assert!((c % k).is_zero());
                    (*e, c / k)
                })
                .collect(),
        }
    }

    /// Nonnegative gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn min_exps(&self) -> Exp {
        self.terms.iter().fold((u32::MAX, u32::MAX), |acc, (e, _)| {
            (acc.0.min(e.0), acc.1.min(e.1))
        })
    }

    pub fn shift_down(&self, by: Exp) -> Self {
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ((e.0 - by.0, e.1 - by.1), c.clone()))
                .collect(),
        }
    }

    /// Weighted degree `2·deg_p + deg_s` when all terms share it.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|(e, _)| 2 * e.0 + e.1);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn eval(&self, p: &Rational, s: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let term = Rational::from_integer(c.clone()) * p.pow(e.0 as i32) * s.pow(e.1 as i32);
            acc += term;
        }
        acc
    }

    pub fn deg_p(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.0).max()
    }

    /// Dense representation: index `i` holds the coefficient of `p^i`, itself a
    /// dense vector in `s`.
    pub fn to_recursive(&self) -> Vec<Vec<BigInt>> {
        let dp = match self.deg_p() {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut out = vec![Vec::new(); dp + 1];
        for (e, c) in &self.terms {
            let row: &mut Vec<BigInt> = &mut out[e.0 as usize];
            let k = e.1 as usize;
            if row.len() <= k {
                row.resize(k + 1, BigInt::zero());
            }
            row[k] = c.clone();
        }
        out
    }

    pub fn from_recursive(rows: &[Vec<BigInt>]) -> Self {
        let mut terms = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    terms.push(((i as u32, k as u32), c.clone()));
                }
            }
        }
        Self::from_terms(terms)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || *e == (0, 0) {
                factors.push(a.to_string());
            }
            for (name, k) in [("p", e.0), ("s", e.1)] {
                match k {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
