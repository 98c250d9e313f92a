//! Sparse polynomials in `t_1, t_2, ...` (with `deg t_k = k`) and
//! ħ-graded families of them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::scalar::{Rational, Scalar, ScalarError};

/// Product of powers `t_i^e`, stored as `(i, e)` sorted by `i` with `e >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(k: u32) -> Self {
        assert!(k >= 1, "variable index must be >= 1");
        Monomial(vec![(k, 1)])
    }

    /// Canonicalizes arbitrary `(index, power)` pairs; repeated indices merge.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        let mut m = Self::one();
        for &(i, e) in pairs {
            assert!(i >= 1, "variable index must be >= 1");
            for _ in 0..e {
                m = m.times_var(i);
            }
        }
        m
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(i, e)| i as u64 * e as u64).sum()
    }

    /// Number of variables counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn power_of(&self, k: u32) -> u32 {
        match self.0.binary_search_by_key(&k, |&(i, _)| i) {
            Ok(pos) => self.0[pos].1,
            Err(_) => 0,
        }
    }

    pub fn times_var(&self, k: u32) -> Self {
        let mut v = self.0.clone();
        match v.binary_search_by_key(&k, |&(i, _)| i) {
            Ok(pos) => v[pos].1 += 1,
            Err(pos) => v.insert(pos, (k, 1)),
        }
        Monomial(v)
    }

    /// `∂/∂t_k` of the monomial as `(multiplicity, monomial)`, if nonzero.
    pub fn diff_var(&self, k: u32) -> Option<(u32, Self)> {
        let pos = self.0.binary_search_by_key(&k, |&(i, _)| i).ok()?;
        let e = self.0[pos].1;
        let mut v = self.0.clone();
        if e == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Some((e, Monomial(v)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn all_odd(&self) -> bool {
        self.0.iter().all(|&(i, _)| i % 2 == 1)
    }

    /// `∏ e_i!`.
    pub fn factorial_product(&self) -> BigInt {
        let mut acc = BigInt::from(1);
        for &(_, e) in &self.0 {
            for k in 2..=e {
                acc *= k;
            }
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    format!("t{i}")
                } else {
                    format!("t{i}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial in the `t` variables; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TPolynomial<S: Scalar> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Default for TPolynomial<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> TPolynomial<S> {
    pub fn zero() -> Self {
        TPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn term(m: Monomial, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(k: u32) -> Self {
        Self::term(Monomial::var(k), S::one())
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

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().plus(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.negate())).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TPolynomial {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.times(c))).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&S::from_rational(r))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_capped(other, None)
    }

    /// Product with all monomials of degree above `cap` discarded.
    pub fn mul_capped(&self, other: &Self, cap: Option<u64>) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if cap.is_some_and(|c| da + mb.degree() > c) {
                    continue;
                }
                out.add_term(ma.mul(mb), ca.times(cb));
            }
        }
        out
    }

    pub fn truncate_degree(&self, cap: u64) -> Self {
        TPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Part of the given total degree.
    pub fn homogeneous_part(&self, n: u64) -> Self {
        TPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn all_odd(&self) -> bool {
        self.terms.keys().all(Monomial::all_odd)
    }

    /// Constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T, ScalarError>) -> Result<TPolynomial<T>, ScalarError> {
        let mut out = TPolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub(crate) fn from_map(terms: BTreeMap<Monomial, S>) -> Self {
        TPolynomial {
            terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    fn json_terms(&self, hbar: Option<usize>) -> Vec<Value> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mono: Vec<Value> = m.pairs().iter().map(|&(i, e)| json!([i, e])).collect();
                let mut obj = json!({ "monomial": mono, "coeff": c.to_string() });
                if let Some(k) = hbar {
                    obj["hbar"] = json!(k);
                }
                obj
            })
            .collect()
    }

    /// `[{"monomial": [[i, e], ...], "coeff": "<text>"}, ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(self.json_terms(None))
    }
}

impl<S: Scalar> fmt::Display for TPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("({c})")
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar> fmt::Debug for TPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FockError {
    #[error("level 0 must equal {expected}")]
    BadLevelZero { expected: &'static str },
    #[error("level {level} violates {what}")]
    FlagViolation { level: usize, what: &'static str },
}

/// `sum_k ħ^k Z_k` stored up to a finite ħ-cap (`levels.len() - 1`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedSeries<S: Scalar> {
    levels: Vec<TPolynomial<S>>,
    /// Every stored variable index is odd.
    pub kdv_parity: bool,
    /// `Some(α)`: level `k` has degree at most `(2α+1)k`.
    pub degree_rule: Option<u32>,
}

impl<S: Scalar> GradedSeries<S> {
    pub fn new(levels: Vec<TPolynomial<S>>) -> Self {
        GradedSeries {
            levels,
            kdv_parity: false,
            degree_rule: None,
        }
    }

    pub fn with_flags(mut self, kdv_parity: bool, degree_rule: Option<u32>) -> Self {
        self.kdv_parity = kdv_parity;
        self.degree_rule = degree_rule;
        self
    }

    pub fn levels(&self) -> &[TPolynomial<S>] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &TPolynomial<S> {
        &self.levels[k]
    }

    pub fn cap(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// Keeps levels `0..=cap`.
    pub fn truncate(&self, cap: usize) -> Self {
        let mut out = self.clone();
        out.levels.truncate(cap + 1);
        out
    }

    fn merged_flags(&self, other: &Self) -> (bool, Option<u32>) {
        let parity = self.kdv_parity && other.kdv_parity;
        let rule = if self.degree_rule == other.degree_rule {
            self.degree_rule
        } else {
            None
        };
        (parity, rule)
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        let levels = (0..=cap).map(|k| self.levels[k].add(&other.levels[k])).collect();
        let (p, r) = self.merged_flags(other);
        GradedSeries::new(levels).with_flags(p, r)
    }

    /// Product truncated at the smaller ħ-cap.
    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.cap().min(other.cap());
        let levels = (0..=cap)
            .map(|k| {
                let mut acc = TPolynomial::zero();
                for j in 0..=k {
                    acc.add_assign(&self.levels[j].mul(&other.levels[k - j]));
                }
                acc
            })
            .collect();
        let (p, r) = self.merged_flags(other);
        GradedSeries::new(levels).with_flags(p, r)
    }

    /// `log Z` for `Z_0 = 1`, via `F_k = Z_k - (1/k) sum_{j<k} j F_j Z_{k-j}`.
    pub fn graded_log(&self) -> Result<Self, FockError> {
        if self.levels.first().and_then(|l| l.as_constant()) != Some(S::one()) {
            return Err(FockError::BadLevelZero { expected: "1" });
        }
        let mut f: Vec<TPolynomial<S>> = vec![TPolynomial::zero()];
        for k in 1..self.levels.len() {
            let mut acc = TPolynomial::zero();
            for (j, fj) in f.iter().enumerate().skip(1) {
                acc.add_assign(&fj.mul(&self.levels[k - j]).scale(&S::from_int(j as i64)));
            }
            let fk = self.levels[k].sub(&acc.scale(&S::from_ratio(1, k as i64)));
            f.push(fk);
        }
        Ok(GradedSeries::new(f).with_flags(self.kdv_parity, self.degree_rule))
    }

    /// `exp F` for `F_0 = 0`, via `Z_k = (1/k) sum_{j=1}^{k} j F_j Z_{k-j}`.
    pub fn graded_exp(&self) -> Result<Self, FockError> {
        if self.levels.first().is_some_and(|l| !l.is_zero()) {
            return Err(FockError::BadLevelZero { expected: "0" });
        }
        let mut z: Vec<TPolynomial<S>> = vec![TPolynomial::one()];
        for k in 1..self.levels.len() {
            let mut acc = TPolynomial::zero();
            for j in 1..=k {
                acc.add_assign(&self.levels[j].mul(&z[k - j]).scale(&S::from_int(j as i64)));
            }
            z.push(acc.scale(&S::from_ratio(1, k as i64)));
        }
        Ok(GradedSeries::new(z).with_flags(self.kdv_parity, self.degree_rule))
    }

    /// Checks the declared flags against the stored data.
    pub fn check_flags(&self) -> Result<(), FockError> {
        for (k, lvl) in self.levels.iter().enumerate() {
            if self.kdv_parity && !lvl.all_odd() {
                return Err(FockError::FlagViolation {
                    level: k,
                    what: "odd-index parity",
                });
            }
            if let Some(a) = self.degree_rule {
                let bound = (2 * a as u64 + 1) * k as u64;
                if lvl.max_degree().is_some_and(|d| d > bound) {
                    return Err(FockError::FlagViolation {
                        level: k,
                        what: "degree rule",
                    });
                }
            }
        }
        Ok(())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T, ScalarError>) -> Result<GradedSeries<T>, ScalarError> {
        let levels = self
            .levels
            .iter()
            .map(|l| l.map(&f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GradedSeries::new(levels).with_flags(self.kdv_parity, self.degree_rule))
    }

    /// Flat array of `{"hbar", "monomial", "coeff"}` objects.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.levels
                .iter()
                .enumerate()
                .flat_map(|(k, l)| l.json_terms(Some(k)))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    type P = TPolynomial<Rational>;

    fn mono(p: &[(u32, u32)]) -> Monomial {
        Monomial::from_pairs(p)
    }

    fn poly(terms: &[(&[(u32, u32)], i64, i64)]) -> P {
        let mut out = P::zero();
        for (m, n, d) in terms {
            out.add_term(mono(m), rat(*n, *d));
        }
        out
    }

    #[test]
    fn like_terms_combine() {
        let a = poly(&[(&[(1, 1), (3, 1)], 1, 1)]);
        assert_eq!(a.add(&a), poly(&[(&[(1, 1), (3, 1)], 2, 1)]));
        assert_eq!(mono(&[(3, 1), (1, 2)]).degree(), 5);
        assert_eq!(mono(&[(3, 1), (1, 2)]), mono(&[(1, 1), (3, 1), (1, 1)]));
    }

    #[test]
    fn capped_product() {
        let a = poly(&[(&[(1, 1)], 1, 1), (&[(3, 1)], 1, 1)]);
        let sq = a.mul_capped(&a, Some(4));
        assert_eq!(sq, poly(&[(&[(1, 2)], 1, 1), (&[(1, 1), (3, 1)], 2, 1)]));
        let g = GradedSeries::new(vec![P::one(), a.clone(), a.clone()]);
        let h = GradedSeries::new(vec![P::one(), a]);
        assert_eq!(g.mul(&h).cap(), 1);
    }

    #[test]
    fn coefficient_extraction() {
        let p = poly(&[(&[(1, 1), (3, 1)], 27, 128), (&[(1, 4)], 1, 32)]);
        assert_eq!(p.coeff(&mono(&[(3, 1), (1, 1)])), rat(27, 128));
        assert_eq!(p.coeff(&mono(&[(5, 1)])), rat(0, 1));
    }

    #[test]
    fn log_of_one_is_zero() {
        let z = GradedSeries::new(vec![P::one(), P::zero(), P::zero()]);
        let f = z.graded_log().unwrap();
        assert!(f.levels().iter().all(|l| l.is_zero()));
    }

    #[test]
    fn log_rejects_bad_level_zero() {
        let z = GradedSeries::new(vec![P::constant(rat(2, 1))]);
        assert!(z.graded_log().is_err());
        let f = GradedSeries::new(vec![P::one()]);
        assert!(f.graded_exp().is_err());
    }

    #[test]
    fn json_shape() {
        let p = poly(&[(&[(1, 2)], -1, 2)]);
        let g = GradedSeries::new(vec![P::one(), p]);
        let v = g.to_json();
        assert_eq!(v[1]["hbar"], 1);
        assert_eq!(v[1]["monomial"], json!([[1, 2]]));
        assert_eq!(v[1]["coeff"], "-1/2");
    }

    #[test]
    fn flag_checks() {
        let g = GradedSeries::new(vec![P::one(), poly(&[(&[(2, 1)], 1, 1)])]).with_flags(true, None);
        assert!(g.check_flags().is_err());
        let g = GradedSeries::new(vec![P::one(), poly(&[(&[(1, 4)], 1, 1)])]).with_flags(false, Some(0));
        assert!(g.check_flags().is_err());
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        prop::collection::vec((prop::collection::vec((1u32..5, 1u32..3), 0..3), -4i64..5), 0..5).prop_map(|ts| {
            let mut p = P::zero();
            for (m, c) in ts {
                p.add_term(Monomial::from_pairs(&m), rat(c, 3));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exp_log_roundtrip(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            let f = GradedSeries::new(vec![P::zero(), a, b, c]);
            let z = f.graded_exp().unwrap();
            prop_assert_eq!(z.graded_log().unwrap(), f);
        }

        #[test]
        fn product_degrees_add(a in arb_poly(), b in arb_poly()) {
            let prod = a.mul(&b);
            if let (Some(da), Some(db), Some(dp)) = (a.max_degree(), b.max_degree(), prod.max_degree()) {
                prop_assert!(dp <= da + db);
            }
        }
    }
}
