//! Heisenberg–Virasoro constraints for the deformed tau-functions and their checks.
//!
//! An operator carrying `1/ħ` is a pair: a level-preserving part and a part
//! that maps level `k + 1` of the input to level `k` of the output.

use std::collections::BTreeSet;

use crate::curve::{CurveData, CurveError};
use crate::fock::{GradedSeries, Monomial, TPolynomial};
use crate::operators::{Conjugation, ElementaryOp, Generator, OperatorExpr};
use crate::scalar::{rat, ParamScalar, Rational, Scalar};
use crate::series::SeriesError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("alpha must be 0 or 1, got {0}")]
    BadAlpha(u32),
    #[error("tau holds {have} levels past 0 but {need} are needed")]
    TooFewLevels { have: usize, need: usize },
    #[error("operator window {window} is below the input degree {degree}")]
    Misaligned { window: i64, degree: u64 },
    #[error("index k = {0} is outside the constraint range")]
    BadIndex(i64),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

pub type ConstraintResult<T> = Result<T, ConstraintError>;

/// `A + ħ^{-1} B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HbarOp<S: Scalar> {
    pub regular: OperatorExpr<S>,
    pub inverse: OperatorExpr<S>,
}

impl<S: Scalar> HbarOp<S> {
    pub fn regular(op: OperatorExpr<S>) -> Self {
        HbarOp {
            regular: op,
            inverse: OperatorExpr::zero(),
        }
    }

    /// Output level `k` is `A τ_k + B τ_{k+1}`, for `k < τ.cap()`.
    pub fn apply_graded(&self, tau: &GradedSeries<S>) -> GradedSeries<S> {
        let cap = tau.cap();
        let mut levels = Vec::with_capacity(cap);
        for k in 0..cap {
            let mut out = self.regular.apply(tau.level(k), None);
            out.add_assign(&self.inverse.apply(tau.level(k + 1), None));
            levels.push(out);
        }
        GradedSeries::new(levels)
    }
}

/// One nonzero coefficient where zero was expected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation<S: Scalar> {
    pub level: usize,
    pub monomial: Monomial,
    pub value: S,
}

fn violations<S: Scalar>(g: &GradedSeries<S>) -> Vec<Violation<S>> {
    let mut out = Vec::new();
    for (level, lvl) in g.levels().iter().enumerate() {
        for (m, c) in lvl.iter() {
            out.push(Violation {
                level,
                monomial: m.clone(),
                value: c.clone(),
            });
        }
    }
    out
}

/// The constraint operators `J_k^{(q,p)}` and `L_k^{α,(q,p)}` built from the base `f`.
pub struct ConstraintSet<S: Scalar> {
    alpha: u32,
    frame: Conjugation<S>,
    /// `f^{2k+2} y_α` rows are read from here.
    f: crate::series::LaurentSeries<S>,
    y: crate::series::LaurentSeries<S>,
}

impl<S: Scalar> ConstraintSet<S> {
    /// Operators exact on polynomials of degree `<= window`.
    pub fn new(curve: &CurveData<S>, alpha: u32, window: i64) -> ConstraintResult<Self> {
        if alpha > 1 {
            return Err(ConstraintError::BadAlpha(alpha));
        }
        Ok(ConstraintSet {
            alpha,
            frame: Conjugation::new(&curve.f, window)?,
            f: curve.f.clone(),
            y: curve.y(alpha)?,
        })
    }

    /// Curve series order needed for a given window.
    pub fn required_series_order(window: i64) -> i64 {
        window + 6
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn window(&self) -> i64 {
        self.frame.window()
    }

    /// `J_k^{(q,p)} = ½ Σ_{m>=2k} ρ[2k,m] J_m`.
    pub fn j(&self, k: i64) -> ConstraintResult<OperatorExpr<S>> {
        Ok(OperatorExpr::generator(self.frame.j(2 * k)?.scale(&S::from_ratio(1, 2))))
    }

    /// `L_k^{α,(q,p)}` for `k >= -α`.
    pub fn l(&self, k: i64) -> ConstraintResult<HbarOp<S>> {
        if k < -(self.alpha as i64) {
            return Err(ConstraintError::BadIndex(k));
        }
        // ½ L^f_{2k} already carries the central term at k = -1.
        let mut g = self.frame.l(2 * k)?.scale(&S::from_ratio(1, 2));
        if k == 0 {
            g.push(S::from_ratio(1, 16), ElementaryOp::Const(S::one()));
        }
        let row = self.f.pow_int(2 * k + 2)?.mul(&self.y);
        let mut inv = Generator::zero();
        for m in (2 * k + 1 + 2 * self.alpha as i64)..=self.window() {
            if m > 0 {
                inv.push(row.coeff(m)?.scale(&rat(-1, 2)), ElementaryOp::Heis(m));
            }
        }
        Ok(HbarOp {
            regular: OperatorExpr::generator(g),
            inverse: OperatorExpr::generator(inv),
        })
    }

    fn check_input(&self, tau: &GradedSeries<S>, levels: usize) -> ConstraintResult<()> {
        if tau.cap() < levels + 1 {
            return Err(ConstraintError::TooFewLevels {
                have: tau.cap(),
                need: levels + 1,
            });
        }
        let degree = tau.levels()[..=levels + 1]
            .iter()
            .filter_map(|l| l.max_degree())
            .max()
            .unwrap_or(0);
        if (degree as i64) > self.window() {
            return Err(ConstraintError::Misaligned {
                window: self.window(),
                degree,
            });
        }
        Ok(())
    }

    /// Nonzero coefficients of `L_k τ` on output levels `0..=levels`.
    pub fn verify_l(&self, tau: &GradedSeries<S>, k: i64, levels: usize) -> ConstraintResult<Vec<Violation<S>>> {
        self.check_input(tau, levels)?;
        let op = self.l(k)?;
        Ok(violations(&op.apply_graded(&tau.truncate(levels + 1))))
    }

    /// Nonzero coefficients of `J_k τ` on levels `0..=levels`.
    pub fn verify_j(&self, tau: &GradedSeries<S>, k: i64, levels: usize) -> ConstraintResult<Vec<Violation<S>>> {
        self.check_input(tau, levels)?;
        let op = HbarOp::regular(self.j(k)?);
        Ok(violations(&op.apply_graded(&tau.truncate(levels + 1))))
    }
}

/// Monomials of weighted degree `<= d` in `t_1..t_d`.
pub fn monomial_basis(d: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![(Monomial::one(), 0u32, 1u32)];
    while let Some((m, deg, min_idx)) = frontier.pop() {
        for i in min_idx..=d - deg {
            let next = m.times_var(i);
            out.push(next.clone());
            frontier.push((next, deg + i, i));
        }
    }
    out.sort();
    out
}

/// Which commutation relation failed, with a basis monomial witnessing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorFailure {
    pub relation: String,
    pub monomial: Monomial,
}

fn pair_on<S: Scalar>(a: &HbarOp<S>, b: &HbarOp<S>, p: &TPolynomial<S>) -> [TPolynomial<S>; 3] {
    // [A + ħ⁻¹B, C + ħ⁻¹D] by powers of ħ⁻¹.
    let c0 = OperatorExpr::commutator_on(&a.regular, &b.regular, p, None);
    let c1 = OperatorExpr::commutator_on(&a.regular, &b.inverse, p, None)
        .add(&OperatorExpr::commutator_on(&a.inverse, &b.regular, p, None));
    let c2 = OperatorExpr::commutator_on(&a.inverse, &b.inverse, p, None);
    [c0, c1, c2]
}

fn hbar_on<S: Scalar>(c: &S, a: &HbarOp<S>, p: &TPolynomial<S>) -> [TPolynomial<S>; 3] {
    [
        a.regular.apply(p, None).scale(c),
        a.inverse.apply(p, None).scale(c),
        TPolynomial::zero(),
    ]
}

/// Checks on every basis monomial of degree `<= deg`:
/// `[L_k, L_m] = (k-m) L_{k+m}`, `[L_k, J_m] = -m J_{k+m}`, `[J_k, J_m] = 0`
/// for `-α <= k, m <= kmax` and `J` indices in `1..=kmax`.
pub fn verify_commutators<S: Scalar>(
    cs: &ConstraintSet<S>,
    kmax: i64,
    deg: u32,
) -> ConstraintResult<Vec<CommutatorFailure>> {
    let lo = -(cs.alpha as i64);
    let basis = monomial_basis(deg);
    let mut fails = BTreeSet::new();
    let mut record = |rel: String, m: &Monomial| {
        fails.insert((rel, m.clone()));
    };
    for k in lo..=kmax {
        let lk = cs.l(k)?;
        for m in lo..=kmax {
            let lm = cs.l(m)?;
            let rhs = if k == m {
                HbarOp::regular(OperatorExpr::zero())
            } else {
                cs.l(k + m)?
            };
            let coef = S::from_int(k - m);
            for b in &basis {
                let p = TPolynomial::term(b.clone(), S::one());
                if pair_on(&lk, &lm, &p) != hbar_on(&coef, &rhs, &p) {
                    record(format!("[L{k},L{m}]"), b);
                }
            }
        }
        for m in 1..=kmax {
            let jm = HbarOp::regular(cs.j(m)?);
            let rhs = HbarOp::regular(cs.j(k + m)?);
            let coef = S::from_int(-m);
            for b in &basis {
                let p = TPolynomial::term(b.clone(), S::one());
                if pair_on(&lk, &jm, &p) != hbar_on(&coef, &rhs, &p) {
                    record(format!("[L{k},J{m}]"), b);
                }
            }
        }
    }
    for k in 1..=kmax {
        for m in 1..=kmax {
            let (a, b) = (cs.j(k)?, cs.j(m)?);
            for mono in &basis {
                let p = TPolynomial::term(mono.clone(), S::one());
                if !OperatorExpr::commutator_on(&a, &b, &p, None).is_zero() {
                    record(format!("[J{k},J{m}]"), mono);
                }
            }
        }
    }
    Ok(fails
        .into_iter()
        .map(|(relation, monomial)| CommutatorFailure { relation, monomial })
        .collect())
}

/// Coefficients of a symbolic `τ` (or `log τ`) whose weight differs from
/// `((2α+1)k - n)/2`, `n` the weighted degree.
pub fn verify_dimension(tau: &GradedSeries<ParamScalar>, alpha: u32) -> Vec<Violation<ParamScalar>> {
    let mut out = Vec::new();
    for (k, lvl) in tau.levels().iter().enumerate() {
        for (m, c) in lvl.iter() {
            let expected = rat((2 * alpha as i64 + 1) * k as i64 - m.degree() as i64, 2);
            if c.weight_of().ok() != Some(expected) {
                out.push(Violation {
                    level: k,
                    monomial: m.clone(),
                    value: c.clone(),
                });
            }
        }
    }
    out
}

/// Scaling form of [`verify_dimension`]: `b` is computed at `(4p, 2s)` and `a`
/// at `(p, s)`; each coefficient must scale by `2^{(2α+1)k - n}`.
pub fn verify_dimension_scaled(
    a: &GradedSeries<Rational>,
    b: &GradedSeries<Rational>,
    alpha: u32,
) -> Vec<Violation<Rational>> {
    let mut out = Vec::new();
    let cap = a.cap().min(b.cap());
    for k in 0..=cap {
        let mut monos: BTreeSet<&Monomial> = a.level(k).iter().map(|(m, _)| m).collect();
        monos.extend(b.level(k).iter().map(|(m, _)| m));
        for m in monos {
            let e = (2 * alpha as i64 + 1) * k as i64 - m.degree() as i64;
            let factor = if e >= 0 {
                rat(1i64 << e, 1)
            } else {
                rat(1, 1i64 << (-e))
            };
            let diff = b.level(k).coeff(m) - a.level(k).coeff(m) * factor;
            if !Scalar::is_zero(&diff) {
                out.push(Violation {
                    level: k,
                    monomial: m.clone(),
                    value: diff,
                });
            }
        }
    }
    out
}
