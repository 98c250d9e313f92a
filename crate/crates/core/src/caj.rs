//! Cut-and-join operators and the level recursion `τ^(k) = W τ^(k-1) / k`.

use std::collections::BTreeMap;

use crate::curve::{CurveData, CurveError, CurveParams};
use crate::fock::{GradedSeries, Monomial, TPolynomial};
use crate::operators::{Conjugation, ElementaryOp, Generator, OperatorExpr};
use crate::scalar::{rat, Scalar};
use crate::series::{LaurentSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CajError {
    #[error("alpha must be 0 or 1, got {0}")]
    BadAlpha(u32),
    #[error("curve series order {have} is below the required {need}")]
    InsufficientOrder { have: i64, need: i64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

pub type CajResult<T> = Result<T, CajError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `(1/(2α+1)) Σ_k J_{-2k-1} (L_{2k-2α} + δ_{k,α}/8)`.
    W,
    /// The cubic form in `J` alone.
    WStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Undeformed operators (`f = z`).
    Base,
    /// Operators conjugated by the series `f_α` of a curve.
    Conjugated,
}

/// `(2α+1) K`.
pub fn degree_cap(alpha: u32, order: usize) -> u64 {
    (2 * alpha as u64 + 1) * order as u64
}

/// Curve series order needed to build conjugated operators for degree cap `d`.
///
/// `ρ[-n, m]` with `n, m <= d` reads coefficients of `f` up to `z^{n+m+1}`.
pub fn required_series_order(d: u64) -> i64 {
    2 * d as i64 + 2
}

fn check_alpha(alpha: u32) -> CajResult<()> {
    if alpha > 1 {
        return Err(CajError::BadAlpha(alpha));
    }
    Ok(())
}

/// Identity frame: `J_k` and `L_k` themselves, on polynomials of degree `<= d`.
pub fn base_frame<S: Scalar>(d: u64) -> CajResult<Conjugation<S>> {
    Ok(Conjugation::new(&LaurentSeries::<S>::var(), d as i64)?)
}

/// Frame conjugated by `f_α` of `curve`.
pub fn qp_frame<S: Scalar>(curve: &CurveData<S>, alpha: u32, d: u64) -> CajResult<Conjugation<S>> {
    check_alpha(alpha)?;
    let need = required_series_order(d);
    if curve.order < need {
        return Err(CajError::InsufficientOrder {
            have: curve.order,
            need,
        });
    }
    Ok(Conjugation::new(curve.f_alpha(alpha)?, d as i64)?)
}

/// The cut-and-join operator in `frame`, exact on polynomials of degree
/// `<= d - (2α+1)`.
pub fn build_caj<S: Scalar>(
    alpha: u32,
    variant: Variant,
    frame: &Conjugation<S>,
    d: u64,
) -> CajResult<OperatorExpr<S>> {
    check_alpha(alpha)?;
    match variant {
        Variant::W => build_w(alpha, frame, d),
        Variant::WStar => build_w_star(alpha, frame, d),
    }
}

fn build_w<S: Scalar>(alpha: u32, frame: &Conjugation<S>, d: u64) -> CajResult<OperatorExpr<S>> {
    let a = alpha as i64;
    let norm = S::from_ratio(1, 2 * a + 1);
    let mut w = OperatorExpr::zero();
    // Inputs have degree <= d - (2α+1); L_{2k-2α} kills them unless 2k+1 <= d.
    let mut k = 0i64;
    while 2 * k + 1 <= d as i64 {
        let j = frame.j(-2 * k - 1)?;
        let mut l = frame.l(2 * k - 2 * a)?;
        if k == a {
            l.push(S::from_ratio(1, 8), ElementaryOp::Const(S::one()));
        }
        w = w.add(&OperatorExpr::product(norm.clone(), vec![j, l]));
        k += 1;
    }
    Ok(w)
}

fn build_w_star<S: Scalar>(alpha: u32, frame: &Conjugation<S>, d: u64) -> CajResult<OperatorExpr<S>> {
    let shift = 2 * alpha as i64 + 1;
    let norm = S::from_ratio(1, shift);
    let half = norm.scale(&rat(1, 2));
    // Largest input degree.
    let e = d as i64 - shift;
    let mut w = OperatorExpr::zero();
    let odd = |n: i64| (1..=n).step_by(2);
    for k in odd(e + shift) {
        for m in odd(e + shift) {
            let top = k + m - shift;
            // (1,1) for α = 1 has no derivative counterpart.
            if top >= 1 && top <= e {
                let f = vec![frame.j(-k)?, frame.j(-m)?, frame.j(top)?];
                w = w.add(&OperatorExpr::product(norm.clone(), f));
            }
            if k + m <= e {
                let f = vec![frame.j(-k - m - shift)?, frame.j(k)?, frame.j(m)?];
                w = w.add(&OperatorExpr::product(half.clone(), f));
            }
        }
    }
    if alpha == 0 {
        w = w.add(&OperatorExpr::product(S::from_ratio(1, 8), vec![frame.j(-1)?]));
    } else {
        let j1 = frame.j(-1)?;
        w = w.add(&OperatorExpr::product(
            S::from_ratio(1, 6),
            vec![j1.clone(), j1.clone(), j1],
        ));
        w = w.add(&OperatorExpr::product(S::from_ratio(1, 24), vec![frame.j(-3)?]));
    }
    Ok(w)
}

/// `τ^(0) = 1`, `τ^(k) = (1/k) W τ^(k-1)` with outputs cut at degree `d`.
pub fn run_recursion<S: Scalar>(w: &OperatorExpr<S>, order: usize, d: u64) -> GradedSeries<S> {
    let mut levels = vec![TPolynomial::one()];
    for k in 1..=order {
        let next = w
            .apply(&levels[k - 1], Some(d))
            .scale(&S::from_ratio(1, k as i64));
        levels.push(next);
    }
    GradedSeries::new(levels)
}

/// `Z_0 = 1`, `Z_k = (1/k) Σ_{j<k} (k-j) V_{k-j} Z_j`.
pub fn run_general<S: Scalar>(
    v: &BTreeMap<usize, OperatorExpr<S>>,
    order: usize,
    d: u64,
) -> GradedSeries<S> {
    let mut levels: Vec<TPolynomial<S>> = vec![TPolynomial::one()];
    for k in 1..=order {
        let mut acc = TPolynomial::zero();
        for (j, zj) in levels.iter().enumerate() {
            if let Some(op) = v.get(&(k - j)) {
                let term = op.apply(zj, Some(d));
                acc.add_assign(&term.scale(&S::from_int((k - j) as i64)));
            }
        }
        levels.push(acc.scale(&S::from_ratio(1, k as i64)));
    }
    GradedSeries::new(levels)
}

/// Splits each level by the number of variables `n` in a monomial.
pub fn fixed_n_split<S: Scalar>(tau: &GradedSeries<S>) -> BTreeMap<(usize, u32), TPolynomial<S>> {
    let mut out: BTreeMap<(usize, u32), TPolynomial<S>> = BTreeMap::new();
    for (k, lvl) in tau.levels().iter().enumerate() {
        for (m, c) in lvl.iter() {
            out.entry((k, m.length()))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
    }
    out
}

/// The pieces `W*_{α,3}`, `W*_{α,1}`, `W*_{α,-1}` of the base starred operator,
/// which change the variable count by 3, 1 and -1.
pub fn fixed_n_pieces<S: Scalar>(alpha: u32, d: u64) -> CajResult<[OperatorExpr<S>; 3]> {
    check_alpha(alpha)?;
    let shift = 2 * alpha as i64 + 1;
    let norm = S::from_ratio(1, shift);
    let d = d as i64;
    let heis = |n: i64| Generator::op(ElementaryOp::Heis(n));
    let odd = |n: i64| (1..=n).step_by(2);
    let mut plus = OperatorExpr::zero();
    let mut minus = OperatorExpr::zero();
    for k in odd(d + shift) {
        for m in odd(d + shift) {
            let top = k + m - shift;
            if top >= 1 && top <= d {
                plus = plus.add(&OperatorExpr::product(norm.clone(), vec![heis(-k), heis(-m), heis(top)]));
            }
            if k <= d && m <= d {
                minus = minus.add(&OperatorExpr::product(
                    norm.scale(&rat(1, 2)),
                    vec![heis(-k - m - shift), heis(k), heis(m)],
                ));
            }
        }
    }
    let three = if alpha == 0 {
        plus = plus.add(&OperatorExpr::product(S::from_ratio(1, 8), vec![heis(-1)]));
        OperatorExpr::zero()
    } else {
        plus = plus.add(&OperatorExpr::product(S::from_ratio(1, 24), vec![heis(-3)]));
        OperatorExpr::product(S::from_ratio(1, 6), vec![heis(-1), heis(-1), heis(-1)])
    };
    Ok([three, plus, minus])
}

/// Entries `(k, n, residual)` where the fixed-`n` recursion fails on `tau`.
pub fn check_fixed_n<S: Scalar>(
    tau: &GradedSeries<S>,
    alpha: u32,
) -> CajResult<Vec<(usize, u32, TPolynomial<S>)>> {
    let d = degree_cap(alpha, tau.cap());
    let pieces = fixed_n_pieces::<S>(alpha, d)?;
    let split = fixed_n_split(tau);
    let get = |k: usize, n: i64| -> TPolynomial<S> {
        if n < 0 {
            return TPolynomial::zero();
        }
        split.get(&(k, n as u32)).cloned().unwrap_or_default()
    };
    let mut bad = Vec::new();
    for k in 1..=tau.cap() {
        let nmax = degree_cap(alpha, k) as i64;
        for n in 0..=nmax {
            let mut rhs = TPolynomial::zero();
            for (piece, dn) in pieces.iter().zip([3i64, 1, -1]) {
                rhs.add_assign(&piece.apply(&get(k - 1, n - dn), Some(d)));
            }
            let rhs = rhs.scale(&S::from_ratio(1, k as i64));
            let diff = get(k, n).sub(&rhs);
            if !diff.is_zero() {
                bad.push((k, n as u32, diff));
            }
        }
    }
    Ok(bad)
}

/// Full pipeline: `τ^(α)` to ħ-order `order` in the requested mode and variant.
pub fn expand<S: Scalar>(
    alpha: u32,
    variant: Variant,
    mode: Mode,
    params: Option<&CurveParams<S>>,
    order: usize,
) -> CajResult<GradedSeries<S>> {
    check_alpha(alpha)?;
    let d = degree_cap(alpha, order);
    let frame = match (mode, params) {
        (Mode::Conjugated, Some(pr)) => {
            let curve = CurveData::build(pr.clone(), required_series_order(d).max(4))?;
            qp_frame(&curve, alpha, d)?
        }
        _ => base_frame(d)?,
    };
    expand_in_frame(alpha, variant, mode, &frame, order)
}

/// As [`expand`] with a prebuilt frame.
pub fn expand_in_frame<S: Scalar>(
    alpha: u32,
    variant: Variant,
    mode: Mode,
    frame: &Conjugation<S>,
    order: usize,
) -> CajResult<GradedSeries<S>> {
    let d = degree_cap(alpha, order);
    let w = build_caj(alpha, variant, frame, d)?;
    let tau = run_recursion(&w, order, d);
    Ok(tau.with_flags(mode == Mode::Base, Some(alpha)))
}

/// `Σ_{monomial} c · t^monomial` as the pair list used by golden tables.
pub fn monomial_from_indices(idx: &[u32]) -> Monomial {
    let mut m = Monomial::one();
    for &i in idx {
        m = m.times_var(i);
    }
    m
}
