//! The line `p = 2u^2`, `q = -u^2`: the deformed tau-functions as shifts of the
//! undeformed ones, the matching κ-class parameters, and the genus-`g` constant.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::caj::{expand, CajError, Mode, Variant};
use crate::curve::{bernoulli_numbers, CurveParams};
use crate::fock::{GradedSeries, Monomial, TPolynomial};
use crate::scalar::{rat, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KdvError {
    #[error("alpha must be 0 or 1, got {0}")]
    BadAlpha(u32),
    #[error("base tau has {have} levels, need {need}")]
    InsufficientDepth { have: usize, need: usize },
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u32),
    #[error(transparent)]
    Caj(#[from] CajError),
}

pub type KdvResult<T> = Result<T, KdvError>;

fn check_alpha(alpha: u32) -> KdvResult<()> {
    if alpha > 1 {
        return Err(KdvError::BadAlpha(alpha));
    }
    Ok(())
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::from(1);
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// `t_{2k+1} ↦ t_{2k+1} + ħ^{-1} v_{2k+1}` for odd indices from `3 + 2α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftPlan {
    pub alpha: u32,
    pub u: Rational,
    /// Index to shift value.
    pub shifts: BTreeMap<u32, Rational>,
}

impl ShiftPlan {
    /// Shifts for all odd indices `<= max_index`:
    /// `v^(0)_{2k+1} = -u^{2k}/(2k+1)` and
    /// `v^(1)_{2k+3} = -(u^{2k}/(2k+3)) Σ_{j<=k} 1/(2j+1)`.
    pub fn new(alpha: u32, u: &Rational, max_index: u32) -> KdvResult<Self> {
        check_alpha(alpha)?;
        let mut shifts = BTreeMap::new();
        let u2 = u * u;
        for k in 1i64.. {
            let idx = 2 * (k + alpha as i64) + 1;
            if idx > max_index as i64 {
                break;
            }
            let val = if alpha == 0 {
                -u2.pow_u(k as u32) / rat(idx, 1)
            } else {
                let h: Rational = (0..=k).map(|j| rat(1, 2 * j + 1)).sum();
                -u2.pow_u(k as u32) / rat(idx, 1) * h
            };
            if !Scalar::is_zero(&val) {
                shifts.insert(idx as u32, val);
            }
        }
        Ok(ShiftPlan {
            alpha,
            u: u.clone(),
            shifts,
        })
    }

    /// Smallest shifted index.
    pub fn min_index(&self) -> u32 {
        3 + 2 * self.alpha
    }

    /// Base level needed so that output levels `<= m` are complete:
    /// `ceil(c_α m)` with `c_0 = 3/2`, `c_1 = 5/2`.
    pub fn base_depth(&self, m: usize) -> usize {
        let (num, den) = if self.alpha == 0 { (3, 2) } else { (5, 2) };
        (num * m).div_ceil(den)
    }
}

fn binom(n: u32, k: u32) -> Rational {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// Applies the shift to a base tau, returning output levels `0..=m`.
pub fn apply_shift(base: &GradedSeries<Rational>, plan: &ShiftPlan, m: usize) -> KdvResult<GradedSeries<Rational>> {
    let need = plan.base_depth(m);
    if base.cap() < need {
        return Err(KdvError::InsufficientDepth {
            have: base.cap(),
            need,
        });
    }
    let weight = 2 * plan.alpha as u64 + 1;
    let lowest_reach = |k: u64| k - weight * k / plan.min_index() as u64;
    // k - jmax(k) is nondecreasing, so the first missing level bounds all of them.
    assert!(lowest_reach(base.cap() as u64 + 1) > m as u64);
    let mut out: Vec<TPolynomial<Rational>> = vec![TPolynomial::zero(); m + 1];
    for (k, lvl) in base.levels().iter().enumerate() {
        // j substituted letters of index >= min_index out of degree <= weight*k.
        if lowest_reach(k as u64) > m as u64 {
            continue;
        }
        for (mono, c) in lvl.iter() {
            expand_monomial(mono, c, plan, k, &mut out);
        }
    }
    Ok(GradedSeries::new(out).with_flags(true, None))
}

fn expand_monomial(
    mono: &Monomial,
    c: &Rational,
    plan: &ShiftPlan,
    level: usize,
    out: &mut [TPolynomial<Rational>],
) {
    // Each factor t_i^e becomes Σ_j C(e,j) v_i^j ħ^{-j} t_i^{e-j}.
    let mut partial: Vec<(Monomial, Rational, usize)> = vec![(Monomial::one(), c.clone(), 0)];
    for &(i, e) in mono.pairs() {
        let v = plan.shifts.get(&i);
        let mut next = Vec::new();
        for (m, coef, used) in &partial {
            let jtop = if v.is_some() { e } else { 0 };
            for j in 0..=jtop {
                if *used + j as usize > level {
                    break;
                }
                let mut mm = m.clone();
                for _ in 0..e - j {
                    mm = mm.times_var(i);
                }
                let factor = match v {
                    Some(v) => binom(e, j) * v.pow_u(j),
                    None => rat(1, 1),
                };
                next.push((mm, coef * factor, used + j as usize));
            }
        }
        partial = next;
    }
    for (m, coef, used) in partial {
        let target = level - used;
        if target < out.len() {
            out[target].add_term(m, coef);
        }
    }
}

/// `τ_α(t + ħ^{-1} v(u))` through level `m`.
pub fn shifted_tau(alpha: u32, u: &Rational, m: usize) -> KdvResult<GradedSeries<Rational>> {
    check_alpha(alpha)?;
    let plan0 = ShiftPlan::new(alpha, u, 1)?;
    let depth = plan0.base_depth(m);
    let base = expand::<Rational>(alpha, Variant::W, Mode::Base, None, depth)?;
    let plan = ShiftPlan::new(alpha, u, (2 * alpha + 1) * depth as u32)?;
    apply_shift(&base, &plan, m)
}

/// `τ^(α)` at `p = 2u^2`, `q = -u^2` from the cut-and-join route.
pub fn caj_tau_on_u_line(alpha: u32, u: &Rational, m: usize) -> KdvResult<GradedSeries<Rational>> {
    check_alpha(alpha)?;
    let pr = CurveParams::u_line(u.clone()).expect("u-line is never degenerate");
    Ok(expand(alpha, Variant::W, Mode::Conjugated, Some(&pr), m)?)
}

/// Per-level difference between the two routes (empty levels when equal).
#[derive(Debug, Clone)]
pub struct TauEqReport {
    pub shifted: GradedSeries<Rational>,
    pub caj: GradedSeries<Rational>,
    pub diff: Vec<TPolynomial<Rational>>,
}

impl TauEqReport {
    pub fn passed(&self) -> bool {
        self.diff.iter().all(|d| d.is_zero())
    }
}

pub fn verify_taueq(alpha: u32, u: &Rational, m: usize) -> KdvResult<TauEqReport> {
    let shifted = shifted_tau(alpha, u, m)?;
    let caj = caj_tau_on_u_line(alpha, u, m)?;
    let diff = (0..=m).map(|k| shifted.level(k).sub(caj.level(k))).collect();
    Ok(TauEqReport { shifted, caj, diff })
}

/// `q_j(s)` for `j = 1..=jmax`: `1 - exp(-Σ s_j z^j) = Σ q_j z^j`.
/// `s[0]` is `s_1`.
pub fn elementary_schur(s: &[Rational], jmax: usize) -> Vec<Rational> {
    let mut levels = vec![TPolynomial::zero()];
    for j in 1..=jmax {
        let sj = s.get(j - 1).cloned().unwrap_or_else(|| rat(0, 1));
        levels.push(TPolynomial::constant(-sj));
    }
    let e = GradedSeries::new(levels).graded_exp().expect("level 0 is zero");
    (1..=jmax)
        .map(|j| -e.level(j).as_constant().unwrap_or_else(|| rat(0, 1)))
        .collect()
}

/// `s_j^α` for `j = 1..=jmax`, solved from `q_j(s^α) = (2(j+α)+1)!! v_{2(j+α)+1}`.
pub fn kappa_parameters(alpha: u32, u: &Rational, jmax: usize) -> KdvResult<Vec<Rational>> {
    check_alpha(alpha)?;
    let plan = ShiftPlan::new(alpha, u, 2 * (jmax as u32 + alpha) + 1)?;
    let mut levels = vec![TPolynomial::one()];
    for j in 1..=jmax {
        let idx = 2 * (j as i64 + alpha as i64) + 1;
        let v = plan.shifts.get(&(idx as u32)).cloned().unwrap_or_else(|| rat(0, 1));
        let qj = Rational::from_integer(double_factorial(idx)) * v;
        levels.push(TPolynomial::constant(-qj));
    }
    let lg = GradedSeries::new(levels).graded_log().expect("level 0 is one");
    Ok((1..=jmax)
        .map(|j| -lg.level(j).as_constant().unwrap_or_else(|| rat(0, 1)))
        .collect())
}

/// `2^{2g-3} u^{6g-6} (B_{2g}/2g)(B_{2g-2}/(2g-2)) / (2g-2)!`.
pub fn fp_closed_form(g: u32, u: &Rational) -> KdvResult<Rational> {
    if g < 2 {
        return Err(KdvError::GenusTooSmall(g));
    }
    let b = bernoulli_numbers(2 * g as usize);
    let two_g = g as i64 * 2;
    let fact: BigInt = (1..=(two_g - 2)).map(BigInt::from).product();
    let val = rat(2, 1).pow_u(2 * g - 3) * u.pow_u(6 * g - 6) * (&b[2 * g as usize] / rat(two_g, 1))
        * (&b[2 * g as usize - 2] / rat(two_g - 2, 1))
        / Rational::from_integer(fact);
    Ok(val)
}

/// General-`(p, q)` form `½ (p^2 q^2/(p+q))^{g-1} (B_{2g}/2g)(B_{2g-2}/(2g-2))/(2g-2)!`.
pub fn fp_general<S: Scalar>(g: u32, p: &S, q: &S) -> KdvResult<S> {
    if g < 2 {
        return Err(KdvError::GenusTooSmall(g));
    }
    let b = bernoulli_numbers(2 * g as usize);
    let two_g = g as i64 * 2;
    let fact: BigInt = (1..=(two_g - 2)).map(BigInt::from).product();
    let c = rat(1, 2) * (&b[2 * g as usize] / rat(two_g, 1)) * (&b[2 * g as usize - 2] / rat(two_g - 2, 1))
        / Rational::from_integer(fact);
    let base = p
        .times(p)
        .times(q)
        .times(q)
        .try_div(&p.plus(q))
        .expect("p + q != 0");
    Ok(base.pow_u(g - 1).scale(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveData;
    use crate::scalar::ParamScalar;

    #[test]
    fn shift_values() {
        let plan = ShiftPlan::new(1, &rat(1, 1), 7).unwrap();
        assert_eq!(plan.shifts[&5], rat(-4, 15));
        let plan0 = ShiftPlan::new(0, &rat(2, 1), 5).unwrap();
        assert_eq!(plan0.shifts[&3], rat(-4, 3));
        assert_eq!(plan0.shifts[&5], rat(-16, 5));
        assert!(ShiftPlan::new(0, &rat(0, 1), 9).unwrap().shifts.is_empty());
    }

    #[test]
    fn shifts_match_curve_series() {
        let u = rat(1, 2);
        let cd = CurveData::build(CurveParams::u_line(u.clone()).unwrap(), 14).unwrap();
        for alpha in 0..2u32 {
            let plan = ShiftPlan::new(alpha, &u, 13).unwrap();
            let fa = cd.f_alpha(alpha).unwrap();
            let v = crate::curve::v_alpha_of_virasoro(fa, alpha).unwrap();
            for (idx, val) in &plan.shifts {
                assert_eq!(&v.coeff(*idx as i64).unwrap(), val, "alpha={alpha} idx={idx}");
            }
        }
    }

    #[test]
    fn ftilde_is_arctanh_on_u_line() {
        let u = ParamScalar::s();
        let cd = CurveData::build(CurveParams::u_line(u.clone()).unwrap(), 12).unwrap();
        for k in 0..5i64 {
            let expected = u.pow_u(2 * k as u32).scale(&rat(1, 2 * k + 1));
            assert_eq!(cd.ftilde.coeff(2 * k + 1).unwrap(), expected);
            assert!(cd.ftilde.coeff(2 * k + 2).unwrap().is_zero());
        }
    }

    #[test]
    fn kappa_values() {
        let one = rat(1, 1);
        let s0 = kappa_parameters(0, &one, 3).unwrap();
        assert_eq!(s0, vec![rat(-1, 1), rat(-5, 2), rat(-37, 3)]);
        let s1 = kappa_parameters(1, &one, 3).unwrap();
        assert_eq!(s1, vec![rat(-4, 1), rat(-15, 1), rat(-316, 3)]);
        let half = kappa_parameters(1, &rat(1, 2), 2).unwrap();
        assert_eq!(half, vec![rat(-1, 1), rat(-15, 16)]);
    }

    #[test]
    fn schur_roundtrip() {
        assert!(elementary_schur(&[], 4).iter().all(|q| Scalar::is_zero(q)));
        let s = kappa_parameters(0, &rat(1, 1), 5).unwrap();
        let q = elementary_schur(&s, 5);
        for (k, qk) in q.iter().enumerate() {
            let k = k as i64 + 1;
            assert_eq!(qk, &-Rational::from_integer(double_factorial(2 * k - 1)));
        }
        let s1 = kappa_parameters(1, &rat(1, 1), 4).unwrap();
        let q1 = elementary_schur(&s1, 4);
        for (j, qj) in q1.iter().enumerate() {
            let k = j as i64 + 1;
            let h: Rational = (0..=k).map(|i| rat(1, 2 * i + 1)).sum();
            assert_eq!(qj, &(-Rational::from_integer(double_factorial(2 * k + 1)) * h));
        }
    }

    #[test]
    fn fp_values() {
        assert_eq!(fp_closed_form(2, &rat(1, 1)).unwrap(), rat(-1, 1440));
        assert_eq!(fp_closed_form(2, &rat(0, 1)).unwrap(), rat(0, 1));
        assert!(fp_closed_form(1, &rat(1, 1)).is_err());
        let g = fp_general(2, &ParamScalar::p(), &ParamScalar::q()).unwrap();
        assert_eq!(g, ParamScalar::parse_text("-p^2*q^2/(5760*(p+q))").unwrap());
        for u in [rat(1, 1), rat(1, 2), rat(3, 1)] {
            let gen = fp_general(2, &(rat(2, 1) * &u * &u), &(-&u * &u)).unwrap();
            assert_eq!(gen, fp_closed_form(2, &u).unwrap());
        }
    }

    #[test]
    fn u_zero_is_identity() {
        for alpha in 0..2 {
            let t = shifted_tau(alpha, &rat(0, 1), 2).unwrap();
            let b = expand::<Rational>(alpha, Variant::W, Mode::Base, None, 2).unwrap();
            assert_eq!(t.levels(), b.levels());
        }
    }

    #[test]
    fn routes_agree_small() {
        assert!(verify_taueq(0, &rat(1, 1), 3).unwrap().passed());
        assert!(verify_taueq(1, &rat(1, 2), 2).unwrap().passed());
    }

    #[test]
    fn level_two_constant() {
        let f = shifted_tau(0, &rat(1, 1), 2).unwrap().graded_log().unwrap();
        assert_eq!(f.level(2).coeff(&Monomial::one()), rat(-3, 128));
        let f1 = shifted_tau(1, &rat(1, 1), 2).unwrap().graded_log().unwrap();
        assert_eq!(f1.level(2).coeff(&Monomial::one()), rat(-1, 1440));
    }

    #[test]
    fn depth_bounds() {
        let p0 = ShiftPlan::new(0, &rat(1, 1), 1).unwrap();
        assert_eq!(p0.base_depth(4), 6);
        let p1 = ShiftPlan::new(1, &rat(1, 1), 1).unwrap();
        assert_eq!(p1.base_depth(2), 5);
        let base = expand::<Rational>(0, Variant::W, Mode::Base, None, 3).unwrap();
        assert!(matches!(
            apply_shift(&base, &p0, 4),
            Err(KdvError::InsufficientDepth { .. })
        ));
    }
}
