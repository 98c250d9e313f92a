//! Verification suites shared by the command-line driver and the acceptance
//! target. Each returns the offending data; an empty result is a pass.

use serde_json::{json, Value};

use crate::caj::{degree_cap, expand, CajError, Mode, Variant};
use crate::constraints::{verify_commutators, ConstraintError, ConstraintSet, Violation};
use crate::curve::{CurveData, CurveError, CurveParams};
use crate::fock::{FockError, GradedSeries, TPolynomial};
use crate::golden::{tables, tables_series};
use crate::scalar::{ParamScalar, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error("only {have} reference levels exist, asked for {want}")]
    NoReference { have: usize, want: usize },
    #[error(transparent)]
    Caj(#[from] CajError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type CheckResult<T> = Result<T, CheckError>;

/// A nonzero difference on one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDiff<S: Scalar> {
    pub level: usize,
    pub diff: TPolynomial<S>,
}

pub fn diffs_to_json<S: Scalar>(d: &[LevelDiff<S>]) -> Value {
    Value::Array(
        d.iter()
            .map(|x| json!({"level": x.level, "difference": x.diff.to_json()}))
            .collect(),
    )
}

fn compare<S: Scalar>(got: &GradedSeries<S>, want: &GradedSeries<S>, levels: usize) -> Vec<LevelDiff<S>> {
    (1..=levels)
        .filter_map(|k| {
            let diff = got.level(k).sub(want.level(k));
            (!diff.is_zero()).then_some(LevelDiff { level: k, diff })
        })
        .collect()
}

fn reference<S: Scalar>(
    alpha: u32,
    qp: bool,
    levels: usize,
    subst: impl Fn(&str) -> Result<S, ScalarError>,
) -> CheckResult<GradedSeries<S>> {
    let t = tables(alpha, qp);
    if levels > t.len() {
        return Err(CheckError::NoReference {
            have: t.len(),
            want: levels,
        });
    }
    Ok(tables_series(&t[..levels], subst)?)
}

/// Number of tabulated levels.
pub fn reference_levels(alpha: u32, qp: bool) -> usize {
    tables(alpha, qp).len()
}

/// `log τ^(α)_{q,p}` against the tables, symbolically in `(p, s)`.
pub fn tabulated_symbolic(alpha: u32, levels: usize) -> CheckResult<Vec<LevelDiff<ParamScalar>>> {
    let want = reference(alpha, true, levels, ParamScalar::parse_text)?;
    let pr = CurveParams::new(ParamScalar::p(), ParamScalar::s())?;
    let got = expand(alpha, Variant::W, Mode::Conjugated, Some(&pr), levels)?.graded_log()?;
    Ok(compare(&got, &want, levels))
}

/// Same comparison at a rational point.
pub fn tabulated_at(alpha: u32, levels: usize, p: &Rational, s: &Rational) -> CheckResult<Vec<LevelDiff<Rational>>> {
    let want = reference(alpha, true, levels, |e| ParamScalar::parse_text(e)?.specialize(p, s))?;
    let pr = CurveParams::new(p.clone(), s.clone())?;
    let got = expand(alpha, Variant::W, Mode::Conjugated, Some(&pr), levels)?.graded_log()?;
    Ok(compare(&got, &want, levels))
}

/// Undeformed `log τ_α` against the tables, for both cut-and-join variants.
pub fn base_golden(alpha: u32, levels: usize) -> CheckResult<Vec<(Variant, LevelDiff<Rational>)>> {
    let want = reference(alpha, false, levels, Rational::parse_text)?;
    let mut out = Vec::new();
    for v in [Variant::W, Variant::WStar] {
        let got = expand::<Rational>(alpha, v, Mode::Base, None, levels)?.graded_log()?;
        out.extend(compare(&got, &want, levels).into_iter().map(|d| (v, d)));
    }
    Ok(out)
}

/// `W` and `W*` agreement on `τ` itself, per level.
pub fn variants_agree<S: Scalar>(
    alpha: u32,
    mode: Mode,
    params: Option<&CurveParams<S>>,
    levels: usize,
) -> CheckResult<Vec<LevelDiff<S>>> {
    let a = expand(alpha, Variant::W, mode, params, levels)?;
    let b = expand(alpha, Variant::WStar, mode, params, levels)?;
    Ok(compare(&a, &b, levels))
}

/// One failed constraint.
#[derive(Debug, Clone)]
pub struct ConstraintFailure {
    pub operator: String,
    pub violation: Violation<Rational>,
}

/// `J_k` (`k = 1..=3`) and `L_k` (`k = -α..=3`) on `τ^(α)_{q,p}` through `levels`.
pub fn constraint_check(alpha: u32, p: &Rational, s: &Rational, levels: usize) -> CheckResult<Vec<ConstraintFailure>> {
    let pr = CurveParams::new(p.clone(), s.clone())?;
    let tau = expand(alpha, Variant::W, Mode::Conjugated, Some(&pr), levels + 1)?;
    let window = degree_cap(alpha, levels + 1) as i64 + 4;
    let curve = CurveData::build(pr, ConstraintSet::<Rational>::required_series_order(window))?;
    let cs = ConstraintSet::new(&curve, alpha, window)?;
    let mut out = Vec::new();
    for k in 1..=3 {
        for v in cs.verify_j(&tau, k, levels)? {
            out.push(ConstraintFailure {
                operator: format!("J{k}"),
                violation: v,
            });
        }
    }
    for k in -(alpha as i64)..=3 {
        for v in cs.verify_l(&tau, k, levels)? {
            out.push(ConstraintFailure {
                operator: format!("L{k}"),
                violation: v,
            });
        }
    }
    Ok(out)
}

/// Commutation relations on all monomials of weighted degree `<= deg`,
/// for indices up to `kmax`. Returns the failing relation names.
pub fn commutator_check(alpha: u32, p: &Rational, s: &Rational, kmax: i64, deg: u32) -> CheckResult<Vec<String>> {
    let window = deg as i64 + 2 * kmax + 4;
    let curve = CurveData::build(
        CurveParams::new(p.clone(), s.clone())?,
        ConstraintSet::<Rational>::required_series_order(window),
    )?;
    let cs = ConstraintSet::new(&curve, alpha, window)?;
    Ok(verify_commutators(&cs, kmax, deg)?
        .into_iter()
        .map(|f| format!("{} on {:?}", f.relation, f.monomial))
        .collect())
}

pub fn failures_to_json(f: &[ConstraintFailure]) -> Value {
    Value::Array(
        f.iter()
            .map(|x| {
                json!({
                    "operator": x.operator,
                    "level": x.violation.level,
                    "monomial": x.violation.monomial.pairs(),
                    "value": x.violation.value.to_string(),
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn small_suites_pass() {
        assert!(tabulated_symbolic(1, 2).unwrap().is_empty());
        assert!(tabulated_at(0, 3, &rat(5, 1), &rat(3, 1)).unwrap().is_empty());
        assert!(base_golden(0, 3).unwrap().is_empty());
        assert!(constraint_check(0, &rat(3, 1), &rat(2, 1), 2).unwrap().is_empty());
        assert!(commutator_check(1, &rat(3, 1), &rat(2, 1), 2, 4).unwrap().is_empty());
    }

    #[test]
    fn missing_reference_is_an_error() {
        assert!(matches!(
            tabulated_symbolic(1, 9),
            Err(CheckError::NoReference { have: 3, want: 9 })
        ));
    }

    #[test]
    fn wrong_point_is_detected() {
        // The tables at (5, 3) do not describe the curve at (3, 2).
        let want = reference(0, true, 2, |e| ParamScalar::parse_text(e)?.specialize(&rat(5, 1), &rat(3, 1))).unwrap();
        let pr = CurveParams::new(rat(3, 1), rat(2, 1)).unwrap();
        let got = expand(0, Variant::W, Mode::Conjugated, Some(&pr), 2).unwrap().graded_log().unwrap();
        assert!(!compare(&got, &want, 2).is_empty());
    }
}
