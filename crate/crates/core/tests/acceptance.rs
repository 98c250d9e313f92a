//! Acceptance criteria 1 to 7. One PASS/FAIL line per criterion; nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use hodge_caj::caj::{degree_cap, expand, Mode, Variant};
use hodge_caj::checks::{
    tabulated_at, tabulated_symbolic, base_golden, commutator_check, constraint_check, variants_agree,
};
use hodge_caj::constraints::verify_dimension;
use hodge_caj::curve::{CurveData, CurveParams};
use hodge_caj::fock::Monomial;
use hodge_caj::golden::{table_poly, tables};
use hodge_caj::kdv::{fp_closed_form, kappa_parameters, verify_taueq};
use hodge_caj::scalar::rat;
use hodge_caj::spectral::{
    caj_route, compare_curves, compare_tables, default_precision, kappa_route, spectral_correlators, SpectralCurve,
};
use hodge_caj::{LaurentSeries, ParamScalar, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_points(n: usize, seed: u64) -> Vec<(Rational, Rational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let p = rat(rng.random_range(-9..=9), rng.random_range(1..=4));
        let s = rat(rng.random_range(-9..=9), rng.random_range(1..=4));
        if Scalar::is_zero(&p) || Scalar::is_zero(&s) || &s * &s == p {
            continue;
        }
        out.push((p, s));
    }
    out
}

fn criterion_1() -> Outcome {
    for (alpha, levels) in [(0, 5), (1, 3)] {
        let d = tabulated_symbolic(alpha, levels).map_err(|e| e.to_string())?;
        ensure(d.is_empty(), || format!("symbolic alpha={alpha}: levels {:?} differ", levels_of(&d)))?;
    }
    for (p, s) in random_points(5, 0x5eed) {
        let d = tabulated_at(0, 7, &p, &s).map_err(|e| e.to_string())?;
        ensure(d.is_empty(), || format!("(p,s)=({p},{s}): levels {:?} differ", levels_of(&d)))?;
    }
    Ok(())
}

fn levels_of<S: Scalar>(d: &[hodge_caj::checks::LevelDiff<S>]) -> Vec<usize> {
    d.iter().map(|x| x.level).collect()
}

fn criterion_2() -> Outcome {
    for (alpha, levels) in [(0, 6), (1, 3)] {
        let d = base_golden(alpha, levels).map_err(|e| e.to_string())?;
        ensure(d.is_empty(), || format!("base alpha={alpha}: {} differences", d.len()))?;
        let v = variants_agree::<Rational>(alpha, Mode::Base, None, levels).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), || format!("base alpha={alpha}: W and W* differ"))?;
    }
    let pr = CurveParams::new(rat(3, 1), rat(2, 1)).map_err(|e| e.to_string())?;
    for (alpha, levels) in [(0, 5), (1, 3)] {
        let v = variants_agree(alpha, Mode::Conjugated, Some(&pr), levels).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), || format!("conjugated alpha={alpha}: W and W* differ"))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    for (p, s) in [(3, 2), (5, 3)] {
        let (p, s) = (rat(p, 1), rat(s, 1));
        for alpha in 0..2 {
            let f = constraint_check(alpha, &p, &s, 4).map_err(|e| e.to_string())?;
            ensure(f.is_empty(), || {
                format!("alpha={alpha} at ({p},{s}): {} fails first", f[0].operator)
            })?;
            let c = commutator_check(alpha, &p, &s, 3, 8).map_err(|e| e.to_string())?;
            ensure(c.is_empty(), || format!("alpha={alpha} at ({p},{s}): {}", c[0]))?;
        }
    }
    Ok(())
}

fn identity_upto<S: Scalar>(g: &LaurentSeries<S>, n: i64) -> bool {
    (0..n).all(|e| {
        let want = if e == 1 { S::one() } else { S::zero() };
        g.coeff(e).map(|c| c == want).unwrap_or(false)
    })
}

fn zero_upto<S: Scalar>(g: &LaurentSeries<S>, n: i64) -> bool {
    (0..n).all(|e| g.coeff(e).map(|c| c.is_zero()).unwrap_or(false))
}

fn series_identities<S: Scalar>(p: S, s: S) -> Outcome {
    const N: i64 = 12;
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let pr = CurveParams::new(p.clone(), s.clone()).map_err(|e| err(&e))?;
    let q = pr.q.clone();
    let cd = CurveData::build(pr, N + 4).map_err(|e| err(&e))?;
    ensure(identity_upto(&cd.f.compose(&cd.h).map_err(|e| err(&e))?, N), || "f∘h".into())?;
    ensure(identity_upto(&cd.ftilde.compose(&cd.htilde).map_err(|e| err(&e))?, N), || "f̃∘h̃".into())?;
    let chain = cd
        .f
        .compose(&cd.htilde.compose(&cd.big_y).map_err(|e| err(&e))?)
        .map_err(|e| err(&e))?;
    ensure(identity_upto(&chain, N), || "f(h̃(Y(z)))".into())?;
    let cube = cd.f1.pow_int(3).map_err(|e| err(&e))?.scale(&S::from_ratio(1, 3));
    let integral = cd.ftilde.mul(&cd.x.derivative()).antiderivative().map_err(|e| err(&e))?;
    ensure(zero_upto(&cube.sub(&integral), N), || "f₁³/3 = ∫ f̃ dx".into())?;
    let via = cd.fb1.compose(&cd.ftilde).map_err(|e| err(&e))?;
    ensure(zero_upto(&cd.f1.sub(&via), N), || "Bernoulli route for f₁".into())?;
    // p e^{-q x} = (p+q) e^{q y_1 / s} - q e^{s y_1}
    let lhs = cd.x.scale(&q.negate()).exp().map_err(|e| err(&e))?.scale(&p);
    let qs = q.try_div(&s).map_err(|e| err(&e))?;
    let r1 = cd.y1.scale(&qs).exp().map_err(|e| err(&e))?.scale(&p.plus(&q));
    let r2 = cd.y1.scale(&s).exp().map_err(|e| err(&e))?.scale(&q);
    ensure(zero_upto(&lhs.sub(&r1.sub(&r2)), N), || "exp relation between x and y_1".into())
}

fn criterion_4() -> Outcome {
    series_identities(ParamScalar::p(), ParamScalar::s()).map_err(|e| format!("symbolic: {e}"))?;
    for (p, s) in [(3, 2), (5, 3), (-2, 1)] {
        series_identities(rat(p, 1), rat(s, 1)).map_err(|e| format!("({p},{s}): {e}"))?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    for (alpha, u, m) in [(0, rat(1, 1), 4), (0, rat(1, 2), 4), (1, rat(1, 1), 2), (1, rat(1, 2), 2)] {
        let r = verify_taueq(alpha, &u, m).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("tau equality alpha={alpha} u={u}"))?;
    }
    let expected = [
        (0, [rat(-1, 1), rat(-5, 2), rat(-37, 3)]),
        (1, [rat(-4, 1), rat(-15, 1), rat(-316, 3)]),
    ];
    for u in [rat(1, 1), rat(1, 2), rat(3, 1)] {
        for (alpha, vals) in &expected {
            let got = kappa_parameters(*alpha, &u, 3).map_err(|e| e.to_string())?;
            for (j, (g, v)) in got.iter().zip(vals).enumerate() {
                let want = v * (&u * &u).pow(j as i32 + 1);
                ensure(g == &want, || format!("s_{}^{alpha} at u={u}: {g} != {want}", j + 1))?;
            }
        }
        let fp = fp_closed_form(2, &u).map_err(|e| e.to_string())?;
        ensure(fp == -u.pow(6) / rat(1440, 1), || format!("FP closed form at u={u}"))?;
        let (p0, s0) = (rat(2, 1) * &u * &u, u.clone());
        let f2 = table_poly(tables(1, true)[1], |e| ParamScalar::parse_text(e)?.specialize(&p0, &s0))
            .map_err(|e| e.to_string())?;
        let constant = f2.coeff(&Monomial::one());
        ensure(constant == fp, || format!("F_2^1 constant at u={u}: {constant} != {fp}"))?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let pairs = [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)];
    let prec = default_precision(2, 4);
    let e = |x: &dyn std::fmt::Display| x.to_string();
    for u in [rat(1, 1), rat(1, 2)] {
        let pr = CurveParams::u_line(u.clone()).map_err(|x| e(&x))?;
        for alpha in 0..2u32 {
            let (sname, xname) = if alpha == 0 { ("s0", "xy0") } else { ("s1", "xy1") };
            let s_curve = SpectralCurve::named(sname, &u, prec).map_err(|x| e(&x))?;
            let x_curve = SpectralCurve::named(xname, &u, prec).map_err(|x| e(&x))?;
            let sp = spectral_correlators(s_curve.clone(), &pairs).map_err(|x| e(&x))?;
            let kr = kappa_route(alpha, &u, &pairs).map_err(|x| e(&x))?;
            ensure(compare_tables(&sp, &kr).passed(), || format!("{sname} u={u}: spectral vs intersections"))?;
            let sx = spectral_correlators(x_curve.clone(), &pairs).map_err(|x| e(&x))?;
            let cr = caj_route(alpha, &pr, &pairs).map_err(|x| e(&x))?;
            ensure(compare_tables(&sx, &cr).passed(), || format!("{xname} u={u}: spectral vs intersections"))?;
            let sym = compare_curves(s_curve.clone(), x_curve, &pairs).map_err(|x| e(&x))?;
            ensure(sym.passed(), || format!("{sname} vs {xname} u={u}: symplectic pair"))?;
            let eps = rat(-2, 1);
            let scaled = spectral_correlators(s_curve.rescale_y(&eps), &pairs).map_err(|x| e(&x))?;
            for &(g, n) in &pairs {
                let want = sp[&(g, n)].scale(&eps.pow(2 - 2 * g as i32 - n as i32));
                ensure(scaled[&(g, n)] == want, || format!("{sname} u={u}: rescaling ({g},{n})"))?;
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    // Degree bound and parity over computed taus.
    for (alpha, levels) in [(0, 6), (1, 4)] {
        let t = expand::<Rational>(alpha, Variant::W, Mode::Base, None, levels).map_err(|e| e.to_string())?;
        t.check_flags().map_err(|e| format!("base alpha={alpha}: {e}"))?;
        for (k, lvl) in t.levels().iter().enumerate() {
            let bound = degree_cap(alpha, k);
            ensure(lvl.max_degree().is_none_or(|d| d <= bound), || format!("degree at level {k}"))?;
            ensure(lvl.all_odd(), || format!("parity at level {k}"))?;
        }
    }
    for u in [rat(1, 1), rat(1, 2)] {
        let pr = CurveParams::u_line(u.clone()).map_err(|e| e.to_string())?;
        for alpha in 0..2 {
            let t = expand(alpha, Variant::W, Mode::Conjugated, Some(&pr), 3).map_err(|e| e.to_string())?;
            ensure(t.levels().iter().all(|l| l.all_odd()), || format!("KdV parity alpha={alpha} u={u}"))?;
        }
    }
    // Homogeneity weights.
    let pr = CurveParams::new(ParamScalar::p(), ParamScalar::s()).map_err(|e| e.to_string())?;
    for (alpha, levels) in [(0, 4), (1, 3)] {
        let t = expand(alpha, Variant::W, Mode::Conjugated, Some(&pr), levels).map_err(|e| e.to_string())?;
        t.check_flags().map_err(|e| format!("symbolic alpha={alpha}: {e}"))?;
        let bad = verify_dimension(&t, alpha);
        ensure(bad.is_empty(), || format!("weight rule alpha={alpha}: {} coefficients", bad.len()))?;
    }
    // Correlator symmetry and pole structure.
    let prec = default_precision(2, 4);
    for name in ["airy", "bessel", "s0", "s1", "xy0", "xy1"] {
        let c = SpectralCurve::named(name, &rat(1, 2), prec).map_err(|e| e.to_string())?;
        let w = spectral_correlators(c, &[(0, 4), (1, 2), (2, 1)]).map_err(|e| e.to_string())?;
        for d in w.values() {
            ensure(d.is_symmetric(), || format!("{name} ({},{}) not symmetric", d.g, d.n))?;
            ensure(d.residue_free(), || format!("{name} ({},{}) has residues", d.g, d.n))?;
            if matches!(name, "airy" | "bessel" | "s0" | "s1") {
                ensure(d.only_even_poles(), || format!("{name} ({},{}) odd poles", d.g, d.n))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("golden log tau^(alpha)_{q,p} tables", criterion_1),
        ("base tau tables and W/W* agreement", criterion_2),
        ("constraints and commutators", criterion_3),
        ("series identities", criterion_4),
        ("KdV shift, kappa parameters, FP constant", criterion_5),
        ("spectral cross-route", criterion_6),
        ("property suites", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS criterion {}: {name} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
