mod cache;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hodge_caj::caj::{expand, Mode, Variant};
use hodge_caj::checks::{
    tabulated_at, tabulated_symbolic, base_golden, commutator_check, constraint_check, diffs_to_json,
    failures_to_json, reference_levels, CheckError,
};
use hodge_caj::curve::{CurveData, CurveParams};
use hodge_caj::kdv::{fp_closed_form, kappa_parameters, verify_taueq};
use hodge_caj::spectral::{
    caj_route, compare_curves, compare_tables, default_precision, kappa_route, spectral_correlators,
    SpectralCurve,
};
use hodge_caj::scalar::rat;
use hodge_caj::{LaurentSeries, ParamScalar, Rational, Scalar};

use cache::Cache;

#[derive(Parser)]
#[command(name = "hodge-caj", version, about = "Exact cut-and-join and spectral-curve computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory; defaults to $HODGE_CACHE_DIR, else no cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    /// Keep `p` and `s` as symbols.
    #[arg(long, conflicts_with_all = ["p", "s", "u"])]
    symbolic: bool,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Sets p = 2u^2, s = u.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["p", "s"])]
    u: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Base,
    Qp,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    W,
    Wstar,
}

#[derive(Subcommand)]
enum Command {
    /// Cut-and-join expansion of tau and log tau.
    Expand {
        #[arg(long, value_parser = alpha_parser())]
        alpha: u32,
        #[arg(long, value_enum, default_value = "qp")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "w")]
        variant: VariantArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Compare log tau with the tabulated free energies.
    VerifyAppendix {
        #[arg(long, value_parser = alpha_parser())]
        alpha: u32,
        #[arg(long, value_enum, default_value = "qp")]
        mode: ModeArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Defaults to the symbolic limit (5 for alpha 0, 3 for alpha 1) or all tabulated levels at a point.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Constraint annihilation and commutation relations at a rational point.
    VerifyConstraints {
        #[arg(long, value_parser = alpha_parser())]
        alpha: u32,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Weighted degree of the monomial basis for commutators.
        #[arg(long, default_value_t = 8)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        kmax: i64,
    },
    /// Shifted-tau identity, kappa parameters and the genus-2 constant on the u-line.
    KdvCheck {
        #[arg(long, value_parser = alpha_parser())]
        alpha: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        u: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Spectral recursion on a named curve.
    Spectral {
        /// airy, bessel, s0, s1, xy0, xy1.
        #[arg(long)]
        curve: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        u: String,
        #[arg(long, default_value_t = 1)]
        gmax: u32,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
        #[arg(long)]
        series_order: Option<i64>,
    },
    /// Spectral recursion against the intersection routes on the u-line.
    SpectralCompare {
        #[arg(long, value_parser = alpha_parser())]
        alpha: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        u: String,
        #[arg(long, default_value_t = 1)]
        gmax: u32,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
        #[arg(long)]
        series_order: Option<i64>,
    },
    /// Print one of the curve series.
    DumpSeries {
        /// x, f, h, y1, Y, htilde, ftilde, f1, fb1.
        #[arg(long)]
        name: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "series-order", visible_alias = "order", default_value_t = 12)]
        series_order: i64,
    },
}

fn alpha_parser() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(0..=1)
}

enum Failure {
    Usage(String),
    Verification(Value),
}

type Outcome = Result<Value, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

enum Point {
    Symbolic,
    At(Rational, Rational),
}

fn parse_rational(flag: &str, text: &str) -> Result<Rational, Failure> {
    Rational::parse_text(text).map_err(|e| usage(format!("--{flag} {text:?}: {e}")))
}

impl ParamArgs {
    fn given(&self) -> bool {
        self.symbolic || self.p.is_some() || self.s.is_some() || self.u.is_some()
    }

    /// `None` when no parameter flag was given.
    fn point(&self) -> Result<Option<Point>, Failure> {
        if self.symbolic {
            return Ok(Some(Point::Symbolic));
        }
        if let Some(u) = &self.u {
            let u = parse_rational("u", u)?;
            if u.is_zero() {
                return Err(usage("--u must be nonzero"));
            }
            let p = rat(2, 1) * &u * &u;
            return Ok(Some(Point::At(p, u)));
        }
        match (&self.p, &self.s) {
            (None, None) => Ok(None),
            (Some(p), Some(s)) => {
                let (p, s) = (parse_rational("p", p)?, parse_rational("s", s)?);
                if s.is_zero() {
                    return Err(usage("--s must be nonzero"));
                }
                Ok(Some(Point::At(p, s)))
            }
            _ => Err(usage("--p and --s must be given together")),
        }
    }

    fn describe(&self) -> Result<Value, Failure> {
        Ok(match self.point()? {
            None | Some(Point::Symbolic) => json!("symbolic"),
            Some(Point::At(p, s)) => {
                let q = &s * &s - &p;
                json!({"p": p.to_string(), "s": s.to_string(), "q": q.to_string()})
            }
        })
    }
}

fn expand_json<S: Scalar>(
    alpha: u32,
    variant: Variant,
    mode: Mode,
    params: Option<&CurveParams<S>>,
    order: usize,
) -> Outcome {
    let tau = expand(alpha, variant, mode, params, order).map_err(usage)?;
    let log = tau.graded_log().map_err(usage)?;
    Ok(json!({"tau": tau.to_json(), "log_tau": log.to_json()}))
}

fn run_expand(
    alpha: u32,
    mode: ModeArg,
    variant: VariantArg,
    params: &ParamArgs,
    order: usize,
    cache: Option<&Cache>,
) -> Outcome {
    let variant = match variant {
        VariantArg::W => Variant::W,
        VariantArg::Wstar => Variant::WStar,
    };
    let point = params.point()?;
    if matches!(mode, ModeArg::Base) && params.given() {
        return Err(usage("--mode base takes no parameters"));
    }
    let mut out = json!({
        "command": "expand",
        "alpha": alpha,
        "mode": match mode { ModeArg::Base => "base", ModeArg::Qp => "qp" },
        "variant": match variant { Variant::W => "w", Variant::WStar => "wstar" },
        "order": order,
        "parameters": if matches!(mode, ModeArg::Base) { Value::Null } else { params.describe()? },
    });
    let key = Cache::key(&out);
    if let Some(hit) = cache.and_then(|c| c.load(&key)) {
        return Ok(hit);
    }
    let result = match (mode, point) {
        (ModeArg::Base, _) => expand_json::<Rational>(alpha, variant, Mode::Base, None, order)?,
        (ModeArg::Qp, None | Some(Point::Symbolic)) => {
            let pr = CurveParams::new(ParamScalar::p(), ParamScalar::s()).map_err(usage)?;
            expand_json(alpha, variant, Mode::Conjugated, Some(&pr), order)?
        }
        (ModeArg::Qp, Some(Point::At(p, s))) => {
            let pr = CurveParams::new(p, s).map_err(usage)?;
            expand_json(alpha, variant, Mode::Conjugated, Some(&pr), order)?
        }
    };
    out["tau"] = result["tau"].clone();
    out["log_tau"] = result["log_tau"].clone();
    if let Some(c) = cache {
        c.store(&key, &out);
    }
    Ok(out)
}

fn check_error(e: CheckError) -> Failure {
    usage(e)
}

fn verdict(out: Value) -> Outcome {
    if out["passed"] == json!(true) {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn run_verify_tables(alpha: u32, mode: ModeArg, params: &ParamArgs, order: Option<usize>) -> Outcome {
    let mut out = json!({"command": "verify-appendix", "alpha": alpha});
    match mode {
        ModeArg::Base => {
            if params.given() {
                return Err(usage("--mode base takes no parameters"));
            }
            let levels = order.unwrap_or_else(|| reference_levels(alpha, false));
            let diffs = base_golden(alpha, levels).map_err(check_error)?;
            let by_variant: Vec<Value> = diffs
                .iter()
                .map(|(v, d)| json!({"variant": format!("{v:?}"), "level": d.level, "difference": d.diff.to_json()}))
                .collect();
            out["mode"] = json!("base");
            out["order"] = json!(levels);
            out["passed"] = json!(diffs.is_empty());
            out["differences"] = Value::Array(by_variant);
        }
        ModeArg::Qp => {
            out["mode"] = json!("qp");
            out["parameters"] = params.describe()?;
            match params.point()? {
                None | Some(Point::Symbolic) => {
                    let levels = order.unwrap_or(if alpha == 0 { 5 } else { 3 });
                    let d = tabulated_symbolic(alpha, levels).map_err(check_error)?;
                    out["order"] = json!(levels);
                    out["passed"] = json!(d.is_empty());
                    out["differences"] = diffs_to_json(&d);
                }
                Some(Point::At(p, s)) => {
                    let levels = order.unwrap_or_else(|| reference_levels(alpha, true));
                    let d = tabulated_at(alpha, levels, &p, &s).map_err(check_error)?;
                    out["order"] = json!(levels);
                    out["passed"] = json!(d.is_empty());
                    out["differences"] = diffs_to_json(&d);
                }
            }
        }
    }
    verdict(out)
}

fn run_verify_constraints(alpha: u32, params: &ParamArgs, order: usize, degree: u32, kmax: i64) -> Outcome {
    let (p, s) = match params.point()? {
        Some(Point::At(p, s)) => (p, s),
        _ => return Err(usage("verify-constraints needs --p/--s or --u")),
    };
    let failures = constraint_check(alpha, &p, &s, order).map_err(check_error)?;
    let commutators = commutator_check(alpha, &p, &s, kmax, degree).map_err(check_error)?;
    verdict(json!({
        "command": "verify-constraints",
        "alpha": alpha,
        "parameters": params.describe()?,
        "order": order,
        "degree": degree,
        "kmax": kmax,
        "passed": failures.is_empty() && commutators.is_empty(),
        "constraint_failures": failures_to_json(&failures),
        "commutator_failures": commutators,
    }))
}

fn run_kdv_check(alpha: u32, u: &str, order: usize) -> Outcome {
    let u = parse_rational("u", u)?;
    if u.is_zero() {
        return Err(usage("--u must be nonzero"));
    }
    let report = verify_taueq(alpha, &u, order).map_err(usage)?;
    let diffs: Vec<Value> = report
        .diff
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(k, d)| json!({"level": k, "difference": d.to_json()}))
        .collect();
    let kappa = kappa_parameters(alpha, &u, 4).map_err(usage)?;
    let fp = fp_closed_form(2, &u).map_err(usage)?;
    verdict(json!({
        "command": "kdv-check",
        "alpha": alpha,
        "u": u.to_string(),
        "order": order,
        "passed": report.passed(),
        "differences": diffs,
        "kappa_parameters": kappa.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "fp_genus_2": fp.to_string(),
    }))
}

/// Stable `(g, n)` with `g <= gmax`, `1 <= n <= nmax`.
fn stable_pairs(gmax: u32, nmax: u32) -> Vec<(u32, u32)> {
    (0..=gmax)
        .flat_map(|g| (1..=nmax).map(move |n| (g, n)))
        .filter(|&(g, n)| 2 * g + n > 2)
        .collect()
}

fn correlators_json(table: &BTreeMap<(u32, u32), hodge_caj::spectral::MultiDiff<Rational>>) -> Value {
    Value::Array(table.values().map(|w| w.to_json()).collect())
}

fn run_spectral(curve: &str, u: &str, gmax: u32, nmax: u32, series_order: Option<i64>) -> Outcome {
    let u = parse_rational("u", u)?;
    let pairs = stable_pairs(gmax, nmax);
    if pairs.is_empty() {
        return Err(usage("no stable (g, n) within --gmax/--nmax"));
    }
    let prec = series_order.unwrap_or_else(|| default_precision(gmax, nmax));
    let c = SpectralCurve::named(curve, &u, prec).map_err(usage)?;
    let table = spectral_correlators(c, &pairs).map_err(usage)?;
    Ok(json!({
        "command": "spectral",
        "curve": curve,
        "u": u.to_string(),
        "gmax": gmax,
        "nmax": nmax,
        "series_order": prec,
        "correlators": correlators_json(&table),
    }))
}

fn run_spectral_compare(alpha: u32, u: &str, gmax: u32, nmax: u32, series_order: Option<i64>) -> Outcome {
    let u = parse_rational("u", u)?;
    if u.is_zero() {
        return Err(usage("--u must be nonzero"));
    }
    let pairs = stable_pairs(gmax, nmax);
    if pairs.is_empty() {
        return Err(usage("no stable (g, n) within --gmax/--nmax"));
    }
    let prec = series_order.unwrap_or_else(|| default_precision(gmax, nmax));
    let (s_name, xy_name) = if alpha == 0 { ("s0", "xy0") } else { ("s1", "xy1") };
    let s_curve = SpectralCurve::named(s_name, &u, prec).map_err(usage)?;
    let xy_curve = SpectralCurve::named(xy_name, &u, prec).map_err(usage)?;

    let s_spec = spectral_correlators(s_curve.clone(), &pairs).map_err(usage)?;
    let s_int = kappa_route(alpha, &u, &pairs).map_err(usage)?;
    let xy_spec = spectral_correlators(xy_curve.clone(), &pairs).map_err(usage)?;
    let params = CurveParams::u_line(u.clone()).map_err(usage)?;
    let xy_int = caj_route(alpha, &params, &pairs).map_err(usage)?;
    let symplectic = compare_curves(s_curve, xy_curve, &pairs).map_err(usage)?;

    let r1 = compare_tables(&s_spec, &s_int);
    let r2 = compare_tables(&xy_spec, &xy_int);
    verdict(json!({
        "command": "spectral-compare",
        "alpha": alpha,
        "u": u.to_string(),
        "gmax": gmax,
        "nmax": nmax,
        "series_order": prec,
        "passed": r1.passed() && r2.passed() && symplectic.passed(),
        "s_curve_vs_intersections": r1.to_json(),
        "xy_curve_vs_intersections": r2.to_json(),
        "symplectic_pair": symplectic.to_json(),
    }))
}

fn series_json<S: Scalar>(s: &LaurentSeries<S>) -> Value {
    json!({
        "text": s.to_string(),
        "truncation": s.trunc(),
        "terms": s.terms().map(|(e, c)| json!([e, c.to_string()])).collect::<Vec<_>>(),
    })
}

fn dump<S: Scalar>(params: CurveParams<S>, name: &str, order: i64) -> Outcome {
    let cd = CurveData::build(params, order).map_err(usage)?;
    let s = cd
        .series_by_name(name)
        .ok_or_else(|| usage(format!("unknown series {name:?}")))?;
    Ok(series_json(s))
}

fn run_dump_series(name: &str, params: &ParamArgs, order: i64) -> Outcome {
    let series = match params.point()? {
        None | Some(Point::Symbolic) => dump(
            CurveParams::new(ParamScalar::p(), ParamScalar::s()).map_err(usage)?,
            name,
            order,
        )?,
        Some(Point::At(p, s)) => dump(CurveParams::new(p, s).map_err(usage)?, name, order)?,
    };
    Ok(json!({
        "command": "dump-series",
        "name": name,
        "parameters": params.describe()?,
        "series_order": order,
        "series": series,
    }))
}

fn dispatch(cli: &Cli) -> Outcome {
    let cache = Cache::locate(cli.cache.as_deref());
    match &cli.command {
        Command::Expand {
            alpha,
            mode,
            variant,
            params,
            order,
        } => run_expand(*alpha, *mode, *variant, params, *order, cache.as_ref()),
        Command::VerifyAppendix {
            alpha,
            mode,
            params,
            order,
        } => run_verify_tables(*alpha, *mode, params, *order),
        Command::VerifyConstraints {
            alpha,
            params,
            order,
            degree,
            kmax,
        } => run_verify_constraints(*alpha, params, *order, *degree, *kmax),
        Command::KdvCheck { alpha, u, order } => run_kdv_check(*alpha, u, *order),
        Command::Spectral {
            curve,
            u,
            gmax,
            nmax,
            series_order,
        } => run_spectral(curve, u, *gmax, *nmax, *series_order),
        Command::SpectralCompare {
            alpha,
            u,
            gmax,
            nmax,
            series_order,
        } => run_spectral_compare(*alpha, u, *gmax, *nmax, *series_order),
        Command::DumpSeries {
            name,
            params,
            series_order,
        } => run_dump_series(name, params, *series_order),
    }
}

fn emit(cli: &Cli, v: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = dispatch(&cli);
    if cli.verbose > 0 {
        eprintln!("elapsed {:.2?}", start.elapsed());
    }
    let (value, code) = match outcome {
        Ok(v) => (v, ExitCode::SUCCESS),
        Err(Failure::Verification(v)) => (v, ExitCode::from(1)),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    code
}
