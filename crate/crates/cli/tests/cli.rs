use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hodge-caj"));
    cmd.args(args).env_remove("HODGE_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("HODGE_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn log_constant(v: &Value, level: u64) -> Option<String> {
    v["log_tau"].as_array()?.iter().find_map(|t| {
        (t["hbar"] == level && t["monomial"].as_array()?.is_empty()).then(|| t["coeff"].as_str().unwrap().to_string())
    })
}

const EXPAND_F2: &[&str] = &["expand", "--alpha", "0", "--mode", "qp", "--symbolic", "--order", "2"];
const F2_CONSTANT: &str = "(-1/128)*(p^2 - p*s^2 + s^4)/(s^2)";

#[test]
fn expand_reports_genus_two_constant() {
    let out = run(EXPAND_F2, None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(log_constant(&json_of(&out), 2).as_deref(), Some(F2_CONSTANT));
}

#[test]
fn order_zero_is_unit() {
    let out = run(&["expand", "--alpha", "1", "--order", "0"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let tau = v["tau"].as_array().unwrap();
    assert_eq!(tau.len(), 1);
    assert_eq!(tau[0]["coeff"], "1");
    assert!(tau[0]["monomial"].as_array().unwrap().is_empty());
    assert!(v["log_tau"].as_array().unwrap().is_empty());
}

#[test]
fn tabulated_alpha_one_passes() {
    let out = run(&["verify-appendix", "--alpha", "1", "--order", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn tabulated_at_point_passes() {
    let out = run(&["verify-appendix", "--alpha", "0", "--p", "-2", "--s", "1/3", "--order", "4"], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["expand", "--alpha", "2"][..],
        &["expand", "--alpha", "0", "--p", "1"],
        &["expand", "--alpha", "0", "--p", "1", "--s", "0"],
        &["expand", "--alpha", "0", "--symbolic", "--u", "1"],
        &["expand", "--alpha", "0", "--p", "x", "--s", "1"],
        &["expand", "--alpha", "0", "--mode", "base", "--u", "1"],
        &["verify-constraints", "--alpha", "0", "--symbolic"],
        &["verify-appendix", "--alpha", "0", "--order", "99"],
        &["spectral", "--curve", "nope"],
        &["spectral", "--curve", "airy", "--gmax", "0", "--nmax", "2"],
        &["no-such-command"],
    ] {
        let out = run(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(EXPAND_F2, Some(dir.path()));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = run(EXPAND_F2, Some(dir.path()));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    assert!(second.stderr.is_empty());
}

#[test]
fn changed_order_uses_new_key() {
    let dir = tempfile::tempdir().unwrap();
    run(EXPAND_F2, Some(dir.path()));
    let mut args = EXPAND_F2.to_vec();
    *args.last_mut().unwrap() = "3";
    let out = run(&args, Some(dir.path()));
    assert_eq!(json_of(&out)["order"], 3);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let mut args = EXPAND_F2.to_vec();
    args.extend(["--cache", flag_dir.path().to_str().unwrap()]);
    run(&args, Some(env_dir.path()));
    assert_eq!(fs::read_dir(env_dir.path()).unwrap().count(), 0);
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 1);
}

#[test]
fn tampered_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = run(EXPAND_F2, Some(dir.path()));
    let entry = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = fs::read_to_string(&entry).unwrap();
    assert!(text.contains("-1/128"));
    fs::write(&entry, text.replace("-1/128", "-1/127")).unwrap();

    let again = run(EXPAND_F2, Some(dir.path()));
    assert_eq!(again.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&again.stderr).contains("warning"));
    assert_eq!(again.stdout, fresh.stdout);
    assert_eq!(log_constant(&json_of(&again), 2).as_deref(), Some(F2_CONSTANT));

    // The rewritten entry is valid again.
    let third = run(EXPAND_F2, Some(dir.path()));
    assert!(third.stderr.is_empty());
    assert_eq!(third.stdout, fresh.stdout);
}

#[test]
fn version_mismatch_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let fresh = run(EXPAND_F2, Some(dir.path()));
    let entry = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = fs::read_to_string(&entry).unwrap();
    fs::write(&entry, text.replacen("cache-1", "cache-0", 1)).unwrap();
    let again = run(EXPAND_F2, Some(dir.path()));
    assert!(String::from_utf8_lossy(&again.stderr).contains("version"));
    assert_eq!(again.stdout, fresh.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(
        &["kdv-check", "--alpha", "1", "--u", "1", "--order", "2", "--out", path.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["fp_genus_2"], "-1/1440");
}

#[test]
fn u_mode_matches_rational_mode() {
    let a = run(&["expand", "--alpha", "1", "--u", "1/2", "--order", "2"], None);
    let b = run(&["expand", "--alpha", "1", "--p", "1/2", "--s", "1/2", "--order", "2"], None);
    assert_eq!(json_of(&a)["log_tau"], json_of(&b)["log_tau"]);
    assert_eq!(json_of(&a)["parameters"]["q"], "-1/4");
}

#[test]
fn spectral_commands() {
    let out = run(&["spectral", "--curve", "bessel", "--gmax", "1", "--nmax", "1"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let w11 = &v["correlators"][0];
    assert_eq!((w11["g"].as_u64(), w11["n"].as_u64()), (Some(1), Some(1)));
    assert_eq!(w11["terms"][0]["poles"][0], 2);
    assert_eq!(w11["terms"][0]["coeff"], "1/8");

    let out = run(&["spectral-compare", "--alpha", "0", "--u", "1", "--gmax", "1", "--nmax", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn constraints_and_series_dump() {
    let out = run(
        &["verify-constraints", "--alpha", "0", "--u", "1", "--order", "2", "--degree", "4", "--kmax", "2"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["dump-series", "--name", "ftilde", "--u", "1", "--series-order", "8"], None);
    let v = json_of(&out);
    let terms = v["series"]["terms"].as_array().unwrap();
    let want = [(1, "1"), (3, "1/3"), (5, "1/5"), (7, "1/7")];
    assert_eq!(terms.len(), want.len());
    for (t, (e, c)) in terms.iter().zip(want) {
        assert_eq!((t[0].as_i64().unwrap(), t[1].as_str().unwrap()), (e, c));
    }
}
