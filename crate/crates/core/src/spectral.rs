//! Topological recursion on genus-zero curves with a single simple
//! ramification point at `z = 0`, plus the intersection-number route used to
//! cross-check it.
//!
//! Correlators are stored in the global coordinate `z` with the Cauchy kernel
//! as `ω_{0,2}`. The recursion kernel is
//! `½ ∫_{z}^{σ(z)} B(z_1, ·) / (ω_{0,1}(z) - ω_{0,1}(σ(z)))`, with the
//! integration variable in the denominator. This orientation gives
//! `ω_{0,3} = Res B B B / (dx dy)`; the opposite one flips `ω_{g,n}` by `(-1)^n`.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::caj::{expand, CajError, Mode, Variant};
use crate::curve::{ChangeOfVariables, CurveData, CurveError, CurveParams};
use crate::fock::{GradedSeries, FockError, TPolynomial};
use crate::kdv::{shifted_tau, KdvError};
use crate::scalar::{rat, Rational, Scalar};
use crate::series::{LaurentSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("dx must have a simple zero at z = 0")]
    NotSimple,
    #[error("({g},{n}) is not stable")]
    Unstable { g: u32, n: u32 },
    #[error("({g},{n}) produced a residue term at {key:?}")]
    Residue { g: u32, n: u32, key: Vec<u32> },
    #[error("({g},{n}) has nonzero poles beyond order {bound}")]
    Window { g: u32, n: u32, bound: u32 },
    #[error("log tau has {have} levels, need {need}")]
    TooFewLevels { have: usize, need: usize },
    #[error("change of variables covers T_0..T_{have}, need T_{need}")]
    ChangeTooShort { have: usize, need: usize },
    #[error("unknown curve {0:?}")]
    UnknownCurve(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Caj(#[from] CajError),
    #[error(transparent)]
    Kdv(#[from] KdvError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type SpectralResult<T> = Result<T, SpectralError>;

/// Largest pole order `6g - 4 + 2n` of a stable `ω_{g,n}` for the curves in scope.
pub fn pole_bound(g: u32, n: u32) -> u32 {
    6 * g + 2 * n - 4
}

fn check_stable(g: u32, n: u32) -> SpectralResult<()> {
    if 2 * g + n <= 2 || n == 0 {
        return Err(SpectralError::Unstable { g, n });
    }
    Ok(())
}

/// `Σ c ∏ dz_i / z_i^{k_i}` keyed by `(k_1, …, k_n)`; zero entries are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDiff<S: Scalar> {
    pub g: u32,
    pub n: u32,
    pub coeffs: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> MultiDiff<S> {
    pub fn new(g: u32, n: u32) -> Self {
        MultiDiff {
            g,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, key: Vec<u32>, c: &S) {
        debug_assert_eq!(key.len(), self.n as usize);
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(key.clone()).or_insert_with(S::zero);
        entry.plus_assign(c);
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, key: &[u32]) -> S {
        self.coeffs.get(key).cloned().unwrap_or_else(S::zero)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = MultiDiff::new(self.g, self.n);
        for (k, v) in &self.coeffs {
            out.add(k.clone(), &v.times(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add(k.clone(), &v.negate());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_pole(&self) -> u32 {
        self.coeffs.keys().flat_map(|k| k.iter().copied()).max().unwrap_or(0)
    }

    /// Invariant under every permutation of the arguments.
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(k, v)| {
            let mut sorted = k.clone();
            sorted.sort_unstable();
            distinct_permutations(&sorted)
                .into_iter()
                .all(|p| self.coeffs.get(&p) == Some(v))
        })
    }

    /// No `dz/z` terms.
    pub fn residue_free(&self) -> bool {
        self.coeffs.keys().all(|k| k.iter().all(|&e| e >= 2))
    }

    pub fn only_even_poles(&self) -> bool {
        self.coeffs.keys().all(|k| k.iter().all(|&e| e % 2 == 0))
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(k, v)| json!({"poles": k, "coeff": v.to_string()}))
            .collect();
        json!({"g": self.g, "n": self.n, "terms": entries})
    }
}

/// All distinct orderings of a sorted multiset.
fn distinct_permutations(sorted: &[u32]) -> Vec<Vec<u32>> {
    fn go(rest: &mut Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut last = None;
        for i in 0..rest.len() {
            if last == Some(rest[i]) {
                continue;
            }
            last = Some(rest[i]);
            let v = rest.remove(i);
            cur.push(v);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut sorted.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Nontrivial solution of `x(σ) = x` with `σ = -z + O(z^2)`, exact below `prec`.
///
/// Writes `x - x(0) = c w^2` with `w = z + O(z^2)`; then `σ = w^{-1}(-w)`.
pub fn deck_transform<S: Scalar>(x: &LaurentSeries<S>, prec: i64) -> SpectralResult<LaurentSeries<S>> {
    let x = x.truncate(prec + 2);
    if x.order().is_some_and(|o| o < 0) {
        return Err(SpectralError::NotSimple);
    }
    let xs = x.sub(&LaurentSeries::constant(x.coeff(0)?));
    let c = xs.coeff(2)?;
    if !xs.coeff(1)?.is_zero() || c.is_zero() {
        return Err(SpectralError::NotSimple);
    }
    let unit = xs.shift(-2).scale(&c.try_inv().map_err(SeriesError::from)?);
    let w = unit.sqrt_unit()?.shift(1);
    let winv = w.revert()?;
    Ok(winv.compose(&w.neg())?.truncate(prec))
}

/// `(x, y)` with the deck transformation at `z = 0`.
#[derive(Debug, Clone)]
pub struct SpectralCurve<S: Scalar> {
    pub x: LaurentSeries<S>,
    pub y: LaurentSeries<S>,
    pub sigma: LaurentSeries<S>,
    pub precision: i64,
}

impl<S: Scalar> SpectralCurve<S> {
    pub fn new(x: LaurentSeries<S>, y: LaurentSeries<S>, precision: i64) -> SpectralResult<Self> {
        let sigma = deck_transform(&x, precision)?;
        Ok(SpectralCurve {
            x,
            y,
            sigma,
            precision,
        })
    }

    /// `y ↦ ε y`.
    pub fn rescale_y(&self, eps: &S) -> Self {
        SpectralCurve {
            y: self.y.scale(eps),
            ..self.clone()
        }
    }

    /// `(z^2/2, z)`.
    pub fn airy(precision: i64) -> SpectralResult<Self> {
        Self::new(half_square(), LaurentSeries::var(), precision)
    }

    /// `(z^2/2, 1/z)`.
    pub fn bessel(precision: i64) -> SpectralResult<Self> {
        Self::new(half_square(), LaurentSeries::monomial(S::one(), -1), precision)
    }

    /// `(z^2/2, 1/(z(1 - u^2 z^2)))`.
    pub fn s0(u: &S, precision: i64) -> SpectralResult<Self> {
        let u2 = u.times(u);
        let y = LaurentSeries::from_fn(-1, precision, |e| {
            if e % 2 == 0 {
                S::zero()
            } else {
                u2.pow_u(((e + 1) / 2) as u32)
            }
        });
        Self::new(half_square(), y, precision)
    }

    /// `(z^2/2, arctanh(uz)/(u(1 - u^2 z^2)))`.
    pub fn s1(u: &S, precision: i64) -> SpectralResult<Self> {
        let u2 = u.times(u);
        let y = LaurentSeries::from_fn(0, precision, |e| {
            if e % 2 == 0 {
                return S::zero();
            }
            let k = (e - 1) / 2;
            let h: Rational = (0..=k).map(|j| rat(1, 2 * j + 1)).sum();
            u2.pow_u(k as u32).scale(&h)
        });
        Self::new(half_square(), y, precision)
    }

    /// `(𝚡, 1/z)` at a parameter point.
    pub fn xy0(params: &CurveParams<S>, precision: i64) -> SpectralResult<Self> {
        let cd = CurveData::build(params.clone(), precision.max(4))?;
        Self::new(cd.x.clone(), LaurentSeries::monomial(S::one(), -1), precision)
    }

    /// `(𝚡, 𝚢_1)` at a parameter point.
    pub fn xy1(params: &CurveParams<S>, precision: i64) -> SpectralResult<Self> {
        let cd = CurveData::build(params.clone(), precision.max(4))?;
        Self::new(cd.x.clone(), cd.y1.clone(), precision)
    }

    /// Registered curves by name; `u` is used by the deformed ones.
    pub fn named(name: &str, u: &S, precision: i64) -> SpectralResult<Self> {
        match name {
            "airy" => Self::airy(precision),
            "bessel" => Self::bessel(precision),
            "s0" => Self::s0(u, precision),
            "s1" => Self::s1(u, precision),
            "xy0" | "xy1" => {
                let pr = CurveParams::u_line(u.clone())?;
                if name == "xy0" {
                    Self::xy0(&pr, precision)
                } else {
                    Self::xy1(&pr, precision)
                }
            }
            other => Err(SpectralError::UnknownCurve(other.to_string())),
        }
    }
}

fn half_square<S: Scalar>() -> LaurentSeries<S> {
    LaurentSeries::monomial(S::from_ratio(1, 2), 2)
}

/// Working series precision adequate for all `(g', n')` up to the given
/// Euler characteristic.
pub fn default_precision(gmax: u32, nmax: u32) -> i64 {
    2 * (pole_bound(gmax, nmax) as i64 + 2) + 8
}

/// `Σ_i a_i b_{-1-i}`.
fn residue_of_product<S: Scalar>(a: &LaurentSeries<S>, b: &LaurentSeries<S>) -> SpectralResult<S> {
    let (Some(oa), Some(ob)) = (a.order(), b.order()) else {
        return Ok(S::zero());
    };
    let mut acc = S::zero();
    for i in oa..=(-1 - ob) {
        let ai = a.coeff(i)?;
        if ai.is_zero() {
            continue;
        }
        acc.plus_assign(&ai.times(&b.coeff(-1 - i)?));
    }
    Ok(acc)
}

type Partial<S> = BTreeMap<Vec<u32>, LaurentSeries<S>>;

fn accumulate<S: Scalar>(map: &mut Partial<S>, key: Vec<u32>, s: LaurentSeries<S>) {
    match map.get_mut(&key) {
        Some(cur) => *cur = cur.add(&s),
        None => {
            map.insert(key, s);
        }
    }
}

/// Memoized recursion on one curve.
pub struct Recursion<S: Scalar> {
    curve: SpectralCurve<S>,
    dsigma: LaurentSeries<S>,
    /// `1/(ω_{0,1}(z) - ω_{0,1}(σ(z)))` as a function coefficient of `1/dz`.
    inv_den: LaurentSeries<S>,
    table: BTreeMap<(u32, u32), MultiDiff<S>>,
    sigma_powers: Mutex<BTreeMap<i64, LaurentSeries<S>>>,
}

impl<S: Scalar> Recursion<S> {
    pub fn new(curve: SpectralCurve<S>) -> SpectralResult<Self> {
        let sigma = &curve.sigma;
        let dsigma = sigma.derivative();
        let dx = curve.x.derivative().truncate(curve.precision);
        let w01 = curve.y.mul(&dx);
        let w01_sigma = curve
            .y
            .compose(sigma)?
            .mul(&dx.compose(sigma)?)
            .mul(&dsigma);
        let inv_den = w01.sub(&w01_sigma).inv()?;
        Ok(Recursion {
            curve,
            dsigma,
            inv_den,
            table: BTreeMap::new(),
            sigma_powers: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn curve(&self) -> &SpectralCurve<S> {
        &self.curve
    }

    fn sigma_pow(&self, k: i64) -> SpectralResult<LaurentSeries<S>> {
        if let Some(s) = self.sigma_powers.lock().unwrap().get(&k) {
            return Ok(s.clone());
        }
        let s = self.curve.sigma.pow_int(k)?;
        self.sigma_powers.lock().unwrap().insert(k, s.clone());
        Ok(s)
    }

    /// `ω_{g,n}`, computing lower correlators as needed.
    pub fn omega(&mut self, g: u32, n: u32) -> SpectralResult<&MultiDiff<S>> {
        check_stable(g, n)?;
        if !self.table.contains_key(&(g, n)) {
            let w = self.step(g, n)?;
            self.table.insert((g, n), w);
        }
        Ok(&self.table[&(g, n)])
    }

    /// One application of the recursion; all lower correlators are filled in first.
    fn step(&mut self, g: u32, n: u32) -> SpectralResult<MultiDiff<S>> {
        for (gl, nl) in lower_nodes(g, n) {
            self.omega(gl, nl)?;
        }
        let bound = pole_bound(g, n);
        let window = bound as i64 + 2;
        let rest_len = n as usize - 1;
        let z = LaurentSeries::<S>::var();
        let sigma = &self.curve.sigma;

        let mut integrand: Partial<S> = BTreeMap::new();
        if g >= 1 {
            if (g - 1, n + 1) == (0, 2) {
                let diff = z.sub(sigma);
                let b = self.dsigma.mul(&diff.mul(&diff).inv()?);
                accumulate(&mut integrand, vec![], b);
            } else {
                let w = &self.table[&(g - 1, n + 1)];
                for (key, c) in &w.coeffs {
                    let term = LaurentSeries::monomial(c.clone(), -(key[0] as i64))
                        .mul(&self.sigma_pow(-(key[1] as i64))?)
                        .mul(&self.dsigma);
                    accumulate(&mut integrand, key[2..].to_vec(), term);
                }
            }
        }
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u32..(1 << rest_len) {
                let i1: Vec<usize> = (0..rest_len).filter(|i| mask & (1 << i) != 0).collect();
                let i2: Vec<usize> = (0..rest_len).filter(|i| mask & (1 << i) == 0).collect();
                if (g1, i1.len()) == (0, 0) || (g2, i2.len()) == (0, 0) {
                    continue;
                }
                let left = self.evaluate(g1, i1.len() as u32, false, window)?;
                let right = self.evaluate(g2, i2.len() as u32, true, window)?;
                for (kl, sl) in &left {
                    for (kr, sr) in &right {
                        let mut key = vec![0u32; rest_len];
                        for (pos, v) in i1.iter().zip(kl) {
                            key[*pos] = *v;
                        }
                        for (pos, v) in i2.iter().zip(kr) {
                            key[*pos] = *v;
                        }
                        accumulate(&mut integrand, key, sl.mul(sr));
                    }
                }
            }
        }

        let half = S::from_ratio(1, 2);
        let kernels: Vec<LaurentSeries<S>> = (0..=window)
            .map(|m| {
                let zm = LaurentSeries::monomial(S::one(), m);
                Ok(self.sigma_pow(m)?.sub(&zm).mul(&self.inv_den).scale(&half))
            })
            .collect::<SpectralResult<_>>()?;
        let entries: Vec<(Vec<u32>, LaurentSeries<S>)> = integrand.into_iter().collect();
        let results: Vec<Vec<(Vec<u32>, S)>> = entries
            .par_iter()
            .map(|(rest, f)| {
                let mut out = Vec::new();
                for (m, ker) in kernels.iter().enumerate() {
                    let r = residue_of_product(ker, f)?;
                    if !r.is_zero() {
                        let mut key = vec![m as u32 + 1];
                        key.extend_from_slice(rest);
                        out.push((key, r));
                    }
                }
                Ok(out)
            })
            .collect::<SpectralResult<_>>()?;
        let mut w = MultiDiff::new(g, n);
        for (key, r) in results.into_iter().flatten() {
            w.add(key, &r);
        }
        if let Some(key) = w.coeffs.keys().find(|k| k.contains(&1)) {
            return Err(SpectralError::Residue {
                g,
                n,
                key: key.clone(),
            });
        }
        if w.max_pole() > bound {
            return Err(SpectralError::Window { g, n, bound });
        }
        Ok(w)
    }

    /// `ω_{g',1+m}(ζ, z_I)` with `ζ = z` or `ζ = σ(z)`, keyed by the poles in `z_I`.
    /// Includes the `dζ` factor. `(0, 1 + 1)` is the Cauchy kernel expanded in `ζ`.
    fn evaluate(&self, g: u32, m: u32, at_sigma: bool, window: i64) -> SpectralResult<Partial<S>> {
        let mut out: Partial<S> = BTreeMap::new();
        let pow = |e: i64| -> SpectralResult<LaurentSeries<S>> {
            if at_sigma {
                Ok(self.sigma_pow(e)?.mul(&self.dsigma))
            } else {
                Ok(LaurentSeries::monomial(S::one(), e))
            }
        };
        if (g, m) == (0, 1) {
            for j in 0..=window {
                let s = pow(j)?.scale(&S::from_int(j + 1));
                out.insert(vec![j as u32 + 2], s);
            }
            return Ok(out);
        }
        let w = &self.table[&(g, m + 1)];
        let mut powers: BTreeMap<u32, LaurentSeries<S>> = BTreeMap::new();
        for (key, c) in &w.coeffs {
            if !powers.contains_key(&key[0]) {
                powers.insert(key[0], pow(-(key[0] as i64))?);
            }
            accumulate(&mut out, key[1..].to_vec(), powers[&key[0]].scale(c));
        }
        Ok(out)
    }
}

/// Stable `(g', n')` read by one recursion step for `(g, n)`.
fn lower_nodes(g: u32, n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    if g >= 1 && (g - 1, n + 1) != (0, 2) {
        out.push((g - 1, n + 1));
    }
    for g1 in 0..=g {
        for m in 0..n {
            let nn = m + 1;
            if 2 * g1 + nn > 2 && (g1, nn) != (g, n) {
                out.push((g1, nn));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Runs the recursion for the requested pairs.
pub fn spectral_correlators<S: Scalar>(
    curve: SpectralCurve<S>,
    pairs: &[(u32, u32)],
) -> SpectralResult<BTreeMap<(u32, u32), MultiDiff<S>>> {
    let mut rec = Recursion::new(curve)?;
    let mut out = BTreeMap::new();
    for &(g, n) in pairs {
        out.insert((g, n), rec.omega(g, n)?.clone());
    }
    Ok(out)
}

/// `ω_{g,n} = (-d_1)…(-d_n) Σ ⟨τ_{a_1}…τ_{a_n}⟩ ∏ Φ_{a_i}(z_i)` from `F = log τ`.
///
/// The sign of `d` matches the kernel orientation of [`Recursion`].
///
/// Even times are set to zero before inverting `T(t)`; `F` as a function of
/// `T` is unaffected.
pub fn correlator_from_intersections<S: Scalar>(
    log_tau: &GradedSeries<S>,
    cov: &ChangeOfVariables<S>,
    g: u32,
    n: u32,
) -> SpectralResult<MultiDiff<S>> {
    check_stable(g, n)?;
    let level = (2 * g + n - 2) as usize;
    if log_tau.cap() < level {
        return Err(SpectralError::TooFewLevels {
            have: log_tau.cap(),
            need: level,
        });
    }
    let mut piece = TPolynomial::zero();
    for (mono, c) in log_tau.level(level).iter() {
        if mono.length() == n && mono.all_odd() {
            piece.add_term(mono.clone(), c.clone());
        }
    }
    let need = piece
        .iter()
        .flat_map(|(m, _)| m.pairs().iter().map(|&(i, _)| (i as usize - 1) / 2))
        .max()
        .unwrap_or(0);
    if need > cov.kmax() {
        return Err(SpectralError::ChangeTooShort {
            have: cov.kmax(),
            need,
        });
    }
    let big = cov.to_big_t(&piece);
    let dphi: Vec<Vec<(u32, S)>> = (0..=cov.kmax()).map(|a| differential_of(&cov.phi(a))).collect();
    let mut out = MultiDiff::new(g, n);
    for (mono, c) in big.iter() {
        let bracket = c.times(&S::from_rational(&Rational::from_integer(mono.factorial_product())));
        let mut letters: Vec<u32> = Vec::new();
        for &(i, e) in mono.pairs() {
            letters.extend(std::iter::repeat_n(i - 1, e as usize));
        }
        for order in distinct_permutations(&letters) {
            let mut terms: Vec<(Vec<u32>, S)> = vec![(vec![], bracket.clone())];
            for a in order {
                let mut next = Vec::new();
                for (key, v) in &terms {
                    for (k, d) in &dphi[a as usize] {
                        let mut kk = key.clone();
                        kk.push(*k);
                        next.push((kk, v.times(d)));
                    }
                }
                terms = next;
            }
            for (key, v) in terms {
                out.add(key, &v);
            }
        }
    }
    Ok(out)
}

/// `-d` of a polar Laurent polynomial as `(pole order, coefficient)` pairs:
/// `z^{-k} ↦ k z^{-k-1} dz`.
fn differential_of<S: Scalar>(phi: &LaurentSeries<S>) -> Vec<(u32, S)> {
    phi.terms()
        .filter(|(e, c)| *e != 0 && !c.is_zero())
        .map(|(e, c)| {
            assert!(e < 0, "Φ must be polar");
            ((1 - e) as u32, c.times(&S::from_int(-e)))
        })
        .collect()
}

fn max_level(pairs: &[(u32, u32)]) -> usize {
    pairs.iter().map(|&(g, n)| (2 * g + n - 2) as usize).max().unwrap_or(0)
}

fn kmax_for(alpha: u32, level: usize) -> usize {
    ((2 * alpha as usize + 1) * level).saturating_sub(1) / 2
}

fn intersections_for_pairs<S: Scalar>(
    log_tau: &GradedSeries<S>,
    cov: &ChangeOfVariables<S>,
    pairs: &[(u32, u32)],
) -> SpectralResult<BTreeMap<(u32, u32), MultiDiff<S>>> {
    pairs
        .iter()
        .map(|&(g, n)| Ok(((g, n), correlator_from_intersections(log_tau, cov, g, n)?)))
        .collect()
}

/// Intersection route for `(𝚡, 𝚢_α)`: cut-and-join `τ^(α)_{q,p}` with `Φ`
/// built from `∂/∂𝚡`.
pub fn caj_route<S: Scalar>(
    alpha: u32,
    params: &CurveParams<S>,
    pairs: &[(u32, u32)],
) -> SpectralResult<BTreeMap<(u32, u32), MultiDiff<S>>> {
    for &(g, n) in pairs {
        check_stable(g, n)?;
    }
    let level = max_level(pairs);
    let tau = expand(alpha, Variant::W, Mode::Conjugated, Some(params), level)?;
    let log_tau = tau.graded_log()?;
    let cov = ChangeOfVariables::from_params(params, kmax_for(alpha, level));
    intersections_for_pairs(&log_tau, &cov, pairs)
}

/// Intersection route for `S_α`: the shifted base tau with `Φ̃_a = (-(1/z)∂_z)^a z^{-1}`.
pub fn kappa_route(
    alpha: u32,
    u: &Rational,
    pairs: &[(u32, u32)],
) -> SpectralResult<BTreeMap<(u32, u32), MultiDiff<Rational>>> {
    for &(g, n) in pairs {
        check_stable(g, n)?;
    }
    let level = max_level(pairs);
    let log_tau = shifted_tau(alpha, u, level)?.graded_log()?;
    let cov = ChangeOfVariables::new(rat(0, 1), rat(0, 1), kmax_for(alpha, level));
    intersections_for_pairs(&log_tau, &cov, pairs)
}

/// Per-pair differences between two correlator tables.
#[derive(Debug, Clone)]
pub struct CompareReport<S: Scalar> {
    pub entries: Vec<((u32, u32), MultiDiff<S>)>,
}

impl<S: Scalar> CompareReport<S> {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|(_, d)| d.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((g, n), d)| json!({"g": g, "n": n, "equal": d.is_zero(), "difference": d.to_json()}))
            .collect();
        json!({"passed": self.passed(), "pairs": entries})
    }
}

pub fn compare_tables<S: Scalar>(
    a: &BTreeMap<(u32, u32), MultiDiff<S>>,
    b: &BTreeMap<(u32, u32), MultiDiff<S>>,
) -> CompareReport<S> {
    let entries = a
        .iter()
        .map(|(key, wa)| {
            let diff = match b.get(key) {
                Some(wb) => wa.sub(wb),
                None => wa.clone(),
            };
            (*key, diff)
        })
        .collect();
    CompareReport { entries }
}

/// Runs the recursion on both curves and compares.
pub fn compare_curves<S: Scalar>(
    a: SpectralCurve<S>,
    b: SpectralCurve<S>,
    pairs: &[(u32, u32)],
) -> SpectralResult<CompareReport<S>> {
    let wa = spectral_correlators(a, pairs)?;
    let wb = spectral_correlators(b, pairs)?;
    Ok(compare_tables(&wa, &wb))
}
