//! Named series of the (p, q) spectral data and their coefficient tables.
//!
//! Parameters are `p` and `s` with `q = s^2 - p`. The lines `p = 0`, `q = 0`
//! and the origin `p = q = 0` use their own closed forms, selected before any
//! series is built.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;

use crate::fock::{Monomial, TPolynomial};
use crate::scalar::{rat, Rational, Scalar};
use crate::series::{LaurentSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("p + q = 0 with q != 0 is excluded")]
    Degenerate,
    #[error("truncation order must be at least 4, got {0}")]
    OrderTooSmall(i64),
    #[error("alpha must be 0 or 1, got {0}")]
    BadAlpha(u32),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type CurveResult<T> = Result<T, CurveError>;

/// Which closed forms apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Generic,
    QZero,
    PZero,
    Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveParams<S: Scalar> {
    pub p: S,
    pub s: S,
    pub q: S,
    pub branch: Branch,
}

impl<S: Scalar> CurveParams<S> {
    pub fn new(p: S, s: S) -> CurveResult<Self> {
        let q = s.times(&s).minus(&p);
        let branch = match (p.is_zero(), q.is_zero()) {
            (true, true) => Branch::Origin,
            (false, true) => Branch::QZero,
            (true, false) => Branch::PZero,
            (false, false) if s.is_zero() => return Err(CurveError::Degenerate),
            (false, false) => Branch::Generic,
        };
        Ok(CurveParams { p, s, q, branch })
    }

    /// `p = 2u^2`, `q = -u^2`, `s = u`.
    pub fn u_line(u: S) -> CurveResult<Self> {
        Self::new(u.times(&u).scale(&rat(2, 1)), u)
    }

    /// `(p + 2q)/s`, taken as 0 at the origin.
    pub fn c1(&self) -> S {
        if self.branch == Branch::Origin {
            return S::zero();
        }
        self.p
            .plus(&self.q.scale(&rat(2, 1)))
            .try_div(&self.s)
            .expect("s != 0 off the origin")
    }

    /// `(p^2 + pq + q^2)/(p + q)`, taken as 0 at the origin.
    pub fn quad_ratio(&self) -> S {
        if self.branch == Branch::Origin {
            return S::zero();
        }
        let (p, q) = (&self.p, &self.q);
        p.times(p)
            .plus(&p.times(q))
            .plus(&q.times(q))
            .try_div(&self.s.times(&self.s))
            .expect("s != 0 off the origin")
    }
}

/// `B_0, B_1, ..., B_n` with `B_1 = -1/2`; even entries are the usual ones.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![rat(1, 1)]));
    let mut b = cache.lock().expect("bernoulli cache poisoned");
    while b.len() <= n {
        let m = b.len();
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0.
        let mut acc = rat(0, 1);
        let mut binom = BigInt::from(1);
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let next = -acc / Rational::from_integer(BigInt::from(m + 1));
        b.push(next);
    }
    b[..=n].to_vec()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `(z^{2α+1} - f^{2α+1})/(2α+1)`.
pub fn v_alpha_of_virasoro<S: Scalar>(f: &LaurentSeries<S>, alpha: u32) -> CurveResult<LaurentSeries<S>> {
    let e = 2 * alpha as i64 + 1;
    let zf = LaurentSeries::monomial(S::one(), e);
    Ok(zf.sub(&f.pow_int(e)?).scale_rational(&rat(1, e)))
}

/// Source of the series used in a coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSource {
    /// The base series `f`.
    Base,
    /// `f_α`: `f̃` for α = 0, `f_1` for α = 1.
    Alpha(u32),
}

/// All named series for one parameter point, exact below `order`.
#[derive(Debug, Clone)]
pub struct CurveData<S: Scalar> {
    pub params: CurveParams<S>,
    pub order: i64,
    pub x: LaurentSeries<S>,
    pub f: LaurentSeries<S>,
    pub h: LaurentSeries<S>,
    pub y1: LaurentSeries<S>,
    /// Odd part of `y1(h(z))`.
    pub big_y: LaurentSeries<S>,
    pub htilde: LaurentSeries<S>,
    pub ftilde: LaurentSeries<S>,
    /// `f_1` with `f_1^3/3 = ∫ f̃ dx`.
    pub f1: LaurentSeries<S>,
    /// `f(z; b^(1))` from the Bernoulli series.
    pub fb1: LaurentSeries<S>,
}

impl<S: Scalar> CurveData<S> {
    /// Builds all series with `f`, `h`, `f̃`, `h̃`, `f_1` exact below `order`.
    pub fn build(params: CurveParams<S>, order: i64) -> CurveResult<Self> {
        if order < 4 {
            return Err(CurveError::OrderTooSmall(order));
        }
        let n = order;
        let x = x_series(&params, n + 1)?;
        let f = x.sqrt_two_x()?;
        let h = f.revert()?;
        let y1 = y1_series(&params, n)?;
        let big_y = y1.compose(&h)?.parity_part(true);
        let htilde = htilde_series(&params, n)?;
        let ftilde = htilde.revert()?;
        let integrand = ftilde.mul(&x.derivative());
        let cube = integrand.antiderivative()?.truncate(n + 2);
        let f1 = cube_root_normalized(&cube)?;
        let fb1 = bernoulli_fb1(&params, n)?;
        Ok(CurveData {
            params,
            order: n,
            x: x.truncate(n + 1),
            f,
            h,
            y1,
            big_y,
            htilde,
            ftilde,
            f1,
            fb1,
        })
    }

    pub fn series_by_name(&self, name: &str) -> Option<&LaurentSeries<S>> {
        Some(match name {
            "x" => &self.x,
            "f" => &self.f,
            "h" => &self.h,
            "y1" => &self.y1,
            "Y" => &self.big_y,
            "htilde" => &self.htilde,
            "ftilde" => &self.ftilde,
            "f1" => &self.f1,
            "fb1" => &self.fb1,
            _ => return None,
        })
    }

    /// `y_0 = 1/z` or `y_1`.
    pub fn y(&self, alpha: u32) -> CurveResult<LaurentSeries<S>> {
        match alpha {
            0 => Ok(LaurentSeries::monomial(S::one(), -1)),
            1 => Ok(self.y1.clone()),
            a => Err(CurveError::BadAlpha(a)),
        }
    }

    /// `f_0 = f̃`, `f_1`.
    pub fn f_alpha(&self, alpha: u32) -> CurveResult<&LaurentSeries<S>> {
        match alpha {
            0 => Ok(&self.ftilde),
            1 => Ok(&self.f1),
            a => Err(CurveError::BadAlpha(a)),
        }
    }

    fn table_series(&self, src: TableSource) -> CurveResult<&LaurentSeries<S>> {
        match src {
            TableSource::Base => Ok(&self.f),
            TableSource::Alpha(a) => self.f_alpha(a),
        }
    }

    /// `ρ[k,m] = [z^m] g^k`.
    pub fn rho(&self, src: TableSource, k: i64, m: i64) -> CurveResult<S> {
        Ok(self.table_series(src)?.pow_int(k)?.coeff(m)?)
    }

    /// `σ[k,m] = [z^{m+1}] g^{k+1}/g'`.
    pub fn sigma(&self, src: TableSource, k: i64, m: i64) -> CurveResult<S> {
        let g = self.table_series(src)?;
        Ok(g.pow_int(k + 1)?.div(&g.derivative())?.coeff(m + 1)?)
    }

    /// `χ_α[k,m] = [z^m] f^{k+2} y_α` for the base `f`.
    pub fn chi(&self, alpha: u32, k: i64, m: i64) -> CurveResult<S> {
        Ok(self.f.pow_int(k + 2)?.mul(&self.y(alpha)?).coeff(m)?)
    }

    /// `Σ_j v_j^(α) z^j`: `f - y_1` for α = 0 and `∫ (f - y_1) dx` for α = 1.
    pub fn v_shift(&self, alpha: u32) -> CurveResult<LaurentSeries<S>> {
        let d = self.f.sub(&self.y1);
        match alpha {
            0 => Ok(d),
            1 => Ok(d.mul(&self.x.derivative()).antiderivative()?.truncate(self.order)),
            a => Err(CurveError::BadAlpha(a)),
        }
    }

    /// `∫_0^z (f^{2α-1} - y_α) dx`, the defining form of [`Self::v_shift`].
    pub fn v_shift_integral(&self, alpha: u32) -> CurveResult<LaurentSeries<S>> {
        let fpow = if alpha == 0 {
            self.f.inv()?
        } else {
            self.f.clone()
        };
        let integrand = fpow.sub(&self.y(alpha)?).mul(&self.x.derivative());
        Ok(integrand.antiderivative()?)
    }

    /// `Σ_j ṽ_j^(α) z^j = ∫_0^z (η^{2α} - η y_α(h(η))) dη`.
    pub fn v_tilde(&self, alpha: u32) -> CurveResult<LaurentSeries<S>> {
        let y_of_h = match alpha {
            0 => self.h.inv()?,
            1 => self.y1.compose(&self.h)?,
            a => return Err(CurveError::BadAlpha(a)),
        };
        let e = 2 * alpha as i64;
        let integrand = LaurentSeries::monomial(S::one(), e).sub(&y_of_h.shift(1));
        Ok(integrand.antiderivative()?.truncate(self.order))
    }

    /// `f_Δ^(0) = Y`, `(f_Δ^(1))^3/3 = ∫ Y η dη`.
    pub fn f_delta(&self, alpha: u32) -> CurveResult<LaurentSeries<S>> {
        match alpha {
            0 => Ok(self.big_y.clone()),
            1 => {
                let cube = self.big_y.shift(1).antiderivative()?;
                cube_root_normalized(&cube)
            }
            a => Err(CurveError::BadAlpha(a)),
        }
    }
}

/// `g` with `g^3/3 = c` and `g = z + O(z^2)`, for `c = z^3/3 + O(z^4)`.
fn cube_root_normalized<S: Scalar>(c: &LaurentSeries<S>) -> CurveResult<LaurentSeries<S>> {
    let unit = c.shift(-3).scale_rational(&rat(3, 1));
    Ok(unit.pow_unit(&rat(1, 3))?.shift(1))
}

fn log1p_scaled<S: Scalar>(c: &S, trunc: i64) -> CurveResult<LaurentSeries<S>> {
    Ok(LaurentSeries::monomial(c.clone(), 1).truncate(trunc).log1p()?)
}

fn exp_scaled<S: Scalar>(c: &S, trunc: i64) -> CurveResult<LaurentSeries<S>> {
    Ok(LaurentSeries::monomial(c.clone(), 1).truncate(trunc).exp()?)
}

fn inv_s<S: Scalar>(s: &S) -> S {
    s.try_inv().expect("s != 0 off the origin")
}

/// `x` exact below `trunc`.
fn x_series<S: Scalar>(pr: &CurveParams<S>, trunc: i64) -> CurveResult<LaurentSeries<S>> {
    let (p, s, q) = (&pr.p, &pr.s, &pr.q);
    Ok(match pr.branch {
        Branch::Origin => LaurentSeries::monomial(S::from_ratio(1, 2), 2).truncate(trunc),
        Branch::Generic => {
            let a = log1p_scaled(&q.times(&inv_s(s)), trunc)?
                .scale(&s.times(s).try_div(&p.times(q)).expect("pq != 0"));
            let b = log1p_scaled(s, trunc)?.scale(&p.try_inv().expect("p != 0"));
            a.sub(&b)
        }
        Branch::QZero => {
            let si = inv_s(s);
            LaurentSeries::monomial(si.clone(), 1)
                .sub(&log1p_scaled(s, trunc)?.scale(&si.times(&si)))
                .truncate(trunc)
        }
        Branch::PZero => {
            let si = inv_s(s);
            let one_plus = LaurentSeries::one().add(&LaurentSeries::monomial(s.clone(), 1));
            let frac = LaurentSeries::var().div(&one_plus.truncate(trunc - 1))?.scale(&si);
            log1p_scaled(s, trunc)?.scale(&si.times(&si)).sub(&frac)
        }
    })
}

fn y1_series<S: Scalar>(pr: &CurveParams<S>, trunc: i64) -> CurveResult<LaurentSeries<S>> {
    let (p, s, q) = (&pr.p, &pr.s, &pr.q);
    Ok(match pr.branch {
        Branch::Origin => LaurentSeries::var().truncate(trunc),
        Branch::Generic => log1p_scaled(s, trunc)?
            .sub(&log1p_scaled(&q.times(&inv_s(s)), trunc)?)
            .scale(&s.try_div(p).expect("p != 0")),
        Branch::QZero => log1p_scaled(s, trunc)?.scale(&inv_s(s)),
        Branch::PZero => {
            let one_plus = LaurentSeries::one().add(&LaurentSeries::monomial(s.clone(), 1));
            LaurentSeries::var().div(&one_plus.truncate(trunc - 1))?
        }
    })
}

fn htilde_series<S: Scalar>(pr: &CurveParams<S>, trunc: i64) -> CurveResult<LaurentSeries<S>> {
    let (p, s, q) = (&pr.p, &pr.s, &pr.q);
    let t1 = trunc + 1;
    let one = LaurentSeries::<S>::one();
    Ok(match pr.branch {
        Branch::Origin => LaurentSeries::var().truncate(trunc),
        Branch::Generic => {
            let si = inv_s(s);
            let num = exp_scaled(&q.times(&si).scale(&rat(2, 1)), t1)?.sub(&one).shift(-1);
            let den = one
                .sub(&exp_scaled(&p.times(&si).scale(&rat(-2, 1)), t1)?)
                .shift(-1);
            let k = p.try_div(&q.times(s)).expect("qs != 0");
            num.div(&den)?
                .scale(&k)
                .sub(&LaurentSeries::constant(si))
        }
        Branch::PZero => {
            let si = inv_s(s);
            let e = exp_scaled(&s.scale(&rat(2, 1)), t1 + 1)?.sub(&one).shift(-1);
            e.scale(&si.times(&si).scale(&rat(1, 2)))
                .sub(&LaurentSeries::constant(si))
                .truncate(trunc)
        }
        Branch::QZero => {
            let si = inv_s(s);
            let den = one
                .sub(&exp_scaled(&s.scale(&rat(-2, 1)), t1)?)
                .shift(-1);
            den.inv()?
                .scale(&S::from_int(2))
                .sub(&LaurentSeries::constant(si))
        }
    })
}

/// `f(z; b^(1))` with `f^3/3 = Σ_k 4^k B_{2k}/(2k+1)! · P_k/(p+q)^k z^{2k+1}`,
/// `P_k = Σ_{j=1}^{2k} C(2k+1, j) p^{j-1} q^{2k-j}`.
fn bernoulli_fb1<S: Scalar>(pr: &CurveParams<S>, trunc: i64) -> CurveResult<LaurentSeries<S>> {
    if pr.branch == Branch::Origin {
        return Ok(LaurentSeries::var().truncate(trunc));
    }
    let kmax = ((trunc + 1) / 2) as usize;
    let b = bernoulli_numbers(2 * kmax);
    let s2 = pr.s.times(&pr.s);
    let mut coeffs: Vec<S> = Vec::new();
    for k in 1..=kmax {
        let mut poly = S::zero();
        for j in 1..=2 * k {
            let term = pr
                .p
                .pow_u(j as u32 - 1)
                .times(&pr.q.pow_u((2 * k - j) as u32))
                .scale(&Rational::from_integer(binomial(2 * k as u64 + 1, j as u64)));
            poly.plus_assign(&term);
        }
        let c = Rational::from_integer(BigInt::from(4).pow(k as u32)) * &b[2 * k]
            / Rational::from_integer(factorial(2 * k as u64 + 1));
        let val = poly
            .scale(&c)
            .try_div(&s2.pow_u(k as u32))
            .expect("s != 0 off the origin");
        coeffs.push(S::zero());
        coeffs.push(val);
    }
    // coeffs[i] is the coefficient of z^{i+2}; z^3 comes first.
    let cube = LaurentSeries::new(2, coeffs, Some(trunc + 2));
    cube_root_normalized(&cube)
}

/// The triangular change of variables `t ↦ T` and its inverse on odd times.
///
/// `T_0 = t_1`, `T_k = Σ_m m t_m (c_2 ∂_m + c_1 ∂_{m-1} + ∂_{m-2}) T_{k-1}`
/// with `c_1 = (p+2q)/s` and `c_2 = q`.
#[derive(Debug, Clone)]
pub struct ChangeOfVariables<S: Scalar> {
    forward: Vec<TPolynomial<S>>,
    /// `inverse[i][k]`: coefficient of `T_k` in `t_{2i+1}` (with `t_even = 0`).
    inverse: Vec<Vec<S>>,
    c1: S,
    c2: S,
}

impl<S: Scalar> ChangeOfVariables<S> {
    pub fn new(c1: S, c2: S, kmax: usize) -> Self {
        let mut forward: Vec<TPolynomial<S>> = vec![TPolynomial::var(1)];
        for _ in 1..=kmax {
            let prev = forward.last().unwrap();
            let mut next = TPolynomial::zero();
            for (mono, c) in prev.iter() {
                let &[(j, 1)] = mono.pairs() else {
                    unreachable!("T_k is linear")
                };
                // Contributions of m with m = j, m - 1 = j, m - 2 = j.
                for (m, w) in [(j, &c2), (j + 1, &c1), (j + 2, &S::one())] {
                    let coef = c.times(w).times(&S::from_int(m as i64));
                    next.add_term(Monomial::var(m), coef);
                }
            }
            forward.push(next);
        }
        // Odd-time matrix M[k][i] = [t_{2i+1}] T_k, lower triangular.
        let n = kmax + 1;
        let m: Vec<Vec<S>> = forward
            .iter()
            .map(|tk| (0..n).map(|i| tk.coeff(&Monomial::var(2 * i as u32 + 1))).collect())
            .collect();
        // Solve t_{2i+1} = Σ_k N[i][k] T_k by forward substitution.
        let mut inverse: Vec<Vec<S>> = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            let d = m[i][i].try_inv().expect("nonzero diagonal");
            inverse[i][i] = d.clone();
            for k in 0..i {
                let mut acc = S::zero();
                for j in k..i {
                    acc.plus_assign(&m[i][j].times(&inverse[j][k]));
                }
                inverse[i][k] = acc.times(&d).negate();
            }
        }
        ChangeOfVariables {
            forward,
            inverse,
            c1,
            c2,
        }
    }

    pub fn from_params(pr: &CurveParams<S>, kmax: usize) -> Self {
        let c2 = if pr.branch == Branch::Origin {
            S::zero()
        } else {
            pr.q.clone()
        };
        Self::new(pr.c1(), c2, kmax)
    }

    pub fn kmax(&self) -> usize {
        self.forward.len() - 1
    }

    /// `T_k` as a linear polynomial in `t`.
    pub fn forward(&self, k: usize) -> &TPolynomial<S> {
        &self.forward[k]
    }

    /// Coefficients of `t_{2i+1}` in terms of `T_0..T_i`.
    pub fn inverse_row(&self, i: usize) -> &[S] {
        &self.inverse[i]
    }

    /// `Φ_k = (-∂/∂x)^k (1/z)` with `∂/∂x = ((1 + c_1 z + c_2 z^2)/z) ∂/∂z`.
    pub fn phi(&self, k: usize) -> LaurentSeries<S> {
        let op = LaurentSeries::new(
            -1,
            vec![S::one(), self.c1.clone(), self.c2.clone()],
            None,
        );
        let mut cur = LaurentSeries::monomial(S::one(), -1);
        for _ in 0..k {
            cur = op.mul(&cur.derivative()).neg();
        }
        cur
    }

    /// Rewrites a polynomial in odd times `t` as a polynomial in `T`, where
    /// variable index `a + 1` stands for `T_a`. Even times must be absent.
    pub fn to_big_t(&self, poly: &TPolynomial<S>) -> TPolynomial<S> {
        let mut out = TPolynomial::zero();
        let lin: Vec<TPolynomial<S>> = (0..self.inverse.len())
            .map(|i| {
                let mut l = TPolynomial::zero();
                for (k, c) in self.inverse[i].iter().enumerate() {
                    l.add_term(Monomial::var(k as u32 + 1), c.clone());
                }
                l
            })
            .collect();
        for (mono, c) in poly.iter() {
            let mut term = TPolynomial::constant(c.clone());
            for &(j, e) in mono.pairs() {
                assert!(j % 2 == 1, "even time in odd-time substitution");
                let i = (j as usize - 1) / 2;
                for _ in 0..e {
                    term = term.mul(&lin[i]);
                }
            }
            out.add_assign(&term);
        }
        out
    }
}
