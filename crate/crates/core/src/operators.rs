//! Heisenberg–Virasoro generators acting on [`TPolynomial`]s, as ordered
//! products applied right-to-left with degree truncation.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::fock::{Monomial, TPolynomial};
use crate::scalar::Scalar;
use crate::series::{LaurentSeries, SeriesResult};

/// One elementary generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ElementaryOp<S: Scalar> {
    /// Multiplication by `t_k`.
    MulT(u32),
    /// `∂/∂t_k`.
    DerT(u32),
    /// `L_m = ½Σ_{a+b=-m} ab t_a t_b + Σ_k k t_k ∂_{k+m} + ½Σ_{a+b=m} ∂_a ∂_b`.
    Vir(i64),
    /// `J_m`: `∂_m` for `m > 0`, `-m t_{-m}` for `m < 0`, zero for `m = 0`.
    Heis(i64),
    Const(S),
}

impl<S: Scalar> ElementaryOp<S> {
    pub fn degree(&self) -> i64 {
        match self {
            ElementaryOp::MulT(k) => *k as i64,
            ElementaryOp::DerT(k) => -(*k as i64),
            ElementaryOp::Vir(m) | ElementaryOp::Heis(m) => -m,
            ElementaryOp::Const(_) => 0,
        }
    }

    /// Calls `emit(monomial, multiplicity)` for each output term of the
    /// action on `m`. Multiplicities are rationals `num/2` encoded as `i64`
    /// numerators over 2.
    fn act(&self, m: &Monomial, emit: &mut impl FnMut(Monomial, Half)) {
        match self {
            ElementaryOp::MulT(k) => emit(m.times_var(*k), Half::int(1)),
            ElementaryOp::DerT(k) => {
                if let Some((e, r)) = m.diff_var(*k) {
                    emit(r, Half::int(e as i64));
                }
            }
            ElementaryOp::Heis(j) => match j.cmp(&0) {
                std::cmp::Ordering::Greater => ElementaryOp::<S>::DerT(*j as u32).act(m, emit),
                std::cmp::Ordering::Less => emit(m.times_var((-j) as u32), Half::int(-j)),
                std::cmp::Ordering::Equal => {}
            },
            ElementaryOp::Const(_) => emit(m.clone(), Half::int(1)),
            ElementaryOp::Vir(v) => vir_act(*v, m, emit),
        }
    }
}

/// Exact half-integer `n/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Half(i64);

impl Half {
    fn int(n: i64) -> Self {
        Half(2 * n)
    }
    fn to_scalar<S: Scalar>(self) -> S {
        if self.0 % 2 == 0 {
            S::from_int(self.0 / 2)
        } else {
            S::from_ratio(self.0, 2)
        }
    }
}

fn vir_act(v: i64, m: &Monomial, emit: &mut impl FnMut(Monomial, Half)) {
    // Raising part: ½ Σ_{a+b=-v} ab t_a t_b.
    if v <= -2 {
        let n = -v;
        for a in 1..=n / 2 {
            let b = n - a;
            let out = m.times_var(a as u32).times_var(b as u32);
            if a == b {
                emit(out, Half(a * b));
            } else {
                emit(out, Half::int(a * b));
            }
        }
    }
    // Σ_k k t_k ∂_{k+v}: replace t_j by t_{j-v}.
    for &(j, e) in m.pairs() {
        let k = j as i64 - v;
        if k >= 1 {
            let (_, r) = m.diff_var(j).expect("variable present");
            emit(r.times_var(k as u32), Half::int(k * e as i64));
        }
    }
    // Lowering part: ½ Σ_{a+b=v} ∂_a ∂_b.
    if v >= 2 {
        for a in 1..=v / 2 {
            let b = v - a;
            if a == b {
                let e = m.power_of(a as u32) as i64;
                if e >= 2 {
                    let r = m.diff_var(a as u32).unwrap().1.diff_var(a as u32).unwrap().1;
                    emit(r, Half(e * (e - 1)));
                }
            } else {
                let (ea, eb) = (m.power_of(a as u32) as i64, m.power_of(b as u32) as i64);
                if ea >= 1 && eb >= 1 {
                    let r = m.diff_var(a as u32).unwrap().1.diff_var(b as u32).unwrap().1;
                    emit(r, Half::int(ea * eb));
                }
            }
        }
    }
}

/// Linear combination of elementary generators, used as a single factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Generator<S: Scalar> {
    parts: Vec<(S, ElementaryOp<S>)>,
}

impl<S: Scalar> Generator<S> {
    pub fn zero() -> Self {
        Generator { parts: Vec::new() }
    }

    pub fn op(op: ElementaryOp<S>) -> Self {
        Generator {
            parts: vec![(S::one(), op)],
        }
    }

    pub fn push(&mut self, c: S, op: ElementaryOp<S>) {
        if !c.is_zero() {
            self.parts.push((c, op));
        }
    }

    pub fn parts(&self) -> &[(S, ElementaryOp<S>)] {
        &self.parts
    }

    /// Smallest degree among the parts (0 for the zero generator).
    pub fn min_degree(&self) -> i64 {
        self.parts.iter().map(|(_, o)| o.degree()).min().unwrap_or(0)
    }

    pub fn scale(&self, c: &S) -> Self {
        Generator {
            parts: self
                .parts
                .iter()
                .filter(|_| !c.is_zero())
                .map(|(x, o)| (x.times(c), o.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Generator { parts }
    }

    /// Applies to `p`, keeping only outputs of degree `<= bound`.
    pub fn apply(&self, p: &TPolynomial<S>, bound: Option<i64>) -> TPolynomial<S> {
        let mut acc: HashMap<Monomial, S> = HashMap::new();
        for (m, c) in p.iter() {
            let d = m.degree() as i64;
            for (gc, op) in &self.parts {
                if bound.is_some_and(|b| d + op.degree() > b) {
                    continue;
                }
                let base = match op {
                    ElementaryOp::Const(k) => c.times(gc).times(k),
                    _ => c.times(gc),
                };
                op.act(m, &mut |out, h| {
                    let v = if h == Half::int(1) {
                        base.clone()
                    } else {
                        base.times(&h.to_scalar())
                    };
                    match acc.entry(out) {
                        std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().plus_assign(&v),
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(v);
                        }
                    }
                });
            }
        }
        TPolynomial::from_map(acc.into_iter().collect())
    }
}

impl<S: Scalar> fmt::Display for Generator<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(c, o)| {
                let name = match o {
                    ElementaryOp::MulT(k) => format!("t{k}"),
                    ElementaryOp::DerT(k) => format!("d/dt{k}"),
                    ElementaryOp::Vir(m) => format!("L[{m}]"),
                    ElementaryOp::Heis(m) => format!("J[{m}]"),
                    ElementaryOp::Const(k) => format!("const({k})"),
                };
                if c.is_one() {
                    name
                } else {
                    format!("({c})*{name}")
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(" + "))
    }
}

/// `coeff · F_1 F_2 ... F_n`, applied right-to-left (`F_n` first).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpTerm<S: Scalar> {
    pub coeff: S,
    pub factors: Vec<Generator<S>>,
}

/// Sum of ordered products of generators.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OperatorExpr<S: Scalar> {
    terms: Vec<OpTerm<S>>,
}

impl<S: Scalar> OperatorExpr<S> {
    pub fn zero() -> Self {
        OperatorExpr { terms: Vec::new() }
    }

    pub fn scalar(c: S) -> Self {
        OperatorExpr {
            terms: vec![OpTerm {
                coeff: c,
                factors: Vec::new(),
            }],
        }
    }

    pub fn elementary(op: ElementaryOp<S>) -> Self {
        Self::generator(Generator::op(op))
    }

    pub fn generator(g: Generator<S>) -> Self {
        OperatorExpr {
            terms: vec![OpTerm {
                coeff: S::one(),
                factors: vec![g],
            }],
        }
    }

    /// Product `g_1 g_2 ... g_n` (rightmost applied first).
    pub fn product(coeff: S, factors: Vec<Generator<S>>) -> Self {
        OperatorExpr {
            terms: vec![OpTerm { coeff, factors }],
        }
    }

    pub fn terms(&self) -> &[OpTerm<S>] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        OperatorExpr { terms }
    }

    pub fn scale(&self, c: &S) -> Self {
        OperatorExpr {
            terms: self
                .terms
                .iter()
                .map(|t| OpTerm {
                    coeff: t.coeff.times(c),
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                terms.push(OpTerm {
                    coeff: a.coeff.times(&b.coeff),
                    factors,
                });
            }
        }
        OperatorExpr { terms }
    }

    /// Exact action on `p`, discarding output monomials of degree above
    /// `deg_cap`. Intermediate results are pruned only where no later factor
    /// can bring a monomial back under the cap.
    pub fn apply(&self, p: &TPolynomial<S>, deg_cap: Option<u64>) -> TPolynomial<S> {
        let results: Vec<TPolynomial<S>> = self
            .terms
            .par_iter()
            .map(|t| apply_term(t, p, deg_cap))
            .collect();
        let mut out = TPolynomial::zero();
        for r in &results {
            out.add_assign(r);
        }
        out
    }

    /// `A(B p) - B(A p)`.
    pub fn commutator_on(a: &Self, b: &Self, p: &TPolynomial<S>, deg_cap: Option<u64>) -> TPolynomial<S> {
        let ab = a.apply(&b.apply(p, None), deg_cap);
        let ba = b.apply(&a.apply(p, None), deg_cap);
        ab.sub(&ba)
    }
}

fn apply_term<S: Scalar>(t: &OpTerm<S>, p: &TPolynomial<S>, deg_cap: Option<u64>) -> TPolynomial<S> {
    if t.coeff.is_zero() {
        return TPolynomial::zero();
    }
    let n = t.factors.len();
    // later[i] = Σ min degrees of factors applied after factor i.
    let mut later = vec![0i64; n];
    let mut acc = 0;
    for i in 0..n {
        later[i] = acc;
        acc += t.factors[i].min_degree();
    }
    let mut cur = match deg_cap {
        Some(c) if (c as i64) < acc => TPolynomial::zero(),
        Some(c) => p.truncate_degree((c as i64 - acc) as u64),
        None => p.clone(),
    };
    for i in (0..n).rev() {
        let bound = deg_cap.map(|c| c as i64 - later[i]);
        cur = t.factors[i].apply(&cur, bound);
        if cur.is_zero() {
            break;
        }
    }
    cur.scale(&t.coeff)
}

impl<S: Scalar> fmt::Display for OperatorExpr<S> {
    /// One line per term; factors listed in the order they act.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "({})", t.coeff)?;
            for g in t.factors.iter().rev() {
                write!(f, " <- {g}")?;
            }
        }
        Ok(())
    }
}

/// `J_k^a` and `L_k^a` conjugated by the Virasoro element with `Ξ = f`.
///
/// `J^a_k = Σ_{m=k}^{M} ρ[k,m] J_m` and
/// `L^a_k = Σ_{m=k}^{M} σ[k,m] L_m + (a_2/2)δ_{k,-2}`, where
/// `ρ[k,m] = [z^m] f^k`, `σ[k,m] = [z^{m+1}] f^{k+1}/f'` and `M` is the window.
/// Terms with `m > M` annihilate every polynomial of degree `<= M`.
pub struct Conjugation<S: Scalar> {
    f: LaurentSeries<S>,
    fprime: LaurentSeries<S>,
    a2_half: S,
    window: i64,
}

impl<S: Scalar> Conjugation<S> {
    pub fn new(f: &LaurentSeries<S>, window: i64) -> SeriesResult<Self> {
        let a = LaurentSeries::field_coeffs_from_flow(f, 2)?;
        Ok(Conjugation {
            f: f.clone(),
            fprime: f.derivative(),
            a2_half: a[1].scale(&crate::scalar::rat(1, 2)),
            window,
        })
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn a2_half(&self) -> &S {
        &self.a2_half
    }

    fn rho_row(&self, k: i64) -> SeriesResult<LaurentSeries<S>> {
        self.f.pow_int(k)
    }

    fn sigma_row(&self, k: i64) -> SeriesResult<LaurentSeries<S>> {
        self.f.pow_int(k + 1)?.div(&self.fprime)
    }

    pub fn rho(&self, k: i64, m: i64) -> SeriesResult<S> {
        self.rho_row(k)?.coeff(m)
    }

    pub fn sigma(&self, k: i64, m: i64) -> SeriesResult<S> {
        self.sigma_row(k)?.coeff(m + 1)
    }

    pub fn j(&self, k: i64) -> SeriesResult<Generator<S>> {
        let row = self.rho_row(k)?;
        let mut g = Generator::zero();
        for m in k..=self.window {
            g.push(row.coeff(m)?, ElementaryOp::Heis(m));
        }
        Ok(g)
    }

    pub fn l(&self, k: i64) -> SeriesResult<Generator<S>> {
        let row = self.sigma_row(k)?;
        let mut g = Generator::zero();
        for m in k..=self.window {
            g.push(row.coeff(m + 1)?, ElementaryOp::Vir(m));
        }
        if k == -2 {
            g.push(self.a2_half.clone(), ElementaryOp::Const(S::one()));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use proptest::prelude::*;

    type P = TPolynomial<Rational>;
    type Op = OperatorExpr<Rational>;

    fn mono(p: &[(u32, u32)]) -> Monomial {
        Monomial::from_pairs(p)
    }

    fn t(p: &[(u32, u32)], c: Rational) -> P {
        P::term(mono(p), c)
    }

    fn vir(m: i64) -> Op {
        Op::elementary(ElementaryOp::Vir(m))
    }

    fn heis(m: i64) -> Op {
        Op::elementary(ElementaryOp::Heis(m))
    }

    /// Direct oracle for L_m: builds the operator from MulT/DerT products.
    fn vir_oracle(m: i64, max_index: i64) -> Op {
        let mut out = Op::zero();
        let r = |n: i64, d: i64| rat(n, d);
        for a in 1..=max_index {
            let b = -m - a;
            if b >= 1 {
                out = out.add(&Op::product(
                    r(a * b, 2),
                    vec![
                        Generator::op(ElementaryOp::MulT(a as u32)),
                        Generator::op(ElementaryOp::MulT(b as u32)),
                    ],
                ));
            }
            let k = a;
            if k + m >= 1 {
                out = out.add(&Op::product(
                    r(k, 1),
                    vec![
                        Generator::op(ElementaryOp::MulT(k as u32)),
                        Generator::op(ElementaryOp::DerT((k + m) as u32)),
                    ],
                ));
            }
            let b = m - a;
            if b >= 1 {
                out = out.add(&Op::product(
                    r(1, 2),
                    vec![
                        Generator::op(ElementaryOp::DerT(a as u32)),
                        Generator::op(ElementaryOp::DerT(b as u32)),
                    ],
                ));
            }
        }
        out
    }

    fn basis(max_deg: u64) -> Vec<Monomial> {
        fn rec(start: u32, left: u64, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Monomial>) {
            out.push(Monomial::from_pairs(cur));
            for i in start..=left as u32 {
                cur.push((i, 1));
                rec(i, left - i as u64, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(1, max_deg, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(vir(0).apply(&P::var(3), None), t(&[(3, 1)], rat(3, 1)));
        assert_eq!(vir(-2).apply(&P::one(), None), t(&[(1, 2)], rat(1, 2)));
        assert_eq!(heis(-3).apply(&P::one(), None), t(&[(3, 1)], rat(3, 1)));
        assert!(heis(0).apply(&P::var(2), None).is_zero());
    }

    #[test]
    fn vir_matches_oracle_on_basis() {
        for m in -4..=4 {
            let oracle = vir_oracle(m, 14);
            for b in basis(8) {
                let p = P::term(b.clone(), rat(1, 1));
                assert_eq!(vir(m).apply(&p, None), oracle.apply(&p, None), "L_{m} on {b}");
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let p = t(&[(2, 1), (4, 1)], rat(1, 1));
        let lhs = Op::commutator_on(&vir(2), &vir(-2), &p, None);
        assert_eq!(lhs, t(&[(2, 1), (4, 1)], rat(24, 1) + rat(1, 2)));
        let q = t(&[(1, 2), (3, 1)], rat(5, 3));
        assert_eq!(Op::commutator_on(&heis(1), &heis(-1), &q, None), q);
        assert_eq!(
            Op::commutator_on(&vir(1), &vir(-1), &P::var(3), None),
            t(&[(3, 1)], rat(6, 1))
        );
    }

    #[test]
    fn algebra_relations_on_basis() {
        let polys: Vec<P> = basis(8).into_iter().map(|m| P::term(m, rat(1, 1))).collect();
        for k in -4i64..=4 {
            for m in -4i64..=4 {
                for p in &polys {
                    // [J_k, J_m] = k δ_{k,-m}
                    let jj = Op::commutator_on(&heis(k), &heis(m), p, None);
                    let expected = if k == -m { p.scale(&rat(k, 1)) } else { P::zero() };
                    assert_eq!(jj, expected);
                    // [L_k, J_m] = -m J_{k+m}
                    let lj = Op::commutator_on(&vir(k), &heis(m), p, None);
                    assert_eq!(lj, heis(k + m).apply(p, None).scale(&rat(-m, 1)));
                    // [L_k, L_m] = (k-m) L_{k+m} + (k^3-k)/12 δ_{k,-m}
                    let ll = Op::commutator_on(&vir(k), &vir(m), p, None);
                    let mut rhs = vir(k + m).apply(p, None).scale(&rat(k - m, 1));
                    if k == -m {
                        rhs = rhs.add(&p.scale(&rat(k * k * k - k, 12)));
                    }
                    assert_eq!(ll, rhs, "[L_{k}, L_{m}] on {p}");
                }
            }
        }
    }

    #[test]
    fn truncated_apply_matches_untruncated() {
        // Raising then lowering: intermediate degree exceeds the cap.
        let op = Op::product(
            rat(1, 1),
            vec![
                Generator::op(ElementaryOp::Vir(4)),
                Generator::op(ElementaryOp::Vir(-3)),
            ],
        );
        let p = t(&[(1, 2)], rat(1, 1)).add(&t(&[(3, 1)], rat(2, 1)));
        let full = op.apply(&p, None);
        assert_eq!(op.apply(&p, Some(2)), full.truncate_degree(2));
    }

    #[test]
    fn identity_conjugation() {
        let f = LaurentSeries::<Rational>::var().truncate(20);
        let c = Conjugation::new(&f, 6).unwrap();
        for k in -3..=3 {
            let jk = c.j(k).unwrap();
            assert_eq!(jk.parts().len(), if k == 0 { 1 } else { 1 });
            assert_eq!(jk.parts()[0].1, ElementaryOp::Heis(k));
            assert!(jk.parts()[0].0.is_one());
            let lk = c.l(k.max(-2)).unwrap();
            assert_eq!(lk.parts(), &[(rat(1, 1), ElementaryOp::Vir(k.max(-2)))]);
        }
    }

    #[test]
    fn conjugation_needs_precision() {
        let f = LaurentSeries::<Rational>::var().add(&LaurentSeries::monomial(rat(1, 1), 2)).truncate(5);
        let c = Conjugation::new(&f, 10).unwrap();
        assert!(c.j(1).is_err());
    }

    fn arb_generator() -> impl Strategy<Value = Generator<Rational>> {
        let op = prop_oneof![
            (1u32..5).prop_map(ElementaryOp::MulT),
            (1u32..5).prop_map(ElementaryOp::DerT),
            (-3i64..4).prop_map(ElementaryOp::Vir),
            (-4i64..5).prop_map(ElementaryOp::Heis),
        ];
        prop::collection::vec(((-3i64..4), op), 1..3).prop_map(|ps| {
            let mut g = Generator::zero();
            for (c, o) in ps {
                g.push(rat(c, 1), o);
            }
            g
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn composition_is_sequential(a in arb_generator(), b in arb_generator(), i in 0usize..40) {
            let basis = basis(6);
            let p = P::term(basis[i % basis.len()].clone(), rat(1, 1));
            let ab = Op::generator(a.clone()).compose(&Op::generator(b.clone()));
            let seq = Op::generator(a).apply(&Op::generator(b).apply(&p, None), None);
            prop_assert_eq!(ab.apply(&p, None), seq);
        }

        #[test]
        fn degree_soundness(k in -4i64..5, is_vir in any::<bool>(), i in 0usize..40) {
            let basis = basis(6);
            let m = basis[i % basis.len()].clone();
            let op = if is_vir { ElementaryOp::Vir(k) } else { ElementaryOp::Heis(k) };
            let d = op.degree();
            let out = Op::elementary(op).apply(&P::term(m.clone(), rat(1, 1)), None);
            for (mo, _) in out.iter() {
                prop_assert_eq!(mo.degree() as i64, m.degree() as i64 + d);
            }
        }

        #[test]
        fn capped_equals_truncated(a in arb_generator(), b in arb_generator(), cap in 0u64..7) {
            let p = basis(5).into_iter().fold(P::zero(), |acc, m| acc.add(&P::term(m, rat(1, 1))));
            let op = Op::generator(a).compose(&Op::generator(b));
            prop_assert_eq!(op.apply(&p, Some(cap)), op.apply(&p, None).truncate_degree(cap));
        }
    }
}
