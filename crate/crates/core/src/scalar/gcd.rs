//! Bivariate gcd over Z via primitive pseudo-remainder sequences in Z[s][p].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::IntPoly;

/// Dense polynomial in `s`, index = degree, no trailing zeros.
type UPoly = Vec<BigInt>;
/// Dense polynomial in `p` with `UPoly` coefficients, no trailing zeros.
type RPoly = Vec<UPoly>;

fn u_trim(a: &mut UPoly) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn u_content(a: &UPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn u_mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    u_trim(&mut out);
    out
}

fn u_sub(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_default();
        let y = b.get(i).cloned().unwrap_or_default();
        out.push(x - y);
    }
    u_trim(&mut out);
    out
}

fn u_shift_mul(a: &UPoly, c: &BigInt, shift: usize) -> UPoly {
    let mut out = vec![BigInt::zero(); shift];
    out.extend(a.iter().map(|x| x * c));
    u_trim(&mut out);
    out
}

fn u_scale(a: &UPoly, c: &BigInt) -> UPoly {
    let mut out: UPoly = a.iter().map(|x| x * c).collect();
    u_trim(&mut out);
    out
}

fn u_primitive(a: &UPoly) -> UPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut c = u_content(a);
    if a.last().unwrap().is_negative() {
        c = -c;
    }
    a.iter().map(|x| x / &c).collect()
}

fn u_prem(a: &UPoly, b: &UPoly) -> UPoly {
    let db = b.len() - 1;
    let lc = b.last().unwrap().clone();
    let mut r = a.clone();
    while !r.is_empty() && r.len() > db {
        let t = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        let lhs = u_scale(&r, &lc);
        let rhs = u_shift_mul(b, &t, shift);
        r = u_sub(&lhs, &rhs);
    }
    r
}

/// Gcd in Z[s] with positive leading coefficient.
fn u_gcd(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() {
        return u_primitive_signed(b);
    }
    if b.is_empty() {
        return u_primitive_signed(a);
    }
    let c = u_content(a).gcd(&u_content(b));
    let (mut x, mut y) = (u_primitive(a), u_primitive(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = u_prem(&x, &y);
        x = y;
        y = u_primitive(&r);
    }
    u_scale(&u_primitive(&x), &c)
}

fn u_primitive_signed(a: &UPoly) -> UPoly {
    if a.last().is_some_and(|c| c.is_negative()) {
        a.iter().map(|x| -x).collect()
    } else {
        a.clone()
    }
}

/// Exact quotient `a / b` in Z[s], or `None` if it does not exist.
fn u_div_exact(a: &UPoly, b: &UPoly) -> Option<UPoly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if b.is_empty() || a.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lc = b.last().unwrap();
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len() - db];
    while !r.is_empty() && r.len() > db {
        let (t, rem) = r.last().unwrap().div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        let shift = r.len() - 1 - db;
        q[shift] = t.clone();
        r = u_sub(&r, &u_shift_mul(b, &t, shift));
    }
    if !r.is_empty() {
        return None;
    }
    u_trim(&mut q);
    Some(q)
}

fn r_trim(a: &mut RPoly) {
    while a.last().is_some_and(|c| c.is_empty()) {
        a.pop();
    }
}

fn r_content(a: &RPoly) -> UPoly {
    let mut g: UPoly = Vec::new();
    for c in a {
        g = u_gcd(&g, c);
        if g.len() == 1 && g[0].is_one() {
            break;
        }
    }
    g
}

fn r_div_u(a: &RPoly, c: &UPoly) -> RPoly {
    a.iter()
        .map(|x| u_div_exact(x, c).expect("content divides every coefficient"))
        .collect()
}

fn r_primitive(a: &RPoly) -> RPoly {
    let c = r_content(a);
    r_div_u(a, &c)
}

fn r_scale(a: &RPoly, c: &UPoly) -> RPoly {
    let mut out: RPoly = a.iter().map(|x| u_mul(x, c)).collect();
    r_trim(&mut out);
    out
}

fn r_sub_shifted(a: &RPoly, b: &RPoly, c: &UPoly, shift: usize) -> RPoly {
    let n = a.len().max(b.len() + shift);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_default();
        let y = if i >= shift {
            b.get(i - shift).map(|y| u_mul(y, c)).unwrap_or_default()
        } else {
            Vec::new()
        };
        out.push(u_sub(&x, &y));
    }
    r_trim(&mut out);
    out
}

fn r_prem(a: &RPoly, b: &RPoly) -> RPoly {
    let db = b.len() - 1;
    let lc = b.last().unwrap().clone();
    let mut r = a.clone();
    while !r.is_empty() && r.len() > db {
        let t = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        r = r_sub_shifted(&r_scale(&r, &lc), b, &t, shift);
    }
    r
}

fn r_div_exact(a: &RPoly, b: &RPoly) -> Option<RPoly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lc = b.last().unwrap();
    let mut r = a.clone();
    let mut q: RPoly = vec![Vec::new(); a.len() - db];
    while !r.is_empty() && r.len() > db {
        let t = u_div_exact(r.last().unwrap(), lc)?;
        let shift = r.len() - 1 - db;
        r = r_sub_shifted(&r, b, &t, shift);
        q[shift] = t;
    }
    if !r.is_empty() {
        return None;
    }
    r_trim(&mut q);
    Some(q)
}

fn to_r(a: &IntPoly) -> RPoly {
    let mut rows = a.to_recursive();
    for row in rows.iter_mut() {
        u_trim(row);
    }
    r_trim(&mut rows);
    rows
}

/// Greatest common divisor, normalized to a positive leading coefficient.
pub(crate) fn poly_gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let (ra, rb) = (to_r(a), to_r(b));
    if ra.is_empty() {
        return IntPoly::from_recursive(&rb);
    }
    if rb.is_empty() {
        return IntPoly::from_recursive(&ra);
    }
    let c = u_gcd(&r_content(&ra), &r_content(&rb));
    let (mut x, mut y) = (r_primitive(&ra), r_primitive(&rb));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = r_prem(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { r_primitive(&r) };
    }
    let mut g = r_scale(&r_primitive(&x), &c);
    if g.last().and_then(|row| row.last()).is_some_and(|v| v.is_negative()) {
        g = g.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
    }
    IntPoly::from_recursive(&g)
}

/// Exact quotient; `None` when `b` does not divide `a` over Z.
pub(crate) fn poly_div_exact(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    let q = r_div_exact(&to_r(a), &to_r(b))?;
    Some(IntPoly::from_recursive(&q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> IntPoly {
        IntPoly::monomial((1, 0), BigInt::one())
    }
    fn s() -> IntPoly {
        IntPoly::monomial((0, 1), BigInt::one())
    }
    fn k(n: i64) -> IntPoly {
        IntPoly::constant(BigInt::from(n))
    }

    #[test]
    fn gcd_recovers_common_factor() {
        // g = p + s^2, a = g (p - s), b = g (2p + 3)
        let g = p().add(&s().mul(&s()));
        let a = g.mul(&p().sub(&s()));
        let b = g.mul(&p().mul_int(&BigInt::from(2)).add(&k(3)));
        assert_eq!(poly_gcd(&a, &b), g);
        assert_eq!(poly_div_exact(&a, &g), Some(p().sub(&s())));
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let a = p().add(&k(1));
        let b = s().add(&k(1));
        assert!(poly_gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_keeps_integer_content() {
        let a = p().add(&s()).mul_int(&BigInt::from(6));
        let b = p().add(&s()).mul_int(&BigInt::from(4)).mul(&s());
        let g = poly_gcd(&a, &b);
        assert_eq!(g, p().add(&s()).mul_int(&BigInt::from(2)));
    }

    #[test]
    fn division_detects_non_divisibility() {
        assert_eq!(poly_div_exact(&p().add(&k(1)), &p().add(&k(2))), None);
    }
}
