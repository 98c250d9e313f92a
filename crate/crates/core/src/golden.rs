//! Reference expansions of `log τ` as exact tables.
//!
//! Coefficients are expressions in `p`, `q` and `s = sqrt(p+q)`; a monomial is
//! the list of its time indices with repetition (`[1, 1, 3]` is `t_1^2 t_3`).

use crate::fock::{GradedSeries, TPolynomial};
use crate::caj::monomial_from_indices;
use crate::scalar::{Scalar, ScalarError};

pub type Table = &'static [(&'static [u32], &'static str)];

/// `log τ_0` for the undeformed operators, levels 1..=6.
pub const BASE_ALPHA0: [Table; 6] = [
    &[(&[1], "1/8")],
    &[(&[1, 1], "1/16")],
    &[(&[1, 1, 1], "1/24"), (&[3], "9/128")],
    &[(&[1, 1, 1, 1], "1/32"), (&[1, 3], "27/128")],
    &[(&[1, 1, 1, 1, 1], "1/40"), (&[1, 1, 3], "27/64"), (&[5], "225/1024")],
    &[
        (&[1, 1, 1, 1, 1, 1], "1/48"),
        (&[1, 1, 1, 3], "45/64"),
        (&[1, 5], "1125/1024"),
        (&[3, 3], "567/1024"),
    ],
];

/// `log τ_1` for the undeformed operators, levels 1..=3.
pub const BASE_ALPHA1: [Table; 3] = [
    &[(&[1, 1, 1], "1/6"), (&[3], "1/8")],
    &[(&[1, 1, 1, 3], "1/2"), (&[1, 5], "5/8"), (&[3, 3], "3/16")],
    &[
        (&[1, 3, 5], "15/4"),
        (&[1, 1, 1, 3, 3], "3/2"),
        (&[1, 1, 1, 1, 5], "5/8"),
        (&[1, 1, 7], "35/16"),
        (&[3, 3, 3], "3/8"),
        (&[9], "105/128"),
    ],
];

/// `F_k^0` of the deformed tau-function, levels 1..=7.
pub const QP_ALPHA0: [Table; 7] = [
    &[(&[1], "1/8")],
    &[(&[1, 1], "1/16"), (&[], "-(p^2+p*q+q^2)/(128*(p+q))")],
    &[
        (&[3], "9/128"),
        (&[1, 1, 1], "1/24"),
        (&[2], "3*(p+2*q)/(64*s)"),
        (&[1], "-(2*p^2-p*q-q^2)/(128*(p+q))"),
    ],
    &[
        (&[1, 3], "27/128"),
        (&[1, 1, 1, 1], "1/32"),
        (&[1, 2], "9*(p+2*q)/(64*s)"),
        (&[1, 1], "-3*(p^2-2*p*q-2*q^2)/(128*(p+q))"),
        (&[], "(p^4+2*p^3*q+3*p^2*q^2+2*p*q^3+q^4)/(512*(p+q)^2)"),
    ],
    &[
        (&[5], "225/1024"),
        (&[1, 1, 3], "27/64"),
        (&[1, 1, 1, 1, 1], "1/40"),
        (&[4], "75*(p+2*q)/(256*s)"),
        (&[1, 1, 2], "9*(p+2*q)/(32*s)"),
        (&[3], "3*(4*p^2+79*p*q+79*q^2)/(512*(p+q))"),
        (&[1, 1, 1], "-(2*p^2-7*p*q-7*q^2)/(64*(p+q))"),
        (&[2], "-(22*p^3+21*p^2*q-69*p*q^2-46*q^3)/(512*s^3)"),
        (&[1], "(8*p^4-6*p^3*q-5*p^2*q^2+2*p*q^3+q^4)/(1024*(p+q)^2)"),
    ],
    &[
        (&[1, 5], "1125/1024"),
        (&[3, 3], "567/1024"),
        (&[1, 1, 1, 3], "45/64"),
        (&[1, 1, 1, 1, 1, 1], "1/48"),
        (&[1, 4], "375*(p+2*q)/(256*s)"),
        (&[2, 3], "189*(p+2*q)/(256*s)"),
        (&[1, 1, 1, 2], "15*(p+2*q)/(32*s)"),
        (&[1, 3], "3*(10*p^2+229*p*q+229*q^2)/(256*(p+q))"),
        (&[2, 2], "63*(p^2+4*p*q+4*q^2)/(256*(p+q))"),
        (&[1, 1, 1, 1], "-5*(p^2-5*p*q-5*q^2)/(128*(p+q))"),
        (&[1, 2], "-(110*p^3-21*p^2*q-723*p*q^2-482*q^3)/(512*s^3)"),
        (&[1, 1], "(10*p^4-35*p^3*q-11*p^2*q^2+48*p*q^3+24*q^4)/(512*(p+q)^2)"),
        (
            &[],
            "-(17*p^6+51*p^5*q+105*p^4*q^2+125*p^3*q^3+105*p^2*q^4+51*p*q^5+17*q^6)/(12288*(p+q)^3)",
        ),
    ],
    &[
        (&[7], "55125/32768"),
        (&[1, 1, 5], "3375/1024"),
        (&[1, 3, 3], "1701/512"),
        (&[1, 1, 1, 1, 3], "135/128"),
        (&[1, 1, 1, 1, 1, 1, 1], "1/56"),
        (&[6], "55125*(p+2*q)/(16384*s)"),
        (&[1, 1, 4], "1125*(p+2*q)/(256*s)"),
        (&[1, 2, 3], "567*(p+2*q)/(128*s)"),
        (&[1, 1, 1, 1, 2], "45*(p+2*q)/(64*s)"),
        (&[5], "1875*(26*p^2+173*p*q+173*q^2)/(32768*(p+q))"),
        (&[1, 1, 3], "9*(20*p^2+521*p*q+521*q^2)/(512*(p+q))"),
        (&[1, 2, 2], "189*(p^2+4*p*q+4*q^2)/(128*(p+q))"),
        (&[1, 1, 1, 1, 1], "-3*(2*p^2-13*p*q-13*q^2)/(128*(p+q))"),
        (&[4], "-25*(67*p^3-387*p^2*q-1563*p*q^2-1042*q^3)/(4096*s^3)"),
        (&[1, 1, 2], "-3*(110*p^3-147*p^2*q-1101*p*q^2-734*q^3)/(512*s^3)"),
        (&[3], "-3*(1548*p^4+9796*p^3*q-7681*p^2*q^2-34954*p*q^3-17477*q^4)/(32768*(p+q)^2)"),
        (&[1, 1, 1], "(40*p^4-250*p^3*q+63*p^2*q^2+626*p*q^3+313*q^4)/(1024*(p+q)^2)"),
        (&[2], "(1052*p^5+308*q*p^4-4561*q^2*p^3-284*q^3*p^2+4135*q^4*p+1654*q^5)/(16384*s^5)"),
        (
            &[1],
            "-(272*p^6-236*p^5*q-176*p^4*q^2+115*p^3*q^3+45*p^2*q^4-15*p*q^5-5*q^6)/(32768*(p+q)^3)",
        ),
    ],
];

/// `F_k^1` of the deformed tau-function, levels 1..=3.
pub const QP_ALPHA1: [Table; 3] = [
    &[
        (&[3], "1/8"),
        (&[1, 1, 1], "1/6"),
        (&[2], "(p+2*q)/(12*s)"),
        (&[1], "-p^2/(24*(p+q))"),
    ],
    &[
        (&[1, 1, 1, 3], "1/2"),
        (&[1, 5], "5/8"),
        (&[3, 3], "3/16"),
        (&[1, 4], "5*(p+2*q)/(6*s)"),
        (&[2, 3], "(p+2*q)/(4*s)"),
        (&[1, 1, 1, 2], "(p+2*q)/(3*s)"),
        (&[1, 3], "(p^2+12*p*q+12*q^2)/(8*(p+q))"),
        (&[2, 2], "(p^2+4*p*q+4*q^2)/(12*(p+q))"),
        (&[1, 1, 1, 1], "q/6"),
        (&[1, 2], "-(p^3-p^2*q-9*p*q^2-6*q^3)/(12*s^3)"),
        (&[1, 1], "-q*(2*p^2-p*q-q^2)/(48*(p+q))"),
        (&[], "-p^2*q^2/(5760*(p+q))"),
    ],
    &[
        (&[1, 1, 1, 1, 5], "5/8"),
        (&[1, 1, 1, 3, 3], "3/2"),
        (&[1, 1, 7], "35/16"),
        (&[1, 3, 5], "15/4"),
        (&[3, 3, 3], "3/8"),
        (&[9], "105/128"),
        (&[1, 1, 6], "35*(p+2*q)/(8*s)"),
        (&[2, 3, 3], "3*(p+2*q)/(4*s)"),
        (&[8], "35*(p+2*q)/(16*s)"),
        (&[1, 1, 1, 1, 4], "5*(p+2*q)/(6*s)"),
        (&[1, 1, 1, 2, 3], "2*(p+2*q)/s"),
        (&[1, 2, 5], "5*(p+2*q)/(2*s)"),
        (&[1, 3, 4], "5*(p+2*q)/s"),
        (&[1, 2, 4], "10*(p^2+4*p*q+4*q^2)/(3*(p+q))"),
        (&[1, 3, 3], "9*(p^2+8*p*q+8*q^2)/(8*(p+q))"),
        (&[1, 1, 5], "5*(23*p^2+140*p*q+140*q^2)/(48*(p+q))"),
        (&[1, 1, 1, 1, 3], "(p^2+10*p*q+10*q^2)/(4*(p+q))"),
        (&[7], "7*(76*p^2+391*p*q+391*q^2)/(288*(p+q))"),
        (&[1, 1, 1, 2, 2], "2*(p^2+4*p*q+4*q^2)/(3*(p+q))"),
        (&[2, 2, 3], "(p^2+4*p*q+4*q^2)/(2*(p+q))"),
        (&[1, 2, 3], "(p^3+17*p^2*q+45*p*q^2+30*q^3)/(2*s^3)"),
        (&[1, 1, 4], "(p^3+79*p^2*q+231*p*q^2+154*q^3)/(12*s^3)"),
        (&[1, 1, 1, 1, 2], "11*(p+2*q)*q/(12*s)"),
        (&[2, 2, 2], "(p^3+6*p^2*q+12*p*q^2+8*q^3)/(9*s^3)"),
        (&[6], "7*(10*p^3+167*p^2*q+441*p*q^2+294*q^3)/(192*s^3)"),
        (&[1, 1, 3], "-(2*p^4-2*p^3*q-101*p^2*q^2-198*p*q^3-99*q^4)/(16*(p+q)^2)"),
        (&[1, 1, 1, 1, 1], "5*q^2/24"),
        (&[5], "-(57*p^4-236*p^3*q-2769*p^2*q^2-5066*p*q^3-2533*q^4)/(384*(p+q)^2)"),
        (&[1, 2, 2], "-(p^4-2*p^3*q-26*p^2*q^2-48*p*q^3-24*q^4)/(6*(p+q)^2)"),
        (&[4], "-(37*p^5+520*p^4*q-178*p^3*q^2-5172*p^2*q^3-7580*p*q^4-3032*q^5)/(1440*s^5)"),
        (&[1, 1, 2], "-(7*p^3-4*p^2*q-54*p*q^2-36*q^3)*q/(24*s^3)"),
        (&[1, 1, 1], "-(9*p^2-8*p*q-8*q^2)*q^2/(144*(p+q))"),
        (
            &[3],
            "(7*p^6-16*q*p^5-239*q^2*p^4-170*p^3*q^3+605*q^4*p^2+828*p*q^5+276*q^6)/(960*(p+q)^3)",
        ),
        (&[2], "(21*p^5-2*p^4*q-120*p^3*q^2-40*p^2*q^3+60*p*q^4+24*q^5)*q/(2880*s^5)"),
        (&[1], "7*p^4*q^2/(5760*(p+q)^2)"),
    ],
];

/// Parses a table into a polynomial, with `p` and `s` mapped through `subst`.
pub fn table_poly<S: Scalar>(
    table: Table,
    subst: impl Fn(&str) -> Result<S, ScalarError>,
) -> Result<TPolynomial<S>, ScalarError> {
    let mut out = TPolynomial::zero();
    for (idx, expr) in table {
        out.add_term(monomial_from_indices(idx), subst(expr)?);
    }
    Ok(out)
}

/// All levels of `tables` as a series with zero constant level.
pub fn tables_series<S: Scalar>(
    tables: &[Table],
    subst: impl Fn(&str) -> Result<S, ScalarError>,
) -> Result<GradedSeries<S>, ScalarError> {
    let mut levels = vec![TPolynomial::zero()];
    for t in tables {
        levels.push(table_poly(t, &subst)?);
    }
    Ok(GradedSeries::new(levels))
}

/// Tables for `log τ^(α)`: `qp = false` gives the undeformed ones.
pub fn tables(alpha: u32, qp: bool) -> &'static [Table] {
    match (alpha, qp) {
        (0, false) => &BASE_ALPHA0,
        (0, true) => &QP_ALPHA0,
        (_, false) => &BASE_ALPHA1,
        (_, true) => &QP_ALPHA1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ParamScalar;

    #[test]
    fn all_entries_parse() {
        for alpha in 0..2 {
            for qp in [false, true] {
                tables_series(tables(alpha, qp), ParamScalar::parse_text).unwrap();
            }
        }
    }

    #[test]
    fn base_tables_are_deformed_tables_at_origin() {
        // At p = q = 0 only the pure-time part survives.
        for alpha in 0..2 {
            let base = tables(alpha, false);
            let qp = tables(alpha, true);
            for (b, d) in base.iter().zip(qp) {
                for entry in b.iter() {
                    assert!(d.contains(entry), "{entry:?}");
                }
            }
        }
    }

    #[test]
    fn weights_follow_the_dimension_rule() {
        for alpha in 0..2u32 {
            let ser = tables_series(tables(alpha, true), ParamScalar::parse_text).unwrap();
            for (k, lvl) in ser.levels().iter().enumerate() {
                for (m, c) in lvl.iter() {
                    let w = c.weight_of().unwrap();
                    let expected = crate::scalar::rat((2 * alpha as i64 + 1) * k as i64 - m.degree() as i64, 2);
                    assert_eq!(w, expected, "level {k} {m}");
                }
            }
        }
    }
}
