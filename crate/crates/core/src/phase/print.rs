//! Canonical text form. The output is accepted by [`parse_expr`] and parses
//! back to the same normal form.
//!
//! [`parse_expr`]: super::parse_expr

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::PhaseExpr;
use super::poly::{Monomial, Poly};

pub(crate) fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        push_term(&mut out, &c.abs(), m);
    }
    out
}

fn push_term(out: &mut String, c: &BigRational, m: &Monomial) {
    if m.is_one() {
        out.push_str(&c.to_string());
        return;
    }
    if !c.is_one() {
        out.push_str(&c.to_string());
        out.push('*');
    }
    out.push_str(&format!("{m:?}"));
}

pub(crate) fn expr_to_string(e: &PhaseExpr) -> String {
    // Clear coefficient denominators so that both halves print with integer
    // coefficients, then strip the common integer content.
    let l = e.numer().denominator_lcm().lcm(&e.denom().denominator_lcm());
    let l = BigRational::from_integer(l);
    let mut num = e.numer().scale(&l);
    let mut den = e.denom().scale(&l);
    let g = int_content(&num).gcd(&int_content(&den));
    if !g.is_zero() && !g.is_one() {
        let inv = BigRational::new(BigInt::one(), g);
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    if den.is_one() {
        return poly_to_string(&num);
    }
    let ns = poly_to_string(&num);
    let ds = poly_to_string(&den);
    let ns = if num.len() > 1 { format!("({ns})") } else { ns };
    let ds = if den.len() > 1 || ds.contains('*') || ds.contains('/') {
        format!("({ds})")
    } else {
        ds
    };
    format!("{ns}/{ds}")
}

fn int_content(p: &Poly) -> BigInt {
    p.terms()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}
