//! Exact polynomial division and multivariate GCD over ℚ.
//!
//! A heuristic GCD (evaluation at a large integer, checked by exact
//! division) is tried first. When it fails the GCD is computed recursively:
//! pick a main variable, split off the content (GCD of the coefficients, one
//! variable fewer), and run a primitive pseudo-remainder sequence on the
//! primitive parts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::poly::{Monomial, Poly, Var};

/// `f / g` if `g` divides `f` exactly.
pub fn exact_div(f: &Poly, g: &Poly) -> Option<Poly> {
    let (gm, gc) = g.leading()?;
    let (gm, gc) = (*gm, gc.clone());
    let mut r = f.clone();
    let mut q = Poly::zero();
    while let Some((lm, lc)) = r.leading() {
        let t = gm.div(lm)?;
        let c = lc / &gc;
        q.add_term(t, c.clone());
        r = &r - &g.mul_term(&t, &c);
    }
    Some(q)
}

/// Scales `p` to coprime integer coefficients with a positive leading
/// coefficient.
pub fn primitive(p: &Poly) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = p.rational_content();
    let q = p.scale(&c.recip());
    if q.leading_is_negative() {
        -q
    } else {
        q
    }
}

/// Normalized GCD: primitive, positive leading coefficient; `gcd(0, 0) = 0`.
pub fn gcd(f: &Poly, g: &Poly) -> Poly {
    if f.is_zero() {
        return primitive(g);
    }
    if g.is_zero() {
        return primitive(f);
    }
    if f.as_constant().is_some() || g.as_constant().is_some() {
        return Poly::one();
    }
    if f.len() == 1 || g.len() == 1 {
        let m = f.monomial_content().gcd(&g.monomial_content());
        return Poly::term(One::one(), m);
    }
    let fv = f.vars();
    let gv = g.vars();
    let shared = fv.iter().copied().find(|v| gv.contains(v));
    let Some(v) = shared else {
        // No common variable: only a common monomial-free content could be
        // shared, and there is none.
        return Poly::one();
    };
    // Variables present in only one argument cannot divide the other, so
    // the GCD is that of the other argument with all coefficients in them.
    let only_f: Vec<Var> = fv.iter().copied().filter(|u| !gv.contains(u)).collect();
    if !only_f.is_empty() {
        return gcd_all(g, coefficients_in(f, &only_f));
    }
    let only_g: Vec<Var> = gv.iter().copied().filter(|u| !fv.contains(u)).collect();
    if !only_g.is_empty() {
        return gcd_all(f, coefficients_in(g, &only_g));
    }

    if let Some(h) = heuristic_gcd(&primitive(f), &primitive(g)) {
        return primitive(&h);
    }

    let cf = content(f, v);
    let cg = content(g, v);
    let c = gcd(&cf, &cg);
    let pf = exact_div(f, &cf).expect("content divides");
    let pg = exact_div(g, &cg).expect("content divides");

    let (mut a, mut b) = if pf.degree_in(v) >= pg.degree_in(v) {
        (pf, pg)
    } else {
        (pg, pf)
    };
    while !b.is_zero() && b.degree_in(v) > 0 {
        let r = prem(&a, &b, v);
        a = b;
        b = if r.is_zero() {
            Poly::zero()
        } else {
            primitive_part(&r, v)
        };
    }
    let h = if b.is_zero() { a } else { Poly::one() };
    primitive(&(&c * &primitive_part(&h, v)))
}

fn gcd_all(start: &Poly, mut polys: Vec<Poly>) -> Poly {
    polys.sort_by_key(Poly::len);
    let mut acc = primitive(start);
    for p in &polys {
        if acc.is_one() {
            break;
        }
        acc = gcd(&acc, p);
    }
    acc
}

/// Coefficients of `p` viewed as a polynomial in `vars` jointly.
fn coefficients_in(p: &Poly, vars: &[Var]) -> Vec<Poly> {
    let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = Monomial::default();
        for &v in vars {
            key.0[v.index()] = m.exp(v);
        }
        let rest = vars.iter().fold(*m, |acc, &v| acc.without(v));
        groups.entry(key).or_insert_with(Poly::zero).add_term(rest, c.clone());
    }
    groups.into_values().collect()
}

/// GCD of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content(p: &Poly, v: Var) -> Poly {
    let deg = p.degree_in(v);
    let mut acc = Poly::zero();
    for k in 0..=deg {
        let c = p.coeff_in(v, k);
        if c.is_zero() {
            continue;
        }
        acc = gcd(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_part(p: &Poly, v: Var) -> Poly {
    if p.degree_in(v) == 0 {
        return primitive(p);
    }
    let c = content(p, v);
    primitive(&exact_div(p, &c).expect("content divides"))
}

const HEURISTIC_TRIES: usize = 6;

/// Heuristic GCD of integer polynomials: evaluate one variable at a large
/// integer `ξ`, recurse, rebuild the candidate from its `ξ`-adic digits and
/// accept it only if it divides both arguments. `None` means every `ξ` tried
/// was unlucky and the caller should fall back to the remainder sequence.
fn heuristic_gcd(f: &Poly, g: &Poly) -> Option<Poly> {
    if f.is_zero() || g.is_zero() {
        return None;
    }
    let (fc, gc) = (f.as_constant(), g.as_constant());
    if fc.is_some() || gc.is_some() {
        let n = f.terms().chain(g.terms()).fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
        return Some(Poly::constant(BigRational::from_integer(n)));
    }
    if f.terms().chain(g.terms()).any(|(_, c)| !c.is_integer()) {
        return None;
    }
    let common = f.terms().chain(g.terms()).fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    let inv = BigRational::from_integer(common.clone()).recip();
    let (f, g) = (f.scale(&inv), g.scale(&inv));

    let mut vars = f.vars();
    vars.extend(g.vars());
    let x = *vars.iter().min().expect("non-constant polynomial has a variable");
    let norm = |p: &Poly| p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default();
    let lc = |p: &Poly| p.leading().map(|(_, c)| c.numer().abs()).unwrap_or_else(BigInt::one);
    let (nf, ng) = (norm(&f), norm(&g));
    let b: BigInt = BigInt::from(2) * nf.clone().min(ng.clone()) + 29;
    let from_lc: BigInt = BigInt::from(2) * (&nf / lc(&f)).min(&ng / lc(&g)) + 4;
    let mut xi = b.max(from_lc);

    for _ in 0..HEURISTIC_TRIES {
        let (fx, gx) = (evaluate(&f, x, &xi), evaluate(&g, x, &xi));
        if let Some(h) = heuristic_gcd(&fx, &gx) {
            let cand = interpolate(&h, x, &xi);
            if !cand.is_zero() {
                let cand = integer_primitive(&cand);
                if exact_div(&f, &cand).is_some() && exact_div(&g, &cand).is_some() {
                    return Some(cand.scale(&BigRational::from_integer(common)));
                }
            }
        }
        xi = BigInt::from(73794) * &xi * xi.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

fn evaluate(p: &Poly, x: Var, xi: &BigInt) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let k = BigRational::from_integer(Pow::pow(xi, u32::from(m.exp(x))));
        out.add_term(m.without(x), c * k);
    }
    out
}

/// Rebuilds `Σ hᵢ xⁱ` from `h = Σ hᵢ ξⁱ` with symmetric digits.
fn interpolate(h: &Poly, x: Var, xi: &BigInt) -> Poly {
    let half = xi / BigInt::from(2);
    let mut rest = h.clone();
    let mut out = Poly::zero();
    let mut i = 0u16;
    while !rest.is_zero() {
        let mut digit = Poly::zero();
        for (m, c) in rest.terms() {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            digit.add_term(*m, BigRational::from_integer(r));
        }
        for (m, c) in digit.terms() {
            out.add_term(m.mul(&Monomial::var_pow(x, i)), c.clone());
        }
        rest = (&rest - &digit).scale(&BigRational::from_integer(xi.clone()).recip());
        i += 1;
    }
    out
}

/// Divides out the integer content, keeping the sign.
fn integer_primitive(p: &Poly) -> Poly {
    let n = p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    p.scale(&BigRational::from_integer(n).recip())
}

/// Pseudo-remainder of `a` by `b` with respect to `v`.
fn prem(a: &Poly, b: &Poly, v: Var) -> Poly {
    let db = b.degree_in(v);
    let lcb = b.coeff_in(v, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.coeff_in(v, dr);
        let shift = Poly::term(One::one(), Monomial::var_pow(v, dr - db));
        r = &(&lcb * &r) - &(&(&lcr * &shift) * b);
    }
    r
}
