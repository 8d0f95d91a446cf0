//! Sparse multivariate polynomials over ℚ in the canonical phase-space
//! variables and the two positive parameters `a` and `m`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Number of symbols a monomial carries exponents for.
pub const NVARS: usize = 10;

/// The symbols of the extended phase space.
///
/// The discriminant order is the storage and printing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Lambda = 0,
    X = 1,
    Y = 2,
    Z = 3,
    PLambda = 4,
    Px = 5,
    Py = 6,
    Pz = 7,
    A = 8,
    M = 9,
}

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::Lambda,
        Var::X,
        Var::Y,
        Var::Z,
        Var::PLambda,
        Var::Px,
        Var::Py,
        Var::Pz,
        Var::A,
        Var::M,
    ];

    /// Canonical coordinate / momentum pairs `(q, p)`.
    pub const CANONICAL_PAIRS: [(Var, Var); 4] = [
        (Var::Lambda, Var::PLambda),
        (Var::X, Var::Px),
        (Var::Y, Var::Py),
        (Var::Z, Var::Pz),
    ];

    /// Embedding coordinates `x¹, x², x³`.
    pub const COORDS: [Var; 3] = [Var::X, Var::Y, Var::Z];
    /// Canonical momenta `p₁, p₂, p₃` (lower index).
    pub const MOMENTA: [Var; 3] = [Var::Px, Var::Py, Var::Pz];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Lambda => "lambda",
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::PLambda => "p_lambda",
            Var::Px => "p_x",
            Var::Py => "p_y",
            Var::Pz => "p_z",
            Var::A => "a",
            Var::M => "m",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Some(match name {
            "lambda" | "λ" => Var::Lambda,
            "x" => Var::X,
            "y" => Var::Y,
            "z" => Var::Z,
            "p_lambda" | "p_λ" => Var::PLambda,
            "p_x" => Var::Px,
            "p_y" => Var::Py,
            "p_z" => Var::Pz,
            "a" => Var::A,
            "m" => Var::M,
            _ => return None,
        })
    }

    /// `true` for the symbolic parameters `a` and `m`.
    pub fn is_parameter(self) -> bool {
        matches!(self, Var::A | Var::M)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector indexed by [`Var::index`].
///
/// Ordered graded-lexicographically: total degree first, then exponents
/// compared in variable order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u16) -> Self {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Monomial(m)
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0;
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            *o += *e;
        }
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, if exact.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut out = other.0;
        for (o, e) in out.iter_mut().zip(self.0.iter()) {
            *o -= *e;
        }
        Some(Monomial(out))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = self.0;
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            *o = (*o).max(*e);
        }
        Monomial(out)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = self.0;
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            *o = (*o).min(*e);
        }
        Monomial(out)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn without(&self, v: Var) -> Monomial {
        let mut out = self.0;
        out[v.index()] = 0;
        Monomial(out)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        Var::ALL.into_iter().filter(move |v| self.exp(*v) > 0)
    }

    pub fn eval(&self, values: &[f64; NVARS]) -> f64 {
        self.0
            .iter()
            .zip(values.iter())
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| v.powi(i32::from(*e)))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            match self.exp(v) {
                1 => write!(f, "{v}")?,
                e => write!(f, "{v}^{e}")?,
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with exact rational coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(BigRational::one(), Monomial::var(v))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigRational)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Terms from highest to lowest monomial (printing order).
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    /// Highest term in the storage (graded-lex) order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[i] -= 1;
            out.add_term(dm, c * rat(i64::from(e)));
        }
        out
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn vars(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|v| self.contains(*v)).collect()
    }

    /// Coefficient of `v^k`, as a polynomial free of `v`.
    pub fn coeff_in(&self, v: Var, k: u16) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == k)
                .map(|(m, c)| (m.without(v), c.clone()))
                .collect(),
        }
    }

    /// Greatest common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::ONE;
        };
        it.fold(*first, |acc, m| acc.gcd(m))
    }

    /// Divides every term by `m`. Panics if some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (m.div(k).expect("monomial does not divide term"), c.clone()))
                .collect(),
        }
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients.
    pub fn rational_content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::one();
        }
        BigRational::new(num, den)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Substitutes `v := value` where `value` is a polynomial.
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        if !self.contains(v) {
            return self.clone();
        }
        let deg = self.degree_in(v);
        let mut acc = Poly::zero();
        for k in (0..=deg).rev() {
            acc = &(&acc * value) + &self.coeff_in(v, k);
        }
        acc
    }

    pub fn eval(&self, values: &[f64; NVARS]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64().unwrap_or(f64::NAN) * m.eval(values))
            .sum()
    }

    pub fn map_coeffs(&self, f: impl Fn(&BigRational) -> BigRational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Sign of the leading coefficient.
    pub fn leading_is_negative(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(*m, c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", crate::phase::print::poly_to_string(self))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::phase::print::poly_to_string(self))
    }
}
