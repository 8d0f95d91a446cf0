use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::{exact_div, gcd};
use super::poly::{Poly, Var, NVARS};

/// An exact rational function of the phase-space variables and parameters.
///
/// Always stored in normal form: numerator and denominator share no common
/// factor and the denominator's leading coefficient (graded-lex order) is 1.
/// Two values are structurally equal exactly when they are equal as rational
/// functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhaseExpr {
    num: Poly,
    den: Poly,
}

impl PhaseExpr {
    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(Poly::int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::from_poly(Poly::constant(BigRational::new(n.into(), d.into())))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn from_poly(num: Poly) -> Self {
        PhaseExpr { num, den: Poly::one() }
    }

    /// `num / den`, or `None` when `den` is the zero polynomial.
    pub fn ratio(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.as_constant() {
            return PhaseExpr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                exact_div(&num, &g).expect("gcd divides numerator"),
                exact_div(&den, &g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if lc.is_one() {
            PhaseExpr { num, den }
        } else {
            let inv = lc.recip();
            PhaseExpr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn contains(&self, v: Var) -> bool {
        self.num.contains(v) || self.den.contains(v)
    }

    pub fn recip(&self) -> Option<Self> {
        Self::ratio(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &PhaseExpr) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        Some(Self::normalize(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::normalize(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(PhaseExpr {
                num: self.num.pow(e.unsigned_abs()),
                den: self.den.pow(e.unsigned_abs()),
            }
            .renormalized())
        } else {
            self.recip()?.pow(-e)
        }
    }

    fn renormalized(self) -> Self {
        Self::normalize(self.num, self.den)
    }

    /// Partial derivative by the quotient rule.
    pub fn derivative(&self, v: Var) -> Self {
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return Self::from_poly(dn);
        }
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Self::normalize(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalize(num, self.den.pow(2))
    }

    /// Substitutes `v := value`.
    pub fn substitute(&self, v: Var, value: &PhaseExpr) -> Self {
        if !self.contains(v) {
            return self.clone();
        }
        let n = substitute_poly(&self.num, v, value);
        let d = substitute_poly(&self.den, v, value);
        n.checked_div(&d).expect("substitution made the denominator vanish")
    }

    pub fn eval(&self, values: &[f64; NVARS]) -> f64 {
        self.num.eval(values) / self.den.eval(values)
    }
}

fn substitute_poly(p: &Poly, v: Var, value: &PhaseExpr) -> PhaseExpr {
    let deg = p.degree_in(v);
    let mut acc = PhaseExpr::zero();
    for k in (0..=deg).rev() {
        acc = &(&acc * value) + &PhaseExpr::from_poly(p.coeff_in(v, k));
    }
    acc
}

impl Add for &PhaseExpr {
    type Output = PhaseExpr;
    fn add(self, rhs: &PhaseExpr) -> PhaseExpr {
        if self.den == rhs.den {
            return PhaseExpr::normalize(&self.num + &rhs.num, self.den.clone());
        }
        PhaseExpr::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &PhaseExpr {
    type Output = PhaseExpr;
    fn sub(self, rhs: &PhaseExpr) -> PhaseExpr {
        self + &(-rhs)
    }
}

impl Neg for &PhaseExpr {
    type Output = PhaseExpr;
    fn neg(self) -> PhaseExpr {
        PhaseExpr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &PhaseExpr {
    type Output = PhaseExpr;
    fn mul(self, rhs: &PhaseExpr) -> PhaseExpr {
        if self.is_zero() || rhs.is_zero() {
            return PhaseExpr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return PhaseExpr::from_poly(&self.num * &rhs.num);
        }
        PhaseExpr::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero; use [`PhaseExpr::checked_div`] otherwise.
impl Div for &PhaseExpr {
    type Output = PhaseExpr;
    fn div(self, rhs: &PhaseExpr) -> PhaseExpr {
        self.checked_div(rhs).expect("division by the zero expression")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for PhaseExpr {
            type Output = PhaseExpr;
            fn $f(self, rhs: PhaseExpr) -> PhaseExpr {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for PhaseExpr {
    type Output = PhaseExpr;
    fn neg(self) -> PhaseExpr {
        -&self
    }
}

impl From<Var> for PhaseExpr {
    fn from(v: Var) -> Self {
        PhaseExpr::var(v)
    }
}

impl From<Poly> for PhaseExpr {
    fn from(p: Poly) -> Self {
        PhaseExpr::from_poly(p)
    }
}

impl From<i64> for PhaseExpr {
    fn from(n: i64) -> Self {
        PhaseExpr::int(n)
    }
}

impl Zero for PhaseExpr {
    fn zero() -> Self {
        PhaseExpr::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for PhaseExpr {
    fn one() -> Self {
        PhaseExpr::one()
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::expr_to_string(self))
    }
}

impl fmt::Debug for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseExpr({self})")
    }
}
