//! The on-shell matrix of constraint brackets and its exact inverse.

use std::fmt;
use std::ops::Index;

use thiserror::Error;

use super::bracket::poisson;
use super::constraints::ConstraintSet;
use super::expr::PhaseExpr;
use super::gcd::{exact_div, gcd};
use super::poly::Poly;
use super::shell::{Shell, ShellError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("constraint bracket matrix is singular on shell; second-class assumption fails")]
    Singular,
    #[error(transparent)]
    Shell(#[from] ShellError),
}

/// Dense square matrix of rational functions.
#[derive(Clone, PartialEq, Eq)]
pub struct ExprMatrix {
    n: usize,
    data: Vec<PhaseExpr>,
}

impl ExprMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> PhaseExpr) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ExprMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { PhaseExpr::one() } else { PhaseExpr::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[PhaseExpr] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            (0..self.n).fold(PhaseExpr::zero(), |acc, k| {
                &acc + &(&self[(i, k)] * &other[(k, j)])
            })
        })
    }

    pub fn map(&self, f: impl Fn(&PhaseExpr) -> PhaseExpr) -> ExprMatrix {
        ExprMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self[(i, j)] == -&self[(j, i)]))
    }

    /// Exact inverse by fraction-free Gauss–Jordan elimination on the
    /// polynomial matrix obtained by clearing all denominators.
    pub fn inverse(&self) -> Result<ExprMatrix, MatrixError> {
        let n = self.n;
        let l = self
            .data
            .iter()
            .fold(Poly::one(), |acc, e| poly_lcm(&acc, e.denom()));
        let lexpr = PhaseExpr::from_poly(l.clone());
        // Augmented [L·M | I].
        let mut a: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                let mut row: Vec<Poly> = (0..n)
                    .map(|j| {
                        let e = &self[(i, j)];
                        &exact_div(&l, e.denom()).expect("lcm is a multiple") * e.numer()
                    })
                    .collect();
                row.extend((0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }));
                row
            })
            .collect();
        let mut prev = Poly::one();
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(MatrixError::Singular)?;
            a.swap(k, p);
            for i in 0..n {
                if i == k {
                    continue;
                }
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let t = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = exact_div(&t, &prev).expect("Bareiss step divides exactly");
                }
                a[i][k] = Poly::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(Self::from_fn(n, |i, j| {
            let e = PhaseExpr::ratio(a[i][n + j].clone(), a[i][i].clone()).expect("nonzero pivot");
            &e * &lexpr
        }))
    }
}

impl Index<(usize, usize)> for ExprMatrix {
    type Output = PhaseExpr;
    fn index(&self, (i, j): (usize, usize)) -> &PhaseExpr {
        &self.data[i * self.n + j]
    }
}

impl fmt::Debug for ExprMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| self.row(i).iter().map(|e| e.to_string()).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

fn poly_lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_one() {
        return b.clone();
    }
    let g = gcd(a, b);
    &exact_div(a, &g).expect("gcd divides") * b
}

/// `M_ij = {C_i, C_j}` evaluated on shell, with its exact inverse. The
/// inverse is not reduced further, so `m · inverse = 1` holds as an identity
/// of rational functions.
#[derive(Clone, Debug)]
pub struct BracketMatrix {
    pub m: ExprMatrix,
    pub inverse: ExprMatrix,
}

impl BracketMatrix {
    pub fn new(cs: &ConstraintSet) -> Result<Self, MatrixError> {
        let shell = Shell::from_constraints(cs)?;
        Self::with_shell(cs, &shell)
    }

    pub fn with_shell(cs: &ConstraintSet, shell: &Shell) -> Result<Self, MatrixError> {
        let c: Vec<&PhaseExpr> = cs.constraints().collect();
        let m = ExprMatrix::from_fn(c.len(), |i, j| shell.reduce(&poisson(c[i], c[j])));
        let inverse = m.inverse()?;
        Ok(BracketMatrix { m, inverse })
    }
}

pub fn bracket_matrix(cs: &ConstraintSet) -> Result<BracketMatrix, MatrixError> {
    BracketMatrix::new(cs)
}

pub fn invert_matrix(m: &ExprMatrix) -> Result<ExprMatrix, MatrixError> {
    m.inverse()
}
