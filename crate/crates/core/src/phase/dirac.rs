//! Dirac brackets and the ISO(1,2) structure they induce on the surface.

use std::sync::OnceLock;

use super::bracket::poisson;
use super::constraints::{constraint_chain, extended_hamiltonian, ConstraintSet};
use super::expr::PhaseExpr;
use super::matrix::{BracketMatrix, MatrixError};
use super::poly::Var;
use super::shell::Shell;

/// Constraint set, its on-shell reducer and bracket matrix, bundled so that
/// repeated brackets share the setup.
#[derive(Clone, Debug)]
pub struct DiracContext {
    constraints: ConstraintSet,
    shell: Shell,
    matrix: BracketMatrix,
}

impl DiracContext {
    pub fn new(constraints: ConstraintSet) -> Result<Self, MatrixError> {
        let shell = Shell::from_constraints(&constraints)?;
        let matrix = BracketMatrix::with_shell(&constraints, &shell)?;
        Ok(DiracContext {
            constraints,
            shell,
            matrix,
        })
    }

    pub fn hyperboloid() -> &'static DiracContext {
        static CTX: OnceLock<DiracContext> = OnceLock::new();
        CTX.get_or_init(|| {
            let cs = constraint_chain(&extended_hamiltonian()).expect("hyperboloid chain closes");
            DiracContext::new(cs).expect("hyperboloid constraints are second class")
        })
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn shell(&self) -> &Shell {
        &self.shell
    }

    pub fn matrix(&self) -> &BracketMatrix {
        &self.matrix
    }

    pub fn reduce(&self, e: &PhaseExpr) -> PhaseExpr {
        self.shell.reduce(e)
    }

    /// `{A,B}_M = {A,B} − {A,C_i} M⁻¹_ij {C_j,B}`, reduced on shell.
    pub fn bracket(&self, a: &PhaseExpr, b: &PhaseExpr) -> PhaseExpr {
        let c: Vec<&PhaseExpr> = self.constraints.constraints().collect();
        let ac: Vec<PhaseExpr> = c.iter().map(|ci| self.reduce(&poisson(a, ci))).collect();
        let cb: Vec<PhaseExpr> = c.iter().map(|cj| self.reduce(&poisson(cj, b))).collect();
        let inv = &self.matrix.inverse;
        let mut acc = poisson(a, b);
        for (i, aci) in ac.iter().enumerate() {
            if aci.is_zero() {
                continue;
            }
            for (j, cbj) in cb.iter().enumerate() {
                let mij = &inv[(i, j)];
                if cbj.is_zero() || mij.is_zero() {
                    continue;
                }
                acc = &acc - &(&(aci * mij) * cbj);
            }
        }
        self.reduce(&acc)
    }
}

/// One-shot Dirac bracket for an arbitrary second-class constraint set.
pub fn dirac_bracket(
    a: &PhaseExpr,
    b: &PhaseExpr,
    cs: &ConstraintSet,
) -> Result<PhaseExpr, MatrixError> {
    Ok(DiracContext::new(cs.clone())?.bracket(a, b))
}

/// Minkowski metric `diag(1, 1, −1)` on the ambient `(x, y, z)`.
pub const METRIC: [i64; 3] = [1, 1, -1];

/// `ε_{ijk}` with `ε_{123} = 1`.
pub fn epsilon_lower(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `ε^{ijk}`: one index of `ε_{ijk}` raised by `−1`, so `ε^{123} = −1`.
pub fn epsilon_upper(i: usize, j: usize, k: usize) -> i64 {
    -epsilon_lower(i, j, k)
}

/// `xⁱ`.
pub fn coord(i: usize) -> PhaseExpr {
    PhaseExpr::var(Var::COORDS[i])
}

/// `x_i = g_ij xʲ`.
pub fn coord_lower(i: usize) -> PhaseExpr {
    PhaseExpr::int(METRIC[i]) * coord(i)
}

/// `p_i`, the canonical momentum.
pub fn momentum(i: usize) -> PhaseExpr {
    PhaseExpr::var(Var::MOMENTA[i])
}

/// `Jⁱ = −ε^{ijk} x_j p_k`.
///
/// `J¹ = y p_z + z p_y`, `J² = −z p_x − x p_z`, `J³ = x p_y − y p_x`.
pub fn angular_momentum(i: usize) -> PhaseExpr {
    let mut acc = PhaseExpr::zero();
    for j in 0..3 {
        for k in 0..3 {
            let e = epsilon_upper(i, j, k);
            if e != 0 {
                acc = &acc - &(PhaseExpr::int(e) * (&coord_lower(j) * &momentum(k)));
            }
        }
    }
    acc
}

/// `J_i = g_ij Jʲ`.
pub fn angular_momentum_lower(i: usize) -> PhaseExpr {
    PhaseExpr::int(METRIC[i]) * angular_momentum(i)
}

/// `x·x = xⁱx_i` and `x·J = xⁱJ_i`.
pub fn casimirs() -> [PhaseExpr; 2] {
    let mut xx = PhaseExpr::zero();
    let mut xj = PhaseExpr::zero();
    for i in 0..3 {
        xx = &xx + &(&coord(i) * &coord_lower(i));
        xj = &xj + &(&coord(i) * &angular_momentum_lower(i));
    }
    [xx, xj]
}

/// A computed bracket compared with its expected value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub computed: PhaseExpr,
    pub expected: PhaseExpr,
    /// `computed − expected` reduced on shell.
    pub residual: PhaseExpr,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Sign conventions used for the expected structure constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conventions {
    /// Multiplies `ε^{ijk}` in the expected right-hand sides. `1` is correct;
    /// `-1` injects a sign fault.
    pub epsilon_sign: i64,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions { epsilon_sign: 1 }
    }
}

const LABELS: [&str; 3] = ["1", "2", "3"];

impl DiracContext {
    fn check(&self, name: String, a: &PhaseExpr, b: &PhaseExpr, expected: PhaseExpr) -> IdentityCheck {
        let computed = self.bracket(a, b);
        let residual = self.reduce(&(&computed - &expected));
        IdentityCheck {
            name,
            computed,
            expected,
            residual,
        }
    }

    /// `{xⁱ, xʲ}`, `{xⁱ, p_j}` and `{p_i, p_j}` against their closed forms.
    pub fn canonical_table(&self) -> Vec<IdentityCheck> {
        let a2 = PhaseExpr::var(Var::A).pow(2).unwrap();
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                out.push(self.check(
                    format!("{{x{},x{}}}", LABELS[i], LABELS[j]),
                    &coord(i),
                    &coord(j),
                    PhaseExpr::zero(),
                ));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { PhaseExpr::one() } else { PhaseExpr::zero() };
                let expected = &delta + &(&(&coord(i) * &coord_lower(j)) / &a2);
                out.push(self.check(
                    format!("{{x{},p{}}}", LABELS[i], LABELS[j]),
                    &coord(i),
                    &momentum(j),
                    expected,
                ));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let expected =
                    &(&(&coord_lower(i) * &momentum(j)) - &(&coord_lower(j) * &momentum(i))) / &a2;
                out.push(self.check(
                    format!("{{p{},p{}}}", LABELS[i], LABELS[j]),
                    &momentum(i),
                    &momentum(j),
                    expected,
                ));
            }
        }
        out
    }

    /// The ISO(1,2) identities: `{Jⁱ,xʲ} = −ε^{ijk}x_k`,
    /// `{Jⁱ,Jʲ} = −ε^{ijk}J_k`, `{xⁱ,xʲ} = 0`, vanishing brackets of both
    /// Casimirs, and recovery of `p_i` from `x` and `J`.
    pub fn verify_iso12(&self, conv: Conventions) -> Iso12Report {
        let eps = |i, j, k| conv.epsilon_sign * epsilon_upper(i, j, k);
        let mut checks = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                checks.push(self.check(
                    format!("{{x{},x{}}}", LABELS[i], LABELS[j]),
                    &coord(i),
                    &coord(j),
                    PhaseExpr::zero(),
                ));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let expected = (0..3).fold(PhaseExpr::zero(), |acc, k| {
                    &acc - &(PhaseExpr::int(eps(i, j, k)) * coord_lower(k))
                });
                checks.push(self.check(
                    format!("{{J{},x{}}}", LABELS[i], LABELS[j]),
                    &angular_momentum(i),
                    &coord(j),
                    expected,
                ));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let expected = (0..3).fold(PhaseExpr::zero(), |acc, k| {
                    &acc - &(PhaseExpr::int(eps(i, j, k)) * angular_momentum_lower(k))
                });
                checks.push(self.check(
                    format!("{{J{},J{}}}", LABELS[i], LABELS[j]),
                    &angular_momentum(i),
                    &angular_momentum(j),
                    expected,
                ));
            }
        }
        let [xx, xj] = casimirs();
        for (cname, c) in [("x.x", &xx), ("x.J", &xj)] {
            for i in 0..3 {
                checks.push(self.check(
                    format!("{{{cname},x{}}}", LABELS[i]),
                    c,
                    &coord(i),
                    PhaseExpr::zero(),
                ));
                checks.push(self.check(
                    format!("{{{cname},J{}}}", LABELS[i]),
                    c,
                    &angular_momentum(i),
                    PhaseExpr::zero(),
                ));
            }
        }
        // p_i = (1/a²) ε_{ijk} xʲ Jᵏ on shell.
        let a2 = PhaseExpr::var(Var::A).pow(2).unwrap();
        for i in 0..3 {
            let mut rec = PhaseExpr::zero();
            for j in 0..3 {
                for k in 0..3 {
                    let e = conv.epsilon_sign * epsilon_lower(i, j, k);
                    if e != 0 {
                        rec = &rec + &(PhaseExpr::int(e) * (&coord(j) * &angular_momentum(k)));
                    }
                }
            }
            let expected = &rec / &a2;
            let computed = self.reduce(&momentum(i));
            let residual = self.reduce(&(&computed - &expected));
            checks.push(IdentityCheck {
                name: format!("p{} recovery", LABELS[i]),
                computed,
                expected,
                residual,
            });
        }
        Iso12Report { checks }
    }
}

/// Outcome of [`DiracContext::verify_iso12`].
#[derive(Clone, Debug)]
pub struct Iso12Report {
    pub checks: Vec<IdentityCheck>,
}

impl Iso12Report {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(IdentityCheck::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }
}

/// ISO(1,2) verification on the hyperboloid with correct conventions.
pub fn verify_iso12() -> Iso12Report {
    DiracContext::hyperboloid().verify_iso12(Conventions::default())
}
