//! On-shell reduction. Multiplier variables are solved from the constraints
//! that are linear in them; the remaining constraints generate an ideal whose
//! normal form gives a canonical representative on the constraint surface.

use std::sync::OnceLock;

use thiserror::Error;

use super::constraints::{constraint_chain, extended_hamiltonian, ConstraintSet};
use super::expr::PhaseExpr;
use super::ideal::{Ideal, LexOrder};
use super::poly::{Poly, Var};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ShellError {
    #[error("no constraint is linear in {0} with a coefficient that survives on shell")]
    Unsolvable(Var),
}

/// Reducer for one constraint set.
#[derive(Clone, Debug)]
pub struct Shell {
    surface: Ideal,
    /// Substitutions applied in order before taking the normal form.
    solved: Vec<(Var, PhaseExpr)>,
}

const MULTIPLIERS: [Var; 2] = [Var::PLambda, Var::Lambda];

impl Shell {
    pub fn from_constraints(cs: &ConstraintSet) -> Result<Shell, ShellError> {
        let free = |c: &PhaseExpr| MULTIPLIERS.iter().all(|&v| !c.contains(v));
        let surface_gens: Vec<Poly> = cs
            .constraints()
            .filter(|c| free(c))
            .map(|c| c.numer().clone())
            .collect();
        let mut shell = Shell {
            surface: Ideal::new(&surface_gens, LexOrder::elimination()),
            solved: Vec::new(),
        };
        for v in MULTIPLIERS {
            if !cs.constraints().any(|c| c.contains(v)) {
                continue;
            }
            let value = cs
                .constraints()
                .find_map(|c| shell.solve_linear(&shell.substitute(c), v))
                .ok_or(ShellError::Unsolvable(v))?;
            shell.solved.push((v, value));
        }
        Ok(shell)
    }

    /// The reducer for the hyperboloid constraint set.
    pub fn hyperboloid() -> &'static Shell {
        static SHELL: OnceLock<Shell> = OnceLock::new();
        SHELL.get_or_init(|| {
            let cs = constraint_chain(&extended_hamiltonian()).expect("hyperboloid chain closes");
            Shell::from_constraints(&cs).expect("hyperboloid multipliers are solvable")
        })
    }

    pub fn surface(&self) -> &Ideal {
        &self.surface
    }

    /// Solved multipliers, e.g. `λ = −(p_x² + p_y² − p_z²)/(2ma²)`.
    pub fn solutions(&self) -> &[(Var, PhaseExpr)] {
        &self.solved
    }

    /// Canonical on-shell representative of `e`.
    ///
    /// Panics if the denominator of `e` vanishes on the constraint surface.
    pub fn reduce(&self, e: &PhaseExpr) -> PhaseExpr {
        let e = self.substitute(e);
        let num = self.surface.normal_form(e.numer());
        let den = self.surface.normal_form(e.denom());
        PhaseExpr::ratio(num, den).expect("denominator vanishes on the constraint surface")
    }

    fn substitute(&self, e: &PhaseExpr) -> PhaseExpr {
        self.solved
            .iter()
            .fold(e.clone(), |acc, (v, val)| acc.substitute(*v, val))
    }

    /// `c = A + vB` with `A, B` free of `v` and `B` nonzero on shell gives
    /// `v = −A/B`.
    fn solve_linear(&self, c: &PhaseExpr, v: Var) -> Option<PhaseExpr> {
        if c.numer().degree_in(v) != 1 || c.denom().contains(v) {
            return None;
        }
        let a = self.surface.normal_form(&c.numer().coeff_in(v, 0));
        let b = self.surface.normal_form(&c.numer().coeff_in(v, 1));
        let sol = PhaseExpr::ratio(-a, b)?;
        Some(self.reduce_solution(sol))
    }

    fn reduce_solution(&self, sol: PhaseExpr) -> PhaseExpr {
        let num = self.surface.normal_form(sol.numer());
        let den = self.surface.normal_form(sol.denom());
        PhaseExpr::ratio(num, den).unwrap_or(sol)
    }
}

/// Reduces `e` on the hyperboloid constraint surface. Idempotent, and equal
/// expressions on the surface reduce to the same form.
pub fn reduce_on_shell(e: &PhaseExpr) -> PhaseExpr {
    Shell::hyperboloid().reduce(e)
}
