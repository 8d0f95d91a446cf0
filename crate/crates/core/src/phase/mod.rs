//! Exact symbolic phase-space calculus for a particle on the hyperboloid
//! `x² + y² − z² = −a²`.
//!
//! Expressions are rational functions over ℚ in the phase-space variables
//! `λ, x, y, z, p_λ, p_x, p_y, p_z` and the parameters `a, m`.

mod bracket;
mod constraints;
mod dirac;
mod expr;
mod gcd;
mod ideal;
mod matrix;
mod parse;
pub mod poly;
mod print;
mod shell;

pub use bracket::poisson;
pub use constraints::{
    constraint_chain, constraint_chain_with, extended_hamiltonian, ChainError, ChainOptions,
    ChainStep, ConstraintSet,
};
pub use dirac::{
    angular_momentum, angular_momentum_lower, casimirs, coord, coord_lower, dirac_bracket,
    epsilon_lower, epsilon_upper, momentum, verify_iso12, Conventions, DiracContext,
    IdentityCheck, Iso12Report, METRIC,
};
pub use expr::PhaseExpr;
pub use gcd::{exact_div, gcd};
pub use ideal::{Ideal, LexOrder};
pub use matrix::{bracket_matrix, invert_matrix, BracketMatrix, ExprMatrix, MatrixError};
pub use parse::{parse_expr, ParseError, ParseErrorKind};
pub use poly::{Monomial, Poly, Var};
pub use shell::{reduce_on_shell, Shell, ShellError};
