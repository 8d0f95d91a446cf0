//! Dirac's constraint algorithm: time derivatives of the constraints are
//! taken with the extended Hamiltonian until a derivative vanishes modulo
//! the constraints already found.

use thiserror::Error;

use super::bracket::poisson;
use super::expr::PhaseExpr;
use super::ideal::{Ideal, LexOrder};
use super::parse::parse_expr;
use super::poly::Poly;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("constraint chain did not close within {0} constraints")]
    TooLong(usize),
    #[error("time derivative {0} has a denominator that depends on phase-space variables")]
    NonPolynomial(String),
}

/// One link of the chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    /// `{C_{k-1}, H̃}` as computed (the primary constraint itself for `k = 1`).
    pub raw: PhaseExpr,
    /// Factor applied to `raw` to obtain the stored constraint.
    pub factor: PhaseExpr,
    /// `factor · raw`.
    pub constraint: PhaseExpr,
}

/// Ordered constraints `C₁ … C_n` produced by [`constraint_chain`], together
/// with the Hamiltonian that generated them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    hamiltonian: PhaseExpr,
    steps: Vec<ChainStep>,
    /// `{C_n, H̃}`, which closed the chain.
    closing: PhaseExpr,
}

impl ConstraintSet {
    pub fn hamiltonian(&self) -> &PhaseExpr {
        &self.hamiltonian
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn constraints(&self) -> impl Iterator<Item = &PhaseExpr> {
        self.steps.iter().map(|s| &s.constraint)
    }

    /// `C_{i+1}` (zero-based index).
    pub fn get(&self, i: usize) -> &PhaseExpr {
        &self.steps[i].constraint
    }

    /// The time derivative of the last constraint.
    pub fn closing_derivative(&self) -> &PhaseExpr {
        &self.closing
    }
}

/// Options for [`constraint_chain_with`].
#[derive(Clone, Debug)]
pub struct ChainOptions {
    pub max_len: usize,
    /// Factor applied to the k-th raw derivative; missing entries mean 1.
    pub rescale: Vec<PhaseExpr>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            max_len: 8,
            rescale: Vec::new(),
        }
    }
}

impl ChainOptions {
    /// The normalization that yields `C₃ = xⁱpᵢ` and
    /// `C₄ = H̃ + 2λC₂ + λa²`: `C₃ = −(m/2)Ċ₂`, `C₄ = ½Ċ₃`.
    pub fn hyperboloid() -> Self {
        ChainOptions {
            max_len: 8,
            rescale: vec![
                PhaseExpr::one(),
                PhaseExpr::one(),
                parse_expr("-m/2").unwrap(),
                PhaseExpr::rational(1, 2),
            ],
        }
    }
}

/// `H̃ = (p_x² + p_y² − p_z²)/(2m) + λ(x² + y² − z² + a²)`.
pub fn extended_hamiltonian() -> PhaseExpr {
    parse_expr("(p_x^2 + p_y^2 - p_z^2)/(2*m) + lambda*(x^2 + y^2 - z^2 + a^2)").unwrap()
}

/// Runs the chain from the primary constraint `p_λ` with the hyperboloid
/// normalization.
pub fn constraint_chain(h_tilde: &PhaseExpr) -> Result<ConstraintSet, ChainError> {
    constraint_chain_with(
        h_tilde,
        &PhaseExpr::var(super::poly::Var::PLambda),
        &ChainOptions::hyperboloid(),
    )
}

pub fn constraint_chain_with(
    h_tilde: &PhaseExpr,
    primary: &PhaseExpr,
    opts: &ChainOptions,
) -> Result<ConstraintSet, ChainError> {
    let factor_for = |k: usize| opts.rescale.get(k).cloned().unwrap_or_else(PhaseExpr::one);
    let mut steps = vec![ChainStep {
        raw: primary.clone(),
        factor: factor_for(0),
        constraint: &factor_for(0) * primary,
    }];
    loop {
        let last = &steps.last().unwrap().constraint;
        let next = poisson(last, h_tilde);
        let ideal = Ideal::new(
            &steps
                .iter()
                .map(|s| cleared(&s.constraint))
                .collect::<Result<Vec<_>, _>>()?,
            LexOrder::elimination(),
        );
        if next.is_zero() || ideal.contains(&cleared(&next)?) {
            return Ok(ConstraintSet {
                hamiltonian: h_tilde.clone(),
                steps,
                closing: next,
            });
        }
        if steps.len() >= opts.max_len {
            return Err(ChainError::TooLong(opts.max_len));
        }
        let factor = factor_for(steps.len());
        steps.push(ChainStep {
            constraint: &factor * &next,
            factor,
            raw: next,
        });
    }
}

/// Numerator of a constraint whose denominator only involves parameters.
fn cleared(e: &PhaseExpr) -> Result<Poly, ChainError> {
    if e.denom().vars().iter().any(|v| !v.is_parameter()) {
        return Err(ChainError::NonPolynomial(e.to_string()));
    }
    Ok(e.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> PhaseExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn four_constraints() {
        let h = extended_hamiltonian();
        let cs = constraint_chain(&h).unwrap();
        assert_eq!(cs.len(), 4);
        assert_eq!(cs.get(0), &e("p_lambda"));
        assert_eq!(cs.get(1), &e("z^2 - x^2 - y^2 - a^2"));
        assert_eq!(cs.get(2), &e("x*p_x + y*p_y + z*p_z"));
        let c2 = cs.get(1).clone();
        let c4 = &(&h + &(&e("2*lambda") * &c2)) + &e("lambda*a^2");
        assert_eq!(cs.get(3), &c4);
    }

    #[test]
    fn raw_derivatives_and_closing() {
        let h = extended_hamiltonian();
        let cs = constraint_chain(&h).unwrap();
        let c3 = cs.get(2);
        // Ċ₂ = −(2/m)C₃, so −m·Ċ₂ = 2C₃.
        assert_eq!(cs.steps()[2].raw, &e("-2/m") * c3);
        assert_eq!(&e("-m") * &cs.steps()[2].raw, &PhaseExpr::int(2) * c3);
        // Ċ₄ = 2λĊ₂ = −(4λ/m)C₃.
        let d2 = poisson(cs.get(1), &h);
        assert_eq!(cs.closing_derivative(), &(&e("2*lambda") * &d2));
        assert_eq!(cs.closing_derivative(), &(&e("-4*lambda/m") * c3));
    }

    #[test]
    fn runaway_chain_is_capped() {
        // Each derivative is Σ kⁿ v_k, independent of the previous ones until
        // all four variables are used up.
        let h = e("lambda*p_lambda + 2*x*p_x + 3*y*p_y + 4*z*p_z");
        let primary = e("lambda + x + y + z");
        let opts = ChainOptions {
            max_len: 3,
            rescale: vec![],
        };
        let err = constraint_chain_with(&h, &primary, &opts).unwrap_err();
        assert_eq!(err, ChainError::TooLong(3));
        let cs = constraint_chain_with(&h, &primary, &ChainOptions::default()).unwrap();
        assert_eq!(cs.len(), 4);
    }
}
