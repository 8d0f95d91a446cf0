use super::expr::PhaseExpr;
use super::poly::Var;

/// Canonical Poisson bracket over the pairs `(λ, p_λ)`, `(x, p_x)`,
/// `(y, p_y)`, `(z, p_z)`:
/// `{f, g} = Σ ∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q`.
pub fn poisson(f: &PhaseExpr, g: &PhaseExpr) -> PhaseExpr {
    let mut acc = PhaseExpr::zero();
    for (q, p) in Var::CANONICAL_PAIRS {
        if !(f.contains(q) || f.contains(p)) || !(g.contains(q) || g.contains(p)) {
            continue;
        }
        let t1 = &f.derivative(q) * &g.derivative(p);
        let t2 = &f.derivative(p) * &g.derivative(q);
        acc = &acc + &(&t1 - &t2);
    }
    acc
}
