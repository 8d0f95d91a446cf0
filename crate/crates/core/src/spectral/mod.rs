//! Quantum particle on the hyperboloid: conical-function eigenfunctions and
//! the ISO(1,2) generators as operators on a (θ, φ) grid.

mod conical;
mod gamma;
mod grid;
mod operators;
mod quadrature;

use num_complex::Complex64;
use thiserror::Error;

pub use conical::{
    conical_p0, conical_p1, conical_pn, laplace_integral, validate_order_convention, Recurrence, N_MAX,
};
pub use gamma::{gamma, ln_gamma, ComplexGamma};
pub use grid::{Grid, GridFunction};
pub use operators::{
    apply_j, apply_j_with, apply_p, apply_p_with, apply_x, casimir_xj, closure_residual, embedding,
    hamiltonian_via_j, killing_components, killing_derivative, laplace_beltrami, laplacian,
    GeneratorPhase,
};
pub use quadrature::GaussLegendre;

use std::sync::Arc;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectralError {
    #[error("order {n} outside |n| <= {max}")]
    OrderOutOfRange { n: i32, max: i32 },
    #[error("theta must be positive, got {0}")]
    ThetaNotPositive(f64),
    #[error("lambda must be finite and >= 0, got {0}")]
    BadLambda(f64),
    #[error("normalization diverges at lambda = 0")]
    ZeroLambda,
    #[error(
        "order recurrence disagrees with quadrature at n = {n}, lambda = {lambda}, theta = {theta}: \
         {recurrence} vs {quadrature}"
    )]
    ConventionMismatch {
        n: i32,
        lambda: f64,
        theta: f64,
        recurrence: f64,
        quadrature: f64,
    },
    #[error("mode n = {n} not resolved by {n_phi} phi points")]
    Unresolved { n: i32, n_phi: usize },
    #[error("bad grid: {0}")]
    BadGrid(String),
}

/// Physical constants for the quantum problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub m: f64,
    pub a: f64,
}

impl Default for Units {
    fn default() -> Self {
        Units { hbar: 1.0, m: 1.0, a: 1.0 }
    }
}

/// `E_λ = ħ²/(2ma²)(λ² + ¼)`.
pub fn energy(lambda: f64, u: &Units) -> f64 {
    u.hbar * u.hbar / (2.0 * u.m * u.a * u.a) * (lambda * lambda + 0.25)
}

/// `N^n_λ = √(2π/(λ tanh πλ)) Γ(iλ+½)/Γ(iλ+n+½)`.
///
/// Only `n ≥ 0` has been checked against the eigenfunction normalization;
/// for negative `n` the same formula is evaluated as written.
pub fn normalization(lambda: f64, n: i32) -> Result<Complex64, SpectralError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(SpectralError::BadLambda(lambda));
    }
    if lambda == 0.0 {
        return Err(SpectralError::ZeroLambda);
    }
    let pre = (std::f64::consts::TAU / (lambda * (std::f64::consts::PI * lambda).tanh())).sqrt();
    let z = Complex64::new(0.5, lambda);
    let ratio = (ln_gamma(z) - ln_gamma(z + n as f64)).exp();
    Ok(ratio * pre)
}

/// Energy eigenfunction label `(λ, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMode {
    pub lambda: f64,
    pub n: i32,
}

impl SpectralMode {
    pub fn new(lambda: f64, n: i32) -> Result<Self, SpectralError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(SpectralError::BadLambda(lambda));
        }
        if n.abs() > N_MAX {
            return Err(SpectralError::OrderOutOfRange { n, max: N_MAX });
        }
        Ok(SpectralMode { lambda, n })
    }

    pub fn normalization(&self) -> Result<Complex64, SpectralError> {
        normalization(self.lambda, self.n)
    }

    pub fn energy(&self, u: &Units) -> f64 {
        energy(self.lambda, u)
    }

    /// Radial profile `|N| P^n(cosh θ)`, or `P^n` alone when `normalized` is
    /// false.
    pub fn radial(&self, theta: f64, normalized: bool) -> Result<f64, SpectralError> {
        let p = conical_pn(self.lambda, self.n, theta)?;
        Ok(if normalized { self.normalization()?.norm() * p } else { p })
    }

    /// `ψ^n_λ = |N^n_λ| e^{inφ} P^n_{−½+iλ}(cosh θ)` on the grid.
    pub fn sample(&self, grid: &Arc<Grid>, normalized: bool) -> Result<GridFunction, SpectralError> {
        if self.n.abs() > grid.max_mode() {
            return Err(SpectralError::Unresolved { n: self.n, n_phi: grid.n_phi() });
        }
        let scale = if normalized { self.normalization()?.norm() } else { 1.0 };
        let radial: Vec<f64> = (0..grid.n_theta())
            .map(|i| conical_pn(self.lambda, self.n, grid.theta(i)).map(|p| p * scale))
            .collect::<Result<_, _>>()?;
        let h = grid.h();
        let t0 = grid.theta(0);
        Ok(GridFunction::separable(grid, self.n, |t| {
            radial[((t - t0) / h).round() as usize]
        }))
    }

    /// `‖Ĥψ − E_λψ‖/‖ψ‖` over the interior rows.
    pub fn eigen_residual(&self, grid: &Arc<Grid>, u: &Units) -> Result<f64, SpectralError> {
        let psi = self.sample(grid, false)?;
        let r = laplace_beltrami(&psi, u).sub(&psi.scale(self.energy(u).into()));
        Ok(r.interior_norm() / psi.interior_norm())
    }
}

/// Discrete inner product `⟨ψ₁, ψ₂⟩` of two modes, normalized where λ > 0.
pub fn mode_overlap(m1: &SpectralMode, m2: &SpectralMode, grid: &Arc<Grid>) -> Result<Complex64, SpectralError> {
    let a = m1.sample(grid, m1.lambda > 0.0)?;
    let b = m2.sample(grid, m2.lambda > 0.0)?;
    Ok(a.inner(&b))
}
