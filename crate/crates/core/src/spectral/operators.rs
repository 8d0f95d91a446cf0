//! Grid operators: the Laplace–Beltrami Hamiltonian, the generators Ĵⁱ, and
//! the hermitian momenta p̂_i.
//!
//! θ-derivatives use central differences with zero ghost values past the
//! first and last rows (Dirichlet truncation), φ-derivatives are spectral.
//! With these choices the Hamiltonian and the generators are exactly
//! hermitian as matrices under the weighted inner product.

use num_complex::Complex64;

use super::grid::GridFunction;
use super::Units;
use crate::geometry::{levi_civita, METRIC};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Central θ-difference of each column.
fn d_theta(f: &GridFunction) -> GridFunction {
    let g = f.grid().clone();
    let (nt, np) = (g.n_theta(), g.n_phi());
    let inv = 1.0 / (2.0 * g.h());
    let v = f.values();
    let mut out = GridFunction::zeros(&g);
    let o = out.data_mut();
    for i in 0..nt {
        for j in 0..np {
            let up = if i + 1 < nt { v[(i + 1) * np + j] } else { Complex64::default() };
            let dn = if i > 0 { v[(i - 1) * np + j] } else { Complex64::default() };
            o[i * np + j] = (up - dn) * inv;
        }
    }
    out
}

fn d_phi(f: &GridFunction, k: u32) -> GridFunction {
    let mut out = f.clone();
    let g = f.grid().clone();
    g.phi_derivative(out.data_mut(), k);
    out
}

/// `(1/sinh θ) ∂θ(sinh θ ∂θ f) + (1/sinh² θ) ∂φ² f`, conservative stencil.
pub fn laplacian(f: &GridFunction) -> GridFunction {
    let g = f.grid().clone();
    let (nt, np, h) = (g.n_theta(), g.n_phi(), g.h());
    let v = f.values();
    let mut out = d_phi(f, 2);
    let o = out.data_mut();
    for i in 0..nt {
        let t = g.theta(i);
        let (sp, sm, s) = ((t + 0.5 * h).sinh(), (t - 0.5 * h).sinh(), t.sinh());
        for j in 0..np {
            let c = v[i * np + j];
            let up = if i + 1 < nt { v[(i + 1) * np + j] } else { Complex64::default() };
            let dn = if i > 0 { v[(i - 1) * np + j] } else { Complex64::default() };
            let radial = (sp * (up - c) - sm * (c - dn)) / (s * h * h);
            o[i * np + j] = radial + o[i * np + j] / (s * s);
        }
    }
    out
}

/// `Ĥ = −ħ²/(2ma²) Δ`.
pub fn laplace_beltrami(f: &GridFunction, u: &Units) -> GridFunction {
    laplacian(f).scale((-u.hbar * u.hbar / (2.0 * u.m * u.a * u.a)).into())
}

/// Components `(K^θ, K^φ)` of the Killing field `K_(i)`.
pub fn killing_components(i: usize, theta: f64, phi: f64) -> (f64, f64) {
    let coth = 1.0 / theta.tanh();
    match i {
        1 => (phi.sin(), phi.cos() * coth),
        2 => (-phi.cos(), phi.sin() * coth),
        3 => (0.0, 1.0),
        _ => panic!("generator index must be 1, 2 or 3, got {i}"),
    }
}

/// `K_(i) f` in the skew-symmetric split form
/// `½[K·∇f + (1/sinh θ) ∇·(sinh θ K f)]`.
pub fn killing_derivative(i: usize, f: &GridFunction) -> GridFunction {
    if i == 3 {
        return d_phi(f, 1);
    }
    let kt = |t: f64, p: f64| Complex64::from(killing_components(i, t, p).0);
    let kp = |t: f64, p: f64| Complex64::from(killing_components(i, t, p).1);
    let a = d_theta(f).mul_fn(kt);
    let b = d_theta(&f.mul_fn(|t, p| kt(t, p) * t.sinh())).mul_fn(|t, _| (1.0 / t.sinh()).into());
    let c = d_phi(f, 1).mul_fn(kp);
    let d = d_phi(&f.mul_fn(kp), 1);
    a.add(&b).add(&c).add(&d).scale(0.5.into())
}

/// Phase convention for the generators: `Ĵⁱ = s·iħ K_(i)`.
///
/// `s = −1` is the one for which `[Ĵⁱ, Ĵʲ] = −iħ ε^{ijk} Ĵ_k`; with these
/// Killing fields `[K_(1), K_(2)] = +K_(3)`, so `s = +1` closes with the
/// opposite sign. `s = +1` is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorPhase(pub f64);

impl Default for GeneratorPhase {
    fn default() -> Self {
        GeneratorPhase(-1.0)
    }
}

/// `Ĵⁱ f = −iħ K_(i) f`. In particular `Ĵ³ e^{inφ} = nħ e^{inφ}`.
pub fn apply_j(i: usize, f: &GridFunction, hbar: f64) -> GridFunction {
    apply_j_with(i, f, hbar, GeneratorPhase::default())
}

pub fn apply_j_with(i: usize, f: &GridFunction, hbar: f64, phase: GeneratorPhase) -> GridFunction {
    killing_derivative(i, f).scale(I * hbar * phase.0)
}

/// Embedding coordinate `xⁱ(θ, φ)` on the radius-`a` hyperboloid.
pub fn embedding(i: usize, a: f64, theta: f64, phi: f64) -> f64 {
    match i {
        1 => a * phi.cos() * theta.sinh(),
        2 => a * phi.sin() * theta.sinh(),
        3 => a * theta.cosh(),
        _ => panic!("coordinate index must be 1, 2 or 3, got {i}"),
    }
}

/// Multiplication by `xⁱ`.
pub fn apply_x(i: usize, f: &GridFunction, a: f64) -> GridFunction {
    f.mul_fn(|t, p| embedding(i, a, t, p).into())
}

/// `p̂_i f = (1/a²) ε_{ijk} x̂ʲ Ĵᵏ f − (iħ/a²) x̂_i f`.
pub fn apply_p(i: usize, f: &GridFunction, u: &Units) -> GridFunction {
    apply_p_with(i, f, u, true)
}

/// `apply_p` with the ordering correction optionally left out, in which case
/// the result is not hermitian.
pub fn apply_p_with(i: usize, f: &GridFunction, u: &Units, ordering_term: bool) -> GridFunction {
    let mut out = GridFunction::zeros(f.grid());
    for k in 1..=3 {
        let jk = apply_j(k, f, u.hbar);
        for j in 1..=3 {
            let e = levi_civita(i - 1, j - 1, k - 1);
            if e != 0.0 {
                out = out.add(&apply_x(j, &jk, u.a).scale(e.into()));
            }
        }
    }
    if ordering_term {
        let xi = apply_x(i, f, u.a).scale((METRIC[i - 1]).into());
        out = out.sub(&xi.scale(I * u.hbar));
    }
    out.scale((1.0 / (u.a * u.a)).into())
}

/// `Ĵⁱ Ĵ_i f / (2ma²)`.
pub fn hamiltonian_via_j(f: &GridFunction, u: &Units) -> GridFunction {
    let mut out = GridFunction::zeros(f.grid());
    for i in 1..=3 {
        let jj = apply_j(i, &apply_j(i, f, u.hbar), u.hbar);
        out = out.add(&jj.scale(METRIC[i - 1].into()));
    }
    out.scale((1.0 / (2.0 * u.m * u.a * u.a)).into())
}

/// `x̂ʲ Ĵ_j f`, zero in the continuum.
pub fn casimir_xj(f: &GridFunction, u: &Units) -> GridFunction {
    let mut out = GridFunction::zeros(f.grid());
    for j in 1..=3 {
        let t = apply_x(j, &apply_j(j, f, u.hbar), u.a);
        out = out.add(&t.scale(METRIC[j - 1].into()));
    }
    out
}

/// `[Ĵⁱ, Ĵʲ] f + iħ ε^{ijk} Ĵ_k f` for the given phase convention.
pub fn closure_residual(i: usize, j: usize, f: &GridFunction, hbar: f64, phase: GeneratorPhase) -> GridFunction {
    let jf = |k: usize, g: &GridFunction| apply_j_with(k, g, hbar, phase);
    let mut out = jf(i, &jf(j, f)).sub(&jf(j, &jf(i, f)));
    for k in 1..=3 {
        // ε^{ijk} = −ε_{ijk}, J_k = η_kk Jᵏ
        let e = -levi_civita(i - 1, j - 1, k - 1);
        if e != 0.0 {
            out = out.add(&jf(k, f).scale(I * hbar * e * METRIC[k - 1]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;
    use std::sync::Arc;

    fn bump(grid: &Arc<Grid>) -> GridFunction {
        GridFunction::from_fn(grid, |t, p| {
            let g = (-((t - 1.2) / 0.15).powi(2)).exp();
            Complex64::from_polar(g, p) + Complex64::new(0.3 * g * (2.0 * p).cos(), 0.0)
        })
    }

    #[test]
    fn j3_eigenvalue_on_fourier_modes() {
        let g = Grid::new(0.2, 2.0, 0.01, 16).unwrap();
        for n in -3..=3 {
            let f = GridFunction::separable(&g, n, |t| t.cosh());
            let r = apply_j(3, &f, 0.7).sub(&f.scale((n as f64 * 0.7).into()));
            assert!(r.norm() < 1e-12 * f.norm().max(1.0), "n={n}");
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let g = Grid::new(0.2, 2.0, 0.01, 8).unwrap();
        let one = GridFunction::from_fn(&g, |_, _| 1.0.into());
        let l = laplacian(&one);
        for i in 1..g.n_theta() - 1 {
            assert!(l.row(i).iter().all(|v| v.norm() < 1e-9));
        }
    }

    #[test]
    fn generators_and_hamiltonian_are_hermitian() {
        let g = Grid::new(0.1, 3.0, 0.01, 16).unwrap();
        let u = Units::default();
        let f = bump(&g);
        let h = GridFunction::from_fn(&g, |t, p| {
            Complex64::new((-((t - 1.5) / 0.2).powi(2)).exp() * p.sin(), 0.1 * t)
        });
        let scale = f.norm() * h.norm();
        for i in 1..=3 {
            let d = f.inner(&apply_j(i, &h, 1.0)) - apply_j(i, &f, 1.0).inner(&h);
            assert!(d.norm() < 1e-12 * scale, "J{i}: {d}");
        }
        let d = f.inner(&laplace_beltrami(&h, &u)) - laplace_beltrami(&f, &u).inner(&h);
        assert!(d.norm() < 1e-10 * scale, "H: {d}");
    }

    #[test]
    fn opposite_phase_breaks_closure() {
        let g = Grid::new(0.1, 3.0, 0.01, 16).unwrap();
        let f = bump(&g);
        let good = closure_residual(1, 2, &f, 1.0, GeneratorPhase::default()).interior_norm();
        let bad = closure_residual(1, 2, &f, 1.0, GeneratorPhase(1.0)).interior_norm();
        assert!(good < 1e-2 * f.norm(), "{good}");
        assert!(bad > 0.5 * f.norm(), "{bad}");
    }
}
