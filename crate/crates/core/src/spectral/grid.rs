//! Tensor grid in (θ, φ) and complex functions sampled on it.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// Uniform θ rows `θ_min + i·h`, periodic φ columns `2πj/N_φ`.
pub struct Grid {
    theta_min: f64,
    h: f64,
    n_theta: usize,
    n_phi: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("theta_min", &self.theta_min)
            .field("theta_max", &self.theta_max())
            .field("h", &self.h)
            .field("n_phi", &self.n_phi)
            .finish()
    }
}

impl Grid {
    /// The last row lands on `θ_max` rounded to the nearest multiple of `h`.
    pub fn new(theta_min: f64, theta_max: f64, h: f64, n_phi: usize) -> Result<Arc<Grid>, SpectralError> {
        if !(theta_min > 0.0) || !(theta_max > theta_min) || !(h > 0.0) {
            return Err(SpectralError::BadGrid(format!(
                "need 0 < theta_min < theta_max and h > 0, got [{theta_min}, {theta_max}], h = {h}"
            )));
        }
        if n_phi < 4 || !n_phi.is_power_of_two() {
            return Err(SpectralError::BadGrid(format!("n_phi must be a power of two >= 4, got {n_phi}")));
        }
        let n_theta = ((theta_max - theta_min) / h).round() as usize + 1;
        if n_theta < 3 {
            return Err(SpectralError::BadGrid("fewer than three theta rows".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            theta_min,
            h,
            n_theta,
            n_phi,
            fft: planner.plan_fft_forward(n_phi),
            ifft: planner.plan_fft_inverse(n_phi),
        }))
    }

    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
    pub fn theta(&self, i: usize) -> f64 {
        self.theta_min + i as f64 * self.h
    }
    pub fn theta_max(&self) -> f64 {
        self.theta(self.n_theta - 1)
    }
    pub fn dphi(&self) -> f64 {
        TAU / self.n_phi as f64
    }
    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.dphi()
    }
    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest |n| resolved by the φ columns.
    pub fn max_mode(&self) -> i32 {
        self.n_phi as i32 / 2 - 1
    }

    /// Spectral φ-derivative of each row, `k`-th power of `i·n` applied in
    /// Fourier space. The Nyquist mode is dropped for odd `k`.
    pub(crate) fn phi_derivative(&self, data: &mut [Complex64], k: u32) {
        let n = self.n_phi;
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        for row in data.chunks_mut(n) {
            self.fft.process_with_scratch(row, &mut scratch);
            for (j, c) in row.iter_mut().enumerate() {
                let freq = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                let mult = if j == n / 2 && k % 2 == 1 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, freq as f64).powu(k)
                };
                *c *= mult / n as f64;
            }
            self.ifft.process_with_scratch(row, &mut scratch);
        }
    }
}

/// Complex values on a [`Grid`], stored row-major in θ.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<Grid>,
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        GridFunction {
            grid: grid.clone(),
            data: vec![Complex64::default(); grid.len()],
        }
    }

    /// Samples `f(θ, φ)`.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n_theta {
            let t = grid.theta(i);
            for j in 0..grid.n_phi {
                data.push(f(t, grid.phi(j)));
            }
        }
        GridFunction { grid: grid.clone(), data }
    }

    /// `g(θ) · e^{inφ}`.
    pub fn separable(grid: &Arc<Grid>, n: i32, g: impl Fn(f64) -> f64) -> Self {
        let phase: Vec<Complex64> = (0..grid.n_phi)
            .map(|j| Complex64::from_polar(1.0, n as f64 * grid.phi(j)))
            .collect();
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n_theta {
            let r = g(grid.theta(i));
            data.extend(phase.iter().map(|p| p * r));
        }
        GridFunction { grid: grid.clone(), data }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.data
    }
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.grid.n_phi + j]
    }
    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.grid.n_phi;
        &self.data[i * n..(i + 1) * n]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// `⟨f, g⟩ = Σ f̄ g sinh θ Δθ Δφ`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        self.weighted_sum(other, 0..self.grid.n_theta)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    /// Norm over rows `1..n_θ−1`, leaving out the two boundary rows where
    /// the Dirichlet truncation acts.
    pub fn interior_norm(&self) -> f64 {
        self.weighted_sum(self, 1..self.grid.n_theta - 1).re.sqrt()
    }

    fn weighted_sum(&self, other: &GridFunction, rows: std::ops::Range<usize>) -> Complex64 {
        let g = &self.grid;
        let mut acc = Complex64::default();
        for i in rows {
            let w = g.theta(i).sinh() * g.h * g.dphi();
            let s: Complex64 = self
                .row(i)
                .iter()
                .zip(other.row(i))
                .map(|(a, b)| a.conj() * b)
                .sum();
            acc += s * w;
        }
        acc
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise product with `c(θ, φ)`.
    pub fn mul_fn(&self, c: impl Fn(f64, f64) -> Complex64) -> Self {
        let g = &self.grid;
        let mut out = self.clone();
        for i in 0..g.n_theta {
            let t = g.theta(i);
            for j in 0..g.n_phi {
                out.data[i * g.n_phi + j] *= c(t, g.phi(j));
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &GridFunction) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &GridFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(Arc::ptr_eq(&self.grid, &other.grid), "grid functions live on different grids");
        GridFunction {
            grid: self.grid.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_derivative_is_exact_on_modes() {
        let g = Grid::new(0.5, 1.0, 0.25, 16).unwrap();
        for n in -7..=7 {
            let mut f = GridFunction::separable(&g, n, |t| t);
            g.phi_derivative(f.data_mut(), 1);
            let expect = GridFunction::separable(&g, n, |t| t).scale(Complex64::new(0.0, n as f64));
            assert!(f.sub(&expect).norm() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn inner_product_weights() {
        // ∫ sinh θ dθ dφ over [1, 2] × [0, 2π) is 2π(cosh 2 − cosh 1); the
        // rectangle rule is first order, so compare loosely.
        let g = Grid::new(1.0, 2.0, 1e-4, 4).unwrap();
        let one = GridFunction::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
        let v = one.inner(&one).re;
        let exact = TAU * (2f64.cosh() - 1f64.cosh());
        assert!((v - exact).abs() / exact < 1e-3);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(0.0, 1.0, 0.1, 8).is_err());
        assert!(Grid::new(0.1, 1.0, 0.1, 12).is_err());
        assert!(Grid::new(0.1, 1.0, -0.1, 8).is_err());
    }
}
