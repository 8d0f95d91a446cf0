//! Minkowski space ℝ^{1,2}, the upper sheet of `x² + y² − z² = −a²` and its
//! `(θ, φ)` chart.
//!
//! Chart components are ordered `(θ, φ)`; index 0 is θ.

use std::f64::consts::TAU;
use std::ops::{Add, Index, Mul, Neg, Sub};

use thiserror::Error;

/// `diag(1, 1, −1)`.
pub const METRIC: [f64; 3] = [1.0, 1.0, -1.0];

/// Tolerance used by [`chart_inverse`], relative to `a²`.
pub const SURFACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Error, PartialEq)]
pub enum GeometryError {
    #[error("point is off the hyperboloid: |x·x + a²| = {0:e}")]
    OffSurface(f64),
    #[error("point lies on the lower sheet (z < 0)")]
    WrongSheet,
    #[error("θ = {0} is at or below the chart singularity")]
    ChartSingularity(f64),
}

/// Contravariant vector `(v¹, v², v³)` of ℝ^{1,2}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkVec(pub [f64; 3]);

impl MinkVec {
    pub const ZERO: MinkVec = MinkVec([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        MinkVec([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    /// Components `v_i = g_ij vʲ`.
    pub fn lower(&self) -> [f64; 3] {
        [self.0[0], self.0[1], -self.0[2]]
    }

    /// `u¹v¹ + u²v² − u³v³`.
    pub fn dot(&self, other: &MinkVec) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] - self.0[2] * other.0[2]
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &MinkVec) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }
}

impl Index<usize> for MinkVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for MinkVec {
    type Output = MinkVec;
    fn add(self, r: MinkVec) -> MinkVec {
        MinkVec([self.0[0] + r.0[0], self.0[1] + r.0[1], self.0[2] + r.0[2]])
    }
}

impl Sub for MinkVec {
    type Output = MinkVec;
    fn sub(self, r: MinkVec) -> MinkVec {
        MinkVec([self.0[0] - r.0[0], self.0[1] - r.0[1], self.0[2] - r.0[2]])
    }
}

impl Mul<f64> for MinkVec {
    type Output = MinkVec;
    fn mul(self, s: f64) -> MinkVec {
        MinkVec([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Neg for MinkVec {
    type Output = MinkVec;
    fn neg(self) -> MinkVec {
        self * -1.0
    }
}

/// `ε_{ijk}` with `ε_{123} = 1` (zero-based indices).
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `Jⁱ = −ε^{ijk} x_j p_k` for a position `x` and lowered momentum `p_k`.
/// `ε^{ijk} = −ε_{ijk}`.
pub fn angular_momentum(x: &MinkVec, p_lower: [f64; 3]) -> [f64; 3] {
    let xl = x.lower();
    let mut j = [0.0; 3];
    for (i, ji) in j.iter_mut().enumerate() {
        for a in 0..3 {
            for b in 0..3 {
                *ji += levi_civita(i, a, b) * xl[a] * p_lower[b];
            }
        }
    }
    j
}

/// Point of the chart: `θ ≥ 0`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub theta: f64,
    pub phi: f64,
}

impl ChartPoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        ChartPoint { theta, phi }
    }
}

/// `(a cosφ sinhθ, a sinφ sinhθ, a coshθ)`.
pub fn embed(p: ChartPoint, a: f64) -> MinkVec {
    let (s, c) = p.phi.sin_cos();
    let sh = p.theta.sinh();
    MinkVec([a * c * sh, a * s * sh, a * p.theta.cosh()])
}

/// Inverse of [`embed`]. At the apex `φ` is reported as 0.
pub fn chart_inverse(v: MinkVec, a: f64) -> Result<ChartPoint, GeometryError> {
    let res = v.square() + a * a;
    if res.abs() > SURFACE_TOL * a * a {
        return Err(GeometryError::OffSurface(res.abs()));
    }
    if v.z() < 0.0 {
        return Err(GeometryError::WrongSheet);
    }
    let rho = v.x().hypot(v.y());
    // asinh is well conditioned near the apex where acosh is not.
    let theta = (rho / a).asinh();
    let phi = if rho == 0.0 {
        0.0
    } else {
        v.y().atan2(v.x()).rem_euclid(TAU)
    };
    Ok(ChartPoint { theta, phi })
}

/// Tangent vectors `∂x/∂θ` and `∂x/∂φ` at `p`.
pub fn tangent_basis(p: ChartPoint, a: f64) -> [MinkVec; 2] {
    let (s, c) = p.phi.sin_cos();
    let (sh, ch) = (p.theta.sinh(), p.theta.cosh());
    [
        MinkVec([a * c * ch, a * s * ch, a * sh]),
        MinkVec([-a * s * sh, a * c * sh, 0.0]),
    ]
}

/// Maps chart components `(vᶿ, vᵠ)` to the ambient vector.
pub fn pushforward(p: ChartPoint, a: f64, v: [f64; 2]) -> MinkVec {
    let [et, ep] = tangent_basis(p, a);
    et * v[0] + ep * v[1]
}

/// Induced metric `a²(dθ² + sinh²θ dφ²)`.
pub fn metric(p: ChartPoint, a: f64) -> [[f64; 2]; 2] {
    let sh = p.theta.sinh();
    [[a * a, 0.0], [0.0, a * a * sh * sh]]
}

pub fn metric_inverse(p: ChartPoint, a: f64) -> [[f64; 2]; 2] {
    let sh = p.theta.sinh();
    [[1.0 / (a * a), 0.0], [0.0, 1.0 / (a * a * sh * sh)]]
}

/// `gamma[i][j][k] = Γⁱ_jk`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

fn check_chart(p: ChartPoint) -> Result<(), GeometryError> {
    if p.theta <= 0.0 {
        Err(GeometryError::ChartSingularity(p.theta))
    } else {
        Ok(())
    }
}

/// Closed-form Christoffel symbols; independent of `a`.
pub fn christoffel(p: ChartPoint) -> Result<Christoffel, GeometryError> {
    check_chart(p)?;
    let (sh, ch) = (p.theta.sinh(), p.theta.cosh());
    let mut g = [[[0.0; 2]; 2]; 2];
    g[0][1][1] = -sh * ch;
    g[1][0][1] = ch / sh;
    g[1][1][0] = ch / sh;
    Ok(g)
}

/// `d[l][i][j][k] = ∂_l Γⁱ_jk`.
pub fn christoffel_derivatives(p: ChartPoint) -> Result<[Christoffel; 2], GeometryError> {
    check_chart(p)?;
    let sh = p.theta.sinh();
    let mut d = [[[[0.0; 2]; 2]; 2]; 2];
    d[0][0][1][1] = -(2.0 * p.theta).cosh();
    d[0][1][0][1] = -1.0 / (sh * sh);
    d[0][1][1][0] = -1.0 / (sh * sh);
    Ok(d)
}

/// Scalar curvature of the induced metric, assembled from the Christoffel
/// symbols and their derivatives at a reference point.
pub fn scalar_curvature(a: f64) -> f64 {
    scalar_curvature_at(ChartPoint::new(0.7, 0.3), a).expect("reference point is regular")
}

pub fn scalar_curvature_at(p: ChartPoint, a: f64) -> Result<f64, GeometryError> {
    let g = christoffel(p)?;
    let d = christoffel_derivatives(p)?;
    let ginv = metric_inverse(p, a);
    // Rᵖ_σμν = ∂_μ Γᵖ_νσ − ∂_ν Γᵖ_μσ + Γᵖ_μλ Γ^λ_νσ − Γᵖ_νλ Γ^λ_μσ
    let riemann = |r: usize, s: usize, mu: usize, nu: usize| {
        let mut v = d[mu][r][nu][s] - d[nu][r][mu][s];
        for l in 0..2 {
            v += g[r][mu][l] * g[l][nu][s] - g[r][nu][l] * g[l][mu][s];
        }
        v
    };
    let mut r = 0.0;
    for s in 0..2 {
        for nu in 0..2 {
            let ric: f64 = (0..2).map(|rho| riemann(rho, s, rho, nu)).sum();
            r += ginv[s][nu] * ric;
        }
    }
    Ok(r)
}

/// Chart components of the Killing fields `K₍₁₎, K₍₂₎, K₍₃₎`:
/// `(sinφ, cosφ cothθ)`, `(−cosφ, sinφ cothθ)`, `(0, 1)`.
pub fn killing_fields(p: ChartPoint) -> Result<[[f64; 2]; 3], GeometryError> {
    check_chart(p)?;
    let (s, c) = p.phi.sin_cos();
    let coth = 1.0 / p.theta.tanh();
    Ok([[s, c * coth], [-c, s * coth], [0.0, 1.0]])
}

/// The Killing fields written on ℝ^{1,2}: `K₍₁₎ = z∂_y + y∂_z`,
/// `K₍₂₎ = −z∂_x − x∂_z`, `K₍₃₎ = −y∂_x + x∂_y`. Each equals
/// `−ε^{ikl} x_k ∂_l` at points of the surface.
pub fn killing_field_ambient(i: usize, x: &MinkVec) -> MinkVec {
    let (px, py, pz) = (x.x(), x.y(), x.z());
    match i {
        0 => MinkVec([0.0, pz, py]),
        1 => MinkVec([-pz, 0.0, -px]),
        2 => MinkVec([-py, px, 0.0]),
        _ => panic!("Killing field index {i} out of range"),
    }
}

/// `max_ij |(ℒ_K g)_ij|` for field `i`, with derivatives of `K` and `g` by
/// central differences of step `h`. Zero for a Killing field up to `O(h²)`.
pub fn killing_residual(i: usize, p: ChartPoint, a: f64, h: f64) -> Result<f64, GeometryError> {
    check_chart(ChartPoint::new(p.theta - h, p.phi))?;
    let field = |q: ChartPoint| killing_fields(q).map(|k| k[i]);
    let k = field(p)?;
    let g = metric(p, a);
    let shift = |l: usize, s: f64| {
        let mut q = p;
        if l == 0 {
            q.theta += s;
        } else {
            q.phi += s;
        }
        q
    };
    // dk[l][m] = ∂_l K^m, dg[l][i][j] = ∂_l g_ij
    let mut dk = [[0.0; 2]; 2];
    let mut dg = [[[0.0; 2]; 2]; 2];
    for l in 0..2 {
        let (kp, km) = (field(shift(l, h))?, field(shift(l, -h))?);
        let (gp, gm) = (metric(shift(l, h), a), metric(shift(l, -h), a));
        for m in 0..2 {
            dk[l][m] = (kp[m] - km[m]) / (2.0 * h);
            for n in 0..2 {
                dg[l][m][n] = (gp[m][n] - gm[m][n]) / (2.0 * h);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for s in 0..2 {
            let mut v = 0.0;
            for l in 0..2 {
                v += k[l] * dg[l][r][s] + g[l][s] * dk[r][l] + g[r][l] * dk[s][l];
            }
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}
