//! Conical functions `P^n_{−½+iλ}(cosh θ)`.
//!
//! Order zero comes from the Mehler–Dirichlet integral
//!
//! ```text
//! P_{−½+iλ}(cosh θ) = (√2/π) ∫₀^θ cos(λt) / √(cosh θ − cosh t) dt
//! ```
//!
//! after the substitution `t = θ(1 − s²)`, which removes the endpoint
//! singularity. Order one is its θ-derivative, differentiated under the
//! integral sign. Higher orders use
//!
//! ```text
//! P^{m+1} = −2m coth θ · P^m − ((m − ½)² + λ²) · P^{m−1}
//! ```
//!
//! and negative orders `P^{−m} = (−1)^m / Π_{k=1..m}((k − ½)² + λ²) · P^m`.
//! There is no Condon–Shortley phase: `P^1 = +dP^0/dθ`. The sign of the
//! recurrence is checked at runtime against the Laplace-type integral
//! `P^m_ν(cosh θ) = (ν+1)_m/π ∫₀^π (cosh θ + sinh θ cos t)^ν cos(mt) dt`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::quadrature::GaussLegendre;
use super::SpectralError;

pub const N_MAX: i32 = 12;

const VALIDATION_LAMBDA: [f64; 3] = [0.5, 1.0, 2.0];
const VALIDATION_THETA: [f64; 3] = [0.5, 1.0, 2.0];

/// Below this θ the hypergeometric series is used when it converges fast.
const SERIES_THETA: f64 = 0.1;

fn gl20() -> &'static GaussLegendre {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(20))
}

fn panels(lambda: f64, theta: f64) -> usize {
    2 + (lambda * theta / 4.0).ceil() as usize + (theta / 2.0).ceil() as usize
}

fn use_series(lambda: f64, theta: f64) -> bool {
    let z = (0.5 * theta).sinh().powi(2);
    theta < SERIES_THETA && (lambda * lambda + 1.0) * z < 0.05
}

/// `F(½ − iλ, ½ + iλ; 1; z)` and its z-derivative.
fn series(lambda: f64, z: f64) -> (f64, f64) {
    let (mut sum, mut dsum) = (1.0, 0.0);
    let mut c = 1.0; // coefficient of z^k
    let mut zk = 1.0; // z^(k-1) for the derivative
    for k in 0..200 {
        let kf = k as f64;
        c *= ((kf + 0.5).powi(2) + lambda * lambda) / ((kf + 1.0) * (kf + 1.0));
        let dterm = (kf + 1.0) * c * zk;
        zk *= z;
        let term = c * zk;
        sum += term;
        dsum += dterm;
        if term.abs() < 1e-18 * sum.abs() && dterm.abs() < 1e-18 * dsum.abs().max(1e-300) {
            break;
        }
    }
    (sum, dsum)
}

/// Below this θ, orders `|n| ≥ 2` come from [`order_series`]; forward
/// recurrence loses digits there because `P^n ~ θ^n`.
const ORDER_SERIES_THETA: f64 = 1.0;

/// `P^{−m} = tanh^m(θ/2)/m! · F(½−iλ, ½+iλ; 1+m; −sinh²(θ/2))`, and
/// `P^{m}` from it by the negative-order proportionality.
fn order_series(lambda: f64, n: i32, theta: f64) -> f64 {
    let m = n.unsigned_abs();
    let z = -(0.5 * theta).sinh().powi(2);
    let (mut sum, mut term) = (1.0, 1.0);
    for k in 0..500 {
        let kf = k as f64;
        term *= ((kf + 0.5).powi(2) + lambda * lambda) / ((kf + 1.0 + m as f64) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    let fact: f64 = (1..=m).map(f64::from).product();
    let lower = (0.5 * theta).tanh().powi(m as i32) / fact * sum;
    if n < 0 {
        return lower;
    }
    let prod: f64 = (1..=m)
        .map(|k| (k as f64 - 0.5).powi(2) + lambda * lambda)
        .product();
    if m % 2 == 1 {
        -prod * lower
    } else {
        prod * lower
    }
}

/// `sinh(u)/u`.
fn sinhc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sinh() / u
    }
}

/// Returns `(D̃, ∂θ D̃)` where `cosh θ − cosh(θ(1−s²)) = s² D̃`.
fn reduced_gap(theta: f64, s: f64) -> (f64, f64) {
    let a = 0.5 * theta * (2.0 - s * s);
    let b = 0.5 * theta * s * s;
    let e = 0.5 * theta * sinhc(b);
    let d = 2.0 * a.sinh() * e;
    let dd = (2.0 - s * s) * a.cosh() * e + a.sinh() * b.cosh();
    (d, dd)
}

/// `P_{−½+iλ}(cosh θ)`.
pub fn conical_p0(lambda: f64, theta: f64) -> f64 {
    assert!(theta >= 0.0, "theta must be non-negative");
    if theta == 0.0 {
        return 1.0;
    }
    if use_series(lambda, theta) {
        return series(lambda, -(0.5 * theta).sinh().powi(2)).0;
    }
    let i = gl20().integrate(0.0, 1.0, panels(lambda, theta), |s| {
        let (d, _) = reduced_gap(theta, s);
        2.0 * theta * (lambda * theta * (1.0 - s * s)).cos() / d.sqrt()
    });
    SQRT_2 / PI * i
}

/// `dP_{−½+iλ}(cosh θ)/dθ`, which is `P^1_{−½+iλ}(cosh θ)`.
pub fn conical_p1(lambda: f64, theta: f64) -> f64 {
    assert!(theta >= 0.0, "theta must be non-negative");
    if theta == 0.0 {
        return 0.0;
    }
    if use_series(lambda, theta) {
        let z = -(0.5 * theta).sinh().powi(2);
        return -0.5 * theta.sinh() * series(lambda, z).1;
    }
    let i = gl20().integrate(0.0, 1.0, panels(lambda, theta), |s| {
        let (d, dd) = reduced_gap(theta, s);
        let psi = lambda * theta * (1.0 - s * s);
        let sd = d.sqrt();
        2.0 * psi.cos() / sd
            - 2.0 * theta * lambda * (1.0 - s * s) * psi.sin() / sd
            - theta * psi.cos() * dd / (d * sd)
    });
    SQRT_2 / PI * i
}

/// Order-raising recurrence with a configurable sign on the `coth` term.
/// The correct convention is `sign = 1`; anything else exists so the
/// validation can be shown to catch it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recurrence {
    pub sign: f64,
}

impl Default for Recurrence {
    fn default() -> Self {
        Recurrence { sign: 1.0 }
    }
}

impl Recurrence {
    pub fn eval(&self, lambda: f64, n: i32, theta: f64) -> Result<f64, SpectralError> {
        if n.abs() > N_MAX {
            return Err(SpectralError::OrderOutOfRange { n, max: N_MAX });
        }
        if !(theta > 0.0) {
            return Err(SpectralError::ThetaNotPositive(theta));
        }
        let m = n.unsigned_abs();
        let p0 = conical_p0(lambda, theta);
        if m == 0 {
            return Ok(p0);
        }
        if m >= 2 && theta < ORDER_SERIES_THETA {
            return Ok(order_series(lambda, n, theta));
        }
        let coth = 1.0 / theta.tanh();
        let (mut prev, mut cur) = (p0, conical_p1(lambda, theta));
        for k in 1..m {
            let kf = k as f64;
            let next = -self.sign * 2.0 * kf * coth * cur
                - ((kf - 0.5).powi(2) + lambda * lambda) * prev;
            prev = cur;
            cur = next;
        }
        if n < 0 {
            let prod: f64 = (1..=m)
                .map(|k| (k as f64 - 0.5).powi(2) + lambda * lambda)
                .product();
            cur *= if m % 2 == 1 { -1.0 } else { 1.0 } / prod;
        }
        Ok(cur)
    }

    /// Largest `|recurrence − quadrature| / scale` over the validation set.
    pub fn max_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for &lambda in &VALIDATION_LAMBDA {
            for &theta in &VALIDATION_THETA {
                for n in (-5..=5).filter(|&n| n != 0) {
                    let rec = self.eval(lambda, n, theta).unwrap_or(f64::NAN);
                    let (quad, scale) = laplace_integral(lambda, n, theta);
                    worst = worst.max(((rec - quad) / scale).abs());
                }
            }
        }
        worst
    }

    /// Compares the recurrence with [`laplace_integral`] for `1 ≤ |n| ≤ 5`.
    pub fn validate(&self) -> Result<(), SpectralError> {
        for &lambda in &VALIDATION_LAMBDA {
            for &theta in &VALIDATION_THETA {
                for n in (-5..=5).filter(|&n| n != 0) {
                    let rec = self.eval(lambda, n, theta)?;
                    let (quad, scale) = laplace_integral(lambda, n, theta);
                    if (rec - quad).abs() > 1e-8 * scale {
                        return Err(SpectralError::ConventionMismatch {
                            n,
                            lambda,
                            theta,
                            recurrence: rec,
                            quadrature: quad,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Checks the shipped recurrence once per process.
pub fn validate_order_convention() -> Result<(), SpectralError> {
    static CHECKED: OnceLock<Result<(), SpectralError>> = OnceLock::new();
    CHECKED.get_or_init(|| Recurrence::default().validate()).clone()
}

/// `P^n_{−½+iλ}(cosh θ)` for `|n| ≤ 12` and `θ > 0`.
pub fn conical_pn(lambda: f64, n: i32, theta: f64) -> Result<f64, SpectralError> {
    if n != 0 {
        validate_order_convention()?;
    }
    Recurrence::default().eval(lambda, n, theta)
}

/// `(ν+1)_n/π ∫₀^π (cosh θ + sinh θ cos t)^ν cos(nt) dt` with
/// `ν = −½ + iλ`, and `(ν+1)_{−m} = 1/Π_{k=1..m}(ν+1−k)` for negative order.
///
/// Returns the real part together with the magnitude scale
/// `|(ν+1)_n|/π ∫ |integrand| dt`, against which errors should be measured
/// since the value itself can pass through zero.
pub fn laplace_integral(lambda: f64, n: i32, theta: f64) -> (f64, f64) {
    let nu = Complex64::new(-0.5, lambda);
    let mut poch = Complex64::new(1.0, 0.0);
    if n >= 0 {
        for k in 0..n {
            poch *= nu + 1.0 + k as f64;
        }
    } else {
        for k in 1..=-n {
            poch /= nu + 1.0 - k as f64;
        }
    }
    let (ch, sh) = (theta.cosh(), theta.sinh());
    let nf = n as f64;
    // The integrand peaks near t = π with width ~e^{−θ}; panels are graded
    // geometrically towards π and subdivided for oscillation.
    let levels = (theta / std::f64::consts::LN_2).ceil() as usize + 4;
    let sub = 2 + ((lambda * theta + nf.abs()) / 4.0).ceil() as usize;
    let mut breaks: Vec<f64> = (0..=levels).map(|k| PI * (1.0 - 0.5f64.powi(k as i32))).collect();
    breaks.push(PI);
    let gl = gl20();
    let (mut re, mut im, mut abs) = (0.0, 0.0, 0.0);
    for win in breaks.windows(2) {
        let h = (win[1] - win[0]) / sub as f64;
        for q in 0..sub {
            let mid = win[0] + (q as f64 + 0.5) * h;
            for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                let t = mid + 0.5 * h * x;
                let b = ch + sh * t.cos();
                let (lb, amp, c) = (b.ln(), b.powf(-0.5), (nf * t).cos());
                let w = wt * 0.5 * h * amp;
                re += w * (lambda * lb).cos() * c;
                im += w * (lambda * lb).sin() * c;
                abs += w;
            }
        }
    }
    let v = poch * Complex64::new(re, im) / PI;
    (v.re, poch.norm() * abs / PI)
}
