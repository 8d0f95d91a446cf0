//! Reference computations that share no code with the crate: tanh-sinh
//! quadrature, special-function integrals, and the closed-form geodesic.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

/// Tanh-sinh quadrature of `f` over `[a, b]`. `f` receives `t` and `b − t`,
/// the latter computed without cancellation so integrands singular at `b`
/// can be evaluated accurately. Halves the step until two levels agree.
pub fn tanh_sinh(a: f64, b: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let eval = |tau: f64| {
        let u = FRAC_PI_2 * tau.sinh();
        let ch = u.cosh();
        if !ch.is_finite() {
            return 0.0;
        }
        let w = half * FRAC_PI_2 * tau.cosh() / (ch * ch);
        // 1 − tanh(u) = 2 / (1 + e^{2u}), 1 + tanh(u) = 2 / (1 + e^{−2u})
        let to_b = (b - a) / (1.0 + (2.0 * u).exp());
        let from_a = (b - a) / (1.0 + (-2.0 * u).exp());
        if to_b <= 0.0 || from_a <= 0.0 {
            return 0.0;
        }
        let v = f(a + from_a, to_b);
        if w == 0.0 { 0.0 } else { w * v }
    };
    let tmax = 4.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= tmax {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= tmax {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= 1e-15 * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `P_{−½+iλ}(cosh θ) = (√2/π) ∫₀^θ cos(λt)/√(cosh θ − cosh t) dt`.
pub fn mehler_p0(lambda: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    let i = tanh_sinh(0.0, theta, |t, d| {
        let gap = 2.0 * (0.5 * (theta + t)).sinh() * (0.5 * d).sinh();
        (lambda * t).cos() / gap.sqrt()
    });
    std::f64::consts::SQRT_2 / PI * i
}

/// `P^n_ν(cosh θ) = (ν+1)_n/π ∫₀^π (cosh θ + sinh θ cos t)^ν cos(nt) dt`,
/// `ν = −½ + iλ`, with the Pochhammer symbol continued to negative `n`.
pub fn laplace_pn(lambda: f64, n: i32, theta: f64) -> f64 {
    let nu = Complex64::new(-0.5, lambda);
    let mut poch = Complex64::new(1.0, 0.0);
    for k in 0..n.max(0) {
        poch *= nu + 1.0 + k as f64;
    }
    for k in 1..=(-n).max(0) {
        poch /= nu + 1.0 - k as f64;
    }
    let part = |re: bool| {
        tanh_sinh(0.0, PI, |t, _| {
            let b = theta.cosh() + theta.sinh() * t.cos();
            let v = Complex64::from(b).powc(nu) * (n as f64 * t).cos();
            if re { v.re } else { v.im }
        })
    };
    (poch * Complex64::new(part(true), part(false))).re / PI
}

/// `x(t) = x₀ cosh(st) + (u/s) sinh(st)` with `u = ẋ(0)`, `s² = (u·u)/a²`
/// in the (+, +, −) metric.
pub fn geodesic(x0: [f64; 3], u: [f64; 3], a: f64, t: f64) -> [f64; 3] {
    let uu = u[0] * u[0] + u[1] * u[1] - u[2] * u[2];
    if uu <= 0.0 {
        return x0;
    }
    let s = uu.sqrt() / a;
    let (ch, sh) = ((s * t).cosh(), (s * t).sinh());
    [0, 1, 2].map(|i| x0[i] * ch + u[i] * sh / s)
}

/// `(p_x² + p_y² − p_z²)/(2m)` with `z`, `p_z` solved from the constraints.
pub fn energy_quadratic(x: f64, y: f64, px: f64, py: f64, m: f64, a: f64) -> f64 {
    let z = (x * x + y * y + a * a).sqrt();
    let pz = -(x * px + y * py) / z;
    (px * px + py * py - pz * pz) / (2.0 * m)
}
