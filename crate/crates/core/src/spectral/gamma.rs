//! Gamma function of a complex argument.
//!
//! Lanczos-type series with `g = 671/128` and 14 coefficients for
//! `Re z ≥ ½`, reflection `Γ(z)Γ(1−z) = π / sin(πz)` below.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Parameters of the series `ln Γ(z) ≈ (z+½)ln(z+g) − (z+g) + ln(√(2π)·S(z)/z)`
/// with `S(z) = c₀ + Σ c_k/(z+k)`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexGamma {
    pub g: f64,
    pub c0: f64,
    pub coeffs: &'static [f64],
}

#[allow(clippy::excessive_precision)]
const COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

impl Default for ComplexGamma {
    fn default() -> Self {
        ComplexGamma {
            g: 671.0 / 128.0,
            c0: 0.999_999_999_999_997_092,
            coeffs: &COEFFS,
        }
    }
}

impl ComplexGamma {
    /// Principal-branch-free `ln Γ(z)`: the real part is `ln|Γ(z)|`, the
    /// imaginary part is some value of `arg Γ(z)`.
    pub fn ln_gamma(&self, z: Complex64) -> Complex64 {
        if z.re < 0.5 {
            // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z)
            let s = (z * PI).sin();
            return Complex64::new(PI.ln(), 0.0) - s.ln() - self.ln_gamma(1.0 - z);
        }
        let mut ser = Complex64::new(self.c0, 0.0);
        let mut y = z;
        for &c in self.coeffs {
            y += 1.0;
            ser += c / y;
        }
        let tmp = z + self.g;
        (z + 0.5) * tmp.ln() - tmp + (ser * SQRT_2PI / z).ln()
    }

    pub fn gamma(&self, z: Complex64) -> Complex64 {
        if z.re < 0.5 {
            let s = (z * PI).sin();
            return PI / (s * self.gamma(1.0 - z));
        }
        self.ln_gamma(z).exp()
    }
}

pub fn ln_gamma(z: Complex64) -> Complex64 {
    ComplexGamma::default().ln_gamma(z)
}

pub fn gamma(z: Complex64) -> Complex64 {
    ComplexGamma::default().gamma(z)
}
