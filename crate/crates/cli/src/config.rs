//! Run configuration: a JSON document whose fields can each be overridden
//! on the command line.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub a: f64,
    pub m: f64,
    pub hbar: f64,
    pub dt: f64,
    pub t_end: f64,
    pub projection: bool,
    pub sample_every: usize,
    /// Constraint tolerance, scaled by a² for C₂.
    pub tol_c: f64,
    /// Relative tolerance on H and J drift.
    pub tol_drift: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub h: f64,
    pub n_phi: usize,
    pub lambdas: Vec<f64>,
    pub orders: Vec<i32>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            a: 1.0,
            m: 1.0,
            hbar: 1.0,
            dt: 1e-3,
            t_end: 10.0,
            projection: true,
            sample_every: 10,
            tol_c: 1e-8,
            tol_drift: 1e-8,
            theta_min: 0.1,
            theta_max: 3.0,
            h: 1e-3,
            n_phi: 8,
            lambdas: vec![0.5, 1.0, 2.0],
            orders: vec![0, 1, 2],
            seed: 0x5eed,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("a", self.a),
            ("m", self.m),
            ("hbar", self.hbar),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("tol_c", self.tol_c),
            ("tol_drift", self.tol_drift),
            ("theta_min", self.theta_min),
            ("h", self.h),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be a positive finite number, got {v}"));
            }
        }
        if self.theta_max <= self.theta_min {
            return Err(format!(
                "theta_max ({}) must exceed theta_min ({})",
                self.theta_max, self.theta_min
            ));
        }
        if self.n_phi < 4 || !self.n_phi.is_power_of_two() {
            return Err(format!("n_phi must be a power of two >= 4, got {}", self.n_phi));
        }
        if self.sample_every == 0 {
            return Err("sample_every must be at least 1".into());
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return Err(format!("lambda must be >= 0, got {l}"));
        }
        Ok(())
    }
}
