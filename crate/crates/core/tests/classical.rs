mod common;

use hyperboloid::classical::{
    energy_reduced, integrate_embedded, integrate_intrinsic, solve_constraints, EmbeddedState,
    IntegratorConfig, IntrinsicState, Params,
};
use hyperboloid::geometry::MinkVec;
use proptest::prelude::*;

fn max_error_vs_oracle(s0: &EmbeddedState, params: Params, dt: f64, t_end: f64) -> f64 {
    let cfg = IntegratorConfig { dt, t_end, sample_every: 1, ..Default::default() };
    let rec = integrate_embedded(s0, params, &cfg);
    let u = (s0.p * (1.0 / params.m)).0;
    rec.samples
        .iter()
        .map(|s| {
            let want = common::geodesic(s0.x.0, u, params.a, s.state.t);
            (0..3).map(|i| (s.state.x.0[i] - want[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn apex_geodesic_matches_closed_form() {
    let params = Params::default();
    let s0 = EmbeddedState::new(MinkVec::new(0.0, 0.0, 1.0), MinkVec::new(1.0, 0.0, 0.0));
    let e1 = max_error_vs_oracle(&s0, params, 1e-3, 10.0);
    let e2 = max_error_vs_oracle(&s0, params, 2e-3, 10.0);
    assert!(e1 <= 1e-8, "error {e1:e}");
    assert!((e2 / e1 - 16.0).abs() <= 2.0, "ratio {}", e2 / e1);
}

#[test]
fn zero_momentum_is_stationary() {
    let params = Params { m: 2.0, a: 1.5 };
    let s0 = solve_constraints(0.4, -0.3, 0.0, 0.0, params.a);
    let cfg = IntegratorConfig { t_end: 1.0, ..Default::default() };
    let rec = integrate_embedded(&s0, params, &cfg);
    let last = rec.last().unwrap();
    assert!(last.state.x.max_abs_diff(&s0.x) < 1e-15);
    assert_eq!(last.energy, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_geodesics_match_closed_form(
        x in -1.0f64..1.0, y in -1.0f64..1.0, px in -1.0f64..1.0, py in -1.0f64..1.0,
        m in 0.5f64..2.0, a in 0.5f64..2.0,
    ) {
        let params = Params { m, a };
        let s0 = solve_constraints(x * a, y * a, px, py, a);
        let err = max_error_vs_oracle(&s0, params, 1e-3, 2.0);
        let scale = s0.x.euclid_norm() * (1.0 + s0.p.euclid_norm() / m * 2.0 / a).exp();
        prop_assert!(err <= 1e-10 * scale, "error {:e}", err);
    }

    #[test]
    fn factored_energy_is_nonnegative_and_exact(
        x in -5.0f64..5.0, y in -5.0f64..5.0, px in -5.0f64..5.0, py in -5.0f64..5.0,
        m in 0.1f64..5.0, a in 0.1f64..5.0,
    ) {
        let params = Params { m, a };
        let hr = energy_reduced(x, y, px, py, params);
        let hd = common::energy_quadratic(x, y, px, py, m, a);
        prop_assert!(hr >= -1e-12 && hd >= -1e-12);
        prop_assert!((hr - hd).abs() <= 1e-12 * hd.abs().max(1e-300) + 1e-300);
    }
}

#[test]
fn conserved_quantities_with_and_without_projection() {
    let params = Params::default();
    let s0 = solve_constraints(0.3, -0.2, 0.5, 0.7, 1.0);
    for projection in [true, false] {
        let cfg = IntegratorConfig { projection, ..Default::default() };
        let rec = integrate_embedded(&s0, params, &cfg);
        assert!(rec.energy_drift() <= 1e-8);
        assert!(rec.angular_momentum_drift().iter().all(|&d| d <= 1e-8));
        if !projection {
            continue;
        }
        let (c2, c3) = rec.max_constraint_residuals();
        assert!(c2 <= 1e-8 && c3 <= 1e-8);
        // On shell H = J·J/(2ma²), with J·J taken in the Minkowski metric.
        for s in &rec.samples {
            let jj = s.j[0] * s.j[0] + s.j[1] * s.j[1] - s.j[2] * s.j[2];
            let hj = jj / (2.0 * params.m * params.a * params.a);
            assert!((hj - s.energy).abs() <= 1e-10 * s.energy.abs(), "{hj} vs {}", s.energy);
        }
    }
}

#[test]
fn intrinsic_and_embedded_agree() {
    let params = Params { m: 1.0, a: 1.3 };
    let is = IntrinsicState { theta: 0.8, phi: 1.1, theta_dot: -0.2, phi_dot: 0.5, t: 0.0 };
    let cfg = IntegratorConfig { t_end: 5.0, sample_every: 1, ..Default::default() };
    let ri = integrate_intrinsic(&is, params, &cfg);
    let re = integrate_embedded(&is.to_embedded(params), params, &cfg);
    assert!(!ri.chart_exit);
    let d = ri
        .samples
        .iter()
        .zip(&re.samples)
        .map(|(x, y)| x.state.x.max_abs_diff(&y.state.x))
        .fold(0.0, f64::max);
    assert!(d <= 1e-6 * params.a, "difference {d:e}");
}

#[test]
fn csv_round_trip_reproduces_diagnostics() {
    let params = Params { m: 1.5, a: 0.8 };
    let s0 = solve_constraints(0.2, 0.1, 0.6, -0.4, params.a);
    let cfg = IntegratorConfig { t_end: 3.0, sample_every: 50, ..Default::default() };
    let rec = integrate_embedded(&s0, params, &cfg);
    let mut buf = Vec::new();
    rec.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x,y,z,p_x,p_y,p_z,theta,phi,H,J1,J2,J3,C2_residual,C3_residual"
    );
    let mut rows = 0;
    for (line, s) in lines.zip(&rec.samples) {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(v.len(), 15);
        assert_eq!(v[0], s.state.t);
        let (x, p) = ([v[1], v[2], v[3]], [v[4], v[5], v[6]]);
        // Cancellation floor of quadratic forms in |x|, |p| evaluated in f64.
        let xn = x.iter().map(|c| c * c).sum::<f64>();
        let pn = p.iter().map(|c| c * c).sum::<f64>();
        let floor = 8.0 * f64::EPSILON * (xn + pn + xn.sqrt() * pn.sqrt() + params.a * params.a);
        let tol = 1e-12_f64.max(floor);
        let h = (p[0] * p[0] + p[1] * p[1] - p[2] * p[2]) / (2.0 * params.m);
        assert!((h - v[9]).abs() <= tol.max(1e-12 * h.abs()));
        let xl = [x[0], x[1], -x[2]];
        // Jⁱ = −ε^{ijk} x_j p_k with ε^{123} = −1.
        let j = [
            xl[1] * p[2] - xl[2] * p[1],
            xl[2] * p[0] - xl[0] * p[2],
            xl[0] * p[1] - xl[1] * p[0],
        ];
        for i in 0..3 {
            assert!((j[i] - v[10 + i]).abs() <= tol, "J{} {} vs {}", i + 1, j[i], v[10 + i]);
        }
        let c2 = x[2] * x[2] - x[0] * x[0] - x[1] * x[1] - params.a * params.a;
        let c3 = x[0] * p[0] + x[1] * p[1] + x[2] * p[2];
        assert!((c2 - v[13]).abs() <= tol && (c3 - v[14]).abs() <= tol);
        rows += 1;
    }
    assert_eq!(rows, rec.samples.len());
}
