use hyperboloid::geometry::{
    chart_inverse, embed, killing_field_ambient, metric, pushforward, scalar_curvature,
    scalar_curvature_at, ChartPoint, MinkVec,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn embedded_points_lie_on_the_surface(t in 0.0f64..4.0, p in 0.0f64..std::f64::consts::TAU, a in 0.1f64..5.0) {
        let x = embed(ChartPoint::new(t, p), a);
        prop_assert!((x.square() + a * a).abs() <= 1e-12 * a * a * t.cosh().powi(2));
    }

    #[test]
    fn chart_round_trip(t in 0.01f64..4.0, p in 0.0f64..std::f64::consts::TAU, a in 0.1f64..5.0) {
        let back = chart_inverse(embed(ChartPoint::new(t, p), a), a).unwrap();
        prop_assert!((back.theta - t).abs() < 1e-12);
        let dp = (back.phi - p).rem_euclid(std::f64::consts::TAU);
        prop_assert!(dp.min(std::f64::consts::TAU - dp) < 1e-12);
    }

    #[test]
    fn killing_fields_are_tangent(t in 0.01f64..3.0, p in 0.0f64..std::f64::consts::TAU, a in 0.1f64..5.0) {
        let x = embed(ChartPoint::new(t, p), a);
        for i in 0..3 {
            let k = killing_field_ambient(i, &x);
            prop_assert!(x.dot(&k).abs() <= 1e-10 * x.euclid_norm() * k.euclid_norm().max(1.0));
        }
    }

    #[test]
    fn metric_is_positive_definite(t in 1e-3f64..5.0, p in 0.0f64..std::f64::consts::TAU, a in 0.1f64..5.0) {
        let g = metric(ChartPoint::new(t, p), a);
        let tr = g[0][0] + g[1][1];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        prop_assert!(tr > 0.0 && det > 0.0);
    }

    #[test]
    fn pushforward_is_tangent(t in 0.01f64..3.0, p in 0.0f64..std::f64::consts::TAU, v in prop::array::uniform2(-2.0f64..2.0)) {
        let pt = ChartPoint::new(t, p);
        let x = embed(pt, 1.0);
        let w: MinkVec = pushforward(pt, 1.0, v);
        prop_assert!(x.dot(&w).abs() <= 1e-10 * x.euclid_norm() * w.euclid_norm().max(1.0));
    }
}

/// Gaussian curvature of `a²(dθ² + sinh²θ dφ²)` from `K = −(√G)''/(a²√G)`
/// with `√G = sinh θ` differentiated numerically; `R = 2K`.
fn curvature_oracle(theta: f64, a: f64) -> f64 {
    let h = 1e-3;
    let s = |t: f64| t.sinh();
    let d2 = (s(theta + h) - 2.0 * s(theta) + s(theta - h)) / (h * h);
    -2.0 * d2 / (a * a * s(theta))
}

#[test]
fn curvature_matches_oracle() {
    for &a in &[0.5, 1.0, 2.0] {
        for &t in &[0.3, 1.0, 2.0] {
            let r = scalar_curvature_at(ChartPoint::new(t, 0.7), a).unwrap();
            assert!((r - curvature_oracle(t, a)).abs() < 1e-5 / (a * a));
        }
        assert!(scalar_curvature(a) < 0.0);
    }
    assert!((scalar_curvature(1.0) + 2.0).abs() < 1e-12);
    assert!((scalar_curvature(2.0) + 0.5).abs() < 1e-12);
}
