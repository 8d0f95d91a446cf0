//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Oracles are shared with the core crate's integration tests and do not
//! call into the library.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hyperboloid::classical::{
    energy_reduced, integrate_embedded, integrate_intrinsic, EmbeddedState, IntegratorConfig,
    IntrinsicState, Params, TrajectoryRecord,
};
use hyperboloid::geometry::MinkVec;
use hyperboloid::phase::{
    angular_momentum, bracket_matrix, casimirs, constraint_chain, coord, extended_hamiltonian,
    momentum, parse_expr, reduce_on_shell, DiracContext, ExprMatrix, PhaseExpr,
};
use hyperboloid::spectral::{
    apply_j, apply_p_with, apply_x, casimir_xj, closure_residual, conical_p0, conical_pn,
    embedding, hamiltonian_via_j, laplace_beltrami, ln_gamma, GeneratorPhase, Grid, GridFunction,
    SpectralMode, Units,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn e(s: &str) -> PhaseExpr {
    parse_expr(s).expect("expression parses")
}

fn on_shell_equal(a: &PhaseExpr, b: &PhaseExpr) -> bool {
    reduce_on_shell(&(a - b)).is_zero()
}

fn criterion_1() -> Outcome {
    let cs = match constraint_chain(&extended_hamiltonian()) {
        Ok(cs) => cs,
        Err(err) => return outcome(false, err.to_string()),
    };
    let h_tilde = e("(p_x^2 + p_y^2 - p_z^2)/(2*m) + lambda*(x^2 + y^2 - z^2 + a^2)");
    let c2 = e("z^2 - x^2 - y^2 - a^2");
    let want = [
        e("p_lambda"),
        c2.clone(),
        e("x*p_x + y*p_y + z*p_z"),
        &(&h_tilde + &(&e("2*lambda") * &c2)) + &e("lambda*a^2"),
    ];
    if cs.len() != 4 {
        return outcome(false, format!("{} constraints", cs.len()));
    }
    let bad: Vec<usize> = (0..4)
        .filter(|&i| cs.get(i).to_string() != want[i].to_string())
        .map(|i| i + 1)
        .collect();
    outcome(bad.is_empty(), format!("printed forms differing: {bad:?}"))
}

fn criterion_2() -> Outcome {
    let cs = constraint_chain(&extended_hamiltonian()).expect("chain");
    let bm = match bracket_matrix(&cs) {
        Ok(bm) => bm,
        Err(err) => return outcome(false, err.to_string()),
    };
    let p2 = "(p_x^2 + p_y^2 - p_z^2)";
    let m = [
        ["0", "0", "0", "-a^2"].map(String::from),
        ["0", "0", "2*a^2", "0"].map(String::from),
        ["0".into(), "-2*a^2".into(), "0".into(), format!("2*{p2}/m")],
        ["a^2".into(), "0".into(), format!("-2*{p2}/m"), "0".into()],
    ];
    let inv = [
        ["0".into(), format!("{p2}/(m*a^4)"), "0".into(), "1/a^2".into()],
        [format!("-{p2}/(m*a^4)"), "0".into(), "-1/(2*a^2)".into(), "0".into()],
        ["0", "1/(2*a^2)", "0", "0"].map(String::from),
        ["-1/a^2", "0", "0", "0"].map(String::from),
    ];
    let mut mismatches = 0;
    for i in 0..4 {
        for j in 0..4 {
            mismatches += (bm.m[(i, j)] != e(&m[i][j])) as usize;
            mismatches += (bm.inverse[(i, j)] != e(&inv[i][j])) as usize;
        }
    }
    let prod = bm.m.mul(&bm.inverse);
    let id = ExprMatrix::identity(4);
    let off = (0..16).filter(|k| prod[(k / 4, k % 4)] != id[(k / 4, k % 4)]).count();
    outcome(
        mismatches == 0 && off == 0,
        format!("{mismatches} entries differ from the display, M·M⁻¹ − I has {off} nonzero entries"),
    )
}

fn criterion_3() -> Outcome {
    let ctx = DiracContext::hyperboloid();
    let g = [1, 1, -1];
    let eps_up = |i: usize, j: usize, k: usize| -> i64 {
        // ε^{123} = −1
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => -1,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => 1,
            _ => 0,
        }
    };
    let a2 = e("a^2");
    let x_low = |i: usize| PhaseExpr::int(g[i]) * coord(i);
    let j_low = |i: usize| PhaseExpr::int(g[i]) * angular_momentum(i);
    let mut total = 0;
    let mut failed = Vec::new();
    let mut check = |name: String, got: PhaseExpr, want: PhaseExpr| {
        total += 1;
        if !on_shell_equal(&got, &want) {
            failed.push(name);
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            check(format!("{{x{i},x{j}}}"), ctx.bracket(&coord(i), &coord(j)), PhaseExpr::zero());
            let delta = PhaseExpr::int((i == j) as i64);
            check(
                format!("{{x{i},p{j}}}"),
                ctx.bracket(&coord(i), &momentum(j)),
                &delta + &(&(&coord(i) * &x_low(j)) / &a2),
            );
            check(
                format!("{{p{i},p{j}}}"),
                ctx.bracket(&momentum(i), &momentum(j)),
                &(&(&x_low(i) * &momentum(j)) - &(&x_low(j) * &momentum(i))) / &a2,
            );
            let jx = (0..3).fold(PhaseExpr::zero(), |acc, k| &acc - &(PhaseExpr::int(eps_up(i, j, k)) * x_low(k)));
            check(format!("{{J{i},x{j}}}"), ctx.bracket(&angular_momentum(i), &coord(j)), jx);
            let jj = (0..3).fold(PhaseExpr::zero(), |acc, k| &acc - &(PhaseExpr::int(eps_up(i, j, k)) * j_low(k)));
            check(format!("{{J{i},J{j}}}"), ctx.bracket(&angular_momentum(i), &angular_momentum(j)), jj);
        }
    }
    let [xx, xj] = casimirs();
    for (cn, c) in [("x·x", &xx), ("x·J", &xj)] {
        for i in 0..3 {
            for (gn, gen) in [("x", coord(i)), ("p", momentum(i)), ("J", angular_momentum(i))] {
                check(format!("{{{cn},{gn}{i}}}"), ctx.bracket(c, &gen), PhaseExpr::zero());
            }
        }
    }
    outcome(failed.is_empty(), format!("{} of {total} relations fail {:?}", failed.len(), failed))
}

fn apex_start() -> EmbeddedState {
    EmbeddedState::new(MinkVec::new(0.0, 0.0, 1.0), MinkVec::new(1.0, 0.0, 0.0))
}

fn run_embedded(dt: f64) -> TrajectoryRecord {
    let cfg = IntegratorConfig { dt, t_end: 10.0, sample_every: 1, projection: true, ..Default::default() };
    integrate_embedded(&apex_start(), Params::default(), &cfg)
}

fn oracle_error(rec: &TrajectoryRecord) -> f64 {
    let s0 = apex_start();
    rec.samples
        .iter()
        .map(|s| {
            let want = common::geodesic(s0.x.0, s0.p.0, 1.0, s.state.t);
            (0..3).map(|i| (s.state.x.0[i] - want[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn criterion_4() -> Outcome {
    let e1 = oracle_error(&run_embedded(1e-3));
    let e2 = oracle_error(&run_embedded(2e-3));
    let ratio = e2 / e1;
    outcome(
        e1 <= 1e-8 && (ratio - 16.0).abs() <= 2.0,
        format!("max error {e1:.3e} (≤ 1e-8), ratio {ratio:.2} for dt 2e-3 → 1e-3"),
    )
}

fn criterion_5() -> Outcome {
    let rec = run_embedded(1e-3);
    let h0 = rec.samples[0].energy;
    let hd = rec.samples.iter().map(|s| (s.energy - h0).abs() / h0.abs()).fold(0.0, f64::max);
    let j0 = rec.samples[0].j;
    let jn = j0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let jd = rec
        .samples
        .iter()
        .flat_map(|s| (0..3).map(move |i| (s.j[i] - j0[i]).abs() / jn))
        .fold(0.0, f64::max);
    let cmax = rec.samples.iter().map(|s| s.c2.abs().max(s.c3.abs())).fold(0.0, f64::max);
    let params = Params::default();
    let is = IntrinsicState { theta: 0.5, phi: 0.3, theta_dot: 0.4, phi_dot: 0.6, t: 0.0 };
    let cfg = IntegratorConfig { t_end: 10.0, sample_every: 1, ..Default::default() };
    let ri = integrate_intrinsic(&is, params, &cfg);
    let re = integrate_embedded(&is.to_embedded(params), params, &cfg);
    let d = ri
        .samples
        .iter()
        .zip(&re.samples)
        .map(|(a, b)| a.state.x.max_abs_diff(&b.state.x))
        .fold(0.0, f64::max);
    let pass = hd <= 1e-8 && jd <= 1e-8 && cmax <= 1e-8 && !ri.chart_exit && d <= 1e-6 * params.a;
    outcome(
        pass,
        format!("H drift {hd:.1e}, J drift {jd:.1e}, max |C| {cmax:.1e}, intrinsic vs embedded {d:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
    let (mut min_h, mut worst): (f64, f64) = (f64::INFINITY, 0.0);
    for _ in 0..10_000 {
        let m = rng.gen_range(0.1..5.0);
        let a = rng.gen_range(0.1..5.0);
        let [x, y, px, py] = [0; 4].map(|_| rng.gen_range(-5.0..5.0));
        let hd = common::energy_quadratic(x, y, px, py, m, a);
        let hr = energy_reduced(x, y, px, py, Params { m, a });
        min_h = min_h.min(hd).min(hr);
        if hd != 0.0 {
            worst = worst.max(((hr - hd) / hd).abs());
        }
    }
    outcome(
        min_h >= -1e-12 && worst <= 1e-12,
        format!("min H {min_h:.3e}, factored vs direct {worst:.1e} relative"),
    )
}

fn criterion_7() -> Outcome {
    let u = Units::default();
    let grids = [2e-3, 1e-3].map(|h| Grid::new(0.1, 3.0, h, 8).expect("grid"));
    let mut worst_r: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    for &l in &[0.5, 1.0, 2.0] {
        for n in 0..=2 {
            let mode = SpectralMode::new(l, n).expect("mode");
            let r = grids.each_ref().map(|g| mode.eigen_residual(g, &u).unwrap_or(f64::NAN));
            worst_r = worst_r.max(r[1]);
            worst_dev = worst_dev.max(((r[0] / r[1]).log2() - 2.0).abs());
        }
    }
    outcome(
        worst_r < 1e-4 && worst_dev <= 0.2,
        format!("max residual {worst_r:.2e} at h = 1e-3, max |order − 2| {worst_dev:.3}"),
    )
}

fn bump(g: &Arc<Grid>, c: f64, w: f64, f: impl Fn(f64) -> Complex64) -> GridFunction {
    GridFunction::from_fn(g, |t, p| f(p) * (-((t - c) / w).powi(2)).exp())
}

fn criterion_8() -> Outcome {
    let u = Units::default();
    let sets: Vec<[GridFunction; 2]> = [0.01, 0.005]
        .iter()
        .map(|&h| {
            let g = Grid::new(0.1, 3.0, h, 16).expect("grid");
            [
                bump(&g, 1.2, 0.15, |p| Complex64::from_polar(1.0, p) + 0.3 * (2.0 * p).cos()),
                bump(&g, 1.5, 0.2, |p| Complex64::new(p.sin(), 0.5 * (3.0 * p).cos())),
            ]
        })
        .collect();
    let measure = |op: &dyn Fn(&GridFunction) -> f64| -> [f64; 2] {
        [0, 1].map(|k| sets[k].iter().map(op).fold(0.0, f64::max))
    };
    let rel = |f: &GridFunction, r: GridFunction| r.interior_norm() / f.norm();
    // Second order, or already at roundoff.
    let order_ok = |r: [f64; 2]| (r[0] < 1e-11 && r[1] < 1e-11) || ((r[0] / r[1]).log2() - 2.0).abs() <= 0.2;
    let p_herm = |fg: &[GridFunction; 2], with: bool| {
        let scale = fg[0].norm() * fg[1].norm();
        (1..=3)
            .map(|i| {
                let p = |x: &GridFunction| apply_p_with(i, x, &u, with);
                (fg[0].inner(&p(&fg[1])) - p(&fg[0]).inner(&fg[1])).norm() / scale
            })
            .fold(0.0, f64::max)
    };
    let mut parts = Vec::new();
    let mut pass = true;
    for (i, j) in [(1, 2), (2, 3), (3, 1)] {
        let r = measure(&|f| rel(f, closure_residual(i, j, f, u.hbar, GeneratorPhase::default())));
        pass &= order_ok(r);
        parts.push(format!("[J{i},J{j}] {:.1e}→{:.1e}", r[0], r[1]));
    }
    let r = measure(&|f| rel(f, casimir_xj(f, &u)));
    pass &= order_ok(r);
    parts.push(format!("x·J {:.1e}", r[1]));
    let r = measure(&|f| rel(f, hamiltonian_via_j(f, &u).sub(&laplace_beltrami(f, &u))));
    pass &= order_ok(r);
    parts.push(format!("Ĥ via Ĵ {:.1e}→{:.1e}", r[0], r[1]));
    let r = [p_herm(&sets[0], true), p_herm(&sets[1], true)];
    pass &= order_ok(r);
    parts.push(format!("p̂ herm {:.1e}→{:.1e}", r[0], r[1]));
    let control = p_herm(&sets[1], false);
    pass &= control > 1e-2;
    parts.push(format!("control {control:.2}"));
    // Sanity on the generators themselves: Ĵ³ is diagonal with eigenvalue nħ.
    let g = Grid::new(0.5, 2.0, 0.01, 8).expect("grid");
    let f = bump(&g, 1.2, 0.2, |p| Complex64::from_polar(1.0, 2.0 * p));
    let j3 = apply_j(3, &f, 1.0).sub(&f.scale(2.0.into())).norm() / f.norm();
    pass &= j3 < 1e-12;
    let x1 = apply_x(1, &f, 1.0).sub(&f.mul_fn(|t, p| embedding(1, 1.0, t, p).into())).norm();
    pass &= x1 == 0.0;
    outcome(pass, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let mut p0: f64 = 0.0;
    for &l in &[0.0, 0.5, 1.0, 2.0, 4.0] {
        for &t in &[0.05, 0.5, 1.0, 2.0, 3.0] {
            let want = common::mehler_p0(l, t);
            p0 = p0.max((conical_p0(l, t) - want).abs() / want.abs().max(1e-3));
        }
    }
    let gamma = (0..=400)
        .map(|k| {
            let l = k as f64 * 0.05;
            let g2 = (2.0 * ln_gamma(Complex64::new(0.5, l)).re).exp();
            (g2 * (std::f64::consts::PI * l).cosh() / std::f64::consts::PI - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let mut rec: f64 = 0.0;
    for &l in &[0.5, 1.0, 2.0] {
        for &t in &[0.05, 0.5, 1.0, 2.0, 3.0] {
            for n in 1..=5 {
                let want = common::laplace_pn(l, n, t);
                let got = conical_pn(l, n, t).unwrap_or(f64::NAN);
                rec = rec.max((got - want).abs() / want.abs().max(1e-3));
            }
        }
    }
    outcome(
        p0 <= 1e-10 && gamma <= 1e-10 && rec <= 1e-8,
        format!("P⁰ {p0:.1e}, |Γ|² identity {gamma:.1e}, orders 1..5 {rec:.1e}"),
    )
}

fn verify_run(inject: Option<&str>) -> (Option<i32>, Vec<String>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperboloid"));
    cmd.args(["--format", "json", "verify"]);
    if let Some(fault) = inject {
        cmd.args(["--inject", fault]);
    }
    let out = cmd.output().expect("binary runs");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let failures = doc["failures"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
        .unwrap_or_default();
    (out.status.code(), failures)
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let (code, failures) = verify_run(None);
    pass &= code == Some(0) && failures.is_empty();
    parts.push(format!("defaults → {code:?}"));
    let faults = [
        ("epsilon-sign", "phase_algebra.iso12{J1,J2}"),
        ("drop-ordering-term", "spectral.p_hermiticity"),
        ("flip-recurrence", "spectral.order_recurrence"),
        ("generator-phase", "spectral.j_closure_12"),
    ];
    for (fault, expect) in faults {
        let (code, failures) = verify_run(Some(fault));
        let named = failures.iter().any(|f| f == expect);
        pass &= code == Some(1) && named;
        parts.push(format!("{fault} → {code:?}{}", if named { format!(" naming {expect}") } else { " without the expected check".into() }));
    }
    outcome(pass, parts.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("constraint chain", criterion_1, Some(Duration::from_secs(1))),
        ("bracket matrix and inverse", criterion_2, Some(Duration::from_secs(1))),
        ("Dirac bracket relations", criterion_3, Some(Duration::from_secs(5))),
        ("RK4 vs closed form", criterion_4, Some(Duration::from_secs(10))),
        ("conservation", criterion_5, None),
        ("energy lower bound", criterion_6, None),
        ("spectral eigen-residual", criterion_7, Some(Duration::from_secs(60))),
        ("grid operator identities", criterion_8, None),
        ("special functions", criterion_9, None),
        ("verify exit codes", criterion_10, None),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = f();
        let took = start.elapsed();
        if let Some(b) = budget {
            if took > *b {
                o.pass = false;
                o.detail.push_str(&format!("; over the {b:?} budget"));
            }
        }
        failed += !o.pass as usize;
        println!(
            "criterion {:>2} {:<28} {}  [{:.2?}]  {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            took,
            o.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
