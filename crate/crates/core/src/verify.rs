//! The verification suite: every invariant the crate promises, each reduced
//! to a measured number, a tolerance and a verdict.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{
    closed_form_geodesic, energy_direct, energy_reduced, integrate_embedded, integrate_intrinsic,
    EmbeddedState, IntegratorConfig, IntrinsicState, Params,
};
use crate::geometry::{chart_inverse, embed, killing_residual, scalar_curvature, ChartPoint, MinkVec};
use crate::phase::{
    constraint_chain, extended_hamiltonian, parse_expr, poisson, BracketMatrix, Conventions,
    DiracContext, ExprMatrix, PhaseExpr, Var,
};
use crate::spectral::{
    apply_p_with, apply_x, casimir_xj, closure_residual, conical_p0, energy,
    hamiltonian_via_j, laplace_beltrami, laplace_integral, ln_gamma, GeneratorPhase, Grid,
    GridFunction, Recurrence, SpectralMode, Units,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Module {
    PhaseAlgebra,
    Geometry,
    ClassicalSim,
    Spectral,
}

impl Module {
    pub const ALL: [Module; 4] = [
        Module::PhaseAlgebra,
        Module::Geometry,
        Module::ClassicalSim,
        Module::Spectral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Module::PhaseAlgebra => "phase_algebra",
            Module::Geometry => "geometry",
            Module::ClassicalSim => "classical_sim",
            Module::Spectral => "spectral",
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Module {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Module::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown module '{s}'"))
    }
}

/// Deliberate errors for exercising the suite's negative controls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Flip the sign of `ε^{ijk}` in the expected ISO(1,2) brackets.
    pub epsilon_sign: bool,
    /// Leave the `−iħx̂_i/a²` ordering term out of `p̂_i`.
    pub drop_ordering_term: bool,
    /// Flip the sign of the `coth` term in the order recurrence.
    pub flip_recurrence: bool,
    /// Use `Ĵ = +iħK` instead of `−iħK`.
    pub generator_phase: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub only: Option<Module>,
    pub faults: Faults,
    pub seed: u64,
    pub params: Params,
    pub hbar: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            only: None,
            faults: Faults::default(),
            seed: 0x5eed,
            params: Params::default(),
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: Module,
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub seed: u64,
    /// Sorted by name.
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Sink {
    module: Module,
    checks: Vec<Check>,
}

impl Sink {
    /// Passes when `measured ≤ tolerance`; NaN fails.
    fn upper(&mut self, name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) {
        self.push(name, measured, tolerance, measured <= tolerance, detail.into());
    }

    fn push(&mut self, name: &str, measured: f64, tolerance: f64, pass: bool, detail: String) {
        self.checks.push(Check {
            module: self.module,
            name: format!("{}.{name}", self.module),
            tolerance,
            measured,
            pass,
            detail,
        });
    }

    /// Second-order convergence from residuals at `h` and `h/2`. Residuals
    /// already at roundoff count as converged.
    fn order2(&mut self, name: &str, coarse: f64, fine: f64) {
        let detail = format!("residual {coarse:.3e} at h, {fine:.3e} at h/2");
        if coarse < 1e-11 && fine < 1e-11 {
            self.push(name, 0.0, 0.2, true, format!("{detail}; exact to roundoff"));
            return;
        }
        let order = (coarse / fine).log2();
        let dev = (order - 2.0).abs();
        self.push(name, dev, 0.2, dev <= 0.2, format!("{detail}; order {order:.3}"));
    }
}

pub fn run(opts: &VerifyOptions) -> Report {
    let mut checks = Vec::new();
    for module in Module::ALL {
        if opts.only.is_some_and(|m| m != module) {
            continue;
        }
        let mut sink = Sink { module, checks: Vec::new() };
        match module {
            Module::PhaseAlgebra => phase_checks(&mut sink, opts),
            Module::Geometry => geometry_checks(&mut sink, opts),
            Module::ClassicalSim => classical_checks(&mut sink, opts),
            Module::Spectral => spectral_checks(&mut sink, opts),
        }
        checks.extend(sink.checks);
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Report { seed: opts.seed, checks }
}

fn e(s: &str) -> PhaseExpr {
    parse_expr(s).expect("built-in expression parses")
}

fn phase_checks(sink: &mut Sink, opts: &VerifyOptions) {
    let h = extended_hamiltonian();
    let cs = match constraint_chain(&h) {
        Ok(cs) => cs,
        Err(err) => {
            sink.push("constraint_chain", f64::NAN, 0.0, false, err.to_string());
            return;
        }
    };
    let c2 = e("z^2 - x^2 - y^2 - a^2");
    let expected = [
        e("p_lambda"),
        c2.clone(),
        e("x*p_x + y*p_y + z*p_z"),
        &(&h + &(&e("2*lambda") * &c2)) + &e("lambda*a^2"),
    ];
    let mismatches = if cs.len() == 4 {
        (0..4).filter(|&i| cs.get(i) != &expected[i]).count()
    } else {
        4
    };
    sink.upper(
        "constraint_chain",
        mismatches as f64,
        0.0,
        format!("{} constraints: {}", cs.len(), cs.constraints().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")),
    );

    match BracketMatrix::new(&cs) {
        Ok(bm) => {
            let p2 = "(p_x^2 + p_y^2 - p_z^2)";
            let grid = |rows: [[String; 4]; 4]| ExprMatrix::from_fn(4, |i, j| e(&rows[i][j]));
            let s = |x: &str| x.to_string();
            let m = grid([
                [s("0"), s("0"), s("0"), s("-a^2")],
                [s("0"), s("0"), s("2*a^2"), s("0")],
                [s("0"), s("-2*a^2"), s("0"), format!("2*{p2}/m")],
                [s("a^2"), s("0"), format!("-2*{p2}/m"), s("0")],
            ]);
            let inv = grid([
                [s("0"), format!("{p2}/(m*a^4)"), s("0"), s("1/a^2")],
                [format!("-{p2}/(m*a^4)"), s("0"), s("-1/(2*a^2)"), s("0")],
                [s("0"), s("1/(2*a^2)"), s("0"), s("0")],
                [s("-1/a^2"), s("0"), s("0"), s("0")],
            ]);
            let count = |a: &ExprMatrix, b: &ExprMatrix| {
                (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&ij| a[ij] != b[ij]).count()
            };
            sink.upper("bracket_matrix", count(&bm.m, &m) as f64, 0.0, "entries differing from the expected M");
            sink.upper("bracket_inverse", count(&bm.inverse, &inv) as f64, 0.0, "entries differing from the expected inverse");
            let id = ExprMatrix::identity(4);
            sink.upper("m_times_inverse", count(&bm.m.mul(&bm.inverse), &id) as f64, 0.0, "entries of M·M⁻¹ − I that are nonzero");
        }
        Err(err) => sink.push("bracket_matrix", f64::NAN, 0.0, false, err.to_string()),
    }

    let ctx = DiracContext::hyperboloid();
    for c in ctx.canonical_table() {
        let ok = c.holds();
        sink.push(&format!("dirac{}", c.name), if ok { 0.0 } else { 1.0 }, 0.0, ok, format!("{} = {}", c.name, c.computed));
    }
    let conv = Conventions {
        epsilon_sign: if opts.faults.epsilon_sign { -1 } else { 1 },
    };
    for c in ctx.verify_iso12(conv).checks {
        let ok = c.holds();
        let name = format!("iso12{}", c.name.replace(' ', "_"));
        sink.push(&name, if ok { 0.0 } else { 1.0 }, 0.0, ok, format!("computed {}, expected {}", c.computed, c.expected));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let trials = 20;
    let mut failures = 0;
    for _ in 0..trials {
        let [f, g, k] = [0; 3].map(|_| random_poly(&mut rng));
        let jac = &(&poisson(&f, &poisson(&g, &k)) + &poisson(&g, &poisson(&k, &f))) + &poisson(&k, &poisson(&f, &g));
        if !jac.is_zero() {
            failures += 1;
        }
    }
    sink.upper("jacobi", failures as f64, 0.0, format!("{trials} random triples, seed {}", opts.seed));
}

/// A random polynomial in the phase-space variables with small integer
/// coefficients, up to four terms of degree ≤ 3.
pub fn random_poly(rng: &mut impl Rng) -> PhaseExpr {
    const VARS: [Var; 8] = [
        Var::Lambda,
        Var::X,
        Var::Y,
        Var::Z,
        Var::PLambda,
        Var::Px,
        Var::Py,
        Var::Pz,
    ];
    let mut out = PhaseExpr::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let mut term = PhaseExpr::int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..=3) {
            term = &term * &PhaseExpr::var(VARS[rng.gen_range(0..VARS.len())]);
        }
        out = &out + &term;
    }
    out
}

fn geometry_checks(sink: &mut Sink, opts: &VerifyOptions) {
    let a = opts.params.a;
    let r = scalar_curvature(a);
    sink.upper("scalar_curvature", (r + 2.0 / (a * a)).abs() * a * a, 1e-10, format!("R = {r}"));
    let points = [(0.3, 0.1), (0.7, 2.0), (1.5, 4.0), (2.5, 5.9)];
    for i in 0..3 {
        let worst = points
            .iter()
            .map(|&(t, p)| killing_residual(i, ChartPoint::new(t, p), a, 1e-4).unwrap_or(f64::NAN))
            .fold(0.0, f64::max);
        sink.upper(&format!("killing{}", i + 1), worst, 1e-6, "max |L_K g| over sample points");
    }
    let worst = points
        .iter()
        .map(|&(t, p)| {
            let q = chart_inverse(embed(ChartPoint::new(t, p), a), a).expect("point on the sheet");
            (q.theta - t).abs().max((q.phi - p).abs())
        })
        .fold(0.0, f64::max);
    sink.upper("chart_roundtrip", worst, 1e-12, "chart → embedding → chart");
}

fn classical_checks(sink: &mut Sink, opts: &VerifyOptions) {
    let params = opts.params;
    let a = params.a;
    let s0 = EmbeddedState::new(MinkVec::new(0.0, 0.0, a), MinkVec::new(1.0, 0.0, 0.0));
    let cfg = |dt: f64| IntegratorConfig {
        dt,
        t_end: 10.0,
        sample_every: 1,
        ..Default::default()
    };
    let max_err = |rec: &crate::classical::TrajectoryRecord| {
        rec.samples
            .iter()
            .map(|s| s.state.x.max_abs_diff(&closed_form_geodesic(&s0, params, s.state.t).x))
            .fold(0.0, f64::max)
    };
    let fine = integrate_embedded(&s0, params, &cfg(1e-3));
    let coarse = integrate_embedded(&s0, params, &cfg(2e-3));
    let (e1, e2) = (max_err(&fine), max_err(&coarse));
    sink.upper("rk4_vs_closed_form", e1 / a, 1e-8, "max position error / a, dt = 1e-3, t in [0, 10]");
    let ratio = e2 / e1;
    sink.upper("rk4_error_ratio", (ratio - 16.0).abs(), 2.0, format!("error ratio {ratio:.3} between dt = 2e-3 and 1e-3"));
    sink.upper("energy_drift", fine.energy_drift(), 1e-8, "max relative |H − H₀|");
    let jd = fine.angular_momentum_drift().into_iter().fold(0.0, f64::max);
    sink.upper("angular_momentum_drift", jd, 1e-8, "max |J − J₀| / |J₀|");
    let (c2, c3) = fine.max_constraint_residuals();
    sink.upper("constraint_c2", c2 / (a * a), 1e-8, "max |C₂| / a², projection on");
    sink.upper("constraint_c3", c3, 1e-8, "max |C₃|, projection on");

    let is = IntrinsicState {
        theta: 0.5,
        phi: 0.3,
        theta_dot: 0.4,
        phi_dot: 0.6,
        t: 0.0,
    };
    let cfg5 = IntegratorConfig {
        t_end: 5.0,
        sample_every: 1,
        ..Default::default()
    };
    let ri = integrate_intrinsic(&is, params, &cfg5);
    let re = integrate_embedded(&is.to_embedded(params), params, &cfg5);
    let d = if ri.chart_exit {
        f64::NAN
    } else {
        ri.samples
            .iter()
            .zip(&re.samples)
            .map(|(x, y)| x.state.x.max_abs_diff(&y.state.x))
            .fold(0.0, f64::max)
    };
    sink.upper("intrinsic_vs_embedded", d / a, 1e-6, "max position difference / a, t in [0, 5]");

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xe4e5);
    let (mut min_h, mut worst_rel): (f64, f64) = (f64::INFINITY, 0.0);
    for _ in 0..10_000 {
        let [x, y] = [0; 2].map(|_| rng.gen_range(-5.0..5.0) * a);
        let [px, py] = [0; 2].map(|_| rng.gen_range(-5.0..5.0));
        let hd = energy_direct(x, y, px, py, params);
        let hr = energy_reduced(x, y, px, py, params);
        min_h = min_h.min(hd).min(hr);
        if hd != 0.0 {
            worst_rel = worst_rel.max(((hd - hr) / hd).abs());
        }
    }
    sink.upper("energy_lower_bound", (-min_h).max(0.0), 1e-12, format!("min H = {min_h:e} over 10⁴ states, seed {}", opts.seed));
    sink.upper("energy_factored_form", worst_rel, 1e-12, "max relative difference of factored and direct H");
}

fn bump(grid: &std::sync::Arc<Grid>, center: f64, width: f64, f: impl Fn(f64) -> Complex64) -> GridFunction {
    GridFunction::from_fn(grid, |t, p| f(p) * (-((t - center) / width).powi(2)).exp())
}

/// The fixed smooth test set for operator identities.
fn test_set(grid: &std::sync::Arc<Grid>) -> [GridFunction; 2] {
    [
        bump(grid, 1.2, 0.15, |p| Complex64::from_polar(1.0, p) + 0.3 * (2.0 * p).cos()),
        bump(grid, 1.5, 0.2, |p| Complex64::new(p.sin(), 0.5 * (3.0 * p).cos())),
    ]
}

fn spectral_checks(sink: &mut Sink, opts: &VerifyOptions) {
    let u = Units {
        hbar: opts.hbar,
        m: opts.params.m,
        a: opts.params.a,
    };
    let phase = if opts.faults.generator_phase {
        GeneratorPhase(1.0)
    } else {
        GeneratorPhase::default()
    };

    let worst = (0..=200)
        .map(|k| {
            let l = k as f64 * 0.1;
            let g = ln_gamma(Complex64::new(0.5, l));
            let rhs = std::f64::consts::PI / (std::f64::consts::PI * l).cosh();
            ((2.0 * g.re).exp() / rhs - 1.0).abs()
        })
        .fold(0.0, f64::max);
    sink.upper("gamma_identity", worst, 1e-10, "|Γ(½+iλ)|² vs π/cosh(πλ), λ in [0, 20]");

    let mut worst: f64 = 0.0;
    for &l in &[0.0, 0.5, 1.0, 2.0, 4.0] {
        for &t in &[0.05, 0.5, 1.0, 2.0, 3.0] {
            let (q, scale) = laplace_integral(l, 0, t);
            worst = worst.max((conical_p0(l, t) - q).abs() / scale);
        }
    }
    sink.upper("conical_p0", worst, 1e-10, "Mehler–Dirichlet vs Laplace integral on a 5×5 (λ, θ) grid");

    let rec = Recurrence {
        sign: if opts.faults.flip_recurrence { -1.0 } else { 1.0 },
    };
    sink.upper("order_recurrence", rec.max_deviation(), 1e-8, "recurrence vs Laplace integral, 1 ≤ |n| ≤ 5");

    let grids = [2e-3, 1e-3].map(|h| Grid::new(0.1, 3.0, h, 8).expect("valid grid"));
    for &l in &[0.5, 1.0, 2.0] {
        for n in 0..=2 {
            let mode = SpectralMode { lambda: l, n };
            let r = grids.each_ref().map(|g| mode.eigen_residual(g, &u).unwrap_or(f64::NAN));
            sink.upper(&format!("eigen_residual_l{l}_n{n}"), r[1], 1e-4, format!("E = {}", energy(l, &u)));
            sink.order2(&format!("eigen_order_l{l}_n{n}"), r[0], r[1]);
        }
    }

    let pair = [0.01, 0.005].map(|h| Grid::new(0.1, 3.0, h, 16).expect("valid grid"));
    let sets = pair.each_ref().map(test_set);
    let rel = |f: &GridFunction, r: GridFunction| r.interior_norm() / f.norm();
    let measure = |op: &dyn Fn(&GridFunction) -> f64| -> [f64; 2] {
        [0, 1].map(|k| sets[k].iter().map(op).fold(0.0, f64::max))
    };
    for (i, j) in [(1, 2), (2, 3), (3, 1)] {
        let r = measure(&|f| rel(f, closure_residual(i, j, f, u.hbar, phase)));
        sink.order2(&format!("j_closure_{i}{j}"), r[0], r[1]);
    }
    let r = measure(&|f| rel(f, casimir_xj(f, &u)));
    sink.order2("casimir_xj", r[0], r[1]);
    let r = measure(&|f| rel(f, hamiltonian_via_j(f, &u).sub(&laplace_beltrami(f, &u))));
    sink.order2("h_via_j", r[0], r[1]);
    let r = measure(&|f| {
        let lhs = apply_x(1, &apply_p_with(1, f, &u, !opts.faults.drop_ordering_term), u.a)
            .sub(&apply_p_with(1, &apply_x(1, f, u.a), &u, !opts.faults.drop_ordering_term));
        let expect = f.mul_fn(|t, p| {
            let x = crate::spectral::embedding(1, u.a, t, p);
            Complex64::new(0.0, u.hbar * (1.0 + x * x / (u.a * u.a)))
        });
        rel(f, lhs.sub(&expect))
    });
    sink.order2("x1_p1_commutator", r[0], r[1]);

    let [f, g] = &sets[1];
    let scale = f.norm() * g.norm();
    let mut herm_j: f64 = 0.0;
    for i in 1..=3 {
        let jf = |x: &GridFunction| crate::spectral::apply_j_with(i, x, u.hbar, phase);
        herm_j = herm_j.max((f.inner(&jf(g)) - jf(f).inner(g)).norm() / scale);
    }
    sink.upper("j_hermiticity", herm_j, 1e-12, "max_i |⟨f,Ĵg⟩ − ⟨Ĵf,g⟩| / ‖f‖‖g‖");
    let herm_h = (f.inner(&laplace_beltrami(g, &u)) - laplace_beltrami(f, &u).inner(g)).norm() / scale;
    sink.upper("h_hermiticity", herm_h, 1e-10, "|⟨f,Ĥg⟩ − ⟨Ĥf,g⟩| / ‖f‖‖g‖");

    let p_herm = |sets: &[GridFunction; 2], with_term: bool| {
        let [f, g] = sets;
        let scale = f.norm() * g.norm();
        (1..=3)
            .map(|i| {
                let p = |x: &GridFunction| apply_p_with(i, x, &u, with_term);
                (f.inner(&p(g)) - p(f).inner(g)).norm() / scale
            })
            .fold(0.0, f64::max)
    };
    let keep = !opts.faults.drop_ordering_term;
    let r = [p_herm(&sets[0], keep), p_herm(&sets[1], keep)];
    sink.order2("p_hermiticity_order", r[0], r[1]);

    let fine = Grid::new(0.5, 3.0, 2.5e-4, 16).expect("valid grid");
    let wide = [
        bump(&fine, 1.6, 0.3, |p| Complex64::from_polar(1.0, p)),
        bump(&fine, 1.8, 0.3, |p| Complex64::new(p.sin(), 0.5 * (2.0 * p).cos())),
    ];
    let ph = p_herm(&wide, keep);
    sink.upper("p_hermiticity", ph, 1e-6, "max_i |⟨f,p̂g⟩ − ⟨p̂f,g⟩| / ‖f‖‖g‖ at h = 2.5e-4");
    let control = p_herm(&sets[1], false);
    sink.push(
        "p_ordering_control",
        control,
        1e-2,
        control > 1e-2,
        "without the ordering term p̂ must fail hermiticity by more than the tolerance".into(),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_names_round_trip() {
        for m in Module::ALL {
            assert_eq!(m.name().parse::<Module>().unwrap(), m);
        }
        assert!("nope".parse::<Module>().is_err());
    }

    #[test]
    fn filter_selects_one_module() {
        let r = run(&VerifyOptions {
            only: Some(Module::Geometry),
            ..Default::default()
        });
        assert!(r.checks.iter().all(|c| c.module == Module::Geometry));
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}
