use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use hyperboloid::classical::{integrate_embedded, EmbeddedState, IntegratorConfig, Params};
use hyperboloid::geometry::MinkVec;
use hyperboloid::phase::{
    angular_momentum, constraint_chain, coord, extended_hamiltonian, momentum, BracketMatrix,
    Conventions, DiracContext, ExprMatrix, PhaseExpr,
};
use hyperboloid::spectral::{Grid, SpectralMode, Units};
use hyperboloid::verify::{self, Faults, Module, VerifyOptions};

use crate::{Context, Failure, Fault, Format, SimulateArgs, SpectrumArgs, VerifyArgs, EXIT_TOLERANCE, EXIT_VERIFY};

const COORD_NAMES: [&str; 3] = ["x", "y", "z"];
const MOMENTUM_NAMES: [&str; 3] = ["p_x", "p_y", "p_z"];
const J_NAMES: [&str; 3] = ["J1", "J2", "J3"];

fn params(ctx: &Context) -> Params {
    Params {
        m: ctx.config.m,
        a: ctx.config.a,
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn matrix_rows(m: &ExprMatrix) -> Vec<Vec<String>> {
    (0..m.dim()).map(|i| m.row(i).iter().map(|e| e.to_string()).collect()).collect()
}

/// `(name, value)` for every Dirac bracket of the generators, in a fixed order.
fn dirac_table(ctx: &DiracContext) -> Vec<(String, PhaseExpr)> {
    let gens: Vec<(&str, PhaseExpr)> = (0..3)
        .map(|i| (COORD_NAMES[i], coord(i)))
        .chain((0..3).map(|i| (MOMENTUM_NAMES[i], momentum(i))))
        .chain((0..3).map(|i| (J_NAMES[i], angular_momentum(i))))
        .collect();
    let pairs: [(std::ops::Range<usize>, std::ops::Range<usize>); 5] =
        [(0..3, 0..3), (0..3, 3..6), (3..6, 3..6), (6..9, 0..3), (6..9, 6..9)];
    let mut out = Vec::new();
    for (left, right) in pairs {
        for i in left {
            for j in right.clone() {
                let (a, b) = (&gens[i], &gens[j]);
                out.push((format!("{{{},{}}}", a.0, b.0), ctx.bracket(&a.1, &b.1)));
            }
        }
    }
    out
}

pub fn derive(ctx: &Context) -> Result<u8, Failure> {
    let h = extended_hamiltonian();
    let cs = constraint_chain(&h).map_err(|e| Failure {
        code: EXIT_TOLERANCE,
        message: e.to_string(),
    })?;
    let bm = BracketMatrix::new(&cs).map_err(|e| Failure {
        code: EXIT_TOLERANCE,
        message: e.to_string(),
    })?;
    let dctx = DiracContext::hyperboloid();
    let table = dirac_table(dctx);
    let checks: Vec<_> = dctx
        .canonical_table()
        .into_iter()
        .chain(dctx.verify_iso12(Conventions::default()).checks)
        .collect();
    let identity_ok = bm.m.mul(&bm.inverse) == ExprMatrix::identity(bm.m.dim());
    let all_hold = identity_ok && checks.iter().all(|c| c.holds());

    let format = ctx.format.unwrap_or(Format::Json);
    let text = match format {
        Format::Json | Format::Csv => {
            let constraints: Vec<Value> = cs
                .steps()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "name": format!("C{}", i + 1),
                        "raw": s.raw.to_string(),
                        "factor": s.factor.to_string(),
                        "constraint": s.constraint.to_string(),
                    })
                })
                .collect();
            let mut dirac = Map::new();
            for (k, v) in &table {
                dirac.insert(k.clone(), Value::String(v.to_string()));
            }
            let multipliers: Map<String, Value> = dctx
                .shell()
                .solutions()
                .iter()
                .map(|(v, e)| (v.to_string(), Value::String(e.to_string())))
                .collect();
            let checks: Vec<Value> = checks
                .iter()
                .map(|c| json!({"name": c.name, "computed": c.computed.to_string(), "expected": c.expected.to_string(), "holds": c.holds()}))
                .collect();
            json_text(&json!({
                "hamiltonian": h.to_string(),
                "constraints": constraints,
                "closing_derivative": cs.closing_derivative().to_string(),
                "multipliers": multipliers,
                "M": matrix_rows(&bm.m),
                "M_inverse": matrix_rows(&bm.inverse),
                "M_times_inverse_is_identity": identity_ok,
                "dirac": dirac,
                "checks": checks,
                "all_hold": all_hold,
            }))
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "# hamiltonian\nH = {h}\n\n# constraints");
            for (i, step) in cs.steps().iter().enumerate() {
                let _ = writeln!(s, "C{} = {}", i + 1, step.constraint);
            }
            let _ = writeln!(s, "dC{}/dt = {}", cs.len(), cs.closing_derivative());
            let _ = writeln!(s, "\n# multipliers");
            for (v, e) in dctx.shell().solutions() {
                let _ = writeln!(s, "{v} = {e}");
            }
            for (label, m) in [("M", &bm.m), ("Minv", &bm.inverse)] {
                let _ = writeln!(s, "\n# {label}");
                for (i, row) in matrix_rows(m).iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        let _ = writeln!(s, "{label}[{}][{}] = {e}", i + 1, j + 1);
                    }
                }
            }
            let _ = writeln!(s, "\n# dirac brackets");
            for (k, v) in &table {
                let _ = writeln!(s, "{k} = {v}");
            }
            let _ = writeln!(s, "\n# checks");
            let _ = writeln!(s, "{} M*Minv = 1", if identity_ok { "PASS" } else { "FAIL" });
            for c in &checks {
                let _ = writeln!(s, "{} {}", if c.holds() { "PASS" } else { "FAIL" }, c.name);
            }
            s
        }
    };
    ctx.emit(&text)?;
    Ok(if all_hold { 0 } else { EXIT_TOLERANCE })
}

fn vec3(name: &str, v: &Option<Vec<f64>>, default: [f64; 3]) -> Result<[f64; 3], Failure> {
    match v.as_deref() {
        None => Ok(default),
        Some(&[a, b, c]) if [a, b, c].iter().all(|x| x.is_finite()) => Ok([a, b, c]),
        Some(_) => Err(Failure::usage(format!("--{name} takes three finite comma-separated numbers"))),
    }
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<u8, Failure> {
    let c = &ctx.config;
    let p = params(ctx);
    let x = vec3("x0", &args.x0, [0.0, 0.0, c.a])?;
    let pl = vec3("p0", &args.p0, [1.0, 0.0, 0.0])?;
    if x[2] <= 0.0 {
        return Err(Failure::usage("x0 must lie above the z = 0 plane (upper sheet)"));
    }
    let raw = EmbeddedState::from_canonical(MinkVec(x), pl);
    let s0 = raw.project(c.a);
    let adjust = s0.x.max_abs_diff(&raw.x).max(s0.p.max_abs_diff(&raw.p));
    let cfg = IntegratorConfig {
        dt: c.dt,
        t_end: c.t_end,
        projection: c.projection,
        sample_every: c.sample_every,
        tol_c: c.tol_c,
    };
    let rec = integrate_embedded(&s0, p, &cfg);
    let (c2, c3) = rec.max_constraint_residuals();
    let h_drift = rec.energy_drift();
    let j_drift = rec.angular_momentum_drift().into_iter().fold(0.0, f64::max);
    let c2_ok = c2 <= c.tol_c * c.a * c.a;
    let c3_ok = c3 <= c.tol_c * c.a;
    let ok = c2_ok && c3_ok && h_drift <= c.tol_drift && j_drift <= c.tol_drift;
    let summary = json!({
        "initial_adjustment": adjust,
        "samples": rec.samples.len(),
        "max_abs_c2": c2,
        "max_abs_c3": c3,
        "energy_drift": h_drift,
        "angular_momentum_drift": j_drift,
        "drift_warning": rec.drift_warning,
        "within_tolerance": ok,
    });
    let main = match ctx.format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => {
            let mut buf = Vec::new();
            rec.write_csv(&mut buf).map_err(|e| Failure::usage(e.to_string()))?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let samples: Vec<Value> = rec
                .samples
                .iter()
                .map(|s| {
                    json!({
                        "t": s.state.t,
                        "x": s.state.x.0,
                        "p": s.state.canonical_momentum(),
                        "theta": s.chart.theta,
                        "phi": s.chart.phi,
                        "H": s.energy,
                        "J": s.j,
                        "C2_residual": s.c2,
                        "C3_residual": s.c3,
                    })
                })
                .collect();
            json_text(&json!({"summary": summary, "samples": samples}))
        }
    };
    ctx.emit(&main)?;
    let block = format!(
        "# summary\ninitial adjustment  {adjust:.3e}\nmax |C2|            {c2:.3e}\nmax |C3|            {c3:.3e}\nH drift             {h_drift:.3e}\nJ drift             {j_drift:.3e}\nwithin tolerance    {ok}\n"
    );
    if ctx.out.is_some() {
        print!("{block}");
    } else if ctx.format != Some(Format::Json) {
        eprint!("{block}");
    }
    Ok(if ok { 0 } else { EXIT_TOLERANCE })
}

pub fn spectrum(ctx: &Context, args: &SpectrumArgs) -> Result<u8, Failure> {
    let c = &ctx.config;
    let u = Units {
        hbar: c.hbar,
        m: c.m,
        a: c.a,
    };
    let grid: Arc<Grid> =
        Grid::new(c.theta_min, c.theta_max, c.h, c.n_phi).map_err(|e| Failure::usage(e.to_string()))?;
    let mut rows = Vec::new();
    let mut all_ok = true;
    for &lambda in &c.lambdas {
        for &n in &c.orders {
            let mode = SpectralMode::new(lambda, n).map_err(|e| Failure::usage(e.to_string()))?;
            if n.abs() > grid.max_mode() {
                return Err(Failure::usage(format!("|n| = {} needs n_phi > {}", n.abs(), 2 * n.abs())));
            }
            let mut normalized = !args.unnormalized;
            if normalized && lambda == 0.0 {
                eprintln!("warning: normalization diverges at lambda = 0; reporting unnormalized samples");
                normalized = false;
            }
            let residual = mode.eigen_residual(&grid, &u).map_err(|e| Failure::usage(e.to_string()))?;
            all_ok &= residual.is_finite();
            let energy = mode.energy(&u);
            let (sin, cos) = (n as f64 * args.phi).sin_cos();
            let last = grid.n_theta() - 1;
            let picked: std::collections::BTreeSet<usize> =
                (1..last).step_by(args.stride).chain(std::iter::once(last - 1)).collect();
            for i in picked {
                let theta = grid.theta(i);
                let r = mode.radial(theta, normalized).map_err(|e| Failure::usage(e.to_string()))?;
                rows.push((lambda, n, theta, r * cos, r * sin, residual, energy));
            }
        }
    }
    let text = match ctx.format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => {
            let mut s = String::from("lambda,n,theta,psi_real,psi_imag,eigen_residual,E\n");
            for (l, n, t, re, im, r, e) in &rows {
                let _ = writeln!(s, "{l:?},{n},{t:?},{re:?},{im:?},{r:?},{e:?}");
            }
            s
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(l, n, t, re, im, r, e)| json!({"lambda": l, "n": n, "theta": t, "psi_real": re, "psi_imag": im, "eigen_residual": r, "E": e}))
                .collect();
            json_text(&Value::Array(v))
        }
    };
    ctx.emit(&text)?;
    Ok(if all_ok { 0 } else { EXIT_TOLERANCE })
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> Result<u8, Failure> {
    let only = match &args.only {
        Some(s) => Some(s.parse::<Module>().map_err(Failure::usage)?),
        None => None,
    };
    let mut faults = Faults::default();
    for f in &args.inject {
        match f {
            Fault::EpsilonSign => faults.epsilon_sign = true,
            Fault::DropOrderingTerm => faults.drop_ordering_term = true,
            Fault::FlipRecurrence => faults.flip_recurrence = true,
            Fault::GeneratorPhase => faults.generator_phase = true,
        }
    }
    let opts = VerifyOptions {
        only,
        faults,
        seed: ctx.config.seed,
        params: params(ctx),
        hbar: ctx.config.hbar,
    };
    let report = verify::run(&opts);
    let pass = report.all_pass();
    let text = match ctx.format.unwrap_or(Format::Json) {
        Format::Json | Format::Csv => {
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "module": c.module.name(),
                        "name": c.name,
                        "tolerance": c.tolerance,
                        "measured": c.measured,
                        "pass": c.pass,
                        "detail": c.detail,
                    })
                })
                .collect();
            json_text(&json!({
                "seed": report.seed,
                "pass": pass,
                "failures": report.failures().map(|c| c.name.clone()).collect::<Vec<_>>(),
                "checks": checks,
            }))
        }
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{} {} measured {:.3e} tolerance {:.1e}  {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance,
                    c.detail
                );
            }
            let _ = writeln!(s, "seed {}; {}", report.seed, if pass { "all checks pass" } else { "FAILED" });
            s
        }
    };
    ctx.emit(&text)?;
    Ok(if pass { 0 } else { EXIT_VERIFY })
}
