//! Geodesic motion on the hyperboloid, integrated in the embedding and in the
//! chart, plus the closed-form solution used as an oracle.

use std::io::{self, Write};
use std::ops::{Add, Mul, Sub};

use twofloat::TwoFloat;

use crate::geometry::{
    angular_momentum, chart_inverse, christoffel, embed, pushforward, ChartPoint, GeometryError,
    MinkVec,
};

/// Mass and hyperboloid radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub m: f64,
    pub a: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { m: 1.0, a: 1.0 }
    }
}

/// Position `xⁱ` and contravariant momentum `pⁱ = m ẋⁱ`. The canonical
/// momenta are `p_i = g_ij pʲ`, so `p_z = −p³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedState {
    pub x: MinkVec,
    pub p: MinkVec,
    pub t: f64,
}

impl EmbeddedState {
    pub fn new(x: MinkVec, p: MinkVec) -> Self {
        EmbeddedState { x, p, t: 0.0 }
    }

    /// Builds a state from canonical (lowered) momenta.
    pub fn from_canonical(x: MinkVec, p_lower: [f64; 3]) -> Self {
        // The metric is its own inverse, so raising is the same sign flip.
        EmbeddedState::new(x, MinkVec(MinkVec(p_lower).lower()))
    }

    pub fn canonical_momentum(&self) -> [f64; 3] {
        self.p.lower()
    }

    /// `C₂ = z² − x² − y² − a²`, evaluated with error-free products so the
    /// value reflects the stored state rather than rounding in the sum.
    pub fn c2_residual(&self, a: f64) -> f64 {
        let x = &self.x;
        -exact_minkowski_dot(x, x, a * a)
    }

    /// `C₃ = xⁱ p_i`.
    pub fn c3_residual(&self) -> f64 {
        exact_minkowski_dot(&self.x, &self.p, 0.0)
    }

    /// `H = pⁱp_i / (2m)`.
    pub fn energy(&self, m: f64) -> f64 {
        self.p.square() / (2.0 * m)
    }

    pub fn angular_momentum(&self) -> [f64; 3] {
        angular_momentum(&self.x, self.canonical_momentum())
    }

    /// Rescales `x` onto the surface and removes the normal part of `p`.
    pub fn project(&self, a: f64) -> EmbeddedState {
        let x = self.x * (a / (-self.x.square()).sqrt());
        let p = self.p - x * (x.dot(&self.p) / x.square());
        EmbeddedState { x, p, t: self.t }
    }
}

/// `u·v + c` with each product split into a rounded part and its exact error.
fn exact_minkowski_dot(u: &MinkVec, v: &MinkVec, c: f64) -> f64 {
    let terms = [
        (u.x(), v.x()),
        (u.y(), v.y()),
        (-u.z(), v.z()),
    ];
    let mut hi = Vec::with_capacity(7);
    for (a, b) in terms {
        let p = a * b;
        hi.push(p);
        hi.push(a.mul_add(b, -p));
    }
    hi.push(c);
    sum_exact(&hi)
}

/// Accurate sum by Neumaier's compensated summation.
fn sum_exact(xs: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut comp = 0.0f64;
    for &x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            comp += (s - t) + x;
        } else {
            comp += (x - t) + s;
        }
        s = t;
    }
    s + comp
}

/// Chart state `(θ, φ, θ̇, φ̇)` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicState {
    pub theta: f64,
    pub phi: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub t: f64,
}

impl IntrinsicState {
    /// Embedded image with `p = m ẋ`.
    pub fn to_embedded(&self, params: Params) -> EmbeddedState {
        let c = ChartPoint::new(self.theta, self.phi);
        EmbeddedState {
            x: embed(c, params.a),
            p: pushforward(c, params.a, [self.theta_dot, self.phi_dot]) * params.m,
            t: self.t,
        }
    }

    /// `g̃_ij ξ̇ⁱ ξ̇ʲ`.
    pub fn speed_squared(&self, a: f64) -> f64 {
        let sh = self.theta.sinh();
        a * a * (self.theta_dot * self.theta_dot + sh * sh * self.phi_dot * self.phi_dot)
    }
}

/// `ẋ = p/m`, `ṗ = (pⁱp_i/(m a²)) x`.
pub fn eom_embedded(s: &EmbeddedState, params: Params) -> (MinkVec, MinkVec) {
    let Params { m, a } = params;
    (s.p * (1.0 / m), s.x * (s.p.square() / (m * a * a)))
}

/// `x(t) = x₀ cosh(st) + (u/s) sinh(st)` with `u = p₀/m`, `s = √(u·u)/a`.
pub fn closed_form_geodesic(s0: &EmbeddedState, params: Params, t: f64) -> EmbeddedState {
    let Params { m, a } = params;
    let u = s0.p * (1.0 / m);
    let uu = u.square();
    let time = s0.t + t;
    if uu <= 0.0 {
        return EmbeddedState {
            x: s0.x,
            p: s0.p,
            t: time,
        };
    }
    let s = uu.sqrt() / a;
    let (sh, ch) = ((s * t).sinh(), (s * t).cosh());
    EmbeddedState {
        x: s0.x * ch + u * (sh / s),
        p: (s0.x * (s * sh) + u * ch) * m,
        t: time,
    }
}

/// Per-sample diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: EmbeddedState,
    pub chart: ChartPoint,
    pub energy: f64,
    pub j: [f64; 3],
    pub c2: f64,
    pub c3: f64,
}

impl Sample {
    pub fn new(state: EmbeddedState, params: Params) -> Self {
        // Off-surface states still get a chart point from the radial part.
        let chart = chart_inverse(state.x, params.a).unwrap_or_else(|_| {
            let rho = state.x.x().hypot(state.x.y());
            ChartPoint::new((rho / params.a).asinh(), state.x.y().atan2(state.x.x()))
        });
        Sample {
            state,
            chart,
            energy: state.energy(params.m),
            j: state.angular_momentum(),
            c2: state.c2_residual(params.a),
            c3: state.c3_residual(),
        }
    }
}

impl Sample {
    /// Diagnostics evaluated on the extended-precision integrator state;
    /// `state` is its rounding to `f64`.
    fn from_extended(s: &DdState, t: f64, params: Params) -> Self {
        let state = s.to_f64(t);
        let m = TwoFloat::from(params.m);
        let a2 = TwoFloat::from(params.a) * params.a;
        let xl = s.x.lower();
        let pl = s.p.lower();
        let mut j = [0.0; 3];
        for (i, ji) in j.iter_mut().enumerate() {
            let mut acc = TwoFloat::from(0.0);
            for a in 0..3 {
                for b in 0..3 {
                    let e = crate::geometry::levi_civita(i, a, b);
                    if e != 0.0 {
                        acc += xl[a] * pl[b] * e;
                    }
                }
            }
            *ji = f64::from(acc);
        }
        let mut out = Sample::new(state, params);
        out.energy = f64::from(s.p.dot(&s.p) / (m * 2.0));
        out.j = j;
        out.c2 = -f64::from(s.x.dot(&s.x) + a2);
        out.c3 = f64::from(s.x.dot(&s.p));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    /// Constraint drift exceeded `1e3 · tol_c` while projection was off.
    pub drift_warning: bool,
    /// The chart integration reached `θ ≤ θ_min` and stopped early.
    pub chart_exit: bool,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn max_constraint_residuals(&self) -> (f64, f64) {
        self.samples.iter().fold((0.0, 0.0), |(c2, c3), s| {
            (f64::max(c2, s.c2.abs()), f64::max(c3, s.c3.abs()))
        })
    }

    /// Largest `|q(t) − q(0)| / max(|q(0)|, floor)` over the samples.
    fn drift(&self, f: impl Fn(&Sample) -> f64, floor: f64) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        let q0 = f(first);
        let scale = q0.abs().max(floor);
        self.samples
            .iter()
            .map(|s| (f(s) - q0).abs() / scale)
            .fold(0.0, f64::max)
    }

    pub fn energy_drift(&self) -> f64 {
        self.drift(|s| s.energy, f64::MIN_POSITIVE)
    }

    /// Drift of each `Jⁱ`, relative to `|J|` at the start so that components
    /// that begin at zero are measured on the same scale.
    pub fn angular_momentum_drift(&self) -> [f64; 3] {
        let Some(first) = self.samples.first() else {
            return [0.0; 3];
        };
        let scale = first.j.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self
                .samples
                .iter()
                .map(|s| (s.j[i] - first.j[i]).abs() / scale)
                .fold(0.0, f64::max);
        }
        out
    }

    /// Writes the trajectory as CSV with a header row. Floats use Rust's
    /// shortest round-trip representation.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "t,x,y,z,p_x,p_y,p_z,theta,phi,H,J1,J2,J3,C2_residual,C3_residual"
        )?;
        for s in &self.samples {
            let p = s.state.canonical_momentum();
            let x = s.state.x;
            let row = [
                s.state.t, x.x(), x.y(), x.z(), p[0], p[1], p[2], s.chart.theta, s.chart.phi,
                s.energy, s.j[0], s.j[1], s.j[2], s.c2, s.c3,
            ];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub projection: bool,
    /// Record every `sample_every`-th step (the final step is always kept).
    pub sample_every: usize,
    /// Constraint tolerance; scaled by `a²` for `C₂`.
    pub tol_c: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_end: 10.0,
            projection: true,
            sample_every: 10,
            tol_c: 1e-8,
        }
    }
}

impl IntegratorConfig {
    fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Double-double vector used for the embedded integration. Along a long
/// geodesic `|x|` and `|p|` grow like `e^{st}` while `pⁱp_i`, `Jⁱ` and the
/// constraints stay `O(1)`, so in plain `f64` those quantities lose about
/// `2·log₁₀|x|` digits to cancellation.
#[derive(Debug, Clone, Copy)]
struct Dd3([TwoFloat; 3]);

impl Dd3 {
    fn from_f64(v: MinkVec) -> Self {
        Dd3(v.0.map(TwoFloat::from))
    }

    fn to_f64(self) -> MinkVec {
        MinkVec(self.0.map(f64::from))
    }

    fn lower(&self) -> [TwoFloat; 3] {
        [self.0[0], self.0[1], -self.0[2]]
    }

    fn dot(&self, o: &Dd3) -> TwoFloat {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] - self.0[2] * o.0[2]
    }
}

impl Add for Dd3 {
    type Output = Dd3;
    fn add(self, o: Dd3) -> Dd3 {
        Dd3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Dd3 {
    type Output = Dd3;
    fn sub(self, o: Dd3) -> Dd3 {
        Dd3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<TwoFloat> for Dd3 {
    type Output = Dd3;
    fn mul(self, k: TwoFloat) -> Dd3 {
        Dd3(self.0.map(|c| c * k))
    }
}

#[derive(Debug, Clone, Copy)]
struct DdState {
    x: Dd3,
    p: Dd3,
}

impl DdState {
    fn from_f64(s: &EmbeddedState) -> Self {
        DdState {
            x: Dd3::from_f64(s.x),
            p: Dd3::from_f64(s.p),
        }
    }

    fn to_f64(self, t: f64) -> EmbeddedState {
        EmbeddedState {
            x: self.x.to_f64(),
            p: self.p.to_f64(),
            t,
        }
    }

    fn rhs(&self, inv_m: TwoFloat, k: TwoFloat) -> (Dd3, Dd3) {
        (self.p * inv_m, self.x * (self.p.dot(&self.p) * k))
    }

    fn step(&self, params: Params, dt: f64) -> DdState {
        let inv_m = TwoFloat::from(1.0) / params.m;
        let k = TwoFloat::from(1.0) / (TwoFloat::from(params.m) * params.a * params.a);
        let h = TwoFloat::from(dt);
        let half = h / 2.0;
        let at = |x: Dd3, p: Dd3| DdState { x, p }.rhs(inv_m, k);
        let (k1x, k1p) = at(self.x, self.p);
        let (k2x, k2p) = at(self.x + k1x * half, self.p + k1p * half);
        let (k3x, k3p) = at(self.x + k2x * half, self.p + k2p * half);
        let (k4x, k4p) = at(self.x + k3x * h, self.p + k3p * h);
        let two = TwoFloat::from(2.0);
        let w = h / 6.0;
        DdState {
            x: self.x + (k1x + k2x * two + k3x * two + k4x) * w,
            p: self.p + (k1p + k2p * two + k3p * two + k4p) * w,
        }
    }

    fn project(&self, a: f64) -> DdState {
        let x = self.x * ((-self.x.dot(&self.x)).sqrt().recip() * a);
        let p = self.p - x * (x.dot(&self.p) / x.dot(&x));
        DdState { x, p }
    }

    fn c2(&self, a: f64) -> f64 {
        -f64::from(self.x.dot(&self.x) + TwoFloat::from(a) * a)
    }
}

/// Fixed-step RK4 in the embedding, optionally projecting back onto the
/// constraint surface after every step. The stepping runs in double-double
/// arithmetic; samples carry the `f64` rounding of the state together with
/// diagnostics evaluated before rounding.
pub fn integrate_embedded(
    s0: &EmbeddedState,
    params: Params,
    cfg: &IntegratorConfig,
) -> TrajectoryRecord {
    let n = cfg.steps();
    let every = cfg.sample_every.max(1);
    let mut rec = TrajectoryRecord::default();
    let mut s = DdState::from_f64(s0);
    rec.samples.push(Sample::from_extended(&s, s0.t, params));
    let limit = 1e3 * cfg.tol_c * params.a * params.a;
    for k in 1..=n {
        s = s.step(params, cfg.dt);
        if cfg.projection {
            s = s.project(params.a);
        } else if s.c2(params.a).abs() > limit {
            rec.drift_warning = true;
        }
        if k % every == 0 || k == n {
            let t = s0.t + k as f64 * cfg.dt;
            rec.samples.push(Sample::from_extended(&s, t, params));
        }
    }
    rec
}

/// Smallest `θ` the chart integrator accepts.
pub const THETA_MIN: f64 = 1e-6;

fn geodesic_rhs(s: &IntrinsicState) -> Result<[f64; 4], GeometryError> {
    let g = christoffel(ChartPoint::new(s.theta, s.phi))?;
    let v = [s.theta_dot, s.phi_dot];
    let mut acc = [0.0; 2];
    for (i, a) in acc.iter_mut().enumerate() {
        for j in 0..2 {
            for k in 0..2 {
                *a -= g[i][j][k] * v[j] * v[k];
            }
        }
    }
    Ok([s.theta_dot, s.phi_dot, acc[0], acc[1]])
}

fn shifted(s: &IntrinsicState, d: &[f64; 4], h: f64) -> IntrinsicState {
    IntrinsicState {
        theta: s.theta + h * d[0],
        phi: s.phi + h * d[1],
        theta_dot: s.theta_dot + h * d[2],
        phi_dot: s.phi_dot + h * d[3],
        t: s.t + h,
    }
}

fn rk4_intrinsic(s: &IntrinsicState, dt: f64) -> Result<IntrinsicState, GeometryError> {
    let k1 = geodesic_rhs(s)?;
    let k2 = geodesic_rhs(&shifted(s, &k1, dt / 2.0))?;
    let k3 = geodesic_rhs(&shifted(s, &k2, dt / 2.0))?;
    let k4 = geodesic_rhs(&shifted(s, &k3, dt))?;
    let mut d = [0.0; 4];
    for i in 0..4 {
        d[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    Ok(shifted(s, &d, dt))
}

/// RK4 on the chart geodesic equations. Samples are mapped to the embedding.
/// Stops with `chart_exit` set if `θ` falls to [`THETA_MIN`].
pub fn integrate_intrinsic(
    s0: &IntrinsicState,
    params: Params,
    cfg: &IntegratorConfig,
) -> TrajectoryRecord {
    let n = cfg.steps();
    let every = cfg.sample_every.max(1);
    let mut rec = TrajectoryRecord::default();
    let mut s = *s0;
    rec.samples.push(Sample::new(s.to_embedded(params), params));
    for k in 1..=n {
        match rk4_intrinsic(&s, cfg.dt) {
            Ok(next) if next.theta > THETA_MIN => s = next,
            _ => {
                rec.chart_exit = true;
                break;
            }
        }
        s.t = s0.t + k as f64 * cfg.dt;
        if k % every == 0 || k == n {
            rec.samples.push(Sample::new(s.to_embedded(params), params));
        }
    }
    rec
}

/// `H` after solving `C₂` and `C₃` for `z` and `p_z`, in the factored form
/// `(p_x²+p_y²)/(2m) · [1 − (x²+y²) cos²θ_a / (x²+y²+a²)]`, where `θ_a` is
/// the angle between `(x, y)` and `(p_x, p_y)`.
pub fn energy_reduced(x: f64, y: f64, px: f64, py: f64, params: Params) -> f64 {
    let Params { m, a } = params;
    let r2 = x * x + y * y;
    let q2 = px * px + py * py;
    if r2 == 0.0 || q2 == 0.0 {
        return energy_direct(x, y, px, py, params);
    }
    let cos = (x * px + y * py) / (r2.sqrt() * q2.sqrt());
    q2 / (2.0 * m) * (1.0 - r2 * cos * cos / (r2 + a * a))
}

/// `(p_x² + p_y² − p_z²)/(2m)` with `p_z = −(x p_x + y p_y)/z`,
/// `z = √(x² + y² + a²)`.
pub fn energy_direct(x: f64, y: f64, px: f64, py: f64, params: Params) -> f64 {
    let Params { m, a } = params;
    let z = (x * x + y * y + a * a).sqrt();
    let pz = -(x * px + y * py) / z;
    (px * px + py * py - pz * pz) / (2.0 * m)
}

/// On-shell state from the free data `(x, y, p_x, p_y)`.
pub fn solve_constraints(x: f64, y: f64, px: f64, py: f64, a: f64) -> EmbeddedState {
    let z = (x * x + y * y + a * a).sqrt();
    let pz = -(x * px + y * py) / z;
    EmbeddedState::from_canonical(MinkVec::new(x, y, z), [px, py, pz])
}
