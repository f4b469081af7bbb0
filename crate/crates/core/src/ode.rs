//! Fixed-step RK4 for the warped-product system
//!
//! ```text
//! b'' = [(n-2)(κ₀ - b'²) - (b b' f' + h b²)/f] / b
//! f'' = -(n-1) f b''/b - h
//! ```
//!
//! with first-integral ledger, event location, the closed-form λ-families and
//! a heuristic classifier of trajectory behavior.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{RadialScalarField, TaylorNodes};
use crate::format::g17;
use crate::jet::{Jet, Scalar, JET_CAP};
use crate::metric::WarpedProductMetric;
use crate::spline::QuinticSpline;
use crate::structure::{EinsteinTypeStructure, HMode};

pub const DEFAULT_DT: f64 = 1e-3;
pub const MAX_SPAN: f64 = 50.0;
/// Event bisection stops once the monitored value is this small.
pub const EVENT_TOL: f64 = 1e-10;
const EVENT_IGNORE: f64 = 1e-12;
const BISECT_MAX: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub t: f64,
    pub b: f64,
    pub bp: f64,
    pub f: f64,
    pub fp: f64,
}

impl OdeState {
    pub fn new(t: f64, b: f64, bp: f64, f: f64, fp: f64) -> Self {
        OdeState { t, b, bp, f, fp }
    }

    fn is_finite(&self) -> bool {
        [self.t, self.b, self.bp, self.f, self.fp].iter().all(|v| v.is_finite())
    }

    fn advanced(&self, dt: f64, k: &[f64; 4]) -> OdeState {
        OdeState {
            t: self.t + dt,
            b: self.b + dt * k[0],
            bp: self.bp + dt * k[1],
            f: self.f + dt * k[2],
            fp: self.fp + dt * k[3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    pub b_min: f64,
    pub f_guard: f64,
    pub a0_tol: f64,
    pub fit_tol: f64,
    pub init_tol: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            b_min: 1e-6,
            f_guard: 1e-10,
            a0_tol: 1e-8,
            fit_tol: 1e-6,
            init_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeParams {
    pub n: usize,
    pub h: f64,
    pub kappa0: f64,
    pub guards: Guards,
    /// Declared value of `f² s`; checked at the start and used as the
    /// reference for `constraint_res`. Defaults to the initial value.
    pub scalar_level: Option<f64>,
    /// Declared `κ` of `(n-2)b'² + 2a₀b^{2-n} = (n-2)κ`. Defaults to the
    /// value implied by the initial state.
    pub kappa: Option<f64>,
}

impl OdeParams {
    pub fn new(n: usize, h: f64, kappa0: f64) -> Self {
        OdeParams {
            n,
            h,
            kappa0,
            guards: Guards::default(),
            scalar_level: None,
            kappa: None,
        }
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `s` from a state and its `b''`.
    pub fn scalar_curvature(&self, y: &OdeState, bpp: f64) -> f64 {
        let n = self.nf();
        let sr = -bpp / y.b;
        let st = (self.kappa0 - y.bp * y.bp) / (y.b * y.b);
        (n - 1.0) * (2.0 * sr + (n - 2.0) * st)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derivs {
    pub bp: f64,
    pub bpp: f64,
    pub fp: f64,
    pub fpp: f64,
}

fn accel<S: Scalar>(n: f64, h: f64, kappa0: f64, b: S, bp: S, f: S, fp: S) -> (S, S) {
    let bpp = ((-(bp * bp) + kappa0) * (n - 2.0) - (b * bp * fp + b * b * h) / f) / b;
    let fpp = -(f * bpp / b) * (n - 1.0) - h;
    (bpp, fpp)
}

/// Right-hand side of the system at a state.
pub fn rhs_system_a(y: &OdeState, p: &OdeParams) -> Result<Derivs> {
    if y.b <= p.guards.b_min {
        return Err(LabError::SingularWarp {
            t: y.t,
            b: y.b,
            guard: p.guards.b_min,
        });
    }
    if y.f.abs() <= p.guards.f_guard {
        return Err(LabError::ZeroPotential { t: y.t, f: y.f });
    }
    let (bpp, fpp) = accel(p.nf(), p.h, p.kappa0, y.b, y.bp, y.f, y.fp);
    if !(bpp.is_finite() && fpp.is_finite()) {
        return Err(LabError::NonFinite { t: y.t });
    }
    Ok(Derivs {
        bp: y.bp,
        bpp,
        fp: y.fp,
        fpp,
    })
}

fn rk4_step(y: &OdeState, dt: f64, p: &OdeParams) -> Result<OdeState> {
    let vec = |d: Derivs| [d.bp, d.bpp, d.fp, d.fpp];
    let k1 = vec(rhs_system_a(y, p)?);
    let k2 = vec(rhs_system_a(&y.advanced(0.5 * dt, &k1), p)?);
    let k3 = vec(rhs_system_a(&y.advanced(0.5 * dt, &k2), p)?);
    let k4 = vec(rhs_system_a(&y.advanced(dt, &k3), p)?);
    let mut k = [0.0; 4];
    for i in 0..4 {
        k[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    Ok(y.advanced(dt, &k))
}

/// Taylor jets of `b` and `f` at a state, in powers of `t - y.t`, obtained by
/// iterating the system on truncated series.
pub fn node_jets(y: &OdeState, p: &OdeParams) -> (Jet, Jet) {
    let mut b = Jet::from_taylor(&[y.b, y.bp]);
    let mut f = Jet::from_taylor(&[y.f, y.fp]);
    while b.len() < JET_CAP {
        let (bpp, fpp) = accel(p.nf(), p.h, p.kappa0, b, b.diff(), f, f.diff());
        b = bpp.integrate(y.bp).integrate(y.b);
        f = fpp.integrate(y.fp).integrate(y.f);
    }
    (b, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    CriticalPoint,
    WarpExtremum,
    DomainExit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitCause {
    WarpCollapses,
    PotentialVanishes,
}

impl ExitCause {
    pub fn describe(&self) -> &'static str {
        match self {
            ExitCause::WarpCollapses => "warp collapses",
            ExitCause::PotentialVanishes => "potential vanishes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeEvent {
    pub t: f64,
    pub kind: EventKind,
    pub state: OdeState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause: Option<ExitCause>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub a0_est: f64,
    pub f2s: f64,
    pub constraint_res: f64,
    pub first_integral_res: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeTrajectory {
    pub params: OdeParams,
    pub dt: f64,
    pub states: Vec<OdeState>,
    pub ledger: Vec<LedgerEntry>,
    pub events: Vec<OdeEvent>,
    /// `b''` at each state.
    #[serde(skip)]
    pub bpp: Vec<f64>,
    pub exit: Option<ExitCause>,
}

struct LedgerRefs {
    level: f64,
    a0: f64,
    kappa: f64,
}

fn ledger_entry(y: &OdeState, bpp: f64, p: &OdeParams, r: &LedgerRefs) -> LedgerEntry {
    let n = p.nf();
    let a0_est = y.b.powi(p.n as i32 - 1) * bpp;
    let f2s = y.f * y.f * p.scalar_curvature(y, bpp);
    LedgerEntry {
        a0_est,
        f2s,
        constraint_res: f2s - r.level,
        first_integral_res: (n - 2.0) * y.bp * y.bp + 2.0 * r.a0 * y.b.powf(2.0 - n) - (n - 2.0) * r.kappa,
    }
}

fn sign_change(a: f64, b: f64) -> bool {
    if a.abs() <= EVENT_IGNORE && b.abs() <= EVENT_IGNORE {
        return false;
    }
    (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)
}

/// Bisection on the fraction θ of one RK4 step from `y` at which `g` changes
/// sign, stopping once `|g| <= EVENT_TOL`.
fn locate(y: &OdeState, dt: f64, p: &OdeParams, g: impl Fn(&OdeState) -> f64) -> Result<OdeState> {
    let g0 = g(y);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = rk4_step(y, dt, p)?;
    for _ in 0..BISECT_MAX {
        let mid = 0.5 * (lo + hi);
        let s = rk4_step(y, mid * dt, p)?;
        let gm = g(&s);
        best = s;
        if gm.abs() <= EVENT_TOL || mid == lo || mid == hi {
            break;
        }
        if (gm < 0.0) == (g0 < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

fn admissible(prev: &OdeState, y: &OdeState, p: &OdeParams) -> Option<ExitCause> {
    if y.b <= p.guards.b_min {
        Some(ExitCause::WarpCollapses)
    } else if y.f.abs() <= p.guards.f_guard || (y.f < 0.0) != (prev.f < 0.0) {
        Some(ExitCause::PotentialVanishes)
    } else {
        None
    }
}

/// Last admissible state inside a step that leaves the domain.
fn locate_exit(y: &OdeState, dt: f64, p: &OdeParams) -> (OdeState, ExitCause) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut good = *y;
    let mut cause = ExitCause::PotentialVanishes;
    for _ in 0..BISECT_MAX {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let verdict = match rk4_step(y, mid * dt, p) {
            Ok(s) if s.is_finite() => match admissible(y, &s, p) {
                None => Ok(s),
                Some(c) => Err(c),
            },
            Ok(_) => Err(ExitCause::PotentialVanishes),
            Err(LabError::SingularWarp { .. }) => Err(ExitCause::WarpCollapses),
            Err(_) => Err(ExitCause::PotentialVanishes),
        };
        match verdict {
            Ok(s) => {
                lo = mid;
                good = s;
            }
            Err(c) => {
                hi = mid;
                cause = c;
            }
        }
    }
    (good, cause)
}

fn validate(y0: &OdeState, p: &OdeParams, t_span: f64, dt: f64) -> Result<Derivs> {
    let bad = |m: String| Err(LabError::BadInitialData(m));
    if p.n < 3 {
        return bad(format!("dimension n = {} must be at least 3", p.n));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return bad(format!("dt = {dt} must be positive"));
    }
    if !(t_span > 0.0 && t_span <= MAX_SPAN) {
        return bad(format!("t_span = {t_span} must lie in (0, {MAX_SPAN}]"));
    }
    if !(p.h.is_finite() && p.kappa0.is_finite()) {
        return bad("h and kappa0 must be finite".into());
    }
    if !y0.is_finite() {
        return bad("initial state is not finite".into());
    }
    if y0.b <= p.guards.b_min {
        return bad(format!("b0 = {} is not above the guard {}", y0.b, p.guards.b_min));
    }
    if y0.f.abs() <= p.guards.f_guard {
        return bad(format!(
            "|f0| = {} is not above the guard {}",
            y0.f.abs(),
            p.guards.f_guard
        ));
    }
    let d = rhs_system_a(y0, p).map_err(|e| LabError::BadInitialData(e.to_string()))?;
    if let Some(level) = p.scalar_level {
        let f2s = y0.f * y0.f * p.scalar_curvature(y0, d.bpp);
        if (f2s - level).abs() > p.guards.init_tol * level.abs().max(1.0) {
            return bad(format!("f^2 s = {f2s} at the start, declared level {level}"));
        }
    }
    Ok(d)
}

/// Classical RK4 with constant step: `t_i = t₀ + i dt`, `round(t_span/dt)`
/// steps. Halts early with a DOMAIN_EXIT event when `b` reaches the guard or
/// `f` reaches zero; the exit state is recorded only in the event.
pub fn integrate(initial: OdeState, params: &OdeParams, t_span: f64, dt: f64) -> Result<OdeTrajectory> {
    let d0 = validate(&initial, params, t_span, dt)?;
    let p = params;
    let steps = (t_span / dt).round() as usize;
    let mut states = vec![initial];
    let mut bpp = vec![d0.bpp];
    let mut events = Vec::new();
    let mut exit = None;
    for i in 0..steps {
        let y = *states.last().expect("trajectory starts nonempty");
        let t_next = initial.t + (i + 1) as f64 * dt;
        let next = match rk4_step(&y, dt, p) {
            Ok(mut s) => {
                if !s.is_finite() {
                    return Err(LabError::StepFailure {
                        t: y.t,
                        reason: "state became non-finite".into(),
                    });
                }
                s.t = t_next;
                match admissible(&y, &s, p) {
                    None => Some(s),
                    Some(_) => None,
                }
            }
            Err(LabError::SingularWarp { .. }) | Err(LabError::ZeroPotential { .. }) => None,
            Err(e) => {
                return Err(LabError::StepFailure {
                    t: y.t,
                    reason: e.to_string(),
                })
            }
        };
        let Some(s) = next else {
            let (at, cause) = locate_exit(&y, dt, p);
            events.push(OdeEvent {
                t: at.t,
                kind: EventKind::DomainExit,
                state: at,
                cause: Some(cause),
            });
            exit = Some(cause);
            break;
        };
        let d = match rhs_system_a(&s, p) {
            Ok(d) => d,
            Err(e) => {
                return Err(LabError::StepFailure {
                    t: s.t,
                    reason: e.to_string(),
                })
            }
        };
        let mut found = Vec::new();
        if sign_change(y.fp, s.fp) {
            let at = if s.fp == 0.0 { s } else { locate(&y, dt, p, |q| q.fp)? };
            found.push(OdeEvent {
                t: at.t,
                kind: EventKind::CriticalPoint,
                state: at,
                cause: None,
            });
        }
        if sign_change(y.bp, s.bp) {
            let at = if s.bp == 0.0 { s } else { locate(&y, dt, p, |q| q.bp)? };
            found.push(OdeEvent {
                t: at.t,
                kind: EventKind::WarpExtremum,
                state: at,
                cause: None,
            });
        }
        found.sort_by(|a, b| a.t.total_cmp(&b.t));
        events.extend(found);
        states.push(s);
        bpp.push(d.bpp);
    }
    let n = p.nf();
    let y0 = &states[0];
    let a0 = y0.b.powi(p.n as i32 - 1) * bpp[0];
    let kappa = p
        .kappa
        .unwrap_or_else(|| y0.bp * y0.bp + 2.0 * a0 * y0.b.powf(2.0 - n) / (n - 2.0));
    let level = p
        .scalar_level
        .unwrap_or_else(|| y0.f * y0.f * p.scalar_curvature(y0, bpp[0]));
    let refs = LedgerRefs { level, a0, kappa };
    let ledger = states
        .iter()
        .zip(&bpp)
        .map(|(y, &a)| ledger_entry(y, a, p, &refs))
        .collect();
    Ok(OdeTrajectory {
        params: p.clone(),
        dt,
        states,
        ledger,
        events,
        bpp,
        exit,
    })
}

pub const CSV_HEADER: &str = "t,b,bp,f,fp,a0_est,f2s,constraint_res,first_integral_res";

impl OdeTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn span(&self) -> f64 {
        match (self.states.first(), self.states.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn scalar_curvature(&self, i: usize) -> f64 {
        self.params.scalar_curvature(&self.states[i], self.bpp[i])
    }

    /// Radial Ricci eigenvalue `α = -(n-1) b''/b` at each state.
    pub fn alpha(&self) -> Vec<f64> {
        let n = self.params.nf();
        self.states
            .iter()
            .zip(&self.bpp)
            .map(|(y, a)| -(n - 1.0) * a / y.b)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(160 * (self.states.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (y, l) in self.states.iter().zip(&self.ledger) {
            let row = [
                y.t,
                y.b,
                y.bp,
                y.f,
                y.fp,
                l.a0_est,
                l.f2s,
                l.constraint_res,
                l.first_integral_res,
            ];
            let cells: Vec<String> = row.iter().map(|v| g17(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Up to `k` evenly spaced state indices, endpoints included.
    pub fn sample_indices(&self, k: usize) -> Vec<usize> {
        let n = self.states.len();
        if n == 0 || k == 0 {
            return Vec::new();
        }
        if k >= n {
            return (0..n).collect();
        }
        if k == 1 {
            return vec![0];
        }
        let mut v: Vec<usize> = (0..k).map(|i| i * (n - 1) / (k - 1)).collect();
        v.dedup();
        v
    }

    /// The trajectory as an Einstein-type structure; `b` and `f` are
    /// evaluated from Taylor jets at the nearest state.
    pub fn structure(&self) -> Result<EinsteinTypeStructure> {
        structure_from_states(&self.states, &self.params)
    }
}

/// Einstein-type structure through a list of states of the system.
pub fn structure_from_states(states: &[OdeState], params: &OdeParams) -> Result<EinsteinTypeStructure> {
    if states.len() < 2 {
        return Err(LabError::Config("trajectory needs at least two states".into()));
    }
    let ts: Vec<f64> = states.iter().map(|y| y.t).collect();
    let (mut bj, mut fj) = (Vec::new(), Vec::new());
    for y in states {
        let (b, f) = node_jets(y, params);
        bj.push(b);
        fj.push(f);
    }
    let b = RadialScalarField::from_nodes(TaylorNodes::new(ts.clone(), bj)?)?;
    let f = RadialScalarField::from_nodes(TaylorNodes::new(ts, fj)?)?;
    let metric = WarpedProductMetric::warped(params.n, b, params.kappa0)?.with_guard(params.guards.b_min);
    EinsteinTypeStructure::new(metric, f, HMode::Constant(params.h))
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstIntegralReport {
    pub a0: Vec<f64>,
    pub kappa: Vec<f64>,
    /// `f b'' - f' b' - h b`
    pub warp_relation: Vec<f64>,
    /// `α' b + n α b'`, with `α'` from a quintic spline.
    pub alpha_relation: Vec<f64>,
    pub f2s: Vec<f64>,
    pub a0_drift: f64,
    pub kappa_drift: f64,
    pub f2s_drift: f64,
    pub warp_relation_max: f64,
    pub alpha_relation_max: f64,
}

fn drift(v: &[f64]) -> f64 {
    let Some(&v0) = v.first() else { return 0.0 };
    v.iter().fold(0.0f64, |m, x| m.max((x - v0).abs()))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Per-state first integrals recomputed from the states. `a₀`, `κ` and the
/// two relations are conserved on zero-scalar-curvature solutions; `f² s` on
/// every constant-`h` solution.
pub fn first_integrals(traj: &OdeTrajectory) -> FirstIntegralReport {
    let p = &traj.params;
    let n = p.nf();
    let mut a0 = Vec::new();
    let mut kappa = Vec::new();
    let mut warp_relation = Vec::new();
    let mut f2s = Vec::new();
    let mut alpha = Vec::new();
    for y in &traj.states {
        let Ok(d) = rhs_system_a(y, p) else { continue };
        let a = y.b.powi(p.n as i32 - 1) * d.bpp;
        a0.push(a);
        kappa.push(y.bp * y.bp + 2.0 * a * y.b.powf(2.0 - n) / (n - 2.0));
        warp_relation.push(y.f * d.bpp - y.fp * y.bp - p.h * y.b);
        f2s.push(y.f * y.f * p.scalar_curvature(y, d.bpp));
        alpha.push(-(n - 1.0) * d.bpp / y.b);
    }
    let ts: Vec<f64> = traj.states.iter().map(|y| y.t).collect();
    let alpha_relation = if alpha.len() == ts.len() && ts.len() >= 7 {
        match QuinticSpline::new(ts, alpha.clone()) {
            Ok(sp) => traj
                .states
                .iter()
                .zip(&alpha)
                .map(|(y, a)| sp.jet(y.t).d(1) * y.b + n * a * y.bp)
                .collect(),
            Err(_) => Vec::new(),
        }
    } else {
        Vec::new()
    };
    FirstIntegralReport {
        a0_drift: drift(&a0),
        kappa_drift: drift(&kappa),
        f2s_drift: drift(&f2s),
        warp_relation_max: max_abs(&warp_relation),
        alpha_relation_max: max_abs(&alpha_relation),
        a0,
        kappa,
        warp_relation,
        alpha_relation,
        f2s,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaSample {
    pub t: f64,
    pub n_alpha: f64,
    pub nn_alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaDynamicsReport {
    pub samples: Vec<AlphaSample>,
    pub n_alpha_max: f64,
    pub nn_alpha_max: f64,
}

/// Residuals of
/// `N(α) = nα/|∇f| [fα/(n-1) + h]` and
/// `NN(α) = n/(n-1) α² + n(n+1)α/|∇f|² [fα/(n-1) + h]²`
/// with `N = sign(f') d/dt` and `α'`, `α''` from a quintic spline.
pub fn alpha_dynamics_residual(traj: &OdeTrajectory, s_tol: f64) -> Result<AlphaDynamicsReport> {
    let p = &traj.params;
    let n = p.nf();
    for (i, y) in traj.states.iter().enumerate() {
        let s = traj.scalar_curvature(i);
        if s.abs() > s_tol {
            return Err(LabError::NonzeroScalar { t: y.t, s });
        }
        if y.fp.abs() <= 1e-8 {
            return Err(LabError::CriticalPoint { t: y.t, fp: y.fp });
        }
    }
    let ts: Vec<f64> = traj.states.iter().map(|y| y.t).collect();
    let alpha = traj.alpha();
    let sp = QuinticSpline::new(ts, alpha.clone())?;
    let mut samples = Vec::with_capacity(alpha.len());
    for (y, &a) in traj.states.iter().zip(&alpha) {
        let j = sp.jet(y.t);
        let (a1, a2) = (j.d(1), j.d(2));
        let grad = y.fp.abs();
        let bracket = y.f * a / (n - 1.0) + p.h;
        let n_alpha = y.fp.signum() * a1 - n * a / grad * bracket;
        let nn_alpha = a2 - (n / (n - 1.0) * a * a + n * (n + 1.0) * a / (grad * grad) * bracket * bracket);
        samples.push(AlphaSample {
            t: y.t,
            n_alpha,
            nn_alpha,
        });
    }
    let n_alpha_max = samples.iter().fold(0.0f64, |m, s| m.max(s.n_alpha.abs()));
    let nn_alpha_max = samples.iter().fold(0.0f64, |m, s| m.max(s.nn_alpha.abs()));
    Ok(AlphaDynamicsReport {
        samples,
        n_alpha_max,
        nn_alpha_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "label", content = "reason", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    RicciFlat,
    SphereLike,
    HyperbolicLike,
    IncompleteOrInconsistent(String),
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::RicciFlat => "RICCI_FLAT",
            Label::SphereLike => "SPHERE_LIKE",
            Label::HyperbolicLike => "HYPERBOLIC_LIKE",
            Label::IncompleteOrInconsistent(_) => "INCOMPLETE_OR_INCONSISTENT",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Label::IncompleteOrInconsistent(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    #[serde(flatten)]
    pub label: Label,
    pub a0_median: f64,
    pub lambda_mean: f64,
    pub lambda_rel_std: f64,
    pub curvature_scale: f64,
    pub exit: Option<ExitCause>,
    pub states_used: usize,
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Labels a trajectory by the case analysis on `a₀`. A heuristic: it reports
/// what the sampled states look like, it proves nothing.
pub fn classify(traj: &OdeTrajectory) -> Classification {
    let p = &traj.params;
    let g = &p.guards;
    let n = p.nf();
    let used: Vec<usize> = (0..traj.states.len())
        .filter(|&i| traj.states[i].f.abs() > 1e-6 && traj.states[i].b > 1e3 * g.b_min)
        .collect();
    let mut out = Classification {
        label: Label::IncompleteOrInconsistent("no well-conditioned states".into()),
        a0_median: f64::NAN,
        lambda_mean: f64::NAN,
        lambda_rel_std: f64::NAN,
        curvature_scale: f64::NAN,
        exit: traj.exit,
        states_used: used.len(),
    };
    if used.is_empty() {
        return out;
    }
    let mut a0: Vec<f64> = used.iter().map(|&i| traj.ledger[i].a0_est).collect();
    let a0_med = median(&mut a0);
    out.a0_median = a0_med;
    let mut curv = 0.0f64;
    let mut lambdas = Vec::with_capacity(used.len());
    for &i in &used {
        let y = &traj.states[i];
        let bpp = traj.bpp[i];
        let alpha = -(n - 1.0) * bpp / y.b;
        let sr = -bpp / y.b;
        let st = (p.kappa0 - y.bp * y.bp) / (y.b * y.b);
        let r_tan = sr + (n - 2.0) * st;
        curv = curv.max(y.b * y.b * alpha.abs().max(r_tan.abs()));
        lambdas.push(alpha);
    }
    out.curvature_scale = curv;
    let m = lambdas.len() as f64;
    let mean = lambdas.iter().sum::<f64>() / m;
    let var = lambdas.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / m;
    let rel_std = var.sqrt() / mean.abs();
    out.lambda_mean = mean;
    out.lambda_rel_std = rel_std;
    if a0_med.abs() <= g.a0_tol && curv <= 1e-8 {
        out.label = Label::RicciFlat;
        return out;
    }
    if mean != 0.0 && rel_std <= g.fit_tol {
        let w2 = mean / (n - 1.0);
        let fits = used.iter().all(|&i| {
            let y = &traj.states[i];
            let quad = y.bp * y.bp + w2 * y.b * y.b - p.kappa0;
            let f_fit = y.f - p.h / mean;
            quad.abs() <= g.fit_tol * p.kappa0.abs().max(1.0) && f_fit.abs() <= g.fit_tol * y.f.abs().max(1.0)
        });
        if fits {
            out.label = if mean > 0.0 {
                Label::SphereLike
            } else {
                Label::HyperbolicLike
            };
            return out;
        }
    }
    let last = &traj.states[*used.last().expect("nonempty")];
    let mechanism = if a0_med.abs() <= g.a0_tol {
        "no family match (lambda not constant)"
    } else if a0_med < 0.0 && last.bp < 0.0 {
        "b convex-down to zero"
    } else if a0_med < 0.0 {
        "b concave with interior maximum (a0 < 0)"
    } else {
        "alpha < 0 with b convex (a0 > 0)"
    };
    let reason = match traj.exit {
        Some(c) => format!("{}; {}", c.describe(), mechanism),
        None => mechanism.to_string(),
    };
    out.label = Label::IncompleteOrInconsistent(reason);
    out
}

/// Initial state from the first integral: `b'₀ = sign·sqrt(κ - 2a₀b₀^{2-n}/(n-2))`,
/// `b''₀ = a₀/b₀^{n-1}`, `f₀ = 1`, and `f'₀` from `f b'' - f' b' = h b`.
/// The result lies on a zero-scalar-curvature solution exactly when
/// `κ = κ₀`.
pub fn synthesize_initial(n: usize, h: f64, a0: f64, kappa: f64, b0: f64, bp_sign: f64, t0: f64) -> Result<OdeState> {
    if n < 3 {
        return Err(LabError::BadInitialData(format!(
            "dimension n = {n} must be at least 3"
        )));
    }
    if !(b0 > 0.0 && b0.is_finite()) {
        return Err(LabError::BadInitialData(format!("b0 = {b0} must be positive")));
    }
    if !(bp_sign == 1.0 || bp_sign == -1.0) {
        return Err(LabError::BadInitialData(format!(
            "bp_sign = {bp_sign} must be +1 or -1"
        )));
    }
    let nf = n as f64;
    let sq = kappa - 2.0 * a0 * b0.powf(2.0 - nf) / (nf - 2.0);
    if !(sq >= 0.0) {
        return Err(LabError::BadInitialData(format!(
            "first integral has no real b'0 (kappa - 2 a0 b0^(2-n)/(n-2) = {sq})"
        )));
    }
    let bp0 = bp_sign * sq.sqrt();
    if bp0 == 0.0 {
        return Err(LabError::BadInitialData("b'0 = 0 leaves f'0 undetermined".into()));
    }
    let bpp0 = a0 / b0.powi(n as i32 - 1);
    let f0 = 1.0;
    let fp0 = (f0 * bpp0 - h * b0) / bp0;
    Ok(OdeState::new(t0, b0, bp0, f0, fp0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyKind {
    Sphere { lambda: f64 },
    Flat,
    Hyperbolic { mu: f64 },
}

/// Closed-form solutions over the round fiber (`κ₀ = 1`).
#[derive(Debug, Clone)]
pub struct SolutionFamily {
    pub kind: FamilyKind,
    pub n: usize,
    pub h: f64,
    pub closed_b: RadialScalarField,
    pub closed_f: RadialScalarField,
}

impl SolutionFamily {
    /// `b = sqrt((n-1)/λ) sin(sqrt(λ/(n-1)) t)`, `f = h/λ`.
    pub fn sphere(n: usize, lambda: f64, h: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(lambda > 0.0) || h == 0.0 || n < 3 {
            return Err(LabError::Config(
                "sphere family needs n >= 3, lambda > 0 and h != 0".into(),
            ));
        }
        let w = ((n as f64 - 1.0) / lambda).sqrt();
        let b = (crate::expr::Expr::t() / w).sin() * w;
        Ok(SolutionFamily {
            kind: FamilyKind::Sphere { lambda },
            n,
            h,
            closed_b: RadialScalarField::closed(b, lo, hi)?,
            closed_f: RadialScalarField::constant(h / lambda, lo, hi)?,
        })
    }

    /// `b = t`, `f = f0`, `h = 0`.
    pub fn flat(n: usize, f0: f64, lo: f64, hi: f64) -> Result<Self> {
        if f0 == 0.0 || n < 3 {
            return Err(LabError::Config("flat family needs n >= 3 and f0 != 0".into()));
        }
        Ok(SolutionFamily {
            kind: FamilyKind::Flat,
            n,
            h: 0.0,
            closed_b: RadialScalarField::parse("t", lo, hi)?,
            closed_f: RadialScalarField::constant(f0, lo, hi)?,
        })
    }

    /// `b = sqrt((n-1)/μ) sinh(sqrt(μ/(n-1)) t)`, `f = -h/μ`.
    pub fn hyperbolic(n: usize, mu: f64, h: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(mu > 0.0) || h == 0.0 || n < 3 {
            return Err(LabError::Config(
                "hyperbolic family needs n >= 3, mu > 0 and h != 0".into(),
            ));
        }
        let w = ((n as f64 - 1.0) / mu).sqrt();
        let b = (crate::expr::Expr::t() / w).sinh() * w;
        Ok(SolutionFamily {
            kind: FamilyKind::Hyperbolic { mu },
            n,
            h,
            closed_b: RadialScalarField::closed(b, lo, hi)?,
            closed_f: RadialScalarField::constant(-h / mu, lo, hi)?,
        })
    }

    /// `f² s`: `n h²/λ`, `0`, `-n h²/μ`.
    pub fn scalar_level(&self) -> f64 {
        let n = self.n as f64;
        match self.kind {
            FamilyKind::Sphere { lambda } => n * self.h * self.h / lambda,
            FamilyKind::Flat => 0.0,
            FamilyKind::Hyperbolic { mu } => -n * self.h * self.h / mu,
        }
    }

    pub fn params(&self) -> OdeParams {
        let mut p = OdeParams::new(self.n, self.h, 1.0);
        p.scalar_level = Some(self.scalar_level());
        p
    }

    pub fn initial_state(&self, t0: f64) -> Result<OdeState> {
        let b = self.closed_b.eval(t0)?;
        let f = self.closed_f.eval(t0)?;
        Ok(OdeState::new(t0, b.d(0), b.d(1), f.d(0), f.d(1)))
    }

    pub fn structure(&self) -> Result<EinsteinTypeStructure> {
        let m = WarpedProductMetric::warped(self.n, self.closed_b.clone(), 1.0)?;
        EinsteinTypeStructure::new(m, self.closed_f.clone(), HMode::Constant(self.h))
    }

    /// `max |b - b_closed|, |f - f_closed|` over the trajectory.
    pub fn max_deviation(&self, traj: &OdeTrajectory) -> Result<f64> {
        let mut m = 0.0f64;
        for y in &traj.states {
            m = m.max((y.b - self.closed_b.value(y.t)?).abs());
            m = m.max((y.f - self.closed_f.value(y.t)?).abs());
        }
        Ok(m)
    }
}
