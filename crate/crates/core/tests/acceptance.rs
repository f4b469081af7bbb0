//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ricci_lab::dd::Dd;
use ricci_lab::expr::Expr;
use ricci_lab::field::RadialScalarField;
use ricci_lab::frame::{frame_curvature, hessian_laplacian_radial, FramePointCurvature};
use ricci_lab::identities::{identity_report, IdentityId, Status};
use ricci_lab::lab::commands::{run_sweep, SWEEP_CSV_HEADER};
use ricci_lab::lab::examples::{Example, ExampleConfig, ExampleName, GridConfig};
use ricci_lab::lab::{cmd_identities, cmd_integrate, cmd_sweep, cmd_verify_example, LabConfig};
use ricci_lab::metric::WarpedProductMetric;
use ricci_lab::ode::{
    alpha_dynamics_residual, first_integrals, integrate, synthesize_initial, OdeTrajectory, SolutionFamily,
};
use ricci_lab::oracle::{
    conformal_reference, oracle_at, warped_reference, ConformalChart, CoordinateChart, WarpedChart,
};
use ricci_lab::structure::{EinsteinTypeStructure, HMode};
use ricci_lab::tensors::t_tensor;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let start = Instant::now();
    let mut v = f();
    let took = start.elapsed();
    if let Some(l) = limit {
        if took > l {
            v.pass = false;
            v.detail.push_str(&format!(
                "; runtime {:.3}s exceeds {:.0}s",
                took.as_secs_f64(),
                l.as_secs_f64()
            ));
        }
    }
    (v, took)
}

fn max_dev(items: impl IntoIterator<Item = f64>) -> f64 {
    items
        .into_iter()
        .fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
}

fn exterior_reproduction() -> Verdict {
    let m = 1.0;
    let ex = Example::resolve(
        ExampleName::SchwarzschildExterior,
        &ExampleConfig {
            m: Some(m),
            grid: Some(GridConfig {
                lo: 2.5,
                hi: 10.0,
                count: 64,
            }),
            ..Default::default()
        },
    )
    .expect("exterior resolves");
    let metric = ex.metric().expect("metric");
    let ets = ex.structure().expect("structure");
    let (mut r11, mut r22, mut s, mut lap, mut eq1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for t in ex.grid.points() {
        let c = frame_curvature(&metric, t).expect("curvature");
        let hs = hessian_laplacian_radial(&metric, ets.f(), t).expect("hessian");
        let f = ets.f().value(t).expect("f");
        r11 = r11.max((c.r_rad + 2.0 * m / t.powi(3)).abs());
        r22 = r22.max((c.r_tan - m / t.powi(3)).abs());
        s = s.max(c.s.abs());
        lap = lap.max(hs.lap.abs());
        eq1 = eq1
            .max((f * c.r_rad - hs.ddf_rad).abs())
            .max((f * c.r_tan - hs.ddf_tan).abs());
    }
    let tol = 1e-10;
    verdict(
        [r11, r22, s, lap, eq1].iter().all(|&v| v <= tol),
        format!(
            "|R11+2m/t^3|={r11:.2e} |R22-m/t^3|={r22:.2e} |s|={s:.2e} |lap f|={lap:.2e} eq1={eq1:.2e} (tol {tol:e})"
        ),
    )
}

fn interior_reproduction() -> Verdict {
    let (m, r3) = (1.0f64, 8.0f64);
    let hi = (r3 / (2.0 * m)).sqrt() * 0.9;
    let ex = Example::resolve(
        ExampleName::SchwarzschildInterior,
        &ExampleConfig {
            m: Some(m),
            r3: Some(r3),
            grid: Some(GridConfig {
                lo: hi / 64.0,
                hi,
                count: 64,
            }),
            ..Default::default()
        },
    )
    .expect("interior resolves");
    let metric = ex.metric().expect("metric");
    let ets = ex.structure().expect("structure");
    let k = m / r3;
    let (mut s, mut ric, mut lap, mut eq) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for t in ex.grid.points() {
        let c = frame_curvature(&metric, t).expect("curvature");
        let hs = hessian_laplacian_radial(&metric, ets.f(), t).expect("hessian");
        let f = ets.f().value(t).expect("f");
        let h = (c.s * f - hs.lap) / 3.0;
        s = s.max((c.s - 12.0 * k).abs());
        ric = ric.max((c.r_rad - 4.0 * k).abs()).max((c.r_tan - 4.0 * k).abs());
        lap = lap.max((hs.lap + 6.0 * k * f).abs());
        eq = eq
            .max((f * c.r_rad - hs.ddf_rad - h).abs())
            .max((f * c.r_tan - hs.ddf_tan - h).abs());
    }
    let tol = 1e-10;
    verdict(
        [s, ric, lap, eq].iter().all(|&v| v <= tol),
        format!(
            "t in [{:.4}, {hi}]: |s-12m/R^3|={s:.2e} |Ric-4m/R^3|={ric:.2e} |lap f+6mf/R^3|={lap:.2e} eq={eq:.2e} (tol {tol:e})",
            hi / 64.0
        ),
    )
}

struct RandomMetric {
    chart: Box<dyn CoordinateChart>,
    metric: WarpedProductMetric,
    point: Vec<f64>,
    /// symbolic `(R_rad, R_tan, s)` in double-double
    reference: (Dd, Dd, Dd),
}

fn random_metric(rng: &mut ChaCha8Rng) -> RandomMetric {
    let n = rng.gen_range(3..=5usize);
    if n == 3 && rng.gen_bool(0.4) {
        let (a, b, c) = (
            rng.gen_range(0.8..1.5),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(-0.05..0.05),
        );
        let src = format!("sqrt({a} + {b}/t + {c}*t^2)");
        let t = rng.gen_range(1.0..2.0);
        let lapse = Expr::parse(&src).expect("lapse parses");
        let metric = WarpedProductMetric::conformal_radial(RadialScalarField::parse(&src, 0.9, 2.1).expect("field"));
        return RandomMetric {
            metric,
            point: vec![t, rng.gen_range(0.6..2.4), rng.gen_range(0.0..6.0)],
            reference: conformal_reference(&lapse, t),
            chart: Box::new(ConformalChart { lapse }),
        };
    }
    let (a, p) = (rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5));
    let (q, w, r) = (
        rng.gen_range(-0.3..0.3),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.3..1.0),
    );
    let src = format!("{a}*exp({p}*t) + {q}*cos({w}*t) + {r}");
    let kappa0 = [-1.0, 0.0, 1.0][rng.gen_range(0..3usize)];
    let t = rng.gen_range(0.5..1.5);
    let b = Expr::parse(&src).expect("warp parses");
    let metric = WarpedProductMetric::warped(n, RadialScalarField::parse(&src, 0.4, 1.6).expect("field"), kappa0)
        .expect("warped metric");
    let mut point = vec![t];
    for _ in 1..n {
        point.push(rng.gen_range(0.6..1.4));
    }
    RandomMetric {
        metric,
        point,
        reference: warped_reference(n, &b, kappa0, t),
        chart: Box::new(WarpedChart { n, b, kappa0 }),
    }
}

fn oracle_agreement() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_531);
    let (mut agree, mut ref_gap, mut min_order) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut failures = 0;
    for _ in 0..100 {
        let rm = random_metric(&mut rng);
        let c: FramePointCurvature = frame_curvature(&rm.metric, rm.point[0]).expect("frame curvature");
        let (rr, rt, rs) = rm.reference;
        ref_gap = ref_gap
            .max((c.r_rad - rr.to_f64()).abs())
            .max((c.r_tan - rt.to_f64()).abs())
            .max((c.s - rs.to_f64()).abs());
        let err_at = |h: f64| match oracle_at(rm.chart.as_ref(), &rm.point, h) {
            Ok(o) => {
                let d = o.frame_diagonal();
                let frame = max_dev(
                    std::iter::once((d[0].to_f64() - c.r_rad).abs())
                        .chain(d[1..].iter().map(|v| (v.to_f64() - c.r_tan).abs()))
                        .chain(std::iter::once((o.s.to_f64() - c.s).abs())),
                );
                let exact = max_dev(
                    std::iter::once((d[0] - rr).abs().to_f64())
                        .chain(d[1..].iter().map(|&v| (v - rt).abs().to_f64()))
                        .chain(std::iter::once((o.s - rs).abs().to_f64())),
                );
                Some((frame, exact))
            }
            Err(_) => None,
        };
        match (err_at(1e-3), err_at(1e-4)) {
            (Some((_, e3)), Some((f4, e4))) => {
                agree = agree.max(f4);
                let order = if e4 == 0.0 { f64::INFINITY } else { (e3 / e4).log10() };
                min_order = min_order.min(order);
            }
            _ => failures += 1,
        }
    }
    verdict(
        failures == 0 && agree <= 1e-5 && min_order >= 1.8,
        format!(
            "100 metrics: max |frame - oracle| at h=1e-4 = {agree:.2e} (tol 1e-5), min order = {min_order:.2}, \
             frame vs symbolic reference {ref_gap:.2e}, oracle failures {failures}"
        ),
    )
}

fn families(n: usize, lo: f64, hi: f64) -> Vec<(&'static str, SolutionFamily)> {
    vec![
        ("sphere", SolutionFamily::sphere(n, 2.0, 2.0, lo, hi).expect("sphere")),
        ("flat", SolutionFamily::flat(n, 1.0, lo, hi).expect("flat")),
        (
            "hyperbolic",
            SolutionFamily::hyperbolic(n, 2.0, 2.0, lo, hi).expect("hyperbolic"),
        ),
    ]
}

fn family_recovery() -> Verdict {
    let t0 = 0.3;
    let mut dev = 0.0f64;
    let mut ratios = Vec::new();
    let mut fine_ratios = Vec::new();
    for n in [3, 4, 5] {
        for (name, fam) in families(n, t0, t0 + 1.0) {
            let run = |dt: f64| {
                let tr =
                    integrate(fam.initial_state(t0).expect("initial"), &fam.params(), 1.0, dt).expect("integrates");
                fam.max_deviation(&tr).expect("deviation")
            };
            dev = dev.max(run(1e-3));
            if name != "flat" {
                ratios.push(run(0.05) / run(0.025));
                fine_ratios.push(run(1e-3) / run(5e-4));
            }
        }
    }
    let ratio_ok = ratios.iter().all(|r| (12.0..=20.0).contains(r));
    let fmt = |v: &[f64]| v.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(" ");
    verdict(
        dev <= 1e-8 && ratio_ok,
        format!(
            "max deviation at dt=1e-3: {dev:.2e} (tol 1e-8); halving ratio dt 0.05->0.025: [{}] (want [12, 20]); \
             dt 1e-3->5e-4 (round-off floor): [{}]; flat is reproduced exactly",
            fmt(&ratios),
            fmt(&fine_ratios)
        ),
    )
}

/// Zero-scalar-curvature initial data: `κ = κ₀ = 1`.
fn zero_scalar_runs() -> Vec<(String, OdeTrajectory)> {
    let mut out = Vec::new();
    for n in [3, 4, 5] {
        for h in [0.5, 1.0, 2.0] {
            for a0 in [-0.2, -0.1, 0.0, 0.1, 0.2] {
                for sign in [1.0, -1.0] {
                    let Ok(y) = synthesize_initial(n, h, a0, 1.0, 1.0, sign, 0.0) else {
                        continue;
                    };
                    let p = ricci_lab::ode::OdeParams {
                        kappa: Some(1.0),
                        ..ricci_lab::ode::OdeParams::new(n, h, 1.0)
                    };
                    if let Ok(tr) = integrate(y, &p, 1.0, 1e-3) {
                        out.push((format!("n={n} h={h} a0={a0} sign={sign}"), tr));
                    }
                }
            }
        }
    }
    out
}

#[derive(Default)]
struct Drifts {
    count: usize,
    a0: f64,
    f2s: f64,
    quad: f64,
    worst: String,
}

impl Drifts {
    fn add(&mut self, label: &str, tr: &OdeTrajectory) {
        let span = tr.span().max(f64::MIN_POSITIVE);
        let r = first_integrals(tr);
        let a0 = r.a0_drift / span;
        if a0 > self.a0 || self.worst.is_empty() {
            self.worst = label.to_string();
        }
        self.count += 1;
        self.a0 = self.a0.max(a0);
        self.f2s = self.f2s.max(r.f2s_drift / span);
        self.quad = self
            .quad
            .max(max_dev(tr.ledger.iter().map(|l| l.first_integral_res.abs())));
    }
}

/// Accepted trajectories cover the requested span without a DOMAIN_EXIT.
/// Runs that stop at a guard are reported separately: near the exit the
/// right-hand side blows up like `b^{1-n}` or `1/f` and fixed-step RK4
/// no longer resolves it.
fn first_integral_conservation() -> Verdict {
    let (mut accepted, mut exited) = (Drifts::default(), Drifts::default());
    for (label, tr) in &zero_scalar_runs() {
        if tr.exit.is_none() {
            accepted.add(label, tr);
        } else {
            exited.add(label, tr);
        }
    }
    let mut fam_f2s = 0.0f64;
    for n in [3, 4, 5] {
        for (_, fam) in families(n, 0.3, 1.3) {
            let tr = integrate(fam.initial_state(0.3).expect("initial"), &fam.params(), 1.0, 1e-3).expect("integrates");
            fam_f2s = fam_f2s.max(first_integrals(&tr).f2s_drift / tr.span());
        }
    }
    let tol = 1e-8;
    let a = &accepted;
    verdict(
        a.count > 0 && a.a0 <= tol && a.f2s <= tol && a.quad <= tol && fam_f2s <= tol,
        format!(
            "{} accepted zero-scalar trajectories: a0 drift/span {:.2e} (worst {}), f2s drift/span {:.2e}, \
             quadrature {:.2e}; family f2s drift/span {fam_f2s:.2e} (tol {tol:e}); \
             {} runs ending in DOMAIN_EXIT: a0 {:.1e}, f2s {:.1e}, quadrature {:.1e}",
            a.count, a.a0, a.worst, a.f2s, a.quad, exited.count, exited.a0, exited.f2s, exited.quad
        ),
    )
}

fn cotton_weyl_t_suite() -> Verdict {
    let tol = 1e-7;
    let mut corpus = 0.0f64;
    let mut checked = 0;
    let mut notes = Vec::new();
    for name in ExampleName::ALL {
        let ex = Example::resolve(name, &ExampleConfig::default()).expect("example");
        let ets = ex.structure().expect("structure");
        let r = identity_report(IdentityId::Lemma51, &ets, &ex.grid.points(), tol).expect("report");
        if r.status == Status::Skip {
            notes.push(format!("{} skipped", name.name()));
        }
        checked += r.samples.len();
        corpus = corpus.max(r.max_abs);
    }
    let mut traj = 0.0f64;
    for n in [3, 4, 5] {
        for (_, fam) in families(n, 0.3, 1.3) {
            let tr = integrate(fam.initial_state(0.3).expect("initial"), &fam.params(), 1.0, 1e-3).expect("integrates");
            let ets = tr.structure().expect("trajectory structure");
            let grid: Vec<f64> = tr.sample_indices(10).into_iter().map(|i| tr.states[i].t).collect();
            let r = identity_report(IdentityId::Lemma51, &ets, &grid, tol).expect("report");
            checked += r.samples.len();
            traj = traj.max(r.max_abs);
        }
    }
    let mut t_max = 0.0f64;
    for n in [3, 4, 5] {
        let w = ((n as f64 - 1.0) / 2.0).sqrt();
        for (b, lo, hi) in [
            (format!("{w}*sin(t/{w})"), 0.2, 2.0),
            ("t".to_string(), 0.2, 2.0),
            (format!("{w}*sinh(t/{w})"), 0.2, 2.0),
        ] {
            let metric = WarpedProductMetric::warped(n, RadialScalarField::parse(&b, lo, hi).unwrap(), 1.0).unwrap();
            let f = RadialScalarField::parse("2 + cos(t)", lo, hi).unwrap();
            let ets = EinsteinTypeStructure::new(metric, f, HMode::Constant(0.0)).unwrap();
            for t in ets.default_grid() {
                t_max = t_max.max(t_tensor(&ets, t).expect("T").max_abs());
            }
        }
    }
    let mut detail = format!(
        "corpus max {corpus:.2e}, trajectory states max {traj:.2e} (tol {tol:e}, {checked} points); \
         T on Einstein inputs {t_max:.2e} (tol 1e-12)"
    );
    if !notes.is_empty() {
        detail.push_str(&format!("; {}", notes.join(", ")));
    }
    verdict(
        corpus <= tol && traj <= tol && t_max <= 1e-12 && notes.is_empty(),
        detail,
    )
}

fn alpha_dynamics() -> Verdict {
    let mut n_max = 0.0f64;
    let mut nn_max = 0.0f64;
    let mut used = 0;
    let mut excluded = 0;
    for (_, tr) in zero_scalar_runs() {
        match alpha_dynamics_residual(&tr, 1e-8) {
            Ok(r) => {
                used += 1;
                n_max = n_max.max(r.n_alpha_max);
                nn_max = nn_max.max(r.nn_alpha_max);
            }
            Err(e) if e.is_precondition() => excluded += 1,
            Err(e) => return verdict(false, format!("alpha dynamics failed: {e}")),
        }
    }
    verdict(
        used > 0 && n_max <= 1e-6 && nn_max <= 1e-6,
        format!("{used} trajectories ({excluded} excluded by preconditions): N(alpha) {n_max:.2e}, NN(alpha) {nn_max:.2e} (tol 1e-6)"),
    )
}

fn trichotomy() -> Verdict {
    let cfg = LabConfig::from_json(
        r#"{"sweep": {"parameter": "a0", "values": [-0.2, 0, 0.2],
             "inner": {"n": 3, "h": 1, "a0": 0, "kappa": 1, "b0": 1, "t_span": 10, "dt": 0.001}}}"#,
    )
    .expect("sweep config");
    let r = run_sweep(cfg.sweep.as_ref().unwrap()).expect("sweep");
    let labels: Vec<&str> = r
        .rows
        .iter()
        .map(|row| row.label.as_deref().unwrap_or("ERROR"))
        .collect();
    let expected = ["INCOMPLETE_OR_INCONSISTENT", "RICCI_FLAT", "INCOMPLETE_OR_INCONSISTENT"];
    let obstructions: Vec<String> = r
        .rows
        .iter()
        .filter(|row| row.value != 0.0)
        .map(|row| format!("a0={}: {}", row.value, row.reason.as_deref().unwrap_or("none")))
        .collect();
    let detected = r
        .rows
        .iter()
        .filter(|row| row.value != 0.0)
        .all(|row| row.reason.is_some());
    verdict(
        labels == expected && detected,
        format!("labels {labels:?}; {}", obstructions.join("; ")),
    )
}

fn full_suite(dir: &Path) -> Vec<String> {
    let mut lines = Vec::new();
    for name in ExampleName::ALL {
        let o = cmd_verify_example(name.name(), &LabConfig::default(), None, &dir.join("verify"));
        lines.push(format!("verify {} {}", name.name(), o.code));
        let cfg = LabConfig::from_json(&format!(
            r#"{{"identities": {{"structure": {{"example": {{"name": "{}"}}}}}}}}"#,
            name.name()
        ))
        .unwrap();
        let o = cmd_identities(&cfg, None, &dir.join(format!("identities_{}", name.name())));
        lines.push(format!("identities {} {}", name.name(), o.code));
        lines.extend(o.lines);
    }
    for (i, block) in [
        r#"{"n": 3, "h": 2, "t_span": 1, "family": {"family": "sphere", "lambda": 2}}"#,
        r#"{"n": 4, "h": 0, "a0": 0, "kappa": 1, "b0": 1, "t_span": 1}"#,
        r#"{"n": 3, "h": 1, "a0": -0.5, "b0": 1, "bp_sign": -1, "t_span": 5}"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = LabConfig::from_json(&format!(r#"{{"integrate": {block}}}"#)).unwrap();
        let o = cmd_integrate(&cfg, &dir.join(format!("integrate_{i}")));
        lines.push(format!("integrate {i} {}", o.code));
        lines.extend(o.lines);
    }
    let cfg = LabConfig::from_json(
        r#"{"sweep": {"parameter": "a0", "values": [-0.2, 0, 0.2],
             "inner": {"n": 3, "h": 1, "a0": 0, "kappa": 1, "b0": 1, "t_span": 3}}}"#,
    )
    .unwrap();
    let o = cmd_sweep(&cfg, &dir.join("sweep"));
    lines.push(format!("sweep {}", o.code));
    lines.extend(o.lines);
    lines
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).expect("readable dir") {
            let p = e.expect("dir entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).expect("readable file"));
            }
        }
    }
    out
}

fn determinism() -> Verdict {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (la, lb) = (full_suite(a.path()), full_suite(b.path()));
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    let differing: Vec<&String> = ta.keys().filter(|k| ta.get(*k) != tb.get(*k)).collect();
    let bytes: usize = ta.values().map(Vec::len).sum();
    let csv_ok = ta
        .get("sweep/sweep.csv")
        .is_some_and(|c| c.starts_with(SWEEP_CSV_HEADER.as_bytes()));
    verdict(
        la == lb && ta.len() == tb.len() && differing.is_empty() && csv_ok && !ta.is_empty(),
        format!(
            "{} files ({bytes} bytes) per run, {} differ, stdout identical: {}",
            ta.len(),
            differing.len(),
            la == lb
        ),
    )
}

/// name, optional time budget, check
type Criterion = (&'static str, Option<Duration>, fn() -> Verdict);

fn main() {
    // libtest passes flags such as --nocapture; they do not apply here
    let criteria: Vec<Criterion> = vec![
        (
            "exterior reproduction",
            Some(Duration::from_secs(1)),
            exterior_reproduction,
        ),
        (
            "interior reproduction",
            Some(Duration::from_secs(1)),
            interior_reproduction,
        ),
        (
            "finite-difference oracle agreement",
            Some(Duration::from_secs(30)),
            oracle_agreement,
        ),
        (
            "closed-form family recovery",
            Some(Duration::from_secs(5)),
            family_recovery,
        ),
        ("first-integral conservation", None, first_integral_conservation),
        ("cotton/weyl/T identity suite", None, cotton_weyl_t_suite),
        ("alpha dynamics", None, alpha_dynamics),
        ("rigidity trichotomy sweep", None, trichotomy),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (v, took) = timed(limit, f);
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} [{:.3}s] {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
