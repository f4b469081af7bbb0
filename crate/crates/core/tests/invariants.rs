use proptest::prelude::*;

use ricci_lab::field::RadialScalarField;
use ricci_lab::identities::{einstein_type_residual, identity_report, trace_identity_residual, IdentityId, Status};
use ricci_lab::lab::examples::{Example, ExampleConfig, ExampleName};
use ricci_lab::metric::WarpedProductMetric;
use ricci_lab::ode::{first_integrals, integrate, synthesize_initial, OdeParams, OdeTrajectory, SolutionFamily};
use ricci_lab::structure::{EinsteinTypeStructure, HMode, Preset};

/// Frozen bound on `a0 drift / (dt⁴ span)` for the zero-scalar runs below.
/// Measured value is about 62 at dt = 0.02, 0.01 and 0.005.
const A0_DRIFT_C: f64 = 80.0;

fn warped(n: usize, b: [f64; 3], f: [f64; 2], h: HMode) -> EinsteinTypeStructure {
    let warp = RadialScalarField::parse(&format!("{}*exp({}*t) + {}", b[0], b[1], b[2]), 0.4, 1.6).unwrap();
    let pot = RadialScalarField::parse(&format!("{} + {}*sin(t)", f[0], f[1]), 0.4, 1.6).unwrap();
    EinsteinTypeStructure::new(WarpedProductMetric::warped(n, warp, 1.0).unwrap(), pot, h).unwrap()
}

/// Zero-scalar runs that cover the whole span.
fn zero_scalar_runs(dt: f64) -> Vec<OdeTrajectory> {
    let mut out = Vec::new();
    for n in 3..=5 {
        for h in [0.5, 1.0, 2.0] {
            for a0 in [-0.2, -0.1, 0.1, 0.2] {
                for sign in [1.0, -1.0] {
                    let Ok(y) = synthesize_initial(n, h, a0, 1.0, 1.0, sign, 0.0) else {
                        continue;
                    };
                    let Ok(tr) = integrate(y, &OdeParams::new(n, h, 1.0), 1.0, dt) else {
                        continue;
                    };
                    if tr.exit.is_none() {
                        out.push(tr);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn a0_drift_is_bounded_by_frozen_constant() {
    for dt in [0.02, 0.01, 0.005] {
        let runs = zero_scalar_runs(dt);
        assert!(runs.len() >= 10, "only {} runs at dt={dt}", runs.len());
        for tr in &runs {
            let c = first_integrals(tr).a0_drift / (dt.powi(4) * tr.span());
            assert!(c <= A0_DRIFT_C, "dt={dt}: C = {c}");
        }
    }
}

#[test]
fn sectional_relations_when_scalar_curvature_vanishes() {
    let ex = Example::resolve(ExampleName::SchwarzschildExterior, &ExampleConfig::default()).unwrap();
    let mut structures = vec![ex.structure().unwrap()];
    for tr in zero_scalar_runs(1e-3).into_iter().filter(|tr| tr.params.n > 3).take(4) {
        structures.push(tr.structure().unwrap());
    }
    for ets in &structures {
        let n = ets.n() as f64;
        let (lo, hi) = ets.domain();
        for k in 1..10 {
            let t = lo + (hi - lo) * k as f64 / 10.0;
            let c = ets.point(t).unwrap().frame();
            let alpha = c.r_rad;
            assert!(c.s.abs() < 1e-9, "s = {} at t = {t}", c.s);
            assert!((c.sec_rad - alpha / (n - 1.0)).abs() <= 1e-9);
            assert!((c.sec_tan + 2.0 * alpha / ((n - 1.0) * (n - 2.0))).abs() <= 1e-9);
        }
    }
}

#[test]
fn flat_warp_has_zero_curvature() {
    for n in 3..=6 {
        let b = RadialScalarField::parse("t", 0.1, 3.0).unwrap();
        let flat = EinsteinTypeStructure::new(
            WarpedProductMetric::warped(n, b, 1.0).unwrap(),
            RadialScalarField::constant(1.0, 0.1, 3.0).unwrap(),
            HMode::Constant(0.0),
        )
        .unwrap();
        for t in [0.2, 1.0, 2.9] {
            let c = flat.point(t).unwrap().frame();
            assert_eq!((c.r_rad, c.r_tan, c.s, c.sec_rad, c.sec_tan), (0.0, 0.0, 0.0, 0.0, 0.0));
        }
    }
}

#[test]
fn div_weyl_matches_cotton_on_families() {
    for n in 4..=6 {
        for fam in [
            SolutionFamily::sphere(n, 1.0, 1.0, 0.2, 1.5).unwrap(),
            SolutionFamily::hyperbolic(n, 1.0, 1.0, 0.2, 1.5).unwrap(),
        ] {
            let tr = integrate(fam.initial_state(0.3).unwrap(), &fam.params(), 1.0, 1e-3).unwrap();
            let ets = tr.structure().unwrap();
            let r = identity_report(IdentityId::DivWeyl, &ets, &ets.default_grid(), 1e-7).unwrap();
            assert_eq!(r.status, Status::Pass, "n={n}: {}", r.max_abs);
        }
    }
}

#[test]
fn vacuum_static_preset_passes_trace_on_exterior() {
    let ex = Example::resolve(ExampleName::SchwarzschildExterior, &ExampleConfig::default()).unwrap();
    let base = ex.structure().unwrap();
    let ets = EinsteinTypeStructure::new(
        base.metric().clone(),
        base.f().clone(),
        HMode::Preset(Preset::VacuumStatic),
    )
    .unwrap();
    let r = identity_report(IdentityId::Trace, &ets, &ex.grid.points(), 1e-10).unwrap();
    assert_eq!(r.status, Status::Pass, "{}", r.max_abs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_residual_is_bounded_by_eq1_residuals(
        n in 3usize..=6, a in 0.5..1.5f64, p in -0.5..0.5f64, r in 0.3..1.0f64,
        c0 in 1.0..2.0f64, c1 in -0.5..0.5f64, h in -2.0..2.0f64, t in 0.5..1.5f64,
    ) {
        let ets = warped(n, [a, p, r], [c0, c1], HMode::Constant(h));
        let (rr, rt) = einstein_type_residual(&ets, t).unwrap();
        let tr = trace_identity_residual(&ets, t).unwrap();
        let eps = rr.abs().max(rt.abs());
        prop_assert!(tr.abs() <= n as f64 * eps + 1e-12 * (1.0 + eps), "{tr} vs {eps}");
    }

    #[test]
    fn vacuum_static_trace_is_the_restated_operator(
        n in 3usize..=6, a in 0.5..1.5f64, p in -0.5..0.5f64, r in 0.3..1.0f64,
        c0 in 1.0..2.0f64, c1 in -0.5..0.5f64, t in 0.5..1.5f64,
    ) {
        let ets = warped(n, [a, p, r], [c0, c1], HMode::Preset(Preset::VacuumStatic));
        let pt = ets.point(t).unwrap();
        let nf = n as f64;
        let (f, s) = (pt.f.value(), pt.s().value());
        let expected = pt.laplacian(&pt.f).value() - (s * f - nf * s * f / (nf - 1.0));
        let got = trace_identity_residual(&ets, t).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * (1.0 + expected.abs()), "{got} vs {expected}");
    }
}
