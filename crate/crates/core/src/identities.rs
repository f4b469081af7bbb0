//! Pointwise residuals of `f Ric = Ddf + h g` and its scalar consequences,
//! and grid reports over them.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::jet::Jet;
use crate::structure::{EinsteinTypeStructure, HMode, Preset};
use crate::tensors;

pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const TRAJECTORY_TOL: f64 = 1e-6;

/// `|f'|` at or below this counts as a critical point.
pub const CRITICAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    Eq1,
    Trace,
    Dh,
    DeltaH,
    F2s,
    Bochner,
    ScalarInequality,
    CsfGradient,
    SignFacts,
    Lemma51,
    Eigenstructure,
    Cotton,
    Weyl,
    TTensor,
    DivWeyl,
}

impl IdentityId {
    pub const ALL: [IdentityId; 15] = [
        IdentityId::Eq1,
        IdentityId::Trace,
        IdentityId::Dh,
        IdentityId::DeltaH,
        IdentityId::F2s,
        IdentityId::Bochner,
        IdentityId::ScalarInequality,
        IdentityId::CsfGradient,
        IdentityId::SignFacts,
        IdentityId::Lemma51,
        IdentityId::Eigenstructure,
        IdentityId::Cotton,
        IdentityId::Weyl,
        IdentityId::TTensor,
        IdentityId::DivWeyl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::Eq1 => "eq1",
            IdentityId::Trace => "trace",
            IdentityId::Dh => "dh",
            IdentityId::DeltaH => "delta_h",
            IdentityId::F2s => "f2s",
            IdentityId::Bochner => "bochner",
            IdentityId::ScalarInequality => "scalar_inequality",
            IdentityId::CsfGradient => "csf_gradient",
            IdentityId::SignFacts => "sign_facts",
            IdentityId::Lemma51 => "lemma51",
            IdentityId::Eigenstructure => "eigenstructure",
            IdentityId::Cotton => "cotton",
            IdentityId::Weyl => "weyl",
            IdentityId::TTensor => "t_tensor",
            IdentityId::DivWeyl => "div_weyl",
        }
    }

    pub fn parse(s: &str) -> Result<IdentityId> {
        IdentityId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown identity id '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub residual: f64,
}

/// `max_abs` is the max of `|residual|` over the kept samples; `pass` iff
/// `max_abs <= tolerance`. Grid points whose preconditions fail are dropped
/// and counted in `excluded`; a report with nothing left is a SKIP.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityResidualReport {
    pub identity_id: IdentityId,
    pub tolerance: f64,
    pub max_abs: f64,
    pub pass: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub excluded: usize,
    pub samples: Vec<Sample>,
}

impl IdentityResidualReport {
    pub fn from_samples(
        id: IdentityId,
        tolerance: f64,
        samples: Vec<Sample>,
        excluded: usize,
        reason: Option<String>,
    ) -> Self {
        if samples.is_empty() {
            return IdentityResidualReport::skipped(
                id,
                tolerance,
                reason.unwrap_or_else(|| "no admissible grid points".into()),
                excluded,
            );
        }
        let mut max_abs = 0.0f64;
        let mut finite = true;
        for s in &samples {
            if !s.residual.is_finite() {
                finite = false;
            }
            // NaN-aware max so the reduction does not depend on order
            max_abs = max_abs.max(s.residual.abs());
        }
        if !finite {
            max_abs = f64::INFINITY;
        }
        let pass = max_abs <= tolerance;
        IdentityResidualReport {
            identity_id: id,
            tolerance,
            max_abs,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            reason: if excluded > 0 { reason } else { None },
            excluded,
            samples,
        }
    }

    pub fn skipped(id: IdentityId, tolerance: f64, reason: String, excluded: usize) -> Self {
        IdentityResidualReport {
            identity_id: id,
            tolerance,
            max_abs: 0.0,
            pass: true,
            status: Status::Skip,
            reason: Some(reason),
            excluded,
            samples: Vec::new(),
        }
    }
}

/// 1e-9 for closed-form structures, 1e-6 when any field is data-backed.
pub fn default_tolerance(ets: &EinsteinTypeStructure) -> f64 {
    if ets.is_closed_form() {
        CLOSED_FORM_TOL
    } else {
        TRAJECTORY_TOL
    }
}

fn constant_h(ets: &EinsteinTypeStructure) -> Result<f64> {
    ets.h_mode().constant().ok_or_else(|| LabError::WrongHMode {
        expected: "constant",
        found: ets.h_mode().name(),
    })
}

/// `(f R_rad - Ddf_rad - h, f R_tan - Ddf_tan - h)`.
pub fn einstein_type_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<(f64, f64)> {
    let p = ets.point(t)?;
    let (f, h) = (p.f.value(), p.h.value());
    Ok((
        f * p.alpha().value() - p.ddf_rad().value() - h,
        f * p.r_tan().value() - p.ddf_tan().value() - h,
    ))
}

/// `Δf - s f + n h`.
pub fn trace_identity_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<f64> {
    let p = ets.point(t)?;
    Ok(p.laplacian(&p.f).value() - p.s().value() * p.f.value() + p.nf() * p.h.value())
}

/// `h' - (f s' + 2 s f')/(2(n-1))` along the unit radial direction.
pub fn dh_identity_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<f64> {
    let p = ets.point(t)?;
    let (s, f) = (p.s(), p.f);
    let rhs = (f * p.d(&s) + s * p.df() * 2.0) / (2.0 * (p.nf() - 1.0));
    Ok((p.d(&p.h) - rhs).value())
}

/// `f(t)² s(t) - f(t₀)² s(t₀)` over the grid, `t₀ = grid[0]`.
pub fn f2s_conservation(ets: &EinsteinTypeStructure, grid: &[f64], tolerance: f64) -> Result<IdentityResidualReport> {
    constant_h(ets)?;
    let f2s = |t: f64| -> Result<f64> {
        let p = ets.point(t)?;
        Ok(p.f.value() * p.f.value() * p.s().value())
    };
    let Some(&t0) = grid.first() else {
        return Ok(IdentityResidualReport::skipped(
            IdentityId::F2s,
            tolerance,
            "empty grid".into(),
            0,
        ));
    };
    let k0 = f2s(t0)?;
    let samples = grid
        .iter()
        .map(|&t| {
            Ok(Sample {
                t,
                residual: f2s(t)? - k0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityResidualReport::from_samples(
        IdentityId::F2s,
        tolerance,
        samples,
        0,
        None,
    ))
}

/// `Δh - [3/(2(n-1)) ⟨∇s,∇f⟩ + f Δs/(2(n-1)) + s² f/(n-1) - n h s/(n-1)]`.
pub fn delta_h_identity_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<f64> {
    let p = ets.point(t)?;
    let n = p.nf();
    let (s, f, h) = (p.s(), p.f, p.h);
    let ds = p.d(&s);
    let rhs = ds * p.df() * (3.0 / (2.0 * (n - 1.0))) + f * p.laplacian(&s) / (2.0 * (n - 1.0)) + s * s * f / (n - 1.0)
        - h * s * (n / (n - 1.0));
    Ok((p.laplacian(&h) - rhs).value())
}

/// `½Δ|∇f|² + (s - α)|∇f|² - |Ddf|²` for constant `h`.
pub fn bochner_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<f64> {
    constant_h(ets)?;
    let p = ets.point(t)?;
    let df = p.df();
    if df.value().abs() <= CRITICAL_EPS {
        return Err(LabError::CriticalPoint { t, fp: df.value() });
    }
    let grad_sq = df * df;
    let (rad, tan) = (p.ddf_rad().value(), p.ddf_tan().value());
    let hess_sq = rad * rad + (p.nf() - 1.0) * tan * tan;
    Ok(0.5 * p.laplacian(&grad_sq).value() + (p.s() - p.alpha()).value() * grad_sq.value() - hess_sq)
}

/// `Δs - 6 (|∇f|²/f²) s + 2 s²` for `h = 0`.
pub fn scalar_inequality_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<f64> {
    match ets.h_mode() {
        HMode::Constant(h) if *h == 0.0 => {}
        other => {
            return Err(LabError::WrongHMode {
                expected: "constant(0)",
                found: other.name(),
            })
        }
    }
    let p = ets.point(t)?;
    let f = p.f.value();
    if f.abs() <= CRITICAL_EPS {
        return Err(LabError::ZeroPotential { t, f });
    }
    let s = p.s();
    let q = p.df().value() / f;
    Ok(p.laplacian(&s).value() - 6.0 * q * q * s.value() + 2.0 * s.value() * s.value())
}

/// `(1 - 2nc + 2c) f s' - 2(nc - c - 1) s f'` for `h = c s f`.
pub fn csf_gradient_identity_residual(ets: &EinsteinTypeStructure, t: f64, c: f64) -> Result<f64> {
    match ets.h_mode() {
        HMode::Preset(Preset::Csf { c: c0 }) if *c0 == c => {}
        other => {
            return Err(LabError::WrongHMode {
                expected: "preset csf with matching c",
                found: other.name(),
            })
        }
    }
    let n = ets.n() as f64;
    let lead = 1.0 - 2.0 * n * c + 2.0 * c;
    if lead.abs() <= 1e-12 {
        return Err(LabError::Degenerate(format!(
            "c = {c} makes 1 - 2nc + 2c vanish (c = 1/(2(n-1)))"
        )));
    }
    let p = ets.point(t)?;
    let s = p.s();
    Ok(lead * p.f.value() * p.d(&s).value() - 2.0 * (n * c - c - 1.0) * s.value() * p.df().value())
}

/// Checks `h f > 0` where `h` is a nonzero constant and `s > 0`. Each kept
/// sample is 0 where the sign fact holds and 1 where it fails, with
/// tolerance 0. Points with `s <= 0` are excluded: no claim is made there.
pub fn sign_facts_check(ets: &EinsteinTypeStructure, grid: &[f64]) -> Result<IdentityResidualReport> {
    let id = IdentityId::SignFacts;
    let h = match ets.h_mode().constant() {
        Some(h) if h != 0.0 => h,
        _ => {
            return Ok(IdentityResidualReport::skipped(
                id,
                0.0,
                format!("needs a nonzero constant h, found {}; no claim", ets.h_mode().name()),
                grid.len(),
            ))
        }
    };
    let mut samples = Vec::new();
    let mut excluded = 0;
    for &t in grid {
        let p = ets.point(t)?;
        if p.s().value() <= 0.0 {
            excluded += 1;
            continue;
        }
        let ok = h * p.f.value() > 0.0;
        samples.push(Sample {
            t,
            residual: if ok { 0.0 } else { 1.0 },
        });
    }
    let reason = Some("s <= 0 at some grid points; no claim there".to_string());
    Ok(IdentityResidualReport::from_samples(id, 0.0, samples, excluded, reason))
}

/// Pointwise integrands `f(nh - fs)` and `s(nh - fs)`; no integral claim.
pub fn integral_integrands(ets: &EinsteinTypeStructure, t: f64) -> Result<(f64, f64)> {
    let p = ets.point(t)?;
    let (f, s, h) = (p.f.value(), p.s().value(), p.h.value());
    let g = p.nf() * h - f * s;
    Ok((f * g, s * g))
}

fn signed_max(a: f64, b: f64) -> f64 {
    if a.abs() >= b.abs() || b.is_nan() {
        a
    } else {
        b
    }
}

fn pointwise(id: IdentityId, ets: &EinsteinTypeStructure, t: f64, tolerance: f64) -> Result<f64> {
    match id {
        IdentityId::Eq1 => einstein_type_residual(ets, t).map(|(a, b)| signed_max(a, b)),
        IdentityId::Trace => trace_identity_residual(ets, t),
        IdentityId::Dh => dh_identity_residual(ets, t),
        IdentityId::DeltaH => delta_h_identity_residual(ets, t),
        IdentityId::Bochner => bochner_residual(ets, t),
        IdentityId::ScalarInequality => scalar_inequality_residual(ets, t),
        IdentityId::CsfGradient => match ets.h_mode() {
            HMode::Preset(Preset::Csf { c }) => csf_gradient_identity_residual(ets, t, *c),
            other => Err(LabError::WrongHMode {
                expected: "preset csf",
                found: other.name(),
            }),
        },
        IdentityId::Lemma51 => tensors::lemma51_residual(ets, t),
        IdentityId::Eigenstructure => tensors::eigenstructure_check(ets, t, tolerance).map(|r| r.max_deviation),
        IdentityId::Cotton => tensors::cotton_tensor(ets, t).map(|c| c.max_abs()),
        IdentityId::Weyl => {
            let p = ets.point(t)?;
            let curv = tensors::CurvatureOperatorFrame::at_point(&p, tensors::DEFAULT_MAX_DIM)?;
            tensors::weyl_tensor(&curv).map(|w| w.max_abs())
        }
        IdentityId::TTensor => tensors::t_tensor(ets, t).map(|c| c.max_abs()),
        IdentityId::DivWeyl => {
            if ets.n() < 4 {
                return Err(LabError::DimensionError {
                    n: ets.n(),
                    reason: "div W relation checked for n >= 4".into(),
                });
            }
            let (lo, hi) = ets.domain();
            let step = 1e-4 * (hi - lo);
            if t - step < lo || t + step > hi {
                return Err(LabError::DimensionError {
                    n: ets.n(),
                    reason: "stencil leaves the domain".into(),
                });
            }
            tensors::div_weyl_residual(ets, t, step)
        }
        IdentityId::F2s | IdentityId::SignFacts => unreachable!("grid-level identities"),
    }
}

/// One report for `id` over `grid`. Precondition errors at a point exclude
/// that point; any other error aborts.
pub fn identity_report(
    id: IdentityId,
    ets: &EinsteinTypeStructure,
    grid: &[f64],
    tolerance: f64,
) -> Result<IdentityResidualReport> {
    match id {
        IdentityId::F2s => {
            return match f2s_conservation(ets, grid, tolerance) {
                Err(e) if e.is_precondition() => Ok(IdentityResidualReport::skipped(
                    id,
                    tolerance,
                    e.to_string(),
                    grid.len(),
                )),
                other => other,
            }
        }
        IdentityId::SignFacts => return sign_facts_check(ets, grid),
        _ => {}
    }
    let mut samples = Vec::with_capacity(grid.len());
    let mut excluded = 0;
    let mut reason = None;
    for &t in grid {
        match pointwise(id, ets, t, tolerance) {
            Ok(r) => samples.push(Sample { t, residual: r }),
            Err(e) if e.is_precondition() => {
                excluded += 1;
                reason.get_or_insert_with(|| e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(IdentityResidualReport::from_samples(
        id, tolerance, samples, excluded, reason,
    ))
}

/// Value, first and second radial derivative of a jet, for diagnostics.
pub fn jet_triple(j: &Jet) -> [f64; 3] {
    [j.d(0), j.d(1), j.d(2)]
}
