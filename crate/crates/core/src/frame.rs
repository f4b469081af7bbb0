//! Orthonormal-frame curvature, Hessian and Laplacian for the radial ansätze.
//!
//! Frame: e₁ radial, e₂..eₙ tangential. Sign convention: the unit round
//! sphere has `Ric = (n-1) g`.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::field::RadialScalarField;
use crate::jet::{Jet, Scalar};
use crate::metric::{Ansatz, LocalFrame, WarpedProductMetric};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FramePointCurvature {
    pub t: f64,
    pub n: usize,
    /// Ric(e₁, e₁), the radial eigenvalue α.
    pub r_rad: f64,
    /// Ric(eᵢ, eᵢ) for any tangential i.
    pub r_tan: f64,
    pub s: f64,
    /// R₁ᵢ₁ᵢ.
    pub sec_rad: f64,
    /// Rᵢⱼᵢⱼ for tangential i ≠ j.
    pub sec_tan: f64,
}

impl FramePointCurvature {
    fn from_sectional(t: f64, n: usize, sec_rad: f64, sec_tan: f64) -> Self {
        let nf = n as f64;
        let r_rad = (nf - 1.0) * sec_rad;
        let r_tan = sec_rad + (nf - 2.0) * sec_tan;
        FramePointCurvature {
            t,
            n,
            r_rad,
            r_tan,
            s: r_rad + (nf - 1.0) * r_tan,
            sec_rad,
            sec_tan,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.r_rad
    }

    pub fn trace_defect(&self) -> f64 {
        self.s - self.r_rad - (self.n as f64 - 1.0) * self.r_tan
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialHessian {
    pub ddf_rad: f64,
    pub ddf_tan: f64,
    pub lap: f64,
}

/// Curvature quantities as jets in the native coordinate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CurvatureJets {
    pub sec_rad: Jet,
    pub sec_tan: Jet,
    pub r_rad: Jet,
    pub r_tan: Jet,
    pub s: Jet,
}

pub(crate) fn curvature_jets(lf: &LocalFrame) -> CurvatureJets {
    let nf = lf.n as f64;
    let db = lf.d(&lf.b);
    let ddb = lf.d(&db);
    let sec_rad = -ddb / lf.b;
    let sec_tan = (-(db * db) + lf.kappa0) / (lf.b * lf.b);
    let r_rad = sec_rad * (nf - 1.0);
    let r_tan = sec_rad + sec_tan * (nf - 2.0);
    let s = r_rad + r_tan * (nf - 1.0);
    CurvatureJets {
        sec_rad,
        sec_tan,
        r_rad,
        r_tan,
        s,
    }
}

/// Radial and tangential sectional curvatures of `dt² + b² g_Σ` from
/// `(b, b', b'')`.
pub fn warped_sectional<S: Scalar>(kappa0: f64, b: S, b1: S, b2: S) -> (S, S) {
    (-(b2 / b), (-(b1 * b1) + kappa0) / (b * b))
}

/// `(R₁₁, R₂₂)` of `dt²/F² + t² g_{S²}` from `(t, F, F')`.
pub fn conformal_ricci<S: Scalar>(t: S, f: S, f1: S) -> (S, S) {
    let r11 = -(f1 * f * 2.0) / t;
    let r22 = -(t * f1 * f + f * f - 1.0) / (t * t);
    (r11, r22)
}

/// Frame curvature of a WARPED metric.
pub fn ricci_warped(metric: &WarpedProductMetric, t: f64) -> Result<FramePointCurvature> {
    if metric.is_conformal() {
        return Err(LabError::AnsatzMismatch("ricci_warped needs the warped ansatz".into()));
    }
    let lf = metric.local(t)?;
    let c = curvature_jets(&lf);
    Ok(FramePointCurvature::from_sectional(
        t,
        lf.n,
        c.sec_rad.value(),
        c.sec_tan.value(),
    ))
}

/// Frame curvature of `dt²/f² + t² g_{S²}` (n = 3).
pub fn ricci_conformal_radial(f: &RadialScalarField, t: f64) -> Result<FramePointCurvature> {
    let j = f.eval(t)?;
    if j.value() <= 0.0 {
        return Err(LabError::NonpositiveLapse { t, f: j.value() });
    }
    if t <= 0.0 {
        return Err(LabError::SingularWarp { t, b: t, guard: 0.0 });
    }
    let (r11, r22) = conformal_ricci(t, j.d(0), j.d(1));
    // n = 3: R_rad = 2 sec_rad, R_tan = sec_rad + sec_tan
    let sec_rad = 0.5 * r11;
    Ok(FramePointCurvature {
        t,
        n: 3,
        r_rad: r11,
        r_tan: r22,
        s: r11 + 2.0 * r22,
        sec_rad,
        sec_tan: r22 - sec_rad,
    })
}

/// Frame curvature for either ansatz.
pub fn frame_curvature(metric: &WarpedProductMetric, t: f64) -> Result<FramePointCurvature> {
    match metric.ansatz() {
        Ansatz::Warped { .. } => ricci_warped(metric, t),
        Ansatz::ConformalRadial { lapse } => {
            if t <= metric.b_min_guard() {
                return Err(LabError::SingularWarp {
                    t,
                    b: t,
                    guard: metric.b_min_guard(),
                });
            }
            ricci_conformal_radial(lapse, t)
        }
    }
}

/// Frame Hessian diagonals and Laplacian of a radial function.
pub fn hessian_laplacian_radial(metric: &WarpedProductMetric, f: &RadialScalarField, t: f64) -> Result<RadialHessian> {
    let lf = metric.local(t)?;
    let u = f.eval(t)?;
    match metric.ansatz() {
        Ansatz::Warped { .. } => {
            let beta = lf.beta().value();
            let (u1, u2) = (u.d(1), u.d(2));
            Ok(RadialHessian {
                ddf_rad: u2,
                ddf_tan: beta * u1,
                lap: u2 + (lf.n as f64 - 1.0) * beta * u1,
            })
        }
        Ansatz::ConformalRadial { .. } => {
            let (ff, f1) = (lf.speed.d(0), lf.speed.d(1));
            let (u1, u2) = (u.d(1), u.d(2));
            Ok(RadialHessian {
                ddf_rad: ff * ff * u2 + ff * f1 * u1,
                ddf_tan: ff * ff * u1 / t,
                lap: ff * ff * u2 + (2.0 * ff * ff / t + ff * f1) * u1,
            })
        }
    }
}
