//! Einstein-type structures `(g, f, h)` with `f Ric = Ddf + h g`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{uniform_grid, RadialScalarField};
use crate::frame::{curvature_jets, CurvatureJets, FramePointCurvature, RadialHessian};
use crate::jet::Jet;
use crate::metric::{LocalFrame, WarpedProductMetric};

/// Named choices of `h` in terms of the current `(s, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Preset {
    /// h = s f/(n-1)
    VacuumStatic,
    /// h = s f/(n-1) + κ/(n-1)
    VStatic { kappa: f64 },
    /// h = s f/(n-1) - s/(n(n-1))
    Cpe,
    /// h = (s - ρ - μ) f/(n-1), ρ and μ constant
    StaticPerfectFluid { rho: f64, mu: f64 },
    /// h = c s f
    Csf { c: f64 },
}

#[derive(Debug, Clone)]
pub enum HMode {
    Constant(f64),
    Function(RadialScalarField),
    Preset(Preset),
}

impl HMode {
    pub fn name(&self) -> String {
        match self {
            HMode::Constant(h) => format!("constant({h})"),
            HMode::Function(_) => "function".into(),
            HMode::Preset(p) => format!("preset({p:?})"),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            HMode::Constant(h) => Some(*h),
            _ => None,
        }
    }

    fn scaled(&self, c: f64) -> Result<HMode> {
        Ok(match self {
            HMode::Constant(h) => HMode::Constant(h * c),
            HMode::Function(f) => HMode::Function(f.scaled(c)),
            HMode::Preset(Preset::VStatic { kappa }) => HMode::Preset(Preset::VStatic { kappa: kappa * c }),
            HMode::Preset(Preset::Cpe) => return Err(LabError::Config("the CPE preset does not scale with f".into())),
            HMode::Preset(p) => HMode::Preset(*p),
        })
    }
}

pub const DEFAULT_GRID_POINTS: usize = 256;
pub const DEFAULT_GRID_MARGIN: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct EinsteinTypeStructure {
    metric: WarpedProductMetric,
    f: RadialScalarField,
    h_mode: HMode,
    lo: f64,
    hi: f64,
}

impl EinsteinTypeStructure {
    /// Fails with `ZeroPotential` when `max |f|` over the default grid is at
    /// most 1e-12.
    pub fn new(metric: WarpedProductMetric, f: RadialScalarField, h_mode: HMode) -> Result<Self> {
        let (m_lo, m_hi) = metric.domain();
        let (f_lo, f_hi) = f.domain();
        let (mut lo, mut hi) = (m_lo.max(f_lo), m_hi.min(f_hi));
        if let HMode::Function(h) = &h_mode {
            lo = lo.max(h.domain().0);
            hi = hi.min(h.domain().1);
        }
        if lo >= hi {
            return Err(LabError::Config(
                "metric, potential and h domains do not overlap".into(),
            ));
        }
        let grid = uniform_grid(lo, hi, DEFAULT_GRID_POINTS, DEFAULT_GRID_MARGIN);
        let fmax = grid
            .iter()
            .filter_map(|&t| f.value(t).ok())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if fmax <= 1e-12 {
            return Err(LabError::ZeroPotential { t: grid[0], f: fmax });
        }
        Ok(EinsteinTypeStructure {
            metric,
            f,
            h_mode,
            lo,
            hi,
        })
    }

    pub fn metric(&self) -> &WarpedProductMetric {
        &self.metric
    }

    pub fn f(&self) -> &RadialScalarField {
        &self.f
    }

    pub fn h_mode(&self) -> &HMode {
        &self.h_mode
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// 256 uniform points with a 1% margin at each end.
    pub fn default_grid(&self) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, DEFAULT_GRID_POINTS, DEFAULT_GRID_MARGIN)
    }

    pub fn with_h_mode(&self, h_mode: HMode) -> Result<Self> {
        EinsteinTypeStructure::new(self.metric.clone(), self.f.clone(), h_mode)
    }

    /// `(f, h) -> (c f, c h)`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        EinsteinTypeStructure::new(self.metric.clone(), self.f.scaled(c), self.h_mode.scaled(c)?)
    }

    /// Data-backed fields get the looser default tolerance.
    pub fn is_closed_form(&self) -> bool {
        let metric_closed = match self.metric.ansatz() {
            crate::metric::Ansatz::Warped { warp, .. } => warp.is_closed(),
            crate::metric::Ansatz::ConformalRadial { lapse } => lapse.is_closed(),
        };
        metric_closed && self.f.is_closed()
    }

    /// All jets needed by the identities at `t`. Preset `h` is recomputed here.
    pub fn point(&self, t: f64) -> Result<RadialPoint> {
        if t < self.lo || t > self.hi {
            return Err(LabError::DomainError {
                t,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let lf = self.metric.local(t)?;
        let curv = curvature_jets(&lf);
        let f = self.f.eval(t)?;
        let nf = lf.n as f64;
        let h = match &self.h_mode {
            HMode::Constant(h) => Jet::constant(*h),
            HMode::Function(hf) => hf.eval(t)?,
            HMode::Preset(p) => {
                let (s, fs) = (curv.s, curv.s * f);
                match *p {
                    Preset::VacuumStatic => fs / (nf - 1.0),
                    Preset::VStatic { kappa } => (fs + kappa) / (nf - 1.0),
                    Preset::Cpe => fs / (nf - 1.0) - s / (nf * (nf - 1.0)),
                    Preset::StaticPerfectFluid { rho, mu } => (s - (rho + mu)) * f / (nf - 1.0),
                    Preset::Csf { c } => fs * c,
                }
            }
        };
        Ok(RadialPoint {
            t,
            n: lf.n,
            lf,
            curv,
            f,
            h,
        })
    }
}

/// Jets of every ingredient at one radial point. Derivatives along the unit
/// radial direction go through [`RadialPoint::d`].
#[derive(Debug, Clone, Copy)]
pub struct RadialPoint {
    pub t: f64,
    pub n: usize,
    lf: LocalFrame,
    pub(crate) curv: CurvatureJets,
    pub f: Jet,
    pub h: Jet,
}

impl RadialPoint {
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn d(&self, q: &Jet) -> Jet {
        self.lf.d(q)
    }

    pub fn laplacian(&self, q: &Jet) -> Jet {
        self.lf.laplacian(q)
    }

    pub fn beta(&self) -> Jet {
        self.lf.beta()
    }

    pub fn warp(&self) -> Jet {
        self.lf.b
    }

    pub fn s(&self) -> Jet {
        self.curv.s
    }

    pub fn alpha(&self) -> Jet {
        self.curv.r_rad
    }

    pub fn r_tan(&self) -> Jet {
        self.curv.r_tan
    }

    pub fn frame(&self) -> FramePointCurvature {
        let nf = self.nf();
        let (sr, st) = (self.curv.sec_rad.value(), self.curv.sec_tan.value());
        let r_rad = (nf - 1.0) * sr;
        let r_tan = sr + (nf - 2.0) * st;
        FramePointCurvature {
            t: self.t,
            n: self.n,
            r_rad,
            r_tan,
            s: r_rad + (nf - 1.0) * r_tan,
            sec_rad: sr,
            sec_tan: st,
        }
    }

    /// f along e₁.
    pub fn df(&self) -> Jet {
        self.d(&self.f)
    }

    pub fn ddf_rad(&self) -> Jet {
        let df = self.df();
        self.d(&df)
    }

    pub fn ddf_tan(&self) -> Jet {
        self.beta() * self.df()
    }

    pub fn hessian(&self) -> RadialHessian {
        RadialHessian {
            ddf_rad: self.ddf_rad().value(),
            ddf_tan: self.ddf_tan().value(),
            lap: self.laplacian(&self.f).value(),
        }
    }
}
