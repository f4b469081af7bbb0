//! The two radial metric ansätze.
//!
//! `Warped`: `g = dt² + b(t)² g_Σ` with `Ric_Σ = (n-2) κ₀ g_Σ`, t arclength.
//! `ConformalRadial`: `g = dt²/F(t)² + t² g_{S²}` (n = 3). Its unit radial
//! derivative is `F d/dt` and its warp is `t`, so both cases reduce to a warp
//! jet plus a radial derivative operator.

use crate::error::{LabError, Result};
use crate::field::RadialScalarField;
use crate::jet::Jet;

pub const DEFAULT_B_MIN_GUARD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum Ansatz {
    Warped { warp: RadialScalarField, kappa0: f64 },
    ConformalRadial { lapse: RadialScalarField },
}

#[derive(Debug, Clone)]
pub struct WarpedProductMetric {
    n: usize,
    ansatz: Ansatz,
    b_min_guard: f64,
}

impl WarpedProductMetric {
    pub fn warped(n: usize, warp: RadialScalarField, kappa0: f64) -> Result<Self> {
        if n < 3 {
            return Err(LabError::DimensionError {
                n,
                reason: "need n >= 3".into(),
            });
        }
        if !kappa0.is_finite() {
            return Err(LabError::Config("kappa0 must be finite".into()));
        }
        Ok(WarpedProductMetric {
            n,
            ansatz: Ansatz::Warped { warp, kappa0 },
            b_min_guard: DEFAULT_B_MIN_GUARD,
        })
    }

    /// `dt²/F² + t² g_{S²}`; three-dimensional only.
    pub fn conformal_radial(lapse: RadialScalarField) -> Self {
        WarpedProductMetric {
            n: 3,
            ansatz: Ansatz::ConformalRadial { lapse },
            b_min_guard: DEFAULT_B_MIN_GUARD,
        }
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.b_min_guard = guard;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub fn kappa0(&self) -> f64 {
        match &self.ansatz {
            Ansatz::Warped { kappa0, .. } => *kappa0,
            Ansatz::ConformalRadial { .. } => 1.0,
        }
    }

    pub fn b_min_guard(&self) -> f64 {
        self.b_min_guard
    }

    pub fn domain(&self) -> (f64, f64) {
        match &self.ansatz {
            Ansatz::Warped { warp, .. } => warp.domain(),
            Ansatz::ConformalRadial { lapse } => lapse.domain(),
        }
    }

    pub fn is_conformal(&self) -> bool {
        matches!(self.ansatz, Ansatz::ConformalRadial { .. })
    }

    pub(crate) fn local(&self, t: f64) -> Result<LocalFrame> {
        let (b, speed) = match &self.ansatz {
            Ansatz::Warped { warp, .. } => (warp.eval(t)?, Jet::constant(1.0)),
            Ansatz::ConformalRadial { lapse } => {
                let f = lapse.eval(t)?;
                if f.value() <= 0.0 {
                    return Err(LabError::NonpositiveLapse { t, f: f.value() });
                }
                (Jet::variable(t), f)
            }
        };
        if b.value() <= self.b_min_guard {
            return Err(LabError::SingularWarp {
                t,
                b: b.value(),
                guard: self.b_min_guard,
            });
        }
        Ok(LocalFrame {
            n: self.n,
            kappa0: self.kappa0(),
            b,
            speed,
        })
    }
}

/// Jets in the native coordinate plus the unit radial derivative.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalFrame {
    pub n: usize,
    pub kappa0: f64,
    pub b: Jet,
    pub speed: Jet,
}

impl LocalFrame {
    /// Derivative along the unit radial vector e₁.
    pub fn d(&self, q: &Jet) -> Jet {
        self.speed * q.diff()
    }

    /// Mean-curvature factor b'/b of the radial slices.
    pub fn beta(&self) -> Jet {
        self.d(&self.b) / self.b
    }

    pub fn laplacian(&self, u: &Jet) -> Jet {
        let du = self.d(u);
        self.d(&du) + self.beta() * du * (self.n as f64 - 1.0)
    }
}
