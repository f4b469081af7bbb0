//! Named example structures with their known curvature values.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::RadialScalarField;
use crate::frame::{frame_curvature, hessian_laplacian_radial};
use crate::metric::WarpedProductMetric;
use crate::structure::{EinsteinTypeStructure, HMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    SchwarzschildExterior,
    SchwarzschildInterior,
    SphereFamily,
    FlatFamily,
    HyperbolicFamily,
}

impl ExampleName {
    pub const ALL: [ExampleName; 5] = [
        ExampleName::SchwarzschildExterior,
        ExampleName::SchwarzschildInterior,
        ExampleName::SphereFamily,
        ExampleName::FlatFamily,
        ExampleName::HyperbolicFamily,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExampleName::SchwarzschildExterior => "schwarzschild_exterior",
            ExampleName::SchwarzschildInterior => "schwarzschild_interior",
            ExampleName::SphereFamily => "sphere_family",
            ExampleName::FlatFamily => "flat_family",
            ExampleName::HyperbolicFamily => "hyperbolic_family",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ExampleName::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown example '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridConfig {
    pub fn points(&self) -> Vec<f64> {
        crate::field::uniform_grid(self.lo, self.hi, self.count, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(LabError::Config(format!(
                "grid needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.count < 2 {
            return Err(LabError::Config(format!(
                "grid count must be at least 2, got {}",
                self.count
            )));
        }
        Ok(())
    }
}

/// Example parameters as they appear in a config block. Missing values take
/// the defaults `m = 1`, `R3 = 8`, `lambda = mu = h = 2`, `n = 3`, `f0 = 1`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleConfig {
    #[serde(default)]
    pub name: Option<ExampleName>,
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default, rename = "R3")]
    pub r3: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

/// Fully resolved example parameters.
#[derive(Debug, Clone, Serialize)]
pub struct Example {
    pub name: ExampleName,
    pub m: f64,
    #[serde(rename = "R3")]
    pub r3: f64,
    pub lambda: f64,
    pub mu: f64,
    pub h: f64,
    pub n: usize,
    pub f0: f64,
    pub grid: GridConfig,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl Example {
    pub fn resolve(name: ExampleName, c: &ExampleConfig) -> Result<Self> {
        let m = positive("m", c.m.unwrap_or(1.0))?;
        let r3 = positive("R3", c.r3.unwrap_or(8.0))?;
        let lambda = positive("lambda", c.lambda.unwrap_or(2.0))?;
        let mu = positive("mu", c.mu.unwrap_or(2.0))?;
        let h = c.h.unwrap_or(2.0);
        let n = c.n.unwrap_or(3);
        let f0 = c.f0.unwrap_or(1.0);
        if !h.is_finite() || !f0.is_finite() {
            return Err(LabError::Config("h and f0 must be finite".into()));
        }
        let conformal = matches!(
            name,
            ExampleName::SchwarzschildExterior | ExampleName::SchwarzschildInterior
        );
        if conformal && n != 3 {
            return Err(LabError::Config(
                "the Schwarzschild examples are three-dimensional".into(),
            ));
        }
        if n < 3 {
            return Err(LabError::Config(format!("n = {n} must be at least 3")));
        }
        let mut ex = Example {
            name,
            m,
            r3,
            lambda,
            mu,
            h,
            n,
            f0,
            grid: GridConfig {
                lo: 0.0,
                hi: 1.0,
                count: 64,
            },
        };
        ex.grid = match c.grid {
            Some(g) => g,
            None => ex.default_grid(),
        };
        ex.grid.validate()?;
        ex.check_domain()?;
        Ok(ex)
    }

    fn warp_scale(&self) -> f64 {
        let n1 = self.n as f64 - 1.0;
        match self.name {
            ExampleName::SphereFamily => (n1 / self.lambda).sqrt(),
            ExampleName::HyperbolicFamily => (n1 / self.mu).sqrt(),
            _ => 1.0,
        }
    }

    /// Open interval on which the example is defined.
    pub fn open_domain(&self) -> (f64, f64) {
        match self.name {
            ExampleName::SchwarzschildExterior => (2.0 * self.m, f64::INFINITY),
            ExampleName::SchwarzschildInterior => (0.0, (self.r3 / (2.0 * self.m)).sqrt()),
            ExampleName::SphereFamily => (0.0, std::f64::consts::PI * self.warp_scale()),
            ExampleName::FlatFamily | ExampleName::HyperbolicFamily => (0.0, f64::INFINITY),
        }
    }

    pub fn default_grid(&self) -> GridConfig {
        let count = 64;
        match self.name {
            ExampleName::SchwarzschildExterior => GridConfig {
                lo: 2.5 * self.m,
                hi: 10.0 * self.m,
                count,
            },
            ExampleName::SchwarzschildInterior => {
                let hi = 0.9 * self.open_domain().1;
                GridConfig {
                    lo: hi / 64.0,
                    hi,
                    count,
                }
            }
            ExampleName::SphereFamily => {
                let end = self.open_domain().1;
                GridConfig {
                    lo: 0.05 * end,
                    hi: 0.95 * end,
                    count,
                }
            }
            ExampleName::FlatFamily => GridConfig {
                lo: 0.5,
                hi: 3.0,
                count,
            },
            ExampleName::HyperbolicFamily => GridConfig {
                lo: 0.2,
                hi: 2.0,
                count,
            },
        }
    }

    fn check_domain(&self) -> Result<()> {
        let (a, b) = self.open_domain();
        for t in [self.grid.lo, self.grid.hi] {
            if !(t > a && t < b) {
                return Err(LabError::DomainError { t, lo: a, hi: b });
            }
        }
        Ok(())
    }

    fn field(&self, src: String) -> Result<RadialScalarField> {
        RadialScalarField::parse(&src, self.grid.lo, self.grid.hi)
    }

    /// Potential of the example as an expression in `t`.
    fn potential_src(&self) -> String {
        match self.name {
            ExampleName::SchwarzschildExterior => format!("sqrt(1 - 2*{}/t)", self.m),
            ExampleName::SchwarzschildInterior => format!("sqrt(1 - 2*{}*t^2/{})", self.m, self.r3),
            ExampleName::SphereFamily => format!("{}", self.h / self.lambda),
            ExampleName::FlatFamily => format!("{}", self.f0),
            ExampleName::HyperbolicFamily => format!("{}", -self.h / self.mu),
        }
    }

    pub fn metric(&self) -> Result<WarpedProductMetric> {
        let w = self.warp_scale();
        match self.name {
            ExampleName::SchwarzschildExterior | ExampleName::SchwarzschildInterior => {
                Ok(WarpedProductMetric::conformal_radial(self.field(self.potential_src())?))
            }
            ExampleName::SphereFamily => {
                WarpedProductMetric::warped(self.n, self.field(format!("{w}*sin(t/{w})"))?, 1.0)
            }
            ExampleName::FlatFamily => WarpedProductMetric::warped(self.n, self.field("t".into())?, 1.0),
            ExampleName::HyperbolicFamily => {
                WarpedProductMetric::warped(self.n, self.field(format!("{w}*sinh(t/{w})"))?, 1.0)
            }
        }
    }

    pub fn h_mode(&self) -> Result<HMode> {
        Ok(match self.name {
            ExampleName::SchwarzschildExterior | ExampleName::FlatFamily => HMode::Constant(0.0),
            ExampleName::SchwarzschildInterior => {
                let c = 6.0 * self.m / self.r3;
                HMode::Function(self.field(format!("{c}*{}", self.potential_src()))?)
            }
            ExampleName::SphereFamily | ExampleName::HyperbolicFamily => HMode::Constant(self.h),
        })
    }

    pub fn structure(&self) -> Result<EinsteinTypeStructure> {
        EinsteinTypeStructure::new(self.metric()?, self.field(self.potential_src())?, self.h_mode()?)
    }

    /// Computed and expected values at `t` as `(quantity, value, expected)`.
    pub fn golden(&self, t: f64) -> Result<Vec<(&'static str, f64, f64)>> {
        let metric = self.metric()?;
        let f = self.field(self.potential_src())?;
        let c = frame_curvature(&metric, t)?;
        let hs = hessian_laplacian_radial(&metric, &f, t)?;
        let fv = f.value(t)?;
        let n = self.n as f64;
        let (m, r3) = (self.m, self.r3);
        // expected (r_rad, r_tan, s, ddf_rad, ddf_tan, lap, h)
        let (er, et, es, edr, edt, el, h) = match self.name {
            ExampleName::SchwarzschildExterior => {
                let k = m / (t * t * t);
                (-2.0 * k, k, 0.0, -2.0 * k * fv, k * fv, 0.0, 0.0)
            }
            ExampleName::SchwarzschildInterior => {
                let k = m / r3;
                // h = (s f - Δf)/3 from the computed values
                let h = (c.s * fv - hs.lap) / 3.0;
                (
                    4.0 * k,
                    4.0 * k,
                    12.0 * k,
                    -2.0 * k * fv,
                    -2.0 * k * fv,
                    -6.0 * k * fv,
                    h,
                )
            }
            ExampleName::SphereFamily => (self.lambda, self.lambda, n * self.lambda, 0.0, 0.0, 0.0, self.h),
            ExampleName::FlatFamily => (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            ExampleName::HyperbolicFamily => (-self.mu, -self.mu, -n * self.mu, 0.0, 0.0, 0.0, self.h),
        };
        let res_rad = fv * c.r_rad - hs.ddf_rad - h;
        let res_tan = fv * c.r_tan - hs.ddf_tan - h;
        let mut out = vec![
            ("r_rad", c.r_rad, er),
            ("r_tan", c.r_tan, et),
            ("s", c.s, es),
            ("ddf_rad", hs.ddf_rad, edr),
            ("ddf_tan", hs.ddf_tan, edt),
            ("laplacian_f", hs.lap, el),
            ("eq1_rad", res_rad, 0.0),
            ("eq1_tan", res_tan, 0.0),
        ];
        if let Some(ef) = match self.name {
            ExampleName::SphereFamily => Some(self.h / self.lambda),
            ExampleName::HyperbolicFamily => Some(-self.h / self.mu),
            ExampleName::FlatFamily => Some(self.f0),
            _ => None,
        } {
            out.push(("f", fv, ef));
        }
        Ok(out)
    }
}
