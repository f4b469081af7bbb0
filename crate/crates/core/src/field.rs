//! Scalar functions of the radial coordinate.

use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::spline::QuinticSpline;

/// Local Taylor jets at a uniform-or-not set of nodes; evaluation re-expands
/// the jet of the nearest node.
#[derive(Debug, Clone)]
pub struct TaylorNodes {
    ts: Vec<f64>,
    jets: Vec<Jet>,
}

impl TaylorNodes {
    pub fn new(ts: Vec<f64>, jets: Vec<Jet>) -> Result<Self> {
        if ts.is_empty() || ts.len() != jets.len() {
            return Err(LabError::Config("node jets need one jet per node".into()));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::Config("node abscissae must increase".into()));
        }
        Ok(TaylorNodes { ts, jets })
    }

    fn jet(&self, t: f64) -> Jet {
        let k = self.ts.partition_point(|&x| x < t);
        let i = if k == 0 {
            0
        } else if k == self.ts.len() || t - self.ts[k - 1] <= self.ts[k] - t {
            k - 1
        } else {
            k
        };
        self.jets[i].shift(t - self.ts[i])
    }
}

#[derive(Clone)]
pub enum FieldKind {
    Closed(Expr),
    Sampled(Arc<QuinticSpline>),
    Nodes(Arc<TaylorNodes>),
}

/// A function of the radial coordinate on a closed interval.
#[derive(Clone)]
pub struct RadialScalarField {
    kind: FieldKind,
    lo: f64,
    hi: f64,
}

impl fmt::Debug for RadialScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FieldKind::Closed(e) => format!("closed {e}"),
            FieldKind::Sampled(_) => "spline".to_string(),
            FieldKind::Nodes(_) => "node jets".to_string(),
        };
        write!(f, "RadialScalarField({kind} on [{}, {}])", self.lo, self.hi)
    }
}

fn check_domain(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(LabError::Config(format!("invalid field domain [{lo}, {hi}]")))
    }
}

impl RadialScalarField {
    pub fn closed(expr: Expr, lo: f64, hi: f64) -> Result<Self> {
        check_domain(lo, hi)?;
        Ok(RadialScalarField {
            kind: FieldKind::Closed(expr),
            lo,
            hi,
        })
    }

    pub fn parse(src: &str, lo: f64, hi: f64) -> Result<Self> {
        RadialScalarField::closed(Expr::parse(src)?, lo, hi)
    }

    pub fn constant(v: f64, lo: f64, hi: f64) -> Result<Self> {
        RadialScalarField::closed(Expr::cst(v), lo, hi)
    }

    /// Quintic spline through samples; the domain is the sample range.
    pub fn sampled(ts: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let sp = QuinticSpline::new(ts, ys)?;
        let (lo, hi) = (sp.lo(), sp.hi());
        Ok(RadialScalarField {
            kind: FieldKind::Sampled(Arc::new(sp)),
            lo,
            hi,
        })
    }

    pub fn from_nodes(nodes: TaylorNodes) -> Result<Self> {
        let lo = nodes.ts[0];
        let hi = *nodes.ts.last().unwrap_or(&lo);
        if hi <= lo {
            return Err(LabError::Config("node jets need at least two nodes".into()));
        }
        Ok(RadialScalarField {
            kind: FieldKind::Nodes(Arc::new(nodes)),
            lo,
            hi,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.kind {
            FieldKind::Closed(e) => Some(e),
            _ => None,
        }
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// True for closed forms (exact derivatives); false for data-backed fields.
    pub fn is_closed(&self) -> bool {
        matches!(self.kind, FieldKind::Closed(_))
    }

    /// Taylor jet at `t`. Outside the domain this is an error, never an
    /// extrapolation.
    pub fn eval(&self, t: f64) -> Result<Jet> {
        if !self.contains(t) {
            return Err(LabError::DomainError {
                t,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let j = match &self.kind {
            FieldKind::Closed(e) => e.eval(Jet::variable(t)),
            FieldKind::Sampled(sp) => sp.jet(t),
            FieldKind::Nodes(n) => n.jet(t),
        };
        if j.taylor().iter().take(4.min(j.len())).any(|v| !v.is_finite()) {
            return Err(LabError::NonFinite { t });
        }
        Ok(j)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.value())
    }

    /// `(u, u', u'', u''')` at `t`.
    pub fn derivs(&self, t: f64) -> Result<[f64; 4]> {
        let j = self.eval(t)?;
        Ok([j.d(0), j.d(1), j.d(2), j.d(3)])
    }

    pub fn negated(&self) -> RadialScalarField {
        self.scaled(-1.0)
    }

    pub fn scaled(&self, c: f64) -> RadialScalarField {
        let kind = match &self.kind {
            FieldKind::Closed(e) => FieldKind::Closed(e.clone() * c),
            FieldKind::Sampled(sp) => FieldKind::Sampled(Arc::new(sp.scaled(c))),
            FieldKind::Nodes(n) => FieldKind::Nodes(Arc::new(TaylorNodes {
                ts: n.ts.clone(),
                jets: n.jets.iter().map(|j| *j * c).collect(),
            })),
        };
        RadialScalarField {
            kind,
            lo: self.lo,
            hi: self.hi,
        }
    }

    /// Uniform grid over the domain with a relative margin at each end.
    pub fn interior_grid(&self, count: usize, margin: f64) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, count, margin)
    }
}

/// `count` uniform points over `[lo + margin*L, hi - margin*L]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize, margin: f64) -> Vec<f64> {
    let len = hi - lo;
    let (a, b) = (lo + margin * len, hi - margin * len);
    if count == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}
