//! Finite-difference curvature in coordinates, independent of the frame
//! formulas. Everything runs in double-double so that stencil round-off stays
//! far below the truncation error even at small steps.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dd::Dd;
use crate::error::{LabError, Result};
use crate::expr::Expr;
use crate::frame::{conformal_ricci, warped_sectional};
use crate::jet::Scalar;

pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Stencil half-width in nodes (5-point central differences).
pub const HALF_WIDTH: i32 = 2;

/// A metric given in coordinates.
pub trait CoordinateChart {
    fn dim(&self) -> usize;
    /// Row-major `dim x dim` components at `x`.
    fn metric(&self, x: &[Dd]) -> Vec<Dd>;
}

/// Cartesian flat space.
#[derive(Debug, Clone)]
pub struct EuclideanChart {
    pub dim: usize,
}

impl CoordinateChart for EuclideanChart {
    fn dim(&self) -> usize {
        self.dim
    }

    fn metric(&self, _x: &[Dd]) -> Vec<Dd> {
        let n = self.dim;
        (0..n * n)
            .map(|k| if k / n == k % n { Dd::ONE } else { Dd::ZERO })
            .collect()
    }
}

/// `dt² + b(t)² (dθ₁² + sn_κ(θ₁)² g_{S^{n-2}})` with the round sphere in
/// hyperspherical angles `θ₂, …`.
#[derive(Debug, Clone)]
pub struct WarpedChart {
    pub n: usize,
    pub b: Expr,
    pub kappa0: f64,
}

fn sn_kappa(kappa: f64, x: Dd) -> Dd {
    if kappa > 0.0 {
        let k = Dd::new(kappa).sqrt();
        (x * k).sin() / k
    } else if kappa < 0.0 {
        let k = Dd::new(-kappa).sqrt();
        (x * k).sinh() / k
    } else {
        x
    }
}

impl CoordinateChart for WarpedChart {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric(&self, x: &[Dd]) -> Vec<Dd> {
        let n = self.n;
        let b = self.b.eval(x[0]);
        let mut diag = vec![Dd::ONE; n];
        let mut w = b * b;
        diag[1] = w;
        if n > 2 {
            let s = sn_kappa(self.kappa0, x[1]);
            w = w * s * s;
            diag[2] = w;
            for k in 3..n {
                let s = x[k - 1].sin();
                w = w * s * s;
                diag[k] = w;
            }
        }
        let mut g = vec![Dd::ZERO; n * n];
        for (k, v) in diag.into_iter().enumerate() {
            g[k * n + k] = v;
        }
        g
    }
}

/// `dt²/F(t)² + t² (dθ² + sin²θ dφ²)`.
#[derive(Debug, Clone)]
pub struct ConformalChart {
    pub lapse: Expr,
}

impl CoordinateChart for ConformalChart {
    fn dim(&self) -> usize {
        3
    }

    fn metric(&self, x: &[Dd]) -> Vec<Dd> {
        let f = self.lapse.eval(x[0]);
        let t2 = x[0] * x[0];
        let s = x[1].sin();
        let mut g = vec![Dd::ZERO; 9];
        g[0] = Dd::ONE / (f * f);
        g[4] = t2;
        g[8] = t2 * s * s;
        g
    }
}

/// Metric components sampled on lattice nodes `center + h·offset`.
#[derive(Debug, Clone)]
pub struct MetricGrid {
    pub dim: usize,
    pub step: f64,
    pub center: Vec<Dd>,
    nodes: HashMap<Vec<i32>, Vec<Dd>>,
}

impl MetricGrid {
    pub fn new(dim: usize, step: f64, center: Vec<Dd>) -> Result<Self> {
        if center.len() != dim || dim == 0 {
            return Err(LabError::Config("grid center has the wrong dimension".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(LabError::Config(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        Ok(MetricGrid {
            dim,
            step,
            center,
            nodes: HashMap::new(),
        })
    }

    pub fn insert(&mut self, offset: Vec<i32>, g: Vec<Dd>) -> Result<()> {
        if offset.len() != self.dim || g.len() != self.dim * self.dim {
            return Err(LabError::Config(
                "node offset or metric block has the wrong size".into(),
            ));
        }
        self.nodes.insert(offset, g);
        Ok(())
    }

    pub fn coordinates(&self, offset: &[i32]) -> Vec<Dd> {
        self.center
            .iter()
            .zip(offset)
            .map(|(c, &o)| *c + Dd::new(self.step) * o as f64)
            .collect()
    }

    /// Samples every node the oracle can touch: offsets in `[-2, 2]` on two
    /// distinct axes, or in `[-4, 4]` along a single axis.
    pub fn sample(chart: &dyn CoordinateChart, center: &[f64], step: f64) -> Result<Self> {
        let dim = chart.dim();
        let mut grid = MetricGrid::new(dim, step, center.iter().map(|&c| Dd::new(c)).collect())?;
        let range: Vec<i32> = (-HALF_WIDTH..=HALF_WIDTH).collect();
        let add = |off: Vec<i32>, grid: &mut MetricGrid| -> Result<()> {
            if !grid.nodes.contains_key(&off) {
                let x = grid.coordinates(&off);
                let g = chart.metric(&x);
                grid.insert(off, g)?;
            }
            Ok(())
        };
        add(vec![0; dim], &mut grid)?;
        for a in 0..dim {
            for k in -2 * HALF_WIDTH..=2 * HALF_WIDTH {
                add(shifted(&vec![0; dim], a, k), &mut grid)?;
            }
        }
        for a in 0..dim {
            for b in a + 1..dim {
                for &i in &range {
                    for &j in &range {
                        let mut off = vec![0; dim];
                        off[a] += i;
                        off[b] += j;
                        add(off, &mut grid)?;
                    }
                }
            }
        }
        Ok(grid)
    }

    fn get(&self, offset: &[i32]) -> Result<&Vec<Dd>> {
        self.nodes
            .get(offset)
            .ok_or_else(|| LabError::StencilOutOfRange(format!("no metric sample at offset {offset:?}")))
    }
}

/// Coordinate Ricci tensor and scalar curvature at the grid center.
#[derive(Debug, Clone)]
pub struct OracleCurvature {
    pub dim: usize,
    pub metric: Vec<Dd>,
    pub inverse: Vec<Dd>,
    pub ricci: Vec<Dd>,
    pub s: Dd,
}

impl OracleCurvature {
    /// `Ric_aa / g_aa` for each axis; exact frame components when the metric
    /// is diagonal in the chart.
    pub fn frame_diagonal(&self) -> Vec<Dd> {
        let n = self.dim;
        (0..n).map(|a| self.ricci[a * n + a] / self.metric[a * n + a]).collect()
    }

    /// Eigenvalues of `g⁻¹ Ric`, ascending, via a Cholesky frame.
    pub fn frame_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        let g = DMatrix::from_fn(n, n, |i, j| self.metric[i * n + j].to_f64());
        let r = DMatrix::from_fn(n, n, |i, j| self.ricci[i * n + j].to_f64());
        let chol = g.cholesky().ok_or(LabError::SingularMetric { node: vec![0; n] })?;
        let l_inv = chol
            .l()
            .try_inverse()
            .ok_or(LabError::SingularMetric { node: vec![0; n] })?;
        let frame = &l_inv * r * l_inv.transpose();
        let sym = (&frame + frame.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

fn invert(g: &[Dd], n: usize, node: &[i32]) -> Result<Vec<Dd>> {
    let singular = || LabError::SingularMetric { node: node.to_vec() };
    if g.iter().any(|v| !v.to_f64().is_finite()) {
        return Err(singular());
    }
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.to_f64().abs()));
    let mut a = g.to_vec();
    let mut inv: Vec<Dd> = (0..n * n)
        .map(|k| if k / n == k % n { Dd::ONE } else { Dd::ZERO })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().to_f64().total_cmp(&a[j * n + col].abs().to_f64()))
            .unwrap_or(col);
        if a[piv * n + col].abs().to_f64() <= 1e-14 * scale {
            return Err(singular());
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] = a[col * n + k] / p;
            inv[col * n + k] = inv[col * n + k] / p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let m = a[row * n + col];
            if m.to_f64() == 0.0 && m.lo == 0.0 {
                continue;
            }
            for k in 0..n {
                a[row * n + k] = a[row * n + k] - m * a[col * n + k];
                inv[row * n + k] = inv[row * n + k] - m * inv[col * n + k];
            }
        }
    }
    Ok(inv)
}

const W5: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];

fn shifted(base: &[i32], axis: usize, by: i32) -> Vec<i32> {
    let mut o = base.to_vec();
    o[axis] += by;
    o
}

/// `∂_a g_{bc}` at a node, indexed `[a][b*n+c]`.
fn metric_derivatives(grid: &MetricGrid, node: &[i32]) -> Result<Vec<Vec<Dd>>> {
    let n = grid.dim;
    let denom = Dd::new(12.0) * grid.step;
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut d = vec![Dd::ZERO; n * n];
        for &(k, w) in &W5 {
            let g = grid.get(&shifted(node, a, k))?;
            for (dst, v) in d.iter_mut().zip(g) {
                *dst = *dst + *v * w;
            }
        }
        for v in d.iter_mut() {
            *v = *v / denom;
        }
        out.push(d);
    }
    Ok(out)
}

/// `Γ^r_{ab}` at a node, indexed `[r*n*n + a*n + b]`.
fn christoffel(grid: &MetricGrid, node: &[i32]) -> Result<Vec<Dd>> {
    let n = grid.dim;
    let ginv = invert(grid.get(node)?, n, node)?;
    let dg = metric_derivatives(grid, node)?;
    let mut gam = vec![Dd::ZERO; n * n * n];
    for r in 0..n {
        for a in 0..n {
            for b in a..n {
                let mut v = Dd::ZERO;
                for s in 0..n {
                    let gi = ginv[r * n + s];
                    if gi.to_f64() == 0.0 && gi.lo == 0.0 {
                        continue;
                    }
                    v = v + gi * (dg[a][s * n + b] + dg[b][s * n + a] - dg[s][a * n + b]);
                }
                v = v * 0.5;
                gam[r * n * n + a * n + b] = v;
                gam[r * n * n + b * n + a] = v;
            }
        }
    }
    Ok(gam)
}

/// Christoffel symbols by central differences of `g`, Riemann by central
/// differences of the Christoffels, Ricci by contraction.
pub fn fd_curvature_oracle(grid: &MetricGrid) -> Result<OracleCurvature> {
    let n = grid.dim;
    let origin = vec![0i32; n];
    let metric = grid.get(&origin)?.clone();
    let inverse = invert(&metric, n, &origin)?;
    let gam0 = christoffel(grid, &origin)?;
    // ∂_m Γ^r_{ab}, indexed [m][r*n*n + a*n + b]
    let denom = Dd::new(12.0) * grid.step;
    let mut dgam = Vec::with_capacity(n);
    for m in 0..n {
        let mut d = vec![Dd::ZERO; n * n * n];
        for &(k, w) in &W5 {
            let g = christoffel(grid, &shifted(&origin, m, k))?;
            for (dst, v) in d.iter_mut().zip(&g) {
                *dst = *dst + *v * w;
            }
        }
        for v in d.iter_mut() {
            *v = *v / denom;
        }
        dgam.push(d);
    }
    let gm = |r: usize, a: usize, b: usize| gam0[r * n * n + a * n + b];
    // R^r_{s m v} = ∂_m Γ^r_{vs} - ∂_v Γ^r_{ms} + Γ^r_{ml} Γ^l_{vs} - Γ^r_{vl} Γ^l_{ms}
    // Ric_{sv} = R^r_{s r v}
    let mut ricci = vec![Dd::ZERO; n * n];
    for s in 0..n {
        for v in s..n {
            let mut acc = Dd::ZERO;
            for r in 0..n {
                acc = acc + dgam[r][r * n * n + v * n + s] - dgam[v][r * n * n + r * n + s];
                for l in 0..n {
                    acc = acc + gm(r, r, l) * gm(l, v, s) - gm(r, v, l) * gm(l, r, s);
                }
            }
            ricci[s * n + v] = acc;
            ricci[v * n + s] = acc;
        }
    }
    let mut s = Dd::ZERO;
    for a in 0..n {
        for b in 0..n {
            s = s + inverse[a * n + b] * ricci[a * n + b];
        }
    }
    Ok(OracleCurvature {
        dim: n,
        metric,
        inverse,
        ricci,
        s,
    })
}

/// Samples `chart` around `point` and runs the oracle.
pub fn oracle_at(chart: &dyn CoordinateChart, point: &[f64], step: f64) -> Result<OracleCurvature> {
    if point.len() != chart.dim() {
        return Err(LabError::Config("point has the wrong dimension".into()));
    }
    fd_curvature_oracle(&MetricGrid::sample(chart, point, step)?)
}

/// `(R_rad, R_tan, s)` of a warped metric in double-double from symbolic
/// derivatives of `b`.
pub fn warped_reference(n: usize, b: &Expr, kappa0: f64, t: f64) -> (Dd, Dd, Dd) {
    let db = b.derivative();
    let ddb = db.derivative();
    let x = Dd::new(t);
    let (sr, st) = warped_sectional(kappa0, b.eval(x), db.eval(x), ddb.eval(x));
    let nf = n as f64;
    let r_rad = sr * (nf - 1.0);
    let r_tan = sr + st * (nf - 2.0);
    (r_rad, r_tan, r_rad + r_tan * (nf - 1.0))
}

/// `(R_rad, R_tan, s)` of `dt²/F² + t² g_{S²}` in double-double.
pub fn conformal_reference(lapse: &Expr, t: f64) -> (Dd, Dd, Dd) {
    let x = Dd::new(t);
    let (r11, r22) = conformal_ricci(x, lapse.eval(x), lapse.derivative().eval(x));
    (r11, r22, r11 + r22 * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_flat() {
        let o = oracle_at(&EuclideanChart { dim: 4 }, &[0.3, -1.0, 2.0, 0.1], 1e-3).unwrap();
        assert!(o.ricci.iter().all(|v| v.to_f64() == 0.0));
        assert_eq!(o.s.to_f64(), 0.0);
    }

    #[test]
    fn round_three_sphere() {
        let chart = WarpedChart {
            n: 3,
            b: Expr::parse("sin(t)").unwrap(),
            kappa0: 1.0,
        };
        let o = oracle_at(&chart, &[1.0, 0.9, 0.4], 1e-4).unwrap();
        for ev in o.frame_eigenvalues().unwrap() {
            assert!((ev - 2.0).abs() < 1e-6, "{ev}");
        }
        assert!((o.s.to_f64() - 6.0).abs() < 1e-6);
    }

    #[test]
    fn exterior_chart_matches_closed_form() {
        let chart = ConformalChart {
            lapse: Expr::parse("sqrt(1 - 2/t)").unwrap(),
        };
        let o = oracle_at(&chart, &[4.0, 1.1, 0.3], 1e-4).unwrap();
        let d = o.frame_diagonal();
        assert!((d[0].to_f64() + 0.03125).abs() < 1e-12);
        assert!((d[1].to_f64() - 0.015625).abs() < 1e-12);
        assert!(o.s.to_f64().abs() < 1e-12);
    }

    #[test]
    fn fifth_order_node_is_out_of_range() {
        let chart = EuclideanChart { dim: 2 };
        let mut grid = MetricGrid::new(2, 1e-3, vec![Dd::ZERO; 2]).unwrap();
        grid.insert(vec![0, 0], chart.metric(&[Dd::ZERO; 2])).unwrap();
        assert!(matches!(
            fd_curvature_oracle(&grid),
            Err(LabError::StencilOutOfRange(_))
        ));
    }

    #[test]
    fn degenerate_metric_is_singular() {
        struct Flat0;
        impl CoordinateChart for Flat0 {
            fn dim(&self) -> usize {
                2
            }
            fn metric(&self, _x: &[Dd]) -> Vec<Dd> {
                vec![Dd::ONE, Dd::ZERO, Dd::ZERO, Dd::ZERO]
            }
        }
        assert!(matches!(
            oracle_at(&Flat0, &[0.0, 0.0], 1e-3),
            Err(LabError::SingularMetric { .. })
        ));
    }

    #[test]
    fn cosh_warp_converges_at_high_order() {
        let b = Expr::parse("cosh(t)").unwrap();
        let chart = WarpedChart {
            n: 4,
            b: b.clone(),
            kappa0: 1.0,
        };
        let (rr, rt, _) = warped_reference(4, &b, 1.0, 0.8);
        let err = |h: f64| {
            let d = oracle_at(&chart, &[0.8, 1.0, 1.2, 0.0], h).unwrap().frame_diagonal();
            (d[0] - rr).abs().to_f64().max((d[1] - rt).abs().to_f64())
        };
        let (e3, e4) = (err(1e-3), err(1e-4));
        assert!(e4 < 1e-10, "{e4}");
        assert!((e3 / e4).log10() >= 1.8, "{e3} {e4}");
    }
}
