//! Quintic Hermite interpolation of sampled data.
//!
//! Nodal first and second derivatives are estimated with 7-point
//! finite-difference weights (one-sided near the ends), then each interval
//! carries the unique quintic matching value, slope and curvature at both
//! endpoints. The interpolant is C² and its derivatives up to fifth order are
//! exact derivatives of the piecewise polynomial.

use crate::error::{LabError, Result};
use crate::jet::Jet;

/// Fornberg's recursion: weights `w[m][j]` so that
/// `sum_j w[m][j] * u(x[j])` approximates `u^(m)(z)`, for `m <= order`.
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Debug, Clone)]
pub struct QuinticSpline {
    ts: Vec<f64>,
    ys: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

const STENCIL: usize = 7;

impl QuinticSpline {
    /// `ts` strictly increasing, at least 7 samples.
    pub fn new(ts: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if ts.len() != ys.len() {
            return Err(LabError::Config("spline abscissae and values differ in length".into()));
        }
        if ts.len() < STENCIL {
            return Err(LabError::Config(format!(
                "spline needs at least {STENCIL} samples, got {}",
                ts.len()
            )));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) || ts.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(LabError::Config(
                "spline samples must be finite with increasing t".into(),
            ));
        }
        let n = ts.len();
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for i in 0..n {
            let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
            let xs = &ts[start..start + STENCIL];
            let w = fd_weights(ts[i], xs, 2);
            let vals = &ys[start..start + STENCIL];
            d1[i] = w[1].iter().zip(vals).map(|(a, b)| a * b).sum();
            d2[i] = w[2].iter().zip(vals).map(|(a, b)| a * b).sum();
        }
        Ok(QuinticSpline { ts, ys, d1, d2 })
    }

    pub fn lo(&self) -> f64 {
        self.ts[0]
    }

    pub fn hi(&self) -> f64 {
        self.ts[self.ts.len() - 1]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mul = |v: &[f64]| v.iter().map(|x| x * c).collect();
        QuinticSpline {
            ts: self.ts.clone(),
            ys: mul(&self.ys),
            d1: mul(&self.d1),
            d2: mul(&self.d2),
        }
    }

    fn interval(&self, t: f64) -> usize {
        let k = self.ts.partition_point(|&x| x <= t);
        k.saturating_sub(1).min(self.ts.len() - 2)
    }

    /// Local Taylor expansion (six coefficients) at `t`; `t` must be in range.
    pub fn jet(&self, t: f64) -> Jet {
        let i = self.interval(t);
        let h = self.ts[i + 1] - self.ts[i];
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (p0, p1) = (self.d1[i], self.d1[i + 1]);
        let (s0, s1) = (self.d2[i], self.d2[i + 1]);
        let a = y1 - (y0 + p0 * h + 0.5 * s0 * h * h);
        let b = p1 - (p0 + s0 * h);
        let c = s1 - s0;
        let c3 = (10.0 * a - 4.0 * b * h + 0.5 * c * h * h) / h.powi(3);
        let c4 = (-15.0 * a + 7.0 * b * h - c * h * h) / h.powi(4);
        let c5 = (6.0 * a - 3.0 * b * h + 0.5 * c * h * h) / h.powi(5);
        Jet::from_taylor(&[y0, p0, 0.5 * s0, c3, c4, c5]).shift(t - self.ts[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_polynomials() {
        let xs = [0.0, 0.1, 0.25, 0.3, 0.5, 0.55, 0.7];
        let w = fd_weights(0.27, &xs, 2);
        // exact for degree <= 6
        let p = |x: f64| 1.0 - 2.0 * x + 3.0 * x.powi(4) - x.powi(6);
        let dp = |x: f64| -2.0 + 12.0 * x.powi(3) - 6.0 * x.powi(5);
        let ddp = |x: f64| 36.0 * x * x - 30.0 * x.powi(4);
        let ap = |m: usize| -> f64 { w[m].iter().zip(&xs).map(|(a, x)| a * p(*x)).sum() };
        assert!((ap(0) - p(0.27)).abs() < 1e-13);
        assert!((ap(1) - dp(0.27)).abs() < 1e-11);
        assert!((ap(2) - ddp(0.27)).abs() < 1e-9);
    }

    #[test]
    fn hermite_pieces_match_nodes_and_smooth_functions() {
        let ts: Vec<f64> = (0..200).map(|i| 0.5 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = ts.iter().map(|t| t.sin() * t).collect();
        let sp = QuinticSpline::new(ts.clone(), ys.clone()).unwrap();
        for &t in &[0.5, 0.777, 1.234, 2.49] {
            let j = sp.jet(t);
            let f = t.sin() * t;
            let df = t.cos() * t + t.sin();
            let ddf = -t.sin() * t + 2.0 * t.cos();
            assert!((j.d(0) - f).abs() < 1e-12);
            assert!((j.d(1) - df).abs() < 1e-10);
            assert!((j.d(2) - ddf).abs() < 1e-8);
        }
        // continuity of value and slopes across a knot
        let k = ts[57];
        let (a, b) = (sp.jet(k - 1e-12), sp.jet(k + 1e-12));
        assert!((a.d(1) - b.d(1)).abs() < 1e-9 && (a.d(2) - b.d(2)).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(QuinticSpline::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        let ts = vec![0.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0];
        assert!(QuinticSpline::new(ts, vec![0.0; 7]).is_err());
    }
}
