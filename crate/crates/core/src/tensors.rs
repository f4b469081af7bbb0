//! Dense frame tensors for the radial ansatz: Riemann, Weyl, Cotton, the
//! wedge algebra and the T-tensor.
//!
//! Indices are 0-based here (index 0 is the radial direction e₁); JSON dumps
//! use 1-based tuples.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::structure::{EinsteinTypeStructure, HMode, RadialPoint};

pub const DEFAULT_MAX_DIM: usize = 6;

fn check_dim(n: usize, max_dim: usize) -> Result<()> {
    if n < 3 {
        return Err(LabError::DimensionError {
            n,
            reason: "need n >= 3".into(),
        });
    }
    if n > max_dim {
        return Err(LabError::DimensionError {
            n,
            reason: format!("dense storage capped at {max_dim}"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    pub n: usize,
    data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(n: usize) -> Self {
        Tensor2 {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Tensor2::zeros(n);
        for i in 0..n {
            t.set(i, i, 1.0);
        }
        t
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut t = Tensor2::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            t.set(i, i, *v);
        }
        t
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut t = Tensor2::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.set(i, j, f(i, j));
            }
        }
        t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// A 3-tensor in the orthonormal radial frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeTensorFrame {
    pub n: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexedValue {
    pub index: Vec<usize>,
    pub value: f64,
}

impl ThreeTensorFrame {
    pub fn zeros(n: usize) -> Self {
        ThreeTensorFrame {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    fn at(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.at(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let a = self.at(i, j, k);
        self.data[a] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// max |T(i,j,k) + T(j,i,k)|
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m = m.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        m
    }

    pub fn combine(&self, a: f64, other: &ThreeTensorFrame, b: f64) -> ThreeTensorFrame {
        ThreeTensorFrame {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    /// Nonzero components with 1-based index tuples.
    pub fn entries(&self) -> Vec<IndexedValue> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push(IndexedValue {
                            index: vec![i + 1, j + 1, k + 1],
                            value: v,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    pub n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    fn at(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.at(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let a = self.at(i, j, k, l);
        self.data[a] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the algebraic Riemann symmetries and first Bianchi.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        m = m.max((v + self.get(j, i, k, l)).abs());
                        m = m.max((v + self.get(i, j, l, k)).abs());
                        m = m.max((v - self.get(k, l, i, j)).abs());
                        m = m.max((v + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        m
    }

    /// Largest single contraction over any index pair.
    pub fn trace_defect(&self) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut idx = [0usize; 4];
        for &(p, q) in &pairs {
            let free: Vec<usize> = (0..4).filter(|x| *x != p && *x != q).collect();
            for a in 0..n {
                for b in 0..n {
                    let mut sum = 0.0;
                    for c in 0..n {
                        idx[p] = c;
                        idx[q] = c;
                        idx[free[0]] = a;
                        idx[free[1]] = b;
                        sum += self.get(idx[0], idx[1], idx[2], idx[3]);
                    }
                    m = m.max(sum.abs());
                }
            }
        }
        m
    }
}

/// Kulkarni–Nomizu product `(a ⊙ b)_{ijkl} = a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il`.
pub fn kulkarni_nomizu(a: &Tensor2, b: &Tensor2) -> Tensor4 {
    let n = a.n;
    let mut out = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = a.get(i, k) * b.get(j, l) + a.get(j, l) * b.get(i, k)
                        - a.get(i, l) * b.get(j, k)
                        - a.get(j, k) * b.get(i, l);
                    out.set(i, j, k, l, v);
                }
            }
        }
    }
    out
}

/// `Ric(j,l) = Σᵢ R(i,j,i,l)`.
pub fn ricci_contract(rm: &Tensor4) -> Tensor2 {
    let n = rm.n;
    Tensor2::from_fn(n, |j, l| (0..n).map(|i| rm.get(i, j, i, l)).sum())
}

/// Riemann tensor with radial planes of curvature `sec_rad` and tangential
/// planes of curvature `sec_tan`.
pub fn riemann_from_sectional(n: usize, sec_rad: f64, sec_tan: f64) -> Tensor4 {
    let mut rm = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = if i == 0 || j == 0 { sec_rad } else { sec_tan };
            rm.set(i, j, i, j, k);
            rm.set(i, j, j, i, -k);
        }
    }
    rm
}

#[derive(Debug, Clone)]
pub struct CurvatureOperatorFrame {
    pub n: usize,
    pub riemann: Tensor4,
    pub ricci: Tensor2,
    pub s: f64,
    pub sec_rad: f64,
    pub sec_tan: f64,
}

impl CurvatureOperatorFrame {
    pub fn from_sectional(n: usize, sec_rad: f64, sec_tan: f64, max_dim: usize) -> Result<Self> {
        check_dim(n, max_dim)?;
        let riemann = riemann_from_sectional(n, sec_rad, sec_tan);
        let ricci = ricci_contract(&riemann);
        let s = ricci.trace();
        Ok(CurvatureOperatorFrame {
            n,
            riemann,
            ricci,
            s,
            sec_rad,
            sec_tan,
        })
    }

    /// Accepts only tensors of the radial-ansatz form: every plane spanned by
    /// frame vectors is a curvature eigenplane, with one value for radial
    /// planes and one for tangential planes.
    pub fn from_riemann(riemann: Tensor4, max_dim: usize) -> Result<Self> {
        let n = riemann.n;
        check_dim(n, max_dim)?;
        let scale = 1.0 + riemann.max_abs();
        let tol = 1e-12 * scale;
        if riemann.symmetry_defect() > tol {
            return Err(LabError::UnsupportedCurvature("Riemann symmetries violated".into()));
        }
        let sec_rad = riemann.get(0, 1, 0, 1);
        let sec_tan = riemann.get(1, 2, 1, 2);
        let model = riemann_from_sectional(n, sec_rad, sec_tan);
        let dev = riemann
            .data
            .iter()
            .zip(&model.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if dev > tol {
            return Err(LabError::UnsupportedCurvature(format!(
                "not of the two-sectional radial form (deviation {dev:e})"
            )));
        }
        CurvatureOperatorFrame::from_sectional(n, sec_rad, sec_tan, max_dim)
    }

    pub fn at_point(p: &RadialPoint, max_dim: usize) -> Result<Self> {
        let fr = p.frame();
        CurvatureOperatorFrame::from_sectional(p.n, fr.sec_rad, fr.sec_tan, max_dim)
    }
}

/// Totally trace-free part of the Riemann tensor.
pub fn weyl_tensor(curv: &CurvatureOperatorFrame) -> Result<Tensor4> {
    let n = curv.n;
    if n < 3 {
        return Err(LabError::DimensionError {
            n,
            reason: "Weyl needs n >= 3".into(),
        });
    }
    let nf = n as f64;
    let g = Tensor2::identity(n);
    let rg = kulkarni_nomizu(&curv.ricci, &g);
    let gg = kulkarni_nomizu(&g, &g);
    let c1 = 1.0 / (nf - 2.0);
    let c2 = curv.s / (2.0 * (nf - 1.0) * (nf - 2.0));
    let mut w = Tensor4::zeros(n);
    for (k, v) in w.data.iter_mut().enumerate() {
        *v = curv.riemann.data[k] - c1 * rg.data[k] + c2 * gg.data[k];
    }
    Ok(w)
}

/// `(ω ∧ ξ)(i,j,k) = ωᵢ ξⱼₖ - ωⱼ ξᵢₖ`.
pub fn wedge(omega: &[f64], xi: &Tensor2) -> ThreeTensorFrame {
    let n = xi.n;
    let mut out = ThreeTensorFrame::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.set(i, j, k, omega[i] * xi.get(j, k) - omega[j] * xi.get(i, k));
            }
        }
    }
    out
}

/// `df ∧ ξ` with `∇f = f' e₁`.
pub fn wedge_df(xi: &Tensor2, f_prime: f64) -> ThreeTensorFrame {
    let mut omega = vec![0.0; xi.n];
    omega[0] = f_prime;
    wedge(&omega, xi)
}

/// `T = i_∇f r ∧ g/((n-1)(n-2)) - s df ∧ g/((n-1)(n-2)) + df ∧ r/(n-2)`.
pub fn t_tensor_from(ricci: &Tensor2, s: f64, f_prime: f64) -> ThreeTensorFrame {
    let n = ricci.n;
    let nf = n as f64;
    let g = Tensor2::identity(n);
    // i_∇f r (X) = r(∇f, X)
    let omega: Vec<f64> = (0..n).map(|x| f_prime * ricci.get(0, x)).collect();
    let a = 1.0 / ((nf - 1.0) * (nf - 2.0));
    let t1 = wedge(&omega, &g);
    let t2 = wedge_df(&g, f_prime);
    let t3 = wedge_df(ricci, f_prime);
    let mut out = t1.combine(a, &t2, -s * a);
    out = out.combine(1.0, &t3, 1.0 / (nf - 2.0));
    out
}

pub fn t_tensor(ets: &EinsteinTypeStructure, t: f64) -> Result<ThreeTensorFrame> {
    let p = ets.point(t)?;
    let curv = CurvatureOperatorFrame::at_point(&p, DEFAULT_MAX_DIM)?;
    Ok(t_tensor_from(&curv.ricci, curv.s, p.df().value()))
}

/// Connection coefficients `Γ(k,i,m) = ⟨D_{e_k} eᵢ, e_m⟩`.
#[derive(Debug, Clone)]
pub struct FrameConnection {
    pub n: usize,
    data: Vec<f64>,
}

impl FrameConnection {
    pub fn get(&self, k: usize, i: usize, m: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + m]
    }

    pub fn set(&mut self, k: usize, i: usize, m: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + m] = v;
    }

    /// `D_{e_k} e₁ = β e_k`, `D_{e_k} e_k ∋ -β e₁` for tangential k, `D_{e₁} = 0`
    /// on the frame. The fiber's own connection drops out of every tensor
    /// used here because their tangential blocks are multiples of the identity.
    pub fn warped(n: usize, beta: f64) -> Self {
        let mut c = FrameConnection {
            n,
            data: vec![0.0; n * n * n],
        };
        for k in 1..n {
            c.set(k, 0, k, beta);
            c.set(k, k, 0, -beta);
        }
        c
    }
}

/// `C(X,Y,Z) = (D_X A)(Y,Z) - (D_Y A)(X,Z)` from `A`, its radial derivative
/// `e₁(A)` and the frame connection.
pub fn cotton_from_schouten(a: &Tensor2, a_rad: &Tensor2, gamma: &FrameConnection) -> ThreeTensorFrame {
    let n = a.n;
    let da = |k: usize, i: usize, j: usize| -> f64 {
        let mut v = if k == 0 { a_rad.get(i, j) } else { 0.0 };
        for m in 0..n {
            v -= gamma.get(k, i, m) * a.get(m, j) + gamma.get(k, j, m) * a.get(i, m);
        }
        v
    };
    let mut c = ThreeTensorFrame::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c.set(i, j, k, da(i, j, k) - da(j, i, k));
            }
        }
    }
    c
}

/// Diagonal Schouten-type tensor `A = r - s/(2(n-1)) g` and its radial
/// derivative at a point.
fn schouten_with_derivative(p: &RadialPoint) -> (Tensor2, Tensor2) {
    let nf = p.nf();
    let c = 1.0 / (2.0 * (nf - 1.0));
    let a_rad = p.alpha() - p.s() * c;
    let a_tan = p.r_tan() - p.s() * c;
    let (da_rad, da_tan) = (p.d(&a_rad), p.d(&a_tan));
    let mut a = vec![a_tan.value(); p.n];
    let mut da = vec![da_tan.value(); p.n];
    a[0] = a_rad.value();
    da[0] = da_rad.value();
    (Tensor2::diag(&a), Tensor2::diag(&da))
}

pub fn cotton_tensor(ets: &EinsteinTypeStructure, t: f64) -> Result<ThreeTensorFrame> {
    let p = ets.point(t)?;
    check_dim(p.n, DEFAULT_MAX_DIM)?;
    let (a, da) = schouten_with_derivative(&p);
    Ok(cotton_from_schouten(
        &a,
        &da,
        &FrameConnection::warped(p.n, p.beta().value()),
    ))
}

/// `ĩ_∇f W(i,j,k) = W(i,j,k,∇f)`.
pub fn interior_last(w: &Tensor4, f_prime: f64) -> ThreeTensorFrame {
    let n = w.n;
    let mut out = ThreeTensorFrame::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.set(i, j, k, w.get(i, j, k, 0) * f_prime);
            }
        }
    }
    out
}

/// max over index triples of `|f C - ĩ_∇f W + (n-1) T|`.
pub fn lemma51_residual(ets: &EinsteinTypeStructure, t: f64) -> Result<f64> {
    let p = ets.point(t)?;
    let curv = CurvatureOperatorFrame::at_point(&p, DEFAULT_MAX_DIM)?;
    let fp = p.df().value();
    let (a, da) = schouten_with_derivative(&p);
    let c = cotton_from_schouten(&a, &da, &FrameConnection::warped(p.n, p.beta().value()));
    let w = weyl_tensor(&curv)?;
    let iw = interior_last(&w, fp);
    let tt = t_tensor_from(&curv.ricci, curv.s, fp);
    let res = c.combine(p.f.value(), &iw, -1.0).combine(1.0, &tt, p.nf() - 1.0);
    Ok(res.max_abs())
}

/// Radial divergence of Weyl by central differences along t, minus
/// `(n-3)/(n-2) C`. Returns the max componentwise residual.
pub fn div_weyl_residual(ets: &EinsteinTypeStructure, t: f64, step: f64) -> Result<f64> {
    let p = ets.point(t)?;
    let n = p.n;
    let w_at = |tt: f64| -> Result<Tensor4> {
        let q = ets.point(tt)?;
        weyl_tensor(&CurvatureOperatorFrame::at_point(&q, DEFAULT_MAX_DIM)?)
    };
    let (wp, wm, w0) = (w_at(t + step)?, w_at(t - step)?, w_at(t)?);
    // unit radial derivative = speed * d/dt; recover the speed from D(t)
    let speed = p.d(&crate::jet::Jet::variable(t)).value();
    let gamma = FrameConnection::warped(n, p.beta().value());
    let mut div = ThreeTensorFrame::zeros(n);
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut v = 0.0;
                for i in 0..n {
                    let mut dw = if i == 0 {
                        speed * (wp.get(i, j, k, l) - wm.get(i, j, k, l)) / (2.0 * step)
                    } else {
                        0.0
                    };
                    for m in 0..n {
                        dw -= gamma.get(i, i, m) * w0.get(m, j, k, l)
                            + gamma.get(i, j, m) * w0.get(i, m, k, l)
                            + gamma.get(i, k, m) * w0.get(i, j, m, l)
                            + gamma.get(i, l, m) * w0.get(i, j, k, m);
                    }
                    v += dw;
                }
                div.set(j, k, l, v);
            }
        }
    }
    let c = cotton_tensor(ets, t)?;
    let nf = n as f64;
    Ok(div.combine(1.0, &c, -(nf - 3.0) / (nf - 2.0)).max_abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenstructureReport {
    pub t: f64,
    pub alpha: f64,
    pub r_tan: f64,
    pub ricci_norm_sq: f64,
    /// Second fundamental form of the level set from the Hessian, from the
    /// equation, and from the warp.
    pub ii_hessian: f64,
    pub ii_equation: f64,
    pub ii_warp: f64,
    pub max_deviation: f64,
}

/// Ricci eigenstructure forced by a conformally flat solution with constant
/// `h` and zero scalar curvature.
pub fn eigenstructure_check(ets: &EinsteinTypeStructure, t: f64, s_tol: f64) -> Result<EigenstructureReport> {
    let h = match ets.h_mode() {
        HMode::Constant(h) => *h,
        other => {
            return Err(LabError::WrongHMode {
                expected: "constant",
                found: other.name(),
            })
        }
    };
    let p = ets.point(t)?;
    let fr = p.frame();
    if fr.s.abs() > s_tol {
        return Err(LabError::NonzeroScalar { t, s: fr.s });
    }
    let fp = p.df().value();
    if fp.abs() <= 1e-12 {
        return Err(LabError::CriticalPoint { t, fp });
    }
    let n = p.nf();
    let alpha = fr.r_rad;
    let curv = CurvatureOperatorFrame::at_point(&p, DEFAULT_MAX_DIM)?;
    let norm_sq = curv.ricci.norm_sq();
    let ii_hessian = p.ddf_tan().value() / fp.abs();
    let ii_equation = -(p.f.value() * alpha / (n - 1.0) + h) / fp.abs();
    let ii_warp = fp.signum() * p.beta().value();
    let devs = [
        fr.r_tan + alpha / (n - 1.0),
        norm_sq - n / (n - 1.0) * alpha * alpha,
        fr.sec_rad - alpha / (n - 1.0),
        fr.sec_tan + 2.0 * alpha / ((n - 1.0) * (n - 2.0)),
        ii_hessian - ii_equation,
        ii_hessian - ii_warp,
    ];
    let max_deviation = devs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(EigenstructureReport {
        t,
        alpha,
        r_tan: fr.r_tan,
        ricci_norm_sq: norm_sq,
        ii_hessian,
        ii_equation,
        ii_warp,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_with_metric_matches_definition() {
        let g = Tensor2::identity(3);
        let w = wedge_df(&g, 1.0);
        assert_eq!(w.get(0, 1, 1), 1.0);
        assert_eq!(w.get(1, 0, 1), -1.0);
        assert_eq!(w.get(1, 2, 0), 0.0);
        assert_eq!(wedge_df(&g, 0.0).max_abs(), 0.0);
    }

    #[test]
    fn constant_curvature_is_weyl_flat_and_einstein_t_vanishes() {
        let c = CurvatureOperatorFrame::from_sectional(4, 1.0, 1.0, 6).unwrap();
        assert!(c.riemann.symmetry_defect() == 0.0);
        assert!(weyl_tensor(&c).unwrap().max_abs() < 1e-15);
        let t = t_tensor_from(&c.ricci, c.s, 0.7);
        assert!(t.max_abs() < 1e-12);
    }

    #[test]
    fn weyl_is_trace_free_for_generic_two_sectional_input() {
        for n in 3..=6 {
            let c = CurvatureOperatorFrame::from_sectional(n, 0.37, -1.3, 6).unwrap();
            let w = weyl_tensor(&c).unwrap();
            assert!(w.trace_defect() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn non_radial_curvature_is_rejected() {
        // product line x Berger-like fiber: unequal tangential sectional curvatures
        let n = 4;
        let mut rm = Tensor4::zeros(n);
        let secs = [(1, 2, 1.0), (1, 3, 1.0), (2, 3, 0.4)];
        for &(i, j, k) in &secs {
            rm.set(i, j, i, j, k);
            rm.set(j, i, j, i, k);
            rm.set(i, j, j, i, -k);
            rm.set(j, i, i, j, -k);
        }
        assert!(matches!(
            CurvatureOperatorFrame::from_riemann(rm, 6),
            Err(LabError::UnsupportedCurvature(_))
        ));
        assert!(matches!(
            CurvatureOperatorFrame::from_sectional(2, 1.0, 1.0, 6),
            Err(LabError::DimensionError { .. })
        ));
        assert!(CurvatureOperatorFrame::from_sectional(7, 1.0, 1.0, 6).is_err());
    }

    #[test]
    fn corrupted_connection_breaks_cotton() {
        // A from a genuine warped point would give C = 0; doubling β does not
        let n = 3;
        let a = Tensor2::diag(&[0.3, -0.1, -0.1]);
        let a_rad = Tensor2::diag(&[0.05, 0.02, 0.02]);
        // choose β consistent with c' = β (a - c): 0.02 = β * 0.4
        let good = FrameConnection::warped(n, 0.05);
        assert!(cotton_from_schouten(&a, &a_rad, &good).get(0, 1, 1).abs() < 1e-15);
        let bad = FrameConnection::warped(n, 0.1);
        assert!(cotton_from_schouten(&a, &a_rad, &bad).max_abs() > 1e-3);
    }
}
