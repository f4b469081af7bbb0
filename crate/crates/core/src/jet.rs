//! Truncated Taylor series ("jets") and the small scalar abstraction shared by
//! closed-form fields, the curvature formulas and the ODE right-hand side.
//!
//! A [`Jet`] stores normalized Taylor coefficients `c_k = u^(k)(t0) / k!` of a
//! function of one variable, together with the number of coefficients that are
//! valid. Arithmetic propagates validity as the minimum over the operands, so
//! a quantity built from `b''` automatically carries two fewer orders than `b`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of stored Taylor coefficients (value plus seven derivatives).
pub const JET_CAP: usize = 8;

/// Arithmetic needed to evaluate closed forms and curvature formulas generically.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Leading value, rounded to `f64`.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn powf(self, p: f64) -> Self;

    fn powi(self, p: i32) -> Self {
        if p == 0 {
            return Self::cst(1.0);
        }
        let mut base = self;
        let mut e = p.unsigned_abs();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a * base,
                    None => base,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        let r = acc.unwrap_or_else(|| Self::cst(1.0));
        if p < 0 {
            Self::cst(1.0) / r
        } else {
            r
        }
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, p: i32) -> Self {
        f64::powi(self, p)
    }
}

/// Truncated Taylor expansion of a scalar function around a point.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; JET_CAP],
    len: usize,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.derivatives()).finish()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Jet {
    /// A constant: every coefficient is known (higher ones are exactly zero).
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_CAP];
        c[0] = v;
        Jet { c, len: JET_CAP }
    }

    /// The independent variable expanded at `t`.
    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; JET_CAP];
        c[0] = t;
        c[1] = 1.0;
        Jet { c, len: JET_CAP }
    }

    /// Build from plain derivatives `[u, u', u'', ...]`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        assert!(!d.is_empty() && d.len() <= JET_CAP, "jet order out of range");
        let mut c = [0.0; JET_CAP];
        for (k, v) in d.iter().enumerate() {
            c[k] = v / factorial(k);
        }
        Jet { c, len: d.len() }
    }

    /// Build from normalized Taylor coefficients.
    pub fn from_taylor(coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= JET_CAP, "jet order out of range");
        let mut c = [0.0; JET_CAP];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Jet { c, len: coeffs.len() }
    }

    /// Number of valid coefficients.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative. Panics if that order is not carried.
    pub fn d(&self, k: usize) -> f64 {
        assert!(
            k < self.len,
            "derivative order {k} not carried by jet of length {}",
            self.len
        );
        self.c[k] * factorial(k)
    }

    pub fn taylor(&self) -> &[f64] {
        &self.c[..self.len]
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.d(k)).collect()
    }

    pub fn truncate(mut self, len: usize) -> Self {
        let len = len.min(self.len);
        for v in self.c.iter_mut().skip(len) {
            *v = 0.0;
        }
        self.len = len;
        self
    }

    /// Derivative with respect to the expansion variable (one order is lost).
    pub fn diff(&self) -> Self {
        assert!(self.len >= 2, "cannot differentiate a jet of length {}", self.len);
        let mut c = [0.0; JET_CAP];
        for k in 0..self.len - 1 {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Jet { c, len: self.len - 1 }
    }

    /// Antiderivative with the given constant term (one order is gained, capped).
    pub fn integrate(&self, c0: f64) -> Self {
        let mut c = [0.0; JET_CAP];
        c[0] = c0;
        let len = (self.len + 1).min(JET_CAP);
        for k in 1..len {
            c[k] = self.c[k - 1] / k as f64;
        }
        Jet { c, len }
    }

    /// Evaluate the Taylor polynomial at offset `tau`.
    pub fn eval_at(&self, tau: f64) -> f64 {
        self.c[..self.len].iter().rev().fold(0.0, |acc, &ck| acc * tau + ck)
    }

    /// Re-expand the truncated series around `t0 + tau`.
    pub fn shift(&self, tau: f64) -> Self {
        let mut c = [0.0; JET_CAP];
        for (j, cj) in c.iter_mut().enumerate().take(self.len) {
            // sum_k binom(k, j) c_k tau^(k-j)
            let mut binom = 1.0;
            let mut pw = 1.0;
            let mut acc = 0.0;
            for k in j..self.len {
                if k > j {
                    binom = binom * k as f64 / (k - j) as f64;
                    pw *= tau;
                }
                acc += binom * self.c[k] * pw;
            }
            *cj = acc;
        }
        Jet { c, len: self.len }
    }

    /// `outer(inner(x))` where `outer` is expanded at `inner.value()`.
    pub fn compose(outer: &Jet, inner: &Jet) -> Self {
        let len = outer.len.min(inner.len);
        let mut delta = *inner;
        delta.c[0] = 0.0;
        let delta = delta.truncate(len);
        let mut acc = Jet::constant(outer.c[len - 1]).truncate(len);
        for k in (0..len - 1).rev() {
            acc = acc * delta + outer.c[k];
        }
        acc.truncate(len)
    }

    fn binary_len(&self, other: &Jet) -> usize {
        self.len.min(other.len)
    }

    fn sin_cos(self) -> (Jet, Jet) {
        let n = self.len;
        let mut s = [0.0; JET_CAP];
        let mut co = [0.0; JET_CAP];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..n {
            let (mut as_, mut ac) = (0.0, 0.0);
            for i in 1..=k {
                as_ += i as f64 * self.c[i] * co[k - i];
                ac += i as f64 * self.c[i] * s[k - i];
            }
            s[k] = as_ / k as f64;
            co[k] = -ac / k as f64;
        }
        (Jet { c: s, len: n }, Jet { c: co, len: n })
    }

    fn sinh_cosh(self) -> (Jet, Jet) {
        let n = self.len;
        let mut s = [0.0; JET_CAP];
        let mut co = [0.0; JET_CAP];
        s[0] = self.c[0].sinh();
        co[0] = self.c[0].cosh();
        for k in 1..n {
            let (mut as_, mut ac) = (0.0, 0.0);
            for i in 1..=k {
                as_ += i as f64 * self.c[i] * co[k - i];
                ac += i as f64 * self.c[i] * s[k - i];
            }
            s[k] = as_ / k as f64;
            co[k] = ac / k as f64;
        }
        (Jet { c: s, len: n }, Jet { c: co, len: n })
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let len = self.binary_len(&o);
        let mut c = [0.0; JET_CAP];
        for k in 0..len {
            c[k] = self.c[k] + o.c[k];
        }
        Jet { c, len }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let len = self.binary_len(&o);
        let mut c = [0.0; JET_CAP];
        for k in 0..len {
            c[k] = self.c[k] - o.c[k];
        }
        Jet { c, len }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let len = self.binary_len(&o);
        let mut c = [0.0; JET_CAP];
        for k in 0..len {
            c[k] = (0..=k).map(|i| self.c[i] * o.c[k - i]).sum();
        }
        Jet { c, len }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let len = self.binary_len(&o);
        let mut q = [0.0; JET_CAP];
        for k in 0..len {
            let acc: f64 = (1..=k).map(|i| o.c[i] * q[k - i]).sum();
            q[k] = (self.c[k] - acc) / o.c[0];
        }
        Jet { c: q, len }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.c[0] += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.c[0] -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, o: f64) -> Jet {
        for v in self.c.iter_mut() {
            *v *= o;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, o: f64) -> Jet {
        for v in self.c.iter_mut() {
            *v /= o;
        }
        self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        o + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        -o + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        o * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        Jet::constant(self).truncate(o.len) / o
    }
}

impl Scalar for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn sqrt(self) -> Self {
        let n = self.len;
        let mut r = [0.0; JET_CAP];
        r[0] = self.c[0].sqrt();
        for k in 1..n {
            let acc: f64 = (1..k).map(|i| r[i] * r[k - i]).sum();
            r[k] = (self.c[k] - acc) / (2.0 * r[0]);
        }
        Jet { c: r, len: n }
    }

    fn exp(self) -> Self {
        let n = self.len;
        let mut e = [0.0; JET_CAP];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let acc: f64 = (1..=k).map(|i| i as f64 * self.c[i] * e[k - i]).sum();
            e[k] = acc / k as f64;
        }
        Jet { c: e, len: n }
    }

    fn ln(self) -> Self {
        let n = self.len;
        let mut l = [0.0; JET_CAP];
        l[0] = self.c[0].ln();
        for k in 1..n {
            let acc: f64 = (1..k).map(|i| i as f64 * l[i] * self.c[k - i]).sum();
            l[k] = (self.c[k] - acc / k as f64) / self.c[0];
        }
        Jet { c: l, len: n }
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn sinh(self) -> Self {
        self.sinh_cosh().0
    }

    fn cosh(self) -> Self {
        self.sinh_cosh().1
    }

    fn powf(self, p: f64) -> Self {
        let n = self.len;
        let mut y = [0.0; JET_CAP];
        y[0] = self.c[0].powf(p);
        for k in 1..n {
            let acc: f64 = (1..=k)
                .map(|i| (p * i as f64 - (k - i) as f64) * self.c[i] * y[k - i])
                .sum();
            y[k] = acc / (k as f64 * self.c[0]);
        }
        Jet { c: y, len: n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn sqrt_of_one_minus_two_over_t() {
        // f = sqrt(1 - 2/t) at t = 4; f' = 1/(t^2 f)
        let t = Jet::variable(4.0);
        let f = (1.0 - 2.0 / t).sqrt();
        let fv = (0.5f64).sqrt();
        assert!(close(f.d(0), fv, 1e-15));
        assert!(close(f.d(1), 1.0 / (16.0 * fv), 1e-15));
        // f f' = 1/t^2 -> (f f')' = -2/t^3
        let ff = f * f.diff();
        assert!(close(ff.d(1), -2.0 / 64.0, 1e-14));
    }

    #[test]
    fn trig_and_hyperbolic_derivative_cycles() {
        let x = Jet::variable(0.7);
        let s = x.sin();
        let expect = [0.7f64.sin(), 0.7f64.cos(), -0.7f64.sin(), -0.7f64.cos()];
        for (k, e) in expect.iter().enumerate() {
            assert!(close(s.d(k), *e, 1e-14));
        }
        let ch = x.cosh();
        assert!(close(ch.d(3), 0.7f64.sinh(), 1e-14));
        assert!(close(ch.d(6), 0.7f64.cosh(), 1e-12));
    }

    #[test]
    fn exp_ln_powf_powi_agree() {
        let x = Jet::variable(1.3);
        let a = x.powf(2.5);
        let b = (x.ln() * 2.5).exp();
        for k in 0..JET_CAP {
            assert!(close(a.d(k), b.d(k), 1e-12), "order {k}");
        }
        let c = x.powi(-3);
        let d = 1.0 / (x * x * x);
        for k in 0..JET_CAP {
            assert!(close(c.d(k), d.d(k), 1e-12), "order {k}");
        }
    }

    #[test]
    fn diff_and_integrate_track_length() {
        let x = Jet::variable(2.0).sin();
        let d2 = x.diff().diff();
        assert_eq!(d2.len(), JET_CAP - 2);
        let back = d2.integrate(x.d(1)).integrate(x.d(0));
        assert_eq!(back.len(), JET_CAP);
        for k in 0..JET_CAP {
            assert!(close(back.d(k), x.d(k), 1e-13));
        }
    }

    #[test]
    fn shift_matches_direct_expansion() {
        let a = Jet::variable(1.0).exp();
        let b = Jet::variable(1.01).exp();
        let shifted = a.shift(0.01);
        for k in 0..4 {
            assert!(close(shifted.d(k), b.d(k), 1e-12), "order {k}");
        }
    }

    #[test]
    fn composition_is_chain_rule() {
        // sin(t^2) at t = 0.9
        let inner = Jet::variable(0.9) * Jet::variable(0.9);
        let outer = Jet::variable(inner.value()).sin();
        let direct = inner.sin();
        let comp = Jet::compose(&outer, &inner);
        for k in 0..JET_CAP {
            assert!(close(comp.d(k), direct.d(k), 1e-12), "order {k}");
        }
    }
}
