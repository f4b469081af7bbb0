//! Double-double arithmetic (about 32 significant digits).
//!
//! Only the finite-difference coordinate oracle uses this: nested central
//! differences at steps near `1e-4` lose eight digits to cancellation, which
//! leaves nothing of an `f64` result.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::jet::Scalar;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};
const HALF_PI: Dd = Dd {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123233995736766e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn ldexp(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn recip(self) -> Self {
        Dd::ONE / self
    }

    /// Taylor series of sin and cos for |x| <= pi/4.
    fn sin_cos_reduced(x: Dd) -> (Dd, Dd) {
        let x2 = x * x;
        let mut term = x;
        let mut s = x;
        let mut k = 1.0;
        while k < 60.0 {
            term = -(term * x2) / ((k + 1.0) * (k + 2.0));
            s = s + term;
            k += 2.0;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        let mut term = Dd::ONE;
        let mut c = Dd::ONE;
        let mut k = 0.0;
        while k < 60.0 {
            term = -(term * x2) / ((k + 1.0) * (k + 2.0));
            c = c + term;
            k += 2.0;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        (s, c)
    }

    fn sin_cos(self) -> (Dd, Dd) {
        let k = (self.hi / HALF_PI.hi).round();
        let r = self - HALF_PI * k;
        let (s, c) = Dd::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, o: f64) -> Dd {
        self + Dd::new(o)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, o: f64) -> Dd {
        self - Dd::new(o)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        self * Dd::new(o)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, o: f64) -> Dd {
        self / Dd::new(o)
    }
}

impl Scalar for Dd {
    fn cst(v: f64) -> Self {
        Dd::new(v)
    }

    fn value(&self) -> f64 {
        self.to_f64()
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::new(f64::NAN) };
        }
        let y = Dd::new(self.hi.sqrt());
        y + (self - y * y) / (y * 2.0)
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        // r = (x - k ln2) / 2^10, series, then square back up
        let r = (self - LN2 * k).ldexp(-10);
        // square expm1 as p <- p (p + 2) so the small part keeps its digits
        let mut term = r;
        let mut p = r;
        for i in 2..30 {
            term = term * r / i as f64;
            p = p + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            p = p * (p + 2.0);
        }
        (p + 1.0).ldexp(k as i32)
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN);
        }
        // Newton on exp: x <- x + a e^{-x} - 1
        let mut x = Dd::new(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - 1.0;
        }
        x
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn sinh(self) -> Self {
        if self.hi.abs() < 0.5 {
            let x2 = self * self;
            let mut term = self;
            let mut sum = self;
            let mut k = 1.0;
            while k < 60.0 {
                term = term * x2 / ((k + 1.0) * (k + 2.0));
                sum = sum + term;
                k += 2.0;
                if term.hi.abs() < 1e-36 {
                    break;
                }
            }
            sum
        } else {
            let e = self.exp();
            (e - e.recip()) * 0.5
        }
    }

    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()) * 0.5
    }

    fn powf(self, p: f64) -> Self {
        (self.ln() * p).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(a: Dd, b: Dd) -> f64 {
        (a - b).to_f64().abs()
    }

    #[test]
    fn arithmetic_keeps_extra_digits() {
        let third = Dd::ONE / Dd::new(3.0);
        assert!(err(third * 3.0, Dd::ONE) < 1e-31);
        let two = Dd::new(2.0);
        let r = two.sqrt();
        assert!(err(r * r, two) < 1e-31);
    }

    #[test]
    fn transcendental_identities() {
        for &x in &[0.1, 0.7, 1.2345, 2.9, -3.7, 6.0] {
            let x = Dd::new(x);
            let (s, c) = (x.sin(), x.cos());
            assert!(err(s * s + c * c, Dd::ONE) < 1e-30, "pythagoras at {x:?}");
            let (sh, ch) = (x.sinh(), x.cosh());
            assert!(err(ch * ch - sh * sh, Dd::ONE) < 1e-29 * ch.hi * ch.hi);
            if x.hi > 0.0 {
                assert!(err(x.ln().exp(), x) < 1e-30 * x.hi);
            }
        }
        // sin(pi/6) = 1/2 with pi/6 = HALF_PI / 3
        let s = (HALF_PI / 3.0).sin();
        assert!(err(s, Dd::new(0.5)) < 1e-31);
    }

    #[test]
    fn agrees_with_f64_to_rounding() {
        for &x in &[0.3, 1.1, 2.2] {
            assert!((Dd::new(x).sin().to_f64() - f64::sin(x)).abs() < 2e-16);
            assert!((Dd::new(x).exp().to_f64() - f64::exp(x)).abs() < 4e-16 * f64::exp(x));
            assert!((Dd::new(x).sinh().to_f64() - f64::sinh(x)).abs() < 4e-16 * f64::cosh(x));
        }
    }
}
