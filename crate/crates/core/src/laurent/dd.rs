//! Double-double arithmetic, used wherever a single f64 pass loses too many
//! digits: Newton polishing of roots and the escalated rounding path of the
//! norm products.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Unit roundoff of the double-double format (conservative).
pub const DD_EPS: f64 = 4.930380657631324e-32;

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

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to an arbitrary integer. The second value bounds
    /// the conversion error.
    pub fn from_bigint(n: &BigInt) -> (Self, f64) {
        let hi = n.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return (Dd::new(hi), f64::INFINITY);
        }
        let rest = n - BigInt::from_f64(hi).unwrap_or_else(BigInt::zero);
        let lo = rest.to_f64().unwrap_or(0.0);
        let tail = (&rest - BigInt::from_f64(lo).unwrap_or_else(BigInt::zero)).abs();
        let (hi, lo) = quick_two_sum(hi, lo);
        (Dd { hi, lo }, tail.to_f64().unwrap_or(f64::INFINITY))
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

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        // one Newton step in doubled precision
        let (p, e) = two_prod(x, x);
        let diff = (self.hi - p - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, diff);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    /// Nearest integer together with the absolute residual `|self - n|`.
    pub fn round_to_bigint(self) -> (BigInt, f64) {
        let hi = self.hi.round();
        // exact: hi and self.hi differ by at most one half
        let (s, e) = two_sum(self.hi - hi, self.lo);
        let lo = (s + e).round();
        let n = BigInt::from_f64(hi).unwrap_or_else(BigInt::zero)
            + BigInt::from_f64(lo).unwrap_or_else(BigInt::zero);
        let residual = (self - Dd::new(hi) - Dd::new(lo)).to_f64().abs();
        (n, residual)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: DdComplex = DdComplex { re: Dd::ONE, im: Dd::ZERO };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_c64(z: Complex64) -> Self {
        DdComplex { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt().to_f64()
    }

    pub fn conj(self) -> Self {
        DdComplex { re: self.re, im: -self.im }
    }

    pub fn scale(self, s: Dd) -> Self {
        DdComplex { re: self.re * s, im: self.im * s }
    }

    pub fn recip(self) -> Self {
        let d = self.norm_sqr();
        DdComplex { re: self.re / d, im: -(self.im / d) }
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(self, k: i64) -> Self {
        let mut base = if k < 0 { self.recip() } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = DdComplex::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `exp(2 pi i num/den)`, polished by Newton's method on `z^den = 1`.
    pub fn root_of_unity(num: i64, den: i64) -> Self {
        let den = den.max(1);
        let num = num.rem_euclid(den);
        let angle = std::f64::consts::TAU * (num as f64) / (den as f64);
        let mut z = DdComplex::from_c64(Complex64::from_polar(1.0, angle));
        if den == 1 {
            return DdComplex::ONE;
        }
        for _ in 0..3 {
            // z <- z - (z^d - 1) / (d z^{d-1})
            let zd1 = z.powi(den - 1);
            let f = zd1 * z - DdComplex::ONE;
            let df = zd1.scale(Dd::new(den as f64));
            z = z - f / df;
        }
        z
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    fn neg(self) -> DdComplex {
        DdComplex { re: -self.re, im: -self.im }
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, b: DdComplex) -> DdComplex {
        DdComplex { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, b: DdComplex) -> DdComplex {
        DdComplex { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, b: DdComplex) -> DdComplex {
        self * b.recip()
    }
}
