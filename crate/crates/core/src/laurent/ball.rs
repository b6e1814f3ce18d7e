//! Complex balls: a center plus a radius that bounds the distance to the
//! exact value. Every operation inflates the radius by its own rounding
//! error, so radii only ever over-estimate.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::dd::{Dd, DdComplex, DD_EPS};

const EPS: f64 = f64::EPSILON;

fn sum_is_exact(a: f64, b: f64) -> bool {
    let s = a + b;
    let bb = s - a;
    (a - (s - bb)) + (b - bb) == 0.0
}

fn prod_is_exact(a: f64, b: f64) -> bool {
    a.mul_add(b, -(a * b)) == 0.0
}

/// `a * b - c * d` is computed without rounding.
fn dot_is_exact(a: f64, b: f64, c: f64, d: f64) -> bool {
    prod_is_exact(a, b) && prod_is_exact(c, d) && sum_is_exact(a * b, -(c * d))
}

/// Shared surface of [`Ball`] and [`DdBall`], so the rounding pipelines can
/// run once in double precision and once escalated.
pub trait BallScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    /// `exp(2 pi i num/den)`.
    fn root_of_unity(num: i64, den: i64) -> Self;
    /// Integer power, inverting for negative exponents.
    fn powi(self, k: i64) -> Option<Self>;
    fn radius(&self) -> f64;
    fn center(&self) -> Complex64;
    /// Nearest Gaussian integer's real part, plus the worst-case distance of
    /// any point of the ball from that integer.
    fn nearest_integer(&self) -> (BigInt, f64);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub value: Complex64,
    pub radius: f64,
}

impl Ball {
    pub fn exact(value: Complex64) -> Self {
        Ball { value, radius: 0.0 }
    }

    pub fn new(value: Complex64, radius: f64) -> Self {
        Ball { value, radius: radius.max(0.0) }
    }

    pub fn real(x: f64) -> Self {
        Ball::exact(Complex64::new(x, 0.0))
    }

    pub fn abs_upper(&self) -> f64 {
        self.value.norm() * (1.0 + 2.0 * EPS) + self.radius
    }

    pub fn abs_lower(&self) -> f64 {
        (self.value.norm() * (1.0 - 2.0 * EPS) - self.radius).max(0.0)
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() == 0.0
    }

    pub fn recip(self) -> Option<Ball> {
        let lower = self.abs_lower();
        if lower == 0.0 {
            return None;
        }
        let v = self.value.inv();
        // |1/z - 1/c| <= r / (|c| (|c| - r))
        let r = self.radius / (self.value.norm() * lower) + 4.0 * EPS * v.norm();
        Some(Ball::new(v, r))
    }

    pub fn div(self, other: Ball) -> Option<Ball> {
        other.recip().map(|inv| self * inv)
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, b: Ball) -> Ball {
        let v = self.value + b.value;
        if self.radius == 0.0
            && b.radius == 0.0
            && sum_is_exact(self.value.re, b.value.re)
            && sum_is_exact(self.value.im, b.value.im)
        {
            return Ball::exact(v);
        }
        Ball::new(v, self.radius + b.radius + EPS * v.norm())
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, b: Ball) -> Ball {
        self + (-b)
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { value: -self.value, radius: self.radius }
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, b: Ball) -> Ball {
        let v = self.value * b.value;
        let (x, y) = (self.value, b.value);
        if self.radius == 0.0
            && b.radius == 0.0
            && dot_is_exact(x.re, y.re, x.im, y.im)
            && dot_is_exact(x.re, y.im, -x.im, y.re)
        {
            return Ball::exact(v);
        }
        let a_abs = x.norm();
        let b_abs = y.norm();
        let r = a_abs * b.radius
            + b_abs * self.radius
            + self.radius * b.radius
            + 4.0 * EPS * a_abs * b_abs;
        Ball::new(v, r)
    }
}

impl BallScalar for Ball {
    fn zero() -> Self {
        Ball::real(0.0)
    }

    fn one() -> Self {
        Ball::real(1.0)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let x = n.to_f64().unwrap_or(f64::INFINITY);
        // integers above 2^53 are rounded on conversion
        let r = if x.abs() > 9.007_199_254_740_992e15 { x.abs() * EPS } else { 0.0 };
        Ball::new(Complex64::new(x, 0.0), r)
    }

    fn root_of_unity(num: i64, den: i64) -> Self {
        let den = den.max(1);
        let num = num.rem_euclid(den);
        let z = match (4 * num).checked_rem(den) {
            // quarter turns are exact
            Some(0) => match 4 * num / den {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
            _ => Complex64::from_polar(1.0, std::f64::consts::TAU * num as f64 / den as f64),
        };
        let r = if z.re.fract() == 0.0 && z.im.fract() == 0.0 { 0.0 } else { 4.0 * EPS };
        Ball::new(z, r)
    }

    fn powi(self, k: i64) -> Option<Self> {
        let mut base = if k < 0 { self.recip()? } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = Ball::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Some(acc)
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn center(&self) -> Complex64 {
        self.value
    }

    fn nearest_integer(&self) -> (BigInt, f64) {
        let re = self.value.re.round();
        let n = bigint_from_f64(re);
        let dist = Complex64::new(self.value.re - re, self.value.im).norm();
        (n, dist + self.radius)
    }
}

fn bigint_from_f64(x: f64) -> BigInt {
    use num_traits::FromPrimitive;
    BigInt::from_f64(x).unwrap_or_else(BigInt::zero)
}

/// Double-double complex ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdBall {
    pub value: DdComplex,
    pub radius: f64,
}

impl DdBall {
    pub fn new(value: DdComplex, radius: f64) -> Self {
        DdBall { value, radius: radius.max(0.0) }
    }

    pub fn abs_lower(&self) -> f64 {
        (self.value.norm() * (1.0 - 1e-15) - self.radius).max(0.0)
    }

    pub fn recip(self) -> Option<DdBall> {
        let lower = self.abs_lower();
        if lower == 0.0 {
            return None;
        }
        let v = self.value.recip();
        let r = self.radius / (self.value.norm() * lower) + 8.0 * DD_EPS * v.norm();
        Some(DdBall::new(v, r))
    }
}

impl Add for DdBall {
    type Output = DdBall;
    fn add(self, b: DdBall) -> DdBall {
        let v = self.value + b.value;
        DdBall::new(v, self.radius + b.radius + 2.0 * DD_EPS * v.norm())
    }
}

impl Sub for DdBall {
    type Output = DdBall;
    fn sub(self, b: DdBall) -> DdBall {
        self + (-b)
    }
}

impl Neg for DdBall {
    type Output = DdBall;
    fn neg(self) -> DdBall {
        DdBall { value: -self.value, radius: self.radius }
    }
}

impl Mul for DdBall {
    type Output = DdBall;
    fn mul(self, b: DdBall) -> DdBall {
        let v = self.value * b.value;
        let a_abs = self.value.norm();
        let b_abs = b.value.norm();
        let r = a_abs * b.radius
            + b_abs * self.radius
            + self.radius * b.radius
            + 8.0 * DD_EPS * a_abs * b_abs;
        DdBall::new(v, r)
    }
}

impl BallScalar for DdBall {
    fn zero() -> Self {
        DdBall::new(DdComplex::ZERO, 0.0)
    }

    fn one() -> Self {
        DdBall::new(DdComplex::ONE, 0.0)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let (d, err) = Dd::from_bigint(n);
        DdBall::new(DdComplex::new(d, Dd::ZERO), err)
    }

    fn root_of_unity(num: i64, den: i64) -> Self {
        DdBall::new(DdComplex::root_of_unity(num, den), 16.0 * DD_EPS)
    }

    fn powi(self, k: i64) -> Option<Self> {
        let mut base = if k < 0 { self.recip()? } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = DdBall::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Some(acc)
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn center(&self) -> Complex64 {
        self.value.to_c64()
    }

    fn nearest_integer(&self) -> (BigInt, f64) {
        let (n, res) = self.value.re.round_to_bigint();
        let dist = (res * res + self.value.im.to_f64().powi(2)).sqrt();
        (n, dist + self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_grows_through_products() {
        let a = Ball::new(Complex64::new(1.0, 1.0), 1e-10);
        let b = Ball::new(Complex64::new(2.0, -1.0), 1e-10);
        let p = a * b;
        // exact propagation bound: |a| rb + |b| ra
        let bound = a.value.norm() * 1e-10 + b.value.norm() * 1e-10;
        assert!(p.radius >= bound);
        assert!((p.value - Complex64::new(3.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Ball::exact(Complex64::new(-1.0, 3.0));
        let b = Ball::exact(Complex64::new(2.0, 0.5));
        assert_eq!((a * b).radius, 0.0);
        assert_eq!((a + b).radius, 0.0);
        let third = Ball::real(1.0 / 3.0);
        assert!((third * third).radius > 0.0);
    }

    #[test]
    fn quarter_turns_are_exact() {
        let i = Ball::root_of_unity(1, 4);
        assert_eq!(i.value, Complex64::new(0.0, 1.0));
        assert_eq!(i.radius, 0.0);
        let m = Ball::root_of_unity(3, 6);
        assert_eq!(m.value, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn reciprocal_of_ball_around_zero_fails() {
        assert!(Ball::new(Complex64::new(1e-3, 0.0), 1e-2).recip().is_none());
        let inv = Ball::real(4.0).recip().unwrap();
        assert!((inv.value.re - 0.25).abs() < 1e-16);
    }

    #[test]
    fn dd_ball_rounds_large_integers() {
        let n: BigInt = "100000000000000000000003".parse().unwrap();
        let b = DdBall::from_bigint(&n) * DdBall::one();
        let (m, res) = b.nearest_integer();
        assert_eq!(m, n);
        assert!(res < 1e-3);
    }
}
