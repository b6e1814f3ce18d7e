//! Univariate root isolation: Aberth iteration in double precision, Newton
//! polishing in double-double, then certification by Weierstrass inclusion
//! disks. A connected cluster of `m` disks holds exactly `m` roots, so every
//! returned radius is a proven bound.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dd::{Dd, DdComplex, DD_EPS};
use super::poly::{CxLaurentPoly, Exponent, IntLaurentPoly};
use super::LaurentError;

/// Root radius bound, relative to `max(1, |root|)`.
pub const DEFAULT_ROOT_RADIUS: f64 = 1e-12;

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootConfig {
    /// Largest accepted radius, relative to `max(1, |root|)`.
    pub radius: f64,
    pub max_iterations: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { radius: DEFAULT_ROOT_RADIUS, max_iterations: 600 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// Certified: some exact root lies within this distance.
    pub radius: f64,
}

/// Roots of `u^k * p(u)` with `p(0) != 0`: `monomial_shift` is `k`, and
/// `roots` lists the roots of `p` repeated by multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub monomial_shift: i64,
    pub leading: Complex64,
}

impl RootSet {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.roots.iter().map(|r| r.value)
    }
}

struct DensePoly {
    coeffs: Vec<DdComplex>,
    radii: Vec<f64>,
}

impl DensePoly {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn centers(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn horner_dd(c: &[DdComplex], z: DdComplex) -> (DdComplex, DdComplex) {
    let mut p = DdComplex::ZERO;
    let mut dp = DdComplex::ZERO;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton correction `p(z) / p'(z)`, evaluated on the reversed polynomial
/// outside the unit disk so large roots do not overflow.
fn newton_ratio(c: &[Complex64], z: Complex64) -> Complex64 {
    if z.norm() <= 1.0 {
        let (p, dp) = horner(c, z);
        return p / dp;
    }
    let n = (c.len() - 1) as f64;
    let y = z.inv();
    let mut q = Complex64::zero();
    let mut dq = Complex64::zero();
    for &a in c.iter() {
        dq = dq * y + q;
        q = q * y + a;
    }
    z * q / (q * n - y * dq)
}

/// |p(z)| is at rounding level: the point is a root to working precision.
fn at_noise_level(c: &[Complex64], z: Complex64) -> bool {
    let r = z.norm();
    let n = c.len() as f64;
    if r <= 1.0 {
        let p = horner(c, z).0.norm();
        let scale: f64 = c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm());
        p <= 4.0 * n * EPS * scale
    } else {
        // compare the reversed polynomial at 1/z
        let y = z.inv();
        let ry = y.norm();
        let mut q = Complex64::zero();
        let mut scale = 0.0;
        for a in c.iter() {
            q = q * y + a;
            scale = scale * ry + a.norm();
        }
        q.norm() <= 4.0 * n * EPS * scale
    }
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(k, log|c_k|)`.
fn initial_points(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> =
        c.iter().enumerate().filter(|(_, a)| a.norm() > 0.0).map(|(k, a)| (k, a.norm().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cr = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cr >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut z = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let r = ((li - lj) / m as f64).exp();
        for t in 0..m {
            let angle = std::f64::consts::TAU * (t as f64 / m as f64 + i as f64 / n as f64) + 0.4;
            z.push(Complex64::from_polar(r, angle));
        }
    }
    z
}

/// Aberth-Ehrlich iteration. Returns the approximations and whether every
/// one of them reached rounding level.
fn aberth(c: &[Complex64], max_iterations: usize) -> (Vec<Complex64>, bool) {
    let n = c.len() - 1;
    match n {
        0 => return (Vec::new(), true),
        1 => return (vec![-c[0] / c[1]], true),
        _ => {}
    }
    let mut z = initial_points(c);
    let mut done = vec![false; n];
    for _ in 0..max_iterations {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            if at_noise_level(c, z[i]) {
                done[i] = true;
                continue;
            }
            all = false;
            let ratio = newton_ratio(c, z[i]);
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
            }
            if w.norm() <= EPS * z[i].norm() {
                done[i] = true;
            }
        }
        if all {
            return (z, true);
        }
    }
    let ok = done.iter().all(|&d| d);
    (z, ok)
}

fn polish(c: &[DdComplex], z: Complex64) -> DdComplex {
    let mut x = DdComplex::from_c64(z);
    let (mut p, mut dp) = horner_dd(c, x);
    for _ in 0..4 {
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let cand = x - p / dp;
        let (cp, cdp) = horner_dd(c, cand);
        if cp.norm() >= p.norm() {
            break;
        }
        x = cand;
        p = cp;
        dp = cdp;
    }
    x
}

/// Root approximation `z` of an integer polynomial, polished to double-double
/// precision. The second value is the size of the last Newton correction.
pub(crate) fn refine_root_dd(p: &IntLaurentPoly, z: Complex64) -> Result<(DdComplex, f64), LaurentError> {
    let (_, coeffs) = p.univariate_coefficients()?;
    let c: Vec<DdComplex> = coeffs.iter().map(|a| DdComplex::new(Dd::from_bigint(a).0, Dd::ZERO)).collect();
    let x = polish(&c, z);
    let (v, dv) = horner_dd(&c, x);
    let step = if dv.norm() > 0.0 { (v / dv).norm() } else { f64::INFINITY };
    Ok((x, step))
}

/// Inclusion radii `n |W_i|` for every polynomial in the coefficient balls,
/// widened over connected clusters.
fn certify(poly: &DensePoly, z: &[Complex64]) -> Vec<f64> {
    let n = poly.degree();
    let lead = poly.coeffs[n].norm() * (1.0 - 4.0 * EPS) - poly.radii[n];
    let mut disk = vec![f64::INFINITY; n];
    if lead > 0.0 {
        for i in 0..n {
            let zi = z[i];
            let r = zi.norm();
            let pv = horner_dd(&poly.coeffs, DdComplex::from_c64(zi)).0.norm();
            let slack: f64 = poly
                .coeffs
                .iter()
                .zip(&poly.radii)
                .rev()
                .fold(0.0, |acc, (a, rad)| acc * r + a.norm() * 8.0 * (n as f64 + 1.0) * DD_EPS + rad);
            let num = (pv * (1.0 + 1e-14) + slack * (1.0 + 1e-14)) * n as f64;
            if num == 0.0 {
                disk[i] = 0.0;
                continue;
            }
            let mut log_den = lead.ln();
            let mut degenerate = false;
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = (zi - zj).norm();
                    if d == 0.0 {
                        degenerate = true;
                        break;
                    }
                    log_den += d.ln();
                }
            }
            if degenerate {
                continue;
            }
            disk[i] = (num.ln() - log_den).exp() * (1.0 + 8.0 * n as f64 * EPS);
        }
    }
    // union-find over overlapping disks
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= disk[i] + disk[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| roots[j] == roots[i])
                .map(|j| (z[i] - z[j]).norm() * (1.0 + 2.0 * EPS) + disk[j])
                .fold(0.0, f64::max)
        })
        .collect()
}

fn isolate_dense(poly: &DensePoly, cfg: &RootConfig) -> Result<Vec<Root>, LaurentError> {
    let n = poly.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (approx, converged) = aberth(&poly.centers(), cfg.max_iterations);
    let z: Vec<Complex64> = approx.iter().map(|&x| polish(&poly.coeffs, x).to_c64()).collect();
    let radii = certify(poly, &z);
    let worst = z
        .iter()
        .zip(&radii)
        .map(|(zi, r)| r / zi.norm().max(1.0))
        .fold(0.0, f64::max);
    if !(worst <= cfg.radius) {
        return Err(if converged {
            LaurentError::RootRadius { achieved: worst, requested: cfg.radius }
        } else {
            LaurentError::RootNoConvergence
        });
    }
    Ok(z.into_iter().zip(radii).map(|(value, radius)| Root { value, radius }).collect())
}

/// Certified roots of a univariate ball polynomial.
pub fn isolate_roots(p: &CxLaurentPoly, cfg: &RootConfig) -> Result<RootSet, LaurentError> {
    let (shift, coeffs) = p.univariate_coefficients()?;
    let lead = *coeffs.last().expect("nonempty");
    if lead.contains_zero() {
        return Err(LaurentError::Unsupported(
            "leading coefficient is not bounded away from zero".into(),
        ));
    }
    let dense = DensePoly {
        coeffs: coeffs.iter().map(|b| DdComplex::from_c64(b.value)).collect(),
        radii: coeffs.iter().map(|b| b.radius).collect(),
    };
    let roots = isolate_dense(&dense, cfg)?;
    Ok(RootSet { roots, monomial_shift: shift, leading: lead.value })
}

/// Certified roots of an integer polynomial. The square-free decomposition is
/// taken first, so repeated roots meet the radius bound as well.
pub fn univariate_roots(p: &IntLaurentPoly, cfg: &RootConfig) -> Result<RootSet, LaurentError> {
    let (shift, coeffs) = p.univariate_coefficients()?;
    let leading = Complex64::new(coeffs.last().and_then(|c| c.to_f64()).unwrap_or(f64::NAN), 0.0);
    let mut roots = Vec::new();
    for (factor, mult) in square_free_decomposition(&coeffs) {
        let mut dd = Vec::with_capacity(factor.len());
        let mut radii = Vec::with_capacity(factor.len());
        for c in &factor {
            let (d, err) = Dd::from_bigint(c);
            dd.push(DdComplex::new(d, Dd::ZERO));
            radii.push(err);
        }
        let found = isolate_dense(&DensePoly { coeffs: dd, radii }, cfg)?;
        for r in found {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    Ok(RootSet { roots, monomial_shift: shift, leading })
}

/// `log M(p)` by Jensen's formula with uncertified double-precision roots.
/// The reversed polynomial is used when its leading coefficient is larger,
/// which keeps nearly-degenerate leading terms from producing huge roots.
pub(crate) fn fast_log_mahler(c: &[Complex64]) -> f64 {
    let lo = c.iter().position(|a| a.norm() > 0.0);
    let hi = c.iter().rposition(|a| a.norm() > 0.0);
    let (lo, hi) = match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        _ => return f64::NEG_INFINITY,
    };
    let mut c: Vec<Complex64> = c[lo..=hi].to_vec();
    if c.len() == 1 {
        return c[0].norm().ln();
    }
    if c[0].norm() > c[c.len() - 1].norm() {
        c.reverse();
    }
    let (z, _) = aberth(&c, 400);
    c[c.len() - 1].norm().ln() + z.iter().map(|r| r.norm().ln().max(0.0)).sum::<f64>()
}

// Dense integer polynomials, lowest degree first, no trailing zeros.

pub(super) fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

pub(super) fn derivative(a: &[BigInt]) -> Vec<BigInt> {
    trim(a.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
}

pub(super) fn primitive(a: Vec<BigInt>) -> Vec<BigInt> {
    let g = a.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return a;
    }
    let sign = if a.last().is_some_and(Signed::is_negative) { -BigInt::one() } else { BigInt::one() };
    let g = g * sign;
    a.into_iter().map(|c| c / &g).collect()
}

pub(super) fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim((0..n).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect())
}

/// Remainder of `a` by `b` up to a nonzero integer factor.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] -= &lr * bk;
        }
        r = primitive(trim(r));
    }
    r
}

pub(super) fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive(trim(a.to_vec()));
    let mut b = primitive(trim(b.to_vec()));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = r;
    }
    primitive(a)
}

/// Exact quotient over the integers; `b` must divide `a` in `Q[u]` and be
/// primitive.
pub(super) fn div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return Vec::new();
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let (qk, rem) = r[k + db].div_rem(&b[db]);
        debug_assert!(rem.is_zero(), "inexact polynomial division");
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &qk * bj;
        }
        q[k] = qk;
    }
    debug_assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
    trim(q)
}

/// Yun's algorithm: factors `a_i` (degree ≥ 1) with multiplicities `i`.
fn square_free_decomposition(f: &[BigInt]) -> Vec<(Vec<BigInt>, usize)> {
    let f = primitive(trim(f.to_vec()));
    if f.len() <= 1 {
        return Vec::new();
    }
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = div_exact(&f, &a0);
    let c = div_exact(&df, &a0);
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d);
        let nb = div_exact(&b, &a);
        let c = div_exact(&d, &a);
        if a.len() > 1 {
            out.push((a, i));
        }
        d = sub(&c, &derivative(&nb));
        b = nb;
        i += 1;
    }
    out
}

/// Greatest common divisor of two univariate integer polynomials, primitive
/// with positive leading coefficient.
pub(crate) fn univariate_gcd(a: &IntLaurentPoly, b: &IntLaurentPoly) -> Result<IntLaurentPoly, LaurentError> {
    let (_, ca) = a.univariate_coefficients()?;
    let (_, cb) = b.univariate_coefficients()?;
    let g = gcd(&ca, &cb);
    Ok(IntLaurentPoly::from_terms(1, g.into_iter().enumerate().map(|(k, c)| (Exponent::new(&[k as i64]), c))))
}
