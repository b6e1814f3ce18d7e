use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::EntropyError;
use crate::laurent::{
    bivariate_square_free, fast_log_mahler, univariate_roots, CxLaurentPoly, Exponent, IntLaurentPoly, RootConfig,
};

/// `log M` in natural-log units with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MahlerValue {
    pub value: f64,
    pub error: f64,
    /// Set when `error` comes from a convergence test rather than a proof.
    pub heuristic: bool,
    pub converged: bool,
}

impl MahlerValue {
    pub fn exact(value: f64) -> Self {
        MahlerValue { value, error: 0.0, heuristic: false, converged: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Initial outer nodes; panels of 15 Kronrod nodes each.
    pub nodes: usize,
    /// Rounds of panel doubling.
    pub depth: u32,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nodes: 256, depth: 8, tolerance: 1e-7 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), EntropyError> {
        if self.nodes < 16 || !(self.tolerance > 0.0) {
            return Err(EntropyError::Config(format!(
                "need nodes >= 16 and tolerance > 0, got nodes={} tolerance={}",
                self.nodes, self.tolerance
            )));
        }
        Ok(())
    }
}

/// Neumaier-compensated sum in iteration order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Jensen's formula on certified roots.
pub fn mahler_1d_jensen(p: &IntLaurentPoly) -> Result<MahlerValue, EntropyError> {
    if p.is_zero() {
        return Err(EntropyError::ZeroPolynomial);
    }
    let rs = univariate_roots(p, &RootConfig::default())?;
    let lead = rs.leading.norm().ln();
    let mut error = 4.0 * f64::EPSILON * lead.abs();
    let mut terms = vec![lead];
    for r in &rs.roots {
        let m = r.value.norm();
        terms.push(m.ln().max(0.0));
        // log+ is 1/max(1, |z| - r)-Lipschitz on the disk
        error += r.radius / (m - r.radius).max(1.0) + 4.0 * f64::EPSILON * m.ln().abs();
    }
    Ok(MahlerValue { value: compensated_sum(terms), error, heuristic: false, converged: true })
}

/// The polynomial as a family of univariate polynomials in the second
/// variable, indexed by a point of the first.
struct Slices {
    /// `coeffs[k][j]`: coefficient of `x^j y^k`, exponents shifted to start at 0.
    coeffs: Vec<Vec<Complex64>>,
}

impl Slices {
    fn new(p: &CxLaurentPoly) -> Self {
        let (jlo, jhi) = p.degree_span(0).unwrap_or((0, 0));
        let (klo, khi) = p.degree_span(1).unwrap_or((0, 0));
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); (jhi - jlo + 1) as usize]; (khi - klo + 1) as usize];
        for (e, c) in p.terms() {
            coeffs[(e.get(1) - klo) as usize][(e.get(0) - jlo) as usize] = c.value;
        }
        Slices { coeffs }
    }

    fn at(&self, x: Complex64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|row| row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a))
            .collect()
    }

    fn log_mahler_at(&self, t: f64) -> f64 {
        let v = fast_log_mahler(&self.at(Complex64::from_polar(1.0, std::f64::consts::TAU * t)));
        if v.is_finite() {
            v
        } else {
            // a torus zero of a factor in the outer variable alone: step off it
            fast_log_mahler(&self.at(Complex64::from_polar(1.0, std::f64::consts::TAU * (t + 1e-9))))
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    kronrod: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; ties broken by position for determinism
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Panel { a, b, kronrod: k * h, error: ((k - g) * h).abs() }
}

/// Globally adaptive G7/K15 on `[0, 1]`, doubling the panel budget each round
/// until two successive estimates agree to `tolerance`.
pub(crate) fn adaptive_integral(f: impl Fn(f64) -> f64, cfg: &QuadratureConfig) -> (f64, f64, bool) {
    let p0 = (cfg.nodes / 15).max(1);
    let mut heap: BinaryHeap<Panel> =
        (0..p0).map(|i| gauss_kronrod(&f, i as f64 / p0 as f64, (i + 1) as f64 / p0 as f64)).collect();
    let total = |heap: &BinaryHeap<Panel>| {
        let mut v: Vec<Panel> = heap.iter().copied().collect();
        v.sort_by(|x, y| x.a.total_cmp(&y.a));
        compensated_sum(v.iter().map(|p| p.kronrod))
    };
    let mut prev = total(&heap);
    let mut diff = f64::INFINITY;
    for round in 1..=cfg.depth {
        let budget = p0 << round;
        while heap.len() < budget {
            let worst = heap.pop().expect("nonempty");
            let mid = 0.5 * (worst.a + worst.b);
            heap.push(gauss_kronrod(&f, worst.a, mid));
            heap.push(gauss_kronrod(&f, mid, worst.b));
        }
        let est = total(&heap);
        diff = (est - prev).abs();
        prev = est;
        if diff < cfg.tolerance {
            return (est, diff, true);
        }
    }
    (prev, diff, false)
}

/// `log M` of a bivariate polynomial: adaptive quadrature over the first
/// variable of Jensen's formula in the second.
///
/// Repeated factors are split off exactly first, since double-precision roots
/// of multiplicity `m` are only accurate to about `eps^(1/m)`.
pub fn mahler_2d(p: &IntLaurentPoly, cfg: &QuadratureConfig) -> Result<MahlerValue, EntropyError> {
    cfg.validate()?;
    if p.arity() != 2 {
        return Err(EntropyError::Arity { expected: 2, found: p.arity() });
    }
    if p.is_zero() {
        return Err(EntropyError::ZeroPolynomial);
    }
    let (content, factors) = bivariate_square_free(p)?;
    let mut acc = mahler_1d_jensen(&content.map_exponents(1, |e| Exponent::new(&[e.get(0)])))?;
    let mut values = vec![acc.value];
    for (f, mult) in &factors {
        let v = mahler_2d_cx(&f.to_cx(), cfg)?;
        let m = *mult as f64;
        values.push(m * v.value);
        acc.error += m * v.error;
        acc.heuristic |= v.heuristic;
        acc.converged &= v.converged;
    }
    acc.value = compensated_sum(values);
    Ok(acc)
}

pub fn mahler_2d_cx(p: &CxLaurentPoly, cfg: &QuadratureConfig) -> Result<MahlerValue, EntropyError> {
    cfg.validate()?;
    if p.arity() != 2 {
        return Err(EntropyError::Arity { expected: 2, found: p.arity() });
    }
    if p.is_zero() {
        return Err(EntropyError::ZeroPolynomial);
    }
    let slices = Slices::new(p);
    if slices.coeffs[0].len() == 1 {
        // no dependence on the outer variable
        let v = slices.log_mahler_at(0.0);
        return Ok(MahlerValue { value: v, error: 1e-13 * v.abs().max(1.0), heuristic: true, converged: true });
    }
    let (value, diff, converged) = adaptive_integral(|t| slices.log_mahler_at(t), cfg);
    Ok(MahlerValue {
        value,
        error: diff + 1e-12 * value.abs().max(1.0),
        heuristic: true,
        converged,
    })
}

/// Plain midpoint Riemann sum of `log|p|` on a `resolution x resolution` torus
/// grid, skipping nodes where `|p| < 1e-14`.
pub fn direct_double_integral_oracle(p: &IntLaurentPoly, resolution: usize) -> f64 {
    let cx = p.to_cx();
    assert!(cx.arity() == 2, "bivariate input expected");
    if cx.is_zero() || resolution == 0 {
        return f64::NEG_INFINITY;
    }
    let slices = Slices::new(&cx);
    let n = resolution;
    let ys: Vec<Complex64> =
        (0..n).map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * (j as f64 + 0.5) / n as f64)).collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = Complex64::from_polar(1.0, std::f64::consts::TAU * (i as f64 + 0.5) / n as f64);
            let c = slices.at(x);
            compensated_sum(ys.iter().filter_map(|&y| {
                let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * y + a).norm();
                (v >= 1e-14).then(|| v.ln())
            }))
        })
        .collect();
    compensated_sum(rows) / (n * n) as f64
}

/// Midpoint Riemann sum of `log|p|` on the unit circle (univariate).
pub fn direct_circle_oracle(p: &IntLaurentPoly, resolution: usize) -> f64 {
    let cx = p.to_cx();
    let n = resolution;
    compensated_sum((0..n).filter_map(|j| {
        let x = Complex64::from_polar(1.0, std::f64::consts::TAU * (j as f64 + 0.5) / n as f64);
        let v = cx.eval(&[x]).norm();
        (v >= 1e-14).then(|| v.ln())
    })) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_poly;

    #[test]
    fn jensen_examples() {
        let g = parse_poly("u3^2 + 2*u3 + 10", 1).unwrap();
        let v = mahler_1d_jensen(&g).unwrap();
        assert!((v.value - 10f64.ln()).abs() < 1e-14 && v.error < 1e-10);
        let v = mahler_1d_jensen(&parse_poly("u3 - 2", 1).unwrap()).unwrap();
        assert!((v.value - 2f64.ln()).abs() < 1e-15);
        let v = mahler_1d_jensen(&parse_poly("2u1 - 1", 1).unwrap()).unwrap();
        assert!((v.value - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(mahler_1d_jensen(&IntLaurentPoly::zero(1)), Err(EntropyError::ZeroPolynomial)));
    }

    #[test]
    fn trinomial() {
        let f = parse_poly("1 + u1 + u2", 2).unwrap();
        let v = mahler_2d(&f, &QuadratureConfig::default()).unwrap();
        // 3√3/(4π) L(χ_{-3}, 2)
        assert!((v.value - 0.323_065_947_219_757_3).abs() < 1e-7, "{v:?}");
        assert!(v.converged && v.heuristic);
    }

    #[test]
    fn tilted_relation_is_log_ten() {
        let p = parse_poly("(1 + u1)^2 + 10*u2^2 - 2*u1*u2 - 2*u2", 2).unwrap();
        let v = mahler_2d(&p, &QuadratureConfig::default()).unwrap();
        assert!((v.value - 10f64.ln()).abs() < 1e-7, "{v:?}");
    }

    #[test]
    fn monomials_and_constants() {
        let cfg = QuadratureConfig::default();
        assert!(mahler_2d(&parse_poly("u1*u2", 2).unwrap(), &cfg).unwrap().value.abs() < 1e-15);
        let v = mahler_2d(&parse_poly("7u2^3", 2).unwrap(), &cfg).unwrap();
        assert!((v.value - 7f64.ln()).abs() < 1e-14);
        assert!(matches!(mahler_2d(&IntLaurentPoly::zero(2), &cfg), Err(EntropyError::ZeroPolynomial)));
    }

    #[test]
    fn outer_factor_with_torus_zero() {
        // (1 + u1)(2 + u2): log M = log 2
        let p = parse_poly("(1 + u1)*(2 + u2)", 2).unwrap();
        let v = mahler_2d(&p, &QuadratureConfig { tolerance: 1e-6, ..Default::default() }).unwrap();
        assert!((v.value - 2f64.ln()).abs() < 1e-5, "{v:?}");
    }

    #[test]
    fn riemann_oracle_is_rough_but_close() {
        let f = parse_poly("1 + u1 + u2", 2).unwrap();
        assert!((direct_double_integral_oracle(&f, 512) - 0.3230659).abs() < 2e-3);
        assert_eq!(direct_double_integral_oracle(&parse_poly("u1", 2).unwrap(), 16), 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig { nodes: 8, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig { tolerance: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn compensated() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
