//! Membership in the class ET, mixing certificates on the variety, and the
//! structural entropy facts for sub-actions.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::{generic_relation, mahler_1d_jensen, mahler_2d, EntropyError, MahlerValue, QuadratureConfig};
use crate::laurent::dd::DdComplex;
use crate::laurent::{
    isolate_roots, newton_polygon, parse_poly, univariate_gcd, univariate_roots, Ball, BallScalar, DdBall, Exponent,
    IntLaurentPoly, LaurentError, RootConfig, RootSet, Twist,
};
use crate::lattice::{classify_lattice, LatticeCase, SublatticeBasis, Vec3};

/// Default cutoff below which a Mahler measure counts as zero.
pub const DEFAULT_CPE_DELTA: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot decide whether the root {root} (radius {radius:e}) lies outside the unit disk")]
    Undecided { root: Complex64, radius: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// The module `Z[u1^±, u2^±, u3^±] / <f, g>`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemPresentation {
    pub name: String,
    pub f: IntLaurentPoly,
    pub g: IntLaurentPoly,
}

impl SystemPresentation {
    pub fn new(name: impl Into<String>, f: IntLaurentPoly, g: IntLaurentPoly) -> Result<Self, ClassifyError> {
        if f.arity() != 2 {
            return Err(ClassifyError::Invalid(format!("f must have two variables, has {}", f.arity())));
        }
        if g.arity() != 1 {
            return Err(ClassifyError::Invalid(format!("g must have one variable, has {}", g.arity())));
        }
        if f.is_zero() {
            return Err(ClassifyError::Invalid("f is zero".into()));
        }
        if g.is_zero() {
            return Err(ClassifyError::Invalid("g is zero".into()));
        }
        if g.has_negative_exponents() {
            return Err(ClassifyError::Invalid("g must be an ordinary polynomial".into()));
        }
        Ok(SystemPresentation { name: name.into(), f, g })
    }

    /// `f` in `u1, u2`; `g` in a single variable, usually written `u3`.
    pub fn parse(name: impl Into<String>, f: &str, g: &str) -> Result<Self, ClassifyError> {
        Self::new(name, parse_poly(f, 2)?, parse_poly(g, 1)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtReport {
    pub is_expanding: bool,
    /// `min |z| - 1` over the roots of `g`, pessimistic in the root radii.
    pub margin: f64,
    pub is_triangular: bool,
    /// Corner size of the triangle, 0 when `f` is not triangular.
    pub a: i64,
    pub is_et: bool,
    pub diagnostics: Vec<String>,
}

fn leading_coefficient(g: &IntLaurentPoly) -> BigInt {
    g.terms().last().map(|(_, c)| c.clone()).unwrap_or_default()
}

/// `u^d g(1/u)`.
fn reciprocal(g: &IntLaurentPoly) -> IntLaurentPoly {
    let (_, hi) = g.degree_span(0).unwrap_or((0, 0));
    g.map_exponents(1, |e| Exponent::new(&[hi - e.get(0)]))
}

/// Whether `g` is monic with every root certified outside the closed unit
/// disk, and `min(|z| - r) - 1`.
pub fn is_expanding(g: &IntLaurentPoly) -> Result<(bool, f64), ClassifyError> {
    if g.arity() != 1 {
        return Err(ClassifyError::Invalid(format!("g must have one variable, has {}", g.arity())));
    }
    if g.is_zero() {
        return Err(ClassifyError::Invalid("g is zero".into()));
    }
    let monic = leading_coefficient(g).is_one();
    let (shift, _) = g.univariate_coefficients()?;
    let roots = univariate_roots(g, &RootConfig::default())?;
    let margin = roots.roots.iter().map(|r| r.value.norm() - r.radius).fold(f64::INFINITY, f64::min) - 1.0;
    // a factor u^k contributes the root 0
    let margin = if shift > 0 { -1.0 } else { margin };
    let mut outside = shift == 0;
    let mut on_circle: Option<RootSet> = None;
    for r in &roots.roots {
        let m = r.value.norm();
        if m - r.radius > 1.0 {
            continue;
        }
        outside = false;
        if m + r.radius < 1.0 {
            continue;
        }
        // the disk meets the unit circle: roots on it are shared with the reciprocal
        if on_circle.is_none() {
            let h = univariate_gcd(g, &reciprocal(g))?;
            on_circle = Some(if h.is_constant() {
                RootSet { roots: vec![], monomial_shift: 0, leading: Complex64::new(1.0, 0.0) }
            } else {
                univariate_roots(&h, &RootConfig::default())?
            });
        }
        let hr = on_circle.as_ref().expect("just set");
        let matched = hr.roots.iter().find(|q| (q.value - r.value).norm() <= q.radius + r.radius);
        let decided = matched.is_some_and(|q| {
            let gap = 3.0 * (q.radius + r.radius).max(1e-9);
            hr.roots.iter().all(|o| (o.value - q.value).norm() < 1e-9 || (o.value - q.value).norm() > gap)
        });
        if !decided {
            return Err(ClassifyError::Undecided { root: r.value, radius: r.radius });
        }
    }
    Ok((monic && outside, margin))
}

/// Whether the Newton polygon of `f` is the triangle with corners `(0,0)`,
/// `(a,0)`, `(0,a)` and the corner coefficients are `±1`.
pub fn is_triangular(f: &IntLaurentPoly) -> (bool, i64) {
    let Ok(hull) = newton_polygon(f) else {
        return (false, 0);
    };
    let v = hull.vertices();
    if v.len() != 3 || v[0] != [0, 0] || v[1][1] != 0 || v[1][0] <= 0 || v[2] != [0, v[1][0]] {
        return (false, 0);
    }
    let a = v[1][0];
    let unit = |e: [i64; 2]| f.coeff(&Exponent::new(&e)).abs().is_one();
    if v.iter().all(|&e| unit(e)) {
        (true, a)
    } else {
        (false, 0)
    }
}

pub fn is_et(system: &SystemPresentation) -> Result<EtReport, ClassifyError> {
    let (is_expanding, margin) = is_expanding(&system.g)?;
    let (is_triangular, a) = is_triangular(&system.f);
    let mut diagnostics = Vec::new();
    if !leading_coefficient(&system.g).is_one() {
        diagnostics.push(format!("g = {} is not monic", system.g.format_named(&["u3"])));
    }
    if margin <= 0.0 {
        diagnostics.push(format!("g has a root with |z| <= 1 (margin {margin:.6})"));
    }
    if !is_triangular {
        diagnostics.push(format!("f = {} does not have a triangular Newton polygon with unit corners", system.f));
    }
    Ok(EtReport { is_expanding, margin, is_triangular, a, is_et: is_expanding && is_triangular, diagnostics })
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Eisenstein's criterion at the prime `p`.
pub fn eisenstein(g: &IntLaurentPoly, p: u64) -> Result<bool, ClassifyError> {
    if !is_prime(p) {
        return Err(ClassifyError::NotPrime(p));
    }
    if g.arity() != 1 || g.is_zero() || g.has_negative_exponents() {
        return Err(ClassifyError::Invalid("g must be a nonzero ordinary polynomial in one variable".into()));
    }
    let p = BigInt::from(p);
    let divides = |c: &BigInt| (c % &p).is_zero();
    let lead = leading_coefficient(g);
    let (_, hi) = g.degree_span(0).expect("nonzero");
    if hi == 0 {
        return Ok(false);
    }
    let constant = g.coeff(&Exponent::ZERO);
    Ok(!divides(&lead)
        && g.terms().filter(|(e, _)| e.get(0) < hi).all(|(_, c)| divides(c))
        && divides(&constant)
        && !(&constant % (&p * &p)).is_zero())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingConfig {
    pub radii: Vec<f64>,
    pub nodes: usize,
    /// Relative root radius requested for the second coordinate.
    pub root_radius: f64,
}

impl Default for MixingConfig {
    fn default() -> Self {
        MixingConfig { radii: vec![1.0, 1.1, 0.9], nodes: 64, root_radius: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixingStatus {
    Certified,
    Inconclusive,
}

/// A point `(x1, x2, ζ)` of the variety with `|x^n - 1|` and its error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub point: [Complex64; 3],
    pub radii: [f64; 3],
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingEntry {
    pub n: Vec3,
    pub status: MixingStatus,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingReport {
    pub bound: i64,
    pub entries: Vec<MixingEntry>,
}

impl MixingReport {
    pub fn all_certified(&self) -> bool {
        self.entries.iter().all(|e| e.status == MixingStatus::Certified)
    }

    pub fn certified(&self) -> usize {
        self.entries.iter().filter(|e| e.status == MixingStatus::Certified).count()
    }
}

/// Preferred witness margin; below it the best point found is kept.
const WITNESS_MARGIN: f64 = 1e-3;

fn variety_points(system: &SystemPresentation, cfg: &MixingConfig) -> Result<Vec<[Ball; 3]>, ClassifyError> {
    let zetas = univariate_roots(&system.g, &RootConfig::default())?;
    let mut points = Vec::new();
    for &rho in &cfg.radii {
        for j in 0..cfg.nodes {
            let x1 = Ball::real(rho) * Ball::root_of_unity(j as i64, cfg.nodes as i64);
            let Ok(slice) = system.f.twist_and_specialize(&[Twist::Specialize(x1), Twist::Keep]) else {
                continue;
            };
            let root_cfg = RootConfig { radius: cfg.root_radius, ..RootConfig::default() };
            let Ok(x2s) = isolate_roots(&slice, &root_cfg) else {
                continue;
            };
            for x2 in &x2s.roots {
                for z in &zetas.roots {
                    points.push([x1, Ball::new(x2.value, x2.radius), Ball::new(z.value, z.radius)]);
                }
            }
        }
    }
    Ok(points)
}

fn monomial_minus_one<T: BallScalar>(point: &[T; 3], n: Vec3) -> Option<T> {
    let mut v = T::one();
    for (x, &k) in point.iter().zip(&n) {
        v = v * x.powi(k)?;
    }
    Some(v - T::one())
}

fn witness_at(point: &[Ball; 3], n: Vec3) -> Option<Witness> {
    let v = monomial_minus_one(point, n)?;
    Some(Witness {
        point: point.map(|b| b.value),
        radii: point.map(|b| b.radius),
        value: v.value.norm(),
        error: v.radius,
    })
}

/// Re-evaluates the witness in double-double arithmetic.
fn recheck(w: &Witness, n: Vec3) -> bool {
    let point: [DdBall; 3] = std::array::from_fn(|i| DdBall::new(DdComplex::from_c64(w.point[i]), w.radii[i]));
    monomial_minus_one(&point, n).is_some_and(|v| v.abs_lower() > 0.0)
}

fn certify(points: &[[Ball; 3]], n: Vec3) -> MixingEntry {
    let mut best: Option<Witness> = None;
    for p in points {
        let Some(w) = witness_at(p, n) else { continue };
        let lower = w.value - w.error;
        if lower > WITNESS_MARGIN {
            best = Some(w);
            break;
        }
        if best.is_none_or(|b| lower > b.value - b.error) {
            best = Some(w);
        }
    }
    let status = match &best {
        Some(w) if w.value - w.error > 0.0 && recheck(w, n) => MixingStatus::Certified,
        _ => MixingStatus::Inconclusive,
    };
    MixingEntry { n, status, witness: best }
}

/// Certifies `u^n - 1 ∉ <f, g>` for every nonzero `n` with `|n_i| <= bound`
/// by exhibiting a variety point where `u^n ≠ 1`.
pub fn mixing_sweep(
    system: &SystemPresentation,
    bound: i64,
    cfg: &MixingConfig,
) -> Result<MixingReport, ClassifyError> {
    if bound < 0 {
        return Err(ClassifyError::Invalid(format!("negative box bound {bound}")));
    }
    let points = variety_points(system, cfg)?;
    let exps: Vec<Vec3> = (-bound..=bound)
        .flat_map(|a| (-bound..=bound).flat_map(move |b| (-bound..=bound).map(move |c| [a, b, c])))
        .filter(|n| *n != [0, 0, 0])
        .collect();
    let entries = exps.par_iter().map(|&n| certify(&points, n)).collect();
    Ok(MixingReport { bound, entries })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroEntropyReport {
    pub zero_entropy: bool,
    pub reason: String,
}

/// The full action has zero entropy: `<f, g>` needs two independent
/// nonconstant generators, so its associated primes are not principal.
pub fn zero_entropy_report(system: &SystemPresentation) -> Result<ZeroEntropyReport, ClassifyError> {
    let f_nonconstant = system.f.depends_on(0) || system.f.depends_on(1);
    if !f_nonconstant {
        return Err(ClassifyError::Precondition("f is constant in (u1, u2)".into()));
    }
    if !system.g.depends_on(0) {
        return Err(ClassifyError::Precondition("g is constant in u3".into()));
    }
    Ok(ZeroEntropyReport {
        zero_entropy: true,
        reason: format!(
            "two independent nonconstant relations: f = {} in (u1, u2) and g = {} in u3",
            system.f,
            system.g.format_named(&["u3"])
        ),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpeSource {
    /// The relation polynomial of a generic sublattice.
    Relation,
    G,
    F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpeEvidence {
    pub cpe: bool,
    pub source: CpeSource,
    pub value: MahlerValue,
}

/// Completely positive entropy of the sub-action on `lattice`, read off from
/// whether the governing Mahler measure is positive.
pub fn is_cpe_sublattice(
    system: &SystemPresentation,
    lattice: &SublatticeBasis,
    cfg: &QuadratureConfig,
    delta: f64,
) -> Result<CpeEvidence, ClassifyError> {
    let (source, value) = match classify_lattice(lattice) {
        LatticeCase::Generic { n, m } => (CpeSource::Relation, mahler_2d(&generic_relation(system, n, m)?, cfg)?),
        LatticeCase::AxisDegenerate { .. } => (CpeSource::G, mahler_1d_jensen(&system.g)?),
        LatticeCase::Planar => (CpeSource::F, mahler_2d(&system.f, cfg)?),
    };
    Ok(CpeEvidence { cpe: value.value > delta, source, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> IntLaurentPoly {
        parse_poly(text, 1).unwrap()
    }

    fn f(text: &str) -> IntLaurentPoly {
        parse_poly(text, 2).unwrap()
    }

    #[test]
    fn expanding_examples() {
        let (ok, margin) = is_expanding(&g("u3 - 2")).unwrap();
        assert!(ok && (margin - 1.0).abs() < 1e-12);
        let (ok, margin) = is_expanding(&g("u3^2 + 2*u3 + 10")).unwrap();
        assert!(ok && (margin - (10f64.sqrt() - 1.0)).abs() < 1e-11);
        assert!(!is_expanding(&g("u3 + 1")).unwrap().0);
        assert!(!is_expanding(&g("u3^2 + 1")).unwrap().0);
        assert!(!is_expanding(&g("u3^2 - u3 + 1")).unwrap().0);
        assert!(!is_expanding(&g("2*u3 - 1")).unwrap().0);
        // monic with a root inside the disk
        assert!(!is_expanding(&g("u3^2 - 3*u3 + 1")).unwrap().0);
        assert!(!is_expanding(&g("u3^2 - 2*u3")).unwrap().0);
    }

    #[test]
    fn triangular_examples() {
        assert_eq!(is_triangular(&f("1 + u1 + u2")), (true, 1));
        assert_eq!(is_triangular(&f("1 + u1^2 + u2^2")), (true, 2));
        assert_eq!(is_triangular(&f("1 - u1^2 + 5*u1*u2 - u2^2")), (true, 2));
        assert_eq!(is_triangular(&f("1 + u1 + u1*u2")).0, false);
        assert_eq!(is_triangular(&f("1 + 2*u1 + u2")).0, false);
        assert_eq!(is_triangular(&f("u1 + u1^2 + u1*u2")).0, false);
    }

    #[test]
    fn et_reports() {
        let helmet = SystemPresentation::parse("helmet", "1 + u1 + u2", "u3 - 2").unwrap();
        let r = is_et(&helmet).unwrap();
        assert!(r.is_et && r.a == 1 && r.diagnostics.is_empty());
        let bad = SystemPresentation::parse("bad", "1 + u1 + u2", "2*u3 - 1").unwrap();
        let r = is_et(&bad).unwrap();
        assert!(!r.is_et);
        assert_eq!(r.diagnostics.len(), 2);
    }

    #[test]
    fn presentation_validation() {
        assert!(SystemPresentation::parse("x", "1 + u1 + u2", "u3^-1 + 2").is_err());
        assert!(SystemPresentation::parse("x", "0", "u3 - 2").is_err());
        let s = SystemPresentation::parse("x", "1 + u1 + u2", "u1 - 2").unwrap();
        assert_eq!(s.g, g("u3 - 2"));
    }

    #[test]
    fn eisenstein_examples() {
        assert!(eisenstein(&g("u3^2 + 2*u3 + 10"), 2).unwrap());
        assert!(eisenstein(&g("u3^2 + 4*u3 + 10"), 2).unwrap());
        assert!(!eisenstein(&g("u3^2 - 1"), 2).unwrap());
        assert!(!eisenstein(&g("u3^2 + 2*u3 + 4"), 2).unwrap());
        assert_eq!(eisenstein(&g("u3^2 + 2*u3 + 10"), 4), Err(ClassifyError::NotPrime(4)));
    }

    #[test]
    fn paper_witnesses_certify() {
        let s = SystemPresentation::parse("P1", "1 + u1 + u2", "u3 - 2").unwrap();
        let pts = variety_points(&s, &MixingConfig::default()).unwrap();
        // (1, -2, 2) is the first sample
        assert!((pts[0][1].value - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        for n in [[0, 0, 1], [1, -1, 0]] {
            assert_eq!(certify(&pts, n).status, MixingStatus::Certified);
        }
    }

    #[test]
    fn unreachable_margin_is_inconclusive() {
        // on the variety of u1 - 1, u3 - 1 every point gives u1 u3 = 1
        let pts = vec![[Ball::real(1.0), Ball::real(0.5), Ball::real(1.0)]];
        assert_eq!(certify(&pts, [1, 0, 1]).status, MixingStatus::Inconclusive);
    }

    #[test]
    fn zero_entropy() {
        let s = SystemPresentation::parse("P2", "1 + u1 + u2", "u3 + 2").unwrap();
        assert!(zero_entropy_report(&s).unwrap().zero_entropy);
        let c = SystemPresentation::parse("c", "3", "u3 + 2").unwrap();
        assert!(zero_entropy_report(&c).is_err());
    }

    #[test]
    fn kronecker_cutoff() {
        let cfg = QuadratureConfig::default();
        let cyclo = mahler_2d(&f("u1 * (u2 - 1) * (u2 + 1)"), &cfg).unwrap();
        assert!(cyclo.value.abs() < DEFAULT_CPE_DELTA);
        assert!(mahler_1d_jensen(&g("2*u3 - 1")).unwrap().value > DEFAULT_CPE_DELTA);
    }
}
