//! Integer relations of sub-actions: the norm of `f` over the characters of a
//! planar lattice, and the product of its twists by the roots of `g`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::exact::{modular_norm_product, twisted_product_by_companion, MAX_EXACT_G_DEGREE};
use super::EntropyError;
use crate::laurent::{
    refine_root_dd, univariate_roots, Ball, BallScalar, DdBall, Exponent, IntLaurentPoly, RootConfig,
};
use crate::lattice::{dual_torsion_points, PlanarLattice, TorsionPoint};

/// Largest accepted distance of a computed coefficient from its integer.
pub const ROUNDING_RESIDUAL: f64 = 1e-6;
const SPOT_CHECKS: usize = 8;
const SPOT_SEED: u64 = 0x5107_c4ec;

type Sparse<T> = BTreeMap<Exponent, T>;

fn sparse_product<T: BallScalar>(factors: &[Sparse<T>]) -> Sparse<T> {
    let mut acc: Sparse<T> = BTreeMap::from([(Exponent::ZERO, T::one())]);
    for f in factors {
        let mut next: Sparse<T> = BTreeMap::new();
        for (e1, c1) in &acc {
            for (e2, c2) in f {
                let e = *e1 + *e2;
                let term = *c1 * *c2;
                next.entry(e).and_modify(|c| *c = *c + term).or_insert(term);
            }
        }
        acc = next;
    }
    acc
}

/// Rounds every coefficient; returns the polynomial and the worst distance.
fn round_terms<T: BallScalar>(terms: &Sparse<T>, arity: usize) -> (IntLaurentPoly, f64) {
    let mut worst: f64 = 0.0;
    let p = IntLaurentPoly::from_terms(
        arity,
        terms.iter().map(|(e, c)| {
            let (n, dist) = c.nearest_integer();
            worst = worst.max(dist);
            (*e, n)
        }),
    );
    (p, worst)
}

/// Runs the product in double precision, then once more in double-double if
/// any coefficient is not clearly an integer.
fn rounded_product(
    stage: &'static str,
    arity: usize,
    fast: impl FnOnce() -> Sparse<Ball>,
    escalated: impl FnOnce() -> Sparse<DdBall>,
) -> Result<IntLaurentPoly, EntropyError> {
    let (p, residual) = round_terms(&fast(), arity);
    if residual < ROUNDING_RESIDUAL {
        return Ok(p);
    }
    let (p, residual) = round_terms(&escalated(), arity);
    if residual < ROUNDING_RESIDUAL {
        return Ok(p);
    }
    Err(EntropyError::Rounding { stage, residual })
}

fn coefficient_scale(p: &IntLaurentPoly) -> f64 {
    p.terms().map(|(_, c)| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum()
}

fn twisted_f<T: BallScalar>(f: &IntLaurentPoly, w: &TorsionPoint) -> Sparse<T> {
    f.terms()
        .map(|(e, c)| {
            let k = w.num[0] * e.get(0) + w.num[1] * e.get(1);
            (*e, T::from_bigint(c) * T::root_of_unity(k, w.den))
        })
        .collect()
}

/// `F̄(w) = ∏_ω f(ω1 u1, ω2 u2)` over the characters `ω` of `Z^2 / L`,
/// rewritten in the coordinates `w_j = u^{b_j}` of the rows `b_j` of `L`.
pub fn norm_product(f: &IntLaurentPoly, lattice: &PlanarLattice) -> Result<IntLaurentPoly, EntropyError> {
    if f.arity() != 2 {
        return Err(EntropyError::Arity { expected: 2, found: f.arity() });
    }
    if f.is_zero() {
        return Err(EntropyError::ZeroPolynomial);
    }
    let chars = dual_torsion_points(lattice);
    let product = match rounded_product(
        "norm product",
        2,
        || sparse_product(&chars.iter().map(|w| twisted_f::<Ball>(f, w)).collect::<Vec<_>>()),
        || sparse_product(&chars.iter().map(|w| twisted_f::<DdBall>(f, w)).collect::<Vec<_>>()),
    ) {
        Err(e @ EntropyError::Rounding { .. }) => modular_norm_product(f, &chars).ok_or(e)?,
        other => other?,
    };
    let fbar = product.reexpress_on_lattice(lattice.rows())?;
    let rows = lattice.rows();
    let omegas: Vec<[Complex64; 2]> = chars.iter().map(TorsionPoint::omega).collect();
    spot_check("norm product", &fbar, |x, y| {
        let direct = omegas.iter().map(|o| f.eval(&[o[0] * x, o[1] * y])).product();
        let w1 = x.powi(rows[0][0] as i32) * y.powi(rows[0][1] as i32);
        let w2 = x.powi(rows[1][0] as i32) * y.powi(rows[1][1] as i32);
        (direct, [w1, w2])
    })?;
    Ok(fbar)
}

/// `F(w1, w3)`: primitive integer form of `∏_ζ F̄(w1, w3 ζ^k)` over the roots
/// `ζ` of `g` with multiplicity, where `k` is `twist_exponent`.
///
/// Each factor is first multiplied by `ζ^{-s}`, `s` the least exponent of `ζ`
/// it contains, which makes the product integral for monic `g`; the constant
/// this removes is `±g(0)^s`, a pure content change.
pub fn g_twisted_relation(
    fbar: &IntLaurentPoly,
    g: &IntLaurentPoly,
    twist_exponent: i64,
) -> Result<IntLaurentPoly, EntropyError> {
    if fbar.arity() != 2 {
        return Err(EntropyError::Arity { expected: 2, found: fbar.arity() });
    }
    if g.arity() != 1 {
        return Err(EntropyError::Arity { expected: 1, found: g.arity() });
    }
    if fbar.is_zero() || g.is_zero() {
        return Err(EntropyError::ZeroPolynomial);
    }
    let k = twist_exponent;
    let (lo, hi) = fbar.degree_span(1).expect("nonzero");
    let s = (k * lo).min(k * hi);
    let (_, mut coeffs) = g.univariate_coefficients()?;
    let degree = coeffs.len() - 1;
    if (1..=MAX_EXACT_G_DEGREE).contains(&degree) && coeffs[degree].abs().is_one() {
        if coeffs[degree].is_negative() {
            coeffs.iter_mut().for_each(|c| *c = -&*c);
        }
        return Ok(twisted_product_by_companion(fbar, &coeffs, k, s).canonical_relation());
    }
    let roots = univariate_roots(g, &RootConfig::default())?;
    let mut dd_roots = Vec::with_capacity(roots.degree());
    for r in &roots.roots {
        let (z, step) = refine_root_dd(g, r.value)?;
        dd_roots.push(DdBall::new(z, (4.0 * step).max(1e-30 * z.norm())));
    }
    let build_ball = || -> Sparse<Ball> {
        let factors: Vec<Sparse<Ball>> = roots
            .roots
            .iter()
            .map(|r| {
                let z = Ball::new(r.value, r.radius);
                fbar.terms()
                    .map(|(e, c)| {
                        let zp = z.powi(k * e.get(1) - s).expect("non-negative power");
                        (*e, Ball::from_bigint(c) * zp)
                    })
                    .collect()
            })
            .collect();
        sparse_product(&factors)
    };
    let build_dd = || -> Sparse<DdBall> {
        let factors: Vec<Sparse<DdBall>> = dd_roots
            .iter()
            .map(|&z| {
                fbar.terms()
                    .map(|(e, c)| {
                        let zp = z.powi(k * e.get(1) - s).expect("non-negative power");
                        (*e, DdBall::from_bigint(c) * zp)
                    })
                    .collect()
            })
            .collect();
        sparse_product(&factors)
    };
    let product = rounded_product("g-twisted relation", 2, build_ball, build_dd)?;
    let zetas: Vec<Complex64> = dd_roots.iter().map(|z| z.value.to_c64()).collect();
    spot_check("g-twisted relation", &product, |x, y| {
        let direct = zetas
            .iter()
            .map(|&z| z.powi((-s) as i32) * fbar.eval(&[x, y * z.powi(k as i32)]))
            .product();
        (direct, [x, y])
    })?;
    Ok(product.canonical_relation())
}

fn spot_check(
    stage: &'static str,
    result: &IntLaurentPoly,
    direct: impl Fn(Complex64, Complex64) -> (Complex64, [Complex64; 2]),
) -> Result<(), EntropyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED);
    let scale = coefficient_scale(result);
    for _ in 0..SPOT_CHECKS {
        let s: f64 = rng.gen();
        let t: f64 = rng.gen();
        let x = Complex64::from_polar(1.0, std::f64::consts::TAU * s);
        let y = Complex64::from_polar(1.0, std::f64::consts::TAU * t);
        let (expected, at) = direct(x, y);
        let deviation = (result.eval(&at) - expected).norm();
        let allowed = ROUNDING_RESIDUAL * expected.norm().max(1.0) + 64.0 * f64::EPSILON * scale;
        if !(deviation <= allowed) {
            return Err(EntropyError::SpotCheck { stage, deviation });
        }
    }
    Ok(())
}
