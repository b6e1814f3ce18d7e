//! Exact fallbacks for the relation products when floating-point rounding
//! cannot recover the integer coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::laurent::{Exponent, IntLaurentPoly};
use crate::lattice::TorsionPoint;

/// Largest `g` degree handled by cofactor expansion.
pub(super) const MAX_EXACT_G_DEGREE: usize = 8;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for b in BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes `p ≡ 1 (mod d)` below `2^62`, each with a primitive `d`-th root of unity.
struct RootPrimes {
    d: u64,
    next: u64,
    factors: Vec<u64>,
}

impl RootPrimes {
    fn new(d: u64) -> Self {
        let top = (1u64 << 62) - 1;
        RootPrimes { d, next: top - (top - 1) % d, factors: prime_factors(d) }
    }
}

impl Iterator for RootPrimes {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        while self.next > self.d {
            let p = self.next;
            self.next -= self.d;
            if !is_prime(p) {
                continue;
            }
            for a in 2..p {
                let r = pow_mod(a, (p - 1) / self.d, p);
                if self.factors.iter().all(|q| pow_mod(r, self.d / q, p) != 1) {
                    return Some((p, r));
                }
            }
        }
        None
    }
}

fn residue(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// `∏_ω f(ω1 u1, ω2 u2)` over the given characters, by Chinese remaindering
/// over primes that split the characters. The coefficient bound is the
/// product of the `l1` norms of the factors.
pub(super) fn modular_norm_product(f: &IntLaurentPoly, chars: &[TorsionPoint]) -> Option<IntLaurentPoly> {
    let d = chars.iter().fold(1i64, |acc, w| acc.lcm(&w.den)).to_u64()?;
    let l1: BigInt = f.terms().map(|(_, c)| c.abs()).sum();
    let bound = l1.pow(chars.len() as u32) * 2u32 + 1u32;
    let mut modulus = BigInt::one();
    let mut acc: BTreeMap<Exponent, BigInt> = BTreeMap::new();
    for (p, r) in RootPrimes::new(d) {
        let factors: Vec<Vec<(Exponent, u64)>> = chars
            .iter()
            .map(|w| {
                let scale = (d / w.den as u64) as i64;
                f.terms()
                    .map(|(e, c)| {
                        let k = (w.num[0] * e.get(0) + w.num[1] * e.get(1)) * scale;
                        let root = pow_mod(r, k.rem_euclid(d as i64) as u64, p);
                        (*e, mul_mod(residue(c, p), root, p))
                    })
                    .collect()
            })
            .collect();
        let mut prod: BTreeMap<Exponent, u64> = BTreeMap::from([(Exponent::ZERO, 1)]);
        for fac in &factors {
            let mut next: BTreeMap<Exponent, u64> = BTreeMap::new();
            for (e1, c1) in &prod {
                for (e2, c2) in fac {
                    let t = mul_mod(*c1, *c2, p);
                    let slot = next.entry(*e1 + *e2).or_insert(0);
                    *slot = (*slot + t) % p;
                }
            }
            prod = next;
        }
        // Garner step: x ≡ acc (mod modulus), x ≡ prod (mod p)
        let inv = inverse_mod(residue(&modulus, p), p);
        let keys: Vec<Exponent> = acc.keys().chain(prod.keys()).copied().collect();
        for e in keys {
            let old = acc.get(&e).cloned().unwrap_or_default();
            let target = prod.get(&e).copied().unwrap_or(0);
            let delta = (target + p - residue(&old, p)) % p;
            let t = mul_mod(delta, inv, p);
            acc.insert(e, old + &modulus * t);
        }
        modulus *= p;
        if modulus > bound {
            break;
        }
    }
    if modulus <= bound {
        return None;
    }
    let half = &modulus >> 1;
    let terms = acc.into_iter().map(|(e, c)| (e, if c > half { c - &modulus } else { c }));
    Some(IntLaurentPoly::from_terms(2, terms))
}

type Matrix = Vec<Vec<BigInt>>;

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn determinant(m: &[Vec<IntLaurentPoly>]) -> IntLaurentPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = IntLaurentPoly::zero(m[0][0].arity());
    for (j, top) in m[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<IntLaurentPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = top * &determinant(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `∏_ζ ζ^{-s} fbar(w1, w3 ζ^k)` over the roots of the monic `g` with
/// multiplicity, as the determinant of the same expression evaluated at the
/// companion matrix of `g`.
pub(super) fn twisted_product_by_companion(
    fbar: &IntLaurentPoly,
    g_coeffs: &[BigInt],
    k: i64,
    s: i64,
) -> IntLaurentPoly {
    let n = g_coeffs.len() - 1;
    debug_assert!(g_coeffs[n].is_one());
    let mut companion: Matrix = vec![vec![BigInt::zero(); n]; n];
    for i in 1..n {
        companion[i][i - 1] = BigInt::one();
    }
    for (i, row) in companion.iter_mut().enumerate() {
        row[n - 1] = -&g_coeffs[i];
    }
    let mut powers: BTreeMap<i64, Matrix> = BTreeMap::new();
    let identity: Matrix = (0..n).map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect()).collect();
    let mut entries = vec![vec![IntLaurentPoly::zero(2); n]; n];
    for (e, c) in fbar.terms() {
        let power = k * e.get(1) - s;
        let cp = powers.entry(power).or_insert_with(|| {
            let mut acc = identity.clone();
            let mut base = companion.clone();
            let mut q = power;
            while q > 0 {
                if q & 1 == 1 {
                    acc = mat_mul(&acc, &base);
                }
                base = mat_mul(&base, &base);
                q >>= 1;
            }
            acc
        });
        for i in 0..n {
            for j in 0..n {
                if !cp[i][j].is_zero() {
                    entries[i][j] = &entries[i][j] + &IntLaurentPoly::monomial(2, *e, c * &cp[i][j]);
                }
            }
        }
    }
    determinant(&entries)
}
