//! Square-free decomposition of bivariate integer polynomials, viewed as
//! polynomials in `u2` over `Z[u1]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::poly::{Exponent, IntLaurentPoly};
use super::roots::{div_exact, gcd, primitive, sub, trim};
use super::LaurentError;

/// Dense polynomial in `x`, lowest degree first.
type Upoly = Vec<BigInt>;
/// Dense polynomial in `y` with coefficients in `Z[x]`; zero coefficients are
/// empty vectors.
type Bpoly = Vec<Upoly>;

fn u_mul(a: &[BigInt], b: &[BigInt]) -> Upoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn u_content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Full gcd in `Z[x]`, including the integer content, with positive lead.
fn u_gcd(a: &[BigInt], b: &[BigInt]) -> Upoly {
    if a.is_empty() {
        return primitive(b.to_vec()).into_iter().map(|c| c * u_content(b)).collect();
    }
    if b.is_empty() {
        return primitive(a.to_vec()).into_iter().map(|c| c * u_content(a)).collect();
    }
    let c = u_content(a).gcd(&u_content(b));
    gcd(a, b).into_iter().map(|x| x * &c).collect()
}

fn b_trim(mut a: Bpoly) -> Bpoly {
    while a.last().is_some_and(Vec::is_empty) {
        a.pop();
    }
    a
}

fn b_content(a: &[Upoly]) -> Upoly {
    a.iter().fold(Vec::new(), |g, c| u_gcd(&g, c))
}

/// Primitive part over `Z[x]`, with positive leading integer.
fn b_primitive(a: Bpoly) -> Bpoly {
    let a = b_trim(a);
    if a.is_empty() {
        return a;
    }
    let c = b_content(&a);
    let mut out: Bpoly = a.iter().map(|k| if k.is_empty() { Vec::new() } else { div_exact(k, &c) }).collect();
    let lead = out.last().and_then(|l| l.last()).expect("nonzero");
    if lead.is_negative() {
        for k in out.iter_mut() {
            for x in k.iter_mut() {
                *x = -&*x;
            }
        }
    }
    out
}

fn b_derivative(a: &[Upoly]) -> Bpoly {
    b_trim(a.iter().enumerate().skip(1).map(|(k, c)| c.iter().map(|x| x * BigInt::from(k)).collect()).collect())
}

fn b_sub(a: &[Upoly], b: &[Upoly]) -> Bpoly {
    let n = a.len().max(b.len());
    let empty = Vec::new();
    b_trim((0..n).map(|k| sub(a.get(k).unwrap_or(&empty), b.get(k).unwrap_or(&empty))).collect())
}

/// Remainder of `a` by `b` up to a factor in `Z[x]`.
fn b_pseudo_rem(a: &[Upoly], b: &[Upoly]) -> Bpoly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = u_mul(c, lb);
        }
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] = sub(&r[k + shift], &u_mul(&lr, bk));
        }
        r = b_primitive(r);
    }
    r
}

fn b_gcd(a: &[Upoly], b: &[Upoly]) -> Bpoly {
    let mut a = b_primitive(a.to_vec());
    let mut b = b_primitive(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = b_pseudo_rem(&a, &b);
        a = b;
        b = r;
    }
    b_primitive(a)
}

/// Exact quotient; `b` must divide `a` in `Z[x][y]`.
fn b_div_exact(a: &[Upoly], b: &[Upoly]) -> Bpoly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return Vec::new();
    }
    let mut q: Bpoly = vec![Vec::new(); r.len() - db];
    for k in (0..q.len()).rev() {
        let lead = &r[k + db];
        if lead.is_empty() {
            continue;
        }
        let qk = div_exact(lead, &b[db]);
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = sub(&r[k + j], &u_mul(&qk, bj));
        }
        q[k] = qk;
    }
    debug_assert!(r.iter().all(Vec::is_empty), "inexact bivariate division");
    b_trim(q)
}

/// Yun's algorithm over `Z[x]` on a primitive polynomial of positive degree.
fn yun(f: &[Upoly]) -> Vec<(Bpoly, usize)> {
    let df = b_derivative(f);
    let a0 = b_gcd(f, &df);
    let mut b = b_div_exact(f, &a0);
    let c = b_div_exact(&df, &a0);
    let mut d = b_sub(&c, &b_derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = b_gcd(&b, &d);
        let nb = b_div_exact(&b, &a);
        let c = b_div_exact(&d, &a);
        if a.len() > 1 {
            out.push((a, i));
        }
        d = b_sub(&c, &b_derivative(&nb));
        b = nb;
        i += 1;
    }
    out
}

fn to_dense(p: &IntLaurentPoly) -> Bpoly {
    let (_, q) = p.monomial_normalized();
    let dy = q.degree_span(1).map_or(0, |(_, hi)| hi) as usize;
    let dx = q.degree_span(0).map_or(0, |(_, hi)| hi) as usize;
    let mut out = vec![vec![BigInt::zero(); dx + 1]; dy + 1];
    for (e, c) in q.terms() {
        out[e.get(1) as usize][e.get(0) as usize] = c.clone();
    }
    b_trim(out.into_iter().map(trim).collect())
}

fn from_dense(a: &[Upoly]) -> IntLaurentPoly {
    IntLaurentPoly::from_terms(
        2,
        a.iter().enumerate().flat_map(|(j, c)| {
            c.iter().enumerate().map(move |(i, x)| (Exponent::new(&[i as i64, j as i64]), x.clone()))
        }),
    )
}

const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a, MODULUS - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    r
}

fn reduce(c: &BigInt) -> u64 {
    c.mod_floor(&BigInt::from(MODULUS)).try_into().expect("reduced")
}

/// Degree of `gcd(a, b)` over `F_p`, both nonzero with leading terms last.
fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let strip = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    strip(&mut a);
    strip(&mut b);
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonzero"));
        while a.len() >= b.len() {
            let q = mul_mod(*a.last().expect("nonzero"), inv);
            let shift = a.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                a[k + shift] = (a[k + shift] + MODULUS - mul_mod(q, bk)) % MODULUS;
            }
            strip(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Cheap certificate that a primitive `f` of positive `y`-degree is
/// square-free: a specialization `x = x0` modulo a prime that keeps the
/// leading coefficient and has no repeated root. `false` means "unknown".
fn certainly_square_free(f: &[Upoly]) -> bool {
    let lead = f.last().expect("nonzero");
    for x0 in [3u64, 5, 7, 11, 13] {
        let at = |c: &Upoly| c.iter().rev().fold(0u64, |acc, k| (mul_mod(acc, x0) + reduce(k)) % MODULUS);
        if at(lead) == 0 {
            continue;
        }
        let values: Vec<u64> = f.iter().map(at).collect();
        let derivative: Vec<u64> = values.iter().enumerate().skip(1).map(|(k, &v)| mul_mod(v, k as u64)).collect();
        return gcd_degree_mod(values, derivative) == 0;
    }
    false
}

/// Writes `p` as a monomial times `c(u1) * prod_i f_i^i`, the `f_i` square-free,
/// pairwise coprime and of positive degree in `u2`. Returns `c` and the
/// `(f_i, i)`; the monomial is dropped.
pub fn bivariate_square_free(
    p: &IntLaurentPoly,
) -> Result<(IntLaurentPoly, Vec<(IntLaurentPoly, usize)>), LaurentError> {
    if p.arity() != 2 {
        return Err(LaurentError::ArityMismatch { left: p.arity(), right: 2 });
    }
    if p.is_zero() {
        return Err(LaurentError::ZeroPolynomial);
    }
    let dense = to_dense(p);
    let content = b_content(&dense);
    let content = if dense.last().and_then(|l| l.last()).is_some_and(Signed::is_negative) {
        content.into_iter().map(|c| -c).collect()
    } else {
        content
    };
    let cpoly = from_dense(&[content]);
    if dense.len() <= 1 {
        return Ok((cpoly, Vec::new()));
    }
    let primitive = b_primitive(dense);
    if certainly_square_free(&primitive) {
        return Ok((cpoly, vec![(from_dense(&primitive), 1)]));
    }
    let factors = yun(&primitive).into_iter().map(|(f, i)| (from_dense(&f), i)).collect();
    Ok((cpoly, factors))
}
