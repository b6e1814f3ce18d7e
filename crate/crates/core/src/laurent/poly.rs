use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::{Ball, BallScalar};
use super::LaurentError;

pub const MAX_ARITY: usize = 3;

/// Exponent vector of a Laurent monomial. Slots beyond the polynomial's arity
/// stay zero, so the derived lexicographic order is the order on the used
/// slots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(pub [i64; MAX_ARITY]);

impl Exponent {
    pub const ZERO: Exponent = Exponent([0; MAX_ARITY]);

    pub fn new(entries: &[i64]) -> Self {
        let mut e = [0; MAX_ARITY];
        e[..entries.len()].copy_from_slice(entries);
        Exponent(e)
    }

    pub fn unit(var: usize) -> Self {
        let mut e = [0; MAX_ARITY];
        e[var] = 1;
        Exponent(e)
    }

    pub fn get(&self, var: usize) -> i64 {
        self.0[var]
    }

    pub fn entries(&self, arity: usize) -> &[i64] {
        &self.0[..arity]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; MAX_ARITY]
    }

    pub fn min(self, other: Exponent) -> Exponent {
        Exponent(std::array::from_fn(|i| self.0[i].min(other.0[i])))
    }

    pub fn max(self, other: Exponent) -> Exponent {
        Exponent(std::array::from_fn(|i| self.0[i].max(other.0[i])))
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, o: Exponent) -> Exponent {
        Exponent(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, o: Exponent) -> Exponent {
        Exponent(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(self.0.map(|x| -x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
}

/// Per-variable action of [`IntLaurentPoly::twist_and_specialize`].
#[derive(Clone, Copy, Debug)]
pub enum Twist {
    Keep,
    /// `u_i -> c * u_i`
    Scale(Ball),
    /// `u_i -> c`, removing the variable
    Specialize(Ball),
}

impl Twist {
    pub fn scale(c: Complex64) -> Self {
        Twist::Scale(Ball::exact(c))
    }

    pub fn specialize(c: Complex64) -> Self {
        Twist::Specialize(Ball::exact(c))
    }
}

fn check_arity(arity: usize) -> Result<(), LaurentError> {
    if (1..=MAX_ARITY).contains(&arity) {
        Ok(())
    } else {
        Err(LaurentError::BadArity(arity))
    }
}

/// Coordinates of `e` in the lattice basis `rows`, i.e. the unique `(a, b)`
/// with `e = a * rows[0] + b * rows[1]`.
pub fn reexpress_exponent(e: [i64; 2], rows: [[i64; 2]; 2]) -> Result<[i64; 2], LaurentError> {
    let cross = |x: [i64; 2], y: [i64; 2]| x[0] * y[1] - x[1] * y[0];
    let det = cross(rows[0], rows[1]);
    if det == 0 {
        return Err(LaurentError::SingularBasis);
    }
    let a = cross(e, rows[1]);
    let b = cross(rows[0], e);
    if a % det != 0 || b % det != 0 {
        return Err(LaurentError::OutsideLattice { exponent: e.to_vec() });
    }
    Ok([a / det, b / det])
}

/// Sparse Laurent polynomial with arbitrary-precision integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntLaurentPoly {
    arity: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

impl IntLaurentPoly {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity), "arity {arity} out of range");
        IntLaurentPoly { arity, terms: BTreeMap::new() }
    }

    pub fn try_zero(arity: usize) -> Result<Self, LaurentError> {
        check_arity(arity)?;
        Ok(Self::zero(arity))
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(arity, Exponent::ZERO, c)
    }

    pub fn monomial(arity: usize, e: Exponent, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(e, c.into());
        p
    }

    pub fn variable(arity: usize, var: usize) -> Self {
        Self::monomial(arity, Exponent::unit(var), 1)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I, C>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    /// Convenience constructor from small integer data: `&[(&[exps], coeff)]`.
    pub fn from_i64(arity: usize, terms: &[(&[i64], i64)]) -> Self {
        Self::from_terms(arity, terms.iter().map(|(e, c)| (Exponent::new(e), *c)))
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        debug_assert!(e.0[self.arity..].iter().all(|&x| x == 0));
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigInt)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Exponent::is_zero)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e.get(var) != 0)
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|e| e.0.iter().any(|&x| x < 0))
    }

    /// Smallest and largest exponent of `var` in the support.
    pub fn degree_span(&self, var: usize) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|e| e.get(var)).min()?;
        let hi = self.terms.keys().map(|e| e.get(var)).max()?;
        Some((lo, hi))
    }

    pub fn min_exponent(&self) -> Option<Exponent> {
        self.terms.keys().copied().reduce(Exponent::min)
    }

    pub fn max_exponent(&self) -> Option<Exponent> {
        self.terms.keys().copied().reduce(Exponent::max)
    }

    pub fn ring_op(&self, other: &Self, op: RingOp) -> Result<Self, LaurentError> {
        if self.arity != other.arity {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(match op {
            RingOp::Add => {
                let mut out = self.clone();
                for (e, c) in &other.terms {
                    out.add_term(*e, c.clone());
                }
                out
            }
            RingOp::Mul => {
                let mut out = Self::zero(self.arity);
                for (e1, c1) in &self.terms {
                    for (e2, c2) in &other.terms {
                        out.add_term(*e1 + *e2, c1 * c2);
                    }
                }
                out
            }
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.ring_op(other, RingOp::Add)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.ring_op(other, RingOp::Mul)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.arity, self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.arity, 1);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by the monomial `u^e`.
    pub fn shift(&self, e: &Exponent) -> Self {
        IntLaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(k, c)| (*k + *e, c.clone())).collect(),
        }
    }

    /// gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntLaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (*e, c / &g)).collect(),
        }
    }

    /// Factors out the monomial of minimal exponents, returning it together
    /// with the cofactor (whose exponents are all non-negative).
    pub fn monomial_normalized(&self) -> (Exponent, Self) {
        match self.min_exponent() {
            None => (Exponent::ZERO, self.clone()),
            Some(m) => (m, self.shift(&-m)),
        }
    }

    /// Representative of `p` up to units of `Z[u^{±1}]` and content: primitive,
    /// monomial-normalized, with positive coefficient on the lexicographically
    /// largest exponent. Mahler measures are unchanged up to the content.
    pub fn canonical_relation(&self) -> Self {
        let (_, p) = self.primitive_part().monomial_normalized();
        match p.terms.values().next_back() {
            Some(c) if c.is_negative() => -&p,
            _ => p,
        }
    }

    /// Substitutes every exponent through `f`, possibly changing the arity.
    pub fn map_exponents(&self, arity: usize, f: impl Fn(Exponent) -> Exponent) -> Self {
        Self::from_terms(arity, self.terms.iter().map(|(e, c)| (f(*e), c.clone())))
    }

    /// Rewrites a bivariate polynomial in the coordinates `w1 = u^{b1}`,
    /// `w2 = u^{b2}` of the lattice spanned by the basis rows.
    pub fn reexpress_on_lattice(&self, rows: [[i64; 2]; 2]) -> Result<Self, LaurentError> {
        if self.arity != 2 {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: 2 });
        }
        let mut out = Self::zero(2);
        for (e, c) in &self.terms {
            let ab = reexpress_exponent([e.get(0), e.get(1)], rows)?;
            out.add_term(Exponent::new(&ab), c.clone());
        }
        Ok(out)
    }

    pub fn to_cx(&self) -> CxLaurentPoly {
        CxLaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (*e, Ball::from_bigint(c))).collect(),
        }
    }

    pub fn twist_and_specialize(&self, twists: &[Twist]) -> Result<CxLaurentPoly, LaurentError> {
        self.to_cx().twist_and_specialize(twists)
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                for (i, z) in point.iter().enumerate().take(self.arity) {
                    v *= z.powi(e.get(i) as i32);
                }
                v
            })
            .sum()
    }

    /// Coefficients of a univariate polynomial after factoring out the lowest
    /// power: returns `(k, [a_0, .., a_n])` with `p = u^k * sum a_j u^j`.
    pub fn univariate_coefficients(&self) -> Result<(i64, Vec<BigInt>), LaurentError> {
        if self.arity != 1 {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: 1 });
        }
        let (lo, hi) = self.degree_span(0).ok_or(LaurentError::ZeroPolynomial)?;
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            coeffs[(e.get(0) - lo) as usize] = c.clone();
        }
        Ok((lo, coeffs))
    }

    /// Canonical text with custom variable names.
    pub fn format_named(&self, names: &[&str]) -> String {
        format_terms(
            self.terms.iter().map(|(e, c)| (e, c.clone())),
            self.arity,
            names,
        )
    }
}

fn default_names(arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("u{i}")).collect()
}

fn format_terms<'a>(
    terms: impl Iterator<Item = (&'a Exponent, BigInt)>,
    arity: usize,
    names: &[&str],
) -> String {
    let mut out = String::new();
    for (idx, (e, c)) in terms.enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors = Vec::new();
        for (i, name) in names.iter().enumerate().take(arity) {
            match e.get(i) {
                0 => {}
                1 => factors.push((*name).to_string()),
                k => factors.push(format!("{name}^{k}")),
            }
        }
        if factors.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for IntLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.arity);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.format_named(&refs))
    }
}

impl fmt::Debug for IntLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntLaurentPoly[{}]({self})", self.arity)
    }
}

impl Add for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn add(self, o: &IntLaurentPoly) -> IntLaurentPoly {
        self.try_add(o).expect("arity mismatch in polynomial addition")
    }
}

impl Sub for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn sub(self, o: &IntLaurentPoly) -> IntLaurentPoly {
        self.try_add(&-o).expect("arity mismatch in polynomial subtraction")
    }
}

impl Mul for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn mul(self, o: &IntLaurentPoly) -> IntLaurentPoly {
        self.try_mul(o).expect("arity mismatch in polynomial multiplication")
    }
}

impl Neg for &IntLaurentPoly {
    type Output = IntLaurentPoly;
    fn neg(self) -> IntLaurentPoly {
        IntLaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

/// Laurent polynomial whose coefficients are complex balls.
#[derive(Clone, Debug, PartialEq)]
pub struct CxLaurentPoly {
    arity: usize,
    terms: BTreeMap<Exponent, Ball>,
}

impl CxLaurentPoly {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity), "arity {arity} out of range");
        CxLaurentPoly { arity, terms: BTreeMap::new() }
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Exponent, Ball)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Ball) {
        if c.value == Complex64::new(0.0, 0.0) && c.radius == 0.0 {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => *x = *x + c,
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Ball)> + '_ {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> Option<Ball> {
        self.terms.get(e).copied()
    }

    pub fn max_radius(&self) -> f64 {
        self.terms.values().map(|b| b.radius).fold(0.0, f64::max)
    }

    pub fn degree_span(&self, var: usize) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|e| e.get(var)).min()?;
        let hi = self.terms.keys().map(|e| e.get(var)).max()?;
        Some((lo, hi))
    }

    pub fn ring_op(&self, other: &Self, op: RingOp) -> Result<Self, LaurentError> {
        if self.arity != other.arity {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(match op {
            RingOp::Add => {
                let mut out = self.clone();
                for (e, c) in &other.terms {
                    out.add_term(*e, *c);
                }
                out
            }
            RingOp::Mul => {
                let mut out = Self::zero(self.arity);
                for (e1, c1) in &self.terms {
                    for (e2, c2) in &other.terms {
                        out.add_term(*e1 + *e2, *c1 * *c2);
                    }
                }
                out
            }
        })
    }

    /// Applies per-variable scalings and specializations; specialized
    /// variables are removed and the remaining ones keep their order.
    pub fn twist_and_specialize(&self, twists: &[Twist]) -> Result<Self, LaurentError> {
        if twists.len() != self.arity {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: twists.len() });
        }
        let kept: Vec<usize> =
            (0..self.arity).filter(|&i| !matches!(twists[i], Twist::Specialize(_))).collect();
        if kept.is_empty() {
            return Err(LaurentError::Unsupported(
                "specializing every variable leaves no polynomial".into(),
            ));
        }
        let mut out = Self::zero(kept.len());
        for (e, c) in &self.terms {
            let mut coeff = *c;
            for (i, t) in twists.iter().enumerate() {
                let k = e.get(i);
                if k == 0 {
                    continue;
                }
                match t {
                    Twist::Keep => {}
                    Twist::Scale(s) | Twist::Specialize(s) => {
                        let f = s.powi(k).ok_or(LaurentError::ZeroTwist(i + 1))?;
                        coeff = coeff * f;
                    }
                }
            }
            for (i, t) in twists.iter().enumerate() {
                if let Twist::Scale(s) = t {
                    if s.contains_zero() {
                        return Err(LaurentError::ZeroTwist(i + 1));
                    }
                }
            }
            let ne = Exponent::new(&kept.iter().map(|&i| e.get(i)).collect::<Vec<_>>());
            out.add_term(ne, coeff);
        }
        Ok(out)
    }

    pub fn reexpress_on_lattice(&self, rows: [[i64; 2]; 2]) -> Result<Self, LaurentError> {
        if self.arity != 2 {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: 2 });
        }
        let mut out = Self::zero(2);
        for (e, c) in &self.terms {
            let ab = reexpress_exponent([e.get(0), e.get(1)], rows)?;
            out.add_term(Exponent::new(&ab), *c);
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.value;
                for (i, z) in point.iter().enumerate().take(self.arity) {
                    v *= z.powi(e.get(i) as i32);
                }
                v
            })
            .sum()
    }

    /// Coefficients of a univariate polynomial after factoring out the lowest
    /// power, as in [`IntLaurentPoly::univariate_coefficients`].
    pub fn univariate_coefficients(&self) -> Result<(i64, Vec<Ball>), LaurentError> {
        if self.arity != 1 {
            return Err(LaurentError::ArityMismatch { left: self.arity, right: 1 });
        }
        let (lo, hi) = self.degree_span(0).ok_or(LaurentError::ZeroPolynomial)?;
        let mut coeffs = vec![Ball::real(0.0); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            coeffs[(e.get(0) - lo) as usize] = *c;
        }
        Ok((lo, coeffs))
    }
}

impl From<&IntLaurentPoly> for CxLaurentPoly {
    fn from(p: &IntLaurentPoly) -> Self {
        p.to_cx()
    }
}
