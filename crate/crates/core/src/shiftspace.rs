//! Torus-valued configurations on a finite box satisfying the `f`- and
//! `g`-relations, and the region geometry of the rigidity argument.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{is_triangular, SystemPresentation};

pub type Coord = [usize; 3];

/// Largest residual accepted after completion.
pub const RESIDUAL_BOUND: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShiftError {
    #[error("system not supported by the window solver: {0}")]
    Unsupported(String),
    #[error("window {dims:?} is smaller than the stencil span {needed:?}")]
    WindowTooSmall { dims: [usize; 3], needed: [usize; 3] },
    #[error("no seed for free coordinate {0:?}")]
    MissingSeed(Coord),
    #[error("coordinate {0:?} is not in the free set")]
    NotFree(Coord),
    #[error("seed at {0:?} is not a finite number")]
    BadSeed(Coord),
    #[error("relation at {at:?} has residual {residual:e}")]
    Inconsistent { at: Coord, residual: f64 },
    #[error("{0}")]
    Bounds(String),
}

/// Reduction to `[0, 1)`.
fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance from `x` to the nearest integer.
fn torus_norm(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// A window `[0, L1) x [0, L2) x [0, L3)` with the placements of both
/// relations and the coordinates the solver leaves free.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowConfigSpace {
    dims: [usize; 3],
    /// Terms of `f` as `((i, j), c)`, supported in `[0, a]^2`.
    f_terms: Vec<([usize; 2], i64)>,
    /// `g_0, .., g_d` with `g_d = 1`.
    g_coeffs: Vec<i64>,
    a: usize,
    corner_sign: i64,
    free_set: Vec<Coord>,
}

impl WindowConfigSpace {
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn free_set(&self) -> &[Coord] {
        &self.free_set
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn index(&self, n: Coord) -> usize {
        (n[2] * self.dims[1] + n[1]) * self.dims[0] + n[0]
    }

    fn degree(&self) -> usize {
        self.g_coeffs.len() - 1
    }

    /// Base points of the `f` placements: `u^n f` lies in the window.
    pub fn f_stencils(&self) -> impl Iterator<Item = Coord> + '_ {
        let [l1, l2, l3] = self.dims;
        let a = self.a;
        (0..l3).flat_map(move |h| (0..=l2 - 1 - a).flat_map(move |r| (0..=l1 - 1 - a).map(move |c| [c, r, h])))
    }

    /// Base points of the `g` placements.
    pub fn g_stencils(&self) -> impl Iterator<Item = Coord> + '_ {
        let [l1, l2, l3] = self.dims;
        let d = self.degree();
        (0..=l3 - 1 - d).flat_map(move |h| (0..l2).flat_map(move |r| (0..l1).map(move |c| [c, r, h])))
    }

    fn f_value(&self, values: &[f64], base: Coord) -> f64 {
        self.f_terms
            .iter()
            .map(|&([i, j], c)| c as f64 * values[self.index([base[0] + i, base[1] + j, base[2]])])
            .sum()
    }

    fn g_value(&self, values: &[f64], base: Coord) -> f64 {
        self.g_coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * values[self.index([base[0], base[1], base[2] + k])])
            .sum()
    }
}

fn small(c: &num_bigint::BigInt, what: &str) -> Result<i64, ShiftError> {
    c.to_i64().ok_or_else(|| ShiftError::Unsupported(format!("coefficient of {what} out of range")))
}

/// Lays out the window. Levels below `deg g` are filled through the `f`
/// corner at `(0, a)`; higher levels follow from `g`.
pub fn build_window(system: &SystemPresentation, dims: [usize; 3]) -> Result<WindowConfigSpace, ShiftError> {
    let (triangular, a) = is_triangular(&system.f);
    if !triangular {
        return Err(ShiftError::Unsupported("f is not triangular".into()));
    }
    let (lo, hi) = system.g.degree_span(0).expect("nonzero");
    let lead = system.g.terms().last().map(|(_, c)| c.clone()).expect("nonzero");
    if lo != 0 || hi == 0 || !lead.is_one() {
        return Err(ShiftError::Unsupported("g must be monic of positive degree with g(0) != 0".into()));
    }
    let a = a as usize;
    let d = hi as usize;
    let needed = [a + 1, a + 1, d + 1];
    if dims.iter().zip(&needed).any(|(l, n)| l < n) {
        return Err(ShiftError::WindowTooSmall { dims, needed });
    }
    let f_terms = system
        .f
        .terms()
        .map(|(e, c)| Ok(([e.get(0) as usize, e.get(1) as usize], small(c, "f")?)))
        .collect::<Result<Vec<_>, ShiftError>>()?;
    let corner_sign = small(&system.f.coeff(&crate::laurent::Exponent::new(&[0, a as i64])), "f")?;
    let mut g_coeffs = vec![0i64; d + 1];
    for (e, c) in system.g.terms() {
        g_coeffs[e.get(0) as usize] = small(c, "g")?;
    }
    let [l1, l2, _] = dims;
    let mut free_set = Vec::new();
    for h in 0..d {
        for r in 0..l2 {
            for c in 0..l1 {
                if r < a || c + a > l1 - 1 {
                    free_set.push([c, r, h]);
                }
            }
        }
    }
    Ok(WindowConfigSpace { dims, f_terms, g_coeffs, a, corner_sign, free_set })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowConfig {
    dims: [usize; 3],
    values: Vec<f64>,
}

impl WindowConfig {
    pub fn zeros(dims: [usize; 3]) -> Self {
        WindowConfig { dims, values: vec![0.0; dims.iter().product()] }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn get(&self, n: Coord) -> f64 {
        self.values[(n[2] * self.dims[1] + n[1]) * self.dims[0] + n[0]]
    }

    pub fn set(&mut self, n: Coord, v: f64) {
        let i = (n[2] * self.dims[1] + n[1]) * self.dims[0] + n[0];
        self.values[i] = frac(v);
    }

    /// All coordinates with their values, `n1` fastest.
    pub fn iter(&self) -> impl Iterator<Item = (Coord, f64)> + '_ {
        let [l1, l2, _] = self.dims;
        self.values.iter().enumerate().map(move |(i, &v)| ([i % l1, (i / l1) % l2, i / (l1 * l2)], v))
    }
}

/// Fills the window from seed values on the free set. Seeds are reduced
/// mod 1.
pub fn complete_window(space: &WindowConfigSpace, seeds: &BTreeMap<Coord, f64>) -> Result<WindowConfig, ShiftError> {
    for n in seeds.keys() {
        if space.free_set.binary_search_by(|p| [p[2], p[1], p[0]].cmp(&[n[2], n[1], n[0]])).is_err() {
            return Err(ShiftError::NotFree(*n));
        }
    }
    let mut cfg = WindowConfig::zeros(space.dims);
    let [l1, l2, l3] = space.dims;
    let (a, d) = (space.a, space.degree());
    for h in 0..l3 {
        for r in 0..l2 {
            for c in 0..l1 {
                let n = [c, r, h];
                let v = if h >= d {
                    // monic g: x_{n} = -sum_{k<d} g_k x_{n - (d - k) e3}
                    -space
                        .g_coeffs
                        .iter()
                        .take(d)
                        .enumerate()
                        .map(|(k, &g)| g as f64 * cfg.get([c, r, h - d + k]))
                        .sum::<f64>()
                } else if r < a || c + a > l1 - 1 {
                    let s = *seeds.get(&n).ok_or(ShiftError::MissingSeed(n))?;
                    if !s.is_finite() {
                        return Err(ShiftError::BadSeed(n));
                    }
                    s
                } else {
                    // corner coefficient ±1 at (0, a): solve the placement based at (c, r - a)
                    let rest: f64 = space
                        .f_terms
                        .iter()
                        .filter(|(e, _)| *e != [0, a])
                        .map(|&([i, j], k)| k as f64 * cfg.get([c + i, r - a + j, h]))
                        .sum();
                    -(space.corner_sign as f64) * rest
                };
                cfg.set(n, v);
            }
        }
    }
    let (residual, at) = max_residual(space, &cfg);
    if residual >= RESIDUAL_BOUND {
        return Err(ShiftError::Inconsistent { at: at.unwrap_or_default(), residual });
    }
    Ok(cfg)
}

fn max_residual(space: &WindowConfigSpace, cfg: &WindowConfig) -> (f64, Option<Coord>) {
    let f: Vec<Coord> = space.f_stencils().collect();
    let g: Vec<Coord> = space.g_stencils().collect();
    let pick = |x: (f64, Option<Coord>), y: (f64, Option<Coord>)| if y.0 > x.0 { y } else { x };
    let rf = f
        .par_iter()
        .map(|&n| (torus_norm(space.f_value(&cfg.values, n)), Some(n)))
        .reduce(|| (0.0, None), pick);
    let rg = g
        .par_iter()
        .map(|&n| (torus_norm(space.g_value(&cfg.values, n)), Some(n)))
        .reduce(|| (0.0, None), pick);
    pick(rf, rg)
}

/// Largest distance to `Z` of any relation value in the window.
pub fn verify_window(space: &WindowConfigSpace, cfg: &WindowConfig) -> f64 {
    max_residual(space, cfg).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// In `S_N = {m2 >= 0, m3 >= N} ∪ {m2 >= N}`.
    Future,
    /// In the slab `U_N = {0 <= m2 < N, 0 <= m3 < N}`.
    Slab,
    Neither,
}

pub fn region_membership(n: i64, m: [i64; 3]) -> Result<Region, ShiftError> {
    if n < 1 {
        return Err(ShiftError::Bounds(format!("N must be positive, got {n}")));
    }
    Ok(if (m[1] >= 0 && m[2] >= n) || m[1] >= n {
        Region::Future
    } else if (0..n).contains(&m[1]) && (0..n).contains(&m[2]) {
        Region::Slab
    } else {
        Region::Neither
    })
}

/// The counting bound `2 M N log K` and the scaled entropy `N^2 h`.
pub fn section4_bounds(m: i64, n: i64, k: u64, h: f64) -> Result<(f64, f64), ShiftError> {
    if n < 1 || m < 0 || m >= n {
        return Err(ShiftError::Bounds(format!("need 0 <= M < N, got M={m} N={n}")));
    }
    if k < 2 {
        return Err(ShiftError::Bounds(format!("need K >= 2, got {k}")));
    }
    if !(h >= 0.0) {
        return Err(ShiftError::Bounds(format!("need h >= 0, got {h}")));
    }
    let (m, n) = (m as f64, n as f64);
    Ok((2.0 * m * n * (k as f64).ln(), n * n * h))
}
