//! Rank-two subgroups of Z^3: Hermite normal forms, the planar / axis /
//! generic case split, Smith forms of 2x2 integer matrices and the character
//! group of a planar lattice.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use thiserror::Error;

pub type Vec3 = [i64; 3];
pub type Mat2 = [[i64; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("basis rows {0:?} and {1:?} do not span a rank-two subgroup")]
    RankDeficient(Vec3, Vec3),
    #[error("matrix {0:?} is singular")]
    Singular(Mat2),
    #[error("bad lattice syntax {0:?}: expected \"a,b,c;d,e,f\"")]
    Syntax(String),
    #[error("entries overflow 64-bit integers")]
    Overflow,
}

fn cross(a: &Vec3, b: &Vec3) -> [i128; 3] {
    let (a, b) = (a.map(i128::from), b.map(i128::from));
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn narrow(v: [i128; 3]) -> Result<Vec3, LatticeError> {
    let mut out = [0i64; 3];
    for (o, x) in out.iter_mut().zip(v) {
        *o = i64::try_from(x).map_err(|_| LatticeError::Overflow)?;
    }
    Ok(out)
}

/// Row-style Hermite normal form of a 2x3 integer matrix of rank two,
/// scanning columns in the given order.
fn hnf(rows: [Vec3; 2], order: [usize; 3]) -> Result<[Vec3; 2], LatticeError> {
    if cross(&rows[0], &rows[1]) == [0; 3] {
        return Err(LatticeError::RankDeficient(rows[0], rows[1]));
    }
    let mut r = rows.map(|v| v.map(i128::from));
    let mut pivots = Vec::with_capacity(2);
    for &col in &order {
        let row = pivots.len();
        if row == 2 {
            break;
        }
        if row == 0 {
            // Euclid on the column until only r[0] is nonzero there
            while r[1][col] != 0 {
                let q = Integer::div_floor(&r[0][col], &r[1][col]);
                for k in 0..3 {
                    r[0][k] -= q * r[1][k];
                }
                r.swap(0, 1);
            }
            if r[0][col] == 0 {
                continue;
            }
            if r[0][col] < 0 {
                r[0] = r[0].map(|x| -x);
            }
            pivots.push(col);
        } else {
            if r[1][col] == 0 {
                continue;
            }
            if r[1][col] < 0 {
                r[1] = r[1].map(|x| -x);
            }
            let q = Integer::div_floor(&r[0][col], &r[1][col]);
            for k in 0..3 {
                r[0][k] -= q * r[1][k];
            }
            pivots.push(col);
        }
    }
    Ok([narrow(r[0])?, narrow(r[1])?])
}

/// Basis of a rank-two subgroup of Z^3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SublatticeBasis {
    rows: [Vec3; 2],
    canonical: bool,
}

impl SublatticeBasis {
    /// Accepts any rank-two basis without normalizing it.
    pub fn new(rows: [Vec3; 2]) -> Result<Self, LatticeError> {
        if cross(&rows[0], &rows[1]) == [0; 3] {
            return Err(LatticeError::RankDeficient(rows[0], rows[1]));
        }
        Ok(SublatticeBasis { rows, canonical: false })
    }

    pub fn rows(&self) -> [Vec3; 2] {
        self.rows
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn canonical(&self) -> SublatticeBasis {
        normal_form(self.rows).expect("rank two by construction")
    }

    /// Whether `v` is an integer combination of the rows.
    pub fn contains(&self, v: &Vec3) -> bool {
        let [a, b] = self.rows;
        let c = cross(&a, &b);
        // v must lie in the plane, then solve by Cramer in the plane
        let vv = v.map(i128::from);
        if c[0] * vv[0] + c[1] * vv[1] + c[2] * vv[2] != 0 {
            return false;
        }
        let n2: i128 = c.iter().map(|x| x * x).sum();
        let s = cross(v, &b);
        let t = cross(&a, v);
        let ds: i128 = s.iter().zip(&c).map(|(x, y)| x * y).sum();
        let dt: i128 = t.iter().zip(&c).map(|(x, y)| x * y).sum();
        ds % n2 == 0 && dt % n2 == 0
    }

    /// `N * Λ`.
    pub fn scaled(&self, n: i64) -> SublatticeBasis {
        normal_form(self.rows.map(|r| r.map(|x| x * n))).expect("n nonzero")
    }

    pub fn same_subgroup(&self, other: &SublatticeBasis) -> bool {
        self.canonical().rows == other.canonical().rows
    }
}

impl fmt::Display for SublatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.rows;
        write!(f, "{},{},{};{},{},{}", a[0], a[1], a[2], b[0], b[1], b[2])
    }
}

impl FromStr for SublatticeBasis {
    type Err = LatticeError;

    /// Parses `"a,b,c;d,e,f"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::Syntax(s.to_string());
        let rows: Vec<Vec<i64>> = s
            .split(';')
            .map(|r| r.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 3) {
            return Err(bad());
        }
        SublatticeBasis::new([[rows[0][0], rows[0][1], rows[0][2]], [rows[1][0], rows[1][1], rows[1][2]]])
    }
}

/// Canonical (row Hermite normal form) basis; equal subgroups give equal
/// results.
pub fn normal_form(rows: [Vec3; 2]) -> Result<SublatticeBasis, LatticeError> {
    Ok(SublatticeBasis { rows: hnf(rows, [0, 1, 2])?, canonical: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeCase {
    /// Λ ⊆ Z^2 x {0}.
    Planar,
    /// Λ contains `(0, 0, k)`; `axis` is the smallest such vector with `k > 0`.
    AxisDegenerate { axis: Vec3 },
    /// Exact basis `{n, m}` of Λ with `n_3 = 0` and `m_3 > 0`.
    Generic { n: Vec3, m: Vec3 },
}

pub fn classify_lattice(lattice: &SublatticeBasis) -> LatticeCase {
    let std = lattice.canonical().rows;
    if std[0][2] == 0 && std[1][2] == 0 {
        return LatticeCase::Planar;
    }
    if std[1][0] == 0 && std[1][1] == 0 {
        return LatticeCase::AxisDegenerate { axis: std[1] };
    }
    // x3 scanned first: the first row carries the smallest positive m3, the
    // second spans the intersection with the plane
    let [m, n] = hnf(lattice.rows, [2, 0, 1]).expect("rank two by construction");
    debug_assert!(m[2] > 0 && n[2] == 0);
    LatticeCase::Generic { n, m }
}

/// Lattice in Z^2 given by two independent rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlanarLattice {
    rows: Mat2,
}

impl PlanarLattice {
    pub fn new(rows: Mat2) -> Result<Self, LatticeError> {
        if det2(&rows) == 0 {
            return Err(LatticeError::Singular(rows));
        }
        Ok(PlanarLattice { rows })
    }

    pub fn rows(&self) -> Mat2 {
        self.rows
    }

    /// Order of Z^2 / L.
    pub fn index(&self) -> u64 {
        det2(&self.rows).unsigned_abs()
    }

    pub fn contains(&self, v: [i64; 2]) -> bool {
        let d = det2(&self.rows);
        let a = v[0] * self.rows[1][1] - v[1] * self.rows[1][0];
        let b = self.rows[0][0] * v[1] - self.rows[0][1] * v[0];
        a % d == 0 && b % d == 0
    }
}

/// Projection of a generic case to the (u1, u2)-plane: rows `n` and `m`.
pub fn planar_projection(case: &LatticeCase) -> Option<PlanarLattice> {
    match case {
        LatticeCase::Generic { n, m } => PlanarLattice::new([[n[0], n[1]], [m[0], m[1]]]).ok(),
        _ => None,
    }
}

fn det2(a: &Mat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

/// Inverse of a unimodular matrix.
fn inv_unimodular(a: &Mat2) -> Mat2 {
    let d = det2(a);
    debug_assert!(d == 1 || d == -1);
    [[d * a[1][1], -d * a[0][1]], [-d * a[1][0], d * a[0][0]]]
}

/// `A = U D V` with `U, V` unimodular and `D = diag(d1, d2)`, `0 < d1 | d2`.
pub fn smith_normal_form(a: &Mat2) -> Result<(Mat2, Mat2, Mat2), LatticeError> {
    if det2(a) == 0 {
        return Err(LatticeError::Singular(*a));
    }
    // invariant: l * a * r = d
    let mut d = *a;
    let mut l: Mat2 = [[1, 0], [0, 1]];
    let mut r: Mat2 = [[1, 0], [0, 1]];
    let swap_rows = |m: &mut Mat2| m.swap(0, 1);
    let swap_cols = |m: &mut Mat2| {
        for row in m.iter_mut() {
            row.swap(0, 1);
        }
    };
    loop {
        // bring the smallest nonzero entry to (0, 0)
        let (mut bi, mut bj) = (0, 0);
        for i in 0..2 {
            for j in 0..2 {
                if d[i][j] != 0 && (d[bi][bj] == 0 || d[i][j].abs() < d[bi][bj].abs()) {
                    (bi, bj) = (i, j);
                }
            }
        }
        if bi == 1 {
            swap_rows(&mut d);
            swap_rows(&mut l);
        }
        if bj == 1 {
            swap_cols(&mut d);
            swap_cols(&mut r);
        }
        let p = d[0][0];
        let q = Integer::div_floor(&d[1][0], &p);
        for k in 0..2 {
            d[1][k] -= q * d[0][k];
            l[1][k] -= q * l[0][k];
        }
        let q = Integer::div_floor(&d[0][1], &p);
        for k in 0..2 {
            d[k][1] -= q * d[k][0];
            r[k][1] -= q * r[k][0];
        }
        if d[1][0] != 0 || d[0][1] != 0 {
            continue;
        }
        if d[1][1] % p != 0 {
            // row 0 += row 1 puts d11 into the first row; repeat
            for k in 0..2 {
                d[0][k] += d[1][k];
                l[0][k] += l[1][k];
            }
            continue;
        }
        break;
    }
    for i in 0..2 {
        if d[i][i] < 0 {
            d[i] = d[i].map(|x| -x);
            l[i] = l[i].map(|x| -x);
        }
    }
    let u = inv_unimodular(&l);
    let v = inv_unimodular(&r);
    debug_assert_eq!(mul2(&mul2(&u, &d), &v), *a);
    Ok((u, d, v))
}

/// Character of Z^2 / L: `ω_j = exp(2πi num_j / den)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    pub num: [i64; 2],
    pub den: i64,
}

impl TorsionPoint {
    pub fn omega(&self) -> [Complex64; 2] {
        self.num.map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / self.den as f64))
    }

    /// Exact test of `ω^λ = 1`.
    pub fn kills(&self, lambda: [i64; 2]) -> bool {
        (self.num[0] * lambda[0] + self.num[1] * lambda[1]).rem_euclid(self.den) == 0
    }
}

/// The `index(L)` characters of Z^2 trivial on L, starting with `(1, 1)`.
pub fn dual_torsion_points(lattice: &PlanarLattice) -> Vec<TorsionPoint> {
    let (_, d, v) = smith_normal_form(&lattice.rows).expect("nonsingular by construction");
    let (d1, d2) = (d[0][0], d[1][1]);
    let vinv = inv_unimodular(&v);
    let mut out = Vec::with_capacity((d1 * d2) as usize);
    for c1 in 0..d1 {
        for c2 in 0..d2 {
            // V θ = (c1/d1, c2/d2) over the common denominator d2
            let y = [c1 * (d2 / d1), c2];
            let num = [
                (vinv[0][0] * y[0] + vinv[0][1] * y[1]).rem_euclid(d2),
                (vinv[1][0] * y[0] + vinv[1][1] * y[1]).rem_euclid(d2),
            ];
            out.push(TorsionPoint { num, den: d2 });
        }
    }
    out
}

/// All rank-two subgroups with a basis of entries in `[-B, B]`, deduplicated
/// by normal form, in normal-form order.
pub fn enumerate_sublattices(bound: i64) -> Vec<SublatticeBasis> {
    let b = bound.max(0);
    let mut vectors = Vec::new();
    for x in -b..=b {
        for y in -b..=b {
            for z in -b..=b {
                if (x, y, z) != (0, 0, 0) {
                    vectors.push([x, y, z]);
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    for (i, v) in vectors.iter().enumerate() {
        for w in &vectors[i + 1..] {
            if let Ok(nf) = normal_form([*v, *w]) {
                seen.insert(nf);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_examples() {
        let a = normal_form([[1, 0, 0], [0, 1, -1]]).unwrap();
        let b = normal_form([[0, 1, -1], [1, 0, 0]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows(), [[1, 0, 0], [0, 1, -1]]);
        let c = normal_form([[2, 0, 0], [1, 1, 0]]).unwrap();
        assert_eq!(c.rows(), [[1, 1, 0], [0, 2, 0]]);
        assert_eq!(normal_form(c.rows()).unwrap(), c);
        assert!(normal_form([[1, 2, 3], [2, 4, 6]]).is_err());
    }

    #[test]
    fn case_split() {
        let p = normal_form([[1, 0, 0], [0, 1, 0]]).unwrap();
        assert_eq!(classify_lattice(&p), LatticeCase::Planar);
        let a = normal_form([[1, 1, 0], [0, 0, 1]]).unwrap();
        assert_eq!(classify_lattice(&a), LatticeCase::AxisDegenerate { axis: [0, 0, 1] });
        let g = normal_form([[1, 0, 0], [0, 1, -1]]).unwrap();
        assert_eq!(classify_lattice(&g), LatticeCase::Generic { n: [1, 0, 0], m: [0, -1, 1] });
        // the axis multiple need not be e3 itself
        let a2 = SublatticeBasis::new([[1, 1, 1], [1, 1, -1]]).unwrap();
        assert_eq!(classify_lattice(&a2), LatticeCase::AxisDegenerate { axis: [0, 0, 2] });
    }

    #[test]
    fn projections_and_index() {
        let cases = [
            (LatticeCase::Generic { n: [1, 0, 0], m: [0, -1, 1] }, [[1, 0], [0, -1]], 1),
            (LatticeCase::Generic { n: [2, 0, 0], m: [0, 1, 1] }, [[2, 0], [0, 1]], 2),
            (LatticeCase::Generic { n: [1, 1, 0], m: [1, -1, 2] }, [[1, 1], [1, -1]], 2),
        ];
        for (case, rows, index) in cases {
            let l = planar_projection(&case).unwrap();
            assert_eq!(l.rows(), rows);
            assert_eq!(l.index(), index);
        }
        assert!(planar_projection(&LatticeCase::Planar).is_none());
    }

    #[test]
    fn smith_forms() {
        let (_, d, _) = smith_normal_form(&[[2, 0], [0, 2]]).unwrap();
        assert_eq!(d, [[2, 0], [0, 2]]);
        let (u, d, v) = smith_normal_form(&[[1, 1], [1, -1]]).unwrap();
        assert_eq!(d, [[1, 0], [0, 2]]);
        assert_eq!(mul2(&mul2(&u, &d), &v), [[1, 1], [1, -1]]);
        let (_, d, _) = smith_normal_form(&[[1, 0], [0, 1]]).unwrap();
        assert_eq!(d, [[1, 0], [0, 1]]);
        let (_, d, _) = smith_normal_form(&[[2, 4], [6, 8]]).unwrap();
        assert_eq!(d, [[2, 0], [0, 4]]);
        assert!(smith_normal_form(&[[1, 2], [2, 4]]).is_err());
    }

    #[test]
    fn torsion_points() {
        let l = PlanarLattice::new([[2, 0], [0, 2]]).unwrap();
        let pts = dual_torsion_points(&l);
        assert_eq!(pts.len(), 4);
        let mut signs: Vec<[i64; 2]> = pts.iter().map(|p| p.num.map(|k| if k == 0 { 1 } else { -1 })).collect();
        signs.sort();
        assert_eq!(signs, vec![[-1, -1], [-1, 1], [1, -1], [1, 1]]);
        assert_eq!(dual_torsion_points(&PlanarLattice::new([[1, 0], [0, 1]]).unwrap()).len(), 1);
        let l = PlanarLattice::new([[1, 1], [1, -1]]).unwrap();
        let pts = dual_torsion_points(&l);
        assert_eq!(pts, vec![TorsionPoint { num: [0, 0], den: 2 }, TorsionPoint { num: [1, 1], den: 2 }]);
    }

    #[test]
    fn enumeration_contains_coordinate_planes() {
        let all = enumerate_sublattices(1);
        for rows in [[[1, 0, 0], [0, 1, 0]], [[1, 0, 0], [0, 0, 1]], [[0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, -1]]] {
            assert!(all.contains(&normal_form(rows).unwrap()));
        }
    }

    #[test]
    fn parse_lattice() {
        let l: SublatticeBasis = "1,0,0; 0,1,-1".parse().unwrap();
        assert_eq!(l.rows(), [[1, 0, 0], [0, 1, -1]]);
        assert!("1,0,0".parse::<SublatticeBasis>().is_err());
        assert!("1,0,0;2,0,0".parse::<SublatticeBasis>().is_err());
        assert_eq!(l.canonical().to_string(), "1,0,0;0,1,-1");
    }

    #[test]
    fn membership() {
        let l = normal_form([[1, 0, 0], [0, 1, -1]]).unwrap();
        assert!(l.contains(&[3, -2, 2]));
        assert!(!l.contains(&[0, 0, 1]));
        let l2 = normal_form([[2, 0, 0], [0, 2, 0]]).unwrap();
        assert!(!l2.contains(&[1, 0, 0]));
        assert!(l2.contains(&[4, -2, 0]));
    }
}
