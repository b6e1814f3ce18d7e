use super::poly::IntLaurentPoly;
use super::LaurentError;

/// Convex hull of the support of a bivariate polynomial, as its extreme points
/// in counterclockwise order starting from the lexicographic minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolytope {
    vertices: Vec<[i64; 2]>,
}

fn cross(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

impl NewtonPolytope {
    /// Andrew's monotone chain; collinear points are dropped.
    pub fn hull(points: impl IntoIterator<Item = [i64; 2]>) -> Option<Self> {
        let mut pts: Vec<[i64; 2]> = points.into_iter().collect();
        pts.sort_unstable();
        pts.dedup();
        if pts.len() <= 1 {
            return pts.first().map(|&p| NewtonPolytope { vertices: vec![p] });
        }
        let mut lower: Vec<[i64; 2]> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<[i64; 2]> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Some(NewtonPolytope { vertices: lower })
    }

    pub fn vertices(&self) -> &[[i64; 2]] {
        &self.vertices
    }

    pub fn minkowski_sum(&self, other: &Self) -> Self {
        let sums = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| [a[0] + b[0], a[1] + b[1]]));
        NewtonPolytope::hull(sums).expect("nonempty hulls")
    }

    /// Twice the enclosed area (an integer for lattice polygons).
    pub fn double_area(&self) -> i128 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
            })
            .sum::<i128>()
            .abs()
    }
}

pub fn newton_polygon(p: &IntLaurentPoly) -> Result<NewtonPolytope, LaurentError> {
    if p.arity() != 2 {
        return Err(LaurentError::ArityMismatch { left: p.arity(), right: 2 });
    }
    NewtonPolytope::hull(p.terms().map(|(e, _)| [e.get(0), e.get(1)])).ok_or(LaurentError::ZeroPolynomial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let p = IntLaurentPoly::from_i64(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(newton_polygon(&p).unwrap().vertices(), &[[0, 0], [1, 0], [0, 1]]);
        let q = IntLaurentPoly::from_i64(2, &[(&[0, 0], 1), (&[2, 0], 1), (&[0, 2], 1)]);
        assert_eq!(newton_polygon(&q).unwrap().vertices(), &[[0, 0], [2, 0], [0, 2]]);
    }

    #[test]
    fn single_term_and_zero() {
        let p = IntLaurentPoly::from_i64(2, &[(&[1, 1], 5)]);
        assert_eq!(newton_polygon(&p).unwrap().vertices(), &[[1, 1]]);
        assert_eq!(newton_polygon(&IntLaurentPoly::zero(2)), Err(LaurentError::ZeroPolynomial));
    }

    #[test]
    fn interior_and_edge_points_are_not_vertices() {
        let pts = [[0, 0], [2, 0], [1, 0], [1, 1], [2, 2], [0, 2], [0, 1]];
        let h = NewtonPolytope::hull(pts).unwrap();
        assert_eq!(h.vertices(), &[[0, 0], [2, 0], [2, 2], [0, 2]]);
        assert_eq!(h.double_area(), 8);
    }

    #[test]
    fn segment() {
        let h = NewtonPolytope::hull([[0, 0], [1, 1], [3, 3]]).unwrap();
        assert_eq!(h.vertices(), &[[0, 0], [3, 3]]);
    }
}
