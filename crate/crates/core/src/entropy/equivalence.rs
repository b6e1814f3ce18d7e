use rayon::prelude::*;

use super::{sublattice_entropy, EntropyResult, MahlerValue, QuadratureConfig};
use crate::classify::SystemPresentation;
use crate::lattice::SublatticeBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowVerdict {
    /// Finite values agree within tolerance plus both error bounds.
    Equal,
    Distinct,
    /// Same structural descriptor on both sides.
    StructuralEqual,
    /// Different result variants, or structural descriptors that differ.
    Incomparable,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub lattice: SublatticeBasis,
    pub first: Result<EntropyResult, String>,
    pub second: Result<EntropyResult, String>,
    pub verdict: RowVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub verdict: Verdict,
}

impl EquivalenceReport {
    pub fn first_distinct(&self) -> Option<&EquivalenceRow> {
        self.rows.iter().find(|r| r.verdict == RowVerdict::Distinct)
    }
}

fn compare_values(a: &MahlerValue, b: &MahlerValue, tol: f64) -> RowVerdict {
    let diff = (a.value - b.value).abs();
    let err = a.error + b.error;
    if diff + err <= tol {
        RowVerdict::Equal
    } else if diff - err > tol {
        RowVerdict::Distinct
    } else {
        RowVerdict::Inconclusive
    }
}

pub fn compare_results(a: &EntropyResult, b: &EntropyResult, tol: f64) -> RowVerdict {
    use EntropyResult::*;
    match (a, b) {
        (Finite(x), Finite(y)) => compare_values(x, y, tol),
        (
            MultipleOfLogMahlerG { base: x, geometry_key: gx, f_key: fx },
            MultipleOfLogMahlerG { base: y, geometry_key: gy, f_key: fy },
        ) => {
            if gx != gy || fx != fy {
                return RowVerdict::Incomparable;
            }
            match compare_values(x, y, tol) {
                RowVerdict::Equal => RowVerdict::StructuralEqual,
                other => other,
            }
        }
        (PlanarStructural { f_key: fx }, PlanarStructural { f_key: fy }) => {
            if fx == fy {
                RowVerdict::StructuralEqual
            } else {
                RowVerdict::Incomparable
            }
        }
        _ => RowVerdict::Incomparable,
    }
}

fn overall(rows: &[EquivalenceRow]) -> Verdict {
    if rows.iter().any(|r| r.verdict == RowVerdict::Distinct) {
        Verdict::NotEquivalent
    } else if rows.iter().all(|r| matches!(r.verdict, RowVerdict::Equal | RowVerdict::StructuralEqual)) {
        Verdict::Equivalent
    } else {
        Verdict::Inconclusive
    }
}

/// Compares the sub-action entropies of two systems over a family of
/// rank-two subgroups. Rows come back in family order.
pub fn entropy_equivalent(
    first: &SystemPresentation,
    second: &SystemPresentation,
    family: &[SublatticeBasis],
    cfg: &QuadratureConfig,
    tol: f64,
) -> EquivalenceReport {
    let rows: Vec<EquivalenceRow> = family
        .par_iter()
        .map(|lattice| {
            let a = sublattice_entropy(first, lattice, cfg).map_err(|e| e.to_string());
            let b = sublattice_entropy(second, lattice, cfg).map_err(|e| e.to_string());
            let verdict = match (&a, &b) {
                (Ok(x), Ok(y)) => compare_results(x, y, tol),
                _ => RowVerdict::Inconclusive,
            };
            EquivalenceRow { lattice: *lattice, first: a, second: b, verdict }
        })
        .collect();
    let verdict = overall(&rows);
    EquivalenceReport { rows, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_poly;

    fn val(v: f64, e: f64) -> EntropyResult {
        EntropyResult::Finite(MahlerValue { value: v, error: e, heuristic: true, converged: true })
    }

    #[test]
    fn interval_logic() {
        assert_eq!(compare_results(&val(1.0, 1e-9), &val(1.0 + 1e-8, 1e-9), 1e-7), RowVerdict::Equal);
        assert_eq!(compare_results(&val(1.0, 1e-9), &val(1.5, 1e-9), 1e-7), RowVerdict::Distinct);
        // the interval straddles the tolerance
        assert_eq!(compare_results(&val(1.0, 1e-7), &val(1.0 + 1e-7, 0.0), 1e-7), RowVerdict::Inconclusive);
    }

    #[test]
    fn variants_never_compare_equal() {
        let f = parse_poly("1 + u1 + u2", 2).unwrap();
        let planar = EntropyResult::PlanarStructural { f_key: f.clone() };
        assert_eq!(compare_results(&val(0.0, 0.0), &planar, 1.0), RowVerdict::Incomparable);
        assert_eq!(compare_results(&planar, &planar, 1e-7), RowVerdict::StructuralEqual);
        let other = EntropyResult::PlanarStructural { f_key: parse_poly("1 + u1 + u2^2", 2).unwrap() };
        assert_eq!(compare_results(&planar, &other, 1e-7), RowVerdict::Incomparable);
        let axis = |key: &str| EntropyResult::MultipleOfLogMahlerG {
            base: MahlerValue::exact(2f64.ln()),
            geometry_key: key.to_string(),
            f_key: f.clone(),
        };
        assert_eq!(compare_results(&axis("1,0,0;0,0,1"), &axis("1,0,0;0,0,1"), 1e-7), RowVerdict::StructuralEqual);
        assert_eq!(compare_results(&axis("1,0,0;0,0,1"), &axis("0,1,0;0,0,1"), 1e-7), RowVerdict::Incomparable);
    }

    #[test]
    fn overall_verdicts() {
        let lat: SublatticeBasis = "1,0,0;0,1,0".parse().unwrap();
        let row = |v| EquivalenceRow { lattice: lat, first: Err(String::new()), second: Err(String::new()), verdict: v };
        assert_eq!(overall(&[row(RowVerdict::Equal), row(RowVerdict::StructuralEqual)]), Verdict::Equivalent);
        assert_eq!(overall(&[row(RowVerdict::Equal), row(RowVerdict::Incomparable)]), Verdict::Inconclusive);
        assert_eq!(overall(&[row(RowVerdict::Inconclusive), row(RowVerdict::Distinct)]), Verdict::NotEquivalent);
    }
}
