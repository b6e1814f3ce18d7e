use crate::classify::SystemPresentation;
use crate::laurent::IntLaurentPoly;
use crate::lattice::{classify_lattice, planar_projection, LatticeCase, SublatticeBasis, Vec3};

use super::{g_twisted_relation, mahler_1d_jensen, mahler_2d, norm_product, EntropyError, MahlerValue, QuadratureConfig};

/// Entropy of the sub-action of a rank-two subgroup.
#[derive(Clone, Debug, PartialEq)]
pub enum EntropyResult {
    Finite(MahlerValue),
    /// An unspecified geometric multiple of `log M(g)`.
    MultipleOfLogMahlerG { base: MahlerValue, geometry_key: String, f_key: IntLaurentPoly },
    /// Sub-action inside the (u1, u2)-plane, described by its relation.
    PlanarStructural { f_key: IntLaurentPoly },
}

impl EntropyResult {
    pub fn variant_name(&self) -> &'static str {
        match self {
            EntropyResult::Finite(_) => "finite",
            EntropyResult::MultipleOfLogMahlerG { .. } => "multiple-of-log-mahler-g",
            EntropyResult::PlanarStructural { .. } => "planar-structural",
        }
    }

    /// The number attached to the result: the entropy, or the base `log M(g)`.
    pub fn value(&self) -> Option<MahlerValue> {
        match self {
            EntropyResult::Finite(v) | EntropyResult::MultipleOfLogMahlerG { base: v, .. } => Some(*v),
            EntropyResult::PlanarStructural { .. } => None,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            EntropyResult::Finite(v) => Some(v.value),
            _ => None,
        }
    }
}

/// Integer relation `F(w1, w2)` of the sub-action on the generic lattice with
/// exact basis `{n, m}`, `n_3 = 0 < m_3`: here `w1 = u^n` and `w2 = u^m`.
pub fn generic_relation(system: &SystemPresentation, n: Vec3, m: Vec3) -> Result<IntLaurentPoly, EntropyError> {
    let case = LatticeCase::Generic { n, m };
    let planar = planar_projection(&case).ok_or(EntropyError::Lattice(crate::lattice::LatticeError::Singular([
        [n[0], n[1]],
        [m[0], m[1]],
    ])))?;
    let fbar = norm_product(&system.f, &planar).map_err(|e| e.at("norm product"))?;
    // u^m = v ζ^{m3} on the component where u3 = ζ, so v = w2 ζ^{-m3}
    g_twisted_relation(&fbar, &system.g, -m[2]).map_err(|e| e.at("g-twisted relation"))
}

pub fn sublattice_entropy(
    system: &SystemPresentation,
    lattice: &SublatticeBasis,
    cfg: &QuadratureConfig,
) -> Result<EntropyResult, EntropyError> {
    match classify_lattice(lattice) {
        LatticeCase::Generic { n, m } => {
            let rel = generic_relation(system, n, m)?;
            let v = mahler_2d(&rel, cfg).map_err(|e| e.at("Mahler measure"))?;
            Ok(EntropyResult::Finite(v))
        }
        LatticeCase::AxisDegenerate { .. } => Ok(EntropyResult::MultipleOfLogMahlerG {
            base: mahler_1d_jensen(&system.g).map_err(|e| e.at("Mahler measure of g"))?,
            geometry_key: lattice.canonical().to_string(),
            f_key: system.f.canonical_relation(),
        }),
        LatticeCase::Planar => Ok(EntropyResult::PlanarStructural { f_key: system.f.canonical_relation() }),
    }
}
