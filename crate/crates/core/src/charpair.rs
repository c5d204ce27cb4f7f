//! Characteristic pairs `(Q, Λ)`: the nerve of the facet covering of the
//! orbit space together with the circle direction attached to each facet.
//!
//! `Q` is represented only through its nerve, i.e. the list of maximal sets
//! of facets with nonempty common intersection. Faces of the nerve are the
//! subsets of these; `∅` is the face `Q` itself.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{is_primitive, is_unimodular_set, json_int, IntMatrix, LatticeVector};

/// Bitmask of a facet subset. Facet counts are capped at 64.
pub(crate) type Mask = u64;

pub const MAX_FACETS: usize = 64;

pub(crate) fn mask_of(set: &[usize]) -> Mask {
    set.iter().fold(0, |m, &i| m | (1 << i))
}

pub(crate) fn set_of(mask: Mask) -> Vec<usize> {
    (0..MAX_FACETS).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sorts index sets by size, then lexicographically.
pub(crate) fn sort_sets(sets: &mut [Vec<usize>]) {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharPairError {
    #[error("dim must be at least 1")]
    ZeroDimension,
    #[error("facets = {0} exceeds the supported maximum of 64")]
    TooManyFacets(usize),
    #[error("lambda has {found} entries, expected {expected} (facets)")]
    LambdaCount { expected: usize, found: usize },
    #[error("lambda[{index}] has {found} coordinates, expected {expected} (dim)")]
    LambdaDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("lambda[{0}] is the zero vector")]
    ZeroVector(usize),
    #[error("maximal_faces[{face}] contains index {index}, out of range for {facets} facets")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        facets: usize,
    },
    #[error("maximal_faces[{face}] repeats index {index}")]
    RepeatedIndex { face: usize, index: usize },
    #[error("maximal_faces[{face}] has {size} facets, more than dim = {dim}")]
    FaceTooLarge {
        face: usize,
        size: usize,
        dim: usize,
    },
    #[error("maximal_faces[{first}] and maximal_faces[{second}] are the same face")]
    DuplicateFace { first: usize, second: usize },
    #[error("facet {0} appears in no maximal face")]
    UnusedFacet(usize),
    #[error("maximal_faces is empty")]
    NoFaces,
    #[error("the nerve is not pure: maximal face {face:?} has {size} facets, expected {dim}")]
    NotPure {
        face: Vec<usize>,
        size: usize,
        dim: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPair {
    dim: usize,
    facets: usize,
    maximal_faces: Vec<Vec<usize>>,
    lambda: Vec<LatticeVector>,
}

/// On-disk shape of a characteristic pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharPairData {
    pub dim: usize,
    pub facets: usize,
    pub maximal_faces: Vec<Vec<usize>>,
    pub lambda: Vec<Vec<i64>>,
}

impl CharPair {
    /// Checks the structural invariants. Primitivity and unimodularity of
    /// `lambda` are not checked here; [`validate_char_pair`] reports them.
    pub fn new(
        dim: usize,
        facets: usize,
        maximal_faces: Vec<Vec<usize>>,
        lambda: Vec<LatticeVector>,
    ) -> Result<Self, CharPairError> {
        if dim == 0 {
            return Err(CharPairError::ZeroDimension);
        }
        if facets > MAX_FACETS {
            return Err(CharPairError::TooManyFacets(facets));
        }
        if lambda.len() != facets {
            return Err(CharPairError::LambdaCount {
                expected: facets,
                found: lambda.len(),
            });
        }
        for (index, v) in lambda.iter().enumerate() {
            if v.dim() != dim {
                return Err(CharPairError::LambdaDimension {
                    index,
                    expected: dim,
                    found: v.dim(),
                });
            }
            if v.is_zero() {
                return Err(CharPairError::ZeroVector(index));
            }
        }
        if maximal_faces.is_empty() {
            return Err(CharPairError::NoFaces);
        }
        let mut normalized = Vec::with_capacity(maximal_faces.len());
        for (fi, face) in maximal_faces.into_iter().enumerate() {
            let mut sorted = face.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(CharPairError::RepeatedIndex {
                        face: fi,
                        index: w[0],
                    });
                }
            }
            if let Some(&index) = sorted.iter().find(|&&i| i >= facets) {
                return Err(CharPairError::IndexOutOfRange {
                    face: fi,
                    index,
                    facets,
                });
            }
            if sorted.len() > dim {
                return Err(CharPairError::FaceTooLarge {
                    face: fi,
                    size: sorted.len(),
                    dim,
                });
            }
            if let Some(first) = normalized.iter().position(|f| *f == sorted) {
                return Err(CharPairError::DuplicateFace { first, second: fi });
            }
            normalized.push(sorted);
        }
        let used = normalized.iter().fold(0, |m, f| m | mask_of(f));
        if let Some(unused) = (0..facets).find(|&i| used & (1 << i) == 0) {
            return Err(CharPairError::UnusedFacet(unused));
        }
        Ok(CharPair {
            dim,
            facets,
            maximal_faces: normalized,
            lambda,
        })
    }

    pub fn from_data(data: &CharPairData) -> Result<Self, CharPairError> {
        let lambda = data
            .lambda
            .iter()
            .map(|v| LatticeVector::from_i64s(v))
            .collect();
        Self::new(data.dim, data.facets, data.maximal_faces.clone(), lambda)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> usize {
        self.facets
    }

    pub fn maximal_faces(&self) -> &[Vec<usize>] {
        &self.maximal_faces
    }

    pub fn lambda(&self) -> &[LatticeVector] {
        &self.lambda
    }

    pub(crate) fn face_masks(&self) -> HashSet<Mask> {
        let mut out = HashSet::new();
        for f in &self.maximal_faces {
            let m = mask_of(f);
            // every submask of m
            let mut sub = m;
            loop {
                out.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
        }
        out
    }

    pub fn is_face(&self, set: &[usize]) -> bool {
        let m = mask_of(set);
        self.maximal_faces.iter().any(|f| m & !mask_of(f) == 0)
    }

    /// Relabels facets: facet `i` becomes facet `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, CharPairError> {
        let mut lambda = vec![LatticeVector::zero(self.dim); self.facets];
        for (i, v) in self.lambda.iter().enumerate() {
            lambda[perm[i]] = v.clone();
        }
        let faces = self
            .maximal_faces
            .iter()
            .map(|f| f.iter().map(|&i| perm[i]).collect())
            .collect();
        Self::new(self.dim, self.facets, faces, lambda)
    }

    /// Applies a change of coordinates `v -> v * g` to every `Λ(i)`.
    pub fn transformed(&self, g: &IntMatrix) -> Result<Self, CharPairError> {
        let lambda = self
            .lambda
            .iter()
            .map(|v| v.transform(g).expect("square change of basis"))
            .collect();
        Self::new(self.dim, self.facets, self.maximal_faces.clone(), lambda)
    }

    pub fn to_data(&self) -> CharPairData {
        use num_traits::ToPrimitive;
        CharPairData {
            dim: self.dim,
            facets: self.facets,
            maximal_faces: self.maximal_faces.clone(),
            lambda: self
                .lambda
                .iter()
                .map(|v| {
                    v.coords()
                        .iter()
                        .map(|c| c.to_i64().expect("coordinate fits in i64"))
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharPairFinding {
    NotPure {
        face: Vec<usize>,
        size: usize,
    },
    ImprimitiveVector {
        facet: usize,
        vector: LatticeVector,
    },
    NotUnimodular {
        face: Vec<usize>,
        #[serde(serialize_with = "json_int::ints")]
        factors: Vec<BigInt>,
    },
}

impl fmt::Display for CharPairFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharPairFinding::NotPure { face, size } => {
                write!(f, "maximal face {} has only {size} facets", fmt_set(face))
            }
            CharPairFinding::ImprimitiveVector { facet, vector } => {
                write!(f, "lambda({facet}) = {vector} is not primitive")
            }
            CharPairFinding::NotUnimodular { face, factors } => {
                let fs: Vec<String> = factors.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "face {} is not part of a Z-basis (invariant factors [{}])",
                    fmt_set(face),
                    fs.join(",")
                )
            }
        }
    }
}

pub(crate) fn fmt_set(set: &[usize]) -> String {
    let parts: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_pure: bool,
    pub is_locally_standard: bool,
    pub witnesses: Vec<CharPairFinding>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.is_pure && self.is_locally_standard
    }
}

pub fn validate_char_pair(cp: &CharPair) -> ValidationReport {
    let mut witnesses = Vec::new();
    let mut is_pure = true;
    for face in &cp.maximal_faces {
        if face.len() != cp.dim {
            is_pure = false;
            witnesses.push(CharPairFinding::NotPure {
                face: face.clone(),
                size: face.len(),
            });
        }
    }
    let mut is_locally_standard = true;
    for (facet, v) in cp.lambda.iter().enumerate() {
        if !is_primitive(v).expect("nonzero by construction") {
            is_locally_standard = false;
            witnesses.push(CharPairFinding::ImprimitiveVector {
                facet,
                vector: v.clone(),
            });
        }
    }
    // subsets of a unimodular set are unimodular, so maximal faces suffice
    for face in &cp.maximal_faces {
        let vs: Vec<LatticeVector> = face.iter().map(|&i| cp.lambda[i].clone()).collect();
        if !is_unimodular_set(&vs) {
            is_locally_standard = false;
            let m = IntMatrix::from_vectors(cp.dim, &vs).expect("uniform dimension");
            let snf = crate::lattice::smith_normal_form(&m);
            let mut factors = snf.invariant_factors;
            factors.resize(vs.len(), BigInt::from(0));
            witnesses.push(CharPairFinding::NotUnimodular {
                face: face.clone(),
                factors,
            });
        }
    }
    ValidationReport {
        is_pure,
        is_locally_standard,
        witnesses,
    }
}

/// All faces of the nerve, `∅` included, sorted by size then lexicographically.
pub fn faces(cp: &CharPair) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = cp.face_masks().into_iter().map(set_of).collect();
    sort_sets(&mut out);
    out
}

/// Inclusion-minimal subsets of facets that are not faces.
pub fn minimal_nonfaces(cp: &CharPair) -> Vec<Vec<usize>> {
    let face_set = cp.face_masks();
    let mut found: HashSet<Mask> = HashSet::new();
    // a minimal non-face minus any element is a face, so extending every
    // face by one facet reaches all of them
    for &f in &face_set {
        for i in 0..cp.facets {
            let bit = 1 << i;
            if f & bit != 0 {
                continue;
            }
            let s = f | bit;
            if face_set.contains(&s) || found.contains(&s) {
                continue;
            }
            let minimal = set_of(s)
                .into_iter()
                .all(|j| face_set.contains(&(s & !(1 << j))));
            if minimal {
                found.insert(s);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().map(set_of).collect();
    sort_sets(&mut out);
    out
}

/// Number of vertices of `Q`, i.e. of maximal faces of a pure nerve.
pub fn euler_characteristic(cp: &CharPair) -> Result<usize, CharPairError> {
    if let Some(face) = cp.maximal_faces.iter().find(|f| f.len() != cp.dim) {
        return Err(CharPairError::NotPure {
            face: face.clone(),
            size: face.len(),
            dim: cp.dim,
        });
    }
    Ok(cp.maximal_faces.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(l2: [i64; 2]) -> CharPair {
        CharPair::new(
            2,
            4,
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            vec![
                LatticeVector::from_i64s(&[1, 0]),
                LatticeVector::from_i64s(&[0, 1]),
                LatticeVector::from_i64s(&l2),
                LatticeVector::from_i64s(&[0, -1]),
            ],
        )
        .unwrap()
    }

    fn p1() -> CharPair {
        CharPair::new(
            1,
            2,
            vec![vec![0], vec![1]],
            vec![
                LatticeVector::from_i64s(&[1]),
                LatticeVector::from_i64s(&[-1]),
            ],
        )
        .unwrap()
    }

    fn pn(n: usize) -> CharPair {
        let mut lambda: Vec<LatticeVector> = (0..n).map(|i| LatticeVector::unit(n, i)).collect();
        lambda.push(LatticeVector::from_i64s(&vec![-1; n]));
        let faces = (0..=n)
            .map(|skip| (0..=n).filter(|&i| i != skip).collect())
            .collect();
        CharPair::new(n, n + 1, faces, lambda).unwrap()
    }

    #[test]
    fn square_is_locally_standard() {
        let r = validate_char_pair(&square([1, 2]));
        assert!(r.is_pure && r.is_locally_standard, "{r:?}");
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn square_with_imprimitive_vector_is_rejected() {
        let r = validate_char_pair(&square([2, 0]));
        assert!(r.is_pure);
        assert!(!r.is_locally_standard);
        assert!(r.witnesses.contains(&CharPairFinding::ImprimitiveVector {
            facet: 2,
            vector: LatticeVector::from_i64s(&[2, 0])
        }));
        assert!(r.witnesses.iter().any(|w| matches!(
            w,
            CharPairFinding::NotUnimodular { face, factors }
                if face == &vec![1, 2] && factors == &vec![BigInt::from(1), BigInt::from(2)]
        )));
    }

    #[test]
    fn face_counts() {
        assert_eq!(faces(&square([1, 2])).len(), 9);
        assert_eq!(faces(&p1()), vec![vec![], vec![0], vec![1]]);
        for n in 1..=4 {
            assert_eq!(faces(&pn(n)).len(), (1 << (n + 1)) - 1);
        }
    }

    #[test]
    fn minimal_nonface_examples() {
        assert_eq!(minimal_nonfaces(&p1()), vec![vec![0, 1]]);
        assert_eq!(minimal_nonfaces(&pn(2)), vec![vec![0, 1, 2]]);
        assert_eq!(
            minimal_nonfaces(&square([1, 2])),
            vec![vec![0, 2], vec![1, 3]]
        );
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(euler_characteristic(&pn(2)).unwrap(), 3);
        assert_eq!(euler_characteristic(&square([1, 2])).unwrap(), 4);
        let impure = CharPair::new(
            2,
            3,
            vec![vec![0, 1], vec![2]],
            vec![
                LatticeVector::from_i64s(&[1, 0]),
                LatticeVector::from_i64s(&[0, 1]),
                LatticeVector::from_i64s(&[-1, -1]),
            ],
        )
        .unwrap();
        assert!(matches!(
            euler_characteristic(&impure),
            Err(CharPairError::NotPure { .. })
        ));
        assert!(!validate_char_pair(&impure).is_pure);
    }

    #[test]
    fn structural_errors() {
        let v = |a: i64, b: i64| LatticeVector::from_i64s(&[a, b]);
        assert_eq!(
            CharPair::new(2, 2, vec![vec![0, 2]], vec![v(1, 0), v(0, 1)]),
            Err(CharPairError::IndexOutOfRange {
                face: 0,
                index: 2,
                facets: 2
            })
        );
        assert_eq!(
            CharPair::new(2, 3, vec![vec![0, 1]], vec![v(1, 0), v(0, 1), v(1, 1)]),
            Err(CharPairError::UnusedFacet(2))
        );
        assert_eq!(
            CharPair::new(2, 2, vec![vec![0, 1]], vec![v(1, 0), v(0, 0)]),
            Err(CharPairError::ZeroVector(1))
        );
        assert!(matches!(
            CharPair::new(
                2,
                2,
                vec![vec![0, 1]],
                vec![v(1, 0), LatticeVector::from_i64s(&[1])]
            ),
            Err(CharPairError::LambdaDimension { index: 1, .. })
        ));
        assert!(matches!(
            CharPair::new(2, 2, vec![vec![0, 1], vec![1, 0]], vec![v(1, 0), v(0, 1)]),
            Err(CharPairError::DuplicateFace { .. })
        ));
    }
}
