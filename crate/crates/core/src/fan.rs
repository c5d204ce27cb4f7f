//! Simplicial fans in `N = Z^n`: validation of the fan axiom, smoothness and
//! completeness, and conversion into a [`CharPair`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charpair::{fmt_set, mask_of, set_of, sort_sets, CharPair, MAX_FACETS};
use crate::lattice::{
    is_primitive, is_unimodular_set, json_int, smith_normal_form, IntMatrix, LatticeVector,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("dim must be at least 1")]
    ZeroDimension,
    #[error("rays has {0} entries, more than the supported 64")]
    TooManyRays(usize),
    #[error("rays[{index}] has {found} coordinates, expected {expected} (dim)")]
    RayDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("rays[{0}] is the zero vector")]
    ZeroRay(usize),
    #[error("max_cones is empty")]
    NoCones,
    #[error("max_cones[{cone}] contains index {index}, out of range for {rays} rays")]
    IndexOutOfRange {
        cone: usize,
        index: usize,
        rays: usize,
    },
    #[error("max_cones[{cone}] repeats index {index}")]
    RepeatedIndex { cone: usize, index: usize },
    #[error("not a smooth complete fan: {}", summarize(.0))]
    Invalid(Box<FanReport>),
}

fn summarize(report: &FanReport) -> String {
    report
        .witnesses
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Vec<usize>>,
}

/// On-disk shape of a fan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanData {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Shape checks only; geometric problems are left to [`validate_fan`].
    pub fn new(
        dim: usize,
        rays: Vec<LatticeVector>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        if dim == 0 {
            return Err(FanError::ZeroDimension);
        }
        if rays.len() > MAX_FACETS {
            return Err(FanError::TooManyRays(rays.len()));
        }
        for (index, r) in rays.iter().enumerate() {
            if r.dim() != dim {
                return Err(FanError::RayDimension {
                    index,
                    expected: dim,
                    found: r.dim(),
                });
            }
            if r.is_zero() {
                return Err(FanError::ZeroRay(index));
            }
        }
        if max_cones.is_empty() {
            return Err(FanError::NoCones);
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (ci, cone) in max_cones.into_iter().enumerate() {
            let mut sorted = cone;
            sorted.sort_unstable();
            if let Some(&index) = sorted.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::IndexOutOfRange {
                    cone: ci,
                    index,
                    rays: rays.len(),
                });
            }
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(FanError::RepeatedIndex {
                    cone: ci,
                    index: w[0],
                });
            }
            cones.push(sorted);
        }
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
        })
    }

    pub fn from_data(data: &FanData) -> Result<Self, FanError> {
        let rays = data
            .rays
            .iter()
            .map(|r| LatticeVector::from_i64s(r))
            .collect();
        Self::new(data.dim, rays, data.max_cones.clone())
    }

    pub fn to_data(&self) -> FanData {
        use num_traits::ToPrimitive;
        FanData {
            dim: self.dim,
            rays: self
                .rays
                .iter()
                .map(|r| {
                    r.coords()
                        .iter()
                        .map(|c| c.to_i64().expect("fits"))
                        .collect()
                })
                .collect(),
            max_cones: self.max_cones.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Fan of `P^n`: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`, every `n`-subset
    /// a maximal cone.
    pub fn projective_space(n: usize) -> Self {
        let mut rays: Vec<LatticeVector> = (0..n).map(|i| LatticeVector::unit(n, i)).collect();
        rays.push(LatticeVector::from_i64s(&vec![-1; n]));
        let cones = (0..=n)
            .rev()
            .map(|skip| (0..=n).filter(|&i| i != skip).collect())
            .collect();
        Fan::new(n, rays, cones).expect("well-formed")
    }

    /// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
    pub fn hirzebruch(a: i64) -> Self {
        let rays = [[1, 0], [0, 1], [-1, a], [0, -1]]
            .iter()
            .map(|r| LatticeVector::from_i64s(r))
            .collect();
        Fan::new(
            2,
            rays,
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .expect("well-formed")
    }

    /// Product fan in `N ⊕ N'`. Rays of `self` come first.
    pub fn product(&self, other: &Fan) -> Self {
        let dim = self.dim + other.dim;
        let mut rays = Vec::with_capacity(self.rays.len() + other.rays.len());
        for r in &self.rays {
            let mut c = r.coords().to_vec();
            c.resize(dim, BigInt::zero());
            rays.push(LatticeVector::new(c));
        }
        for r in &other.rays {
            let mut c = vec![BigInt::zero(); self.dim];
            c.extend_from_slice(r.coords());
            rays.push(LatticeVector::new(c));
        }
        let shift = self.rays.len();
        let cones = self
            .max_cones
            .iter()
            .cartesian_product(&other.max_cones)
            .map(|(a, b)| {
                a.iter()
                    .copied()
                    .chain(b.iter().map(|i| i + shift))
                    .collect()
            })
            .collect();
        Fan::new(dim, rays, cones).expect("product of well-formed fans")
    }

    /// Relabels rays: ray `i` becomes ray `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut rays = vec![LatticeVector::zero(self.dim); self.rays.len()];
        for (i, r) in self.rays.iter().enumerate() {
            rays[perm[i]] = r.clone();
        }
        let cones = self
            .max_cones
            .iter()
            .map(|c| c.iter().map(|&i| perm[i]).collect())
            .collect();
        Fan::new(self.dim, rays, cones).expect("relabeling keeps shape")
    }

    /// Applies `v -> v * g` to every ray.
    pub fn transformed(&self, g: &IntMatrix) -> Self {
        let rays = self
            .rays
            .iter()
            .map(|r| r.transform(g).expect("square change of basis"))
            .collect();
        Fan::new(self.dim, rays, self.max_cones.clone()).expect("same shape")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FanFinding {
    ImprimitiveRay {
        ray: usize,
        vector: LatticeVector,
    },
    DuplicateRay {
        first: usize,
        second: usize,
    },
    WrongConeSize {
        cone: Vec<usize>,
        size: usize,
    },
    DegenerateCone {
        cone: Vec<usize>,
    },
    DuplicateCone {
        cone: Vec<usize>,
    },
    ImproperIntersection {
        first: Vec<usize>,
        second: Vec<usize>,
    },
    SingularCone {
        cone: Vec<usize>,
        #[serde(serialize_with = "json_int::ints")]
        factors: Vec<BigInt>,
    },
    Wall {
        wall: Vec<usize>,
        count: usize,
    },
    Disconnected {
        components: usize,
    },
}

impl FanFinding {
    /// Coarse classification used by callers that only care which check
    /// failed.
    pub fn class(&self) -> &'static str {
        match self {
            FanFinding::ImprimitiveRay { .. }
            | FanFinding::DuplicateRay { .. }
            | FanFinding::WrongConeSize { .. }
            | FanFinding::DegenerateCone { .. }
            | FanFinding::DuplicateCone { .. }
            | FanFinding::ImproperIntersection { .. } => "not_a_fan",
            FanFinding::SingularCone { .. } => "singular",
            FanFinding::Wall { .. } | FanFinding::Disconnected { .. } => "incomplete",
        }
    }
}

impl fmt::Display for FanFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanFinding::ImprimitiveRay { ray, vector } => {
                write!(f, "ray {ray} = {vector} is not primitive")
            }
            FanFinding::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            FanFinding::WrongConeSize { cone, size } => {
                write!(f, "maximal cone {} has {size} rays", fmt_set(cone))
            }
            FanFinding::DegenerateCone { cone } => {
                write!(f, "rays of cone {} are linearly dependent", fmt_set(cone))
            }
            FanFinding::DuplicateCone { cone } => {
                write!(f, "maximal cone {} is listed twice", fmt_set(cone))
            }
            FanFinding::ImproperIntersection { first, second } => write!(
                f,
                "cones {} and {} do not meet along a common face",
                fmt_set(first),
                fmt_set(second)
            ),
            FanFinding::SingularCone { cone, factors } => {
                let fs: Vec<String> = factors.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "cone {} is not unimodular (invariant factors [{}])",
                    fmt_set(cone),
                    fs.join(",")
                )
            }
            FanFinding::Wall { wall, count } => {
                let noun = if *count == 1 { "cone" } else { "cones" };
                write!(f, "wall {} lies in {count} maximal {noun}", fmt_set(wall))
            }
            FanFinding::Disconnected { components } => {
                write!(f, "wall-adjacency graph has {components} components")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanReport {
    pub is_fan: bool,
    /// `None` when `is_fan` is false.
    pub is_smooth: Option<bool>,
    /// `None` when `is_fan` is false.
    pub is_complete: Option<bool>,
    pub witnesses: Vec<FanFinding>,
}

impl FanReport {
    pub fn passes(&self) -> bool {
        self.is_fan && self.is_smooth == Some(true) && self.is_complete == Some(true)
    }
}

/// Every cone of the fan as a set of ray indices, `∅` included.
pub fn enumerate_faces(fan: &Fan) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    for cone in &fan.max_cones {
        let m = mask_of(cone);
        let mut sub = m;
        loop {
            seen.insert(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & m;
        }
    }
    let mut out: Vec<Vec<usize>> = seen.into_iter().map(set_of).collect();
    sort_sets(&mut out);
    out
}

pub fn validate_fan(fan: &Fan) -> FanReport {
    let mut witnesses = Vec::new();

    // (a) primitive, distinct rays
    for (ray, v) in fan.rays.iter().enumerate() {
        if !is_primitive(v).expect("nonzero by construction") {
            witnesses.push(FanFinding::ImprimitiveRay {
                ray,
                vector: v.clone(),
            });
        }
    }
    for (first, second) in (0..fan.rays.len()).tuple_combinations() {
        if fan.rays[first] == fan.rays[second] {
            witnesses.push(FanFinding::DuplicateRay { first, second });
        }
    }

    // (b) simplicial, full-dimensional maximal cones
    let mut seen = HashSet::new();
    for cone in &fan.max_cones {
        if !seen.insert(cone.clone()) {
            witnesses.push(FanFinding::DuplicateCone { cone: cone.clone() });
        }
        if cone.len() != fan.dim {
            witnesses.push(FanFinding::WrongConeSize {
                cone: cone.clone(),
                size: cone.len(),
            });
        } else if ray_matrix(fan, cone)
            .determinant()
            .expect("square")
            .is_zero()
        {
            witnesses.push(FanFinding::DegenerateCone { cone: cone.clone() });
        }
    }

    // (c) pairwise intersections, only meaningful once (a) and (b) hold
    if witnesses.is_empty() {
        for (i, j) in (0..fan.max_cones.len()).tuple_combinations() {
            let (a, b) = (&fan.max_cones[i], &fan.max_cones[j]);
            if !meet_in_common_face(fan, a, b) {
                witnesses.push(FanFinding::ImproperIntersection {
                    first: a.clone(),
                    second: b.clone(),
                });
            }
        }
    }

    if !witnesses.is_empty() {
        return FanReport {
            is_fan: false,
            is_smooth: None,
            is_complete: None,
            witnesses,
        };
    }

    // (d) smoothness
    let mut is_smooth = true;
    for cone in &fan.max_cones {
        let vs: Vec<LatticeVector> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
        if !is_unimodular_set(&vs) {
            is_smooth = false;
            let snf = smith_normal_form(&ray_matrix(fan, cone));
            witnesses.push(FanFinding::SingularCone {
                cone: cone.clone(),
                factors: snf.invariant_factors,
            });
        }
    }

    // (e) completeness via walls
    let mut is_complete = true;
    let walls = walls(fan);
    for (wall, cones) in &walls {
        if cones.len() != 2 {
            is_complete = false;
            witnesses.push(FanFinding::Wall {
                wall: wall.clone(),
                count: cones.len(),
            });
        }
    }
    let components = adjacency_components(fan.max_cones.len(), &walls);
    if components > 1 {
        is_complete = false;
        witnesses.push(FanFinding::Disconnected { components });
    }

    FanReport {
        is_fan: true,
        is_smooth: Some(is_smooth),
        is_complete: Some(is_complete),
        witnesses,
    }
}

/// Walls (`n-1`-subsets of maximal cones) and the maximal cones containing
/// each, by index into `max_cones`.
pub fn walls(fan: &Fan) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut out: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        for skip in 0..cone.len() {
            let wall: Vec<usize> = cone
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &r)| r)
                .collect();
            out.entry(wall).or_default().push(ci);
        }
    }
    out
}

fn adjacency_components(cones: usize, walls: &BTreeMap<Vec<usize>, Vec<usize>>) -> usize {
    let mut parent: Vec<usize> = (0..cones).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for members in walls.values() {
        for w in members.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    (0..cones).filter(|&c| find(&mut parent, c) == c).count()
}

fn ray_matrix(fan: &Fan, cone: &[usize]) -> IntMatrix {
    let vs: Vec<LatticeVector> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
    IntMatrix::from_vectors(fan.dim, &vs).expect("uniform dimension")
}

/// Decides whether two full-dimensional simplicial cones intersect exactly in
/// the cone spanned by their common rays.
///
/// Write each ray `b` of the second cone that is not shared in the
/// barycentric coordinates of the first cone and keep the coordinates `λ(b)`
/// along the non-shared rays `A` of the first cone. A point of the
/// intersection outside the common face exists iff some `β ≥ 0, β ≠ 0` has
/// `Σ β_b λ(b) ≥ 0`. That polyhedral cone is pointed, so it is nonzero iff it
/// has an extreme ray; extreme rays are cut out by `m - 1` tight constraints.
fn meet_in_common_face(fan: &Fan, first: &[usize], second: &[usize]) -> bool {
    let own: Vec<usize> = first
        .iter()
        .copied()
        .filter(|i| !second.contains(i))
        .collect();
    let other: Vec<usize> = second
        .iter()
        .copied()
        .filter(|i| !first.contains(i))
        .collect();
    let m = other.len();
    if m == 0 {
        return true;
    }
    let basis = ray_matrix(fan, first);
    let det = basis.determinant().expect("square");
    let adj = basis.adjugate().expect("square");
    let sign = det.signum();
    // positions of `own` rays inside `first`
    let own_pos: Vec<usize> = own
        .iter()
        .map(|r| first.iter().position(|x| x == r).expect("subset"))
        .collect();
    // lambda[a][b]: coordinate of ray other[b] along own[a], scaled by |det|
    let lambda: Vec<Vec<BigInt>> = {
        let coords: Vec<LatticeVector> = other
            .iter()
            .map(|&b| fan.rays[b].transform(&adj).expect("dims").scaled(&sign))
            .collect();
        own_pos
            .iter()
            .map(|&p| coords.iter().map(|c| c.coords()[p].clone()).collect())
            .collect()
    };
    // constraints: β_b >= 0 (identity rows), then λ β >= 0
    let mut constraints: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    constraints.extend(lambda);
    let satisfies = |beta: &[BigInt]| {
        constraints.iter().all(|row| {
            let s: BigInt = row.iter().zip(beta).map(|(a, b)| a * b).sum();
            !s.is_negative()
        })
    };
    for tight in (0..constraints.len()).combinations(m - 1) {
        let rows: Vec<Vec<BigInt>> = tight.iter().map(|&k| constraints[k].clone()).collect();
        let Some(k) = kernel_vector(m, &rows) else {
            continue;
        };
        let neg: Vec<BigInt> = k.iter().map(|x| -x).collect();
        if satisfies(&k) || satisfies(&neg) {
            return false;
        }
    }
    true
}

/// Generator of the kernel of an `(m-1) x m` integer matrix of full rank,
/// given by signed maximal minors. `None` when the rank is deficient.
fn kernel_vector(m: usize, rows: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    let k: Vec<BigInt> = (0..m)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = IntMatrix::from_rows(m - 1, minor)
                .expect("minor shape")
                .determinant()
                .expect("square");
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    (!k.iter().all(Zero::is_zero)).then_some(k)
}

/// Translates a smooth complete fan into its characteristic pair: facets are
/// rays, the nerve's maximal faces are the maximal cones, `Λ(i)` is ray `i`.
pub fn to_char_pair(fan: &Fan) -> Result<CharPair, FanError> {
    let report = validate_fan(fan);
    if !report.passes() {
        return Err(FanError::Invalid(Box::new(report)));
    }
    Ok(CharPair::new(
        fan.dim,
        fan.rays.len(),
        fan.max_cones.clone(),
        fan.rays.clone(),
    )
    .expect("a valid fan satisfies the pair invariants"))
}
