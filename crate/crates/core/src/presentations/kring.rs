use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::relations::k_relation;
use super::{GradedRanks, PresentationError, RelationSet};
use crate::charpair::CharPair;
use crate::lattice::{smith_normal_form, Cokernel, IntMatrix, RowLattice, SnfResult};
use crate::poly::{multiply, IntPolynomial, Monomial, TruncatedRing};

/// The K-ring as `Z^{basis} / relations`.
#[derive(Clone, Debug, Serialize)]
pub struct ZModulePresentation {
    pub u_radius: u32,
    pub basis_monomials: Vec<Monomial>,
    pub relation_matrix: IntMatrix,
    #[serde(skip)]
    cokernel: Cokernel,
    snf: SnfResult,
}

impl ZModulePresentation {
    pub fn snf(&self) -> &SnfResult {
        &self.snf
    }

    /// Rank of the quotient group.
    pub fn rank(&self) -> usize {
        self.cokernel.free_rank()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.cokernel.torsion()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.cokernel.is_torsion_free()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.basis_monomials.binary_search(m).ok()
    }

    /// Coordinates of the class of `m` in the free part `Z^rank`.
    pub fn image_of(&self, m: &Monomial) -> Option<Vec<BigInt>> {
        self.index_of(m).map(|i| self.cokernel.generator_image(i))
    }

    /// Coordinates of the class of an arbitrary polynomial supported on the
    /// basis.
    pub fn image_of_polynomial(&self, p: &IntPolynomial) -> Option<Vec<BigInt>> {
        let mut x = vec![BigInt::zero(); self.basis_monomials.len()];
        for (m, c) in p.terms() {
            x[self.index_of(m)?] += c;
        }
        Some(self.cokernel.free_coordinates(&x))
    }
}

/// Rows `m * g` for every multiplier `m` and generator `g`, written in the
/// coordinates given by `index`. Zero rows and repeats (up to sign) dropped.
pub(crate) fn relation_rows(
    ring: &TruncatedRing,
    generators: &[IntPolynomial],
    multipliers: &[Monomial],
    index: &HashMap<Monomial, usize>,
) -> Vec<Vec<BigInt>> {
    let width = index.len();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for g in generators {
        for m in multipliers {
            let p = multiply(&IntPolynomial::monomial(m.clone(), 1.into()), g, ring);
            if p.is_zero() {
                continue;
            }
            let mut row = vec![BigInt::zero(); width];
            for (mono, c) in p.terms() {
                row[index[mono]] = c.clone();
            }
            if row
                .iter()
                .find(|x| !x.is_zero())
                .is_some_and(Signed::is_negative)
            {
                row.iter_mut().for_each(|x| *x = -&*x);
            }
            if seen.insert(row.clone()) {
                rows.push(row);
            }
        }
    }
    rows
}

fn index_map(basis: &[Monomial]) -> HashMap<Monomial, usize> {
    basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect()
}

/// The ideal generated by the `z_u` in the truncated face ring is spanned
/// by the products `m * z_u`, `m` a face monomial of degree `<= n - 1`
/// (degree-`n` multipliers give zero since `z_u` has no constant term).
pub fn kring_presentation(cp: &CharPair, rels: &RelationSet) -> ZModulePresentation {
    let n = cp.dim() as u32;
    let ring = TruncatedRing::for_char_pair(cp, n);
    let basis = ring.monomials_up_to(n);
    let index = index_map(&basis);
    let multipliers = ring.monomials_up_to(n - 1);
    let generators: Vec<IntPolynomial> = rels.k_relations.iter().map(|k| k.z.clone()).collect();
    let rows = relation_rows(&ring, &generators, &multipliers, &index);
    let relation_matrix = IntMatrix::from_rows(basis.len(), rows).expect("row width");
    let cokernel = Cokernel::new(&relation_matrix);
    let snf = cokernel.snf().clone();
    ZModulePresentation {
        u_radius: rels.u_radius,
        basis_monomials: basis,
        relation_matrix,
        cokernel,
        snf,
    }
}

/// Ranks of `R_j / R_{j+1}`, where `R_j` is generated by the classes of basis
/// monomials of degree `>= j`.
pub fn graded_ranks_of_kring(
    cp: &CharPair,
    pres: &ZModulePresentation,
) -> Result<GradedRanks, PresentationError> {
    if !pres.is_torsion_free() {
        return Err(PresentationError::Torsion(pres.torsion()));
    }
    let n = cp.dim();
    let rank = pres.rank();
    let filtration_rank = |j: usize| {
        let rows: Vec<Vec<BigInt>> = pres
            .basis_monomials
            .iter()
            .filter(|m| m.degree() as usize >= j)
            .map(|m| pres.image_of(m).expect("basis monomial"))
            .collect();
        smith_normal_form(&IntMatrix::from_rows(rank, rows).expect("row width")).rank
    };
    let ranks: Vec<usize> = (0..=n + 1).map(filtration_rank).collect();
    Ok(GradedRanks {
        per_degree: ranks.windows(2).map(|w| w[0] - w[1]).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsorptionCheck {
    pub holds: bool,
    /// Degree-`n+1` face monomials outside the relation span.
    pub outside: Vec<Monomial>,
}

/// Redoes the K-ring computation truncated one degree higher and checks that
/// every degree-`n+1` face monomial already lies in the relation lattice.
///
/// Membership is decided by Smith invariants: `L ⊆ L + E` with equal rank
/// and equal invariant factors forces `L = L + E`.
pub fn check_absorption(cp: &CharPair, rels: &RelationSet) -> AbsorptionCheck {
    let n = cp.dim() as u32;
    let ring = TruncatedRing::for_char_pair(cp, n + 1);
    let basis = ring.monomials_up_to(n + 1);
    let index = index_map(&basis);
    let multipliers = ring.monomials_up_to(n);
    // z_u must be recomputed: the stored ones were truncated at degree n
    let generators: Vec<IntPolynomial> = rels
        .k_relations
        .iter()
        .map(|k| k_relation(cp, &k.u, &ring))
        .collect();
    let mut lattice = RowLattice::new(basis.len());
    for row in relation_rows(&ring, &generators, &multipliers, &index) {
        lattice.insert(row);
    }
    let base = smith_normal_form(&lattice.to_matrix());
    let top: Vec<&Monomial> = basis.iter().filter(|m| m.degree() == n + 1).collect();
    let unit = |m: &Monomial| {
        let mut e = vec![BigInt::zero(); basis.len()];
        e[index[m]] = 1.into();
        e
    };
    let mut extended = lattice.clone();
    for m in &top {
        extended.insert(unit(m));
    }
    if smith_normal_form(&extended.to_matrix()) == base {
        return AbsorptionCheck {
            holds: true,
            outside: Vec::new(),
        };
    }
    let outside = top
        .into_iter()
        .filter(|m| {
            let mut one = lattice.clone();
            one.insert(unit(m));
            smith_normal_form(&one.to_matrix()) != base
        })
        .cloned()
        .collect();
    AbsorptionCheck {
        holds: false,
        outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{to_char_pair, Fan};
    use crate::presentations::build_relations;

    #[test]
    fn p1_presentation() {
        let cp = to_char_pair(&Fan::projective_space(1)).unwrap();
        let pres = kring_presentation(&cp, &build_relations(&cp, 1).unwrap());
        assert_eq!(pres.basis_monomials.len(), 3);
        assert_eq!(pres.relation_matrix.rows(), 1);
        assert_eq!(pres.rank(), 2);
        assert!(pres.is_torsion_free());
        let y0 = pres.image_of(&Monomial::var(2, 0)).unwrap();
        let y1 = pres.image_of(&Monomial::var(2, 1)).unwrap();
        assert_eq!(y0, y1);
        assert_eq!(
            graded_ranks_of_kring(&cp, &pres).unwrap().per_degree,
            vec![1, 1]
        );
    }

    #[test]
    fn p2_presentation() {
        let cp = to_char_pair(&Fan::projective_space(2)).unwrap();
        let pres = kring_presentation(&cp, &build_relations(&cp, 1).unwrap());
        assert_eq!(pres.rank(), 3);
        assert!(pres.is_torsion_free());
        assert_eq!(
            graded_ranks_of_kring(&cp, &pres).unwrap().per_degree,
            vec![1, 1, 1]
        );
    }

    #[test]
    fn absorption_on_small_fans() {
        for fan in [
            Fan::projective_space(1),
            Fan::projective_space(2),
            Fan::hirzebruch(1),
        ] {
            let cp = to_char_pair(&fan).unwrap();
            let rels = build_relations(&cp, 1).unwrap();
            let check = check_absorption(&cp, &rels);
            assert!(check.holds, "{check:?}");
        }
    }

    #[test]
    fn absorption_fails_without_relations() {
        let cp = to_char_pair(&Fan::projective_space(1)).unwrap();
        let mut rels = build_relations(&cp, 1).unwrap();
        rels.k_relations.clear();
        let pres = kring_presentation(&cp, &rels);
        assert_eq!(pres.rank(), 3);
        let check = check_absorption(&cp, &rels);
        assert!(!check.holds);
        assert_eq!(
            check.outside,
            vec![Monomial::new(vec![2, 0]), Monomial::new(vec![0, 2])]
        );
    }

    #[test]
    fn torsion_blocks_graded_ranks() {
        // a fake relation 2*y0 produces Z/2 torsion
        let cp = to_char_pair(&Fan::projective_space(1)).unwrap();
        let mut rels = build_relations(&cp, 1).unwrap();
        rels.k_relations[0].z = IntPolynomial::var(2, 0).scale(&BigInt::from(2));
        let pres = kring_presentation(&cp, &rels);
        assert!(!pres.is_torsion_free());
        assert_eq!(pres.torsion(), vec![BigInt::from(2)]);
        assert!(matches!(
            graded_ranks_of_kring(&cp, &pres),
            Err(PresentationError::Torsion(_))
        ));
    }
}
