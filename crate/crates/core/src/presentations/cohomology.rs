use num_bigint::BigInt;
use serde::Serialize;

use super::kring::relation_rows;
use super::relations::linear_form;
use super::GradedRanks;
use crate::charpair::CharPair;
use crate::lattice::{Cokernel, IntMatrix, LatticeVector, SnfResult};
use crate::poly::{IntPolynomial, Monomial, TruncatedRing};

/// One graded piece: degree-`j` face monomials modulo `m * h_u` with
/// `deg m = j - 1`.
#[derive(Clone, Debug, Serialize)]
pub struct DegreePresentation {
    pub degree: u32,
    pub basis: Vec<Monomial>,
    pub relation_matrix: IntMatrix,
    #[serde(skip)]
    cokernel: Cokernel,
    snf: SnfResult,
}

impl DegreePresentation {
    pub fn snf(&self) -> &SnfResult {
        &self.snf
    }

    pub fn rank(&self) -> usize {
        self.cokernel.free_rank()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.cokernel.torsion()
    }

    pub fn image_of(&self, m: &Monomial) -> Option<Vec<BigInt>> {
        self.basis
            .binary_search(m)
            .ok()
            .map(|i| self.cokernel.generator_image(i))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyPresentation {
    pub degrees: Vec<DegreePresentation>,
}

impl CohomologyPresentation {
    pub fn ranks(&self) -> GradedRanks {
        GradedRanks {
            per_degree: self.degrees.iter().map(DegreePresentation::rank).collect(),
        }
    }

    pub fn is_torsion_free(&self) -> bool {
        self.degrees.iter().all(|d| d.cokernel.is_torsion_free())
    }

    pub fn torsion_by_degree(&self) -> Vec<Vec<BigInt>> {
        self.degrees
            .iter()
            .map(DegreePresentation::torsion)
            .collect()
    }
}

/// The Stanley–Reisner ring modulo the linear forms, one Smith normal form per
/// degree. Non-face monomials never enter the basis, which accounts for the
/// Stanley–Reisner relations.
pub fn cohomology_presentation(cp: &CharPair) -> CohomologyPresentation {
    let n = cp.dim() as u32;
    let ring = TruncatedRing::for_char_pair(cp, n);
    // h_u is linear in u, so the standard basis of M suffices
    let linear: Vec<IntPolynomial> = (0..cp.dim())
        .map(|k| linear_form(cp, &LatticeVector::unit(cp.dim(), k)))
        .collect();
    let degrees = (0..=n)
        .map(|j| {
            let basis = ring.monomials_of_degree(j);
            let index = basis
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, m)| (m, i))
                .collect();
            let rows = if j == 0 {
                Vec::new()
            } else {
                relation_rows(&ring, &linear, &ring.monomials_of_degree(j - 1), &index)
            };
            let relation_matrix = IntMatrix::from_rows(basis.len(), rows).expect("row width");
            let cokernel = Cokernel::new(&relation_matrix);
            let snf = cokernel.snf().clone();
            DegreePresentation {
                degree: j,
                basis,
                relation_matrix,
                cokernel,
                snf,
            }
        })
        .collect();
    CohomologyPresentation { degrees }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{to_char_pair, Fan};

    fn ranks(fan: &Fan) -> Vec<usize> {
        let cp = to_char_pair(fan).unwrap();
        let coh = cohomology_presentation(&cp);
        assert!(coh.is_torsion_free());
        coh.ranks().per_degree
    }

    #[test]
    fn projective_plane() {
        assert_eq!(ranks(&Fan::projective_space(2)), vec![1, 1, 1]);
    }

    #[test]
    fn quadric_surface() {
        let f = Fan::projective_space(1).product(&Fan::projective_space(1));
        assert_eq!(ranks(&f), vec![1, 2, 1]);
    }

    #[test]
    fn degree_zero_is_one() {
        for fan in [Fan::projective_space(3), Fan::hirzebruch(2)] {
            assert_eq!(ranks(&fan)[0], 1);
        }
    }
}
