use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::{CohomologyPresentation, PresentationError, ZModulePresentation};
use crate::charpair::{faces, CharPair};
use crate::lattice::{is_unimodular_set, json_int, IntMatrix, LatticeVector};
use crate::poly::Monomial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    /// Faces `σ` whose squarefree monomials `x(σ)` form the basis, by degree.
    pub faces: Vec<Vec<usize>>,
    /// Determinant of the images of the `x(σ)` in the K-ring coordinates.
    #[serde(serialize_with = "json_int::int")]
    pub kring_determinant: BigInt,
    /// Degrees where the greedy pass stalled and exhaustive search was used.
    pub exhaustive_degrees: Vec<u32>,
}

impl MonomialBasis {
    pub fn is_kring_basis(&self) -> bool {
        self.kring_determinant.abs() == BigInt::from(1)
    }
}

/// Picks squarefree face monomials forming a `Z`-basis of cohomology degree
/// by degree, then evaluates whether the same monomials are a basis of the
/// K-ring.
///
/// Candidates of each degree are tried in face order and kept while the
/// chosen images stay part of a `Z`-basis. If that stalls short of the rank,
/// every subset of the right size is tried.
pub fn monomial_basis(
    cp: &CharPair,
    cohomology: &CohomologyPresentation,
    kring: &ZModulePresentation,
) -> Result<MonomialBasis, PresentationError> {
    if !cohomology.is_torsion_free() {
        let torsion = cohomology.torsion_by_degree().concat();
        return Err(PresentationError::Torsion(torsion));
    }
    if !kring.is_torsion_free() {
        return Err(PresentationError::Torsion(kring.torsion()));
    }
    let d = cp.facets();
    let all_faces = faces(cp);
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    let mut exhaustive_degrees = Vec::new();
    for piece in &cohomology.degrees {
        let j = piece.degree as usize;
        let rank = piece.rank();
        if rank == 0 {
            continue;
        }
        let candidates: Vec<(&Vec<usize>, LatticeVector)> = all_faces
            .iter()
            .filter(|f| f.len() == j)
            .map(|f| {
                let image = piece
                    .image_of(&Monomial::squarefree(d, f))
                    .expect("face monomial of degree j");
                (f, LatticeVector::new(image))
            })
            .collect();

        let mut picked: Vec<usize> = Vec::new();
        let mut images: Vec<LatticeVector> = Vec::new();
        for (k, (_, v)) in candidates.iter().enumerate() {
            if picked.len() == rank {
                break;
            }
            images.push(v.clone());
            if is_unimodular_set(&images) {
                picked.push(k);
            } else {
                images.pop();
            }
        }
        if picked.len() < rank {
            exhaustive_degrees.push(piece.degree);
            picked = (0..candidates.len())
                .combinations(rank)
                .find(|combo| {
                    let vs: Vec<LatticeVector> =
                        combo.iter().map(|&k| candidates[k].1.clone()).collect();
                    is_unimodular_set(&vs)
                })
                .ok_or(PresentationError::NoBasis {
                    degree: piece.degree,
                })?;
        }
        chosen.extend(picked.into_iter().map(|k| candidates[k].0.clone()));
    }

    let rank = kring.rank();
    let rows: Vec<Vec<BigInt>> = chosen
        .iter()
        .map(|f| {
            kring
                .image_of(&Monomial::squarefree(d, f))
                .expect("face monomial of degree <= n")
        })
        .collect();
    let kring_determinant = if rows.len() == rank {
        IntMatrix::from_rows(rank, rows)
            .expect("row width")
            .determinant()
            .expect("square")
    } else {
        BigInt::from(0)
    };
    Ok(MonomialBasis {
        faces: chosen,
        kring_determinant,
        exhaustive_degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{to_char_pair, Fan};
    use crate::presentations::{build_relations, cohomology_presentation, kring_presentation};

    fn basis_of(fan: &Fan) -> MonomialBasis {
        let cp = to_char_pair(fan).unwrap();
        let kring = kring_presentation(&cp, &build_relations(&cp, 1).unwrap());
        monomial_basis(&cp, &cohomology_presentation(&cp), &kring).unwrap()
    }

    #[test]
    fn projective_line() {
        let b = basis_of(&Fan::projective_space(1));
        assert_eq!(b.faces, vec![vec![], vec![0]]);
        assert!(b.is_kring_basis());
    }

    #[test]
    fn projective_plane() {
        let b = basis_of(&Fan::projective_space(2));
        assert_eq!(b.faces.len(), 3);
        assert_eq!(b.faces[0], Vec::<usize>::new());
        assert_eq!(b.faces[1].len(), 1);
        assert_eq!(b.faces[2].len(), 2);
        assert!(b.is_kring_basis());
        assert!(b.exhaustive_degrees.is_empty());
    }

    #[test]
    fn hirzebruch_surfaces() {
        for a in 0..=3 {
            let b = basis_of(&Fan::hirzebruch(a));
            assert_eq!(b.faces.len(), 4);
            assert!(b.is_kring_basis(), "a = {a}: {b:?}");
        }
    }
}
