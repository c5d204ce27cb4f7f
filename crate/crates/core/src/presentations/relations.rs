use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::PresentationError;
use crate::charpair::{minimal_nonfaces, validate_char_pair, CharPair};
use crate::lattice::{pairing, LatticeVector};
use crate::poly::{power_product, reduce, IntPolynomial, Monomial, TruncatedRing};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KRelation {
    pub u: LatticeVector,
    pub z: IntPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRelation {
    pub u: LatticeVector,
    pub h: IntPolynomial,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationSet {
    pub u_radius: u32,
    pub sr_monomials: Vec<Monomial>,
    pub k_relations: Vec<KRelation>,
    pub linear_relations: Vec<LinearRelation>,
}

/// Nonzero `u ∈ Z^dim` with `max |u_i| <= radius`, one from each `±` pair
/// (first nonzero coordinate positive), ordered by max-norm and then
/// lexicographically.
pub fn dual_vectors(dim: usize, radius: u32) -> Vec<LatticeVector> {
    let r = radius as i64;
    let mut out: Vec<Vec<i64>> = (0..dim)
        .map(|_| -r..=r)
        .multi_cartesian_product()
        .filter(|u| u.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
        .collect();
    out.sort_by_key(|u| (u.iter().map(|x| x.abs()).max().unwrap_or(0), u.clone()));
    out.iter().map(|u| LatticeVector::from_i64s(u)).collect()
}

/// `z_u = ∏_{<u,v_i> > 0} (1 - y_i)^{<u,v_i>} - ∏_{<u,v_i> < 0} (1 - y_i)^{-<u,v_i>}`
/// in `ring`.
pub fn k_relation(cp: &CharPair, u: &LatticeVector, ring: &TruncatedRing) -> IntPolynomial {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (i, v) in cp.lambda().iter().enumerate() {
        let p = pairing(u, v).expect("u has the lattice dimension");
        let a = p.abs().to_u64().expect("pairing fits in u64");
        if p.is_positive() {
            positive.push((i, a));
        } else if p.is_negative() {
            negative.push((i, a));
        }
    }
    power_product(&positive, ring).sub(&power_product(&negative, ring))
}

/// `h_u = Σ <u, v_i> y_i`.
pub fn linear_form(cp: &CharPair, u: &LatticeVector) -> IntPolynomial {
    let d = cp.facets();
    IntPolynomial::from_terms(
        d,
        cp.lambda().iter().enumerate().map(|(i, v)| {
            let p: BigInt = pairing(u, v).expect("u has the lattice dimension");
            (Monomial::var(d, i), p)
        }),
    )
}

pub fn build_relations(cp: &CharPair, u_radius: u32) -> Result<RelationSet, PresentationError> {
    if u_radius == 0 {
        return Err(PresentationError::ZeroRadius);
    }
    let report = validate_char_pair(cp);
    if !report.passes() {
        return Err(PresentationError::InvalidPair(Box::new(report)));
    }
    let d = cp.facets();
    let ring = TruncatedRing::for_char_pair(cp, cp.dim() as u32);
    let sr_monomials = minimal_nonfaces(cp)
        .iter()
        .map(|s| Monomial::squarefree(d, s))
        .collect();
    let mut k_relations = Vec::new();
    let mut linear_relations = Vec::new();
    for u in dual_vectors(cp.dim(), u_radius) {
        let z = reduce(&k_relation(cp, &u, &ring), &ring);
        debug_assert!(z.constant_term().is_zero());
        k_relations.push(KRelation { u: u.clone(), z });
        let h = linear_form(cp, &u);
        linear_relations.push(LinearRelation { u, h });
    }
    Ok(RelationSet {
        u_radius,
        sr_monomials,
        k_relations,
        linear_relations,
    })
}
