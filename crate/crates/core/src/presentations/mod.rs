//! Presented rings attached to a characteristic pair and the checks tying
//! them together.
//!
//! All rings are computed as finitely presented abelian groups over a finite
//! monomial basis: because every `y_i` is nilpotent of total order `n + 1`
//! in the K-ring, it suffices to work in the face ring truncated above
//! degree `n`. [`adaptive_verify`] re-checks that truncation on every run.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::charpair::{CharPairError, ValidationReport};
use crate::poly::PolyError;

mod basis;
mod cohomology;
mod kring;
mod relations;
mod verify;

pub use basis::{monomial_basis, MonomialBasis};
pub use cohomology::{cohomology_presentation, CohomologyPresentation, DegreePresentation};
pub use kring::{
    check_absorption, graded_ranks_of_kring, kring_presentation, AbsorptionCheck,
    ZModulePresentation,
};
pub use relations::{
    build_relations, dual_vectors, k_relation, linear_form, KRelation, LinearRelation, RelationSet,
};
pub use verify::{adaptive_verify, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("u radius must be at least 1")]
    ZeroRadius,
    #[error("characteristic pair rejected: {}", summarize(.0))]
    InvalidPair(Box<ValidationReport>),
    #[error(transparent)]
    CharPair(#[from] CharPairError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("quotient has torsion (invariant factors {0:?}); graded ranks are undefined")]
    Torsion(Vec<BigInt>),
    #[error("no squarefree monomials give a Z-basis of cohomology in degree {degree}")]
    NoBasis { degree: u32 },
}

fn summarize(report: &ValidationReport) -> String {
    report
        .witnesses
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Ranks indexed by degree `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GradedRanks {
    pub per_degree: Vec<usize>,
}

impl GradedRanks {
    pub fn total(&self) -> usize {
        self.per_degree.iter().sum()
    }
}

impl fmt::Display for GradedRanks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.per_degree.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}
