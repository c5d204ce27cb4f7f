//! K-rings and cohomology rings of smooth complete fans and, more generally,
//! of characteristic pairs `(Q, Λ)` of torus manifolds, computed exactly as
//! finitely presented abelian groups.
//!
//! The pipeline: a [`fan::Fan`] is validated and turned into a
//! [`charpair::CharPair`]; [`presentations::build_relations`] produces the
//! Stanley–Reisner monomials and the relations
//!
//! ```text
//! z_u = ∏_{<u,v_i> > 0} (1 - y_i)^{<u,v_i>} - ∏_{<u,v_i> < 0} (1 - y_i)^{-<u,v_i>}
//! ```
//!
//! and [`presentations::adaptive_verify`] checks rank, freeness, the graded
//! comparison with cohomology, truncation soundness and a monomial basis.

pub mod charpair;
pub mod fan;
pub mod lattice;
pub mod poly;
pub mod presentations;

pub use charpair::{CharPair, CharPairData, ValidationReport};
pub use fan::{Fan, FanData, FanReport};
pub use lattice::{IntMatrix, LatticeVector, SnfResult};
pub use poly::{IntPolynomial, Monomial, TruncatedRing};
pub use presentations::{GradedRanks, VerificationReport, ZModulePresentation};
