//! Sparse integer polynomials in `y_0, ..., y_{d-1}` computed inside the
//! truncated face ring
//!
//! ```text
//! T = Z[y] / (monomials with non-face support, monomials of degree > bound)
//! ```
//!
//! Terms are kept in a canonical order: ascending total degree, and within a
//! degree lexicographically with `y_0` heaviest first.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::charpair::{CharPair, Mask};
use crate::lattice::json_int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no initial form")]
    ZeroPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Monomial(e)
    }

    /// Squarefree monomial `∏_{i ∈ set} y_i`.
    pub fn squarefree(vars: usize, set: &[usize]) -> Self {
        let mut e = vec![0; vars];
        for &i in set {
            e[i] = 1;
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }

    pub(crate) fn support_mask(&self) -> Mask {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "y{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPolynomial {
    pub fn zero(vars: usize) -> Self {
        IntPolynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        Self::monomial(Monomial::one(vars), BigInt::one())
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        let mut p = Self::zero(m.vars());
        p.add_term(m, c);
        p
    }

    pub fn var(vars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(vars, i), BigInt::one())
    }

    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&Monomial::one(self.vars))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        assert_eq!(m.vars(), self.vars, "variable count");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial {
            vars: self.vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> IntPolynomial {
        if k.is_zero() {
            return Self::zero(self.vars);
        }
        IntPolynomial {
            vars: self.vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn is_homogeneous_of_degree(&self, deg: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == deg)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Serialized as a list of `{"exponents": [...], "coeff": c}` in canonical
/// order.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exponents: &'a Monomial,
            #[serde(serialize_with = "json_int::int")]
            coeff: &'a BigInt,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&Term {
                exponents: m,
                coeff: c,
            })?;
        }
        seq.end()
    }
}

/// `Z[y_0..y_{d-1}]` modulo non-face monomials and all monomials of degree
/// above `degree_bound`.
#[derive(Clone, Debug)]
pub struct TruncatedRing {
    vars: usize,
    degree_bound: u32,
    faces: HashSet<Mask>,
}

impl TruncatedRing {
    /// `faces` must be closed under taking subsets.
    pub(crate) fn from_masks(vars: usize, degree_bound: u32, faces: HashSet<Mask>) -> Self {
        assert!(degree_bound >= 1, "degree bound must be positive");
        debug_assert!(faces.contains(&0));
        TruncatedRing {
            vars,
            degree_bound,
            faces,
        }
    }

    /// The face ring of `cp` truncated above `degree_bound`.
    pub fn for_char_pair(cp: &CharPair, degree_bound: u32) -> Self {
        Self::from_masks(cp.facets(), degree_bound, cp.face_masks())
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn survives(&self, m: &Monomial) -> bool {
        m.degree() <= self.degree_bound && self.faces.contains(&m.support_mask())
    }

    pub fn is_face(&self, set: &[usize]) -> bool {
        self.faces
            .contains(&set.iter().fold(0, |acc: Mask, &i| acc | (1 << i)))
    }

    /// Every surviving monomial of degree at most `max_degree`, in canonical
    /// order.
    pub fn monomials_up_to(&self, max_degree: u32) -> Vec<Monomial> {
        let max_degree = max_degree.min(self.degree_bound);
        let mut out = Vec::new();
        for &mask in &self.faces {
            let support: Vec<usize> = (0..self.vars).filter(|&i| mask & (1 << i) != 0).collect();
            if support.len() as u32 > max_degree {
                continue;
            }
            let mut exps = vec![0u32; self.vars];
            for &i in &support {
                exps[i] = 1;
            }
            let slack = max_degree - support.len() as u32;
            distribute(&support, 0, slack, &mut exps, &mut out);
        }
        out.sort();
        out
    }

    /// Surviving monomials of degree exactly `degree`.
    pub fn monomials_of_degree(&self, degree: u32) -> Vec<Monomial> {
        self.monomials_up_to(degree)
            .into_iter()
            .filter(|m| m.degree() == degree)
            .collect()
    }
}

/// Pushes every way of adding at most `slack` to the exponents in `support`
/// (from position `k` on).
fn distribute(support: &[usize], k: usize, slack: u32, exps: &mut [u32], out: &mut Vec<Monomial>) {
    if k == support.len() {
        out.push(Monomial(exps.to_vec()));
        return;
    }
    let i = support[k];
    for extra in 0..=slack {
        exps[i] += extra;
        distribute(support, k + 1, slack - extra, exps, out);
        exps[i] -= extra;
    }
}

/// Canonical representative of `p` in the truncated ring.
pub fn reduce(p: &IntPolynomial, ring: &TruncatedRing) -> IntPolynomial {
    IntPolynomial {
        vars: p.vars,
        terms: p
            .terms
            .iter()
            .filter(|(m, _)| ring.survives(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect(),
    }
}

pub fn multiply(p: &IntPolynomial, q: &IntPolynomial, ring: &TruncatedRing) -> IntPolynomial {
    let mut out = IntPolynomial::zero(p.vars);
    for (a, ca) in &p.terms {
        if !ring.survives(a) {
            continue;
        }
        for (b, cb) in &q.terms {
            if a.degree() + b.degree() > ring.degree_bound {
                // q's terms are ordered by degree
                break;
            }
            let m = a.mul(b);
            if ring.survives(&m) {
                out.add_term(m, ca * cb);
            }
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `∏ (1 - y_i)^{a_i}` in the truncated ring, reducing after every factor.
pub fn power_product(bases: &[(usize, u64)], ring: &TruncatedRing) -> IntPolynomial {
    let mut acc = IntPolynomial::one(ring.vars);
    for &(i, a) in bases {
        let top = a.min(ring.degree_bound as u64);
        let mut factor = IntPolynomial::zero(ring.vars);
        for k in 0..=top {
            let mut e = vec![0u32; ring.vars];
            e[i] = k as u32;
            let c = binomial(a, k);
            factor.add_term(Monomial(e), if k % 2 == 0 { c } else { -c });
        }
        acc = multiply(&acc, &reduce(&factor, ring), ring);
    }
    acc
}

/// The lowest-degree homogeneous part of `p`.
pub fn initial_form(p: &IntPolynomial) -> Result<IntPolynomial, PolyError> {
    let low = p
        .terms
        .keys()
        .next()
        .map(Monomial::degree)
        .ok_or(PolyError::ZeroPolynomial)?;
    Ok(IntPolynomial {
        vars: p.vars,
        terms: p
            .terms
            .iter()
            .take_while(|(m, _)| m.degree() == low)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;

    fn ring(faces: &[&[usize]], vars: usize, bound: u32) -> TruncatedRing {
        let dim = faces.iter().map(|f| f.len()).max().unwrap();
        let faces = faces.iter().map(|f| f.to_vec()).collect();
        let cp = CharPair::new(dim, vars, faces, vec![LatticeVector::unit(dim, 0); vars]).unwrap();
        TruncatedRing::for_char_pair(&cp, bound)
    }

    fn p1_ring() -> TruncatedRing {
        ring(&[&[0], &[1]], 2, 1)
    }

    fn p2_ring() -> TruncatedRing {
        ring(&[&[0, 1], &[1, 2], &[0, 2]], 3, 2)
    }

    fn y(vars: usize, exps: &[u32], c: i64) -> IntPolynomial {
        let mut e = exps.to_vec();
        e.resize(vars, 0);
        IntPolynomial::monomial(Monomial::new(e), BigInt::from(c))
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(&y(2, &[1, 1], 1), &p1_ring()).is_zero());
        assert!(reduce(&y(3, &[3], 1), &p2_ring()).is_zero());
        let p = y(3, &[1, 1, 0], 2)
            .add(&y(3, &[0, 0, 2], -1))
            .add(&y(3, &[1, 1, 1], 1));
        let r = reduce(&p, &p2_ring());
        assert_eq!(r, y(3, &[1, 1, 0], 2).add(&y(3, &[0, 0, 2], -1)));
        assert_eq!(r.to_string(), "2*y0*y1 - y2^2");
    }

    #[test]
    fn multiply_examples() {
        let r = p1_ring();
        let one = IntPolynomial::one(2);
        let a = one.sub(&IntPolynomial::var(2, 0));
        let b = one.add(&IntPolynomial::var(2, 0));
        assert_eq!(multiply(&a, &b, &r), one);
        assert_eq!(multiply(&a, &one, &r), reduce(&a, &r));

        let square = ring(&[&[0, 1], &[1, 2], &[2, 3], &[3, 0]], 4, 2);
        let prod = multiply(
            &IntPolynomial::var(4, 0),
            &IntPolynomial::var(4, 1),
            &square,
        );
        assert_eq!(prod, y(4, &[1, 1], 1));
        let killed = multiply(
            &IntPolynomial::var(4, 0),
            &IntPolynomial::var(4, 2),
            &square,
        );
        assert!(killed.is_zero());
    }

    #[test]
    fn power_product_examples() {
        let r = p2_ring();
        assert_eq!(power_product(&[(0, 1)], &r).to_string(), "1 - y0");
        assert_eq!(power_product(&[(0, 2)], &r).to_string(), "1 - 2*y0 + y0^2");
        assert_eq!(
            power_product(&[(0, 1), (1, 1)], &p1_ring()).to_string(),
            "1 - y0 - y1"
        );
        // exponent far above the bound: truncation absorbs the growth
        let big = power_product(&[(0, 40), (1, 7)], &r);
        assert_eq!(big.constant_term(), BigInt::one());
        assert_eq!(
            big.coefficient(&Monomial::new(vec![2, 0, 0])),
            BigInt::from(780)
        );
        assert_eq!(
            big.coefficient(&Monomial::new(vec![1, 1, 0])),
            BigInt::from(280)
        );
    }

    #[test]
    fn initial_form_examples() {
        let z = IntPolynomial::var(2, 1).sub(&IntPolynomial::var(2, 0));
        assert_eq!(initial_form(&z).unwrap(), z);
        let p = y(2, &[1], 3).add(&y(2, &[1, 1], 1));
        assert_eq!(initial_form(&p).unwrap(), y(2, &[1], 3));
        assert_eq!(
            initial_form(&IntPolynomial::zero(2)),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn monomial_universe() {
        // P^2: 1 + 3*2 (y_i, y_i^2) + 3 (y_i y_j) = 10
        assert_eq!(p2_ring().monomials_up_to(2).len(), 10);
        assert_eq!(p2_ring().monomials_of_degree(1).len(), 3);
        let ms = p2_ring().monomials_up_to(2);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ms[0], Monomial::one(3));
    }

    #[test]
    fn rendering() {
        assert_eq!(IntPolynomial::zero(2).to_string(), "0");
        assert_eq!(y(2, &[0, 0], -3).to_string(), "-3");
        let p = y(2, &[0, 1], 1).sub(&y(2, &[1, 0], 1));
        assert_eq!(p.to_string(), "-y0 + y1");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"[{"exponents":[1,0],"coeff":-1},{"exponents":[0,1],"coeff":1}]"#
        );
    }
}
