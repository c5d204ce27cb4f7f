//! Exact integer linear algebra over `N = Z^n` and its dual `M`.
//!
//! Everything here is arbitrary precision. The central routine is the Smith
//! normal form, which drives rank computations, unimodularity tests and the
//! structure of every quotient group the crate builds.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero vector does not determine a ray")]
    ZeroVector,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix shape {rows}x{cols} does not match {entries} entries")]
    Shape {
        rows: usize,
        cols: usize,
        entries: usize,
    },
}

/// A point of `Z^n`, used both for `N` and for its dual `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticeVector(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); dim])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn negated(&self) -> Self {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }

    /// Coordinate-wise sum; panics on a dimension mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Image under `x -> x * m` (row vector times matrix).
    pub fn transform(&self, m: &IntMatrix) -> Result<Self, LatticeError> {
        if m.rows() != self.dim() {
            return Err(LatticeError::DimensionMismatch {
                left: self.dim(),
                right: m.rows(),
            });
        }
        let mut out = vec![BigInt::zero(); m.cols()];
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += x * m.get(i, j);
            }
        }
        Ok(LatticeVector(out))
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector::from_i64s(&v)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        json_int::ints(&self.0, s)
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if rows * cols != entries.len() {
            return Err(LatticeError::Shape {
                rows,
                cols,
                entries: entries.len(),
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from explicit rows; `cols` fixes the width even when
    /// there are no rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::DimensionMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
            entries.extend(r);
        }
        Ok(IntMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(cols, rows).expect("ragged rows")
    }

    /// Stacks the vectors as rows. All vectors must share one dimension.
    pub fn from_vectors(dim: usize, vs: &[LatticeVector]) -> Result<Self, LatticeError> {
        Self::from_rows(dim, vs.iter().map(|v| v.coords().to_vec()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.row_iter().map(<[BigInt]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<Self, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination. `None` when the
    /// matrix is not square.
    pub fn determinant(&self) -> Option<BigInt> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Some(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Some(sign * &a[n - 1][n - 1])
    }

    /// Classical adjugate, so that `m * adj(m) = det(m) * I`.
    pub fn adjugate(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let c = minor.determinant().expect("square minor");
                let c = if (i + j) % 2 == 0 { c } else { -c };
                // adj = transpose of the cofactor matrix
                adj.set(j, i, c);
            }
        }
        Some(adj)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let rows = (0..self.rows)
            .filter(|&i| i != skip_row)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| j != skip_col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect();
        Self::from_rows(self.cols.saturating_sub(1), rows).expect("minor shape")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in self.row_iter() {
            seq.serialize_element(&json_int::Row(r))?;
        }
        seq.end()
    }
}

/// Rank and invariant factors `d_1 | d_2 | ... | d_r` of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfResult {
    pub rank: usize,
    #[serde(serialize_with = "json_int::ints")]
    pub invariant_factors: Vec<BigInt>,
}

impl SnfResult {
    pub fn all_units(&self) -> bool {
        self.invariant_factors.iter().all(One::is_one)
    }

    /// Factors greater than one: the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

/// Smith normal form together with the column transform `V` such that
/// `U * m * V = diag(d_1, ..., d_r, 0, ...)` for some unimodular `U`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub snf: SnfResult,
    pub col_transform: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let rows = compress_rows(m.cols(), m.row_iter().map(<[BigInt]>::to_vec));
    diagonalize(rows, m.cols(), false).0
}

pub fn smith_decomposition(m: &IntMatrix) -> SmithDecomposition {
    let rows = compress_rows(m.cols(), m.row_iter().map(<[BigInt]>::to_vec));
    let (snf, v) = diagonalize(rows, m.cols(), true);
    SmithDecomposition {
        snf,
        col_transform: v.expect("transform was tracked"),
    }
}

/// Replaces a row list by an echelon basis of the lattice it spans. Row
/// operations are unimodular, so Smith invariants are unchanged.
fn compress_rows(width: usize, rows: impl Iterator<Item = Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut lat = RowLattice::new(width);
    for r in rows {
        lat.insert(r);
    }
    lat.into_rows()
}

/// Incrementally maintained echelon basis of a sublattice of `Z^width`.
///
/// Each stored row has a positive leading entry, and leading columns are
/// distinct.
#[derive(Clone, Debug)]
pub struct RowLattice {
    width: usize,
    pivots: BTreeMap<usize, Vec<BigInt>>,
}

impl RowLattice {
    pub fn new(width: usize) -> Self {
        RowLattice {
            width,
            pivots: BTreeMap::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn insert(&mut self, mut v: Vec<BigInt>) {
        assert_eq!(v.len(), self.width, "row width");
        let mut c = 0;
        loop {
            while c < self.width && v[c].is_zero() {
                c += 1;
            }
            if c == self.width {
                return;
            }
            let Some(p) = self.pivots.get_mut(&c) else {
                if v[c].is_negative() {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                self.pivots.insert(c, v);
                return;
            };
            let (q, r) = v[c].div_rem(&p[c]);
            if r.is_zero() {
                for j in c..self.width {
                    if !p[j].is_zero() {
                        v[j] -= &q * &p[j];
                    }
                }
            } else {
                let e = v[c].extended_gcd(&p[c]);
                let a = &v[c] / &e.gcd;
                let b = &p[c] / &e.gcd;
                for j in c..self.width {
                    let new_p = &e.x * &v[j] + &e.y * &p[j];
                    let new_v = &b * &v[j] - &a * &p[j];
                    p[j] = new_p;
                    v[j] = new_v;
                }
            }
            c += 1;
        }
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.pivots.into_values().collect()
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.width, self.pivots.values().cloned().collect())
            .expect("rows have lattice width")
    }
}

fn min_abs_entry(a: &[Vec<BigInt>], t: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().take(cols).skip(t) {
            if x.is_zero() {
                continue;
            }
            if x.magnitude().is_one() {
                return Some((i, j));
            }
            if best.is_none_or(|(bi, bj)| x.magnitude() < a[bi][bj].magnitude()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], v: &mut Option<Vec<Vec<BigInt>>>, j: usize, k: usize) {
    if j == k {
        return;
    }
    for row in a.iter_mut() {
        row.swap(j, k);
    }
    if let Some(v) = v {
        for row in v.iter_mut() {
            row.swap(j, k);
        }
    }
}

/// `row[i] -= q * row[t]`, restricted to columns `>= from`.
fn row_axpy(a: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt, from: usize) {
    let (src, dst) = if i > t {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[t], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(t);
        (&hi[0], &mut lo[i])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()).skip(from) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// `col[j] -= q * col[t]` on the working matrix (rows from `from`) and on
/// the tracked transform (all rows).
fn col_axpy(
    a: &mut [Vec<BigInt>],
    v: &mut Option<Vec<Vec<BigInt>>>,
    j: usize,
    t: usize,
    q: &BigInt,
    from: usize,
) {
    for row in a.iter_mut().skip(from) {
        if !row[t].is_zero() {
            let delta = q * &row[t];
            row[j] -= delta;
        }
    }
    if let Some(v) = v {
        for row in v.iter_mut() {
            if !row[t].is_zero() {
                let delta = q * &row[t];
                row[j] -= delta;
            }
        }
    }
}

fn diagonalize(
    mut a: Vec<Vec<BigInt>>,
    cols: usize,
    track: bool,
) -> (SnfResult, Option<IntMatrix>) {
    let rows = a.len();
    let mut v: Option<Vec<Vec<BigInt>>> = track.then(|| IntMatrix::identity(cols).to_rows());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        let Some((pi, pj)) = min_abs_entry(&a, t, cols) else {
            break;
        };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, t, pj);
        loop {
            let mut leftover: Option<(usize, usize)> = None;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q, t);
                if !a[i][t].is_zero()
                    && leftover.is_none_or(|(r, c)| a[i][t].magnitude() < a[r][c].magnitude())
                {
                    leftover = Some((i, t));
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, &mut v, j, t, &q, t);
                if !a[t][j].is_zero()
                    && leftover.is_none_or(|(r, c)| a[t][j].magnitude() < a[r][c].magnitude())
                {
                    leftover = Some((t, j));
                }
            }
            if let Some((r, c)) = leftover {
                // a remainder smaller than the pivot: promote it and repeat
                if c == t {
                    a.swap(t, r);
                } else {
                    swap_cols(&mut a, &mut v, t, c);
                }
                continue;
            }
            // row and column are clear; enforce divisibility of the rest
            let pivot = a[t][t].clone();
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one, t);
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    let snf = SnfResult {
        rank: diag.len(),
        invariant_factors: diag,
    };
    let v = v.map(|rows| IntMatrix::from_rows(cols, rows).expect("square transform"));
    (snf, v)
}

/// A finitely presented abelian group `Z^width / (row span of relations)`.
///
/// Stores the Smith column transform so elements of `Z^width` can be mapped to
/// coordinates in `Z/d_1 + ... + Z/d_r + Z^free_rank`.
#[derive(Clone, Debug)]
pub struct Cokernel {
    width: usize,
    decomposition: SmithDecomposition,
}

impl Cokernel {
    pub fn new(relations: &IntMatrix) -> Self {
        Cokernel {
            width: relations.cols(),
            decomposition: smith_decomposition(relations),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn snf(&self) -> &SnfResult {
        &self.decomposition.snf
    }

    pub fn free_rank(&self) -> usize {
        self.width - self.decomposition.snf.rank
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.decomposition.snf.torsion()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.decomposition.snf.all_units()
    }

    /// Free-part coordinates of the class of `x`.
    pub fn free_coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.width);
        let v = &self.decomposition.col_transform;
        let r = self.decomposition.snf.rank;
        (r..self.width)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(i, a)| a * v.get(i, j))
                    .sum()
            })
            .collect()
    }

    /// Free-part coordinates of the `i`-th generator.
    pub fn generator_image(&self, i: usize) -> Vec<BigInt> {
        let r = self.decomposition.snf.rank;
        self.decomposition.col_transform.row(i)[r..].to_vec()
    }
}

pub fn is_primitive(v: &LatticeVector) -> Result<bool, LatticeError> {
    if v.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    let g = v.coords().iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    Ok(g.is_one())
}

/// True iff the vectors extend to a `Z`-basis of `Z^n`: the stacked matrix
/// has full row rank and every invariant factor is 1.
pub fn is_unimodular_set(vs: &[LatticeVector]) -> bool {
    let Some(first) = vs.first() else {
        return true;
    };
    let n = first.dim();
    if vs.len() > n || vs.iter().any(|v| v.dim() != n) {
        return false;
    }
    let m = IntMatrix::from_vectors(n, vs).expect("uniform dimension");
    let snf = smith_normal_form(&m);
    snf.rank == vs.len() && snf.all_units()
}

pub fn pairing(u: &LatticeVector, v: &LatticeVector) -> Result<BigInt, LatticeError> {
    if u.dim() != v.dim() {
        return Err(LatticeError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u.coords().iter().zip(v.coords()).map(|(a, b)| a * b).sum())
}

/// JSON rendering of big integers: plain numbers when they fit in `i64`,
/// decimal strings otherwise.
pub(crate) mod json_int {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::ser::SerializeSeq;
    use serde::{Serialize, Serializer};

    pub struct Int<'a>(pub &'a BigInt);

    impl Serialize for Int<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self.0.to_i64() {
                Some(x) => s.serialize_i64(x),
                None => s.serialize_str(&self.0.to_string()),
            }
        }
    }

    pub struct Row<'a>(pub &'a [BigInt]);

    impl Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ints(self.0, s)
        }
    }

    pub fn int<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        Int(x).serialize(s)
    }

    pub fn ints<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&Int(x))?;
        }
        seq.end()
    }

    pub fn rows<S: Serializer>(xs: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&Row(x))?;
        }
        seq.end()
    }
}
