//! Exact sparse linear algebra over the rationals.
//!
//! Rank uses fraction-free integer elimination (rows are scaled to primitive integer vectors and
//! combined by cross-multiplication). Kernels, image membership and quotients use exact rational
//! Gauss-Jordan elimination. Pivoting is always "first nonzero in column order", so every basis
//! produced here is reproducible across runs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::SparseVec;

/// A column-major sparse matrix. Column `j` is the image of the `j`-th source basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, columns: (0..n).map(SparseVec::unit).collect() }
    }

    /// Builds a matrix from its columns; panics if an entry falls outside `rows`.
    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        for c in &columns {
            if let Some(last) = c.last_index() {
                assert!(last < rows, "column entry {last} out of range for {rows} rows");
            }
        }
        Self { rows, columns }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                m.set(i, j, c.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.columns[j].coeff(i)
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert!(i < self.rows);
        self.columns[j].set(i, value);
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseVec::len).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = vec![SparseVec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col.iter() {
                out[i].set(j, c.clone());
            }
        }
        SparseMatrix { rows: self.cols(), columns: out }
    }

    /// Row vectors of the matrix.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().columns
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v.iter() {
            out.add_scaled(c, &self.columns[j]);
        }
        out
    }

    /// `self * other`
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows(), "dimension mismatch in matrix product");
        SparseMatrix { rows: self.rows, columns: other.columns.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn sum(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        SparseMatrix {
            rows: self.rows,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.sum(b)).collect(),
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> SparseMatrix {
        SparseMatrix { rows: self.rows, columns: self.columns.iter().map(|c| c.scaled(factor)).collect() }
    }

    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        SparseMatrix { rows: self.rows, columns: cols.iter().map(|&j| self.columns[j].clone()).collect() }
    }
}

/// An incremental row-echelon structure. Every stored row remembers how it was produced from the
/// inserted vectors, so reductions can be reported as combinations of the inputs.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, (SparseVec, SparseVec)>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a>(vectors: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut e = Self::new();
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors offered through [`Echelon::insert`]; tags are assigned in this order.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Returns `(remainder, combination)` with `v = Σ combination[t]·input_t + remainder` and the
    /// remainder free of pivot positions.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = rem.indices().find(|i| *i >= cursor && self.rows.contains_key(i));
            let Some(p) = next else { break };
            let (row, row_combo) = &self.rows[&p];
            let factor = rem.coeff(p) / row.coeff(p);
            rem.add_scaled(&-factor.clone(), row);
            combo.add_scaled(&factor, row_combo);
            cursor = p + 1;
        }
        (rem, combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v` with the next tag; returns true if it was independent.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let tag = self.inserted;
        self.inserted += 1;
        let (rem, combo) = self.reduce(v);
        if rem.is_zero() {
            return false;
        }
        let mut row_combo = combo.negated();
        row_combo.add_at(tag, &crate::scalar::one());
        let pivot = rem.first_index().expect("nonzero remainder");
        self.rows.insert(pivot, (rem, row_combo));
        true
    }

    /// Expresses `v` as a combination of the inserted vectors, if it lies in their span.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rem, combo) = self.reduce(v);
        rem.is_zero().then_some(combo)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }
}

/// A basis of a linear subspace of `Q^ambient`, kept in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<SparseVec>,
}

impl SubspaceBasis {
    pub fn empty(ambient: usize) -> Self {
        Self { ambient, vectors: Vec::new() }
    }

    /// Spans the given vectors; the stored basis is the reduced echelon form of their span.
    pub fn span(ambient: usize, vectors: &[SparseVec]) -> Self {
        let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for v in vectors {
            let mut rem = v.clone();
            for (p, row) in &rows {
                let c = rem.coeff(*p);
                if !c.is_zero() {
                    rem.add_scaled(&-c, row);
                }
            }
            if let Some(p) = rem.first_index() {
                let lead = rem.coeff(p);
                let rem = rem.scaled(&lead.recip());
                for row in rows.values_mut() {
                    let c = row.coeff(p);
                    if !c.is_zero() {
                        row.add_scaled(&-c, &rem);
                    }
                }
                rows.insert(p, rem);
            }
        }
        Self { ambient, vectors: rows.into_values().collect() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.vectors
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.vectors.iter().map(|v| v.first_index().expect("nonzero basis vector")).collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut rem = v.clone();
        for b in &self.vectors {
            let p = b.first_index().expect("nonzero basis vector");
            let c = rem.coeff(p);
            if !c.is_zero() {
                rem.add_scaled(&-c, b);
            }
        }
        rem.is_zero()
    }
}

fn primitive_integer_row(v: &SparseVec) -> BTreeMap<usize, BigInt> {
    let mut lcm = BigInt::one();
    for (_, c) in v.iter() {
        lcm = lcm.lcm(c.denom());
    }
    let mut row: BTreeMap<usize, BigInt> =
        v.iter().map(|(i, c)| (i, (c * BigRational::from_integer(lcm.clone())).to_integer())).collect();
    normalize_content(&mut row);
    row
}

fn normalize_content(row: &mut BTreeMap<usize, BigInt>) {
    let mut g = BigInt::zero();
    for c in row.values() {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() {
        for c in row.values_mut() {
            *c /= &g;
        }
    }
}

/// Exact rank by fraction-free elimination with deterministic pivoting.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for row in m.row_vectors() {
        if row.is_zero() {
            continue;
        }
        let mut r = primitive_integer_row(&row);
        loop {
            let Some((&lead, _)) = r.iter().next() else { break };
            let Some(prow) = pivots.get(&lead) else {
                pivots.insert(lead, r);
                break;
            };
            let a = prow[&lead].clone();
            let b = r[&lead].clone();
            let mut next: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (i, c) in &r {
                next.insert(*i, c * &a);
            }
            for (i, c) in prow {
                let e = next.entry(*i).or_insert_with(BigInt::zero);
                *e -= c * &b;
            }
            next.retain(|_, c| !c.is_zero());
            normalize_content(&mut next);
            r = next;
        }
    }
    pivots.len()
}

/// Reduced row-echelon form with columns visited in `order`. Returns the pivot rows keyed by
/// their pivot column (original indices), each scaled so the pivot entry is 1.
pub fn rref_ordered(m: &SparseMatrix, order: &[usize]) -> BTreeMap<usize, SparseVec> {
    assert_eq!(order.len(), m.cols());
    let mut position = vec![0usize; m.cols()];
    for (pos, &col) in order.iter().enumerate() {
        position[col] = pos;
    }
    // rows over permuted positions
    let rows: Vec<SparseVec> = m
        .row_vectors()
        .into_iter()
        .map(|r| r.filter_map_indices(|j| Some(position[j])))
        .filter(|r| !r.is_zero())
        .collect();
    let mut ech: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for r in rows {
        let mut rem = r;
        let mut cursor = 0usize;
        loop {
            let next = rem.indices().find(|i| *i >= cursor && ech.contains_key(i));
            let Some(p) = next else { break };
            let c = rem.coeff(p);
            rem.add_scaled(&-c, &ech[&p]);
            cursor = p + 1;
        }
        if let Some(p) = rem.first_index() {
            let lead = rem.coeff(p);
            ech.insert(p, rem.scaled(&lead.recip()));
        }
    }
    // back substitution, highest pivot first
    let keys: Vec<usize> = ech.keys().rev().copied().collect();
    for &p in &keys {
        let prow = ech[&p].clone();
        for (&q, row) in ech.iter_mut() {
            if q < p {
                let c = row.coeff(p);
                if !c.is_zero() {
                    row.add_scaled(&-c, &prow);
                }
            }
        }
    }
    ech.into_iter().map(|(p, r)| (order[p], r.filter_map_indices(|j| Some(order[j])))).collect()
}

/// Kernel vectors computed with columns visited in `order`. Each entry is `(free column, vector)`;
/// the vector has coefficient 1 at its free column and 0 at every other free column, and its
/// support lies in columns that come no later than the free column in `order`.
pub fn kernel_ordered(m: &SparseMatrix, order: &[usize]) -> Vec<(usize, SparseVec)> {
    let rref = rref_ordered(m, order);
    let mut out = Vec::new();
    for &f in order {
        if rref.contains_key(&f) {
            continue;
        }
        let mut v = SparseVec::unit(f);
        for (&p, row) in &rref {
            let c = row.coeff(f);
            if !c.is_zero() {
                v.set(p, -c);
            }
        }
        out.push((f, v));
    }
    out
}

/// Exact basis of the null space; `dim = cols - rank`.
pub fn kernel_basis(m: &SparseMatrix) -> SubspaceBasis {
    let order: Vec<usize> = (0..m.cols()).collect();
    let vectors: Vec<SparseVec> = kernel_ordered(m, &order).into_iter().map(|(_, v)| v).collect();
    SubspaceBasis::span(m.cols(), &vectors)
}

/// Outcome of an image-membership query; both variants carry a checkable certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImageMembership {
    /// `m · x = v`
    Preimage(SparseVec),
    /// `yᵀ m = 0` and `yᵀ v ≠ 0`
    NotInImage(SparseVec),
}

pub fn solve_in_image(m: &SparseMatrix, v: &SparseVec) -> ImageMembership {
    if let Some(last) = v.last_index() {
        assert!(last < m.rows(), "vector length exceeds matrix rows");
    }
    let ech = Echelon::from_vectors(m.columns());
    match ech.solve(v) {
        Some(x) => ImageMembership::Preimage(x),
        None => {
            let left = kernel_basis(&m.transpose());
            let y = left
                .vectors()
                .iter()
                .find(|y| !y.dot(v).is_zero())
                .cloned()
                .expect("a vector outside the image pairs nontrivially with the left kernel");
            ImageMembership::NotInImage(y)
        }
    }
}

/// Representatives of `cycles / boundaries`. Fails if a boundary is not a cycle.
pub fn quotient_basis(cycles: &SubspaceBasis, boundaries: &SubspaceBasis) -> Result<Vec<SparseVec>> {
    for (i, b) in boundaries.vectors().iter().enumerate() {
        if !cycles.contains(b) {
            return Err(Error::NotContained(i));
        }
    }
    let mut ech = Echelon::from_vectors(boundaries.vectors());
    let mut reps = Vec::new();
    for z in cycles.vectors() {
        if ech.insert(z) {
            reps.push(z.clone());
        }
    }
    Ok(reps)
}

/// Sign-normalized copy of a vector (first nonzero coefficient positive); handy for display.
pub fn sign_normalized(v: &SparseVec) -> SparseVec {
    match v.iter().next() {
        Some((_, c)) if c.is_negative() => v.negated(),
        _ => v.clone(),
    }
}
