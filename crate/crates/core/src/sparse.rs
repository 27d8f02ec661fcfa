//! Sparse exact vectors shared by forms and matrices.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::Scalar;

/// A sparse vector with no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(index: usize) -> Self {
        let mut v = Self::new();
        v.entries.insert(index, crate::scalar::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Scalar)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, c) in pairs {
            v.add_at(i, &c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries.get(&index)
    }

    pub fn coeff(&self, index: usize) -> Scalar {
        self.entries.get(&index).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn first_index(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }

    pub fn last_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn set(&mut self, index: usize, value: Scalar) {
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn add_at(&mut self, index: usize, value: &Scalar) {
        if value.is_zero() {
            return;
        }
        let slot = self.entries.entry(index).or_insert_with(Scalar::zero);
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&index);
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: &Scalar, other: &SparseVec) {
        if factor.is_zero() {
            return;
        }
        for (i, c) in other.iter() {
            self.add_at(i, &(factor * c));
        }
    }

    pub fn add(&mut self, other: &SparseVec) {
        for (i, c) in other.iter() {
            self.add_at(i, c);
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> SparseVec {
        if factor.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, c)| (*i, c * factor)).collect() }
    }

    pub fn negated(&self) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(i, c)| (*i, -c)).collect() }
    }

    pub fn sum(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add(other);
        out
    }

    pub fn difference(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(&-crate::scalar::one(), other);
        out
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = Scalar::zero();
        for (i, c) in small.iter() {
            if let Some(d) = large.get(i) {
                acc += c * d;
            }
        }
        acc
    }

    /// Keeps only the entries whose index passes `keep`, remapping through `map`.
    pub fn filter_map_indices(&self, mut map: impl FnMut(usize) -> Option<usize>) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, c) in self.iter() {
            if let Some(j) = map(i) {
                out.add_at(j, c);
            }
        }
        out
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (i, c) in self.iter() {
            out[i] = c.clone();
        }
        out
    }
}

impl FromIterator<(usize, Scalar)> for SparseVec {
    fn from_iter<T: IntoIterator<Item = (usize, Scalar)>>(iter: T) -> Self {
        SparseVec::from_pairs(iter)
    }
}
