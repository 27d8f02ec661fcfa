//! Elements of forms tensored with polynomials in the equivariant variables.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Result;
use crate::model::{CdgaModel, FormElement};
use crate::scalar::Scalar;
use crate::sparse::SparseVec;

/// Exponent vector over the equivariant variables `u_1 … u_g`.
pub type UDegree = Vec<usize>;

pub fn total(exp: &[usize]) -> usize {
    exp.iter().sum()
}

/// All exponent vectors in `g` variables with total degree exactly `k`, in lexicographically
/// descending order.
pub fn monomials_of_degree(g: usize, k: usize) -> Vec<UDegree> {
    if g == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in monomials_of_degree(g - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All exponent vectors with total degree at most `n`, ordered by total degree.
pub fn monomials_up_to(g: usize, n: usize) -> Vec<UDegree> {
    (0..=n).flat_map(|k| monomials_of_degree(g, k)).collect()
}

pub fn format_u(exp: &[usize]) -> String {
    let parts: Vec<String> = exp
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(j, &e)| {
            let var = if exp.len() == 1 { "u".to_string() } else { format!("u{}", j + 1) };
            if e == 1 {
                var
            } else {
                format!("{var}^{e}")
            }
        })
        .collect();
    parts.join("·")
}

/// A finite sum `Σ u^a ⊗ ρ_a`. Zero form parts are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EquivariantElement {
    vars: usize,
    terms: BTreeMap<UDegree, FormElement>,
}

impl EquivariantElement {
    pub fn zero(vars: usize) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn from_form(vars: usize, form: FormElement) -> Self {
        Self::monomial(vars, vec![0; vars], form)
    }

    pub fn monomial(vars: usize, exp: UDegree, form: FormElement) -> Self {
        assert_eq!(exp.len(), vars, "exponent length must match the number of variables");
        let mut e = Self::zero(vars);
        e.add_term(exp, &form);
        e
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<UDegree, FormElement> {
        &self.terms
    }

    pub fn get(&self, exp: &[usize]) -> Option<&FormElement> {
        self.terms.get(exp)
    }

    pub fn coefficient(&self, exp: &[usize]) -> FormElement {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, exp: UDegree, form: &FormElement) {
        if form.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_default();
        entry.add(form);
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&mut self, other: &EquivariantElement) {
        for (e, f) in &other.terms {
            self.add_term(e.clone(), f);
        }
    }

    pub fn sum(&self, other: &EquivariantElement) -> Self {
        let mut out = self.clone();
        out.add(other);
        out
    }

    pub fn difference(&self, other: &EquivariantElement) -> Self {
        self.sum(&other.negated())
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        Self { vars: self.vars, terms: self.terms.iter().map(|(e, f)| (e.clone(), f.scaled(c))).collect() }
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-crate::scalar::one())
    }

    pub fn max_u_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| total(e)).max()
    }

    pub fn min_u_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| total(e)).min()
    }

    /// Drops terms of total u-degree above `n`.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            vars: self.vars,
            terms: self.terms.iter().filter(|(e, _)| total(e) <= n).map(|(e, f)| (e.clone(), f.clone())).collect(),
        }
    }

    /// Multiplies by `u_j`.
    pub fn times_u(&self, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, f)| {
                let mut e = e.clone();
                e[j] += 1;
                (e, f.clone())
            })
            .collect();
        Self { vars: self.vars, terms }
    }

    /// Applies a form operator to every coefficient.
    pub fn map_forms(&self, mut op: impl FnMut(&FormElement) -> Result<FormElement>) -> Result<Self> {
        let mut out = Self::zero(self.vars);
        for (e, f) in &self.terms {
            out.add_term(e.clone(), &op(f)?);
        }
        Ok(out)
    }

    /// Product in the graded-commutative algebra `forms ⊗ Q[u]`, truncated at u-degree `n`.
    /// The variables are even, so no signs arise from them.
    pub fn wedge(&self, model: &CdgaModel, other: &EquivariantElement, n: usize) -> Result<Self> {
        let mut out = Self::zero(self.vars);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                let exp: UDegree = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if total(&exp) <= n {
                    out.add_term(exp, &model.wedge(f, g)?);
                }
            }
        }
        Ok(out)
    }

    pub fn format(&self, model: &CdgaModel) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(e, f)| {
                let u = format_u(e);
                let form = model.format(f);
                if u.is_empty() {
                    format!("({form})")
                } else {
                    format!("{u}·({form})")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Convenience for building elements from `(exponent, form)` pairs.
pub fn element_from_terms(vars: usize, terms: Vec<(UDegree, FormElement)>) -> EquivariantElement {
    let mut e = EquivariantElement::zero(vars);
    for (exp, f) in terms {
        e.add_term(exp, &f);
    }
    e
}

pub fn single_u(vars: usize, j: usize, power: usize) -> UDegree {
    let mut e = vec![0; vars];
    e[j] = power;
    e
}

pub fn unit_element(model: &CdgaModel) -> EquivariantElement {
    EquivariantElement::from_form(model.generator_count(), model.unit())
}

pub fn zero_form() -> FormElement {
    SparseVec::new()
}
