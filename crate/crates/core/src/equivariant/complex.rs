//! The truncated extended Cartan complex on invariant elements.

use num_traits::Zero;

use super::element::{monomials_up_to, total, EquivariantElement, UDegree};
use crate::error::{Error, Result};
use crate::linalg::{kernel_ordered, SparseMatrix};
use crate::model::CdgaModel;
use crate::operators::{lie_extended, require_isotropic, ExtendedSection};
use crate::sparse::SparseVec;

/// `d_{𝒯,δ} x = d x − H ∧ x − Σ_j u_j (ι_j x + ξ_j ∧ x)`, dropping terms of u-degree above `n`.
pub fn cartan_differential(m: &CdgaModel, x: &EquivariantElement, n: usize) -> Result<EquivariantElement> {
    let mut out = x.map_forms(|f| Ok(m.differential(f)?.difference(&m.wedge(m.h(), f)?)))?;
    for j in 0..m.generator_count() {
        let part = x.map_forms(|f| Ok(m.iota(j, f)?.sum(&m.wedge(m.xi(j), f)?)))?;
        out.add(&part.times_u(j).negated());
    }
    Ok(out.truncated(n))
}

/// Invariance operator `L^𝒯_i ⊗ 1 + 1 ⊗ ad*_i` with `ad*_i u_k = −Σ_j c_{ij}^k u_j`.
pub fn invariance_operator(m: &CdgaModel, i: usize, x: &EquivariantElement) -> Result<EquivariantElement> {
    let section = ExtendedSection::generator(m, i);
    let mut out = x.map_forms(|f| lie_extended(m, &section, f))?;
    let g = m.generator_count();
    for (exp, form) in x.terms() {
        // derivation on the polynomial part
        for k in 0..g {
            if exp[k] == 0 {
                continue;
            }
            for j in 0..g {
                let c = m.structure_constant(i, j, k);
                if c.is_zero() {
                    continue;
                }
                let mut e = exp.clone();
                e[k] -= 1;
                e[j] += 1;
                let factor = -(c * crate::scalar::int(exp[k] as i64));
                out.add_term(e, &form.scaled(&factor));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantVector {
    /// Coordinates in the ambient space `monomials × basis`.
    pub ambient: SparseVec,
    /// Ambient coordinate at which this vector is 1 and all others in its block are 0.
    pub free: usize,
    pub u_degree: usize,
}

#[derive(Clone, Debug)]
pub struct CartanComplex {
    model: CdgaModel,
    n: usize,
    monomials: Vec<UDegree>,
    /// Invariant basis per parity, ordered by u-degree.
    basis: [Vec<InvariantVector>; 2],
    /// `differential[p]` maps parity `p` to parity `1 − p`.
    differential: [SparseMatrix; 2],
}

impl CartanComplex {
    /// Builds the complex; requires an isotropic action and checks `d² = 0` exactly.
    pub fn new(model: &CdgaModel, n: usize) -> Result<Self> {
        require_isotropic(model)?;
        let c = Self::assemble(model, n)?;
        c.check_d_squared()?;
        Ok(c)
    }

    /// Builds the complex without the isotropy precondition or the `d² = 0` check.
    pub fn assemble(model: &CdgaModel, n: usize) -> Result<Self> {
        let g = model.generator_count();
        let monomials = monomials_up_to(g, n);
        let dim = model.dim();
        let mut basis: [Vec<InvariantVector>; 2] = [Vec::new(), Vec::new()];
        for p in 0..2 {
            for k in 0..=n {
                let block: Vec<usize> = monomials
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| total(e) == k)
                    .flat_map(|(mi, _)| (0..dim).filter(move |&b| model.degree(b) % 2 == p).map(move |b| mi * dim + b))
                    .collect();
                if block.is_empty() {
                    continue;
                }
                let mut rows: Vec<SparseVec> = Vec::new();
                for &col in &block {
                    let x = Self::element_of(model, &monomials, &SparseVec::unit(col));
                    let mut stacked = SparseVec::new();
                    for i in 0..g {
                        let y = invariance_operator(model, i, &x)?;
                        let v = Self::ambient_of(model, &monomials, &y)?;
                        for (idx, c) in v.iter() {
                            stacked.set(i * monomials.len() * dim + idx, c.clone());
                        }
                    }
                    rows.push(stacked);
                }
                let local = SparseMatrix::from_columns(g.max(1) * monomials.len() * dim, rows);
                let order: Vec<usize> = (0..block.len()).collect();
                for (free, v) in kernel_ordered(&local, &order) {
                    let ambient = v.filter_map_indices(|i| Some(block[i]));
                    basis[p].push(InvariantVector { ambient, free: block[free], u_degree: k });
                }
            }
        }
        let mut c = Self {
            model: model.clone(),
            n,
            monomials,
            basis,
            differential: [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)],
        };
        for p in 0..2 {
            let m = c.matrix_of(p, |x| cartan_differential(model, x, n))?;
            c.differential[p] = m;
        }
        Ok(c)
    }

    fn element_of(model: &CdgaModel, monomials: &[UDegree], v: &SparseVec) -> EquivariantElement {
        let dim = model.dim();
        let mut e = EquivariantElement::zero(model.generator_count());
        for (idx, c) in v.iter() {
            let mut f = SparseVec::new();
            f.set(idx % dim, c.clone());
            e.add_term(monomials[idx / dim].clone(), &f);
        }
        e
    }

    fn ambient_of(model: &CdgaModel, monomials: &[UDegree], e: &EquivariantElement) -> Result<SparseVec> {
        let dim = model.dim();
        let mut v = SparseVec::new();
        for (exp, f) in e.terms() {
            let Some(mi) = monomials.iter().position(|m| m == exp) else {
                return Err(Error::Structural("term beyond truncation".into()));
            };
            for (b, c) in f.iter() {
                v.set(mi * dim + b, c.clone());
            }
        }
        Ok(v)
    }

    pub fn model(&self) -> &CdgaModel {
        &self.model
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> usize {
        self.model.generator_count()
    }

    pub fn dim(&self, parity: usize) -> usize {
        self.basis[parity].len()
    }

    pub fn total_dim(&self) -> usize {
        self.dim(0) + self.dim(1)
    }

    pub fn basis(&self, parity: usize) -> &[InvariantVector] {
        &self.basis[parity]
    }

    pub fn u_degree(&self, parity: usize, i: usize) -> usize {
        self.basis[parity][i].u_degree
    }

    pub fn differential(&self, parity: usize) -> &SparseMatrix {
        &self.differential[parity]
    }

    /// The element with the given coordinates in the invariant basis of `parity`.
    pub fn element(&self, parity: usize, coords: &SparseVec) -> EquivariantElement {
        let mut amb = SparseVec::new();
        for (i, c) in coords.iter() {
            amb.add_scaled(c, &self.basis[parity][i].ambient);
        }
        Self::element_of(&self.model, &self.monomials, &amb)
    }

    /// Coordinates of an invariant element of the given parity, or `NotInvariantClosed`.
    pub fn coordinates(&self, parity: usize, e: &EquivariantElement) -> Result<SparseVec> {
        let amb = Self::ambient_of(&self.model, &self.monomials, &e.truncated(self.n))?;
        let mut coords = SparseVec::new();
        let mut rebuilt = SparseVec::new();
        for (i, b) in self.basis[parity].iter().enumerate() {
            let c = amb.coeff(b.free);
            if !c.is_zero() {
                rebuilt.add_scaled(&c, &b.ambient);
                coords.set(i, c);
            }
        }
        if rebuilt != amb {
            return Err(Error::NotInvariantClosed(e.format(&self.model)));
        }
        Ok(coords)
    }

    /// Matrix of an operator from parity `p` to the opposite parity, in invariant coordinates.
    pub fn matrix_of(
        &self,
        p: usize,
        op: impl Fn(&EquivariantElement) -> Result<EquivariantElement>,
    ) -> Result<SparseMatrix> {
        self.matrix_between(p, 1 - p, op)
    }

    pub fn matrix_between(
        &self,
        from: usize,
        to: usize,
        op: impl Fn(&EquivariantElement) -> Result<EquivariantElement>,
    ) -> Result<SparseMatrix> {
        let mut cols = Vec::with_capacity(self.dim(from));
        for i in 0..self.dim(from) {
            let x = self.element(from, &SparseVec::unit(i));
            cols.push(self.coordinates(to, &op(&x)?)?);
        }
        Ok(SparseMatrix::from_columns(self.dim(to), cols))
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for p in 0..2 {
            let dd = self.differential[1 - p].compose(&self.differential[p]);
            if let Some((col, v)) = dd.columns().iter().enumerate().find(|(_, v)| !v.is_zero()) {
                let x = self.element(p, &SparseVec::unit(col));
                let image = self.element(p, v);
                return Err(Error::DSquaredNonzero(format!(
                    "d² ({}) = {}",
                    x.format(&self.model),
                    image.format(&self.model)
                )));
            }
        }
        Ok(())
    }
}
