//! Finite invariant-form models: a graded-commutative algebra on an explicit basis together with
//! its differential, contraction operators, Lie structure constants and twist data.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::scalar::Scalar;
use crate::sparse::SparseVec;

/// Elements of a model are coefficient vectors over its basis.
pub type FormElement = SparseVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: usize,
}

/// One entry of the wedge table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Product {
    Span(FormElement),
    /// The product exists on the manifold but is not represented in the model.
    Absent,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LieActionData {
    pub generators: Vec<String>,
    /// `iota[j][b]` is the image of basis element `b` under the contraction by generator `j`.
    pub iota: Vec<Vec<FormElement>>,
    /// `structure_constants[i][j][k]` is the coefficient of `X_k` in `[X_i, X_j]`.
    pub structure_constants: Vec<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistData {
    pub h: FormElement,
    pub xi: Vec<FormElement>,
}

/// Raw model data in arbitrary basis order. [`CdgaModel::new`] checks it and puts the basis in
/// canonical order.
#[derive(Clone, Debug)]
pub struct ModelData {
    pub name: String,
    pub basis: Vec<BasisElement>,
    pub unit: usize,
    pub wedge: Vec<Vec<Product>>,
    pub d: Vec<FormElement>,
    pub lie: LieActionData,
    pub twist: TwistData,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaModel {
    name: String,
    basis: Vec<BasisElement>,
    unit: usize,
    wedge: Vec<Vec<Product>>,
    d: Vec<FormElement>,
    lie: LieActionData,
    twist: TwistData,
}

fn check_range(v: &FormElement, n: usize, what: &str) -> Result<()> {
    match v.last_index() {
        Some(i) if i >= n => Err(Error::Structural(format!("{what}: index {i} outside basis of size {n}"))),
        _ => Ok(()),
    }
}

impl CdgaModel {
    /// Validates the shape of the data (sizes, ranges, degrees) and sorts the basis by
    /// `(degree, name)`. Axioms are checked separately by [`crate::validate::validate_model`].
    pub fn new(data: ModelData) -> Result<Self> {
        let n = data.basis.len();
        if n == 0 {
            return Err(Error::Structural("empty basis".into()));
        }
        if data.unit >= n {
            return Err(Error::Structural("unit is not a basis element".into()));
        }
        if data.basis[data.unit].degree != 0 {
            return Err(Error::Structural("unit must have degree 0".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if data.basis[i].name == data.basis[j].name {
                    return Err(Error::Structural(format!("duplicate basis name `{}`", data.basis[i].name)));
                }
            }
        }
        if data.wedge.len() != n || data.wedge.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("wedge table must be n×n".into()));
        }
        if data.d.len() != n {
            return Err(Error::Structural("differential must have one image per basis element".into()));
        }
        let g = data.lie.generators.len();
        if data.lie.iota.len() != g || data.lie.iota.iter().any(|c| c.len() != n) {
            return Err(Error::Structural("iota must have one image per generator and basis element".into()));
        }
        let c = &data.lie.structure_constants;
        if c.len() != g || c.iter().any(|r| r.len() != g || r.iter().any(|s| s.len() != g)) {
            return Err(Error::Structural("structure constants must be g×g×g".into()));
        }
        if data.twist.xi.len() != g {
            return Err(Error::Structural("one xi per generator required".into()));
        }
        let deg = |v: &FormElement| -> Option<usize> {
            let mut it = v.indices().map(|i| data.basis[i].degree);
            let first = it.next()?;
            it.all(|d| d == first).then_some(first).or(Some(usize::MAX))
        };
        let expect = |v: &FormElement, want: Option<usize>, what: String| -> Result<()> {
            check_range(v, n, &what)?;
            match (deg(v), want) {
                (None, _) => Ok(()),
                (Some(d), Some(w)) if d == w => Ok(()),
                _ => Err(Error::Structural(format!("{what}: wrong degree"))),
            }
        };
        let name = |i: usize| data.basis[i].name.clone();
        for a in 0..n {
            for b in 0..n {
                if let Product::Span(p) = &data.wedge[a][b] {
                    let want = data.basis[a].degree + data.basis[b].degree;
                    expect(p, Some(want), format!("wedge {} {}", name(a), name(b)))?;
                }
            }
            expect(&data.d[a], Some(data.basis[a].degree + 1), format!("d {}", name(a)))?;
            for j in 0..g {
                let want = data.basis[a].degree.checked_sub(1);
                expect(&data.lie.iota[j][a], want, format!("iota {} {}", data.lie.generators[j], name(a)))?;
            }
        }
        expect(&data.twist.h, Some(3), "H".into())?;
        for j in 0..g {
            expect(&data.twist.xi[j], Some(1), format!("xi {}", data.lie.generators[j]))?;
        }
        for j in 0..g {
            for k in 0..j {
                if data.lie.generators[j] == data.lie.generators[k] {
                    return Err(Error::Structural(format!("duplicate generator `{}`", data.lie.generators[j])));
                }
            }
        }

        // canonical order
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            (data.basis[a].degree, &data.basis[a].name).cmp(&(data.basis[b].degree, &data.basis[b].name))
        });
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let remap = |v: &FormElement| v.filter_map_indices(|i| Some(position[i]));
        let basis = order.iter().map(|&o| data.basis[o].clone()).collect();
        let wedge = order
            .iter()
            .map(|&a| {
                order
                    .iter()
                    .map(|&b| match &data.wedge[a][b] {
                        Product::Span(p) => Product::Span(remap(p)),
                        Product::Absent => Product::Absent,
                    })
                    .collect()
            })
            .collect();
        let d = order.iter().map(|&o| remap(&data.d[o])).collect();
        let iota = data.lie.iota.iter().map(|col| order.iter().map(|&o| remap(&col[o])).collect()).collect();
        Ok(Self {
            name: data.name,
            basis,
            unit: position[data.unit],
            wedge,
            d,
            lie: LieActionData {
                generators: data.lie.generators,
                iota,
                structure_constants: data.lie.structure_constants,
            },
            twist: TwistData { h: remap(&data.twist.h), xi: data.twist.xi.iter().map(remap).collect() },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].degree
    }

    pub fn basis_name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// The basis element with the given name; panics if absent (intended for tests and fixtures).
    pub fn element(&self, name: &str) -> FormElement {
        SparseVec::unit(self.index_of(name).unwrap_or_else(|| panic!("no basis element `{name}`")))
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn unit(&self) -> FormElement {
        SparseVec::unit(self.unit)
    }

    pub fn max_degree(&self) -> usize {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    pub fn wedge_entry(&self, a: usize, b: usize) -> &Product {
        &self.wedge[a][b]
    }

    pub fn d_image(&self, a: usize) -> &FormElement {
        &self.d[a]
    }

    pub fn lie(&self) -> &LieActionData {
        &self.lie
    }

    pub fn twist(&self) -> &TwistData {
        &self.twist
    }

    pub fn h(&self) -> &FormElement {
        &self.twist.h
    }

    pub fn xi(&self, j: usize) -> &FormElement {
        &self.twist.xi[j]
    }

    pub fn generator_count(&self) -> usize {
        self.lie.generators.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.lie.generators
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.lie.structure_constants[i][j][k]
    }

    pub fn is_abelian(&self) -> bool {
        self.lie.structure_constants.iter().flatten().flatten().all(Zero::is_zero)
    }

    /// Replaces the twist data, keeping everything else.
    pub fn with_twist(&self, h: FormElement, xi: Vec<FormElement>) -> Result<Self> {
        let mut data = self.to_data();
        data.twist = TwistData { h, xi };
        Self::new(data)
    }

    pub fn with_name(&self, name: &str) -> Self {
        let mut m = self.clone();
        m.name = name.to_string();
        m
    }

    pub fn to_data(&self) -> ModelData {
        ModelData {
            name: self.name.clone(),
            basis: self.basis.clone(),
            unit: self.unit,
            wedge: self.wedge.clone(),
            d: self.d.clone(),
            lie: self.lie.clone(),
            twist: self.twist.clone(),
        }
    }

    pub fn check(&self, a: &FormElement) -> Result<()> {
        match a.last_index() {
            Some(i) if i >= self.dim() => Err(Error::ModelMismatch(self.name.clone())),
            _ => Ok(()),
        }
    }

    fn check_generator(&self, j: usize) -> Result<()> {
        if j < self.generator_count() {
            Ok(())
        } else {
            Err(Error::UnknownGenerator(j))
        }
    }

    /// Degree shared by all terms; `None` for zero or inhomogeneous elements.
    pub fn homogeneous_degree(&self, a: &FormElement) -> Option<usize> {
        let mut it = a.indices().map(|i| self.degree(i));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Parity shared by all terms; zero counts as even.
    pub fn parity(&self, a: &FormElement) -> Option<usize> {
        let mut it = a.indices().map(|i| self.degree(i) % 2);
        let Some(first) = it.next() else { return Some(0) };
        it.all(|p| p == first).then_some(first)
    }

    pub fn degree_part(&self, a: &FormElement, k: usize) -> FormElement {
        let mut out = SparseVec::new();
        for (i, c) in a.iter() {
            if self.degree(i) == k {
                out.set(i, c.clone());
            }
        }
        out
    }

    pub fn wedge(&self, a: &FormElement, b: &FormElement) -> Result<FormElement> {
        self.check(a)?;
        self.check(b)?;
        let mut out = SparseVec::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                match &self.wedge[i][j] {
                    Product::Span(p) => out.add_scaled(&(x * y), p),
                    Product::Absent => {
                        return Err(Error::CapExceeded {
                            left: self.basis[i].name.clone(),
                            right: self.basis[j].name.clone(),
                        })
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn wedge_power(&self, a: &FormElement, k: usize) -> Result<FormElement> {
        let mut acc = self.unit();
        for _ in 0..k {
            acc = self.wedge(&acc, a)?;
        }
        Ok(acc)
    }

    fn apply_images(&self, images: &[FormElement], a: &FormElement) -> FormElement {
        let mut out = SparseVec::new();
        for (i, c) in a.iter() {
            out.add_scaled(c, &images[i]);
        }
        out
    }

    pub fn differential(&self, a: &FormElement) -> Result<FormElement> {
        self.check(a)?;
        Ok(self.apply_images(&self.d, a))
    }

    pub fn iota(&self, j: usize, a: &FormElement) -> Result<FormElement> {
        self.check_generator(j)?;
        self.check(a)?;
        Ok(self.apply_images(&self.lie.iota[j], a))
    }

    /// `L_j = d ι_j + ι_j d`
    pub fn lie_derivative(&self, j: usize, a: &FormElement) -> Result<FormElement> {
        let first = self.differential(&self.iota(j, a)?)?;
        let second = self.iota(j, &self.differential(a)?)?;
        Ok(first.sum(&second))
    }

    /// Contraction by a constant combination `Σ x_j X_j` of the action generators.
    pub fn iota_vector(&self, x: &[Scalar], a: &FormElement) -> Result<FormElement> {
        let mut out = SparseVec::new();
        for (j, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(c, &self.iota(j, a)?);
            }
        }
        Ok(out)
    }

    pub fn lie_vector(&self, x: &[Scalar], a: &FormElement) -> Result<FormElement> {
        let mut out = SparseVec::new();
        for (j, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(c, &self.lie_derivative(j, a)?);
            }
        }
        Ok(out)
    }

    pub fn d_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.dim(), self.d.clone())
    }

    pub fn iota_matrix(&self, j: usize) -> Result<SparseMatrix> {
        self.check_generator(j)?;
        Ok(SparseMatrix::from_columns(self.dim(), self.lie.iota[j].clone()))
    }

    pub fn lie_matrix(&self, j: usize) -> Result<SparseMatrix> {
        let cols = (0..self.dim()).map(|b| self.lie_derivative(j, &SparseVec::unit(b))).collect::<Result<_>>()?;
        Ok(SparseMatrix::from_columns(self.dim(), cols))
    }

    /// Matrix of `x ↦ a ∧ x`.
    pub fn wedge_matrix(&self, a: &FormElement) -> Result<SparseMatrix> {
        let cols = (0..self.dim()).map(|b| self.wedge(a, &SparseVec::unit(b))).collect::<Result<_>>()?;
        Ok(SparseMatrix::from_columns(self.dim(), cols))
    }

    /// Applies a linear operator given by a closure to every basis element.
    pub fn operator_matrix(&self, op: impl Fn(&FormElement) -> Result<FormElement>) -> Result<SparseMatrix> {
        let cols = (0..self.dim()).map(|b| op(&SparseVec::unit(b))).collect::<Result<_>>()?;
        Ok(SparseMatrix::from_columns(self.dim(), cols))
    }

    pub fn format(&self, a: &FormElement) -> String {
        format_combo(a, |i| self.basis_name(i).to_string())
    }
}

/// Renders `Σ c_i name_i` in the DSL combo syntax (`0` for the zero element).
pub fn format_combo(v: &SparseVec, name: impl Fn(usize) -> String) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.iter()
        .map(|(i, c)| format!("{} {}", crate::scalar::format_rational(c), name(i)))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, one};

    fn circle() -> CdgaModel {
        CdgaModel::new(ModelData {
            name: "s1".into(),
            basis: vec![
                BasisElement { name: "dtheta".into(), degree: 1 },
                BasisElement { name: "one".into(), degree: 0 },
            ],
            unit: 1,
            wedge: vec![
                vec![Product::Span(SparseVec::new()), Product::Span(SparseVec::unit(0))],
                vec![Product::Span(SparseVec::unit(0)), Product::Span(SparseVec::unit(1))],
            ],
            d: vec![SparseVec::new(), SparseVec::new()],
            lie: LieActionData {
                generators: vec!["t".into()],
                iota: vec![vec![SparseVec::new(), SparseVec::new()]],
                structure_constants: vec![vec![vec![int(0)]]],
            },
            twist: TwistData { h: SparseVec::new(), xi: vec![SparseVec::unit(0)] },
        })
        .unwrap()
    }

    #[test]
    fn basis_is_sorted_and_remapped() {
        let m = circle();
        assert_eq!(m.basis_name(0), "one");
        assert_eq!(m.unit_index(), 0);
        assert_eq!(m.xi(0), &m.element("dtheta"));
        let dt = m.element("dtheta");
        assert!(m.wedge(&dt, &dt).unwrap().is_zero());
        assert_eq!(m.wedge(&m.unit(), &dt).unwrap(), dt);
        assert!(m.differential(&dt).unwrap().is_zero());
        assert!(m.lie_derivative(0, &m.unit()).unwrap().is_zero());
    }

    #[test]
    fn mismatch_and_degree_queries() {
        let m = circle();
        assert_eq!(m.wedge(&SparseVec::unit(7), &m.unit()), Err(Error::ModelMismatch("s1".into())));
        assert_eq!(m.iota(3, &m.unit()), Err(Error::UnknownGenerator(3)));
        let mixed = m.unit().sum(&m.element("dtheta"));
        assert_eq!(m.homogeneous_degree(&mixed), None);
        assert_eq!(m.parity(&mixed), None);
        assert_eq!(m.homogeneous_degree(&m.element("dtheta").scaled(&one())), Some(1));
    }

    #[test]
    fn wrong_degree_is_structural() {
        let mut data = circle().to_data();
        data.twist.xi = vec![data.basis.iter().position(|b| b.degree == 0).map(SparseVec::unit).unwrap()];
        assert!(matches!(CdgaModel::new(data), Err(Error::Structural(_))));
    }
}
