//! Extended morphisms `(f*, b)` between models.

use crate::equivariant::{CartanComplex, EquivariantElement};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::model::{CdgaModel, FormElement, Product};
use crate::operators::{b_transform, exp_wedge};
use crate::sparse::SparseVec;

/// A morphism `M → N` given by the algebra map `f*: forms(N) → forms(M)` and a 2-form `b` on `M`.
/// Pullback is `ρ ↦ e^{−b} ∧ f*ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedMorphism {
    name: String,
    source: CdgaModel,
    target: CdgaModel,
    /// Column `t` is `f*` of target basis element `t`.
    matrix: SparseMatrix,
    b: FormElement,
}

fn invalid(name: &str, what: String) -> Error {
    Error::InvalidMorphism(format!("{name}: {what}"))
}

impl ExtendedMorphism {
    /// Checks that `f*` is a unital, degree-preserving algebra map commuting with `d`, and that
    /// `H_source = f*H_target − db`.
    pub fn new(name: &str, source: CdgaModel, target: CdgaModel, columns: Vec<FormElement>, b: FormElement) -> Result<Self> {
        if columns.len() != target.dim() {
            return Err(invalid(name, "need one image per target basis element".into()));
        }
        for (t, col) in columns.iter().enumerate() {
            source.check(col).map_err(|_| invalid(name, format!("image of {} out of range", target.basis_name(t))))?;
            if !col.is_zero() && source.homogeneous_degree(col) != Some(target.degree(t)) {
                return Err(invalid(name, format!("image of {} has the wrong degree", target.basis_name(t))));
            }
        }
        source.check(&b).map_err(|_| invalid(name, "b out of range".into()))?;
        if !b.is_zero() && source.homogeneous_degree(&b) != Some(2) {
            return Err(invalid(name, "b must be a 2-form".into()));
        }
        let m = Self { name: name.into(), matrix: SparseMatrix::from_columns(source.dim(), columns), source, target, b };
        if m.f_star(&m.target.unit())? != m.source.unit() {
            return Err(invalid(name, "f* does not preserve the unit".into()));
        }
        for x in 0..m.target.dim() {
            for y in 0..m.target.dim() {
                let Product::Span(p) = m.target.wedge_entry(x, y) else { continue };
                let lhs = m.f_star(p)?;
                match m.source.wedge(m.matrix.column(x), m.matrix.column(y)) {
                    Ok(rhs) if rhs == lhs => {}
                    Ok(_) => {
                        return Err(invalid(
                            name,
                            format!("f* is not multiplicative on {} ∧ {}", m.target.basis_name(x), m.target.basis_name(y)),
                        ))
                    }
                    Err(Error::CapExceeded { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            let dx = m.f_star(m.target.d_image(x))?;
            if dx != m.source.differential(m.matrix.column(x))? {
                return Err(invalid(name, format!("f* does not commute with d on {}", m.target.basis_name(x))));
            }
        }
        let expected = m.f_star(m.target.h())?.difference(&m.source.differential(&m.b)?);
        if expected != *m.source.h() {
            return Err(invalid(name, "H_source ≠ f*H_target − db".into()));
        }
        Ok(m)
    }

    pub fn identity(model: &CdgaModel) -> Self {
        Self {
            name: format!("id_{}", model.name()),
            source: model.clone(),
            target: model.clone(),
            matrix: SparseMatrix::identity(model.dim()),
            b: SparseVec::new(),
        }
    }

    /// The endomorphism `(id, b)` of a model; valid when `db = 0`.
    pub fn b_shift(model: &CdgaModel, b: FormElement) -> Result<Self> {
        let cols = (0..model.dim()).map(SparseVec::unit).collect();
        Self::new(&format!("shift_{}", model.name()), model.clone(), model.clone(), cols, b)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &CdgaModel {
        &self.source
    }

    pub fn target(&self) -> &CdgaModel {
        &self.target
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn b(&self) -> &FormElement {
        &self.b
    }

    /// The plain algebra map `f*` on target forms.
    pub fn f_star(&self, rho: &FormElement) -> Result<FormElement> {
        self.target.check(rho)?;
        Ok(self.matrix.apply(rho))
    }

    /// `e^{−b} ∧ f*ρ`
    pub fn pullback(&self, rho: &FormElement) -> Result<FormElement> {
        b_transform(&self.source, &self.f_star(rho)?, &self.b)
    }

    /// Pullback of an equivariant element; requires the morphism to be equivariant.
    pub fn pullback_equivariant(&self, x: &EquivariantElement) -> Result<EquivariantElement> {
        let report = equivariance_check(self)?;
        if let Some(w) = report.witness {
            return Err(Error::NotEquivariant(w));
        }
        self.pullback_terms(x)
    }

    fn pullback_terms(&self, x: &EquivariantElement) -> Result<EquivariantElement> {
        x.map_forms(|f| self.pullback(f))
    }

    /// Matrix of the pullback between the Cartan complexes of target and source, in parity `p`.
    pub fn cartan_matrix(&self, target: &CartanComplex, source: &CartanComplex, p: usize) -> Result<SparseMatrix> {
        if target.model() != &self.target || source.model() != &self.source {
            return Err(Error::ModelMismatch(self.name.clone()));
        }
        let report = equivariance_check(self)?;
        if let Some(w) = report.witness {
            return Err(Error::NotEquivariant(w));
        }
        let mut cols = Vec::with_capacity(target.dim(p));
        for i in 0..target.dim(p) {
            let x = target.element(p, &SparseVec::unit(i));
            cols.push(source.coordinates(p, &self.pullback_terms(&x)?)?);
        }
        Ok(SparseMatrix::from_columns(source.dim(p), cols))
    }
}

/// `g ∘ f` for `f: M → N`, `g: N → P`: `h* = f* ∘ g*`, `b_h = b_f + f*(b_g)`.
pub fn compose(g: &ExtendedMorphism, f: &ExtendedMorphism) -> Result<ExtendedMorphism> {
    if f.target != g.source {
        return Err(Error::ModelMismatch(format!("target of {} is not the source of {}", f.name, g.name)));
    }
    let b = f.b.sum(&f.f_star(&g.b)?);
    Ok(ExtendedMorphism {
        name: format!("{}∘{}", g.name, f.name),
        source: f.source.clone(),
        target: g.target.clone(),
        matrix: f.matrix.compose(&g.matrix),
        b,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub equivariant: bool,
    pub witness: Option<String>,
}

/// Checks `ι_j ∘ f* = f* ∘ ι_j` and `ξ_j^source = f*ξ_j^target + ι_j b` for every generator.
pub fn equivariance_check(m: &ExtendedMorphism) -> Result<EquivarianceReport> {
    let (s, t) = (&m.source, &m.target);
    if s.generators() != t.generators() {
        return Err(Error::GeneratorMismatch(format!("{:?} vs {:?}", s.generators(), t.generators())));
    }
    let g = s.generator_count();
    for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                if s.structure_constant(i, j, k) != t.structure_constant(i, j, k) {
                    return Err(Error::GeneratorMismatch("structure constants differ".into()));
                }
            }
        }
    }
    let fail = |w: String| Ok(EquivarianceReport { equivariant: false, witness: Some(w) });
    for j in 0..g {
        for x in 0..t.dim() {
            let e = SparseVec::unit(x);
            if s.iota(j, &m.f_star(&e)?)? != m.f_star(&t.iota(j, &e)?)? {
                return fail(format!("ι_{} does not commute with f* on {}", t.generators()[j], t.basis_name(x)));
            }
        }
        let rhs = m.f_star(t.xi(j))?.sum(&s.iota(j, &m.b)?);
        if *s.xi(j) != rhs {
            return fail(format!(
                "generator {}: ξ = {} but f*η + ι b = {}",
                t.generators()[j],
                s.format(s.xi(j)),
                s.format(&rhs)
            ));
        }
    }
    Ok(EquivarianceReport { equivariant: true, witness: None })
}

/// Transforms a model by a change of splitting: `H ↦ H + dB`, `ξ_j ↦ ξ_j − ι_j B`.
pub fn change_splitting(model: &CdgaModel, b: &FormElement) -> Result<CdgaModel> {
    let h = model.h().sum(&model.differential(b)?);
    let xi = (0..model.generator_count())
        .map(|j| Ok(model.xi(j).difference(&model.iota(j, b)?)))
        .collect::<Result<Vec<_>>>()?;
    model.with_twist(h, xi)
}

/// Recomputes the morphism in new splittings of source and target
/// (`b' = b − B_source + f*B_target`) and compares pullbacks on every basis probe:
/// `pullback'(e^{B_target} ρ) = e^{B_source} ∧ pullback(ρ)`.
pub fn splitting_change_equivalence(m: &ExtendedMorphism, b_source: &FormElement, b_target: &FormElement) -> Result<bool> {
    let source2 = change_splitting(&m.source, b_source)?;
    let target2 = change_splitting(&m.target, b_target)?;
    let b2 = m.b.difference(b_source).sum(&m.f_star(b_target)?);
    let cols = m.matrix.columns().to_vec();
    let m2 = match ExtendedMorphism::new(&m.name, source2, target2, cols, b2) {
        Ok(x) => x,
        Err(Error::InvalidMorphism(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let e_bt = exp_wedge(&m.target, b_target)?;
    let e_bs = exp_wedge(&m.source, b_source)?;
    for x in 0..m.target.dim() {
        let rho = SparseVec::unit(x);
        let lhs = m2.pullback(&m.target.wedge(&e_bt, &rho)?)?;
        let rhs = m.source.wedge(&e_bs, &m.pullback(&rho)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    let before = equivariance_check(m)?.equivariant;
    let after = equivariance_check(&m2)?.equivariant;
    Ok(before == after)
}
