//! Twisted differential, B-transforms, extended Cartan operators and the checks built on them.

use num_traits::Zero;

use crate::equivariant::{element::single_u, EquivariantElement};
use crate::error::{Error, Result};
use crate::linalg::{solve_in_image, ImageMembership, SparseMatrix};
use crate::model::{CdgaModel, FormElement};
use crate::scalar::{factorial_inverse, format_rational, ratio, Scalar};
use crate::sparse::SparseVec;

/// `d_H a = d a − H ∧ a`
pub fn twisted_differential(m: &CdgaModel, a: &FormElement, h: &FormElement) -> Result<FormElement> {
    Ok(m.differential(a)?.difference(&m.wedge(h, a)?))
}

/// `Σ_k x^k / k!` for a nilpotent even form `x` of positive degree.
pub fn exp_wedge(m: &CdgaModel, x: &FormElement) -> Result<FormElement> {
    let mut out = m.unit();
    let mut power = m.unit();
    let mut k = 1;
    loop {
        power = m.wedge(&power, x)?;
        if power.is_zero() {
            return Ok(out);
        }
        out.add_scaled(&factorial_inverse(k), &power);
        k += 1;
        if k > m.max_degree() + m.dim() + 1 {
            return Err(Error::Structural("form is not nilpotent".into()));
        }
    }
}

/// `e^B ∘ a = e^{−B} ∧ a`
pub fn b_transform(m: &CdgaModel, a: &FormElement, b: &FormElement) -> Result<FormElement> {
    m.wedge(&exp_wedge(m, &b.negated())?, a)
}

/// A section `X + ξ` with constant-coefficient vector part over the action generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedSection {
    pub vector: Vec<Scalar>,
    pub form: FormElement,
}

impl ExtendedSection {
    pub fn new(m: &CdgaModel, vector: Vec<Scalar>, form: FormElement) -> Result<Self> {
        if vector.len() != m.generator_count() {
            return Err(Error::Structural("vector part needs one coefficient per generator".into()));
        }
        m.check(&form)?;
        if !form.is_zero() && m.homogeneous_degree(&form) != Some(1) {
            return Err(Error::Structural("form part must have degree 1".into()));
        }
        Ok(Self { vector, form })
    }

    /// `δ_j = X_j + ξ_j`
    pub fn generator(m: &CdgaModel, j: usize) -> Self {
        Self { vector: unit_vector(m.generator_count(), j), form: m.xi(j).clone() }
    }

    pub fn vector_field(m: &CdgaModel, j: usize) -> Self {
        Self { vector: unit_vector(m.generator_count(), j), form: SparseVec::new() }
    }

    pub fn one_form(m: &CdgaModel, form: FormElement) -> Self {
        Self { vector: vec![Scalar::zero(); m.generator_count()], form }
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self {
            vector: self.vector.iter().zip(&other.vector).map(|(a, b)| a + b).collect(),
            form: self.form.sum(&other.form),
        }
    }

    pub fn describe(&self, m: &CdgaModel) -> String {
        let v: Vec<String> = self
            .vector
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("{} X_{}", format_rational(c), m.generators()[j]))
            .collect();
        let v = if v.is_empty() { "0".to_string() } else { v.join(" + ") };
        format!("({v}, {})", m.format(&self.form))
    }
}

fn unit_vector(n: usize, j: usize) -> Vec<Scalar> {
    (0..n).map(|k| if k == j { crate::scalar::one() } else { Scalar::zero() }).collect()
}

/// Writes a degree −1 operator as a constant combination of the generator contractions.
pub fn vector_part_of_contraction(m: &CdgaModel, op: &SparseMatrix) -> Result<Vec<Scalar>> {
    let n = m.dim();
    let flatten = |mat: &SparseMatrix| {
        let mut v = SparseVec::new();
        for (c, col) in mat.columns().iter().enumerate() {
            for (r, x) in col.iter() {
                v.set(c * n + r, x.clone());
            }
        }
        v
    };
    let cols = (0..m.generator_count()).map(|j| m.iota_matrix(j).map(|x| flatten(&x))).collect::<Result<Vec<_>>>()?;
    let system = SparseMatrix::from_columns(n * n, cols);
    match solve_in_image(&system, &flatten(op)) {
        ImageMembership::Preimage(x) => Ok((0..m.generator_count()).map(|j| x.coeff(j)).collect()),
        ImageMembership::NotInImage(_) => Err(Error::NonConstantCoefficient),
    }
}

/// `ι_𝔛 a = ι_X a + ξ ∧ a`
pub fn iota_extended(m: &CdgaModel, x: &ExtendedSection, a: &FormElement) -> Result<FormElement> {
    Ok(m.iota_vector(&x.vector, a)?.sum(&m.wedge(&x.form, a)?))
}

/// `L^𝒯_𝔛 a = L_X a + (dξ − ι_X H) ∧ a`
pub fn lie_extended(m: &CdgaModel, x: &ExtendedSection, a: &FormElement) -> Result<FormElement> {
    let curvature = m.differential(&x.form)?.difference(&m.iota_vector(&x.vector, m.h())?);
    Ok(m.lie_vector(&x.vector, a)?.sum(&m.wedge(&curvature, a)?))
}

/// `⟨X + ξ, Y + η⟩ = ½(ι_X η + ι_Y ξ)`
pub fn pairing(m: &CdgaModel, x: &ExtendedSection, y: &ExtendedSection) -> Result<FormElement> {
    let s = m.iota_vector(&x.vector, &y.form)?.sum(&m.iota_vector(&y.vector, &x.form)?);
    Ok(s.scaled(&ratio(1, 2)))
}

/// Split-form Loday bracket `[X, Y] + L_X η − ι_Y dξ + ι_Y ι_X H`.
pub fn loday_bracket(m: &CdgaModel, x: &ExtendedSection, y: &ExtendedSection) -> Result<ExtendedSection> {
    let g = m.generator_count();
    if x.vector.len() != g || y.vector.len() != g {
        return Err(Error::NonConstantCoefficient);
    }
    let mut vector = vec![Scalar::zero(); g];
    for i in 0..g {
        for j in 0..g {
            let c = &x.vector[i] * &y.vector[j];
            if c.is_zero() {
                continue;
            }
            for (k, v) in vector.iter_mut().enumerate() {
                *v += &c * m.structure_constant(i, j, k);
            }
        }
    }
    let form = m
        .lie_vector(&x.vector, &y.form)?
        .difference(&m.iota_vector(&y.vector, &m.differential(&x.form)?)?)
        .sum(&m.iota_vector(&y.vector, &m.iota_vector(&x.vector, m.h())?)?);
    Ok(ExtendedSection { vector, form })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationStatus {
    Pass,
    Fail(String),
    /// Every instance that could be evaluated passed, but some hit the cap.
    Inconclusive(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanReport {
    /// Equations 1 through 6, in order.
    pub equations: Vec<RelationStatus>,
}

pub const CARTAN_EQUATIONS: [&str; 6] = [
    "L = dι + ιd",
    "[L_x, L_y] = L_{x*y}",
    "ι_x ι_y + ι_y ι_x = 2<x,y>",
    "[L_x, ι_y] = ι_{x*y}",
    "[d, L_x] = 0",
    "d² = 0",
];

impl CartanReport {
    pub fn all_pass(&self) -> bool {
        self.equations.iter().all(|s| *s == RelationStatus::Pass)
    }

    pub fn failing(&self) -> Vec<usize> {
        self.equations
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, RelationStatus::Fail(_)))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Sections used by default: `δ_j`, the bare vector fields, and every degree-1 basis element.
pub fn bundled_sections(m: &CdgaModel) -> Vec<ExtendedSection> {
    let mut out: Vec<ExtendedSection> = (0..m.generator_count()).map(|j| ExtendedSection::generator(m, j)).collect();
    out.extend((0..m.generator_count()).map(|j| ExtendedSection::vector_field(m, j)));
    out.extend((0..m.dim()).filter(|&i| m.degree(i) == 1).map(|i| ExtendedSection::one_form(m, SparseVec::unit(i))));
    out
}

pub fn basis_probes(m: &CdgaModel) -> Vec<FormElement> {
    (0..m.dim()).map(SparseVec::unit).collect()
}

struct Tally {
    status: RelationStatus,
    capped: usize,
}

impl Tally {
    fn new() -> Self {
        Self { status: RelationStatus::Pass, capped: 0 }
    }

    fn record(&mut self, r: Result<bool>, witness: impl FnOnce() -> String) {
        if matches!(self.status, RelationStatus::Fail(_)) {
            return;
        }
        match r {
            Ok(true) => {}
            Ok(false) => self.status = RelationStatus::Fail(witness()),
            Err(Error::CapExceeded { .. }) => self.capped += 1,
            Err(e) => self.status = RelationStatus::Fail(format!("{}: {e}", witness())),
        }
    }

    fn finish(self) -> RelationStatus {
        match self.status {
            RelationStatus::Pass if self.capped > 0 => RelationStatus::Inconclusive(self.capped),
            s => s,
        }
    }
}

/// Checks the six Cartan relations as operator identities on every probe.
pub fn verify_cartan_relations(m: &CdgaModel, sections: &[ExtendedSection], probes: &[FormElement]) -> CartanReport {
    let h = m.h();
    let dt = |a: &FormElement| twisted_differential(m, a, h);
    let mut tallies: Vec<Tally> = (0..6).map(|_| Tally::new()).collect();
    for (pi, rho) in probes.iter().enumerate() {
        let probe = || m.format(rho);
        let _ = pi;
        for (xi, x) in sections.iter().enumerate() {
            let wx = || format!("section {} = {}, probe {}", xi, x.describe(m), probe());
            let eq1 = (|| {
                let lhs = lie_extended(m, x, rho)?;
                let rhs = dt(&iota_extended(m, x, rho)?)?.sum(&iota_extended(m, x, &dt(rho)?)?);
                Ok(lhs == rhs)
            })();
            tallies[0].record(eq1, wx);
            let eq5 = (|| {
                let lhs = dt(&lie_extended(m, x, rho)?)?;
                let rhs = lie_extended(m, x, &dt(rho)?)?;
                Ok(lhs == rhs)
            })();
            tallies[4].record(eq5, wx);
            for (yi, y) in sections.iter().enumerate() {
                let wxy = || format!("sections {xi}, {yi} = {}, {}, probe {}", x.describe(m), y.describe(m), probe());
                let eq2 = (|| {
                    let xy = loday_bracket(m, x, y)?;
                    let lhs = lie_extended(m, x, &lie_extended(m, y, rho)?)?
                        .difference(&lie_extended(m, y, &lie_extended(m, x, rho)?)?);
                    Ok(lhs == lie_extended(m, &xy, rho)?)
                })();
                tallies[1].record(eq2, wxy);
                let eq3 = (|| {
                    let lhs = iota_extended(m, x, &iota_extended(m, y, rho)?)?
                        .sum(&iota_extended(m, y, &iota_extended(m, x, rho)?)?);
                    let rhs = m.wedge(&pairing(m, x, y)?.scaled(&crate::scalar::int(2)), rho)?;
                    Ok(lhs == rhs)
                })();
                tallies[2].record(eq3, wxy);
                let eq4 = (|| {
                    let xy = loday_bracket(m, x, y)?;
                    let lhs = lie_extended(m, x, &iota_extended(m, y, rho)?)?
                        .difference(&iota_extended(m, y, &lie_extended(m, x, rho)?)?);
                    Ok(lhs == iota_extended(m, &xy, rho)?)
                })();
                tallies[3].record(eq4, wxy);
            }
        }
        let eq6 = dt(rho).and_then(|x| dt(&x)).map(|x| x.is_zero());
        tallies[5].record(eq6, || format!("probe {}", probe()));
    }
    CartanReport { equations: tallies.into_iter().map(Tally::finish).collect() }
}

/// Per generator: `dξ_j − ι_j H = 0`.
pub fn purity_check(m: &CdgaModel) -> Result<Vec<bool>> {
    (0..m.generator_count())
        .map(|j| Ok(m.differential(m.xi(j))? == m.iota(j, m.h())?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyResult {
    pub isotropic: bool,
    /// First generator pair with nonzero pairing, and its value.
    pub witness: Option<(usize, usize, String)>,
}

pub fn isotropy_check(m: &CdgaModel) -> Result<IsotropyResult> {
    for i in 0..m.generator_count() {
        for j in i..m.generator_count() {
            let p = pairing(m, &ExtendedSection::generator(m, i), &ExtendedSection::generator(m, j))?;
            if !p.is_zero() {
                return Ok(IsotropyResult { isotropic: false, witness: Some((i, j, m.format(&p))) });
            }
        }
    }
    Ok(IsotropyResult { isotropic: true, witness: None })
}

pub fn require_isotropic(m: &CdgaModel) -> Result<()> {
    let r = isotropy_check(m)?;
    match r.witness {
        Some((i, j, value)) => Err(Error::NotIsotropic { i, j, value }),
        None => Ok(()),
    }
}

/// `d_G = d − Σ_j u_j ι_j` on equivariant elements, truncated at u-degree `n`.
pub fn d_g(m: &CdgaModel, x: &EquivariantElement, n: usize) -> Result<EquivariantElement> {
    let g = m.generator_count();
    let mut out = x.map_forms(|f| m.differential(f))?;
    for j in 0..g {
        let contracted = x.map_forms(|f| m.iota(j, f))?;
        out.add(&contracted.times_u(j).negated());
    }
    Ok(out.truncated(n))
}

/// `H_G = H + Σ_j u_j ξ_j`; requires a pure, isotropic action and checks `d_G H_G = 0`.
pub fn build_hg(m: &CdgaModel) -> Result<EquivariantElement> {
    let g = m.generator_count();
    for (j, pure) in purity_check(m)?.into_iter().enumerate() {
        if !pure {
            return Err(Error::NotPure(m.generators()[j].clone()));
        }
    }
    require_isotropic(m)?;
    let mut hg = EquivariantElement::from_form(g, m.h().clone());
    for j in 0..g {
        hg.add_term(single_u(g, j, 1), m.xi(j));
    }
    let closed = d_g(m, &hg, 2)?;
    if !closed.is_zero() {
        return Err(Error::DSquaredNonzero(format!("d_G H_G = {}", closed.format(m))));
    }
    Ok(hg)
}

fn check_invariant_functions(m: &CdgaModel, f: &[FormElement]) -> Result<()> {
    let g = m.generator_count();
    if f.len() != g {
        return Err(Error::Structural("one function per generator required".into()));
    }
    for (j, fj) in f.iter().enumerate() {
        m.check(fj)?;
        if !fj.is_zero() && m.homogeneous_degree(fj) != Some(0) {
            return Err(Error::NonInvariantFunction(j));
        }
        for i in 0..g {
            let mut expected = SparseVec::new();
            for (k, fk) in f.iter().enumerate() {
                expected.add_scaled(m.structure_constant(i, j, k), fk);
            }
            if m.lie_derivative(i, fj)? != expected {
                return Err(Error::NonInvariantFunction(j));
            }
        }
    }
    Ok(())
}

/// `δ_f(τ_j) = δ(τ_j) + d f_j`
pub fn perturb_delta(m: &CdgaModel, f: &[FormElement]) -> Result<CdgaModel> {
    check_invariant_functions(m, f)?;
    let xi = (0..m.generator_count())
        .map(|j| Ok(m.xi(j).sum(&m.differential(&f[j])?)))
        .collect::<Result<Vec<_>>>()?;
    m.with_twist(m.h().clone(), xi)
}

/// Data after the equivariant B-transform by `B + Σ u_j f_j`:
/// `H ↦ H − dB`, `ξ_j ↦ ξ_j + d f_j + ι_j B`.
pub fn equivariant_b_transform_model(m: &CdgaModel, b: &FormElement, f: &[FormElement]) -> Result<CdgaModel> {
    m.check(b)?;
    if !b.is_zero() && m.homogeneous_degree(b) != Some(2) {
        return Err(Error::NonInvariantData("B must be a 2-form".into()));
    }
    for j in 0..m.generator_count() {
        if !m.lie_derivative(j, b)?.is_zero() {
            return Err(Error::NonInvariantData(format!("L_{} B ≠ 0", m.generators()[j])));
        }
    }
    check_invariant_functions(m, f).map_err(|e| match e {
        Error::NonInvariantFunction(j) => Error::NonInvariantData(format!("f_{j} is not invariant")),
        other => other,
    })?;
    let h = m.h().difference(&m.differential(b)?);
    let xi = (0..m.generator_count())
        .map(|j| Ok(m.xi(j).sum(&m.differential(&f[j])?).sum(&m.iota(j, b)?)))
        .collect::<Result<Vec<_>>>()?;
    m.with_twist(h, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_model_str;
    use crate::scalar::int;

    const T3: &str = "model t3\nbasis one deg 0\nbasis a deg 1\nbasis b deg 1\nbasis c deg 1\n\
        basis ab deg 2\nbasis ac deg 2\nbasis bc deg 2\nbasis abc deg 3\nunit one\n\
        wedge a b -> 1 ab\nwedge a c -> 1 ac\nwedge b c -> 1 bc\nwedge a bc -> 1 abc\n\
        wedge b ac -> -1 abc\nwedge c ab -> 1 abc\n";

    #[test]
    fn b_transform_two_terms() {
        let m = parse_model_str(T3).unwrap();
        let b = m.element("ab");
        let out = b_transform(&m, &m.element("c"), &b).unwrap();
        assert_eq!(out, m.element("c").difference(&m.element("abc")));
        let back = b_transform(&m, &out, &b.negated()).unwrap();
        assert_eq!(back, m.element("c"));
    }

    #[test]
    fn twisted_differential_of_unit() {
        let m = parse_model_str(&format!("{T3}H -> 1 abc\n")).unwrap();
        assert_eq!(twisted_differential(&m, &m.unit(), m.h()).unwrap(), m.element("abc").negated());
    }

    #[test]
    fn pairing_half() {
        let src = "model p\nbasis one deg 0\nbasis e deg 1\nunit one\ngenerator t\niota t e -> 1 one\n";
        let m = parse_model_str(src).unwrap();
        let x = ExtendedSection::vector_field(&m, 0);
        let y = ExtendedSection::one_form(&m, m.element("e"));
        assert_eq!(pairing(&m, &x, &y).unwrap(), m.unit().scaled(&ratio(1, 2)));
        assert_eq!(pairing(&m, &y, &x).unwrap(), pairing(&m, &x, &y).unwrap());
        assert_eq!(
            vector_part_of_contraction(&m, &m.iota_matrix(0).unwrap().scaled(&int(3))).unwrap(),
            vec![int(3)]
        );
        let bogus = SparseMatrix::from_columns(2, vec![SparseVec::new(), SparseVec::unit(1)]);
        assert_eq!(vector_part_of_contraction(&m, &bogus), Err(Error::NonConstantCoefficient));
        let r = isotropy_check(&parse_model_str(&format!("{src}xi t -> 1 e\n")).unwrap()).unwrap();
        assert!(!r.isotropic);
    }
}
