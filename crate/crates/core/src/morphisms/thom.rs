//! Axiomatic Thom and Euler data, the pushforward identities, and fixed-point localization.

use num_traits::Zero;

use super::morphism::{equivariance_check, ExtendedMorphism};
use crate::equivariant::{
    annihilator, cartan_differential, stable_cohomology, CartanComplex, CohomologyResult, EquivariantElement,
    TorsionOutcome,
};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::operators::d_g;
use crate::scalar::{format_rational, Scalar};
use crate::sparse::SparseVec;

/// Thom data for a fixed component `i: F → M` with projection `π: M → F`.
#[derive(Clone, Debug)]
pub struct ThomData {
    pub name: String,
    pub restriction: ExtendedMorphism,
    pub projection: ExtendedMorphism,
    /// Thom class on `M`.
    pub thom_class: EquivariantElement,
    /// Euler class on `F`.
    pub euler: EquivariantElement,
    /// Fiber integral of the Thom class; `π_*(Θ ∧ π*a) = integral · a`.
    pub integral: Scalar,
}

impl ThomData {
    pub fn new(
        name: &str,
        restriction: ExtendedMorphism,
        projection: ExtendedMorphism,
        thom_class: EquivariantElement,
        euler: EquivariantElement,
        integral: Scalar,
    ) -> Result<Self> {
        if restriction.source() != projection.target() || restriction.target() != projection.source() {
            return Err(Error::ModelMismatch("restriction and projection must go between the same two models".into()));
        }
        let m = restriction.target();
        let f = restriction.source();
        for (x, model) in [(&thom_class, m), (&euler, f)] {
            if x.vars() != model.generator_count() {
                return Err(Error::ModelMismatch(model.name().to_string()));
            }
            for form in x.terms().values() {
                model.check(form)?;
                if model.parity(form) != Some(0) {
                    return Err(Error::Structural("Thom and Euler classes must be even".into()));
                }
            }
        }
        Ok(Self { name: name.into(), restriction, projection, thom_class, euler, integral })
    }

    pub fn total_space(&self) -> &crate::model::CdgaModel {
        self.restriction.target()
    }

    pub fn fixed_set(&self) -> &crate::model::CdgaModel {
        self.restriction.source()
    }

    /// `i_* a = Θ ∧ π̃• a`
    pub fn pushforward(&self, a: &EquivariantElement, n: usize) -> Result<EquivariantElement> {
        let lifted = self.projection.pullback_equivariant(a)?;
        self.thom_class.wedge(self.total_space(), &lifted, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThomReport {
    pub checks: Vec<IdentityCheck>,
}

impl ThomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn check(name: &'static str, witness: Option<String>) -> IdentityCheck {
    IdentityCheck { name, passed: witness.is_none(), witness }
}

/// Matrices of `i•`, `π̃•` and `i_*` between the Cartan complexes at truncation `n`, per parity.
struct Maps {
    cm: CartanComplex,
    cf: CartanComplex,
    restrict: [SparseMatrix; 2],
    push: [SparseMatrix; 2],
}

fn maps(t: &ThomData, n: usize) -> Result<Maps> {
    let cm = CartanComplex::new(t.total_space(), n)?;
    let cf = CartanComplex::new(t.fixed_set(), n)?;
    let restrict = [t.restriction.cartan_matrix(&cm, &cf, 0)?, t.restriction.cartan_matrix(&cm, &cf, 1)?];
    let mut push = [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)];
    for (p, slot) in push.iter_mut().enumerate() {
        *slot = cf_to_cm(&cf, &cm, p, |x| t.pushforward(x, n))?;
    }
    Ok(Maps { cm, cf, restrict, push })
}

fn cf_to_cm(
    cf: &CartanComplex,
    cm: &CartanComplex,
    p: usize,
    op: impl Fn(&EquivariantElement) -> Result<EquivariantElement>,
) -> Result<SparseMatrix> {
    let mut cols = Vec::new();
    for i in 0..cf.dim(p) {
        cols.push(cm.coordinates(p, &op(&cf.element(p, &SparseVec::unit(i)))?)?);
    }
    Ok(SparseMatrix::from_columns(cm.dim(p), cols))
}

/// Verifies, at truncation `n`:
/// chain-map properties of `i•`, `π̃•`, `i_*` and closedness of `Θ`; `π_*(Θ ∧ π̃• a) = a`;
/// `i•Θ = e`; and `i• i_* [a] = [a] ∧ e` for all classes `a` of `F`.
pub fn thom_check(t: &ThomData, n: usize) -> Result<ThomReport> {
    for m in [&t.restriction, &t.projection] {
        if let Some(w) = equivariance_check(m)?.witness {
            return Err(Error::NotEquivariant(w));
        }
    }
    let mp = maps(t, n)?;
    let (cm, cf) = (&mp.cm, &mp.cf);
    let model_m = t.total_space();
    let model_f = t.fixed_set();
    let mut checks = Vec::new();

    let closed = d_g(model_m, &t.thom_class, n)?;
    let theta_witness = (!closed.is_zero()).then(|| format!("d_G Θ = {}", closed.format(model_m)));
    checks.push(check("thom-class-closed", theta_witness));

    let mut chain_witness = None;
    for p in 0..2 {
        if cf.differential(p).compose(&mp.restrict[p]) != mp.restrict[1 - p].compose(cm.differential(p)) {
            chain_witness.get_or_insert(format!("restriction is not a chain map in parity {p}"));
        }
        if cm.differential(p).compose(&mp.push[p]) != mp.push[1 - p].compose(cf.differential(p)) {
            chain_witness.get_or_insert(format!("i_* is not a chain map in parity {p}"));
        }
        let proj = cf_to_cm(cf, cm, p, |x| t.projection.pullback_equivariant(x))?;
        let proj_other = cf_to_cm(cf, cm, 1 - p, |x| t.projection.pullback_equivariant(x))?;
        if cm.differential(p).compose(&proj) != proj_other.compose(cf.differential(p)) {
            chain_witness.get_or_insert(format!("projection pullback is not a chain map in parity {p}"));
        }
    }
    checks.push(check("chain-maps", chain_witness));

    let hf = crate::equivariant::cohomology(cf);
    let mut push_witness = None;
    if t.integral != crate::scalar::one() {
        if let Some(p) = (0..2).find(|&p| hf.rank(p) > 0) {
            let a = hf.representative(p, 0);
            push_witness = Some(format!(
                "π_*(Θ ∧ π*a) = {} · a for a = {}",
                format_rational(&t.integral),
                a.format(model_f)
            ));
        } else {
            push_witness = Some(format!("fiber integral of Θ is {}", format_rational(&t.integral)));
        }
    }
    checks.push(check("pushforward-identity", push_witness));

    let restricted = t.restriction.pullback_equivariant(&t.thom_class)?.truncated(n);
    let euler_witness = (restricted != t.euler.truncated(n))
        .then(|| format!("i*Θ = {} but e = {}", restricted.format(model_f), t.euler.format(model_f)));
    checks.push(check("restriction-of-thom-class", euler_witness));

    let mut ii_witness = None;
    'outer: for p in 0..2 {
        for k in 0..hf.rank(p) {
            let a = hf.representative(p, k);
            let coords = cf.coordinates(p, &a)?;
            let lhs = mp.restrict[p].apply(&mp.push[p].apply(&coords));
            let rhs = cf.coordinates(p, &a.wedge(model_f, &t.euler, n)?)?;
            if !hf.is_boundary(p, &lhs.difference(&rhs)) {
                ii_witness = Some(format!("i*i_*[a] ≠ [a] ∧ e for a = {}", a.format(model_f)));
                break 'outer;
            }
        }
    }
    checks.push(check("euler-identity", ii_witness));
    Ok(ThomReport { checks })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationReport {
    pub euler_invertible: bool,
    /// u-power of the leading Euler term and its leading coefficient.
    pub euler_leading: (usize, Scalar),
    /// Annihilators of stable classes of `M` and `F`, per parity.
    pub torsion_m: [Vec<TorsionOutcome>; 2],
    pub torsion_f: [Vec<TorsionOutcome>; 2],
    /// Annihilators of a basis of the kernel of `i*` on stable classes of `M`.
    pub kernel_torsion: Vec<TorsionOutcome>,
    /// Annihilators (modulo the image of `i*`) of the stable classes of `F`.
    pub cokernel_torsion: Vec<TorsionOutcome>,
    /// For each stable class `x` of `M`: annihilator of `u^m x − i_*(i*x ∧ (e/u^m)^{-1})`.
    pub reconstruction: Vec<TorsionOutcome>,
    /// Stable classes that are free up to truncation, per parity.
    pub localized_ranks_m: [usize; 2],
    pub localized_ranks_f: [usize; 2],
    pub thom: ThomReport,
    pub witness: Option<String>,
}

impl LocalizationReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

fn is_torsion(o: &TorsionOutcome) -> bool {
    matches!(o, TorsionOutcome::Torsion(_))
}

/// `(e / u^m)^{-1}` where `u^m` is the lowest power of `u` in `e`.
fn euler_inverse(t: &ThomData, n: usize) -> Result<(usize, Scalar, EquivariantElement)> {
    let model = t.fixed_set();
    let e = &t.euler;
    let Some(m0) = e.min_u_degree() else {
        return Err(Error::EulerNotInvertible("Euler class is zero".into()));
    };
    let mut shifted = EquivariantElement::zero(1);
    for (exp, f) in e.terms() {
        shifted.add_term(vec![exp[0] - m0], f);
    }
    let lead = shifted.coefficient(&[0]);
    let c = lead.coeff(model.unit_index());
    if c.is_zero() {
        return Err(Error::EulerNotInvertible(format!("leading coefficient {} has no unit term", model.format(&lead))));
    }
    // e' = c (1 + ν)
    let mut nu = shifted.scaled(&c.recip());
    nu.add_term(vec![0], &model.unit().negated());
    let mut power = crate::equivariant::element::unit_element(model);
    let mut inverse = power.clone();
    for k in 1..=(n + model.dim() + 1) {
        power = power.wedge(model, &nu, n)?;
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 0 { crate::scalar::one() } else { -crate::scalar::one() };
        inverse.add(&power.scaled(&sign));
        if k == n + model.dim() + 1 {
            return Err(Error::EulerNotInvertible("leading coefficient is not unit plus nilpotent".into()));
        }
    }
    Ok((m0, c.clone(), inverse.scaled(&c.recip())))
}

/// Localization checks for a single circle action at truncation `n`.
pub fn localization_check(t: &ThomData, n: usize) -> Result<LocalizationReport> {
    let g = t.total_space().generator_count();
    if g != 1 {
        return Err(Error::MultiVariableUnsupported(g));
    }
    let thom = thom_check(t, n)?;
    let (m0, lead, inv) = euler_inverse(t, n)?;
    let hm = stable_cohomology(t.total_space(), n)?;
    let hf = stable_cohomology(t.fixed_set(), n)?;
    let cm = hm.complex();
    let cf = hf.complex();
    let mut witness = thom.first_failure().map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()));

    let torsion_table = |h: &CohomologyResult| -> Result<[Vec<TorsionOutcome>; 2]> {
        let mut out = [Vec::new(), Vec::new()];
        for (p, slot) in out.iter_mut().enumerate() {
            for (k, _) in h.stable_classes(p) {
                slot.push(annihilator(h, p, &h.representative(p, k))?);
            }
        }
        Ok(out)
    };
    let torsion_m = torsion_table(&hm)?;
    let torsion_f = torsion_table(&hf)?;

    let mut kernel_torsion = Vec::new();
    let mut cokernel_torsion = Vec::new();
    for p in 0..2 {
        let restrict = t.restriction.cartan_matrix(cm, cf, p)?;
        let stable_m: Vec<usize> = hm.stable_classes(p).iter().map(|(k, _)| *k).collect();
        // images of stable classes in class coordinates of F
        let mut images = Vec::new();
        for &k in &stable_m {
            let z = restrict.apply(&hm.classes(p)[k].representative);
            images.push(hf.class_coordinates(p, &z).ok_or_else(|| Error::Structural("i* of a cycle is not a cycle".into()))?);
        }
        let img = SparseMatrix::from_columns(hf.rank(p), images.clone());
        for combo in crate::linalg::kernel_basis(&img).vectors() {
            let mut coords = SparseVec::new();
            for (i, c) in combo.iter() {
                coords.add_scaled(c, &hm.classes(p)[stable_m[i]].representative);
            }
            let o = annihilator(&hm, p, &cm.element(p, &coords))?;
            if !is_torsion(&o) && witness.is_none() {
                witness = Some(format!("kernel of i* contains a non-torsion class in parity {p}"));
            }
            kernel_torsion.push(o);
        }
        let image_space = crate::linalg::Echelon::from_vectors(images.iter());
        for (k, _) in hf.stable_classes(p) {
            let x = hf.representative(p, k);
            let top = x.max_u_degree().unwrap_or(0);
            let mut outcome = TorsionOutcome::FreeUpToTruncation;
            let mut y = x.clone();
            for j in 0..=n.saturating_sub(top) {
                if j > 0 {
                    y = y.times_u(0);
                }
                let coords = hf.class_coordinates_of_element(p, &y)?.unwrap_or_default();
                if image_space.contains(&coords) {
                    outcome = TorsionOutcome::Torsion(j);
                    break;
                }
            }
            if !is_torsion(&outcome) && witness.is_none() {
                witness = Some(format!("cokernel of i* contains a non-torsion class in parity {p}"));
            }
            cokernel_torsion.push(outcome);
        }
    }

    let mut reconstruction = Vec::new();
    let model_m = t.total_space();
    let model_f = t.fixed_set();
    for p in 0..2 {
        for (k, _) in hm.stable_classes(p) {
            let x = hm.representative(p, k);
            let y = t.restriction.pullback_equivariant(&x)?;
            let z = y.wedge(model_f, &inv, n)?;
            let back = t.pushforward(&z, n)?;
            let mut lhs = x.clone();
            for _ in 0..m0 {
                lhs = lhs.times_u(0);
            }
            let w = lhs.truncated(n).difference(&back);
            let dw = cartan_differential(model_m, &w, n)?;
            let outcome = if w.is_zero() {
                TorsionOutcome::Torsion(0)
            } else if !dw.is_zero() {
                if witness.is_none() {
                    witness = Some(format!("reconstruction defect is not closed for {}", x.format(model_m)));
                }
                TorsionOutcome::FreeUpToTruncation
            } else if hm.is_boundary(p, &cm.coordinates(p, &w)?) {
                TorsionOutcome::Torsion(0)
            } else {
                annihilator(&hm, p, &w)?
            };
            reconstruction.push(outcome);
        }
    }
    let count_free = |tab: &[Vec<TorsionOutcome>; 2]| [0, 1].map(|p| tab[p].iter().filter(|o| !is_torsion(o)).count());
    Ok(LocalizationReport {
        euler_invertible: true,
        euler_leading: (m0, lead),
        localized_ranks_m: count_free(&torsion_m),
        localized_ranks_f: count_free(&torsion_f),
        torsion_m,
        torsion_f,
        kernel_torsion,
        cokernel_torsion,
        reconstruction,
        thom,
        witness,
    })
}
