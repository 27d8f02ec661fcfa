//! Builder for models presented by generators: monomials in even generators times squarefree
//! monomials in odd generators, with derivations extended by the Leibniz rule.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{BasisElement, CdgaModel, LieActionData, ModelData, Product, TwistData};
use crate::scalar::Scalar;
use crate::sparse::SparseVec;

/// A polynomial in the generators, written as terms `coefficient · g₁ g₂ …` (factors in any order,
/// repeated for powers).
pub type PolySpec = Vec<(Scalar, Vec<String>)>;

#[derive(Clone, Debug)]
pub struct FreeGenerator {
    pub name: String,
    pub degree: usize,
    /// Defaults to 1 for even generators and 0 for odd ones.
    pub weight: Option<usize>,
    pub d: PolySpec,
}

/// What happens to products beyond the caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapMode {
    /// Products leaving the caps are absent from the table (and raise `CapExceeded` when used).
    Absent,
    /// The model is the quotient by monomials of weight above the cap.
    Quotient,
}

#[derive(Clone, Debug)]
pub struct FreeCdgaSpec {
    pub name: String,
    pub generators: Vec<FreeGenerator>,
    /// Monomial rewrite rules `lhs -> rhs`, applied until no left-hand side divides a monomial.
    pub relations: Vec<(Vec<String>, PolySpec)>,
    pub degree_cap: usize,
    pub poly_cap: usize,
    pub mode: CapMode,
    pub action_generators: Vec<String>,
    /// `iota[j]` lists `(generator, image)` pairs; unlisted generators contract to zero.
    pub iota: Vec<Vec<(String, PolySpec)>>,
    pub structure_constants: Option<Vec<Vec<Vec<Scalar>>>>,
    pub h: PolySpec,
    pub xi: Vec<PolySpec>,
}

impl FreeCdgaSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            generators: Vec::new(),
            relations: Vec::new(),
            degree_cap: usize::MAX,
            poly_cap: usize::MAX,
            mode: CapMode::Absent,
            action_generators: Vec::new(),
            iota: Vec::new(),
            structure_constants: None,
            h: Vec::new(),
            xi: Vec::new(),
        }
    }
}

/// Shorthand for a single-term polynomial written as space-separated factors.
pub fn term(coefficient: Scalar, factors: &str) -> (Scalar, Vec<String>) {
    (coefficient, factors.split_whitespace().map(String::from).collect())
}

type Mono = Vec<usize>;
type Poly = BTreeMap<Mono, Scalar>;

struct Algebra {
    degrees: Vec<usize>,
    weights: Vec<usize>,
    relations: Vec<(Mono, Poly)>,
}

impl Algebra {
    fn odd(&self, i: usize) -> bool {
        self.degrees[i] % 2 == 1
    }

    fn degree(&self, m: &Mono) -> usize {
        m.iter().zip(&self.degrees).map(|(e, d)| e * d).sum()
    }

    fn weight(&self, m: &Mono) -> usize {
        m.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }

    fn mul_mono(&self, a: &Mono, b: &Mono) -> Option<(bool, Mono)> {
        let mut negative = false;
        for i in 0..a.len() {
            if self.odd(i) && a[i] + b[i] > 1 {
                return None;
            }
        }
        for i in 0..a.len() {
            if !self.odd(i) || a[i] == 0 {
                continue;
            }
            for j in 0..i {
                if self.odd(j) && b[j] == 1 {
                    negative = !negative;
                }
            }
        }
        Some((negative, a.iter().zip(b).map(|(x, y)| x + y).collect()))
    }

    fn mul_raw(&self, p: &Poly, q: &Poly) -> Poly {
        let mut out = Poly::new();
        for (a, x) in p {
            for (b, y) in q {
                if let Some((neg, m)) = self.mul_mono(a, b) {
                    let c = if neg { -(x * y) } else { x * y };
                    add_term(&mut out, m, c);
                }
            }
        }
        out
    }

    /// Rewrites with the relations until every monomial is normal.
    fn normalize(&self, p: Poly) -> Poly {
        let mut pending = p;
        let mut done = Poly::new();
        let mut guard = 0usize;
        while let Some((m, c)) = pending.pop_first() {
            guard += 1;
            assert!(guard < 1_000_000, "relations do not terminate");
            let rule = self.relations.iter().find(|(lhs, _)| lhs.iter().zip(&m).all(|(l, e)| l <= e));
            match rule {
                None => add_term(&mut done, m, c),
                Some((lhs, rhs)) => {
                    let rest: Mono = m.iter().zip(lhs).map(|(e, l)| e - l).collect();
                    let (neg, check) = self.mul_mono(lhs, &rest).expect("divisor product is defined");
                    debug_assert_eq!(check, m);
                    let c = if neg { -c } else { c };
                    let mut rest_poly = Poly::new();
                    rest_poly.insert(rest, c);
                    for (m2, c2) in self.mul_raw(rhs, &rest_poly) {
                        add_term(&mut pending, m2, c2);
                    }
                }
            }
        }
        done
    }

    fn mul(&self, p: &Poly, q: &Poly) -> Poly {
        self.normalize(self.mul_raw(p, q))
    }

    fn factors(&self, m: &Mono) -> Vec<usize> {
        m.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e)).collect()
    }

    fn mono_of(&self, factors: &[usize]) -> Mono {
        let mut m = vec![0; self.degrees.len()];
        for &f in factors {
            m[f] += 1;
        }
        m
    }

    /// Extends a derivation of the given parity from generators to a monomial.
    fn derive(&self, images: &[Poly], odd: bool, m: &Mono) -> Poly {
        let seq = self.factors(m);
        let mut out = Poly::new();
        let mut prefix_degree = 0;
        for t in 0..seq.len() {
            let prefix = single(self.mono_of(&seq[..t]));
            let suffix = single(self.mono_of(&seq[t + 1..]));
            let mut term = self.mul_raw(&self.mul_raw(&prefix, &images[seq[t]]), &suffix);
            if odd && prefix_degree % 2 == 1 {
                for c in term.values_mut() {
                    *c = -c.clone();
                }
            }
            for (k, c) in term {
                add_term(&mut out, k, c);
            }
            prefix_degree += self.degrees[seq[t]];
        }
        self.normalize(out)
    }

    fn derive_poly(&self, images: &[Poly], odd: bool, p: &Poly) -> Poly {
        let mut out = Poly::new();
        for (m, c) in p {
            for (k, x) in self.derive(images, odd, m) {
                add_term(&mut out, k, c * x);
            }
        }
        out
    }
}

fn single(m: Mono) -> Poly {
    let mut p = Poly::new();
    p.insert(m, crate::scalar::one());
    p
}

fn add_term(p: &mut Poly, m: Mono, c: Scalar) {
    let e = p.entry(m.clone()).or_insert_with(Scalar::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&m);
    }
}

fn monomial_name(names: &[String], m: &Mono) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
        .collect();
    if parts.is_empty() {
        "one".into()
    } else {
        parts.join(".")
    }
}

/// Builds the model. Fails with `InconsistentDifferential` when `d²` of a generator is nonzero.
pub fn enumerate_free_cdga(spec: &FreeCdgaSpec) -> Result<CdgaModel> {
    let names: Vec<String> = spec.generators.iter().map(|g| g.name.clone()).collect();
    let ng = names.len();
    let lookup = |n: &str| -> Result<usize> {
        names.iter().position(|x| x == n).ok_or_else(|| Error::Structural(format!("unknown generator `{n}`")))
    };
    let weights: Vec<usize> = spec
        .generators
        .iter()
        .map(|g| g.weight.unwrap_or(if g.degree % 2 == 0 { 1 } else { 0 }))
        .collect();
    for (g, w) in spec.generators.iter().zip(&weights) {
        let bounded = (*w > 0 && spec.poly_cap < usize::MAX) || (g.degree > 0 && spec.degree_cap < usize::MAX);
        if g.degree % 2 == 0 && !bounded {
            return Err(Error::Structural(format!("powers of even generator `{}` are not capped", g.name)));
        }
    }
    let mut alg = Algebra {
        degrees: spec.generators.iter().map(|g| g.degree).collect(),
        weights,
        relations: Vec::new(),
    };
    let to_poly = |alg: &Algebra, p: &PolySpec| -> Result<Poly> {
        let mut out = Poly::new();
        for (c, factors) in p {
            let mut acc = single(vec![0; ng]);
            for f in factors {
                let mut m = vec![0; ng];
                m[lookup(f)?] = 1;
                acc = alg.mul_raw(&acc, &single(m));
            }
            for (m, x) in acc {
                add_term(&mut out, m, c * x);
            }
        }
        Ok(out)
    };
    let mut relations = Vec::new();
    for (lhs, rhs) in &spec.relations {
        let mut m = vec![0; ng];
        for f in lhs {
            m[lookup(f)?] += 1;
        }
        relations.push((m, to_poly(&alg, rhs)?));
    }
    alg.relations = relations;

    let d_images: Vec<Poly> = spec.generators.iter().map(|g| to_poly(&alg, &g.d)).collect::<Result<_>>()?;
    for (i, g) in spec.generators.iter().enumerate() {
        for (m, _) in &d_images[i] {
            if alg.degree(m) != g.degree + 1 {
                return Err(Error::Structural(format!("d {} has wrong degree", g.name)));
            }
        }
        let dd = alg.derive_poly(&d_images, true, &d_images[i]);
        if !dd.is_empty() {
            return Err(Error::InconsistentDifferential(format!("d² {} ≠ 0", g.name)));
        }
    }

    // basis enumeration
    let mut basis_monos: Vec<Mono> = Vec::new();
    let mut stack: Vec<Mono> = vec![vec![]];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == ng {
            basis_monos.push(prefix);
            continue;
        }
        let i = prefix.len();
        let max_e = if alg.odd(i) { 1 } else { usize::MAX };
        let mut e = 0;
        while e <= max_e {
            let mut m = prefix.clone();
            m.push(e);
            let mut full = m.clone();
            full.resize(ng, 0);
            if alg.degree(&full) > spec.degree_cap || alg.weight(&full) > spec.poly_cap {
                break;
            }
            stack.push(m);
            e += 1;
        }
    }
    basis_monos.retain(|m| alg.relations.iter().all(|(lhs, _)| !lhs.iter().zip(m).all(|(l, e)| l <= e)));
    basis_monos.sort();
    let index: BTreeMap<Mono, usize> = basis_monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let unit = index[&vec![0; ng]];

    let in_basis = |p: &Poly| -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for (m, c) in p {
            match index.get(m) {
                Some(&i) => v.add_at(i, c),
                None if spec.mode == CapMode::Quotient && alg.weight(m) > spec.poly_cap => {}
                None => return None,
            }
        }
        Some(v)
    };
    let must = |p: &Poly, what: &str| -> Result<SparseVec> {
        in_basis(p).ok_or_else(|| Error::Structural(format!("{what} leaves the span of the basis")))
    };

    let n = basis_monos.len();
    let basis: Vec<BasisElement> = basis_monos
        .iter()
        .map(|m| BasisElement { name: monomial_name(&names, m), degree: alg.degree(m) })
        .collect();
    let mut wedge = vec![vec![Product::Absent; n]; n];
    for a in 0..n {
        for b in 0..n {
            let p = alg.mul(&single(basis_monos[a].clone()), &single(basis_monos[b].clone()));
            if let Some(v) = in_basis(&p) {
                wedge[a][b] = Product::Span(v);
            }
        }
    }
    let d = basis_monos
        .iter()
        .zip(&basis)
        .map(|(m, b)| must(&alg.derive(&d_images, true, m), &format!("d {}", b.name)))
        .collect::<Result<Vec<_>>>()?;

    let g = spec.action_generators.len();
    if spec.iota.len() != g || spec.xi.len() != g {
        return Err(Error::Structural("iota and xi need one entry per action generator".into()));
    }
    let mut iota = Vec::new();
    for (j, rules) in spec.iota.iter().enumerate() {
        let mut images = vec![Poly::new(); ng];
        for (gen, img) in rules {
            images[lookup(gen)?] = to_poly(&alg, img)?;
        }
        let col = basis_monos
            .iter()
            .zip(&basis)
            .map(|(m, b)| must(&alg.derive(&images, true, m), &format!("iota {} {}", spec.action_generators[j], b.name)))
            .collect::<Result<Vec<_>>>()?;
        iota.push(col);
    }
    let h = must(&alg.normalize(to_poly(&alg, &spec.h)?), "H")?;
    let xi = spec
        .xi
        .iter()
        .map(|p| must(&alg.normalize(to_poly(&alg, p)?), "xi"))
        .collect::<Result<Vec<_>>>()?;
    let structure_constants = spec
        .structure_constants
        .clone()
        .unwrap_or_else(|| vec![vec![vec![Scalar::zero(); g]; g]; g]);
    CdgaModel::new(ModelData {
        name: spec.name.clone(),
        basis,
        unit,
        wedge,
        d,
        lie: LieActionData { generators: spec.action_generators.clone(), iota, structure_constants },
        twist: TwistData { h, xi },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn gen(name: &str, degree: usize, d: PolySpec) -> FreeGenerator {
        FreeGenerator { name: name.into(), degree, weight: None, d }
    }

    #[test]
    fn single_odd_generator() {
        let mut spec = FreeCdgaSpec::new("circle");
        spec.generators = vec![gen("t", 1, vec![])];
        spec.degree_cap = 1;
        let m = enumerate_free_cdga(&spec).unwrap();
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn exterior_algebra_on_three() {
        let mut spec = FreeCdgaSpec::new("t3");
        spec.generators = vec![gen("a", 1, vec![]), gen("b", 1, vec![]), gen("c", 1, vec![])];
        let m = enumerate_free_cdga(&spec).unwrap();
        assert_eq!(m.dim(), 8);
        let ab = m.wedge(&m.element("a"), &m.element("b")).unwrap();
        let ba = m.wedge(&m.element("b"), &m.element("a")).unwrap();
        assert_eq!(ab, ba.negated());
        assert!(crate::validate::validate_model(&m).is_valid());
    }

    #[test]
    fn polynomial_caps_make_absent_products() {
        let mut spec = FreeCdgaSpec::new("s3");
        spec.generators = vec![
            gen("c", 0, vec![term(int(1), "gamma")]),
            FreeGenerator { name: "gamma".into(), degree: 1, weight: Some(1), d: vec![] },
            gen("alpha", 1, vec![]),
            gen("beta", 1, vec![]),
        ];
        spec.poly_cap = 3;
        let m = enumerate_free_cdga(&spec).unwrap();
        // c^k (k ≤ 3), c^k γ (k ≤ 2), times Λ(α, β)
        assert_eq!(m.dim(), 28);
        let c3 = m.element("c^3");
        assert!(matches!(m.wedge(&c3, &m.element("c")), Err(Error::CapExceeded { .. })));
        assert_eq!(m.differential(&m.element("c^2")).unwrap(), m.element("c.gamma").scaled(&int(2)));
    }

    #[test]
    fn inconsistent_differential() {
        let mut spec = FreeCdgaSpec::new("bad");
        spec.degree_cap = 4;
        // d d r = d(q p) = p p
        spec.generators = vec![gen("p", 2, vec![]), gen("q", 1, vec![]), gen("r", 2, vec![term(int(1), "q p")])];
        spec.generators[1].d = vec![term(int(1), "p")];
        assert!(matches!(enumerate_free_cdga(&spec), Err(Error::InconsistentDifferential(_))));
    }
}
