//! Exhaustive axiom checks for a model.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{CdgaModel, FormElement, Product};
use crate::sparse::SparseVec;

pub const AXIOMS: [&str; 14] = [
    "graded-commutativity",
    "associativity",
    "unit",
    "leibniz",
    "d-squared",
    "iota-derivation",
    "iota-squared",
    "iota-anticommute",
    "cartan-magic",
    "lie-closure",
    "dH",
    "invariance",
    "lie-antisymmetry",
    "jacobi",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub passed: bool,
    /// Instances skipped because a product left the span of the basis.
    pub inconclusive: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some(c) => Err(Error::AxiomViolation {
                axiom: c.axiom.to_string(),
                witness: c.witness.clone().unwrap_or_default(),
            }),
            None => Ok(self),
        }
    }
}

struct Checker {
    axiom: &'static str,
    inconclusive: usize,
    witness: Option<String>,
}

impl Checker {
    fn new(axiom: &'static str) -> Self {
        Self { axiom, inconclusive: 0, witness: None }
    }

    /// Records the outcome of one instance; returns false once a witness has been found.
    fn record(&mut self, outcome: Result<bool>, witness: impl FnOnce() -> String) -> bool {
        match outcome {
            Ok(true) => true,
            Ok(false) => {
                self.witness = Some(witness());
                false
            }
            Err(Error::CapExceeded { .. }) => {
                self.inconclusive += 1;
                true
            }
            Err(e) => {
                self.witness = Some(format!("{}: {e}", witness()));
                false
            }
        }
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            axiom: self.axiom,
            passed: self.witness.is_none(),
            inconclusive: self.inconclusive,
            witness: self.witness,
        }
    }
}

fn sign(k: usize) -> crate::scalar::Scalar {
    if k % 2 == 0 {
        crate::scalar::one()
    } else {
        -crate::scalar::one()
    }
}

pub fn validate_model(m: &CdgaModel) -> ValidationReport {
    let n = m.dim();
    let g = m.generator_count();
    let e = SparseVec::unit;
    let name = |i: usize| m.basis_name(i).to_string();
    let deg = |i: usize| m.degree(i);
    let mut checks = Vec::new();

    let mut c = Checker::new("graded-commutativity");
    'outer: for a in 0..n {
        for b in a..n {
            let ok = match (m.wedge_entry(a, b), m.wedge_entry(b, a)) {
                (Product::Span(p), Product::Span(q)) => Ok(*p == q.scaled(&sign(deg(a) * deg(b)))),
                (Product::Absent, Product::Absent) => Ok(true),
                _ => Ok(false),
            };
            if !c.record(ok, || format!("{} ∧ {}", name(a), name(b))) {
                break 'outer;
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("associativity");
    'outer: for a in 0..n {
        for b in 0..n {
            let ab = m.wedge(&e(a), &e(b));
            for k in 0..n {
                let ok = ab.clone().and_then(|ab| {
                    let left = m.wedge(&ab, &e(k))?;
                    let right = m.wedge(&e(a), &m.wedge(&e(b), &e(k))?)?;
                    Ok(left == right)
                });
                if !c.record(ok, || format!("({} ∧ {}) ∧ {}", name(a), name(b), name(k))) {
                    break 'outer;
                }
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("unit");
    for a in 0..n {
        let ok = m.wedge(&m.unit(), &e(a)).and_then(|l| Ok(l == e(a) && m.wedge(&e(a), &m.unit())? == e(a)));
        if !c.record(ok, || format!("unit ∧ {}", name(a))) {
            break;
        }
    }
    checks.push(c.finish());

    let leibniz = |op: &dyn Fn(&FormElement) -> Result<FormElement>, a: usize, b: usize| -> Result<bool> {
        let lhs = op(&m.wedge(&e(a), &e(b))?)?;
        let first = m.wedge(&op(&e(a))?, &e(b))?;
        let second = m.wedge(&e(a), &op(&e(b))?)?;
        Ok(lhs == first.sum(&second.scaled(&sign(deg(a)))))
    };

    let mut c = Checker::new("leibniz");
    'outer: for a in 0..n {
        for b in 0..n {
            if !c.record(leibniz(&|x| m.differential(x), a, b), || format!("d({} ∧ {})", name(a), name(b))) {
                break 'outer;
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("d-squared");
    for a in 0..n {
        let ok = m.differential(&e(a)).and_then(|x| m.differential(&x)).map(|x| x.is_zero());
        if !c.record(ok, || format!("d d {}", name(a))) {
            break;
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("iota-derivation");
    'outer: for j in 0..g {
        for a in 0..n {
            for b in 0..n {
                let ok = leibniz(&|x| m.iota(j, x), a, b);
                if !c.record(ok, || format!("ι_{}({} ∧ {})", m.generators()[j], name(a), name(b))) {
                    break 'outer;
                }
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("iota-squared");
    'outer: for j in 0..g {
        for a in 0..n {
            let ok = m.iota(j, &e(a)).and_then(|x| m.iota(j, &x)).map(|x| x.is_zero());
            if !c.record(ok, || format!("ι_{} ι_{} {}", m.generators()[j], m.generators()[j], name(a))) {
                break 'outer;
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("iota-anticommute");
    'outer: for i in 0..g {
        for j in i + 1..g {
            for a in 0..n {
                let ok = (|| Ok(m.iota(i, &m.iota(j, &e(a))?)?.sum(&m.iota(j, &m.iota(i, &e(a))?)?).is_zero()))();
                if !c.record(ok, || format!("generators {i},{j} on {}", name(a))) {
                    break 'outer;
                }
            }
        }
    }
    checks.push(c.finish());

    let bracket_identity = |op: &dyn Fn(usize, &FormElement) -> Result<FormElement>,
                            i: usize,
                            j: usize,
                            a: usize|
     -> Result<bool> {
        let lhs = m
            .lie_derivative(i, &op(j, &e(a))?)?
            .difference(&op(j, &m.lie_derivative(i, &e(a))?)?);
        let mut rhs = SparseVec::new();
        for k in 0..g {
            let c = m.structure_constant(i, j, k);
            if !c.is_zero() {
                rhs.add_scaled(c, &op(k, &e(a))?);
            }
        }
        Ok(lhs == rhs)
    };

    let mut c = Checker::new("cartan-magic");
    'outer: for i in 0..g {
        for j in 0..g {
            for a in 0..n {
                if !c.record(bracket_identity(&|k, x| m.iota(k, x), i, j, a), || {
                    format!("[L_{}, ι_{}] on {}", m.generators()[i], m.generators()[j], name(a))
                }) {
                    break 'outer;
                }
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("lie-closure");
    'outer: for i in 0..g {
        for j in 0..g {
            for a in 0..n {
                if !c.record(bracket_identity(&|k, x| m.lie_derivative(k, x), i, j, a), || {
                    format!("[L_{}, L_{}] on {}", m.generators()[i], m.generators()[j], name(a))
                }) {
                    break 'outer;
                }
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("dH");
    c.record(m.differential(m.h()).map(|x| x.is_zero()), || format!("dH = {}", m.format(&m.differential(m.h()).unwrap_or_default())));
    checks.push(c.finish());

    let mut c = Checker::new("invariance");
    for j in 0..g {
        let ok = m.lie_derivative(j, m.h()).map(|x| x.is_zero());
        if !c.record(ok, || format!("L_{} H ≠ 0", m.generators()[j])) {
            break;
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("lie-antisymmetry");
    'outer: for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                let ok = Ok((m.structure_constant(i, j, k) + m.structure_constant(j, i, k)).is_zero());
                if !c.record(ok, || format!("c[{i}][{j}][{k}]")) {
                    break 'outer;
                }
            }
        }
    }
    checks.push(c.finish());

    let mut c = Checker::new("jacobi");
    'outer: for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                for l in 0..g {
                    // [[X_i,X_j],X_k] + cyclic, coefficient of X_l
                    let mut total = crate::scalar::zero();
                    for (a, b, cc) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for p in 0..g {
                            total += m.structure_constant(a, b, p) * m.structure_constant(p, cc, l);
                        }
                    }
                    if !c.record(Ok(total.is_zero()), || format!("generators {i},{j},{k}")) {
                        break 'outer;
                    }
                }
            }
        }
    }
    checks.push(c.finish());

    ValidationReport { model: m.name().to_string(), checks }
}
