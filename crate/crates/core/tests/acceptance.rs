//! Acceptance suite: one line per criterion, then a single verdict.

mod common;

use cartanext::equivariant::{stable_cohomology, CartanComplex, EquivariantElement, TorsionOutcome};
use cartanext::free::{enumerate_free_cdga, term, CapMode, FreeCdgaSpec, FreeGenerator};
use cartanext::library;
use cartanext::model::CdgaModel;
use cartanext::morphisms::{
    cech_circle_sequence, compose, long_exact_sequence, pair_complex, splitting_change_equivalence, thom_check,
    localization_check, ExtendedMorphism,
};
use cartanext::operators::{
    basis_probes, build_hg, bundled_sections, d_g, equivariant_b_transform_model, purity_check,
    verify_cartan_relations,
};
use cartanext::scalar::{int, Scalar};
use cartanext::sparse::SparseVec;
use common::{dense, rank, DenseComplex, Q};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let mut full = vec!["cartanext"];
    full.extend_from_slice(args);
    let code = cartanext::cli::run(full, &mut out, &mut errs);
    (code, String::from_utf8(out).unwrap())
}

fn stable_by_degree(m: &CdgaModel, n: usize) -> Result<[Vec<usize>; 2], String> {
    let r = stable_cohomology(m, n).map_err(err)?;
    Ok([r.stable_ranks_by_u_degree(0), r.stable_ranks_by_u_degree(1)])
}

fn criterion_1() -> Outcome {
    let m = library::load_model("s1_trivial").map_err(err)?;
    let ranks = stable_by_degree(&m, 4)?;
    let mut odd = vec![0; 5];
    odd[0] = 1;
    ensure(ranks == [vec![0; 5], odd], || format!("stable ranks {ranks:?}"))?;
    let (code, text) = run_cli(&["equivariant", "s1_trivial.cdga", "-N", "4", "--stable"]);
    ensure(code == 0 && text.contains("even: 0, odd: 1 (u-degree 0)"), || format!("cli exit {code}: {text}"))?;
    Ok("stable even 0, odd 1 at u-degree 0".into())
}

fn criterion_2() -> Outcome {
    let m = library::load_model("s1_exact_xi").map_err(err)?;
    let de_rham = common::de_rham_ranks(&m);
    ensure(de_rham == [1, 1], || format!("de Rham ranks {de_rham:?}"))?;
    for n in 1..=4 {
        let ranks = stable_by_degree(&m, n)?;
        // one u-monomial per degree
        let expected = [vec![de_rham[0]; n + 1], vec![de_rham[1]; n + 1]];
        ensure(ranks == expected, || format!("N = {n}: stable ranks {ranks:?}, expected {expected:?}"))?;
    }
    Ok("stable ranks = (1, 1) per u-degree for N = 1..4".into())
}

fn criterion_3() -> Outcome {
    let m = library::load_model("s3").map_err(err)?;
    let pure = purity_check(&m).map_err(err)?;
    ensure(pure.iter().all(|&b| b), || "purity fails".into())?;
    let hg = build_hg(&m).map_err(err)?;
    let n = 3;
    let c = CartanComplex::new(&m, n).map_err(err)?;
    for p in 0..2 {
        let twisted = c
            .matrix_of(p, |x| {
                let dx = d_g(&m, x, n)?;
                Ok(dx.difference(&hg.wedge(&m, x, n)?))
            })
            .map_err(err)?;
        ensure(&twisted == c.differential(p), || format!("matrices differ in parity {p}"))?;
    }
    // the invariant basis is the kernel of the ordinary Lie derivative
    let lie = common::form_operator(&m, |a| m.lie_derivative(0, a).unwrap());
    let kernel = common::nullspace(&lie, m.dim()).len();
    let per_u = c.dim(0) + c.dim(1);
    ensure(per_u == kernel * (n + 1), || format!("basis size {per_u} vs {}", kernel * (n + 1)))?;
    Ok(format!("pure; d_G − H_G∧ matches on {} + {} columns", c.dim(0), c.dim(1)))
}

fn criterion_4() -> Outcome {
    let m = library::load_model("s3_fixed_circle").map_err(err)?;
    let r = stable_cohomology(&m, 4).map_err(err)?;
    ensure(r.stable_rank(0) == 0 && r.stable_rank(1) == 1, || {
        format!("stable ranks even {}, odd {}", r.stable_rank(0), r.stable_rank(1))
    })?;
    let oracle = common::stable_ranks_by_u_degree(&m, 4);
    let got = [r.stable_ranks_by_u_degree(0), r.stable_ranks_by_u_degree(1)];
    ensure(got == oracle, || format!("library {got:?} vs oracle {oracle:?}"))?;
    let (code, text) = run_cli(&["equivariant", "s3_fixed_circle.cdga", "-N", "4", "--stable"]);
    ensure(code == 0 && text.contains("even: 0, odd: 1"), || format!("cli exit {code}: {text}"))?;
    Ok("stable odd 1, even 0".into())
}

fn ambient(c: &DenseComplex, x: &EquivariantElement) -> Vec<Q> {
    let mut v = vec![Q::zero(); c.total()];
    for (exp, form) in x.terms() {
        if exp[0] <= c.n {
            for (i, q) in form.iter() {
                v[exp[0] * c.dim + i] += q;
            }
        }
    }
    v
}

fn criterion_5() -> Outcome {
    let n = 3;
    let pkg = library::load_package("s3_localization").map_err(err)?;
    let t = pkg.thom.first().ok_or("no thom data")?;
    let f = t.fixed_set();
    let u = EquivariantElement::monomial(1, vec![1], f.unit());
    ensure(t.euler == u, || format!("Euler class {}", t.euler.format(f)))?;
    let report = thom_check(t, n).map_err(err)?;
    ensure(report.passed(), || format!("{:?}", report.first_failure()))?;
    let loc = localization_check(t, n).map_err(err)?;
    ensure(loc.passed(), || loc.witness.clone().unwrap_or_default())?;
    for table in [&loc.torsion_m, &loc.torsion_f] {
        for o in table.iter().flatten() {
            ensure(matches!(o, TorsionOutcome::Torsion(k) if *k <= n), || format!("class outcome {o:?}"))?;
        }
    }
    let counted = loc.torsion_m.iter().chain(&loc.torsion_f).map(|v| v.len()).sum::<usize>();
    ensure(counted > 0, || "no stable classes".into())?;
    // i*i_* a − u a is a boundary, checked densely on F
    let hf = stable_cohomology(f, n).map_err(err)?;
    let oracle = DenseComplex::new(f, n);
    for p in 0..2 {
        let boundaries = oracle.boundaries(p);
        for k in 0..hf.rank(p) {
            let a = hf.representative(p, k);
            let back = t.restriction.pullback_equivariant(&t.pushforward(&a, n).map_err(err)?).map_err(err)?;
            let diff = back.difference(&a.wedge(f, &u, n).map_err(err)?);
            let mut stacked = boundaries.clone();
            stacked.push(ambient(&oracle, &diff));
            ensure(rank(&stacked) == rank(&boundaries), || format!("i*i_* ≠ ∧u on {}", a.format(f)))?;
        }
    }
    Ok(format!("{counted} stable classes torsion, e = u, i*i_* = ∧u"))
}

fn plane_mutant() -> CdgaModel {
    let gen = |name: &str, degree: usize, d: Vec<(Scalar, Vec<String>)>| FreeGenerator {
        name: name.into(),
        degree,
        weight: Some(1),
        d,
    };
    let mut spec = FreeCdgaSpec::new("plane");
    spec.generators = vec![
        gen("x", 0, vec![term(int(1), "dx")]),
        gen("y", 0, vec![term(int(1), "dy")]),
        gen("dx", 1, vec![]),
        gen("dy", 1, vec![]),
        FreeGenerator { name: "dtheta".into(), degree: 1, weight: Some(0), d: vec![] },
    ];
    spec.poly_cap = 3;
    spec.mode = CapMode::Quotient;
    spec.action_generators = vec!["r".into()];
    spec.iota = vec![vec![("dx".into(), vec![term(int(-1), "y")]), ("dy".into(), vec![term(int(1), "x")])]];
    spec.h = vec![term(int(1), "x dx dy dtheta")];
    spec.xi = vec![vec![]];
    enumerate_free_cdga(&spec).expect("plane mutant")
}

/// `H = f·dθ₁dθ₂dθ₃` with `dH = df·dθ₁dθ₂dθ₃ ≠ 0`; invariant under the rotation of `θ₃`.
fn not_closed_mutant() -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("not_closed");
    spec.generators = vec![
        FreeGenerator { name: "f".into(), degree: 0, weight: Some(1), d: vec![term(int(1), "df")] },
        FreeGenerator { name: "df".into(), degree: 1, weight: Some(1), d: vec![] },
        FreeGenerator { name: "t1".into(), degree: 1, weight: None, d: vec![] },
        FreeGenerator { name: "t2".into(), degree: 1, weight: None, d: vec![] },
        FreeGenerator { name: "t3".into(), degree: 1, weight: None, d: vec![] },
    ];
    spec.poly_cap = 2;
    spec.mode = CapMode::Quotient;
    spec.action_generators = vec!["x".into()];
    spec.iota = vec![vec![("t3".into(), vec![term(int(1), "")])]];
    spec.h = vec![term(int(1), "f t1 t2 t3")];
    spec.xi = vec![vec![]];
    enumerate_free_cdga(&spec).expect("not-closed mutant")
}

fn criterion_6() -> Outcome {
    let models = library::bundled_models().map_err(err)?;
    for m in &models {
        let report = verify_cartan_relations(m, &bundled_sections(m), &basis_probes(m));
        ensure(report.all_pass(), || format!("{}: equations {:?} fail", m.name(), report.failing()))?;
    }
    let mutant = not_closed_mutant();
    let report = verify_cartan_relations(&mutant, &bundled_sections(&mutant), &basis_probes(&mutant));
    ensure(report.failing().contains(&6), || format!("dH ≠ 0 mutant: failing {:?}", report.failing()))?;
    let plane = plane_mutant();
    let report = verify_cartan_relations(&plane, &bundled_sections(&plane), &basis_probes(&plane));
    let lie_h = plane.lie_derivative(0, plane.h()).map_err(err)?;
    ensure(!lie_h.is_zero(), || "plane mutant has invariant H".into())?;
    ensure(report.failing().contains(&5), || {
        format!(
            "non-invariant H mutant (L_X H = {}) fails equations {:?}, expected 5",
            plane.format(&lie_h),
            report.failing()
        )
    })?;
    Ok(format!("all six pass on {} models; mutants caught by equations 6 and 5", models.len()))
}

/// Closed invariant 2-forms, as dense columns.
fn closed_invariant_two_forms(m: &CdgaModel) -> Vec<SparseVec> {
    let idx: Vec<usize> = (0..m.dim()).filter(|&i| m.degree(i) == 2).collect();
    let rows = 2 * m.dim();
    let cols: Vec<Vec<Q>> = idx
        .iter()
        .map(|&i| {
            let e = SparseVec::unit(i);
            let mut v = dense(&m.differential(&e).unwrap(), m.dim());
            v.extend(dense(&m.lie_derivative(0, &e).unwrap(), m.dim()));
            v
        })
        .collect();
    common::nullspace(&cols, rows)
        .into_iter()
        .map(|c| SparseVec::from_pairs(c.into_iter().enumerate().map(|(k, q)| (idx[k], q))))
        .collect()
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &[SparseVec]) -> SparseVec {
    let mut out = SparseVec::new();
    for b in basis {
        out.add_scaled(&int(rng.gen_range(-3..=3)), b);
    }
    out
}

fn bundled_morphisms() -> Result<Vec<ExtendedMorphism>, String> {
    let packages = library::bundled_packages().map_err(err)?;
    Ok(packages.into_iter().flat_map(|p| p.morphisms).collect())
}

fn criterion_7() -> Outcome {
    let n = 2;
    let mut transforms = 0;
    for m in library::bundled_models().map_err(err)? {
        let base = stable_by_degree(&m, n)?;
        let closed = closed_invariant_two_forms(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let b = random_combination(&mut rng, &closed);
            let moved = equivariant_b_transform_model(&m, &b, &[SparseVec::new()]).map_err(err)?;
            let ranks = stable_by_degree(&moved, n)?;
            ensure(ranks == base, || format!("{} trial {trial}: {ranks:?} vs {base:?}", m.name()))?;
            transforms += 1;
        }
    }
    let morphisms = bundled_morphisms()?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in &morphisms {
        let (cs, ct) = (closed_invariant_two_forms(f.source()), closed_invariant_two_forms(f.target()));
        for trial in 0..20 {
            let bs = random_combination(&mut rng, &cs);
            let bt = random_combination(&mut rng, &ct);
            let ok = splitting_change_equivalence(f, &bs, &bt).map_err(err)?;
            ensure(ok, || format!("{} trial {trial}", f.name()))?;
        }
    }
    Ok(format!("{transforms} B-transforms keep stable ranks; {} morphisms split-independent", morphisms.len()))
}

fn criterion_8() -> Outcome {
    let morphisms = bundled_morphisms()?;
    let composable = |g: &ExtendedMorphism, f: &ExtendedMorphism| f.target() == g.source();
    let mut triples = 0;
    for f in &morphisms {
        for g in morphisms.iter().filter(|g| composable(g, f)) {
            let gf = compose(g, f).map_err(err)?;
            let target = g.target();
            for x in 0..target.dim() {
                let rho = SparseVec::unit(x);
                let lhs = gf.pullback(&rho).map_err(err)?;
                let rhs = f.pullback(&g.pullback(&rho).map_err(err)?).map_err(err)?;
                ensure(lhs == rhs, || format!("contravariance fails for {} ∘ {}", g.name(), f.name()))?;
            }
            for h in morphisms.iter().filter(|h| composable(h, g)) {
                let left = compose(h, &gf).map_err(err)?;
                let right = compose(&compose(h, g).map_err(err)?, f).map_err(err)?;
                ensure(left.matrix() == right.matrix() && left.b() == right.b(), || {
                    format!("associativity fails for {}, {}, {}", h.name(), g.name(), f.name())
                })?;
                triples += 1;
            }
        }
    }
    ensure(triples > 0, || "no composable triples".into())?;
    for i in &morphisms {
        let pair = pair_complex(i, 2).map_err(err)?;
        ensure(pair.sequence.is_exact(), || format!("pair sequence of {} not exact", i.name()))?;
        let oracle = [0, 1].map(|p| {
            let d_out = common::nullspace(
                &(0..pair.cone.dim(p)).map(|j| dense(pair.cone.d[p].column(j), pair.cone.dim(1 - p))).collect::<Vec<_>>(),
                pair.cone.dim(1 - p),
            );
            let d_in: Vec<Vec<Q>> =
                (0..pair.cone.dim(1 - p)).map(|j| dense(pair.cone.d[1 - p].column(j), pair.cone.dim(p))).collect();
            d_out.len() - rank(&d_in)
        });
        ensure(pair.relative_ranks == oracle, || format!("{}: relative ranks {:?} vs {oracle:?}", i.name(), pair.relative_ranks))?;
    }
    let ses = cech_circle_sequence().map_err(err)?;
    let les = long_exact_sequence(&ses).map_err(err)?;
    ensure(les.is_exact(), || format!("Čech sequence exactness {:?}", les.exact))?;
    let oracle = common::connecting_ranks(&ses);
    ensure(les.connecting_ranks() == oracle, || format!("connecting ranks {:?} vs {oracle:?}", les.connecting_ranks()))?;
    Ok(format!("{triples} associative triples; Čech connecting ranks {oracle:?}"))
}

fn criterion_9() -> Outcome {
    let m = library::t3_bundle(1);
    let n = 3;
    let oracle = DenseComplex::new(&m, n);
    ensure(oracle.squares_to_zero(), || "oracle complex has d² ≠ 0".into())?;
    let expected = common::stable_ranks_by_u_degree(&m, n);
    let got = stable_by_degree(&m, n)?;
    ensure(got == expected, || format!("library {got:?} vs oracle {expected:?}"))?;
    let all = common::ranks_by_u_degree(&m, n);
    let r = stable_cohomology(&m, n).map_err(err)?;
    let counts = [0, 1].map(|p| {
        let mut v = vec![0; n + 1];
        for c in r.classes(p) {
            v[c.u_degree] += 1;
        }
        v
    });
    ensure(counts == all, || format!("all classes {counts:?} vs oracle {all:?}"))?;
    Ok(format!("stable ranks {got:?} match the dense oracle"))
}

#[test]
fn acceptance_suite() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("trivial action on the circle", criterion_1),
        ("exact ξ gives de Rham ⊗ polynomial ranks", criterion_2),
        ("S³ purity and H_G identification", criterion_3),
        ("fixed circle cohomology", criterion_4),
        ("S³ localization", criterion_5),
        ("Cartan relation suite and mutants", criterion_6),
        ("splitting independence", criterion_7),
        ("functoriality, cone and Čech sequence", criterion_8),
        ("circle-bundle model against the oracle", criterion_9),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match &result {
            Ok(detail) => println!("criterion {} PASS [{secs:.2}s] {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {} FAIL [{secs:.2}s] {name}: {why}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
