mod common;

use cartanext::equivariant::{cohomology, stable_cohomology, twisted_cohomology, CartanComplex};
use cartanext::library;
use cartanext::model::CdgaModel;
use cartanext::scalar::int;
use cartanext::sparse::SparseVec;
use common::{form_operator, nullspace, rank, ranks_by_u_degree, stable_ranks_by_u_degree, Vector};

fn dense_twisted_ranks(m: &CdgaModel, h: &SparseVec) -> [usize; 2] {
    let op: Vec<Vector> = form_operator(m, |a| m.differential(a).unwrap().difference(&m.wedge(h, a).unwrap()));
    let parity = |p: usize| -> Vec<Vector> { (0..m.dim()).filter(|&i| m.degree(i) % 2 == p).map(|i| op[i].clone()).collect() };
    [0, 1].map(|p| nullspace(&parity(p), m.dim()).len() - rank(&parity(1 - p)))
}

#[test]
fn twisted_ranks_match_dense_elimination() {
    let mut cases: Vec<(CdgaModel, SparseVec)> = Vec::new();
    for k in [0, 1, 3] {
        let m = library::t3_bundle(k);
        let h = m.h().clone();
        cases.push((m, h));
    }
    let s3 = library::s3(3);
    let h = s3.h().clone();
    cases.push((s3.clone(), h));
    cases.push((s3.clone(), SparseVec::new()));
    let t2 = library::t2();
    cases.push((t2.clone(), SparseVec::new()));
    let point = library::point();
    cases.push((point.clone(), SparseVec::new()));
    for (m, h) in cases {
        let r = twisted_cohomology(&m, &h).unwrap();
        assert_eq!(r.ranks, dense_twisted_ranks(&m, &h), "{} with H = {}", m.name(), m.format(&h));
    }
}

#[test]
fn t3_flux_cuts_top_and_bottom() {
    // d = 0 here, so d_H = −H∧ only pairs the unit with the volume form
    let m = library::t3_bundle(2);
    assert_eq!(twisted_cohomology(&m, m.h()).unwrap().ranks, [3, 3]);
    let r = twisted_cohomology(&m, &SparseVec::new()).unwrap();
    assert_eq!(r.ranks, [4, 4]);
    let scaled = m.h().scaled(&int(5));
    assert_eq!(twisted_cohomology(&m, &scaled).unwrap().ranks, [3, 3]);
}

#[test]
fn equivariant_ranks_match_dense_complex() {
    let models = [
        library::point(),
        library::s1_trivial(),
        library::s1_exact_xi(3),
        library::s3_fixed_circle(),
        library::t2(),
        library::disk(3),
    ];
    for m in &models {
        for n in 1..=2 {
            let stable = stable_cohomology(m, n).unwrap();
            let got = [stable.stable_ranks_by_u_degree(0), stable.stable_ranks_by_u_degree(1)];
            assert_eq!(got, stable_ranks_by_u_degree(m, n), "{} stable at N = {n}", m.name());
            let all = cohomology(&CartanComplex::new(m, n).unwrap());
            let got = [all.ranks_by_u_degree(0), all.ranks_by_u_degree(1)];
            assert_eq!(got, ranks_by_u_degree(m, n), "{} at N = {n}", m.name());
        }
    }
}
