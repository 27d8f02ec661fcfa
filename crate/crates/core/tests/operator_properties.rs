use cartanext::library;
use cartanext::model::CdgaModel;
use cartanext::operators::{b_transform, iota_extended, lie_extended, twisted_differential, ExtendedSection};
use cartanext::scalar::int;
use cartanext::sparse::SparseVec;
use proptest::prelude::*;

fn models() -> Vec<CdgaModel> {
    vec![library::s3(3), library::s3_tube(3), library::t2(), library::t3_bundle(2), library::s1_exact_xi(2)]
}

fn combo(m: &CdgaModel, coeffs: &[i64]) -> SparseVec {
    SparseVec::from_pairs(coeffs.iter().enumerate().map(|(i, &c)| (i % m.dim(), int(c))))
}

fn homogeneous(m: &CdgaModel, k: usize, coeffs: &[i64]) -> SparseVec {
    SparseVec::from_pairs(
        (0..m.dim()).filter(|&i| m.degree(i) == k).zip(coeffs).map(|(i, &c)| (i, int(c))),
    )
}

fn model_strategy() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>)> {
    (0..5usize, prop::collection::vec(-3i64..=3, 1..12), prop::collection::vec(-3i64..=3, 1..12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_squares_to_zero((mi, a, _b) in model_strategy()) {
        let m = &models()[mi];
        let x = combo(m, &a);
        prop_assert!(m.differential(&m.differential(&x).unwrap()).unwrap().is_zero());
        let dh = twisted_differential(m, &twisted_differential(m, &x, m.h()).unwrap(), m.h()).unwrap();
        prop_assert!(dh.is_zero());
    }

    #[test]
    fn leibniz_rule((mi, a, b) in model_strategy(), k in 0usize..4) {
        let m = &models()[mi];
        let x = homogeneous(m, k, &a);
        let y = combo(m, &b);
        let lhs = m.differential(&m.wedge(&x, &y).unwrap()).unwrap();
        let mut rhs = m.wedge(&m.differential(&x).unwrap(), &y).unwrap();
        let tail = m.wedge(&x, &m.differential(&y).unwrap()).unwrap();
        rhs.add_scaled(&int(if k % 2 == 0 { 1 } else { -1 }), &tail);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_associative((mi, a, b) in model_strategy(), c in prop::collection::vec(-2i64..=2, 1..6)) {
        let m = &models()[mi];
        let (x, y, z) = (combo(m, &a), combo(m, &b), combo(m, &c));
        let left = m.wedge(&m.wedge(&x, &y).unwrap(), &z).unwrap();
        let right = m.wedge(&x, &m.wedge(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn extended_lie_is_a_commutator((mi, a, _b) in model_strategy()) {
        let m = &models()[mi];
        let x = combo(m, &a);
        let s = ExtendedSection::generator(m, 0);
        let dt = |v: &SparseVec| twisted_differential(m, v, m.h()).unwrap();
        let io = |v: &SparseVec| iota_extended(m, &s, v).unwrap();
        let expected = dt(&io(&x)).sum(&io(&dt(&x)));
        prop_assert_eq!(lie_extended(m, &s, &x).unwrap(), expected);
    }

    #[test]
    fn commutator_with_twisted_differential_vanishes((mi, a, _b) in model_strategy()) {
        // [d_T, L] = [d_T², ι] and d_T² = 0 for closed H, whether or not H is invariant
        let m = &models()[mi];
        let x = combo(m, &a);
        let s = ExtendedSection::generator(m, 0);
        let dt = |v: &SparseVec| twisted_differential(m, v, m.h()).unwrap();
        let lie = |v: &SparseVec| lie_extended(m, &s, v).unwrap();
        prop_assert_eq!(dt(&lie(&x)), lie(&dt(&x)));
    }

    #[test]
    fn b_transform_inverts((mi, a, b) in model_strategy()) {
        let m = &models()[mi];
        let x = combo(m, &a);
        let two = homogeneous(m, 2, &b);
        let there = b_transform(m, &x, &two).unwrap();
        prop_assert_eq!(b_transform(m, &there, &two.negated()).unwrap(), x);
    }
}
