//! Property tests over random words, vectors, symbols and scalar series.

use proptest::prelude::*;

use fockalg::calculus::{h2_times_isometry, search_ball_factorizations, verify_factorization, CalculusContext, SearchConfig};
use fockalg::experiments::exp_factor_generator;
use fockalg::fock::{FockVector, C64};
use fockalg::hardy::{harmonic_series, partial_sum_sup, reciprocal, ScalarSeries};
use fockalg::operators::{decompose_at, Side, TruncOp};
use fockalg::series::{bessel_split, FreeSeries};
use fockalg::words::{enumerate_words, total_size, BasisIndexer, Word};

fn word(n: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=n, 0..=max_len).prop_map(|l| Word::new(l).unwrap())
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn series(n: usize, degree: usize) -> impl Strategy<Value = FreeSeries> {
    prop::collection::vec((word(n as u32, degree), complex()), 1..10)
        .prop_map(move |terms| FreeSeries::from_terms(n, terms).unwrap())
}

fn vector(n: usize, level: usize) -> impl Strategy<Value = FockVector> {
    prop::collection::vec((word(n as u32, level), complex()), 0..20)
        .prop_map(move |terms| FockVector::from_coeffs(n, level, terms).unwrap())
}

#[test]
fn enumeration_counts() {
    for n in 1..=4usize {
        for k in 0..=8 {
            let words = enumerate_words(n, k).unwrap();
            assert_eq!(words.len(), n.pow(k as u32));
            assert!(words.windows(2).all(|p| p[0] < p[1]));
        }
    }
}

#[test]
fn basis_sizes() {
    for n in 2..=4usize {
        for level in 0..=6 {
            let expected = (n.pow(level as u32 + 1) - 1) / (n - 1);
            assert_eq!(BasisIndexer::new(n, level).unwrap().size(), expected);
            assert_eq!(total_size(n, level), expected as u128);
        }
    }
    assert_eq!(BasisIndexer::new(1, 5).unwrap().size(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn indexer_round_trip(n in 1usize..=4, level in 0usize..=5, pick in any::<prop::sample::Index>()) {
        let idx = BasisIndexer::new(n, level).unwrap();
        let i = pick.index(idx.size());
        let w = idx.word_at(i).unwrap();
        prop_assert_eq!(idx.index_of(&w), Some(i));
        prop_assert!(w.len() <= level);
        prop_assert!(idx.level_range(w.len()).contains(&i));
    }

    #[test]
    fn word_algebra(t in word(3, 6), u in word(3, 6)) {
        let tu = t.concat(&u);
        prop_assert_eq!(tu.len(), t.len() + u.len());
        prop_assert_eq!(tu.strip_suffix(&u), Some(t.clone()));
        prop_assert_eq!(tu.strip_prefix(&t), Some(u.clone()));
        prop_assert_eq!(tu.reverse(), u.reverse().concat(&t.reverse()));
        prop_assert_eq!(t.reverse().reverse(), t.clone());
        let text = t.to_string();
        prop_assert_eq!(text.parse::<Word>().unwrap(), t);
    }

    #[test]
    fn pythagoras_across_levels(v in vector(2, 4)) {
        let by_level: f64 = (0..=4).map(|k| v.project_level(k).norm_sqr()).sum();
        prop_assert!((by_level - v.norm_sqr()).abs() <= 1e-12 * v.norm_sqr().max(1.0));
    }

    #[test]
    fn level_projection_is_self_adjoint_and_idempotent(x in vector(2, 3), y in vector(2, 3), k in 0usize..=3) {
        let lhs = x.project_level(k).inner(&y).unwrap();
        let rhs = x.inner(&y.project_level(k)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
        prop_assert_eq!(x.project_level(k).project_level(k), x.project_level(k));
    }

    #[test]
    fn graded_reconstruction(s in series(3, 5), k in 1usize..=4) {
        prop_assert!(decompose_at(&s, k).unwrap().reconstruct().max_diff(&s) <= 1e-12);
    }

    #[test]
    fn compression_consistency(s in series(2, 2), v in word(2, 3)) {
        let level = 5;
        let op = TruncOp::from_series(&s, 2, level).unwrap();
        let image = op.apply(&FockVector::basis(2, level, &v).unwrap()).unwrap();
        if v.len() + s.degree() <= level {
            let mut expected = FockVector::zero(2, level);
            for (w, a) in s.iter() {
                expected.add_at(w.concat(&v), *a).unwrap();
            }
            prop_assert!(image.sub(&expected).unwrap().max_abs() <= 1e-15);
        }
    }

    #[test]
    fn word_operators_are_isometric_on_their_frontier(w in word(2, 3)) {
        let level = 5;
        let lw = TruncOp::creation(Side::Left, &w, 2, level).unwrap();
        let gram = lw.adjoint().compose(&lw).unwrap();
        for v in BasisIndexer::new(2, level - w.len()).unwrap().words() {
            let xi = FockVector::basis(2, level, &v).unwrap();
            prop_assert!(gram.apply(&xi).unwrap().sub(&xi).unwrap().max_abs() <= 1e-15);
        }
    }

    #[test]
    fn bessel_identity_at_the_vacuum(s in series(2, 3)) {
        let scale = C64::new(1.0 / s.norm_sqr().sqrt(), 0.0);
        let unit = s.scale(scale);
        let op = TruncOp::from_series(&unit, 2, 4).unwrap();
        let column = op.apply(&FockVector::vacuum(2, 4)).unwrap();
        prop_assert!((column.norm_sqr() - 1.0).abs() <= 1e-12);
        let (vac, rest) = bessel_split(&unit);
        prop_assert!((rest - (1.0 - vac)).abs() <= 1e-12);
        prop_assert!(op.op_norm().unwrap() >= column.norm() - 1e-12);
    }

    #[test]
    fn reciprocal_is_an_involution(head in 0.5..2.0f64, tail in prop::collection::vec(-1.0..1.0f64, 0..12)) {
        let mut coeffs = vec![head];
        coeffs.extend(tail);
        let s = ScalarSeries::from_real(&coeffs);
        let order = 11;
        let back = reciprocal(&reciprocal(&s, order).unwrap(), order).unwrap();
        let scale = (0..=order).map(|k| s.coeff(k).norm()).fold(1.0, f64::max);
        for k in 0..=order {
            prop_assert!((back.coeff(k) - s.coeff(k)).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn orthogonal_pieces_obey_bessel(seed_x in vector(2, 3), seed_y in vector(2, 6)) {
        prop_assume!(seed_x.norm() > 1e-3 && seed_y.norm() > 1e-3);
        let level = 6;
        let x = seed_x.with_level(level).scale(C64::new(1.0 / seed_x.norm(), 0.0));
        let y = seed_y.scale(C64::new(1.0 / seed_y.norm(), 0.0));
        let l1 = TruncOp::left_letter(1, 2, level).unwrap();
        let ctx = CalculusContext::new(&l1, level).unwrap();
        let l2 = TruncOp::left_letter(2, 2, level).unwrap();
        let lx = l2.apply(&x).unwrap();
        let total: f64 = (0..=level).map(|k| ctx.power(k).apply(&lx).unwrap().inner(&y).unwrap().norm_sqr()).sum();
        prop_assert!(total <= 1.0 + 1e-12);
    }
}

// Each case re-checks the isometry hypotheses, so fewer cases.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn h2_map_is_isometric(coeffs in prop::collection::vec(-1.0..1.0f64, 1..8)) {
        let level = 8;
        let h = ScalarSeries::from_real(&coeffs);
        let l1 = TruncOp::left_letter(1, 2, level).unwrap();
        let l2 = TruncOp::left_letter(2, 2, level).unwrap();
        let a = h2_times_isometry(&h, &l1, &l2).unwrap();
        let image = a.apply(&FockVector::vacuum(2, level)).unwrap();
        prop_assert!((image.norm() - h.l2_norm()).abs() <= 1e-10);
    }
}

#[test]
fn cached_powers_are_consistent() {
    let s = FreeSeries::from_real(2, &[("z1", 0.6), ("z2 z1", 0.8)]).unwrap();
    let x = TruncOp::from_series(&s, 2, 8).unwrap();
    let ctx = CalculusContext::new(&x, 4).unwrap();
    for k in 0..4 {
        let next = x.compose(ctx.power(k)).unwrap();
        let region = ctx.power(k + 1).frontier();
        for v in BasisIndexer::new(2, region).unwrap().words() {
            let a = next.column(&v).unwrap();
            let b = ctx.power(k + 1).column(&v).unwrap();
            assert!(a.sub(&b).unwrap().max_abs() <= 1e-15);
        }
    }
}

#[test]
fn factorization_exact_at_several_orders() {
    for terms in [16, 64, 256] {
        let r = exp_factor_generator(terms, terms + 1).unwrap();
        assert!(r.passed(), "terms = {terms}: {:?}", r.checks);
    }
    let level = 10;
    let l1 = TruncOp::left_letter(1, 2, level).unwrap();
    let l2 = TruncOp::left_letter(2, 2, level).unwrap();
    let f = harmonic_series(level - 1);
    let a = h2_times_isometry(&f, &l1, &l2).unwrap();
    let g = reciprocal(&f, level - 1).unwrap();
    assert!(verify_factorization(&g, &l1, &a, &l2, level).unwrap().passed());
}

#[test]
fn search_candidates_respect_the_unit_ball() {
    let mut cfg = SearchConfig::new("z1".parse().unwrap(), 2, 1, 3);
    cfg.restarts = 6;
    cfg.seed = 3;
    for cand in search_ball_factorizations(&cfg).unwrap() {
        let b = TruncOp::from_series(&cand.b, 2, 3).unwrap().op_norm().unwrap();
        let c = TruncOp::from_series(&cand.c, 2, 3).unwrap().op_norm().unwrap();
        assert!(b <= 1.0 + 1e-12 && c <= 1.0 + 1e-12, "norms {b} {c}");
    }
}

#[test]
fn harmonic_sup_grows_monotonically() {
    let f = harmonic_series(2048);
    let sups: Vec<f64> = [1, 4, 16, 64, 256, 1024, 2048].iter().map(|&m| partial_sum_sup(&f, m, 512)).collect();
    assert!(sups.windows(2).all(|p| p[1] >= p[0]));
    assert!(sups[sups.len() - 1] > 8.0);
}
