use fermat_core::algebra::ffield::{
    count_points_exhaustive, count_points_legendre, factor_mod_p, FiniteField, FpPoly,
};
use fermat_core::algebra::interval::RealInterval;
use fermat_core::algebra::poly::{BiPoly, IntPoly, RatPoly};
use fermat_core::algebra::resultant::{resultant, resultant_in_x, resultant_in_x_sylvester};
use fermat_core::algebra::roots::{all_roots_positive, count_real_roots, isolate_real_roots};
use fermat_core::arith::{rat_frac, Q};
use fermat_core::data_io::FixtureStore;
use fermat_core::par::Execution;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn p(c: &[i64]) -> IntPoly {
    IntPoly::from_i64(c)
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-9i64..=9, 1..=max_deg + 1)
        .prop_map(|c| IntPoly::from_i64(&c))
        .prop_filter("nonzero", |q| !q.is_zero())
}

#[test]
fn resultant_examples() {
    assert_eq!(resultant(&p(&[-2, 0, 1]), &p(&[-3, 0, 1])).unwrap(), BigInt::from(1));
    assert_eq!(resultant(&p(&[1, 2, 3]), &p(&[5])).unwrap(), BigInt::from(25));
    // Res(f, X) is the product of the roots of f; Res(X, f) = f(0).
    assert_eq!(resultant(&p(&[2, -32, 0, 1]), &p(&[0, 1])).unwrap(), BigInt::from(-2));
    assert_eq!(resultant(&p(&[0, 1]), &p(&[2, -32, 0, 1])).unwrap(), BigInt::from(2));
    assert!(resultant(&IntPoly::zero(), &p(&[1, 1])).is_err());
}

#[test]
fn elimination_examples() {
    // P = X − 1, G = XY − 1 gives ±(Y − 1).
    let g = BiPoly::from_x_coeffs(vec![p(&[-1]), p(&[0, 1])]);
    let r = resultant_in_x(&p(&[-1, 1]), &g, Execution::Sequential).unwrap();
    assert!(r == p(&[-1, 1]) || r == p(&[1, -1]), "{r}");
    // P = X² − 2 against Y² − 2X²: both roots give Y² − 4.
    let g = BiPoly::homogenize(&p(&[-2, 0, 1]));
    let a = resultant_in_x(&p(&[-2, 0, 1]), &g, Execution::Sequential).unwrap();
    assert_eq!(a, resultant_in_x_sylvester(&p(&[-2, 0, 1]), &g).unwrap());
    assert_eq!(a, p(&[-4, 0, 1]).pow(2));
    // The tower step for the D_K = 148 unit.
    let h = p(&[-1, 11, -7, 1]);
    let g = BiPoly::homogenize(&h);
    let h2 = resultant_in_x(&h, &g, Execution::Parallel).unwrap();
    assert_eq!(h2.deg(), 9);
    assert_eq!(h2, resultant_in_x_sylvester(&h, &g).unwrap());
}

#[test]
fn factorizations_mod_p() {
    let f = factor_mod_p(&p(&[1, 0, 1]), 5).unwrap();
    let lin: Vec<_> = f.iter().map(|(g, e)| (g.coeffs().to_vec(), *e)).collect();
    assert_eq!(lin, vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
    let f = factor_mod_p(&p(&[1, 0, 1]), 3).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].0.deg(), 2);
    let k = FixtureStore::bundled().load_field("3.3.404.1").unwrap();
    let degs: Vec<usize> = factor_mod_p(k.min_poly(), 3).unwrap().iter().map(|(g, _)| g.deg()).collect();
    assert_eq!(degs, vec![1, 2]);
}

#[test]
fn root_isolation_examples() {
    let r = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
    assert_eq!(r.len(), 2);
    let iv = r[1].refine(40).interval();
    let two = Q::from_integer(BigInt::from(2));
    assert!(iv.lo_q() * iv.lo_q() < two && iv.hi_q() * iv.hi_q() > two);
    assert!(iv.width() < rat_frac(1, 1 << 39));
    assert!(r[0].interval().hi_q() <= Q::zero());
    assert_eq!(count_real_roots(&p(&[2, -32, 0, 1])), 3);
    let q = p(&[1, -20, 34, -12, 1]);
    assert_eq!(count_real_roots(&q), 4);
    assert!(all_roots_positive(&q));
    assert!(!all_roots_positive(&p(&[2, -32, 0, 1])));
}

#[test]
fn fixture_polynomials_are_totally_real() {
    let store = FixtureStore::bundled();
    for label in store.field_labels().unwrap() {
        let k = store.load_field(&label).unwrap();
        assert_eq!(count_real_roots(k.min_poly()), k.degree(), "{label}");
    }
}

#[test]
fn point_counts() {
    let f5 = FiniteField::prime_field(5).unwrap();
    let n = count_points_legendre(&f5.from_u64(1), &f5.from_u64(1), &f5).unwrap();
    assert_eq!(n, 8);
    let f79 = FiniteField::prime_field(79).unwrap();
    let n = count_points_legendre(&f79.from_u64(1), &f79.from_u64(23), &f79).unwrap();
    assert_eq!((80 - n as i64).abs(), 4);
    assert!(count_points_legendre(&f79.from_u64(3), &f79.from_u64(76), &f79).is_err());
    // F_9 = F_3[i].
    let f9 = FiniteField::new(FpPoly::new(3, vec![1, 0, 1])).unwrap();
    for s in 1..9 {
        for t in 1..9 {
            let (s, t) = (f9.element(s), f9.element(t));
            if f9.is_zero(&f9.add(&s, &t)) {
                continue;
            }
            let a = count_points_legendre(&s, &t, &f9).unwrap();
            assert_eq!(a, count_points_exhaustive(&s, &t, &f9).unwrap());
            assert_eq!(a % 4, 0);
        }
    }
}

proptest! {
    #[test]
    fn resultant_is_multiplicative(a in small_poly(4), b in small_poly(3), c in small_poly(3)) {
        let bc = &b * &c;
        prop_assert_eq!(resultant(&a, &bc).unwrap(), resultant(&a, &b).unwrap() * resultant(&a, &c).unwrap());
    }

    #[test]
    fn resultant_matches_rational_euclid(a in small_poly(5), b in small_poly(5)) {
        let r = resultant(&a, &b).unwrap();
        prop_assert_eq!(Q::from_integer(r), a.to_rat().resultant(&b.to_rat()));
    }

    #[test]
    fn elimination_paths_agree(h in small_poly(4), y in prop::collection::vec(small_poly(2), 2..=3)) {
        prop_assume!(h.deg() >= 1);
        let g = BiPoly::from_x_coeffs(y);
        prop_assume!(g.deg_x().unwrap_or(0) >= 1);
        prop_assert_eq!(
            resultant_in_x(&h, &g, Execution::Sequential).unwrap(),
            resultant_in_x_sylvester(&h, &g).unwrap()
        );
    }

    #[test]
    fn sturm_count_matches_sign_changes(roots in prop::collection::btree_set(-40i64..40, 1..6)) {
        let q = roots.iter().fold(IntPoly::one(), |acc, r| &acc * &p(&[-r, 1]));
        prop_assert_eq!(count_real_roots(&q), roots.len());
        let iso = isolate_real_roots(&q).unwrap();
        for (r, iv) in roots.iter().zip(&iso) {
            prop_assert!(iv.interval().contains_q(&Q::from_integer(BigInt::from(*r))));
        }
    }

    #[test]
    fn interval_evaluation_contains_exact(c in prop::collection::vec(-50i64..50, 1..6), n in -1000i64..1000, d in 1i64..100) {
        let poly = RatPoly::new(c.iter().map(|&v| Q::from_integer(v.into())).collect());
        let x = rat_frac(n, d);
        let iv = RealInterval::from_q(&x, 40);
        prop_assert!(iv.eval_rat_poly(&poly, 40).contains_q(&poly.eval(&x)));
    }

    #[test]
    fn character_sum_matches_enumeration(q in prop::sample::select(vec![3u64, 5, 7, 11, 13, 101, 197, 199]), s in 1u64..200, t in 1u64..200) {
        let f = FiniteField::prime_field(q).unwrap();
        let (s, t) = (f.from_u64(s), f.from_u64(t));
        prop_assume!(!f.is_zero(&s) && !f.is_zero(&t) && !f.is_zero(&f.add(&s, &t)));
        let n = count_points_legendre(&s, &t, &f).unwrap();
        prop_assert_eq!(n, count_points_exhaustive(&s, &t, &f).unwrap());
        let a = q as i64 + 1 - n as i64;
        prop_assert!(a * a <= 4 * q as i64);
    }
}
