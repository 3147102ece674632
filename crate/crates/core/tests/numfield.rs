use fermat_core::arith::Q;
use fermat_core::data_io::FixtureStore;
use fermat_core::numfield::{FieldElement, NumberField, QuotientRingMod4};
use fermat_core::units::{find_normalizing_unit, narrow_class_number, ray_class_number, theorem17_check, Modulus};
use fermat_core::Error;
use num_bigint::BigInt;
use proptest::prelude::*;
use std::sync::OnceLock;

fn field(label: &str) -> NumberField {
    FixtureStore::bundled().load_field(label).unwrap()
}

fn k2() -> &'static NumberField {
    static K: OnceLock<NumberField> = OnceLock::new();
    K.get_or_init(|| field("4.4.2048.1"))
}

fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn elem(k: &NumberField, c: &[i64]) -> FieldElement {
    FieldElement::from_ints(&c[..k.degree()])
}

#[test]
fn norms() {
    let k = field("3.3.148.1");
    assert_eq!(k.norm(&k.generator()), int(-1));
    assert_eq!(k.norm(&k.one()), int(1));
    let c = field("3.3.130964.1");
    assert_eq!(c.min_poly(), &fermat_core::algebra::poly::IntPoly::from_i64(&[2, -32, 0, 1]));
    let a = c.mul(&c.from_int(16), &c.generator());
    assert_eq!(c.norm(&a), int(-(1 << 13)));
    assert_eq!(c.v_l(&a).unwrap(), 13);
}

#[test]
fn valuations_at_the_prime_above_two() {
    let q2 = field("2.2.8.1");
    assert_eq!(q2.v_l(&q2.from_int(2)).unwrap(), 2);
    let k = field("4.4.52816.1");
    let al = k.generator();
    let one_plus = k.add(&k.one(), &al);
    let quad = k.add(&k.add(&k.from_int(4), &k.mul(&k.from_int(4), &al)), &k.mul(&al, &al));
    let x = k.mul(&k.mul(&k.from_int(16), &k.mul(&one_plus, &one_plus)), &quad);
    assert_eq!(k.v_l(&x).unwrap(), 18);
    assert!(matches!(k.v_l(&k.zero()), Err(Error::Domain(_))));
    assert!(matches!(field("1.1.1.1").v_l(&FieldElement::from_ints(&[2])), Ok(1)));
}

#[test]
fn reduction_mod_primes() {
    let k = field("3.3.404.1");
    let q = k.prime_by_index(3, 0).unwrap();
    assert_eq!(q.f, 1);
    let r = k.reduce_mod_prime(&k.one(), &q).unwrap();
    assert_eq!(r, q.residue_field.one());
    // The linear factor is x + 2, so α ↦ −2 = 1.
    let a = k.reduce_mod_prime(&k.generator(), &q).unwrap();
    assert_eq!(q.residue_field.to_u64(&a), Some(1));
    assert_eq!(q.gen_poly.coeffs(), &[2, 1]);

    let k2 = k2();
    for q in k2.dedekind_factor(79).unwrap() {
        let mut pows: Vec<u64> = (1..79u64)
            .map(|x| q.residue_field.to_u64(&q.residue_field.pow_u64(&q.residue_field.from_u64(x), 13)).unwrap())
            .collect();
        pows.sort();
        pows.dedup();
        assert_eq!(pows, vec![1, 23, 24, 55, 56, 78]);
    }
}

#[test]
fn quotient_rings_mod_four() {
    let q = QuotientRingMod4::new(&field("1.1.1.1")).unwrap();
    assert_eq!(q.unit_group_order(), 2);
    let r = QuotientRingMod4::new(&field("2.2.8.1")).unwrap();
    assert_eq!((r.unit_group_order(), r.quotient_by_squares_order()), (8, 4));
    let r = QuotientRingMod4::new(k2()).unwrap();
    assert_eq!(r.quotient_by_squares_order(), 16);
}

#[test]
fn narrow_class_examples() {
    let n = narrow_class_number(&field("2.2.8.1")).unwrap();
    assert_eq!(n.signs[0], vec![-1, -1]);
    assert_eq!(n.rank, 2);
    assert_eq!(n.h_plus, 1);
    assert_eq!(narrow_class_number(&field("1.1.1.1")).unwrap().h_plus, 1);
    let n = narrow_class_number(&field("2.2.456.1")).unwrap();
    assert_eq!((n.h_k, n.h_plus), (2, 4));
}

#[test]
fn ray_class_examples() {
    let q = field("1.1.1.1");
    assert_eq!(ray_class_number(&q, &Modulus::FourOk, true).unwrap().ray_class_number, 2);
    assert_eq!(ray_class_number(&q, &Modulus::FourOk, false).unwrap().ray_class_number, 1);
    for label in ["3.3.148.1", "4.4.2048.1", "2.2.8.1"] {
        assert_eq!(ray_class_number(&field(label), &Modulus::Trivial, false).unwrap().ray_class_number, 1);
    }
    assert!(matches!(ray_class_number(&field("2.2.456.1"), &Modulus::FourOk, false), Err(Error::Unsupported(_))));
}

#[test]
fn theorem17_examples() {
    let t = theorem17_check(k2()).unwrap();
    assert!(t.two_totally_ramified && t.h_plus == 1 && t.units_surject && t.ray_class_field_trivial && t.verdict);
    assert!(theorem17_check(&field("2.2.8.1")).unwrap().verdict);
    let t = theorem17_check(&field("2.2.456.1")).unwrap();
    assert!(!t.verdict && t.h_plus > 1);
    assert_eq!(t.corollary_holds, Some(true));
}

#[test]
fn normalizing_units() {
    let q = field("1.1.1.1");
    let e = find_normalizing_unit(&q, &FieldElement::from_ints(&[1])).unwrap();
    assert_eq!(e.epsilon, FieldElement::from_ints(&[-1]));
    let e = find_normalizing_unit(&q, &FieldElement::from_ints(&[3])).unwrap();
    assert_eq!(e.epsilon, FieldElement::from_ints(&[1]));
    let k = k2();
    let e = find_normalizing_unit(k, &k.from_int(-1)).unwrap();
    assert_eq!(e.epsilon, k.one());
    assert!(matches!(find_normalizing_unit(k, &k.generator()), Err(Error::Domain(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalizing_unit_on_k2(c in prop::collection::vec(-20i64..20, 4)) {
        let k = k2();
        let mut c = c;
        c[0] = 2 * c[0] + 1;
        let a = elem(k, &c);
        prop_assume!(k.v_l(&a).unwrap() == 0);
        let e = find_normalizing_unit(k, &a).unwrap();
        let ea = k.mul(&e.epsilon, &a);
        let r = QuotientRingMod4::new(k).unwrap();
        prop_assert_eq!(r.reduce(&ea).unwrap(), r.reduce(&k.from_int(-1)).unwrap());
        prop_assert_eq!(k.norm(&e.epsilon).clone() * k.norm(&e.epsilon), int(1));
    }

    #[test]
    fn valuation_is_additive(x in prop::collection::vec(-30i64..30, 4), y in prop::collection::vec(-30i64..30, 4)) {
        let k = k2();
        let (x, y) = (elem(k, &x), elem(k, &y));
        prop_assume!(!x.is_zero() && !y.is_zero());
        prop_assert_eq!(k.v_l(&k.mul(&x, &y)).unwrap(), k.v_l(&x).unwrap() + k.v_l(&y).unwrap());
    }

    #[test]
    fn reduction_is_a_ring_map(x in prop::collection::vec(-50i64..50, 4), y in prop::collection::vec(-50i64..50, 4), idx in 0usize..4) {
        let k = k2();
        let q = k.prime_by_index(79, idx).unwrap();
        let f = &q.residue_field;
        let (x, y) = (elem(k, &x), elem(k, &y));
        let rx = k.reduce_mod_prime(&x, &q).unwrap();
        let ry = k.reduce_mod_prime(&y, &q).unwrap();
        prop_assert_eq!(k.reduce_mod_prime(&k.mul(&x, &y), &q).unwrap(), f.mul(&rx, &ry));
        prop_assert_eq!(k.reduce_mod_prime(&k.add(&x, &y), &q).unwrap(), f.add(&rx, &ry));
    }
}

#[test]
fn corpus_invariants() {
    let store = FixtureStore::bundled();
    for label in store.field_labels().unwrap() {
        let k = store.load_field(&label).unwrap();
        for u in k.fundamental_units() {
            assert_eq!(k.norm(u).clone() * k.norm(u), int(1), "{label}");
            if k.two_totally_ramified() {
                assert_eq!(k.v_l(u).unwrap(), 0, "{label}");
            }
        }
        for p in [3u64, 5, 7, 11, 13] {
            if let Ok(fac) = k.dedekind_factor(p) {
                assert_eq!(fac.iter().map(|q| q.e as usize * q.f).sum::<usize>(), k.degree(), "{label} at {p}");
            }
        }
        let n = narrow_class_number(&k).unwrap();
        assert!(n.rank <= k.degree() && n.h_plus >= n.h_k);
    }
}
