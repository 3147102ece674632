use std::collections::BTreeMap;

use fermat_core::data_io::FixtureStore;
use fermat_core::numfield::{NumberField, QuotientRingMod4};
use fermat_core::units::{narrow_class_number, ray_class_number, theorem17_check, Modulus};
use fermat_core::Error;
use num_bigint::BigInt;
use serde::Deserialize;

#[derive(Deserialize)]
struct Oracle {
    label: String,
    h: u64,
    h_plus: u64,
    index: String,
    #[serde(default)]
    two_totally_ramified: Option<bool>,
    #[serde(default)]
    ray_4: Option<u64>,
    #[serde(default)]
    ray_4_all_infinite: Option<u64>,
    #[serde(default)]
    splitting: BTreeMap<u64, Vec<(u32, usize)>>,
}

fn oracle() -> Vec<Oracle> {
    let path = FixtureStore::bundled().root().join("oracle/pari_fields.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn field(label: &str) -> NumberField {
    FixtureStore::bundled().load_field(label).unwrap()
}

fn shape(k: &NumberField, p: u64) -> Vec<(u32, usize)> {
    let mut v: Vec<_> = k.dedekind_factor(p).unwrap().iter().map(|q| (q.e, q.f)).collect();
    v.sort();
    v
}

#[test]
fn every_fixture_matches_the_pari_oracle() {
    let store = FixtureStore::bundled();
    let oracle = oracle();
    assert_eq!(oracle.len(), store.field_labels().unwrap().len());
    for o in &oracle {
        let k = store.load_field(&o.label).unwrap();
        assert_eq!(k.h_k(), o.h, "{}", o.label);
        assert_eq!(k.index().to_string(), o.index, "{}", o.label);
        assert_eq!(narrow_class_number(&k).unwrap().h_plus, o.h_plus, "{}", o.label);
        if let Some(t) = o.two_totally_ramified {
            assert_eq!(k.two_totally_ramified(), t, "{}", o.label);
        }
        for (&p, ef) in &o.splitting {
            if k.index() % p == BigInt::from(0) {
                assert!(matches!(k.dedekind_factor(p), Err(Error::IndexObstruction { .. })));
            } else {
                assert_eq!(&shape(&k, p), ef, "{} at {p}", o.label);
            }
            let s = k.decomposition_shape(p);
            assert_eq!(s.primes, ef.len(), "{} at {p}", o.label);
            assert_eq!(s.sum_f, ef.iter().map(|x| x.1).sum::<usize>(), "{} at {p}", o.label);
        }
        if o.h == 1 {
            if let Some(r) = o.ray_4 {
                assert_eq!(ray_class_number(&k, &Modulus::FourOk, false).unwrap().ray_class_number, r, "{}", o.label);
            }
            if let Some(r) = o.ray_4_all_infinite {
                assert_eq!(ray_class_number(&k, &Modulus::FourOk, true).unwrap().ray_class_number, r, "{}", o.label);
            }
        }
    }
}

#[test]
fn published_splittings() {
    assert_eq!(shape(&field("3.3.404.1"), 3), vec![(1, 1), (1, 2)]);
    assert_eq!(shape(&field("3.3.148.1"), 37), vec![(1, 1), (2, 1)]);
    assert_eq!(shape(&field("3.3.404.1"), 101), vec![(1, 1), (2, 1)]);
    assert_eq!(shape(&field("4.4.2048.1"), 79), vec![(1, 1); 4]);
    let k3 = field("8.8.2147483648.1");
    assert_eq!(shape(&k3, 31), vec![(1, 1); 8]);
    assert_eq!(shape(&k3, 97), vec![(1, 1); 8]);
    assert!(matches!(field("3.3.404.1").dedekind_factor(4), Err(Error::Domain(_))));
}

#[test]
fn two_is_totally_ramified_in_every_fixture() {
    let store = FixtureStore::bundled();
    for label in store.field_labels().unwrap() {
        if label == "1.1.1.1" {
            continue;
        }
        let k = store.load_field(&label).unwrap();
        assert!(k.is_totally_ramified(2), "{label}");
    }
}

#[test]
fn ray_class_at_a_ramified_prime() {
    for (label, p) in [("3.3.148.1", 37), ("3.3.404.1", 101), ("3.3.564.1", 47)] {
        let k = field(label);
        let q = k.dedekind_factor(p).unwrap().into_iter().find(|q| q.e == 2).unwrap();
        let r = ray_class_number(&k, &Modulus::Prime(q), true).unwrap();
        assert_eq!(r.ray_class_number, 2, "{label}");
    }
}

#[test]
fn ray_class_of_four_is_one() {
    for label in ["4.4.2048.1", "8.8.2147483648.1", "2.2.8.1"] {
        let r = ray_class_number(&field(label), &Modulus::FourOk, false).unwrap();
        assert_eq!(r.ray_class_number, 1, "{label}");
    }
}

#[test]
fn narrow_class_and_mod_four_structure() {
    let store = FixtureStore::bundled();
    for label in store.field_labels().unwrap() {
        let k = store.load_field(&label).unwrap();
        if !k.two_totally_ramified() || k.degree() == 1 {
            continue;
        }
        let d = k.degree();
        let ring = QuotientRingMod4::new(&k).unwrap();
        assert_eq!(ring.unit_group_order(), 1 << (2 * d - 1), "{label}");
        assert_eq!(ring.quotient_by_squares_order(), 1 << d, "{label}");
        let n = narrow_class_number(&k).unwrap();
        assert_eq!(n.h_plus, n.h_k << (d - n.rank), "{label}");
        let t = theorem17_check(&k).unwrap();
        assert_eq!(t.corollary_holds, Some(true), "{label}");
    }
}

#[test]
fn table_fields_have_trivial_narrow_class() {
    for label in ["3.3.148.1", "3.3.404.1", "3.3.564.1", "5.5.126032.1", "6.6.2803712.1", "4.4.2048.1", "8.8.2147483648.1"] {
        let k = field(label);
        let t = theorem17_check(&k).unwrap();
        assert_eq!((t.h_plus, t.ray_class_field_trivial, t.verdict), (1, true, true), "{label}");
    }
    let q114 = field("2.2.456.1");
    assert!(theorem17_check(&q114).unwrap().two_totally_ramified);
    assert_eq!(*field("2.2.8.1").disc(), BigInt::from(8));
}
