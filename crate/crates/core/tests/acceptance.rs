//! One line per acceptance criterion. A criterion is red when any of its
//! checks fails; the run fails only on red criteria not explained by missing
//! newform data.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fermat_core::arith::{format_factored, Q};
use fermat_core::data_io::FixtureStore;
use fermat_core::frey::*;
use fermat_core::newform::{b_fq, condition_c_scan, records_from_table, ConditionCVerdict, FormStatus, PrimeKey};
use fermat_core::numfield::{FieldElement, NumberField, QuotientRingMod4};
use fermat_core::par::Execution;
use fermat_core::units::{fixture_units, h_tower, narrow_class_number, ray_class_number, rk_multiple, Modulus};
use fermat_core::Error;

#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    /// Failures caused by absent data rather than a wrong value.
    gaps: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, got: T, want: T, what: &str) {
        if got != want {
            self.failures.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    }
}

fn field(label: &str) -> NumberField {
    FixtureStore::bundled().load_field(label).unwrap()
}

fn towers(label: &str, depth: usize) -> Vec<Vec<String>> {
    fixture_units(&field(label))
        .unwrap()
        .iter()
        .map(|u| h_tower(u, depth, Execution::default()).unwrap().iter().map(|v| format_factored(&v.value)).collect())
        .collect()
}

fn key(p: u64, i: usize) -> PrimeKey {
    PrimeKey { p, f: 1, factor_index: i }
}

fn shape(k: &NumberField, p: u64) -> Vec<(u32, usize)> {
    let mut v: Vec<_> = k.dedekind_factor(p).unwrap().iter().map(|q| (q.e, q.f)).collect();
    v.sort();
    v
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn c1(c: &mut Checks) {
    c.eq(towers("3.3.148.1", 1)[0][0].as_str(), "2^2", "148 H(1)");
    c.eq(towers("3.3.404.1", 1)[0][0].as_str(), "2^2*3", "404 H(1)");
    c.eq(towers("3.3.564.1", 1)[0][0].as_str(), "2^2*3^3", "564 H(1)");
    let k = field("5.5.126032.1");
    c.eq(towers("5.5.126032.1", 1)[0][0].as_str(), "-2^2*3", "quintic H_1(u_1)(1)");
    let cert = rk_multiple(&k, &fixture_units(&k).unwrap(), None, Execution::default()).unwrap();
    c.eq(cert.levels[1].factored.as_str(), "2^12*3*5^2", "quintic level-2 gcd");
    let t = towers("6.6.2803712.1", 3);
    c.eq(t[0][..2].to_vec(), vec!["2^4".to_string(), "2^32*5^4".into()], "sextic H_1, H_2");
    c.eq(t[1][2].as_str(), "2^216*7^54", "sextic H_3");
    c.eq(towers("4.4.2048.1", 2)[0].clone(), vec!["2^2".to_string(), "2^16*17".into()], "K2 tower");
    c.notes.push("9 tower values".into());
}

fn c2(c: &mut Checks) {
    let k = field("8.8.2147483648.1");
    let cert = rk_multiple(&k, &fixture_units(&k).unwrap(), None, Execution::default()).unwrap();
    c.check(cert.conclusive, "K3 certificate inconclusive");
    c.eq(cert.largest_prime_divisor_below(1_000_000), Some(607), "largest prime divisor of R_multiple");
    c.notes.push(format!("R_multiple = {}", cert.r_factored));
}

fn c3(c: &mut Checks) {
    let store = FixtureStore::bundled();
    let forms = |l: &str| records_from_table(&store.newform_table(l, 2).unwrap()).unwrap();
    let b = b_fq(&forms("3.3.404.1")[0], &key(7, 0)).unwrap();
    c.eq(b.norm_b.clone(), q(-(1 << 5) * 9 * 5 * 7), "404 Norm B");
    c.eq(b.a_q_set.clone(), vec![-4, 0, 4], "404 A_q");
    let b = b_fq(&forms("3.3.564.1")[0], &key(3, 0)).unwrap();
    c.eq(b.norm_b.clone(), q(-729), "564 Norm B");
    c.eq(b.a_q_set.clone(), vec![0], "564 A_q");
    let b = b_fq(&forms("5.5.126032.1")[0], &key(3, 0)).unwrap();
    c.eq(b.norm_b.clone(), q(-243 * 17), "quintic Norm B");
    c.notes.push("-2^5*3^2*5*7, -3^6, -3^5*17".into());
}

fn c4(c: &mut Checks) {
    c.eq(shape(&field("3.3.404.1"), 3), vec![(1, 1), (1, 2)], "3 in 404");
    c.eq(shape(&field("3.3.148.1"), 37), vec![(1, 1), (2, 1)], "37 in 148");
    c.eq(shape(&field("3.3.404.1"), 101), vec![(1, 1), (2, 1)], "101 in 404");
    c.eq(shape(&field("4.4.2048.1"), 79), vec![(1, 1); 4], "79 in K2");
    let k3 = field("8.8.2147483648.1");
    c.eq(shape(&k3, 31), vec![(1, 1); 8], "31 in K3");
    c.eq(shape(&k3, 97), vec![(1, 1); 8], "97 in K3");
    let store = FixtureStore::bundled();
    let labels: Vec<String> = store.field_labels().unwrap().into_iter().filter(|l| l != "1.1.1.1").collect();
    for l in &labels {
        c.check(store.load_field(l).unwrap().is_totally_ramified(2), format!("2 not totally ramified in {l}"));
    }
    c.notes.push(format!("2 totally ramified in {} fixture fields", labels.len()));
}

fn c5(c: &mut Checks) {
    for (label, p) in [("3.3.148.1", 37), ("3.3.404.1", 101), ("3.3.564.1", 47)] {
        let k = field(label);
        let pr = k.dedekind_factor(p).unwrap().into_iter().find(|q| q.e == 2).unwrap();
        c.eq(ray_class_number(&k, &Modulus::Prime(pr), true).unwrap().ray_class_number, 2, label);
    }
    for label in ["4.4.2048.1", "8.8.2147483648.1", "2.2.8.1"] {
        c.eq(ray_class_number(&field(label), &Modulus::FourOk, false).unwrap().ray_class_number, 1, label);
    }
}

fn c6(c: &mut Checks) {
    let k = field("4.4.2048.1");
    let listed = vec![
        (1, 23), (1, 55), (23, 1), (23, 55), (24, 56), (24, 78),
        (55, 1), (55, 23), (56, 24), (56, 78), (78, 24), (78, 56),
    ];
    let primes = k.dedekind_factor(79).unwrap();
    c.eq(primes.len(), 4, "primes above 79");
    for pr in &primes {
        let r = power_residue_pairs(pr, 13).unwrap();
        c.eq(r.residues.clone(), vec![1, 23, 24, 55, 56, 78], "13th-power residues");
        c.eq(r.pairs.clone(), listed.clone(), "admissible pairs");
        let traces: BTreeSet<i64> = pair_traces(pr, &r)
            .unwrap()
            .iter()
            .map(|t| match t.reduction {
                Reduction::Good { a_q, .. } => a_q,
                _ => i64::MAX,
            })
            .collect();
        c.eq(traces, BTreeSet::from([-4, 4]), "a_q values");
    }
}

fn c7(c: &mut Checks) {
    let k = field("3.3.130964.1");
    let w = fs_witness_check(&k, &k.scale(&k.generator(), &q(16))).unwrap();
    c.eq((w.v_a, w.threshold, w.norm_a.clone(), w.norm_b.clone()), (13, 12, q(-8192), q(1)), "cubic witness");
    c.check(w.a_in_s && w.b_in_s && w.verdict == FsVerdict::Violates, "cubic witness not in S");
    let cv = w.curve.unwrap();
    c.check(cv.w_valuations.c4 == Some(0) && cv.w_valuations.delta > 0, "cubic (W) model");

    let k = field("4.4.52816.1");
    let al = k.generator();
    let one_plus = k.add(&k.one(), &al);
    let quad = k.add(&k.add(&k.from_int(4), &k.scale(&al, &q(4))), &k.mul(&al, &al));
    let a = k.scale(&k.mul(&k.mul(&one_plus, &one_plus), &quad), &q(16));
    let w = fs_witness_check(&k, &a).unwrap();
    c.eq((w.v_a, w.threshold), (18, 16), "quartic witness");
    c.check(w.verdict == FsVerdict::Violates, "quartic witness verdict");
    let cv = w.curve.unwrap();
    c.check(cv.w_valuations.c4 == Some(0) && cv.w_valuations.delta > 0, "quartic (W) model");
}

const REMARK_CUBICS: [u64; 13] = [148, 404, 564, 756, 788, 1076, 1300, 1396, 1492, 1524, 1556, 1620, 1940];

fn c8(c: &mut Checks) {
    let store = FixtureStore::bundled();
    let scan = |l: &str| {
        let t = store.newform_table(l, 2)?;
        condition_c_scan(l, &records_from_table(&t)?)
    };
    let r = scan("3.3.148.1").unwrap();
    c.eq(r.forms, 0, "|H| for 148");
    let r = scan("3.3.404.1").unwrap();
    let w = matches!(&r.scans[0].status, FormStatus::Witness { prime, a_q, .. } if prime.p == 7 && a_q == "-2");
    c.check(w, "404 witness a_q = -2 at q|7");
    let r = scan("3.3.564.1").unwrap();
    let w = matches!(r.scans[0].status, FormStatus::NonRational { irrational_eigenvalue_seen: Some(true), .. });
    c.check(w, "564 irrational eigenvalue");
    let mut ok = 0;
    for d in REMARK_CUBICS {
        let l = format!("3.3.{d}.1");
        match scan(&l) {
            Ok(r) if r.verdict == ConditionCVerdict::Satisfied => ok += 1,
            Ok(r) => c.failures.push(format!("{l}: {:?}", r.verdict)),
            Err(Error::DataGap(_)) => c.gaps.push(d.to_string()),
            Err(e) => c.failures.push(format!("{l}: {e}")),
        }
    }
    c.notes.push(format!("{ok}/13 Remark cubics satisfied"));
    let r = scan("8.8.2147483648.1").unwrap();
    c.eq((r.forms, r.rational_forms), (40, 0), "K3 forms");
}

fn elem(rng: &mut ChaCha8Rng, d: usize) -> FieldElement {
    FieldElement::from_ints(&(0..d).map(|_| rng.random_range(-6i64..=6)).collect::<Vec<_>>())
}

fn c9(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let k = field("4.4.2048.1");
    let mut n = 0;
    while n < 1000 {
        let (a, b) = (elem(&mut rng, 4), elem(&mut rng, 4));
        if a.is_zero() || b.is_zero() || k.add(&a, &b).is_zero() {
            continue;
        }
        n += 1;
        let inv = frey_invariants_formal(&k, &a, &b).unwrap();
        if !inv.invariants().satisfies_syzygy(&k) {
            c.failures.push(format!("syzygy fails at {a}, {b}"));
        }
    }

    let k = field("3.3.148.1");
    let two = q(2);
    let mut n = 0;
    while n < 100 {
        let v = rng.random_range(1u64..=3);
        let p = [13u64, 17, 19][rng.random_range(0..3)];
        let a = k.add(&k.scale(&elem(&mut rng, 3), &two), &k.one());
        let b = k.mul(&k.pow(&k.from_int(2), v), &k.add(&k.scale(&elem(&mut rng, 3), &two), &k.one()));
        if k.v_l(&a).unwrap() != 0 || k.v_l(&b).unwrap() != 3 * v as i64 {
            continue;
        }
        n += 1;
        let nf = normalize_powers(&k, &a, &b, p).unwrap();
        if nf.w_valuations.delta != 2 * p as i64 * nf.v_abc - 8 * 3 {
            c.failures.push(format!("v_L(Δ_min) identity fails at {a}, {b}, p = {p}"));
        }
    }

    let k = field("4.4.2048.1");
    match lemma14_chain_formal(&k, &k.from_int(3), &k.generator()).unwrap() {
        Lemma14Outcome::Chain(r) => {
            c.eq(r.initial, ValuationTriple { c4: Some(16), c6: Some(24), delta: 42 }, "chain start");
            c.eq(r.scaled.valuations, ValuationTriple { c4: Some(8), c6: Some(12), delta: 18 }, "chain end");
        }
        other => c.failures.push(format!("expected the chain, got {other:?}")),
    }

    let store = FixtureStore::bundled();
    let mut fields = 0;
    for l in store.field_labels().unwrap() {
        let k = store.load_field(&l).unwrap();
        if k.degree() == 1 || !k.two_totally_ramified() {
            continue;
        }
        fields += 1;
        let d = k.degree();
        c.eq(QuotientRingMod4::new(&k).unwrap().quotient_by_squares_order(), 1 << d, &format!("|G/G^2| for {l}"));
        let nc = narrow_class_number(&k).unwrap();
        c.eq(nc.h_plus, nc.h_k << (d - nc.rank), &format!("h+ formula for {l}"));
    }
    for l in ["3.3.148.1", "3.3.404.1", "3.3.564.1", "5.5.126032.1", "6.6.2803712.1", "4.4.2048.1", "8.8.2147483648.1"] {
        c.eq(narrow_class_number(&field(l)).unwrap().h_plus, 1, &format!("h+ for {l}"));
    }
    c.notes.push(format!("1000 syzygies, 100 normalizations, {fields} fields"));
}

fn c10(c: &mut Checks) {
    let k = field("4.4.2048.1");
    let j1 = Q::new(BigInt::from(-17) * BigInt::from(373).pow(3), BigInt::from(2).pow(17));
    let j2 = Q::new(BigInt::from(-289) * BigInt::from(101).pow(3), BigInt::from(2));
    c.eq(j_valuation_rational(&k, &j1).unwrap().v_j, -68, "v_L(j_1)");
    c.eq(j_valuation_rational(&k, &j2).unwrap().v_j, -4, "v_L(j_2)");
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn(&mut Checks)); 10] = [
        ("H-tower values", c1),
        ("K3 certificate bounded by 607", c2),
        ("obstruction norms and A_q sets", c3),
        ("splittings", c4),
        ("ray class numbers", c5),
        ("residues and traces mod 79", c6),
        ("(FS) counterexample witnesses", c7),
        ("condition (C) scans", c8),
        ("Frey and narrow-class properties", c9),
        ("X_0(17) j-valuations", c10),
    ];
    let mut unexplained = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let mut c = Checks::default();
        if let Err(e) = catch_unwind(AssertUnwindSafe(|| f(&mut c))) {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            c.failures.push(format!("panic: {}", msg.unwrap_or_default()));
        }
        let pass = c.failures.is_empty() && c.gaps.is_empty();
        let mut detail = c.notes.join("; ");
        if !c.gaps.is_empty() {
            detail.push_str(&format!("; no newform data for D_K in {{{}}}", c.gaps.join(", ")));
        }
        if !c.failures.is_empty() {
            detail.push_str(&format!("; {}", c.failures.join("; ")));
            unexplained.push(i + 1);
        }
        // Straight to the handle so the lines survive output capture.
        let _ = writeln!(std::io::stdout(), "criterion {:>2} {}: {name}{}", i + 1, if pass { "PASS" } else { "FAIL" }, if detail.is_empty() { String::new() } else { format!(" ({})", detail.trim_start_matches("; ")) });
    }
    assert!(unexplained.is_empty(), "criteria failing on wrong values: {unexplained:?}");
}
