use fermat_core::data_io::FixtureStore;
use fermat_core::par::Execution;
use fermat_core::report::{fermat_report, ItemStatus, ReportVerdict};

fn run(label: &str, pmin: u64) -> fermat_core::report::FermatReport {
    fermat_report(&FixtureStore::bundled(), label, pmin, Execution::default()).unwrap()
}

#[test]
fn cubic_404_has_no_exceptions_from_13() {
    let r = run("3.3.404.1", 13);
    assert_eq!(r.verdict, ReportVerdict::NoExceptionalExponents);
    assert_eq!(r.exceptional, Some(vec![]));
}

#[test]
fn quintic_survivors_and_ramified_prime() {
    let r = run("5.5.126032.1", 23);
    assert_eq!(r.survivors[0].survivors, vec![3, 17]);
    let c = r.ramified_primes.iter().find(|c| c.p == 7877).unwrap();
    assert!(c.cleared);
    assert_eq!(r.exceptional, Some(vec![]));
}

#[test]
fn sextic_leaves_37() {
    let r = run("6.6.2803712.1", 29);
    assert_eq!(r.exceptional, Some(vec![37]));
    let c = r.ramified_primes.iter().find(|c| c.p == 37).unwrap();
    assert!(!c.cleared);
    assert_eq!(r.verdict, ReportVerdict::ExceptionalExponents);
}

#[test]
fn unresolved_without_eigenvalues() {
    let r = run("8.8.2147483648.1", 37);
    assert_eq!(r.verdict, ReportVerdict::Unresolved);
    assert_eq!(r.exceptional, None);
    assert!(r.items.iter().any(|i| i.id == "newform_elimination" && i.status == ItemStatus::Unresolved));
}

#[test]
fn report_is_deterministic_and_rejects_small_pmin() {
    let a = serde_json::to_string(&run("3.3.148.1", 5)).unwrap();
    let b = serde_json::to_string(&run("3.3.148.1", 5)).unwrap();
    assert_eq!(a, b);
    assert!(fermat_report(&FixtureStore::bundled(), "3.3.148.1", 2, Execution::default()).is_err());
}

#[test]
fn torsion_prime_sets() {
    use fermat_core::report::torsion_primes;
    assert_eq!(torsion_primes(3).last(), Some(&13));
    assert_eq!(torsion_primes(5).last(), Some(&19));
    assert!(torsion_primes(6).contains(&37) && !torsion_primes(6).contains(&23));
    assert_eq!(torsion_primes(8).last(), Some(&6719));
}

#[test]
fn cubic_148_keeps_13_with_3_inert() {
    let r = run("3.3.148.1", 13);
    assert!(r.items.iter().any(|i| i.id == "cubic_13_hypotheses" && i.status == ItemStatus::Fails));
    assert_eq!(r.exceptional, Some(vec![13]));
    assert_eq!(run("3.3.148.1", 17).exceptional, Some(vec![]));
}

#[test]
fn fields_without_fixtures_are_data_gaps() {
    use fermat_core::error::Error;
    let store = FixtureStore::bundled();
    for label in ["3.3.1076.1", "3.3.999999.1"] {
        let e = fermat_report(&store, label, 5, Execution::default()).unwrap_err();
        assert!(matches!(e, Error::DataGap(_)), "{label}: {e:?}");
    }
}
