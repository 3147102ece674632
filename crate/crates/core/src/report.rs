//! The per-field checklist behind `fermat-report`: what the machine checked,
//! what is taken from the literature, and which exponents remain.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime_u64, prime_divisors};
use crate::data_io::FixtureStore;
use crate::error::{Error, Result};
use crate::newform::{condition_c_scan, records_from_table, survivor_primes, ConditionCReport, ConditionCVerdict, SurvivorReport, SurvivorVerdict};
use crate::numfield::NumberField;
use crate::par::Execution;
use crate::units::{fixture_units, ray_class_number, rk_multiple, theorem17_check, Modulus, RkCertificate, Theorem17Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    MachineVerified,
    LiteratureAssumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Holds,
    Fails,
    Unresolved,
    /// Literature input, not checked here.
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChecklistItem {
    pub id: &'static str,
    pub provenance: Provenance,
    pub claim: String,
    pub status: ItemStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<&'static str>,
}

/// A prime p | D_K handled through the ray class field of m∞·𝔭 for a
/// ramified 𝔭 | p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamifiedPrimeCheck {
    pub p: u64,
    pub prime: Option<String>,
    pub ray_class_number: Option<u64>,
    pub cleared: bool,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportVerdict {
    /// Every prime p ≥ pmin is covered, given the literature items.
    NoExceptionalExponents,
    ExceptionalExponents,
    /// Some form or certificate could not be evaluated.
    Unresolved,
    /// 2 is not totally ramified or h⁺ ≠ 1.
    HypothesesFail,
}

#[derive(Clone, Debug, Serialize)]
pub struct FermatReport {
    pub field: String,
    pub degree: usize,
    pub disc: String,
    pub pmin: u64,
    pub items: Vec<ChecklistItem>,
    pub theorem17: Theorem17Report,
    pub condition_c: ConditionCReport,
    pub certificate: Option<RkCertificate>,
    pub ramified_primes: Vec<RamifiedPrimeCheck>,
    pub survivors: Vec<SurvivorReport>,
    /// Primes p ≥ pmin not eliminated; `None` when unresolved.
    pub exceptional: Option<Vec<u64>>,
    pub verdict: ReportVerdict,
}

const MODULARITY: &str = "Freitas, Le Hung, Siksek, Invent. Math. 201 (2015): Frey curves over K are modular for p large";
const LEVEL_LOWERING: &str = "Fujiwara, Jarvis, Rajaei; as packaged by Freitas and Siksek, Compositio Math. 151 (2015)";
const IRREDUCIBILITY: &str = "Freitas and Siksek, J. Théor. Nombres Bordeaux 27 (2015): p ∤ D_K·R_K and p > p_0(d) give irreducibility";
const TORSION: &str = "Derickx, Kamienny, Stein, Stoll: primes of torsion on elliptic curves over fields of small degree";
const CUBIC_13: &str = "rational points of X_0(26) and X_0(52) over cubic fields, with Serre's description of inertia at p";
const NEWFORM_DATA: &str = "LMFDB Hilbert modular forms / Magma HilbertCuspForms";
const NONRATIONAL: &str = "Dembélé and Cremona: a non-rational newform has some a_q outside Z";

fn item(id: &'static str, provenance: Provenance, claim: impl Into<String>, status: ItemStatus, detail: impl Into<String>, citation: Option<&'static str>) -> ChecklistItem {
    ChecklistItem { id, provenance, claim: claim.into(), status, detail: detail.into(), citation }
}

fn holds(ok: bool) -> ItemStatus {
    if ok {
        ItemStatus::Holds
    } else {
        ItemStatus::Fails
    }
}

/// Full pipeline for one bundled field. Newform data must be bundled.
pub fn fermat_report(store: &FixtureStore, label: &str, pmin: u64, exec: Execution) -> Result<FermatReport> {
    if pmin < 3 {
        return Err(Error::Domain(format!("pmin = {pmin} must be at least 3")));
    }
    let k = store.load_field(label)?;
    let table = store.newform_table(label, 2)?;
    let forms = records_from_table(&table)?;
    let d = k.degree();
    let mut items = Vec::new();

    let t17 = theorem17_check(&k)?;
    items.push(item("two_totally_ramified", Provenance::MachineVerified, "2 is totally ramified in K", holds(t17.two_totally_ramified), format!("2O_K = L^{d}"), None));
    items.push(item("narrow_class_one", Provenance::MachineVerified, "h_K^+ = 1", holds(t17.h_plus == 1), format!("h_K = {}, h_K^+ = {}", t17.h_k, t17.h_plus), None));
    items.push(item("ray_class_4", Provenance::MachineVerified, "K = K^{4O_K}", holds(t17.ray_class_field_trivial), format!("units hit {} of |(O_K/4)^*| = {}", t17.unit_image_order, t17.g_order), None));

    let cc = condition_c_scan(label, &forms)?;
    let cc_ok = cc.verdict == ConditionCVerdict::Satisfied;
    items.push(item(
        "condition_c",
        Provenance::MachineVerified,
        "every rational newform of level L has a_q ≢ Norm(q) + 1 mod 4 at some q",
        if cc_ok { ItemStatus::Holds } else { ItemStatus::Unresolved },
        format!("|H| = {} in {} orbits, {} rational", cc.forms, cc.orbits, cc.rational_forms),
        None,
    ));
    items.push(item("newform_tables", Provenance::LiteratureAssumed, "the bundled tables list every newform of level L", ItemStatus::Assumed, table.provenance.clone(), Some(NEWFORM_DATA)));
    items.push(item("modularity", Provenance::LiteratureAssumed, "the Frey curve is modular for p ≥ pmin", ItemStatus::Assumed, "", Some(MODULARITY)));
    items.push(item("level_lowering", Provenance::LiteratureAssumed, "level lowering applies for p > 4d", ItemStatus::Assumed, format!("4d = {}", 4 * d), Some(LEVEL_LOWERING)));

    let hypotheses = t17.two_totally_ramified && t17.h_plus == 1;

    let certificate = match fixture_units(&k) {
        Ok(units) => Some(rk_multiple(&k, &units, None, exec)?),
        Err(Error::DataGap(_)) => None,
        Err(e) => return Err(e),
    };
    let mut unresolved = !cc_ok;
    let mut exceptional: BTreeSet<u64> = BTreeSet::new();
    // Level lowering needs p > 4d.
    exceptional.extend((pmin..=4 * d as u64).filter(|&p| is_prime_u64(p)));

    let disc_primes = big_primes(k.disc())?;
    match &certificate {
        Some(c) if c.conclusive => {
            let r_primes = big_primes(&c.r_multiple)?;
            items.push(item("rk_certificate", Provenance::MachineVerified, "R_K divides the computed multiple", ItemStatus::Holds, format!("R_multiple = {}", c.r_factored), None));
            exceptional.extend(r_primes.iter().copied().filter(|&p| p >= pmin));
        }
        Some(c) => {
            items.push(item("rk_certificate", Provenance::MachineVerified, "R_K divides the computed multiple", ItemStatus::Unresolved, format!("some level vanished for every unit: {}", c.r_factored), None));
            unresolved = true;
        }
        None => {
            items.push(item("rk_certificate", Provenance::MachineVerified, "R_K divides the computed multiple", ItemStatus::Unresolved, "no totally positive units recorded", None));
            unresolved = true;
        }
    }
    items.push(item("irreducibility", Provenance::LiteratureAssumed, "p ∤ D_K·R_K and p outside the torsion primes of degree d force ρ_{E,p} irreducible", ItemStatus::Assumed, "", Some(IRREDUCIBILITY)));

    let torsion = torsion_primes(d);
    exceptional.extend(torsion.iter().copied().filter(|&p| p >= pmin));
    if d == 3 && pmin <= 13 {
        let r_ok = certificate.as_ref().filter(|c| c.conclusive).map(|c| !(k.disc() * &c.r_multiple % 13u32).is_zero());
        let shape = k.decomposition_shape(3);
        let not_inert = !(shape.primes == 1 && shape.sum_f == 3);
        let ok = t17.h_plus == 1 && r_ok == Some(true) && not_inert;
        if ok {
            exceptional.remove(&13);
        }
        items.push(item(
            "cubic_13_hypotheses",
            Provenance::MachineVerified,
            "h_K^+ = 1, 13 ∤ D_K·R_K and 3 is not inert",
            holds(ok),
            format!("13 ∤ D_K·R_multiple: {}, 3 not inert: {not_inert}", r_ok.map_or("unknown".into(), |b| b.to_string())),
            None,
        ));
        items.push(item("cubic_13", Provenance::LiteratureAssumed, "under those hypotheses ρ_{E,13} is irreducible for semistable E with a rational 2-torsion point", ItemStatus::Assumed, "", Some(CUBIC_13)));
    }
    items.push(item(
        "torsion_primes",
        Provenance::LiteratureAssumed,
        format!("no elliptic curve over a degree {d} field has a point of prime order p outside the listed set"),
        ItemStatus::Assumed,
        format!("largest listed prime {}", torsion.last().copied().unwrap_or(0)),
        Some(TORSION),
    ));

    let mut ramified_primes = Vec::new();
    for &p in disc_primes.iter().filter(|&&p| p >= pmin && p > 2) {
        let check = ramified_prime_check(&k, p, torsion.binary_search(&p).is_ok())?;
        if !check.cleared {
            exceptional.insert(p);
        }
        ramified_primes.push(check);
    }
    if !ramified_primes.is_empty() {
        let all = ramified_primes.iter().all(|c| c.cleared);
        items.push(item(
            "ramified_primes",
            Provenance::MachineVerified,
            "[K^{m∞𝔭} : K] ≤ 2 for a ramified 𝔭 above each p | D_K with p ≥ pmin",
            holds(all),
            ramified_primes.iter().map(|c| format!("p = {}: {}", c.p, c.note)).collect::<Vec<_>>().join("; "),
            None,
        ));
        items.push(item("ramified_torsion", Provenance::LiteratureAssumed, "a ray class field of degree ≤ 2 rules out rational p-isogenies of the Frey curve", ItemStatus::Assumed, "", Some(TORSION)));
    }

    let mut survivors = Vec::new();
    let mut missing = Vec::new();
    for f in &forms {
        if f.eigenvalues.is_empty() {
            missing.push(f.label.clone());
            continue;
        }
        let keys: Vec<_> = f.eigenvalues.iter().map(|(q, _)| *q).collect();
        let s = survivor_primes(f, &keys)?;
        match s.verdict {
            SurvivorVerdict::Finite => exceptional.extend(s.survivors.iter().copied().filter(|&p| p >= pmin)),
            SurvivorVerdict::MethodFails => missing.push(f.label.clone()),
        }
        survivors.push(s);
    }
    if !forms.is_empty() {
        let detail = if missing.is_empty() {
            survivors
                .iter()
                .map(|s| format!("{}: {{{}}}", s.form, s.survivors.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join("; ")
        } else {
            format!("no usable eigenvalues for {}", missing.join(", "))
        };
        items.push(item(
            "newform_elimination",
            Provenance::MachineVerified,
            "every newform of level L has some q with p ∤ Norm(B_{f,q})",
            if missing.is_empty() { ItemStatus::Holds } else { ItemStatus::Unresolved },
            detail,
            None,
        ));
        if forms.iter().any(|f| !f.is_rational()) {
            items.push(item("nonrational_forms", Provenance::LiteratureAssumed, "non-rational forms always admit some q with B_{f,q} ≠ 0", ItemStatus::Assumed, "", Some(NONRATIONAL)));
        }
        unresolved |= !missing.is_empty();
    }

    let verdict = if !hypotheses {
        ReportVerdict::HypothesesFail
    } else if unresolved {
        ReportVerdict::Unresolved
    } else if exceptional.is_empty() {
        ReportVerdict::NoExceptionalExponents
    } else {
        ReportVerdict::ExceptionalExponents
    };
    Ok(FermatReport {
        field: label.to_string(),
        degree: d,
        disc: k.disc().to_string(),
        pmin,
        items,
        theorem17: t17,
        condition_c: cc,
        certificate,
        ramified_primes,
        survivors,
        exceptional: (!unresolved).then(|| exceptional.into_iter().collect()),
        verdict,
    })
}

fn big_primes(n: &BigInt) -> Result<Vec<u64>> {
    if n.is_zero() {
        return Ok(Vec::new());
    }
    prime_divisors(n)?
        .iter()
        .map(|p| p.to_u64().ok_or_else(|| Error::Limit(format!("prime divisor {p} does not fit in 64 bits"))))
        .collect()
}

/// Primes that occur as orders of torsion points of elliptic curves over
/// some field of degree d: the determined sets for d ≤ 6, else every prime
/// up to Oesterlé's bound (1 + 3^{d/2})^2.
pub fn torsion_primes(d: usize) -> Vec<u64> {
    let bound = match d {
        1 => 7,
        2 | 3 => 13,
        4 => 17,
        5 | 6 => 19,
        _ => {
            let r = 3f64.powf(d as f64 / 2.0);
            ((1.0 + r) * (1.0 + r)).floor() as u64
        }
    };
    let mut out: Vec<u64> = (2..=bound).filter(|&p| is_prime_u64(p)).collect();
    if d == 6 {
        out.push(37);
    }
    out
}

/// Clears p when pO_K = 𝔮^2·𝔭_2⋯𝔭_s with s ≥ 2 and every 𝔭_i unramified,
/// [K^{m∞𝔮} : K] ≤ 2 and p is not a torsion prime in degree d.
fn ramified_prime_check(k: &NumberField, p: u64, torsion_prime: bool) -> Result<RamifiedPrimeCheck> {
    let fail = |note: String| RamifiedPrimeCheck { p, prime: None, ray_class_number: None, cleared: false, note };
    let primes = match k.dedekind_factor(p) {
        Ok(v) => v,
        Err(Error::IndexObstruction { .. }) => return Ok(fail("p divides the index".into())),
        Err(e) => return Err(e),
    };
    let shape = primes.iter().map(|q| format!("(e={}, f={})", q.e, q.f)).collect::<Vec<_>>().join("");
    let ramified: Vec<_> = primes.iter().filter(|q| q.e >= 2).collect();
    if primes.len() < 2 || ramified.len() != 1 || ramified[0].e != 2 {
        return Ok(fail(format!("pO_K has shape {shape}; need one prime with e = 2 and an unramified one")));
    }
    if torsion_prime {
        return Ok(fail(format!("{p} is a torsion prime in degree {}", k.degree())));
    }
    let q = ramified[0].clone();
    let name = format!("q|{} (e={}, f={}, #{})", q.p, q.e, q.f, q.factor_index);
    match ray_class_number(k, &Modulus::Prime(q), true) {
        Ok(r) => Ok(RamifiedPrimeCheck {
            p,
            prime: Some(name.clone()),
            ray_class_number: Some(r.ray_class_number),
            cleared: r.ray_class_number <= 2,
            note: format!("ray class number of m∞·{name} is {}", r.ray_class_number),
        }),
        Err(e @ (Error::Limit(_) | Error::Unsupported(_))) => Ok(fail(e.to_string())),
        Err(e) => Err(e),
    }
}
