//! Condition (C) over Hilbert newform eigenvalue tables, the sets A_q, the
//! obstruction B_{f,q} with its norm to Q, and surviving exponents.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::interval::RealInterval;
use crate::algebra::poly::{IntPoly, RatPoly};
use crate::algebra::roots::{count_real_roots, isolate_real_roots, RealRoot};
use crate::arith::{format_factored, format_rational, parse_rational, prime_divisors, ser_rational, Q};
use crate::data_io::{NewformEntry, NewformTable};
use crate::error::{domain, Error, Result};
use crate::numfield::certify_irreducible;

/// Q_f = Q(β) given by the minimal polynomial of β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeField {
    poly: IntPoly,
    totally_real: bool,
}

impl HeckeField {
    pub fn new(poly: IntPoly) -> Result<Self> {
        if poly.degree().is_none_or(|d| d == 0) || !poly.is_monic() {
            return Err(Error::Invalid(format!("Hecke polynomial {poly} must be monic of positive degree")));
        }
        if !certify_irreducible(&poly) {
            return Err(Error::Invalid(format!("cannot certify {poly} irreducible over Q")));
        }
        let totally_real = count_real_roots(&poly) == poly.deg();
        Ok(HeckeField { poly, totally_real })
    }

    pub fn rational() -> Self {
        HeckeField { poly: IntPoly::x(), totally_real: true }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.deg()
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn is_totally_real(&self) -> bool {
        self.totally_real
    }

    /// Reduces a polynomial in β modulo the minimal polynomial.
    pub fn reduce(&self, x: &RatPoly) -> RatPoly {
        x.rem(&self.poly.to_rat())
    }

    pub fn mul(&self, x: &RatPoly, y: &RatPoly) -> RatPoly {
        x.mul_mod(y, &self.poly.to_rat())
    }

    /// The rational value of an element of degree 0, if it is one.
    pub fn as_rational(&self, x: &RatPoly) -> Option<Q> {
        let r = self.reduce(x);
        (r.is_zero() || r.deg() == 0).then(|| r.coeff(0))
    }

    /// Norm_{Q(β)/Q} as Res(h, x) for monic h.
    pub fn norm(&self, x: &RatPoly) -> Q {
        let r = self.reduce(x);
        if r.is_zero() {
            return Q::zero();
        }
        self.poly.to_rat().resultant(&r)
    }

    /// Enclosures of σ(x) for every real embedding σ.
    pub fn embeddings(&self, x: &RatPoly, bits: u64) -> Result<Vec<RealInterval>> {
        Ok(isolate_real_roots(&self.poly)?
            .iter()
            .map(|r: &RealRoot| r.refine(bits as i64).interval().eval_rat_poly(x, bits))
            .collect())
    }

    /// Norm as a product of interval conjugates; needs a totally real field.
    pub fn norm_by_intervals(&self, x: &RatPoly) -> Result<Q> {
        if !self.totally_real {
            return Err(Error::Unsupported("interval norm needs a totally real Hecke field".into()));
        }
        let x = self.reduce(x);
        let den = x.denominator();
        let scale = Q::from_integer(num_traits::pow(den.clone(), self.degree()));
        let xi = x.scale(&Q::from_integer(den));
        let mut bits = 128;
        loop {
            let prod = self
                .embeddings(&xi, bits)?
                .into_iter()
                .reduce(|a, b| a.mul_round(&b, bits))
                .expect("positive degree");
            if let Some(n) = prod.unique_integer() {
                return Ok(Q::from_integer(n) / &scale);
            }
            if bits > 1 << 16 {
                return Err(Error::Limit("interval norm did not converge".into()));
            }
            bits *= 2;
        }
    }
}

impl fmt::Display for HeckeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[b]/({})", self.poly)
    }
}

/// A prime of O_K named by (p, f, position in the Dedekind factor list).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimeKey {
    pub p: u64,
    pub f: usize,
    pub factor_index: usize,
}

impl PrimeKey {
    pub fn norm(&self) -> Result<u64> {
        u32::try_from(self.f)
            .ok()
            .and_then(|f| self.p.checked_pow(f))
            .ok_or_else(|| Error::Limit(format!("Norm of a prime above {} of degree {} overflows", self.p, self.f)))
    }
}

impl fmt::Display for PrimeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q|{} (f={}, #{})", self.p, self.f, self.factor_index)
    }
}

/// One Galois orbit of newforms. `hecke` is absent for summary records
/// that only give the orbit size.
#[derive(Clone, Debug)]
pub struct NewformRecord {
    pub label: String,
    pub field_label: String,
    pub level_norm: u64,
    pub orbit_size: usize,
    pub hecke: Option<HeckeField>,
    pub eigenvalues: Vec<(PrimeKey, RatPoly)>,
}

impl NewformRecord {
    pub fn from_entry(e: &NewformEntry) -> Result<Self> {
        let at = |what: &str| format!("{} / {}: {what}", e.field_label, e.label);
        if e.hecke_degree == 0 {
            return Err(Error::Invalid(at("hecke_degree is 0")));
        }
        let hecke = match &e.hecke_poly {
            None => None,
            Some(cs) => {
                let coeffs = cs.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>().map_err(|err| Error::Invalid(at(&err.to_string())))?;
                let q = RatPoly::new(coeffs);
                let poly = q.to_int_exact().ok_or_else(|| Error::Invalid(at("hecke_poly is not integral")))?;
                let h = if poly.deg() == 1 && poly == IntPoly::x() { HeckeField::rational() } else { HeckeField::new(poly)? };
                if h.degree() != e.hecke_degree {
                    return Err(Error::Invalid(at(&format!("hecke_degree {} but polynomial of degree {}", e.hecke_degree, h.degree()))));
                }
                Some(h)
            }
        };
        if hecke.is_none() && !e.eigenvalues.is_empty() {
            return Err(Error::Invalid(at("eigenvalues given without a Hecke polynomial")));
        }
        let mut eigenvalues = Vec::with_capacity(e.eigenvalues.len());
        for (i, ev) in e.eigenvalues.iter().enumerate() {
            let h = hecke.as_ref().expect("checked above");
            let where_ = format!("eigenvalue #{i} at p = {}", ev.p);
            if ev.aq.len() != h.degree() {
                return Err(Error::Invalid(at(&format!("{where_}: {} coordinates for degree {}", ev.aq.len(), h.degree()))));
            }
            let coeffs = ev.aq.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>().map_err(|err| Error::Invalid(at(&format!("{where_}: {err}"))))?;
            let key = PrimeKey { p: ev.p, f: ev.f, factor_index: ev.factor_index };
            if ev.p == 2 {
                return Err(Error::Invalid(at(&format!("{where_}: the level prime carries no a_q here"))));
            }
            eigenvalues.push((key, RatPoly::new(coeffs)));
        }
        let rec = NewformRecord {
            label: e.label.clone(),
            field_label: e.field_label.clone(),
            level_norm: e.level_norm,
            orbit_size: e.hecke_degree,
            hecke,
            eigenvalues,
        };
        rec.check_weil_bounds()?;
        Ok(rec)
    }

    pub fn is_rational(&self) -> bool {
        self.orbit_size == 1
    }

    pub fn eigenvalue(&self, q: &PrimeKey) -> Option<&RatPoly> {
        self.eigenvalues.iter().find(|(k, _)| k == q).map(|(_, v)| v)
    }

    /// |σ(a_q)| ≤ 2√Norm(q) in every real embedding of a totally real Q_f.
    pub fn check_weil_bounds(&self) -> Result<()> {
        let Some(h) = &self.hecke else { return Ok(()) };
        if !h.is_totally_real() {
            return Ok(());
        }
        for (key, a) in &self.eigenvalues {
            let bound = Q::from_integer(BigInt::from(4) * BigInt::from(key.norm()?));
            let sq = h.mul(a, a);
            let mut bits = 64;
            for _ in 0..8 {
                let mut undecided = false;
                for s in h.embeddings(&sq, bits)? {
                    if s.lo_q() > bound {
                        return Err(Error::Invalid(format!(
                            "{}: a_q at {key} breaks the Weil bound 2*sqrt({})",
                            self.label,
                            key.norm()?
                        )));
                    }
                    undecided |= s.hi_q() > bound;
                }
                if !undecided {
                    break;
                }
                bits *= 2;
            }
        }
        Ok(())
    }
}

pub fn records_from_table(t: &NewformTable) -> Result<Vec<NewformRecord>> {
    t.forms.iter().map(NewformRecord::from_entry).collect()
}

/// All t with t² ≤ 4·Norm(q) and t ≡ Norm(q) + 1 mod 4, ascending.
pub fn a_q_set(q_norm: u64) -> Result<Vec<i64>> {
    if q_norm < 3 || q_norm % 2 == 0 {
        return domain(format!("Norm(q) = {q_norm} must be odd and at least 3"));
    }
    let n = q_norm as i128;
    let r = ((n + 1) % 4) as i64;
    let lim = (4 * n).to_f64().unwrap_or(0.0).sqrt() as i64 + 1;
    Ok((-lim..=lim).filter(|&t| (t as i128).pow(2) <= 4 * n && (t - r).rem_euclid(4) == 0).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FormStatus {
    /// a_q ≢ Norm(q) + 1 mod 4 at the recorded prime.
    Witness { prime: PrimeKey, norm: u64, a_q: String },
    /// No witness among the supplied eigenvalues.
    Inconclusive { primes_scanned: usize },
    /// Q_f ≠ Q; such forms do not enter condition (C).
    NonRational { degree: usize, irrational_eigenvalue_seen: Option<bool> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormScan {
    pub label: String,
    pub orbit_size: usize,
    #[serde(flatten)]
    pub status: FormStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionCVerdict {
    Satisfied,
    InconclusiveUpToData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCReport {
    pub field: String,
    /// |H|, counting every member of every orbit.
    pub forms: usize,
    pub orbits: usize,
    pub rational_forms: usize,
    pub scans: Vec<FormScan>,
    pub verdict: ConditionCVerdict,
}

/// Scans rational forms for a prime with a_q ≢ Norm(q) + 1 mod 4.
pub fn condition_c_scan(field: &str, forms: &[NewformRecord]) -> Result<ConditionCReport> {
    let mut sorted: Vec<&NewformRecord> = forms.iter().collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label));
    let mut scans = Vec::with_capacity(sorted.len());
    for f in &sorted {
        if f.field_label != field {
            return Err(Error::Invalid(format!("{} belongs to {}, not {field}", f.label, f.field_label)));
        }
        if f.level_norm != 2 {
            return Err(Error::Invalid(format!("{} has level norm {}, not the prime above 2", f.label, f.level_norm)));
        }
        let status = if f.is_rational() {
            let h = f.hecke.as_ref().ok_or_else(|| Error::DataGap(format!("{}: rational form without eigenvalues", f.label)))?;
            if f.eigenvalues.is_empty() {
                return Err(Error::DataGap(format!("{}: empty eigenvalue table", f.label)));
            }
            let mut found = None;
            for (key, a) in &f.eigenvalues {
                let a = h.as_rational(a).ok_or_else(|| Error::Invalid(format!("{}: a_q at {key} is not rational", f.label)))?;
                if !a.is_integer() {
                    return Err(Error::Invalid(format!("{}: a_q = {a} at {key} is not an integer", f.label)));
                }
                let n = key.norm()?;
                if !(a.to_integer() - BigInt::from(n + 1)).is_multiple_of(&BigInt::from(4)) {
                    found = Some(FormStatus::Witness { prime: *key, norm: n, a_q: format_rational(&a) });
                    break;
                }
            }
            found.unwrap_or(FormStatus::Inconclusive { primes_scanned: f.eigenvalues.len() })
        } else {
            let seen = f.hecke.as_ref().filter(|_| !f.eigenvalues.is_empty()).map(|h| {
                f.eigenvalues.iter().any(|(_, a)| h.as_rational(a).is_none())
            });
            FormStatus::NonRational { degree: f.orbit_size, irrational_eigenvalue_seen: seen }
        };
        scans.push(FormScan { label: f.label.clone(), orbit_size: f.orbit_size, status });
    }
    let verdict = if scans.iter().any(|s| matches!(s.status, FormStatus::Inconclusive { .. })) {
        ConditionCVerdict::InconclusiveUpToData
    } else {
        ConditionCVerdict::Satisfied
    };
    Ok(ConditionCReport {
        field: field.to_string(),
        forms: sorted.iter().map(|f| f.orbit_size).sum(),
        orbits: sorted.len(),
        rational_forms: sorted.iter().filter(|f| f.is_rational()).count(),
        scans,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub form: String,
    pub prime: PrimeKey,
    pub norm_q: u64,
    /// Coordinates of a_q in the power basis of β.
    pub a_q: Vec<String>,
    pub a_q_set: Vec<i64>,
    /// B_{f,q} in the power basis of β.
    pub b: Vec<String>,
    #[serde(serialize_with = "ser_rational")]
    pub norm_b: Q,
    pub norm_b_factored: String,
    /// Primes dividing Norm(B) together with p; empty when B = 0.
    pub survivors: Vec<u64>,
}

/// B = Norm(q)·((Norm(q) + 1)² − a_q²)·Π_{t ∈ A_q}(t − a_q) and its norm.
pub fn b_fq(form: &NewformRecord, q: &PrimeKey) -> Result<ObstructionReport> {
    if q.p == 2 {
        return domain("q must differ from the prime above 2");
    }
    let h = form.hecke.as_ref().ok_or_else(|| Error::DataGap(format!("{}: no eigenvalue data", form.label)))?;
    let a = form
        .eigenvalue(q)
        .ok_or_else(|| Error::DataGap(format!("{}: a_q missing at {q}", form.label)))?;
    let n = q.norm()?;
    let set = a_q_set(n)?;
    let c = |v: i64| RatPoly::constant(Q::from_integer(BigInt::from(v)));
    let n1 = RatPoly::constant(Q::from_integer(BigInt::from(n) + 1));
    let mut b = h.mul(&c(n as i64), &(&h.mul(&n1, &n1) - &h.mul(a, a)));
    for &t in &set {
        b = h.mul(&b, &(&c(t) - a));
    }
    let norm_b = h.norm(&b);
    let survivors = if norm_b.is_zero() {
        Vec::new()
    } else {
        let num = norm_b.to_integer();
        if !norm_b.is_integer() {
            return Err(Error::Inconsistency(format!("Norm(B) = {norm_b} is not an integer")));
        }
        let mut s: BTreeSet<u64> = prime_divisors(&num.abs())?.iter().filter_map(|p| p.to_u64()).collect();
        s.insert(q.p);
        s.into_iter().collect()
    };
    let coords = |x: &RatPoly| (0..h.degree()).map(|i| format_rational(&x.coeff(i))).collect::<Vec<_>>();
    Ok(ObstructionReport {
        form: form.label.clone(),
        prime: *q,
        norm_q: n,
        a_q: coords(a),
        a_q_set: set,
        b: coords(&b),
        norm_b_factored: if norm_b.is_integer() { format_factored(&norm_b.to_integer()) } else { format_rational(&norm_b) },
        norm_b,
        survivors,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivorVerdict {
    /// Every exponent outside `survivors` is eliminated for this form.
    Finite,
    /// B_{f,q} = 0 at every supplied q.
    MethodFails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivorReport {
    pub form: String,
    pub reports: Vec<ObstructionReport>,
    pub survivors: Vec<u64>,
    pub verdict: SurvivorVerdict,
}

/// Intersection over q with B ≠ 0 of {p | Norm(B_{f,q})} ∪ {p | Norm(q)}.
pub fn survivor_primes(form: &NewformRecord, primes: &[PrimeKey]) -> Result<SurvivorReport> {
    if primes.is_empty() {
        return domain("no primes supplied");
    }
    let reports = primes.iter().map(|q| b_fq(form, q)).collect::<Result<Vec<_>>>()?;
    let mut acc: Option<BTreeSet<u64>> = None;
    for r in reports.iter().filter(|r| !r.norm_b.is_zero()) {
        let s: BTreeSet<u64> = r.survivors.iter().copied().collect();
        acc = Some(match acc {
            None => s,
            Some(a) => a.intersection(&s).copied().collect(),
        });
    }
    let (survivors, verdict) = match acc {
        Some(s) => (s.into_iter().collect(), SurvivorVerdict::Finite),
        None => (Vec::new(), SurvivorVerdict::MethodFails),
    };
    Ok(SurvivorReport { form: form.label.clone(), reports, survivors, verdict })
}

/// Convenience for building eigenvalues in tests and tools.
pub fn beta_poly(coeffs: &[i64]) -> RatPoly {
    RatPoly::new(coeffs.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_q_sets() {
        assert_eq!(a_q_set(7).unwrap(), vec![-4, 0, 4]);
        assert_eq!(a_q_set(3).unwrap(), vec![0]);
        assert_eq!(a_q_set(9).unwrap(), vec![-6, -2, 2, 6]);
        assert!(a_q_set(2).is_err());
        assert!(a_q_set(1).is_err());
    }

    #[test]
    fn quadratic_norms() {
        let h = HeckeField::new(IntPoly::from_i64(&[-1, 3, 1])).unwrap();
        let b = beta_poly(&[0, 1]);
        assert_eq!(h.norm(&b), Q::from_integer(BigInt::from(-1)));
        assert_eq!(h.norm_by_intervals(&b).unwrap(), h.norm(&b));
        assert!(HeckeField::new(IntPoly::from_i64(&[-4, 0, 1])).is_err());
    }
}
