use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::ffield::{count_points_legendre, Fq};
use crate::error::{domain, Error, Result};
use crate::numfield::{FieldElement, NumberField, PrimeIdealData};

/// Reduction type of y² = x(x − s)(x + t) at an odd prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Reduction {
    Good { points: u64, a_q: i64 },
    /// a_q(f) ≡ ±(Norm(q) + 1) is the relevant congruence.
    Multiplicative { candidates: [i64; 2] },
}

fn residue_norm(q: &PrimeIdealData) -> Result<u64> {
    if q.p == 2 {
        return domain("q must be an odd prime");
    }
    q.norm_u64().ok_or_else(|| Error::Limit(format!("Norm(q) = {} is too large", q.norm())))
}

/// a_q from residues s, t of the Legendre parameters.
pub fn aq_of_residues(s: &Fq, t: &Fq, q: &PrimeIdealData) -> Result<Reduction> {
    let n = residue_norm(q)?;
    let f = &q.residue_field;
    let sum = f.add(s, t);
    let zeros = [s, t, &sum].iter().filter(|x| f.is_zero(x)).count();
    match zeros {
        0 => {}
        1 => {
            let c = n as i64 + 1;
            return Ok(Reduction::Multiplicative { candidates: [-c, c] });
        }
        _ => return domain("additive reduction: the three roots coincide mod q"),
    }
    let points = count_points_legendre(s, t, f)?;
    let a_q = n as i64 + 1 - points as i64;
    if (a_q as i128).pow(2) > 4 * n as i128 {
        return Err(Error::Inconsistency(format!("a_q = {a_q} breaks the Hasse bound for Norm(q) = {n}")));
    }
    if (n as i64 + 1 - a_q).rem_euclid(4) != 0 {
        return Err(Error::Inconsistency(format!("a_q = {a_q} is not ≡ Norm(q) + 1 mod 4")));
    }
    Ok(Reduction::Good { points, a_q })
}

/// a_q of y² = x(x − s)(x + t) for s, t integral at q.
pub fn aq_of_curve(k: &NumberField, s: &FieldElement, t: &FieldElement, q: &PrimeIdealData) -> Result<Reduction> {
    let rs = k.reduce_mod_prime(s, q)?;
    let rt = k.reduce_mod_prime(t, q)?;
    aq_of_residues(&rs, &rt, q)
}

/// p-th power residues of O_K/q and the admissible pairs (s, t): s, t and
/// −(s + t) all nonzero p-th powers. Residues are listed by their index
/// in the residue field, which for f = 1 is the integer representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerResiduePairs {
    pub prime: u64,
    pub norm: u64,
    pub exponent: u64,
    pub residues: Vec<u64>,
    pub pairs: Vec<(u64, u64)>,
}

/// Largest number of candidate pairs examined.
pub const PAIR_LIMIT: u128 = 100_000_000;

pub fn power_residue_pairs(q: &PrimeIdealData, p: u64) -> Result<PowerResiduePairs> {
    let f = &q.residue_field;
    let n = q.norm_u64().ok_or_else(|| Error::Limit(format!("Norm(q) = {} is too large", q.norm())))?;
    let elems = f.elements(crate::algebra::ffield::ENUMERATION_LIMIT)?;
    let set: BTreeSet<u64> = elems
        .iter()
        .filter(|x| !f.is_zero(x))
        .map(|x| f.index_of(&f.pow_u64(x, p)))
        .collect();
    if (set.len() as u128).pow(2) > PAIR_LIMIT {
        return Err(Error::Limit(format!("{} residues give too many pairs to enumerate", set.len())));
    }
    let mut pairs = Vec::new();
    for &s in &set {
        for &t in &set {
            let sum = f.add(&f.element(s), &f.element(t));
            if f.is_zero(&sum) {
                continue;
            }
            if set.contains(&f.index_of(&f.neg(&sum))) {
                pairs.push((s, t));
            }
        }
    }
    Ok(PowerResiduePairs { prime: q.p, norm: n, exponent: p, residues: set.into_iter().collect(), pairs })
}

/// a_q for one admissible residue pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairTrace {
    pub s: u64,
    pub t: u64,
    pub reduction: Reduction,
}

pub fn pair_traces(q: &PrimeIdealData, pairs: &PowerResiduePairs) -> Result<Vec<PairTrace>> {
    let f = &q.residue_field;
    pairs
        .pairs
        .iter()
        .map(|&(s, t)| Ok(PairTrace { s, t, reduction: aq_of_residues(&f.element(s), &f.element(t), q)? }))
        .collect()
}
