//! The Frey curve y² = x(x − a^p)(x + b^p), its normalization at the prime
//! 𝓛 above 2, j-invariant valuations, condition (FS) witnesses and
//! reduction at odd primes.

mod fs;
mod model;
mod reduction;

pub use fs::{fs_witness_check, FsCurve, FsVerdict, FsWitness};
pub use model::{ModelInvariants, ModelScaling, ValuationTriple, WeierstrassModel};
pub use reduction::{aq_of_curve, aq_of_residues, pair_traces, power_residue_pairs, PairTrace, PowerResiduePairs, Reduction};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{is_prime_u64, valuation_q, Q};
use crate::error::{domain, Error, Result};
use crate::numfield::{FieldElement, NumberField};
use crate::units::{find_normalizing_unit, theorem17_check};

/// Invariants of E₀ : y² = x(x − A)(x + B) with A = a^p, B = b^p, C = c^p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreyInvariants {
    pub field: String,
    /// `None` for formal input, where (A, B) are free parameters.
    pub p: Option<u64>,
    pub a: Option<FieldElement>,
    pub b: Option<FieldElement>,
    pub c: Option<FieldElement>,
    pub a_pow: FieldElement,
    pub b_pow: FieldElement,
    pub c_pow: FieldElement,
    pub c4: FieldElement,
    pub c6: FieldElement,
    pub delta: FieldElement,
    /// Present when 2 is totally ramified.
    pub valuations: Option<ValuationTriple>,
}

impl FreyInvariants {
    pub fn model(&self, k: &NumberField) -> WeierstrassModel {
        WeierstrassModel::legendre(k, &self.a_pow, &self.b_pow)
    }

    pub fn invariants(&self) -> ModelInvariants {
        ModelInvariants { c4: self.c4.clone(), c6: self.c6.clone(), delta: self.delta.clone() }
    }
}

fn check_exponent(p: u64) -> Result<()> {
    if p < 3 || !is_prime_u64(p) {
        return domain(format!("exponent {p} is not an odd prime"));
    }
    Ok(())
}

/// c4 = 16(A² + AB + B²), c6 = −32(A − B)(B − C)(C − A), Δ = 16(ABC)²,
/// cross-checked against the general Weierstrass formulas.
fn invariants_from_powers(k: &NumberField, a_pow: &FieldElement, b_pow: &FieldElement, c_pow: &FieldElement) -> Result<ModelInvariants> {
    let m = |x: &FieldElement, y: &FieldElement| k.mul(x, y);
    let c4 = m(&k.from_int(16), &k.add(&k.add(&m(a_pow, a_pow), &m(a_pow, b_pow)), &m(b_pow, b_pow)));
    let c6 = m(
        &k.from_int(-32),
        &m(&m(&k.sub(a_pow, b_pow), &k.sub(b_pow, c_pow)), &k.sub(c_pow, a_pow)),
    );
    let abc = m(&m(a_pow, b_pow), c_pow);
    let delta = m(&k.from_int(16), &m(&abc, &abc));
    let closed = ModelInvariants { c4, c6, delta };
    if WeierstrassModel::legendre(k, a_pow, b_pow).invariants(k) != closed {
        return Err(Error::Inconsistency("Frey invariants disagree with the Weierstrass formulas".into()));
    }
    if !closed.satisfies_syzygy(k) {
        return Err(Error::Inconsistency("c4³ − c6² ≠ 1728Δ".into()));
    }
    Ok(closed)
}

fn valuations_if_ramified(k: &NumberField, inv: &ModelInvariants) -> Result<Option<ValuationTriple>> {
    if k.two_totally_ramified() {
        inv.valuations(k).map(Some)
    } else {
        Ok(None)
    }
}

/// Frey invariants of an actual solution a^p + b^p + c^p = 0.
pub fn frey_invariants(k: &NumberField, a: &FieldElement, b: &FieldElement, c: &FieldElement, p: u64) -> Result<FreyInvariants> {
    check_exponent(p)?;
    for (name, x) in [("a", a), ("b", b), ("c", c)] {
        if x.is_zero() {
            return domain(format!("{name} = 0: need abc ≠ 0"));
        }
        if !x.is_integral() {
            return domain(format!("{name} = {x} is not integral"));
        }
    }
    let (ap, bp, cp) = (k.pow(a, p), k.pow(b, p), k.pow(c, p));
    if !k.add(&k.add(&ap, &bp), &cp).is_zero() {
        return domain(format!("a^{p} + b^{p} + c^{p} ≠ 0"));
    }
    let index = k.ideal_sum_index(&[a.clone(), b.clone(), c.clone()])?;
    if index != BigInt::from(1) {
        return domain(format!("a, b, c are not coprime: aO_K + bO_K + cO_K has index {index}"));
    }
    let inv = invariants_from_powers(k, &ap, &bp, &cp)?;
    Ok(FreyInvariants {
        field: k.label().to_string(),
        p: Some(p),
        a: Some(a.clone()),
        b: Some(b.clone()),
        c: Some(c.clone()),
        valuations: valuations_if_ramified(k, &inv)?,
        a_pow: ap,
        b_pow: bp,
        c_pow: cp,
        c4: inv.c4,
        c6: inv.c6,
        delta: inv.delta,
    })
}

/// Frey invariants with A, B as free parameters and C = −A − B.
pub fn frey_invariants_formal(k: &NumberField, a_pow: &FieldElement, b_pow: &FieldElement) -> Result<FreyInvariants> {
    let c_pow = k.neg(&k.add(a_pow, b_pow));
    if a_pow.is_zero() || b_pow.is_zero() || c_pow.is_zero() {
        return domain("degenerate parameters: need A·B·(A + B) ≠ 0");
    }
    let inv = invariants_from_powers(k, a_pow, b_pow, &c_pow)?;
    Ok(FreyInvariants {
        field: k.label().to_string(),
        p: None,
        a: None,
        b: None,
        c: None,
        valuations: valuations_if_ramified(k, &inv)?,
        a_pow: a_pow.clone(),
        b_pow: b_pow.clone(),
        c_pow,
        c4: inv.c4,
        c6: inv.c6,
        delta: inv.delta,
    })
}

/// An element of valuation 1 at 𝓛, searched over small integral-basis
/// coordinates.
pub fn uniformizer(k: &NumberField) -> Result<FieldElement> {
    if !k.two_totally_ramified() {
        return Err(Error::Unsupported(format!("2 is not totally ramified in {}", k.label())));
    }
    let d = k.degree();
    for bound in 1..=3i64 {
        let width = (2 * bound + 1) as usize;
        let total = width.pow(d as u32);
        for mut code in 0..total {
            let mut coords = Vec::with_capacity(d);
            for _ in 0..d {
                coords.push((code % width) as i64 - bound);
                code /= width;
            }
            if coords.iter().all(|c| c.abs() < bound) {
                continue;
            }
            let x = FieldElement::from_ints(&coords);
            if !x.is_zero() && k.v_l(&x)? == 1 {
                return Ok(x);
            }
        }
    }
    Err(Error::Limit(format!("no small uniformizer at 2 found in {}", k.label())))
}

/// A triple prepared for normalization: either an actual solution or the
/// formal pair (a, b) with c^p := −a^p − b^p.
struct Triple {
    a: FieldElement,
    b: FieldElement,
    c: Option<FieldElement>,
    p: u64,
}

impl Triple {
    fn c_pow(&self, k: &NumberField) -> FieldElement {
        match &self.c {
            Some(c) => k.pow(c, self.p),
            None => k.neg(&k.add(&k.pow(&self.a, self.p), &k.pow(&self.b, self.p))),
        }
    }

    fn v_c(&self, k: &NumberField) -> Result<i64> {
        match &self.c {
            Some(c) => k.v_l(c),
            None => {
                let v = k.v_l(&self.c_pow(k))?;
                if v % self.p as i64 != 0 {
                    return domain(format!("v_L(c^p) = {v} is not a multiple of p = {}", self.p));
                }
                Ok(v / self.p as i64)
            }
        }
    }

    /// Moves the unique 𝓛-divisible entry to b.
    fn place_even_in_b(self, k: &NumberField) -> Result<(Triple, &'static str, i64)> {
        let (va, vb, vc) = (k.v_l(&self.a)?, k.v_l(&self.b)?, self.v_c(k)?);
        let even = [va > 0, vb > 0, vc > 0];
        if even.iter().filter(|&&e| e).count() != 1 {
            return domain(format!(
                "exactly one of a, b, c must be divisible by L; valuations are ({va}, {vb}, {vc})"
            ));
        }
        let v_abc = va + vb + vc;
        let Triple { a, b, c, p } = self;
        Ok(match even {
            [true, _, _] => (Triple { a: b, b: a, c, p }, "swap a, b", v_abc),
            [_, true, _] => (Triple { a, b, c, p }, "identity", v_abc),
            _ => match c {
                Some(c) => (Triple { a, b: c, c: Some(b), p }, "swap b, c", v_abc),
                None => return domain("formal input needs L to divide a or b"),
            },
        })
    }
}

/// Output of the normalization at 𝓛.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedFrey {
    pub field: String,
    pub degree: usize,
    pub p: u64,
    pub permutation: String,
    pub epsilon: FieldElement,
    /// Exponents of (−1, u_1, …, u_{d−1}) in ε.
    pub epsilon_exponents: Vec<u64>,
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: Option<FieldElement>,
    pub v_abc: i64,
    /// (εa)^p + 1 ≡ 0 mod 4.
    pub a_pow_congruence: bool,
    pub frey_valuations: ValuationTriple,
    /// Coefficients (a1, a2, a3, a4, a6) of the model after x = 4X, y = 8Y + 4X.
    pub w_model: Vec<FieldElement>,
    pub w_integral: bool,
    pub w_valuations: ValuationTriple,
    /// 2p·v_L(abc) − 8d.
    pub expected_delta: i64,
    pub multiplicative: bool,
}

fn require_normalizable(k: &NumberField) -> Result<()> {
    if !k.two_totally_ramified() {
        return Err(Error::Unsupported(format!("2 is not totally ramified in {}", k.label())));
    }
    let t17 = theorem17_check(k)?;
    if !t17.ray_class_field_trivial {
        return Err(Error::Unsupported(format!(
            "{}: the ray class field of 4O_K is not K (h_K = {}, unit image {} of {})",
            k.label(),
            t17.h_k,
            t17.unit_image_order,
            t17.g_order
        )));
    }
    Ok(())
}

/// Scales by ε with (εa)^p ≡ −1 mod 4 and builds the (W) model. Needs
/// p·v_L(b) > 4d once 𝓛 | b.
fn normalize_core(k: &NumberField, triple: Triple) -> Result<NormalizedFrey> {
    require_normalizable(k)?;
    let d = k.degree() as i64;
    let p = triple.p;
    let (t, permutation, v_abc) = triple.place_even_in_b(k)?;
    let vb = k.v_l(&t.b)?;
    if p as i64 * vb <= 4 * d {
        return domain(format!("p·v_L(b) = {} does not exceed 4d = {}", p as i64 * vb, 4 * d));
    }
    let unit = find_normalizing_unit(k, &t.a)?;
    let eps = &unit.epsilon;
    let a = k.mul(eps, &t.a);
    let b = k.mul(eps, &t.b);
    let c = t.c.as_ref().map(|c| k.mul(eps, c));
    let scaled = Triple { a: a.clone(), b: b.clone(), c: c.clone(), p };
    let (ap, bp, cp) = (k.pow(&a, p), k.pow(&b, p), scaled.c_pow(k));
    let congruence = k.scale(&k.add(&ap, &k.one()), &Q::new(1.into(), 4.into())).is_integral();
    let frey = invariants_from_powers(k, &ap, &bp, &cp)?;
    let w = WeierstrassModel::legendre(k, &ap, &bp).w_model(k, &k.from_int(2))?;
    let wv = w.invariants(k).valuations(k)?;
    let expected = 2 * p as i64 * v_abc - 8 * d;
    let multiplicative = w.is_integral() && wv.c4 == Some(0) && wv.delta > 0;
    if congruence && (wv.c4 != Some(0) || wv.delta != expected) {
        return Err(Error::Inconsistency(format!(
            "normalized (W) model has valuations {wv}, expected (0, *, {expected})"
        )));
    }
    Ok(NormalizedFrey {
        field: k.label().to_string(),
        degree: d as usize,
        p,
        permutation: permutation.into(),
        epsilon: eps.clone(),
        epsilon_exponents: unit.exponents,
        a,
        b,
        c,
        v_abc,
        a_pow_congruence: congruence,
        frey_valuations: frey.valuations(k)?,
        w_model: w.coefficients().into_iter().cloned().collect(),
        w_integral: w.is_integral(),
        w_valuations: wv,
        expected_delta: expected,
        multiplicative,
    })
}

fn require_large_p(k: &NumberField, p: u64) -> Result<()> {
    check_exponent(p)?;
    let bound = 4 * k.degree() as u64;
    if p <= bound {
        return domain(format!("p = {p} must exceed 4d = {bound}"));
    }
    Ok(())
}

/// Normalization of an actual solution for p > 4d.
pub fn normalize_solution(k: &NumberField, a: &FieldElement, b: &FieldElement, c: &FieldElement, p: u64) -> Result<NormalizedFrey> {
    require_large_p(k, p)?;
    frey_invariants(k, a, b, c, p)?;
    normalize_core(k, Triple { a: a.clone(), b: b.clone(), c: Some(c.clone()), p })
}

/// Normalization of the formal pair (a, b) with c^p := −a^p − b^p.
pub fn normalize_powers(k: &NumberField, a: &FieldElement, b: &FieldElement, p: u64) -> Result<NormalizedFrey> {
    require_large_p(k, p)?;
    if !a.is_integral() || !b.is_integral() {
        return domain("a and b must be integral");
    }
    normalize_core(k, Triple { a: a.clone(), b: b.clone(), c: None, p })
}

/// Valuation chain for p = 13 over a quartic field with v_L(abc) = 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma14Report {
    pub field: String,
    pub p: u64,
    pub v_abc: i64,
    pub permutation: String,
    pub epsilon: FieldElement,
    pub a_pow_congruence: bool,
    pub initial: ValuationTriple,
    pub v_j: i64,
    pub potentially_good: bool,
    pub uniformizer: FieldElement,
    /// Model after x = π⁴X, y = π⁶Y + π⁴X.
    pub scaled: ModelScaling,
    /// Literature annotations keyed to valuation triples; not derived here.
    pub annotations: Vec<String>,
    pub conductor_exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lemma14Outcome {
    Chain(Box<Lemma14Report>),
    /// v_L(abc) ≥ 2: the semistable normalization still applies.
    Normalized(Box<NormalizedFrey>),
}

const CHAIN_ANNOTATIONS: [&str; 2] = [
    "(8, 12, 18): Neron type I6* with v_L(N) = 8, or the model is not minimal (Papadopoulos tables)",
    "(4, 6, 6): Neron type II with v_L(N) = 6 or type III with v_L(N) = 5 (Papadopoulos tables)",
];

pub fn lemma14_chain(k: &NumberField, a: &FieldElement, b: &FieldElement, c: &FieldElement, p: u64) -> Result<Lemma14Outcome> {
    frey_invariants(k, a, b, c, p)?;
    chain(k, Triple { a: a.clone(), b: b.clone(), c: Some(c.clone()), p })
}

/// As [`lemma14_chain`] with c^13 := −a^13 − b^13.
pub fn lemma14_chain_formal(k: &NumberField, a: &FieldElement, b: &FieldElement) -> Result<Lemma14Outcome> {
    if !a.is_integral() || !b.is_integral() {
        return domain("a and b must be integral");
    }
    chain(k, Triple { a: a.clone(), b: b.clone(), c: None, p: 13 })
}

fn chain(k: &NumberField, triple: Triple) -> Result<Lemma14Outcome> {
    if k.degree() != 4 {
        return domain(format!("the chain needs a quartic field, {} has degree {}", k.label(), k.degree()));
    }
    if triple.p != 13 {
        return domain(format!("the chain needs p = 13, got {}", triple.p));
    }
    require_normalizable(k)?;
    let (va, vb, vc) = (k.v_l(&triple.a)?, k.v_l(&triple.b)?, triple.v_c(k)?);
    let v_abc = va + vb + vc;
    if v_abc >= 2 {
        return Ok(Lemma14Outcome::Normalized(Box::new(normalize_core(k, triple)?)));
    }
    if v_abc != 1 {
        return domain(format!("v_L(abc) = {v_abc}; the chain needs v_L(abc) = 1"));
    }
    let d = 4i64;
    let (t, permutation, _) = triple.place_even_in_b(k)?;
    let unit = find_normalizing_unit(k, &t.a)?;
    let a = k.mul(&unit.epsilon, &t.a);
    let b = k.mul(&unit.epsilon, &t.b);
    let (ap, bp) = (k.pow(&a, 13), k.pow(&b, 13));
    let congruence = k.scale(&k.add(&ap, &k.one()), &Q::new(1.into(), 4.into())).is_integral();
    if !congruence {
        return Err(Error::Inconsistency("a^13 + 1 ≢ 0 mod 4 after unit scaling".into()));
    }
    let e0 = WeierstrassModel::legendre(k, &ap, &bp);
    let initial = e0.invariants(k).valuations(k)?;
    let want = ValuationTriple { c4: Some(4 * d), c6: Some(6 * d), delta: 4 * d + 26 };
    if initial != want {
        return Err(Error::Inconsistency(format!("Frey valuations {initial}, expected {want}")));
    }
    let v_j = 3 * initial.c4.unwrap_or_default() - initial.delta;
    let pi = uniformizer(k)?;
    let u = k.pow(&pi, 2);
    let w = e0.w_model(k, &u)?;
    let wv = w.invariants(k).valuations(k)?;
    let scaled_want = ValuationTriple { c4: Some(8), c6: Some(12), delta: 18 };
    if !w.is_integral() || wv != scaled_want {
        return Err(Error::Inconsistency(format!(
            "scaled model integral = {}, valuations {wv}, expected {scaled_want}",
            w.is_integral()
        )));
    }
    Ok(Lemma14Outcome::Chain(Box::new(Lemma14Report {
        field: k.label().to_string(),
        p: 13,
        v_abc,
        permutation: permutation.into(),
        epsilon: unit.epsilon,
        a_pow_congruence: congruence,
        initial,
        v_j,
        potentially_good: v_j >= 0,
        scaled: ModelScaling { u: u.clone(), v_u: k.v_l(&u)?, integral: true, valuations: wv },
        uniformizer: pi,
        annotations: CHAIN_ANNOTATIONS.iter().map(|s| s.to_string()).collect(),
        conductor_exponents: vec![5, 6, 8],
    })))
}

/// v_L(j) together with the closed form 8d − 2t when it applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JValuation {
    pub v_j: i64,
    /// max(|v_L(λ)|, |v_L(μ)|) for the Legendre form.
    pub t: Option<i64>,
    /// 8d − 2t when λ and μ = 1 − λ are both 𝓛-units.
    pub closed_form: Option<i64>,
}

/// j = 2^8(1 − λμ)³/(λμ)² with μ = 1 − λ.
pub fn j_valuation_lambda(k: &NumberField, lambda: &FieldElement) -> Result<JValuation> {
    let mu = k.sub(&k.one(), lambda);
    if lambda.is_zero() || mu.is_zero() {
        return domain("λ must differ from 0 and 1");
    }
    let lm = k.mul(lambda, &mu);
    let num = k.sub(&k.one(), &lm);
    if num.is_zero() {
        return domain("j = 0 has no finite valuation");
    }
    let j = k.mul(&k.mul(&k.from_int(256), &k.pow(&num, 3)), &k.inverse(&k.pow(&lm, 2))?);
    let v_j = k.v_l(&j)?;
    let (vl, vm) = (k.v_l(lambda)?, k.v_l(&mu)?);
    let t = vl.abs().max(vm.abs());
    let in_s = k.is_l_unit(lambda)? && k.is_l_unit(&mu)?;
    let closed = in_s.then_some(8 * k.degree() as i64 - 2 * t);
    if let Some(cf) = closed {
        if cf != v_j {
            return Err(Error::Inconsistency(format!("v_L(j) = {v_j} but 8d − 2t = {cf}")));
        }
    }
    Ok(JValuation { v_j, t: Some(t), closed_form: closed })
}

/// v_L(c4³/Δ).
pub fn j_valuation_invariants(k: &NumberField, inv: &ModelInvariants) -> Result<JValuation> {
    if inv.c4.is_zero() {
        return domain("j = 0 has no finite valuation");
    }
    Ok(JValuation { v_j: 3 * k.v_l(&inv.c4)? - k.v_l(&inv.delta)?, t: None, closed_form: None })
}

/// v_L(j) = d·v_2(j) for rational j, since (2) = 𝓛^d.
pub fn j_valuation_rational(k: &NumberField, j: &Q) -> Result<JValuation> {
    if !k.two_totally_ramified() {
        return Err(Error::Unsupported(format!("2 is not totally ramified in {}", k.label())));
    }
    if j.is_zero() {
        return domain("j = 0 has no finite valuation");
    }
    Ok(JValuation { v_j: k.degree() as i64 * valuation_q(j, 2), t: None, closed_form: None })
}
