use serde::Serialize;

use crate::arith::Q;
use crate::error::{domain, Result};
use crate::frey::model::{ValuationTriple, WeierstrassModel};
use crate::numfield::{FieldElement, NumberField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FsVerdict {
    /// a or 1 − a is not an 𝓛-unit.
    NotInS,
    /// a ∈ S and |v_L(a)| ≤ 4d.
    WithinBound,
    /// a ∈ S and |v_L(a)| > 4d: condition (FS) fails.
    Violates,
}

/// The curve y² = x(x − a')(x + b') built from a violating witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FsCurve {
    /// True when a' = 1/a was used because v_L(a) < −4d.
    pub inverted: bool,
    pub a: FieldElement,
    pub b: FieldElement,
    pub v_a: i64,
    pub valuations: ValuationTriple,
    pub w_integral: bool,
    pub w_valuations: ValuationTriple,
    /// 4d + 2v_L(a') − 12d.
    pub expected_delta: i64,
    pub multiplicative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FsWitness {
    pub field: String,
    pub a: FieldElement,
    pub b: FieldElement,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub norm_a: Q,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub norm_b: Q,
    pub a_in_s: bool,
    pub b_in_s: bool,
    pub v_a: i64,
    pub threshold: i64,
    pub verdict: FsVerdict,
    pub curve: Option<FsCurve>,
}

/// Checks whether a is an S-unit solution a + (1 − a) = 1 with
/// |v_L(a)| > 4d, and if so rebuilds the multiplicative model at 𝓛.
pub fn fs_witness_check(k: &NumberField, a: &FieldElement) -> Result<FsWitness> {
    let one = k.one();
    if a.is_zero() || *a == one {
        return domain("a must differ from 0 and 1");
    }
    let b = k.sub(&one, a);
    let (a_in_s, b_in_s) = (k.is_l_unit(a)?, k.is_l_unit(&b)?);
    let v_a = k.v_l(a)?;
    let d = k.degree() as i64;
    let threshold = 4 * d;
    let verdict = match (a_in_s && b_in_s, v_a.abs() > threshold) {
        (false, _) => FsVerdict::NotInS,
        (true, false) => FsVerdict::WithinBound,
        (true, true) => FsVerdict::Violates,
    };
    let curve = match verdict {
        FsVerdict::Violates => Some(lemma_curve(k, a, v_a < 0)?),
        _ => None,
    };
    Ok(FsWitness {
        field: k.label().to_string(),
        norm_a: k.norm(a),
        norm_b: k.norm(&b),
        a: a.clone(),
        b,
        a_in_s,
        b_in_s,
        v_a,
        threshold,
        verdict,
        curve,
    })
}

fn lemma_curve(k: &NumberField, a: &FieldElement, invert: bool) -> Result<FsCurve> {
    let a1 = if invert { k.inverse(a)? } else { a.clone() };
    let b1 = k.sub(&k.one(), &a1);
    let e = WeierstrassModel::legendre(k, &a1, &b1);
    let valuations = e.invariants(k).valuations(k)?;
    let w = e.w_model(k, &k.from_int(2))?;
    let w_valuations = w.invariants(k).valuations(k)?;
    let d = k.degree() as i64;
    let v_a = k.v_l(&a1)?;
    Ok(FsCurve {
        inverted: invert,
        a: a1,
        b: b1,
        v_a,
        valuations,
        w_integral: w.is_integral(),
        multiplicative: w.is_integral() && w_valuations.c4 == Some(0) && w_valuations.delta > 0,
        w_valuations,
        expected_delta: 4 * d + 2 * v_a - 12 * d,
    })
}
