use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::{FieldElement, NumberField};

/// y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6 over K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: FieldElement,
    pub a2: FieldElement,
    pub a3: FieldElement,
    pub a4: FieldElement,
    pub a6: FieldElement,
}

/// Standard invariants of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelInvariants {
    pub c4: FieldElement,
    pub c6: FieldElement,
    pub delta: FieldElement,
}

/// v_𝓛 of (c4, c6, Δ); `None` stands for a vanishing invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationTriple {
    pub c4: Option<i64>,
    pub c6: Option<i64>,
    pub delta: i64,
}

impl ValuationTriple {
    pub fn as_tuple(&self) -> (Option<i64>, Option<i64>, i64) {
        (self.c4, self.c6, self.delta)
    }
}

impl std::fmt::Display for ValuationTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = |v: Option<i64>| v.map_or("inf".to_string(), |v| v.to_string());
        write!(f, "({}, {}, {})", s(self.c4), s(self.c6), self.delta)
    }
}

fn opt_v(k: &NumberField, x: &FieldElement) -> Result<Option<i64>> {
    if x.is_zero() {
        Ok(None)
    } else {
        k.v_l(x).map(Some)
    }
}

impl ModelInvariants {
    pub fn valuations(&self, k: &NumberField) -> Result<ValuationTriple> {
        if self.delta.is_zero() {
            return Err(Error::Domain("singular model: Δ = 0".into()));
        }
        Ok(ValuationTriple { c4: opt_v(k, &self.c4)?, c6: opt_v(k, &self.c6)?, delta: k.v_l(&self.delta)? })
    }

    /// c4³ − c6² = 1728·Δ.
    pub fn satisfies_syzygy(&self, k: &NumberField) -> bool {
        let lhs = k.sub(&k.pow(&self.c4, 3), &k.pow(&self.c6, 2));
        lhs == k.mul(&k.from_int(1728), &self.delta)
    }
}

impl WeierstrassModel {
    /// y² = x³ + a2·x² + a4·x.
    pub fn short(k: &NumberField, a2: FieldElement, a4: FieldElement) -> Self {
        WeierstrassModel { a1: k.zero(), a2, a3: k.zero(), a4, a6: k.zero() }
    }

    /// y² = x(x − s)(x + t).
    pub fn legendre(k: &NumberField, s: &FieldElement, t: &FieldElement) -> Self {
        Self::short(k, k.sub(t, s), k.neg(&k.mul(s, t)))
    }

    pub fn coefficients(&self) -> [&FieldElement; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients().iter().all(|a| a.is_integral())
    }

    pub fn invariants(&self, k: &NumberField) -> ModelInvariants {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let m = |x: &FieldElement, y: &FieldElement| k.mul(x, y);
        let c = |n: i64| k.from_int(n);
        let b2 = k.add(&m(a1, a1), &m(&c(4), a2));
        let b4 = k.add(&m(&c(2), a4), &m(a1, a3));
        let b6 = k.add(&m(a3, a3), &m(&c(4), a6));
        let b8 = {
            let t1 = m(&m(a1, a1), a6);
            let t2 = m(&c(4), &m(a2, a6));
            let t3 = m(&m(a1, a3), a4);
            let t4 = m(a2, &m(a3, a3));
            let t5 = m(a4, a4);
            k.sub(&k.add(&k.sub(&k.add(&t1, &t2), &t3), &t4), &t5)
        };
        let c4 = k.sub(&m(&b2, &b2), &m(&c(24), &b4));
        let c6 = k.sub(
            &k.add(&k.neg(&k.pow(&b2, 3)), &m(&c(36), &m(&b2, &b4))),
            &m(&c(216), &b6),
        );
        let delta = {
            let t1 = k.neg(&m(&m(&b2, &b2), &b8));
            let t2 = m(&c(8), &k.pow(&b4, 3));
            let t3 = m(&c(27), &m(&b6, &b6));
            let t4 = m(&c(9), &m(&b2, &m(&b4, &b6)));
            k.add(&k.sub(&k.sub(&t1, &t2), &t3), &t4)
        };
        ModelInvariants { c4, c6, delta }
    }

    /// The model in the coordinates x = u²X + r, y = u³Y + s·u²X + t.
    pub fn change_coordinates(
        &self,
        k: &NumberField,
        u: &FieldElement,
        r: &FieldElement,
        s: &FieldElement,
        t: &FieldElement,
    ) -> Result<WeierstrassModel> {
        let ui = k.inverse(u)?;
        let m = |x: &FieldElement, y: &FieldElement| k.mul(x, y);
        let c = |n: i64| k.from_int(n);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let n1 = k.add(a1, &m(&c(2), s));
        let n2 = k.sub(&k.add(&k.sub(a2, &m(s, a1)), &m(&c(3), r)), &m(s, s));
        let n3 = k.add(&k.add(a3, &m(r, a1)), &m(&c(2), t));
        let n4 = {
            let acc = k.add(&k.sub(a4, &m(s, a3)), &m(&c(2), &m(r, a2)));
            let acc = k.sub(&acc, &m(&k.add(t, &m(r, s)), a1));
            let acc = k.add(&acc, &m(&c(3), &m(r, r)));
            k.sub(&acc, &m(&c(2), &m(s, t)))
        };
        let n6 = {
            let acc = k.add(&k.add(a6, &m(r, a4)), &m(&m(r, r), a2));
            let acc = k.add(&acc, &k.pow(r, 3));
            let acc = k.sub(&k.sub(&acc, &m(t, a3)), &m(t, t));
            k.sub(&acc, &m(&m(r, t), a1))
        };
        let out = WeierstrassModel {
            a1: m(&n1, &ui),
            a2: m(&n2, &k.pow(&ui, 2)),
            a3: m(&n3, &k.pow(&ui, 3)),
            a4: m(&n4, &k.pow(&ui, 4)),
            a6: m(&n6, &k.pow(&ui, 6)),
        };
        let (old, new) = (self.invariants(k), out.invariants(k));
        let ok = new.c4 == m(&old.c4, &k.pow(&ui, 4))
            && new.c6 == m(&old.c6, &k.pow(&ui, 6))
            && new.delta == m(&old.delta, &k.pow(&ui, 12));
        if !ok {
            return Err(Error::Inconsistency("invariants do not scale by powers of u".into()));
        }
        Ok(out)
    }

    /// The substitution x = u²X, y = u³Y + u²X (r = t = 0, s = 1).
    pub fn w_model(&self, k: &NumberField, u: &FieldElement) -> Result<WeierstrassModel> {
        self.change_coordinates(k, u, &k.zero(), &k.one(), &k.zero())
    }
}

/// Scaling element and the valuation triple of the rescaled model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelScaling {
    pub u: FieldElement,
    pub v_u: i64,
    pub integral: bool,
    pub valuations: ValuationTriple,
}
