//! Outward-rounded interval arithmetic with dyadic endpoints m·2^e.
//! Endpoints are exact rationals; rounding only ever widens an interval.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::poly::{IntPoly, RatPoly};
use crate::arith::Q;

/// The exact rational m·2^e.
#[derive(Clone, Debug)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        Dyadic { m, e }
    }

    pub fn from_int(n: BigInt) -> Self {
        Dyadic { m: n, e: 0 }
    }

    pub fn zero() -> Self {
        Dyadic { m: BigInt::zero(), e: 0 }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn to_q(&self) -> Q {
        if self.e >= 0 {
            Q::from_integer(&self.m << self.e as usize)
        } else {
            Q::new(self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }

    /// Largest multiple of 2^e not exceeding q.
    pub fn floor_q(q: &Q, e: i64) -> Self {
        let (n, d) = scaled(q, e);
        Dyadic { m: n.div_floor(&d), e }
    }

    /// Smallest multiple of 2^e not below q.
    pub fn ceil_q(q: &Q, e: i64) -> Self {
        let (n, d) = scaled(q, e);
        Dyadic { m: -((-n).div_floor(&d)), e }
    }

    pub fn signum(&self) -> i32 {
        if self.m.is_zero() {
            0
        } else if self.m.is_positive() {
            1
        } else {
            -1
        }
    }

    fn align(&self, o: &Self) -> (BigInt, BigInt, i64) {
        let e = self.e.min(o.e);
        (&self.m << (self.e - e) as usize, &o.m << (o.e - e) as usize, e)
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b, e) = self.align(o);
        Dyadic { m: a + b, e }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b, e) = self.align(o);
        Dyadic { m: a - b, e }
    }

    pub fn neg(&self) -> Self {
        Dyadic { m: -&self.m, e: self.e }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    /// Multiplies by 2^k.
    pub fn shl(&self, k: i64) -> Self {
        Dyadic { m: self.m.clone(), e: self.e + k }
    }

    /// Rounds toward −∞ keeping at most `bits` significant bits.
    pub fn round_down(&self, bits: u64) -> Self {
        let len = self.m.bits();
        if len <= bits {
            return self.clone();
        }
        let shift = len - bits;
        Dyadic { m: self.m.div_floor(&(BigInt::one() << shift as usize)), e: self.e + shift as i64 }
    }

    /// Rounds toward +∞ keeping at most `bits` significant bits (plus carry).
    pub fn round_up(&self, bits: u64) -> Self {
        self.neg().round_down(bits).neg()
    }

    /// Upper bound on log2 |x|, `None` for zero.
    pub fn log2_upper(&self) -> Option<i64> {
        (!self.m.is_zero()).then(|| self.m.bits() as i64 + self.e)
    }
}

fn scaled(q: &Q, e: i64) -> (BigInt, BigInt) {
    if e >= 0 {
        (q.numer().clone(), q.denom() << e as usize)
    } else {
        (q.numer() << (-e) as usize, q.denom().clone())
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (a, b, _) = self.align(o);
        a.cmp(&b)
    }
}

/// Closed interval [lo, hi] with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RealInterval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        RealInterval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Self::point(Dyadic::from_int(n.clone()))
    }

    /// Smallest interval with endpoints on the 2^−prec grid containing q.
    pub fn from_q(q: &Q, prec: u64) -> Self {
        let e = -(prec as i64);
        RealInterval { lo: Dyadic::floor_q(q, e), hi: Dyadic::ceil_q(q, e) }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn lo_q(&self) -> Q {
        self.lo.to_q()
    }

    pub fn hi_q(&self) -> Q {
        self.hi.to_q()
    }

    pub fn width(&self) -> Q {
        self.hi.sub(&self.lo).to_q()
    }

    /// Upper bound on log2 of the width, `None` for a point.
    pub fn width_log2(&self) -> Option<i64> {
        self.hi.sub(&self.lo).log2_upper()
    }

    pub fn contains_q(&self, x: &Q) -> bool {
        &self.lo_q() <= x && x <= &self.hi_q()
    }

    pub fn contains(&self, o: &RealInterval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    /// Sign of every point of the interval, `None` if it straddles zero.
    pub fn sign(&self) -> Option<i32> {
        let (a, b) = (self.lo.signum(), self.hi.signum());
        if a > 0 {
            Some(1)
        } else if b < 0 {
            Some(-1)
        } else if a == 0 && b == 0 {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        RealInterval { lo: self.lo.add(&o.lo), hi: self.hi.add(&o.hi) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RealInterval { lo: self.lo.sub(&o.hi), hi: self.hi.sub(&o.lo) }
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        RealInterval { lo, hi }
    }

    /// Widens the endpoints to at most `bits` significant bits.
    pub fn round(&self, bits: u64) -> Self {
        RealInterval { lo: self.lo.round_down(bits), hi: self.hi.round_up(bits) }
    }

    pub fn mul_round(&self, o: &Self, bits: u64) -> Self {
        self.mul(o).round(bits)
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.mul(&Self::from_int(k))
    }

    /// P(self) by Horner's rule, rounding to `bits` significant bits per step.
    pub fn eval_int_poly(&self, p: &IntPoly, bits: u64) -> Self {
        let mut acc = Self::from_int(&BigInt::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul_round(self, bits).add(&Self::from_int(c));
        }
        acc
    }

    /// P(self) for rational P; coefficients enclosed at `bits` bits.
    pub fn eval_rat_poly(&self, p: &RatPoly, bits: u64) -> Self {
        let mut acc = Self::from_int(&BigInt::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul_round(self, bits).add(&Self::from_q(c, bits));
        }
        acc
    }

    /// The unique integer in the interval, provided the width is below 1/2.
    /// `None` when the interval is too wide or holds no integer.
    pub fn unique_integer(&self) -> Option<BigInt> {
        if self.width() >= Q::new(BigInt::one(), BigInt::from(2)) {
            return None;
        }
        let n = self.lo_q().ceil().to_integer();
        (Q::from_integer(n.clone()) <= self.hi_q()).then_some(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_frac;

    #[test]
    fn rounding_is_outward() {
        let q = rat_frac(1, 3);
        let i = RealInterval::from_q(&q, 20);
        assert!(i.contains_q(&q));
        assert!(i.width() <= rat_frac(1, 1 << 20));
        let sq = i.mul(&i).round(8);
        assert!(sq.contains_q(&(&q * &q)));
        let neg = i.neg().round(4);
        assert!(neg.contains_q(&-q));
    }

    #[test]
    fn unique_integer_rule() {
        let a = RealInterval::from_q(&rat_frac(41, 10), 10);
        assert_eq!(a.unique_integer(), None);
        let b = RealInterval::new(Dyadic::floor_q(&rat_frac(39, 10), -10), Dyadic::ceil_q(&rat_frac(41, 10), -10));
        assert_eq!(b.unique_integer(), Some(BigInt::from(4)));
        let wide = RealInterval::new(Dyadic::from_int(BigInt::from(3)), Dyadic::from_int(BigInt::from(4)));
        assert_eq!(wide.unique_integer(), None);
    }
}
