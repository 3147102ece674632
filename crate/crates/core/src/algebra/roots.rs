//! Real root isolation by Sturm sequences, refinement by bisection and
//! interval-checked Newton steps.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::interval::{Dyadic, RealInterval};
use crate::algebra::poly::IntPoly;
use crate::arith::Q;
use crate::error::{domain, Result};

/// Sturm sequence P, P', −rem, … with primitive integer members.
pub fn sturm_sequence(p: &IntPoly) -> Vec<IntPoly> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let a = &seq[n - 2];
        let b = &seq[n - 1];
        let delta = a.deg() - b.deg();
        let mut r = a.pseudo_rem(b);
        if r.is_zero() {
            break;
        }
        // prem multiplies by lc(b)^(delta+1); undo its sign, then negate.
        let flip = b.lc().is_negative() && (delta + 1) % 2 == 1;
        if !flip {
            r = -&r;
        }
        let c = r.content();
        r = r.div_exact_int(&c);
        seq.push(r);
    }
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_of(n: &BigInt) -> i32 {
    if n.is_zero() {
        0
    } else if n.is_positive() {
        1
    } else {
        -1
    }
}

/// P evaluated exactly at a dyadic point.
pub fn eval_dyadic(p: &IntPoly, x: &Dyadic) -> Dyadic {
    let Some(n) = p.degree() else { return Dyadic::zero() };
    let e = x.exponent();
    if e >= 0 {
        let xi = x.mantissa() << e as usize;
        return Dyadic::from_int(p.eval(&xi));
    }
    let k = (-e) as usize;
    let m = x.mantissa();
    let mut acc = p.lc();
    for i in (0..n).rev() {
        acc = acc * m + (p.coeff(i) << (k * (n - i)));
    }
    Dyadic::new(acc, e * n as i64)
}

fn sign_at(p: &IntPoly, x: &Dyadic) -> i32 {
    eval_dyadic(p, x).signum()
}

fn variations_at(seq: &[IntPoly], x: &Dyadic) -> usize {
    variations(seq.iter().map(|s| sign_at(s, x)))
}

fn variations_at_infinity(seq: &[IntPoly], positive: bool) -> usize {
    variations(seq.iter().map(|s| {
        let sl = sign_of(&s.lc());
        if positive || s.deg() % 2 == 0 {
            sl
        } else {
            -sl
        }
    }))
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &IntPoly) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let seq = sturm_sequence(&p.squarefree_part());
    variations_at_infinity(&seq, false) - variations_at_infinity(&seq, true)
}

/// Number of distinct real roots in (a, b].
pub fn count_roots_between(p: &IntPoly, a: &Q, b: &Q) -> usize {
    let seq = sturm_sequence(&p.squarefree_part());
    let va = variations(seq.iter().map(|s| s.sign_at(a)));
    let vb = variations(seq.iter().map(|s| s.sign_at(b)));
    va.saturating_sub(vb)
}

/// A power of two strictly larger than the modulus of every root (Cauchy).
fn root_bound_exp(p: &IntPoly) -> i64 {
    let lc = p.lc().abs();
    let max = p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    let ratio = Q::new(max, lc) + Q::one();
    let mut k = 0i64;
    let mut bound = Q::one();
    while bound <= ratio {
        bound *= Q::from_integer(BigInt::from(2));
        k += 1;
    }
    k
}

/// A real root of a squarefree integer polynomial, enclosed by [lo, hi] with
/// P(lo)·P(hi) < 0.
#[derive(Clone, Debug)]
pub struct RealRoot {
    poly: IntPoly,
    lo: Dyadic,
    hi: Dyadic,
}

impl RealRoot {
    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn interval(&self) -> RealInterval {
        RealInterval::new(self.lo.clone(), self.hi.clone())
    }

    /// −log2(width) lower bound, i.e. number of correct fractional bits.
    pub fn precision(&self) -> i64 {
        -self.hi.sub(&self.lo).log2_upper().unwrap_or(i64::MIN / 2)
    }

    fn split_point(&self) -> Dyadic {
        // Midpoint, nudged off any exact root so that endpoints are never roots.
        let mid = self.lo.add(&self.hi).mul(&Dyadic::new(BigInt::one(), -1));
        let w = self.hi.sub(&self.lo);
        let n = self.poly.deg() as i64 + 2;
        for j in 0..=n {
            let off = w.mul(&Dyadic::new(BigInt::from(j), -(n + 3)));
            for cand in [mid.add(&off), mid.sub(&off)] {
                if sign_at(&self.poly, &cand) != 0 {
                    return cand;
                }
            }
        }
        unreachable!("a polynomial cannot vanish at that many points")
    }

    fn bisect(&mut self) {
        let m = self.split_point();
        let sl = sign_at(&self.poly, &self.lo);
        let sm = sign_at(&self.poly, &m);
        if sl == sm {
            self.lo = m;
        } else {
            self.hi = m;
        }
    }

    /// Newton step from the midpoint producing a bracket of half-width 2^−prec.
    fn newton(&mut self, prec: i64) -> bool {
        let mid = self.lo.add(&self.hi).mul(&Dyadic::new(BigInt::one(), -1));
        let fp = eval_dyadic(&self.poly.derivative(), &mid);
        if fp.signum() == 0 {
            return false;
        }
        let f = eval_dyadic(&self.poly, &mid);
        let step = f.to_q() / fp.to_q();
        let x = mid.to_q() - step;
        let centre = Dyadic::floor_q(&x, -prec);
        let eps = Dyadic::new(BigInt::one(), -prec);
        let lo = centre.sub(&eps);
        let hi = centre.add(&eps);
        if lo < self.lo || hi > self.hi {
            return false;
        }
        let sl = sign_at(&self.poly, &lo);
        let sh = sign_at(&self.poly, &hi);
        if sl == 0 || sh == 0 || sl == sh {
            return false;
        }
        self.lo = lo;
        self.hi = hi;
        true
    }

    /// Narrows the enclosure until its width is at most 2^−bits.
    pub fn refine(&self, bits: i64) -> RealRoot {
        let mut r = self.clone();
        while r.precision() < bits {
            let cur = r.precision();
            if cur < 24 || !r.newton((2 * cur + 4).min(bits + 2)) {
                r.bisect();
            }
        }
        r
    }
}

/// Isolates the real roots of P (replaced by its squarefree part), ascending.
pub fn isolate_real_roots(p: &IntPoly) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return domain("root isolation of the zero polynomial");
    }
    if p.deg() == 0 {
        return Ok(vec![]);
    }
    let sq = p.squarefree_part();
    let seq = sturm_sequence(&sq);
    let k = root_bound_exp(&sq);
    let b = Dyadic::from_int(BigInt::one() << k as usize);
    let mut stack = vec![RealRoot { poly: sq.clone(), lo: b.neg(), hi: b }];
    let mut out = Vec::new();
    while let Some(r) = stack.pop() {
        let count = variations_at(&seq, &r.lo) - variations_at(&seq, &r.hi);
        match count {
            0 => {}
            1 => out.push(r),
            _ => {
                let m = r.split_point();
                stack.push(RealRoot { poly: sq.clone(), lo: r.lo.clone(), hi: m.clone() });
                stack.push(RealRoot { poly: sq.clone(), lo: m, hi: r.hi });
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// Isolating intervals only.
pub fn isolate_real_root_intervals(p: &IntPoly) -> Result<Vec<RealInterval>> {
    Ok(isolate_real_roots(p)?.iter().map(RealRoot::interval).collect())
}

/// Is every root of P real and strictly positive?
pub fn all_roots_positive(p: &IntPoly) -> bool {
    let d = p.squarefree_part().deg();
    count_real_roots(p) == d && {
        let big = Q::from_integer(BigInt::one() << (root_bound_exp(p) as usize + 1));
        count_roots_between(p, &Q::zero(), &big) == d && !p.eval(&BigInt::zero()).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn sqrt2() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        let r = roots[1].refine(200);
        let i = r.interval();
        let sq = i.mul(&i);
        assert!(sq.contains_q(&rat(2)));
        assert!(r.precision() >= 200);
    }

    #[test]
    fn counts() {
        assert_eq!(count_real_roots(&IntPoly::from_i64(&[2, -32, 0, 1])), 3);
        assert_eq!(count_real_roots(&IntPoly::from_i64(&[1, 0, 1])), 0);
        assert!(all_roots_positive(&IntPoly::from_i64(&[1, -20, 34, -12, 1])));
        // repeated roots collapse
        assert_eq!(count_real_roots(&IntPoly::from_i64(&[1, -2, 1])), 1);
    }

    #[test]
    fn dyadic_root_is_not_an_endpoint() {
        // roots 0, 1/2, 3
        let p = IntPoly::from_i64(&[0, 3, -7, 2]);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            let r = r.refine(60);
            assert_ne!(sign_at(r.poly(), &r.lo), 0);
            assert_ne!(sign_at(r.poly(), &r.hi), 0);
        }
    }
}
