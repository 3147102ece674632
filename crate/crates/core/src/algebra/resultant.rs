//! Resultants of univariate polynomials over Z and elimination of X from a
//! pair (P(X), G(X, Y)).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::linalg::{bareiss_det, ExactRing};
use crate::algebra::poly::{BiPoly, IntPoly};
use crate::arith::Q;
use crate::error::{domain, Result};
use crate::par::{self, Execution};

/// Sylvester matrix of two coefficient lists given in ascending order.
pub fn sylvester<R: ExactRing>(p: &[R], q: &[R]) -> Vec<Vec<R>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![R::ring_zero(); size];
        for (k, c) in p.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![R::ring_zero(); size];
        for (k, c) in q.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Res(P, Q) as the Sylvester determinant.
///
/// `Res(P, Q) = lc(P)^deg Q · Π Q(π)` over the roots π of P.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    if p.is_zero() || q.is_zero() {
        return domain("resultant of the zero polynomial");
    }
    if p.deg() + q.deg() == 0 {
        return Ok(BigInt::one());
    }
    Ok(bareiss_det(sylvester(p.coeffs(), q.coeffs())))
}

/// Res_X(P(X), G(X, Y)) computed by direct Sylvester elimination over Z[Y].
pub fn resultant_in_x_sylvester(p: &IntPoly, g: &BiPoly) -> Result<IntPoly> {
    check_elimination_input(p, g)?;
    let pc: Vec<IntPoly> = p.coeffs().iter().map(|c| IntPoly::constant(c.clone())).collect();
    Ok(bareiss_det(sylvester(&pc, g.x_coeffs())))
}

/// Res_X(P(X), G(X, Y)) by evaluation at integer points Y = 0, 1, −1, 2, …
/// followed by interpolation. If the leading X-coefficient of G vanishes at
/// one of the points the computation falls back to direct Sylvester over Z[Y].
pub fn resultant_in_x(p: &IntPoly, g: &BiPoly, exec: Execution) -> Result<IntPoly> {
    check_elimination_input(p, g)?;
    let bound = p.deg() * g.deg_y().unwrap_or(0);
    let lead = g.x_coeffs().last().expect("nonzero").clone();
    let points: Vec<BigInt> = (0..=bound as i64)
        .map(|k| if k % 2 == 1 { BigInt::from(k / 2 + 1) } else { BigInt::from(-(k / 2)) })
        .collect();
    if points.iter().any(|y| lead.eval(y).is_zero()) {
        return resultant_in_x_sylvester(p, g);
    }
    let values = par::map(exec, &points, |y| {
        let gy = g.eval_y(y);
        resultant(p, &gy).expect("nonzero inputs")
    });
    let pairs: Vec<(BigInt, BigInt)> = points.into_iter().zip(values).collect();
    interpolate(&pairs).ok_or_else(|| {
        crate::error::Error::Inconsistency("interpolated resultant is not integral".into())
    })
}

fn check_elimination_input(p: &IntPoly, g: &BiPoly) -> Result<()> {
    if p.is_zero() || g.is_zero() {
        return domain("resultant of the zero polynomial");
    }
    if g.deg_x().unwrap_or(0) == 0 {
        return domain("G must have positive degree in X");
    }
    Ok(())
}

/// Newton interpolation through integer points; `None` if the interpolant
/// has non-integer coefficients.
pub fn interpolate(points: &[(BigInt, BigInt)]) -> Option<IntPoly> {
    let n = points.len();
    let xs: Vec<Q> = points.iter().map(|(x, _)| Q::from_integer(x.clone())).collect();
    let mut dd: Vec<Q> = points.iter().map(|(_, y)| Q::from_integer(y.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner on the Newton form.
    let mut acc: Vec<Q> = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![Q::zero(); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xs[i];
        }
        next[0] += &dd[i];
        acc = next;
    }
    if acc.iter().all(|c| c.is_integer()) {
        Some(IntPoly::new(acc.into_iter().map(|c| c.to_integer()).collect()))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::RatPoly;

    #[test]
    fn small_cases() {
        let a = IntPoly::from_i64(&[-2, 0, 1]);
        let b = IntPoly::from_i64(&[-3, 0, 1]);
        assert_eq!(resultant(&a, &b).unwrap(), BigInt::from(1));
        let c = IntPoly::from_i64(&[5]);
        assert_eq!(resultant(&a, &c).unwrap(), BigInt::from(25));
        let f = IntPoly::from_i64(&[2, -32, 0, 1]);
        // product of the roots of f, and f(0)
        assert_eq!(resultant(&f, &IntPoly::x()).unwrap(), BigInt::from(-2));
        assert_eq!(resultant(&IntPoly::x(), &f).unwrap(), BigInt::from(2));
        assert!(resultant(&IntPoly::zero(), &a).is_err());
    }

    #[test]
    fn euclidean_oracle() {
        let a = IntPoly::from_i64(&[3, -1, 4, 1, -5]);
        let b = IntPoly::from_i64(&[-9, 2, 6, 5]);
        let e = RatPoly::resultant(&a.to_rat(), &b.to_rat());
        assert_eq!(Q::from_integer(resultant(&a, &b).unwrap()), e);
    }

    #[test]
    fn substitution_case() {
        // P = X − 1, G = XY − 1 → ±(Y − 1)
        let p = IntPoly::from_i64(&[-1, 1]);
        let g = BiPoly::from_x_coeffs(vec![IntPoly::from_i64(&[-1]), IntPoly::from_i64(&[0, 1])]);
        let r = resultant_in_x(&p, &g, Execution::Sequential).unwrap();
        assert!(r == IntPoly::from_i64(&[-1, 1]) || r == IntPoly::from_i64(&[1, -1]));
        assert_eq!(r, resultant_in_x_sylvester(&p, &g).unwrap());
    }

    #[test]
    fn degenerate_lead_falls_back() {
        // lead X-coefficient Y vanishes at the first evaluation point
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let g = BiPoly::from_x_coeffs(vec![IntPoly::from_i64(&[1, 1]), IntPoly::from_i64(&[0, 1])]);
        let r = resultant_in_x(&p, &g, Execution::Sequential).unwrap();
        assert_eq!(r, resultant_in_x_sylvester(&p, &g).unwrap());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = IntPoly::from_i64(&[7, -3, 0, 2, 1]);
        let pts: Vec<(BigInt, BigInt)> =
            (-2..3).map(|x| (BigInt::from(x), f.eval(&BigInt::from(x)))).collect();
        assert_eq!(interpolate(&pts).unwrap(), f);
    }
}
