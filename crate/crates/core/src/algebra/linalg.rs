//! Exact linear algebra: fraction-free determinants over Z and Z[Y],
//! rational inverses, and rank/kernels over F_p.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::poly::IntPoly;
use crate::arith::Q;

/// Integral domain with exact division, enough for Bareiss elimination.
pub trait ExactRing: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn is_ring_zero(&self) -> bool;
    fn ring_mul(&self, o: &Self) -> Self;
    fn ring_sub(&self, o: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// `self / o`, which the caller guarantees to be exact.
    fn div_exact(&self, o: &Self) -> Self;
}

impl ExactRing for BigInt {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn is_ring_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl ExactRing for IntPoly {
    fn ring_zero() -> Self {
        IntPoly::zero()
    }
    fn ring_one() -> Self {
        IntPoly::one()
    }
    fn is_ring_zero(&self) -> bool {
        IntPoly::is_zero(self)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        IntPoly::div_exact(self, o).expect("Bareiss step must divide exactly")
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn bareiss_det<R: ExactRing>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::ring_one();
    }
    let mut sign_flip = false;
    let mut prev = R::ring_one();
    for k in 0..n - 1 {
        if m[k][k].is_ring_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_ring_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return R::ring_zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].ring_mul(&m[k][k]).ring_sub(&m[i][k].ring_mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev);
            }
            m[i][k] = R::ring_zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        d.ring_neg()
    } else {
        d
    }
}

pub type QMatrix = Vec<Vec<Q>>;

/// Inverse of a square rational matrix, `None` if singular.
pub fn q_inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = Q::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant of a rational matrix via Bareiss on the denominator-cleared matrix.
pub fn q_det(m: &QMatrix) -> Q {
    let n = m.len();
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(n);
    for row in m {
        let l = row.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        rows.push(row.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect());
        scale *= l;
    }
    Q::new(bareiss_det(rows), scale)
}

/// Row vector times matrix.
pub fn q_vec_mat(v: &[Q], m: &QMatrix) -> Vec<Q> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| v.iter().zip(m).fold(Q::zero(), |acc, (a, row)| acc + a * &row[j]))
        .collect()
}

/// Solves x·M = b for a square invertible M given its inverse.
pub fn q_solve_left(b: &[Q], m_inv: &QMatrix) -> Vec<Q> {
    q_vec_mat(b, m_inv)
}

/// Rank of a matrix over F_p (entries already reduced).
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][col] % p != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = crate::arith::mod_pow(m[rank][col], p - 2, p);
        for c in 0..cols {
            m[rank][c] = (m[rank][c] as u128 * inv as u128 % p as u128) as u64;
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..cols {
                    let sub = (f as u128 * m[rank][c] as u128 % p as u128) as u64;
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix product over F_p.
pub fn mat_mul_mod_p(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    ((0..k).fold(0u128, |acc, t| acc + a[i][t] as u128 * b[t][j] as u128)
                        % p as u128) as u64
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn naive_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * naive_det(&minor)
            })
            .sum()
    }

    #[test]
    fn bareiss_agrees_with_cofactor_expansion() {
        let m = vec![
            vec![0, 2, -1, 3],
            vec![4, 0, 5, 1],
            vec![-2, 7, 0, 0],
            vec![1, 1, 1, 6],
        ];
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(bareiss_det(big), BigInt::from(naive_det(&m)));
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(7), rat(4)]];
        let inv = q_inverse(&m).unwrap();
        assert_eq!(q_vec_mat(&q_vec_mat(&[rat(3), rat(5)], &m), &inv), vec![rat(3), rat(5)]);
        assert_eq!(q_det(&m), rat(1));
    }

    #[test]
    fn rank_over_f2() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert_eq!(rank_mod_p(m, 2), 2);
    }
}
