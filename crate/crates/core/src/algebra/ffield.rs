//! Polynomials over F_p, their factorization (squarefree, distinct-degree,
//! equal-degree), finite fields F_p[x]/(g), and point counts on Legendre
//! curves y² = x(x − s)(x + t).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::poly::IntPoly;
use crate::arith::{is_prime_u64, mod_pow, Q};
use crate::error::{domain, Error, Result};
use crate::par::{self, Execution};

/// Seed for the random splitting elements of equal-degree factorization.
const EDF_SEED: u64 = 0x5eed_f00d_2024;

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    mod_pow(a, p - 2, p)
}

/// Reduces an integer into [0, p).
pub fn reduce_int(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Reduces a rational with denominator prime to p.
pub fn reduce_rational(q: &Q, p: u64) -> Result<u64> {
    let d = reduce_int(q.denom(), p);
    if d == 0 {
        return domain(format!("denominator of {q} divisible by {p}"));
    }
    Ok(mulm(reduce_int(q.numer(), p), inv_mod(d, p), p))
}

/// Polynomial over F_p, ascending coefficients in [0, p), no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_int_poly(f: &IntPoly, p: u64) -> Self {
        Self::new(p, f.coeffs().iter().map(|c| reduce_int(c, p)).collect())
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lc(), self.p);
        Self::new(self.p, self.c.iter().map(|&v| mulm(v, inv, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + self.p - o.coeff(i)) % self.p).collect())
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&v| mulm(v, k % self.p, self.p)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u128;
        let mut v = vec![0u128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = (v[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(self.p, v.into_iter().map(|x| x as u64).collect())
    }

    pub fn div_rem(&self, b: &Self) -> (Self, Self) {
        assert!(!b.is_zero(), "division by zero polynomial");
        let p = self.p;
        let db = b.deg();
        let Some(da) = self.degree() else {
            return (Self::zero(p), Self::zero(p));
        };
        if da < db {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(b.lc(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; da - db + 1];
        for k in (0..=da - db).rev() {
            let c = mulm(r[k + db], inv, p);
            if c == 0 {
                continue;
            }
            for (j, &bc) in b.c.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mulm(c, bc, p)) % p;
            }
            q[k] = c;
        }
        r.truncate(db);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, b: &Self) -> Self {
        self.div_rem(b).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.c.iter().enumerate().skip(1).map(|(i, &v)| mulm(v, i as u64 % self.p, self.p)).collect(),
        )
    }

    pub fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    /// self^e mod m.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &c| (mulm(acc, x, self.p) + c) % self.p)
    }

    /// Ordering used to index the factors of a polynomial: by degree, then
    /// by the coefficient vector read from the constant term upward.
    pub fn canonical_cmp(&self, o: &Self) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| self.c.cmp(&o.c))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ip = IntPoly::new(self.c.iter().map(|&v| BigInt::from(v)).collect());
        write!(f, "{ip}")
    }
}

/// Squarefree factorization of a monic polynomial (Yun's algorithm adapted to
/// characteristic p).
pub fn squarefree_factorization(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    let f = f.monic();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if !fac.is_one() {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.div_rem(&w).0;
        i += 1;
    }
    if !c.is_one() {
        // c is a polynomial in x^p; take its p-th root (Frobenius is the identity on F_p).
        let root = FpPoly::new(p, c.c.iter().step_by(p as usize).copied().collect());
        for (g, j) in squarefree_factorization(&root) {
            out.push((g, j * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree_factorization(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.monic();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut i = 1;
    let pb = BigUint::from(p);
    while rest.deg() >= 2 * i {
        h = h.pow_mod(&pb, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

/// Splits a monic squarefree product of irreducibles of common degree `d`.
pub fn equal_degree_factorization(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let p = f.p;
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    let exp = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.random_range(0..p)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + … + a^(2^(d−1))
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = t.mul_mod(&t, f);
                acc = acc.add(&t);
            }
            acc
        } else {
            a.pow_mod(&exp, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < n {
            let h = f.div_rem(&g).0;
            let mut out = equal_degree_factorization(&g, d, rng);
            out.extend(equal_degree_factorization(&h.monic(), d, rng));
            return out;
        }
    }
}

/// Irreducible factors of a monic polynomial over F_p with multiplicities,
/// sorted by [`FpPoly::canonical_cmp`].
pub fn factor_fp(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED ^ f.p);
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_factorization(f) {
        for (g, d) in distinct_degree_factorization(&sqf) {
            for h in equal_degree_factorization(&g, d, &mut rng) {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    out
}

/// Factorization of an integer polynomial modulo a prime p.
pub fn factor_mod_p(f: &IntPoly, p: u64) -> Result<Vec<(FpPoly, u32)>> {
    if !is_prime_u64(p) {
        return domain(format!("{p} is not prime"));
    }
    let fp = FpPoly::from_int_poly(f, p);
    if fp.is_zero() {
        return domain(format!("polynomial vanishes mod {p}"));
    }
    Ok(factor_fp(&fp))
}

pub fn is_irreducible(f: &FpPoly) -> bool {
    let Some(d) = f.degree() else { return false };
    if d == 0 {
        return false;
    }
    let fac = factor_fp(f);
    fac.len() == 1 && fac[0].1 == 1
}

/// The field F_p[x]/(g).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    modulus: FpPoly,
    f: usize,
}

/// Element of a [`FiniteField`]: coefficient vector of length f.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(pub Vec<u64>);

impl FiniteField {
    pub fn new(modulus: FpPoly) -> Result<Self> {
        let p = modulus.p;
        if !is_prime_u64(p) {
            return domain(format!("{p} is not prime"));
        }
        if !is_irreducible(&modulus) {
            return domain(format!("{modulus} is not irreducible mod {p}"));
        }
        let modulus = modulus.monic();
        let f = modulus.deg();
        Ok(FiniteField { p, modulus, f })
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(FpPoly::x(p))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn modulus(&self) -> &FpPoly {
        &self.modulus
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.f as u32)
    }

    /// Order as u64 when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    fn wrap(&self, poly: FpPoly) -> Fq {
        let mut v = poly.c;
        v.resize(self.f, 0);
        Fq(v)
    }

    fn unwrap(&self, x: &Fq) -> FpPoly {
        FpPoly::new(self.p, x.0.clone())
    }

    pub fn from_poly(&self, poly: &FpPoly) -> Fq {
        self.wrap(poly.rem(&self.modulus))
    }

    pub fn from_u64(&self, n: u64) -> Fq {
        self.wrap(FpPoly::new(self.p, vec![n % self.p]))
    }

    pub fn from_int(&self, n: &BigInt) -> Fq {
        self.from_u64(reduce_int(n, self.p))
    }

    pub fn zero(&self) -> Fq {
        Fq(vec![0; self.f])
    }

    pub fn one(&self) -> Fq {
        self.from_u64(1)
    }

    /// The class of x, a root of the modulus.
    pub fn generator(&self) -> Fq {
        self.from_poly(&FpPoly::x(self.p))
    }

    pub fn is_zero(&self, x: &Fq) -> bool {
        x.0.iter().all(|&v| v == 0)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % self.p).collect())
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        Fq(a.0.iter().zip(&b.0).map(|(x, y)| (x + self.p - y) % self.p).collect())
    }

    pub fn neg(&self, a: &Fq) -> Fq {
        Fq(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        if self.f == 1 {
            return Fq(vec![mulm(a.0[0], b.0[0], self.p)]);
        }
        self.wrap(self.unwrap(a).mul_mod(&self.unwrap(b), &self.modulus))
    }

    pub fn pow(&self, a: &Fq, e: &BigUint) -> Fq {
        if e.is_zero() {
            return self.one();
        }
        if self.f == 1 {
            if a.0[0] == 0 {
                return self.zero();
            }
            let e = (e % BigUint::from(self.p - 1)).to_u64().expect("fits");
            return Fq(vec![mod_pow(a.0[0], e, self.p)]);
        }
        self.wrap(self.unwrap(a).pow_mod(e, &self.modulus))
    }

    pub fn pow_u64(&self, a: &Fq, e: u64) -> Fq {
        if e == 0 {
            return self.one();
        }
        self.pow(a, &BigUint::from(e))
    }

    pub fn inv(&self, a: &Fq) -> Result<Fq> {
        if self.is_zero(a) {
            return domain("inverse of zero in a finite field");
        }
        Ok(self.pow(a, &(self.order() - BigUint::from(2u32))))
    }

    /// Quadratic character via a^((q−1)/2), with χ(0) = 0.
    pub fn chi(&self, a: &Fq) -> i32 {
        if self.is_zero(a) {
            return 0;
        }
        if self.p == 2 {
            return 1;
        }
        let e = (self.order() - BigUint::one()) / BigUint::from(2u32);
        let r = self.pow(a, &e);
        if r == self.one() {
            1
        } else {
            -1
        }
    }

    /// Element with base-p digit expansion `index`.
    pub fn element(&self, mut index: u64) -> Fq {
        let mut v = Vec::with_capacity(self.f);
        for _ in 0..self.f {
            v.push(index % self.p);
            index /= self.p;
        }
        Fq(v)
    }

    pub fn index_of(&self, x: &Fq) -> u64 {
        x.0.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    /// All elements in index order; errors beyond `limit`.
    pub fn elements(&self, limit: u64) -> Result<Vec<Fq>> {
        let q = self
            .order_u64()
            .filter(|&q| q <= limit)
            .ok_or_else(|| Error::Limit(format!("finite field of order {} too large to enumerate", self.order())))?;
        Ok((0..q).map(|i| self.element(i)).collect())
    }

    /// Representative integer of an element of a prime field.
    pub fn to_u64(&self, x: &Fq) -> Option<u64> {
        (self.f == 1 || x.0[1..].iter().all(|&v| v == 0)).then_some(x.0[0])
    }
}

/// Largest field order accepted by the enumerative routines.
pub const ENUMERATION_LIMIT: u64 = 50_000_000;

/// #E(F) for E: y² = x(x − s)(x + t), as |F| + 1 + Σ_x χ(x(x − s)(x + t)).
pub fn count_points_legendre(s: &Fq, t: &Fq, field: &FiniteField) -> Result<u64> {
    count_points_legendre_with(s, t, field, Execution::default())
}

pub fn count_points_legendre_with(
    s: &Fq,
    t: &Fq,
    field: &FiniteField,
    exec: Execution,
) -> Result<u64> {
    if field.is_zero(s) || field.is_zero(t) || field.is_zero(&field.add(s, t)) {
        return domain("singular Legendre cubic: need s, t, s + t nonzero");
    }
    let q = field
        .order_u64()
        .filter(|&q| q <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::Limit(format!("field of order {} too large for point counting", field.order())))?;
    let sums = par::map(exec, &par::chunks(exec, q as usize), |range| {
        let mut acc: i64 = 0;
        for i in range.clone() {
            let x = field.element(i as u64);
            let v = field.mul(&field.mul(&x, &field.sub(&x, s)), &field.add(&x, t));
            acc += field.chi(&v) as i64;
        }
        acc
    });
    let total = q as i64 + 1 + sums.iter().sum::<i64>();
    Ok(total as u64)
}

/// Brute-force count over all (x, y) pairs plus the point at infinity;
/// an oracle for [`count_points_legendre`] on small fields.
pub fn count_points_exhaustive(s: &Fq, t: &Fq, field: &FiniteField) -> Result<u64> {
    let elems = field.elements(40_000)?;
    let squares: std::collections::HashMap<Fq, u64> =
        elems.iter().fold(std::collections::HashMap::new(), |mut m, y| {
            *m.entry(field.mul(y, y)).or_insert(0) += 1;
            m
        });
    let mut count = 1;
    for x in &elems {
        let v = field.mul(&field.mul(x, &field.sub(x, s)), &field.add(x, t));
        count += squares.get(&v).copied().unwrap_or(0);
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_roots(f: &IntPoly, p: u64) -> Vec<u64> {
        let fp = FpPoly::from_int_poly(f, p);
        (0..p).filter(|&x| fp.eval(x) == 0).collect()
    }

    #[test]
    fn x2_plus_1() {
        let f = IntPoly::from_i64(&[1, 0, 1]);
        let fac = factor_mod_p(&f, 5).unwrap();
        assert_eq!(fac.len(), 2);
        assert_eq!(fac[0].0.coeffs(), &[2, 1]);
        assert_eq!(fac[1].0.coeffs(), &[3, 1]);
        assert_eq!(brute_roots(&f, 5), vec![2, 3]);
        let fac3 = factor_mod_p(&f, 3).unwrap();
        assert_eq!(fac3.len(), 1);
        assert_eq!(fac3[0].0.deg(), 2);
        assert!(factor_mod_p(&f, 4).is_err());
    }

    #[test]
    fn repeated_factors_and_char_2() {
        // (x+1)^4 (x^2+x+1) over F_2
        let a = FpPoly::new(2, vec![1, 1]);
        let b = FpPoly::new(2, vec![1, 1, 1]);
        let f = a.mul(&a).mul(&a).mul(&a).mul(&b);
        let fac = factor_fp(&f);
        assert_eq!(fac, vec![(a, 4), (b, 1)]);
    }

    #[test]
    fn legendre_small() {
        let f5 = FiniteField::prime_field(5).unwrap();
        let one = f5.one();
        assert_eq!(count_points_legendre(&one, &one, &f5).unwrap(), 8);
        assert_eq!(count_points_exhaustive(&one, &one, &f5).unwrap(), 8);
        assert!(count_points_legendre(&one, &f5.from_u64(4), &f5).is_err());
    }

    #[test]
    fn extension_field_arithmetic() {
        let g = FpPoly::new(3, vec![1, 0, 1]);
        let f9 = FiniteField::new(g).unwrap();
        let a = f9.generator();
        assert_eq!(f9.mul(&a, &a), f9.from_u64(2));
        let inv = f9.inv(&a).unwrap();
        assert_eq!(f9.mul(&a, &inv), f9.one());
        let s = f9.one();
        let t = f9.from_u64(1);
        assert_eq!(
            count_points_legendre(&s, &t, &f9).unwrap(),
            count_points_exhaustive(&s, &t, &f9).unwrap()
        );
    }
}
