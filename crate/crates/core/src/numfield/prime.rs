//! Primes of O_K: Dedekind factorization off the index, reduction into
//! residue fields, and an index-free ramification test on O_K/pO_K.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::ffield::{factor_mod_p, reduce_rational, FiniteField, FpPoly, Fq};
use crate::algebra::linalg::{mat_mul_mod_p, rank_mod_p};
use crate::arith::is_prime_u64;
use crate::error::{domain, Error, Result};
use crate::numfield::{FieldElement, NumberField};

/// A prime 𝔮 | p of O_K with pO_K = Π 𝔮^e, found by Dedekind's criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdealData {
    pub p: u64,
    pub e: u32,
    pub f: usize,
    /// Position in the factor list of the minimal polynomial mod p, which is
    /// ordered by degree and then by coefficients from the constant term up.
    pub factor_index: usize,
    pub gen_poly: FpPoly,
    pub residue_field: FiniteField,
}

impl PrimeIdealData {
    /// Norm(𝔮) = p^f.
    pub fn norm(&self) -> BigUint {
        BigUint::from(self.p).pow(self.f as u32)
    }

    pub fn norm_u64(&self) -> Option<u64> {
        self.norm().to_u64()
    }
}

/// Number of primes above p and the sum of their residue degrees, read off
/// the F_p-algebra O_K/pO_K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionShape {
    pub primes: usize,
    pub sum_f: usize,
}

impl DecompositionShape {
    pub fn is_totally_ramified(&self, d: usize) -> bool {
        self.primes == 1 && (self.sum_f == 1 || d == 1)
    }
}

impl NumberField {
    /// Factorization of pO_K by Dedekind's criterion.
    pub fn dedekind_factor(&self, p: u64) -> Result<Vec<PrimeIdealData>> {
        if !is_prime_u64(p) {
            return domain(format!("{p} is not prime"));
        }
        if (self.index() % BigInt::from(p)).is_zero() {
            return Err(Error::IndexObstruction { p });
        }
        let fac = factor_mod_p(self.min_poly(), p)?;
        let mut out = Vec::with_capacity(fac.len());
        for (i, (g, e)) in fac.into_iter().enumerate() {
            let field = FiniteField::new(g.clone())?;
            out.push(PrimeIdealData { p, e, f: g.deg(), factor_index: i, gen_poly: g, residue_field: field });
        }
        let total: usize = out.iter().map(|q| q.e as usize * q.f).sum();
        if total != self.degree() {
            return Err(Error::Inconsistency(format!("sum of e*f above {p} is {total}, expected {}", self.degree())));
        }
        Ok(out)
    }

    /// The prime above p with the given position in [`Self::dedekind_factor`].
    pub fn prime_by_index(&self, p: u64, index: usize) -> Result<PrimeIdealData> {
        self.dedekind_factor(p)?
            .into_iter()
            .nth(index)
            .ok_or_else(|| Error::Invalid(format!("no prime #{index} above {p} in {}", self.label())))
    }

    /// Image of x in O_K/𝔮 under α ↦ (root of the Dedekind factor).
    pub fn reduce_mod_prime(&self, x: &FieldElement, q: &PrimeIdealData) -> Result<Fq> {
        let px = self.to_power_basis(x);
        let mut c = Vec::with_capacity(px.coeffs().len());
        for v in px.coeffs() {
            match reduce_rational(v, q.p) {
                Ok(r) => c.push(r),
                Err(_) => return domain(format!("{x} is not integral at a prime above {}", q.p)),
            }
        }
        Ok(q.residue_field.from_poly(&FpPoly::new(q.p, c)))
    }

    /// Number of primes above p and Σ f, valid even when p divides the index.
    ///
    /// Frobenius x ↦ x^p is F_p-linear on A = O_K/pO_K. Its fixed space has
    /// dimension equal to the number of local factors of A, and a high power
    /// of it kills the nilradical, leaving rank Σ f.
    pub fn decomposition_shape(&self, p: u64) -> DecompositionShape {
        let d = self.degree();
        let mult = self.structure_constants();
        let red: Vec<Vec<Vec<u64>>> = mult
            .iter()
            .map(|a| a.iter().map(|b| b.iter().map(|c| crate::algebra::ffield::reduce_int(c, p)).collect()).collect())
            .collect();
        let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
            let mut out = vec![0u64; d];
            for i in 0..d {
                if x[i] == 0 {
                    continue;
                }
                for j in 0..d {
                    if y[j] == 0 {
                        continue;
                    }
                    let c = (x[i] as u128 * y[j] as u128 % p as u128) as u64;
                    for k in 0..d {
                        out[k] = ((out[k] as u128 + c as u128 * red[i][j][k] as u128) % p as u128) as u64;
                    }
                }
            }
            out
        };
        let one = self.one().int_coords().expect("1 is integral");
        let one: Vec<u64> = one.iter().map(|c| crate::algebra::ffield::reduce_int(c, p)).collect();
        let frob: Vec<Vec<u64>> = (0..d)
            .map(|i| {
                let mut w = vec![0u64; d];
                w[i] = 1;
                let mut acc = one.clone();
                let mut base = w;
                let mut e = p;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = mul(&acc, &base);
                    }
                    e >>= 1;
                    if e > 0 {
                        base = mul(&base, &base);
                    }
                }
                acc
            })
            .collect();
        let mut shifted = frob.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = (row[i] + p - 1) % p;
        }
        let primes = d - rank_mod_p(shifted, p);
        let mut power = frob.clone();
        for _ in 1..d {
            power = mat_mul_mod_p(&power, &frob, p);
        }
        DecompositionShape { primes, sum_f: rank_mod_p(power, p) }
    }

    /// Is p totally ramified, i.e. pO_K = 𝔮^d?
    pub fn is_totally_ramified(&self, p: u64) -> bool {
        self.decomposition_shape(p).is_totally_ramified(self.degree())
    }
}
