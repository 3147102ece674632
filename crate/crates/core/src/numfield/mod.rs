//! Totally real number fields given by a monic polynomial and a trusted
//! integral basis. Elements are rational coordinate vectors over that basis.

mod mod4;
mod prime;

pub use mod4::QuotientRingMod4;
pub use prime::{DecompositionShape, PrimeIdealData};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::ffield::factor_mod_p;
use crate::algebra::interval::RealInterval;
use crate::algebra::linalg::{q_det, q_inverse, q_vec_mat, QMatrix};
use crate::algebra::poly::{IntPoly, RatPoly};
use crate::algebra::resultant::resultant;
use crate::algebra::roots::{count_real_roots, isolate_real_roots, RealRoot};
use crate::arith::{format_rational, is_prime_u64, parse_int, parse_rational, primes_below, valuation_q, Q};
use crate::data_io::FieldDescriptor;
use crate::error::{domain, Error, Result};

/// Coordinates over the integral basis of the owning field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<Q>,
}

impl FieldElement {
    pub fn new(coords: Vec<Q>) -> Self {
        FieldElement { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        FieldElement { coords: coords.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect() }
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Integer coordinates, if integral.
    pub fn int_coords(&self) -> Option<Vec<BigInt>> {
        self.is_integral().then(|| self.coords.iter().map(|c| c.to_integer()).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    pub fn parse(coords: &[String]) -> Result<Self> {
        Ok(FieldElement { coords: coords.iter().map(|s| parse_rational(s)).collect::<Result<_>>()? })
    }
}

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter().map(format_rational))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_strings().join(", "))
    }
}

/// A totally real number field with a verified integral basis.
#[derive(Clone, Debug)]
pub struct NumberField {
    label: String,
    min_poly: IntPoly,
    d: usize,
    basis: QMatrix,
    basis_inv: QMatrix,
    disc: BigInt,
    h_k: u64,
    fundamental_units: Vec<FieldElement>,
    tower_units: Vec<FieldElement>,
    /// w_i·w_j = Σ_k mult[i][j][k]·w_k.
    mult: Vec<Vec<Vec<BigInt>>>,
    index: BigInt,
    roots: Vec<RealRoot>,
    two_totally_ramified: bool,
}

/// Raw inputs for [`NumberField::new`].
#[derive(Clone, Debug)]
pub struct FieldData {
    pub label: String,
    pub min_poly: IntPoly,
    pub integral_basis: QMatrix,
    pub disc: BigInt,
    pub h_k: u64,
    pub fundamental_units: Vec<FieldElement>,
    pub tower_units: Vec<FieldElement>,
}

impl NumberField {
    /// Builds and verifies a field. Every failed check is reported as
    /// [`Error::Invalid`] naming the invariant.
    pub fn new(data: FieldData) -> Result<Self> {
        let FieldData { label, min_poly, integral_basis, disc, h_k, fundamental_units, tower_units } = data;
        let bad = |msg: String| Error::Invalid(format!("{label}: {msg}"));
        if min_poly.degree().unwrap_or(0) == 0 || !min_poly.is_monic() {
            return Err(bad("minimal polynomial must be monic of positive degree".into()));
        }
        let d = min_poly.deg();
        if !certify_irreducible(&min_poly) {
            return Err(bad(format!("could not certify irreducibility of {min_poly}")));
        }
        if count_real_roots(&min_poly) != d {
            return Err(bad(format!("{min_poly} is not totally real")));
        }
        if integral_basis.len() != d || integral_basis.iter().any(|r| r.len() != d) {
            return Err(bad("integral basis must be a d x d matrix".into()));
        }
        let basis_inv = q_inverse(&integral_basis).ok_or_else(|| bad("integral basis is singular".into()))?;
        let basis_polys: Vec<RatPoly> = integral_basis.iter().map(|r| RatPoly::new(r.clone())).collect();
        let f = min_poly.to_rat();
        let mut mult = vec![vec![vec![BigInt::zero(); d]; d]; d];
        for i in 0..d {
            for j in i..d {
                let prod = basis_polys[i].mul_mod(&basis_polys[j], &f);
                let c = to_basis_coords(&prod, d, &basis_inv);
                for k in 0..d {
                    if !c[k].is_integer() {
                        return Err(bad("basis is not closed under multiplication".into()));
                    }
                    mult[i][j][k] = c[k].to_integer();
                    mult[j][i][k] = c[k].to_integer();
                }
            }
        }
        let poly_disc = polynomial_discriminant(&min_poly)?;
        let roots = isolate_real_roots(&min_poly)?;
        let mut k = NumberField {
            label: label.clone(),
            min_poly,
            d,
            basis: integral_basis,
            basis_inv,
            disc: disc.clone(),
            h_k,
            fundamental_units: vec![],
            tower_units: vec![],
            mult,
            index: BigInt::one(),
            roots,
            two_totally_ramified: false,
        };
        let computed = k.basis_discriminant();
        if computed != disc {
            return Err(bad(format!("discriminant of the basis is {computed}, claimed {disc}")));
        }
        let (q, r) = poly_disc.div_rem(&disc);
        if !r.is_zero() || q.is_negative() || q.sqrt().pow(2) != q {
            return Err(bad(format!("disc(f) / D_K = {poly_disc}/{disc} is not a square")));
        }
        k.index = q.sqrt();
        for (n, u) in fundamental_units.iter().chain(&tower_units).enumerate() {
            if u.coords.len() != d || !u.is_integral() {
                return Err(bad(format!("unit #{n} is not an integral element of length {d}")));
            }
            let nm = k.norm(u);
            if nm.abs() != Q::one() {
                return Err(bad(format!("unit #{n} has norm {}", format_rational(&nm))));
            }
        }
        for (i, u) in fundamental_units.iter().enumerate() {
            if u == &k.one() || u == &k.neg(&k.one()) || fundamental_units[..i].contains(u) {
                return Err(bad(format!("fundamental unit #{i} is torsion or repeated")));
            }
        }
        if fundamental_units.len() != d - 1 {
            return Err(bad(format!("expected {} fundamental units, got {}", d - 1, fundamental_units.len())));
        }
        k.fundamental_units = fundamental_units;
        k.tower_units = tower_units;
        k.two_totally_ramified = k.decomposition_shape(2).is_totally_ramified(d);
        Ok(k)
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<Self> {
        let coeffs: Vec<BigInt> = desc.min_poly.iter().map(|s| parse_int(s)).collect::<Result<_>>()?;
        let basis: QMatrix = desc
            .integral_basis
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let units = |v: &[Vec<String>]| v.iter().map(|u| FieldElement::parse(u)).collect::<Result<Vec<_>>>();
        NumberField::new(FieldData {
            label: desc.label.clone(),
            min_poly: IntPoly::new(coeffs),
            integral_basis: basis,
            disc: parse_int(&desc.disc)?,
            h_k: desc.h_k,
            fundamental_units: units(&desc.fundamental_units)?,
            tower_units: units(&desc.tower_units)?,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn h_k(&self) -> u64 {
        self.h_k
    }

    /// [O_K : Z[α]].
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn integral_basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn fundamental_units(&self) -> &[FieldElement] {
        &self.fundamental_units
    }

    /// Always [−1]: a totally real field has no other roots of unity.
    pub fn torsion_units(&self) -> Vec<FieldElement> {
        vec![self.neg(&self.one())]
    }

    /// The units used for the resultant tower, as recorded in the fixture.
    pub fn tower_units(&self) -> &[FieldElement] {
        &self.tower_units
    }

    pub fn two_totally_ramified(&self) -> bool {
        self.two_totally_ramified
    }

    pub(crate) fn structure_constants(&self) -> &[Vec<Vec<BigInt>>] {
        &self.mult
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![Q::zero(); self.d] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(&Q::one())
    }

    pub fn from_rational(&self, q: &Q) -> FieldElement {
        self.from_power_basis(&RatPoly::constant(q.clone()))
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(&Q::from_integer(BigInt::from(n)))
    }

    /// The root α of the defining polynomial.
    pub fn generator(&self) -> FieldElement {
        self.from_power_basis(&RatPoly::new(vec![Q::zero(), Q::one()]))
    }

    /// Element given as a polynomial in α.
    pub fn from_power_basis(&self, p: &RatPoly) -> FieldElement {
        let r = p.rem(&self.min_poly.to_rat());
        FieldElement { coords: to_basis_coords(&r, self.d, &self.basis_inv) }
    }

    /// The polynomial in α representing x, of degree < d.
    pub fn to_power_basis(&self, x: &FieldElement) -> RatPoly {
        RatPoly::new(q_vec_mat(&x.coords, &self.basis))
    }

    fn check(&self, x: &FieldElement) {
        assert_eq!(x.coords.len(), self.d, "element of the wrong field");
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        FieldElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        FieldElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, x: &FieldElement, k: &Q) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        let d = self.d;
        let mut out = vec![Q::zero(); d];
        for i in 0..d {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y.coords[j].is_zero() {
                    continue;
                }
                let c = &x.coords[i] * &y.coords[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let m = &self.mult[i][j][k];
                    if !m.is_zero() {
                        *o += &c * Q::from_integer(m.clone());
                    }
                }
            }
        }
        FieldElement { coords: out }
    }

    pub fn pow(&self, x: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// x^e for any integer e; x must be nonzero when e < 0.
    pub fn pow_i64(&self, x: &FieldElement, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(x, e as u64))
        } else {
            Ok(self.pow(&self.inverse(x)?, e.unsigned_abs()))
        }
    }

    /// Matrix of y ↦ x·y: row i holds the coordinates of x·w_i.
    pub fn mul_matrix(&self, x: &FieldElement) -> QMatrix {
        self.check(x);
        let d = self.d;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|k| {
                        (0..d).fold(Q::zero(), |acc, j| {
                            if x.coords[j].is_zero() || self.mult[j][i][k].is_zero() {
                                acc
                            } else {
                                acc + &x.coords[j] * Q::from_integer(self.mult[j][i][k].clone())
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn inverse(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return domain("inversion of zero");
        }
        let inv = q_inverse(&self.mul_matrix(x)).ok_or_else(|| Error::Inconsistency("nonzero element with singular multiplication matrix".into()))?;
        Ok(FieldElement { coords: q_vec_mat(&self.one().coords, &inv) })
    }

    pub fn norm(&self, x: &FieldElement) -> Q {
        q_det(&self.mul_matrix(x))
    }

    pub fn trace(&self, x: &FieldElement) -> Q {
        let m = self.mul_matrix(x);
        (0..self.d).fold(Q::zero(), |acc, i| acc + &m[i][i])
    }

    /// Characteristic polynomial of multiplication by x (Faddeev–LeVerrier).
    pub fn charpoly(&self, x: &FieldElement) -> RatPoly {
        charpoly(&self.mul_matrix(x))
    }

    /// Minimal polynomial of x over Q, monic.
    pub fn element_min_poly(&self, x: &FieldElement) -> RatPoly {
        let c = self.charpoly(x);
        let g = c.gcd(&c.derivative());
        c.div_rem(&g).0.monic()
    }

    fn basis_discriminant(&self) -> BigInt {
        let d = self.d;
        let tr: Vec<BigInt> = (0..d).map(|k| (0..d).map(|i| self.mult[k][i][i].clone()).sum()).collect();
        let m: QMatrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| Q::from_integer((0..d).map(|k| &self.mult[i][j][k] * &tr[k]).sum()))
                    .collect()
            })
            .collect();
        q_det(&m).to_integer()
    }

    /// The d real embeddings of x, enclosed to roughly `bits` bits.
    pub fn embeddings(&self, x: &FieldElement, bits: u64) -> Vec<RealInterval> {
        let p = self.to_power_basis(x);
        self.roots
            .iter()
            .map(|r| r.refine(bits as i64 + 8).interval().eval_rat_poly(&p, bits + 16))
            .collect()
    }

    /// Sign of x in each real embedding, refining until every sign is certain.
    pub fn signs(&self, x: &FieldElement) -> Result<Vec<i32>> {
        if x.is_zero() {
            return domain("sign of zero");
        }
        let p = self.to_power_basis(x);
        let mut out = Vec::with_capacity(self.d);
        for r in &self.roots {
            let mut bits = 64u64;
            loop {
                let iv = r.refine(bits as i64).interval().eval_rat_poly(&p, bits + 16);
                match iv.sign() {
                    Some(s) if s != 0 => {
                        out.push(s);
                        break;
                    }
                    _ => {}
                }
                bits *= 2;
                if bits > 1 << 22 {
                    return Err(Error::Limit("embedding sign unresolved".into()));
                }
            }
        }
        Ok(out)
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool> {
        Ok(self.signs(x)?.iter().all(|&s| s > 0))
    }

    /// v_𝓛(x) for the unique prime 𝓛 above 2, read off v_2(Norm x).
    pub fn v_l(&self, x: &FieldElement) -> Result<i64> {
        if !self.two_totally_ramified {
            return Err(Error::Unsupported(format!("2 is not totally ramified in {}", self.label)));
        }
        if x.is_zero() {
            return domain("valuation of zero");
        }
        Ok(valuation_q(&self.norm(x), 2))
    }

    /// Is the ideal (x) supported at 𝓛 only, i.e. x an 𝓛-unit?
    pub fn is_l_unit(&self, x: &FieldElement) -> Result<bool> {
        if !self.two_totally_ramified {
            return Err(Error::Unsupported(format!("2 is not totally ramified in {}", self.label)));
        }
        if x.is_zero() {
            return Ok(false);
        }
        // 2^m·x is integral for m large enough; its norm is ±2^k exactly when
        // (2^m x) is a power of 𝓛, because (2) = 𝓛^d.
        let den = x.denominator();
        let m = crate::arith::valuation(&den, 2);
        if den != BigInt::one() << m as usize {
            return Ok(false);
        }
        let y = self.scale(x, &Q::from_integer(BigInt::one() << m as usize));
        let n = self.norm(&y).to_integer().abs();
        Ok(n.magnitude().count_ones() == 1)
    }

    /// Index of the lattice x_1·O_K + … + x_n·O_K in O_K; 1 exactly when
    /// the ideals generated by the x_i are coprime.
    pub fn ideal_sum_index(&self, xs: &[FieldElement]) -> Result<BigInt> {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(xs.len() * self.d);
        for x in xs {
            if !x.is_integral() {
                return domain(format!("{x} is not integral"));
            }
            for r in self.mul_matrix(x) {
                rows.push(r.iter().map(|q| q.to_integer()).collect());
            }
        }
        Ok(lattice_index(rows, self.d))
    }

    pub fn coprime(&self, xs: &[FieldElement]) -> Result<bool> {
        Ok(self.ideal_sum_index(xs)?.is_one())
    }
}

fn to_basis_coords(p: &RatPoly, d: usize, basis_inv: &QMatrix) -> Vec<Q> {
    let v: Vec<Q> = (0..d).map(|i| p.coeff(i)).collect();
    q_vec_mat(&v, basis_inv)
}

/// Characteristic polynomial det(X·I − M) of a rational matrix.
pub fn charpoly(m: &QMatrix) -> RatPoly {
    let n = m.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut mk: QMatrix = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{n−k+1}·I
        let mut next = mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = next;
        let am = mat_mul(m, &mk);
        let tr = (0..n).fold(Q::zero(), |acc, i| acc + &am[i][i]);
        c[n - k] = -tr / Q::from_integer(BigInt::from(k));
    }
    RatPoly::new(c)
}

fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Q::zero(), |acc, k| if a[i][k].is_zero() { acc } else { acc + &a[i][k] * &b[k][j] }))
                .collect()
        })
        .collect()
}

/// disc(f) = (−1)^{d(d−1)/2} Res(f, f′) for monic f.
pub fn polynomial_discriminant(f: &IntPoly) -> Result<BigInt> {
    let d = f.deg();
    if d == 1 {
        return Ok(BigInt::one());
    }
    let r = resultant(f, &f.derivative())?;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -r } else { r })
}

/// Irreducibility over Q from factorization patterns modulo several primes:
/// a proper rational factor of degree k forces k to be a sum of local factor
/// degrees at every good prime.
pub fn certify_irreducible(f: &IntPoly) -> bool {
    let d = f.deg();
    if d <= 1 {
        return d == 1;
    }
    let Ok(disc) = polynomial_discriminant(f) else { return false };
    if disc.is_zero() {
        return false;
    }
    let mut possible = vec![true; d + 1];
    for p in primes_below(20_000) {
        if !is_prime_u64(p) || (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        let Ok(fac) = factor_mod_p(f, p) else { continue };
        let mut sums = vec![false; d + 1];
        sums[0] = true;
        for (g, e) in &fac {
            for _ in 0..*e {
                let k = g.deg();
                for s in (k..=d).rev() {
                    if sums[s - k] {
                        sums[s] = true;
                    }
                }
            }
        }
        for k in 1..d {
            possible[k] &= sums[k];
        }
        if (1..d).all(|k| !possible[k]) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn power_basis_field(coeffs: &[i64], disc: i64, units: Vec<FieldElement>) -> NumberField {
        let f = IntPoly::from_i64(coeffs);
        let d = f.deg();
        let basis = (0..d).map(|i| (0..d).map(|j| if i == j { rat(1) } else { rat(0) }).collect()).collect();
        NumberField::new(FieldData {
            label: "test".into(),
            min_poly: f,
            integral_basis: basis,
            disc: BigInt::from(disc),
            h_k: 1,
            fundamental_units: units,
            tower_units: vec![],
        })
        .unwrap()
    }

    #[test]
    fn norms_and_inverses() {
        let k = power_basis_field(&[1, -3, -1, 1], 148, vec![FieldElement::from_ints(&[0, 1, 0]), FieldElement::from_ints(&[2, 0, -1])]);
        let a = k.generator();
        assert_eq!(k.norm(&a), rat(-1));
        assert_eq!(k.norm(&k.one()), rat(1));
        let x = FieldElement::from_ints(&[3, -1, 2]);
        let y = FieldElement::from_ints(&[-5, 0, 7]);
        assert_eq!(k.norm(&k.mul(&x, &y)), k.norm(&x) * k.norm(&y));
        let xi = k.inverse(&x).unwrap();
        assert_eq!(k.mul(&x, &xi), k.one());
        assert!(k.inverse(&k.zero()).is_err());
        assert_eq!(k.charpoly(&a).primitive_int(), IntPoly::from_i64(&[1, -3, -1, 1]));
    }

    #[test]
    fn irreducibility() {
        assert!(certify_irreducible(&IntPoly::from_i64(&[2, -32, 0, 1])));
        let reducible = &IntPoly::from_i64(&[-2, 0, 1]) * &IntPoly::from_i64(&[1, 1, 1]);
        assert!(!certify_irreducible(&reducible));
    }
}

/// |Z^d / L| for the lattice L spanned by `rows`, or 0 if L has lower rank.
fn lattice_index(mut rows: Vec<Vec<BigInt>>, d: usize) -> BigInt {
    let mut det = BigInt::one();
    let mut top = 0;
    for col in 0..d {
        // Euclid on the column until a single nonzero entry remains.
        loop {
            let nz: Vec<usize> = (top..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.is_empty() {
                return BigInt::zero();
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).expect("nonempty");
            rows.swap(top, piv);
            if nz.len() == 1 && nz[0] == piv {
                break;
            }
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[top][col]);
                for j in col..d {
                    let v = &q * &rows[top][j];
                    rows[i][j] -= v;
                }
            }
        }
        det *= rows[top][col].abs();
        top += 1;
    }
    det
}
