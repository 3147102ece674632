//! Totally positive units, the resultant tower H_n^{(u)} and the R_K
//! certificate, narrow and ray class numbers, and units modulo 4.

mod rayclass;

pub use rayclass::{
    find_normalizing_unit, narrow_class_number, ray_class_number, theorem17_check, Modulus, NarrowClassReport,
    NormalizingUnit, RayClassReport, Theorem17Report,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::interval::RealInterval;
use crate::algebra::poly::{BiPoly, IntPoly};
use crate::algebra::resultant::resultant_in_x;
use crate::algebra::roots::{isolate_real_roots, RealRoot};
use crate::arith::{format_factored, largest_prime_divisor_below, ser_int, ser_ints};
use crate::error::{domain, Error, Result};
use crate::numfield::{FieldElement, NumberField};
use crate::par::{self, Execution};

/// Largest tower degree t^n computed by exact elimination.
pub const EXACT_TOWER_DEGREE: usize = 81;
/// Largest tower degree handled by the interval product.
pub const MAX_TOWER_DEGREE: usize = 1 << 20;

/// A unit u with its minimal polynomial H and real roots.
#[derive(Clone, Debug)]
pub struct UnitCertificate {
    field: String,
    d: usize,
    unit: FieldElement,
    min_poly: IntPoly,
    char_poly: IntPoly,
    totally_positive: bool,
    roots: Vec<RealRoot>,
}

/// Which polynomial of u starts the tower.
///
/// The characteristic polynomial of multiplication by u is H^m with
/// m = d/t; its tower values are the minimal-polynomial ones raised to m^n.
/// Both coincide when u generates K, and both give R_K the same prime
/// divisors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum TowerBase {
    MinimalPolynomial,
    #[default]
    CharacteristicPolynomial,
}

impl UnitCertificate {
    pub fn new(k: &NumberField, u: &FieldElement) -> Result<Self> {
        if !u.is_integral() {
            return domain(format!("{u} is not integral"));
        }
        let n = k.norm(u);
        if n.abs() != crate::arith::Q::one() {
            return domain(format!("{u} has norm {n}, not a unit"));
        }
        let h = k
            .element_min_poly(u)
            .to_int_exact()
            .ok_or_else(|| Error::Inconsistency(format!("minimal polynomial of the unit {u} is not integral")))?;
        let char_poly = k
            .charpoly(u)
            .to_int_exact()
            .ok_or_else(|| Error::Inconsistency(format!("characteristic polynomial of {u} is not integral")))?;
        let totally_positive = k.is_totally_positive(u)?;
        let roots = isolate_real_roots(&h)?;
        if roots.len() != h.deg() {
            return Err(Error::Inconsistency(format!("minimal polynomial {h} of a unit of a totally real field has non-real roots")));
        }
        Ok(UnitCertificate {
            field: k.label().to_string(),
            d: k.degree(),
            unit: u.clone(),
            min_poly: h,
            char_poly,
            totally_positive,
            roots,
        })
    }

    pub fn unit(&self) -> &FieldElement {
        &self.unit
    }

    /// H, the minimal polynomial of u over Q.
    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    /// Characteristic polynomial of multiplication by u, of degree d.
    pub fn char_poly(&self) -> &IntPoly {
        &self.char_poly
    }

    /// t = deg H.
    pub fn degree(&self) -> usize {
        self.min_poly.deg()
    }

    pub fn tower_poly(&self, base: TowerBase) -> &IntPoly {
        match base {
            TowerBase::MinimalPolynomial => &self.min_poly,
            TowerBase::CharacteristicPolynomial => &self.char_poly,
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.totally_positive
    }

    pub fn field_label(&self) -> &str {
        &self.field
    }
}

/// H_n(1) for one unit and one level, with the path(s) that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerValue {
    pub n: usize,
    /// t^n.
    pub degree: usize,
    #[serde(serialize_with = "ser_int")]
    pub value: BigInt,
    pub exact: bool,
    pub interval: bool,
}

/// H_1(1), …, H_{n_max}(1) for a totally positive unit, starting from the
/// characteristic polynomial.
pub fn h_tower(u: &UnitCertificate, n_max: usize, exec: Execution) -> Result<Vec<TowerValue>> {
    h_tower_with(u, n_max, TowerBase::default(), exec)
}

/// H_1(1), …, H_{n_max}(1) starting from the chosen polynomial.
///
/// H_1 = H and H_n = Res_X(H_{n−1}(X), X^t H(Y/X)); the roots of H_n are the
/// n-fold products of roots of H, so H_n(1) = Π (1 − u_{i1}⋯u_{in}). Levels of
/// degree at most [`EXACT_TOWER_DEGREE`] are computed both by elimination and
/// by the interval product, and must agree.
pub fn h_tower_with(u: &UnitCertificate, n_max: usize, base: TowerBase, exec: Execution) -> Result<Vec<TowerValue>> {
    if !u.totally_positive {
        return domain(format!("{} is not totally positive", u.unit));
    }
    if n_max == 0 || n_max > u.d / 2 {
        return domain(format!("tower depth must be between 1 and {} for degree {}", u.d / 2, u.d));
    }
    let h = u.tower_poly(base);
    let t = h.deg();
    let g = BiPoly::homogenize(h);
    let roots: Vec<RealRoot> = u.roots.iter().flat_map(|r| std::iter::repeat_n(r.clone(), t / u.degree())).collect();
    let mut out = Vec::with_capacity(n_max);
    let mut h_n = Some(h.clone());
    for n in 1..=n_max {
        let degree = t
            .checked_pow(n as u32)
            .filter(|&v| v <= MAX_TOWER_DEGREE)
            .ok_or_else(|| Error::Limit(format!("tower degree {t}^{n} is too large")))?;
        let exact = if degree <= EXACT_TOWER_DEGREE {
            let poly = if n == 1 {
                h.clone()
            } else {
                let prev = h_n.as_ref().expect("previous level is exact");
                resultant_in_x(prev, &g, exec)?
            };
            if poly.deg() != degree || !poly.is_monic() {
                return Err(Error::Inconsistency(format!("H_{n} has degree {} and leading coefficient {}", poly.deg(), poly.lc())));
            }
            let v = poly.eval(&BigInt::one());
            h_n = Some(poly);
            Some(v)
        } else {
            h_n = None;
            None
        };
        let approx = tower_value_by_intervals(&roots, n, exec)?;
        if let Some(v) = &exact {
            if *v != approx {
                return Err(Error::Inconsistency(format!("H_{n}(1): elimination gives {v}, root products give {approx}")));
            }
        }
        out.push(TowerValue { n, degree, value: approx, exact: exact.is_some(), interval: true });
    }
    Ok(out)
}

/// Π (1 − r_{i1}⋯r_{in}) over all n-tuples of roots, rounded to the unique
/// integer once the enclosure is narrower than 1/2.
pub fn tower_value_by_intervals(roots: &[RealRoot], n: usize, exec: Execution) -> Result<BigInt> {
    let t = roots.len();
    let total = t.pow(n as u32);
    let mut bits: u64 = 128;
    loop {
        let iv: Vec<RealInterval> = roots.iter().map(|r| r.refine(bits as i64 + 16).interval()).collect();
        let one = RealInterval::from_int(&BigInt::one());
        let parts = par::map(exec, &par::chunks(exec, total), |range| {
            let mut acc = one.clone();
            for idx in range.clone() {
                let mut prod = one.clone();
                let mut k = idx;
                for _ in 0..n {
                    prod = prod.mul_round(&iv[k % t], bits);
                    k /= t;
                }
                acc = acc.mul_round(&one.sub(&prod), bits);
            }
            acc
        });
        let value = parts.iter().fold(one.clone(), |a, b| a.mul_round(b, bits));
        if let Some(v) = value.unique_integer() {
            return Ok(v);
        }
        bits *= 2;
        if bits > 1 << 22 {
            return Err(Error::Limit(format!("H_{n}(1) did not resolve at {bits} bits")));
        }
    }
}

/// One level of the certificate: A_n = gcd of H_n^{(u)}(1) over the units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RkLevel {
    pub n: usize,
    #[serde(serialize_with = "ser_ints")]
    pub values: Vec<BigInt>,
    #[serde(serialize_with = "ser_int")]
    pub a_n: BigInt,
    pub factored: String,
    /// A_n ≠ 0.
    pub conclusive: bool,
    /// Some unit gave H_n(1) = 0 and so contributed nothing at this level.
    pub has_zero: bool,
}

/// A multiple of R_K = Π A_n built from a finite list of totally positive
/// units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RkCertificate {
    pub field: String,
    pub degree: usize,
    pub units: Vec<Vec<String>>,
    pub tower_polys: Vec<String>,
    pub base: TowerBase,
    pub levels: Vec<RkLevel>,
    #[serde(serialize_with = "ser_int")]
    pub r_multiple: BigInt,
    pub r_factored: String,
    pub conclusive: bool,
}

impl RkCertificate {
    /// p ∤ D_K·R_multiple, which is the divisibility hypothesis needed for
    /// irreducibility.
    pub fn certifies(&self, p: u64, disc: &BigInt) -> bool {
        let bp = BigInt::from(p);
        self.conclusive && !(&self.r_multiple * disc).is_multiple_of(&bp)
    }

    /// Largest prime divisor of R_multiple when all of them are at most
    /// `bound`, else `None`.
    pub fn largest_prime_divisor_below(&self, bound: u64) -> Option<u64> {
        if !self.conclusive {
            return None;
        }
        largest_prime_divisor_below(&self.r_multiple, bound)
    }
}

/// The R_K multiple over `units` for levels 1..=`depth` (default ⌊d/2⌋).
pub fn rk_multiple(k: &NumberField, units: &[UnitCertificate], depth: Option<usize>, exec: Execution) -> Result<RkCertificate> {
    if units.is_empty() {
        return domain("at least one totally positive unit is required");
    }
    let d = k.degree();
    let depth = depth.unwrap_or(d / 2);
    if depth == 0 || depth > d / 2 {
        return domain(format!("depth must be between 1 and {} for degree {d}", d / 2));
    }
    if let Some(u) = units.iter().find(|u| u.field != k.label()) {
        return domain(format!("unit {} belongs to {}, not {}", u.unit, u.field, k.label()));
    }
    let towers: Vec<Result<Vec<TowerValue>>> = par::map(exec, units, |u| h_tower(u, depth, exec));
    let towers: Vec<Vec<TowerValue>> = towers.into_iter().collect::<Result<_>>()?;
    let mut levels = Vec::with_capacity(depth);
    let mut r = BigInt::one();
    for n in 1..=depth {
        let values: Vec<BigInt> = towers.iter().map(|t| t[n - 1].value.clone()).collect();
        let a_n = values.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        r *= &a_n;
        levels.push(RkLevel {
            n,
            factored: format_factored(&a_n),
            conclusive: !a_n.is_zero(),
            has_zero: values.iter().any(Zero::is_zero),
            values,
            a_n,
        });
    }
    Ok(RkCertificate {
        field: k.label().to_string(),
        degree: d,
        units: units.iter().map(|u| u.unit.to_strings()).collect(),
        tower_polys: units.iter().map(|u| u.tower_poly(TowerBase::default()).to_string()).collect(),
        base: TowerBase::default(),
        conclusive: levels.iter().all(|l| l.conclusive),
        r_factored: format_factored(&r),
        levels,
        r_multiple: r,
    })
}

/// Certificates for the field's recorded tower units.
pub fn fixture_units(k: &NumberField) -> Result<Vec<UnitCertificate>> {
    if k.tower_units().is_empty() {
        return Err(Error::DataGap(format!("no totally positive units recorded for {}", k.label())));
    }
    k.tower_units().iter().map(|u| UnitCertificate::new(k, u)).collect()
}
