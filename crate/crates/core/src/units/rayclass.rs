use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::algebra::linalg::rank_mod_p;
use crate::error::{domain, Error, Result};
use crate::numfield::{FieldElement, NumberField, PrimeIdealData, QuotientRingMod4};

/// Largest group (O_K/m)^* that is enumerated.
pub const GROUP_LIMIT: u64 = 1_000_000;

/// Signs of −1 and the fundamental units as bit masks (bit i set when the
/// i-th embedding is negative).
fn sign_masks(k: &NumberField) -> Result<Vec<u32>> {
    let mut gens = vec![k.from_int(-1)];
    gens.extend(k.fundamental_units().iter().cloned());
    gens.iter()
        .map(|u| Ok(k.signs(u)?.iter().enumerate().fold(0u32, |m, (i, &s)| if s < 0 { m | 1 << i } else { m })))
        .collect()
}

fn unit_generators(k: &NumberField) -> Vec<FieldElement> {
    let mut gens = vec![k.from_int(-1)];
    gens.extend(k.fundamental_units().iter().cloned());
    gens
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NarrowClassReport {
    pub field: String,
    /// Sign vectors of −1, u_1, …, u_{d−1}.
    pub signs: Vec<Vec<i32>>,
    pub rank: usize,
    /// [U_K : U_K^+] = 2^rank.
    pub unit_index: u64,
    pub h_k: u64,
    pub h_plus: u64,
}

/// h_K^+ = 2^d·h_K / [U_K:U_K^+], the index read off the F_2-rank of the
/// sign map on −1 and the fundamental units.
pub fn narrow_class_number(k: &NumberField) -> Result<NarrowClassReport> {
    let d = k.degree();
    let gens = unit_generators(k);
    let signs: Vec<Vec<i32>> = gens.iter().map(|u| k.signs(u)).collect::<Result<_>>()?;
    let rows: Vec<Vec<u64>> = signs.iter().map(|s| s.iter().map(|&v| u64::from(v < 0)).collect()).collect();
    let rank = rank_mod_p(rows, 2);
    Ok(NarrowClassReport {
        field: k.label().to_string(),
        signs,
        rank,
        unit_index: 1 << rank,
        h_k: k.h_k(),
        h_plus: k.h_k() << (d - rank),
    })
}

/// Finite part of a modulus.
#[derive(Clone, Debug)]
pub enum Modulus {
    /// m = O_K.
    Trivial,
    Prime(PrimeIdealData),
    /// m = 4O_K.
    FourOk,
}

impl Modulus {
    pub fn describe(&self) -> String {
        match self {
            Modulus::Trivial => "O_K".into(),
            Modulus::Prime(q) => format!("prime above {} (f={}, factor #{})", q.p, q.f, q.factor_index),
            Modulus::FourOk => "4O_K".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayClassReport {
    pub field: String,
    pub modulus: String,
    pub all_infinite: bool,
    /// |(O_K/m)^*|.
    pub residue_units: u64,
    /// |(O_K/m)^* × {±1}^r|.
    pub group_order: u64,
    /// Order of the subgroup generated by the images of −1, u_1, …
    pub image_order: u64,
    pub h_k: u64,
    pub ray_class_number: u64,
}

/// Ray class number of m (times all infinite places when asked) in the
/// principal case: |(O_K/m)^* × {±1}^r|·h_K / |image of U_K|.
pub fn ray_class_number(k: &NumberField, modulus: &Modulus, all_infinite: bool) -> Result<RayClassReport> {
    if k.h_k() != 1 {
        return Err(Error::Unsupported(format!("ray class numbers need h_K = 1; {} has h_K = {}", k.label(), k.h_k())));
    }
    let d = k.degree();
    let gens = unit_generators(k);
    let masks = if all_infinite { sign_masks(k)? } else { vec![0; gens.len()] };
    let signs_order: u64 = if all_infinite { 1 << d } else { 1 };
    let ring;
    let (residue_units, keys, mul): (u64, Vec<u64>, Box<dyn Fn(u64, u64) -> u64 + '_>) = match modulus {
        Modulus::Trivial => (1, vec![0; gens.len()], Box::new(|_, _| 0)),
        Modulus::Prime(q) => {
            let n = q.norm_u64().filter(|&n| n <= GROUP_LIMIT).ok_or_else(|| {
                Error::Limit(format!("residue field of order {} above {} is too large", q.norm(), q.p))
            })?;
            let keys = gens
                .iter()
                .map(|u| Ok(q.residue_field.index_of(&k.reduce_mod_prime(u, q)?)))
                .collect::<Result<Vec<_>>>()?;
            let f = &q.residue_field;
            (n - 1, keys, Box::new(move |a, b| f.index_of(&f.mul(&f.element(a), &f.element(b)))))
        }
        Modulus::FourOk => {
            ring = QuotientRingMod4::new(k)?;
            let keys = gens.iter().map(|u| ring.reduce(u).map(u64::from)).collect::<Result<Vec<_>>>()?;
            let r = &ring;
            (r.unit_group_order() as u64, keys, Box::new(move |a, b| u64::from(r.mul(a as u32, b as u32))))
        }
    };
    let group_order = residue_units * signs_order;
    if residue_units > GROUP_LIMIT {
        return Err(Error::Limit(format!("(O_K/m)^* of order {residue_units} exceeds {GROUP_LIMIT}")));
    }
    let identity = match modulus {
        Modulus::Prime(q) => q.residue_field.index_of(&q.residue_field.one()),
        Modulus::FourOk => 1,
        Modulus::Trivial => 0,
    };
    let gen_pairs: Vec<(u64, u32)> = keys.into_iter().zip(masks).collect();
    let image_order = closure_size(identity, &gen_pairs, &*mul) as u64;
    if group_order % image_order != 0 {
        return Err(Error::Inconsistency(format!("unit image of order {image_order} in a group of order {group_order}")));
    }
    Ok(RayClassReport {
        field: k.label().to_string(),
        modulus: modulus.describe(),
        all_infinite,
        residue_units,
        group_order,
        image_order,
        h_k: 1,
        ray_class_number: group_order / image_order,
    })
}

/// Order of the subgroup of (O_K/m)^* × {±1}^r generated by `gens`.
///
/// Only the finite part is enumerated. Each reached residue keeps the sign
/// vector of the first path to it; the sign parts of closed loops span the
/// kernel of the projection, which is an F_2-space.
fn closure_size(identity: u64, gens: &[(u64, u32)], mul: &dyn Fn(u64, u64) -> u64) -> usize {
    let mut seen = HashMap::from([(identity, 0u32)]);
    let mut queue = VecDeque::from([identity]);
    let mut kernel: Vec<u32> = Vec::new();
    while let Some(a) = queue.pop_front() {
        let s = seen[&a];
        for &(g, m) in gens {
            let b = mul(a, g);
            match seen.get(&b) {
                Some(&t) => reduce_into(&mut kernel, s ^ m ^ t),
                None => {
                    seen.insert(b, s ^ m);
                    queue.push_back(b);
                }
            }
        }
    }
    seen.len() << kernel.len()
}

/// Adds `v` to an echelon basis over F_2 kept sorted by leading bit.
fn reduce_into(basis: &mut Vec<u32>, mut v: u32) {
    for &b in basis.iter() {
        v = v.min(v ^ b);
    }
    if v != 0 {
        basis.push(v);
        basis.sort_unstable_by(|a, b| b.cmp(a));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem17Report {
    pub field: String,
    pub degree: usize,
    pub two_totally_ramified: bool,
    pub h_k: u64,
    pub h_plus: u64,
    /// |G| for G = (O_K/4O_K)^*.
    pub g_order: usize,
    pub unit_image_order: usize,
    pub units_surject: bool,
    pub g_mod_squares_order: usize,
    pub spans_mod_squares: bool,
    /// K = K^{4O_K}: h_K = 1 and the units surject onto G.
    pub ray_class_field_trivial: bool,
    /// With 2 totally ramified: (h^+ = 1) ⟺ (K = K^{4O_K}).
    pub corollary_holds: Option<bool>,
    pub verdict: bool,
}

/// Checks the hypotheses and both sides of the equivalence
/// h^+ = 1 ⟺ K = K^{4O_K} for a field in which 2 is totally ramified.
pub fn theorem17_check(k: &NumberField) -> Result<Theorem17Report> {
    let narrow = narrow_class_number(k)?;
    let ring = QuotientRingMod4::new(k)?;
    let images: Vec<u32> = unit_generators(k).iter().map(|u| ring.reduce(u)).collect::<Result<_>>()?;
    let image_order = ring.subgroup_order(&images);
    let surject = image_order == ring.unit_group_order();
    let spans = ring.spans_mod_squares(&images);
    let trivial = k.h_k() == 1 && surject;
    let tot = k.two_totally_ramified();
    let corollary = tot.then_some((narrow.h_plus == 1) == trivial);
    if tot && surject != spans {
        return Err(Error::Inconsistency(format!(
            "{}: units generate G is {surject} but span G/G^2 is {spans}; G should be a 2-group",
            k.label()
        )));
    }
    Ok(Theorem17Report {
        field: k.label().to_string(),
        degree: k.degree(),
        two_totally_ramified: tot,
        h_k: k.h_k(),
        h_plus: narrow.h_plus,
        g_order: ring.unit_group_order(),
        unit_image_order: image_order,
        units_surject: surject,
        g_mod_squares_order: ring.quotient_by_squares_order(),
        spans_mod_squares: spans,
        ray_class_field_trivial: trivial,
        corollary_holds: corollary,
        verdict: tot && narrow.h_plus == 1 && trivial,
    })
}

/// ε in the unit group with ε^{-1} ≡ −a (mod 4O_K), as a product of −1 and
/// the fundamental units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizingUnit {
    pub epsilon: FieldElement,
    /// Exponents of (−1, u_1, …, u_{d−1}).
    pub exponents: Vec<u64>,
}

/// Breadth-first search through the unit image in G for ε ≡ (−a)^{-1}.
pub fn find_normalizing_unit(k: &NumberField, a: &FieldElement) -> Result<NormalizingUnit> {
    let ring = QuotientRingMod4::new(k)?;
    let ra = ring.reduce(a)?;
    if !ring.is_unit(ra) {
        return domain(format!("{a} is not coprime to 2"));
    }
    let target = ring.inverse(ring.neg(ra))?;
    let gens = unit_generators(k);
    let images: Vec<u32> = gens.iter().map(|u| ring.reduce(u)).collect::<Result<_>>()?;
    let mut found: HashMap<u32, Vec<u64>> = HashMap::from([(ring.one(), vec![0; gens.len()])]);
    let mut queue = VecDeque::from([ring.one()]);
    while let Some(x) = queue.pop_front() {
        if x == target {
            break;
        }
        let ex = found[&x].clone();
        for (i, &g) in images.iter().enumerate() {
            let y = ring.mul(x, g);
            if !found.contains_key(&y) {
                let mut e = ex.clone();
                e[i] += 1;
                found.insert(y, e);
                queue.push_back(y);
            }
        }
    }
    let exponents = found.get(&target).cloned().ok_or_else(|| {
        Error::Inconsistency(format!("no unit is congruent to (−a)^-1 mod 4 in {}; units do not surject onto G", k.label()))
    })?;
    let epsilon = gens.iter().zip(&exponents).fold(k.one(), |acc, (u, &e)| k.mul(&acc, &k.pow(u, e)));
    let check = ring.mul(ring.reduce(&epsilon)?, ring.neg(ra));
    if check != ring.one() {
        return Err(Error::Inconsistency("normalizing unit fails ε·(−a) ≡ 1 mod 4".into()));
    }
    Ok(NormalizingUnit { epsilon, exponents })
}
