//! The finite ring O_K/4O_K and its unit group G.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::algebra::linalg::rank_mod_p;
use crate::error::{domain, Error, Result};
use crate::numfield::{FieldElement, NumberField};

/// Largest degree accepted: 4^8 = 65536 residues.
pub const MAX_DEGREE: usize = 8;

/// O_K/4O_K with elements packed two bits per coordinate.
#[derive(Clone, Debug)]
pub struct QuotientRingMod4 {
    d: usize,
    /// w_i·w_j mod 4, coordinates packed.
    table: Vec<Vec<u32>>,
    is_unit: Vec<bool>,
    units: Vec<u32>,
    generators: Vec<u32>,
}

impl QuotientRingMod4 {
    pub fn new(k: &NumberField) -> Result<Self> {
        let d = k.degree();
        if d > MAX_DEGREE {
            return Err(Error::Unsupported(format!("O_K/4O_K enumeration needs d <= {MAX_DEGREE}, got {d}")));
        }
        let mult = k.structure_constants();
        let table: Vec<Vec<u32>> = (0..d)
            .map(|i| (0..d).map(|j| pack(&mult[i][j].iter().map(mod4).collect::<Vec<_>>())).collect())
            .collect();
        let mut ring = QuotientRingMod4 { d, table, is_unit: vec![], units: vec![], generators: vec![] };
        // x is a unit mod 4 iff it is a unit mod 2 iff multiplication by x
        // is invertible on O_K/2O_K.
        let size = 1usize << (2 * d);
        let mut unit_mod2 = vec![false; 1 << d];
        for r in 0..(1u32 << d) {
            let x = spread(r, d);
            let m: Vec<Vec<u64>> = (0..d)
                .map(|i| {
                    let mut w = vec![0u8; d];
                    w[i] = 1;
                    unpack(ring.mul(x, pack(&w)), d).iter().map(|&c| (c & 1) as u64).collect()
                })
                .collect();
            unit_mod2[r as usize] = rank_mod_p(m, 2) == d;
        }
        ring.is_unit = (0..size as u32).map(|x| unit_mod2[low_bits(x, d) as usize]).collect();
        ring.units = (0..size as u32).filter(|&x| ring.is_unit[x as usize]).collect();
        ring.generators = ring.greedy_generators();
        Ok(ring)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let xs = unpack(x, self.d);
        let ys = unpack(y, self.d);
        let mut acc = [0u32; MAX_DEGREE];
        for i in 0..self.d {
            if xs[i] == 0 {
                continue;
            }
            for j in 0..self.d {
                if ys[j] == 0 {
                    continue;
                }
                let c = (xs[i] * ys[j]) as u32;
                let t = unpack(self.table[i][j], self.d);
                for k in 0..self.d {
                    acc[k] += c * t[k] as u32;
                }
            }
        }
        pack(&acc[..self.d].iter().map(|&v| (v & 3) as u8).collect::<Vec<_>>())
    }

    pub fn neg(&self, x: u32) -> u32 {
        pack(&unpack(x, self.d).iter().map(|&c| (4 - c) & 3).collect::<Vec<_>>())
    }

    pub fn is_unit(&self, x: u32) -> bool {
        self.is_unit[x as usize]
    }

    pub fn inverse(&self, x: u32) -> Result<u32> {
        if !self.is_unit(x) {
            return domain("not a unit modulo 4");
        }
        // G is finite: x^(|G|−1) = x^{-1}.
        Ok(self.pow(x, self.units.len() as u64 - 1))
    }

    pub fn pow(&self, x: u32, mut e: u64) -> u32 {
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Residue of an integral element.
    pub fn reduce(&self, x: &FieldElement) -> Result<u32> {
        let c = x.int_coords().ok_or_else(|| Error::Domain(format!("{x} is not integral")))?;
        if c.len() != self.d {
            return domain("element of the wrong field");
        }
        Ok(pack(&c.iter().map(mod4).collect::<Vec<_>>()))
    }

    /// Integral lift with coordinates in {0, 1, 2, 3}.
    pub fn lift(&self, x: u32) -> FieldElement {
        FieldElement::from_ints(&unpack(x, self.d).iter().map(|&c| c as i64).collect::<Vec<_>>())
    }

    /// G = (O_K/4O_K)^*, packed residues in increasing order.
    pub fn units(&self) -> &[u32] {
        &self.units
    }

    pub fn unit_group_order(&self) -> usize {
        self.units.len()
    }

    /// A generating set of G found greedily.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// |G²|.
    pub fn squares_order(&self) -> usize {
        let mut seen = vec![false; self.is_unit.len()];
        let mut n = 0;
        for &u in &self.units {
            let s = self.mul(u, u);
            if !seen[s as usize] {
                seen[s as usize] = true;
                n += 1;
            }
        }
        n
    }

    /// |G/G²|.
    pub fn quotient_by_squares_order(&self) -> usize {
        self.units.len() / self.squares_order()
    }

    /// Subgroup of G generated by `gens`, as a membership table.
    pub fn subgroup(&self, gens: &[u32]) -> Vec<bool> {
        let mut member = vec![false; self.is_unit.len()];
        member[1] = true;
        let mut queue = VecDeque::from([1u32]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y as usize] {
                    member[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        member
    }

    pub fn subgroup_order(&self, gens: &[u32]) -> usize {
        self.subgroup(gens).iter().filter(|&&b| b).count()
    }

    /// The squares of G together with `gens` generate G, i.e. the images of
    /// `gens` span G/G².
    pub fn spans_mod_squares(&self, gens: &[u32]) -> bool {
        let mut all: Vec<u32> = gens.to_vec();
        all.extend(self.units.iter().map(|&u| self.mul(u, u)));
        all.sort_unstable();
        all.dedup();
        self.subgroup_order(&all) == self.units.len()
    }

    fn greedy_generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut member = self.subgroup(&gens);
        for &u in &self.units {
            if !member[u as usize] {
                gens.push(u);
                member = self.subgroup(&gens);
            }
        }
        gens
    }
}

fn mod4(c: &BigInt) -> u8 {
    c.mod_floor(&BigInt::from(4)).to_u8().expect("residue below 4")
}

fn pack(c: &[u8]) -> u32 {
    c.iter().enumerate().fold(0, |acc, (i, &v)| acc | ((v as u32 & 3) << (2 * i)))
}

fn unpack(x: u32, d: usize) -> [u8; MAX_DEGREE] {
    let mut out = [0u8; MAX_DEGREE];
    for (i, o) in out.iter_mut().enumerate().take(d) {
        *o = ((x >> (2 * i)) & 3) as u8;
    }
    out
}

/// Parity pattern of a packed residue.
fn low_bits(x: u32, d: usize) -> u32 {
    (0..d).fold(0, |acc, i| acc | (((x >> (2 * i)) & 1) << i))
}

fn spread(r: u32, d: usize) -> u32 {
    (0..d).fold(0, |acc, i| acc | (((r >> i) & 1) << (2 * i)))
}
