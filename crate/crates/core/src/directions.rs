//! Direction sets `D(f)` and permuting-translate sets `P(f)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::oracle::is_bijection;
use crate::tower::{TowerCtx, TowerElem};

/// Largest domain for the quadratic pair loop.
pub const MAX_DIRECTION_DOMAIN: u64 = 1 << 12;

/// The arithmetic needed here, on integer encodings.
pub trait EncodedField {
    fn size(&self) -> u64;
    fn add_enc(&self, x: u64, y: u64) -> u64;
    fn sub_enc(&self, x: u64, y: u64) -> u64;
    fn mul_enc(&self, x: u64, y: u64) -> u64;
    fn div_enc(&self, x: u64, y: u64) -> u64;
    fn neg_enc(&self, x: u64) -> u64;
}

impl EncodedField for FieldCtx {
    fn size(&self) -> u64 {
        self.q()
    }
    fn add_enc(&self, x: u64, y: u64) -> u64 {
        self.add(self.decode_unchecked(x), self.decode_unchecked(y)).encode()
    }
    fn sub_enc(&self, x: u64, y: u64) -> u64 {
        self.sub(self.decode_unchecked(x), self.decode_unchecked(y)).encode()
    }
    fn mul_enc(&self, x: u64, y: u64) -> u64 {
        self.mul(self.decode_unchecked(x), self.decode_unchecked(y)).encode()
    }
    fn div_enc(&self, x: u64, y: u64) -> u64 {
        self.div(self.decode_unchecked(x), self.decode_unchecked(y))
            .expect("nonzero divisor")
            .encode()
    }
    fn neg_enc(&self, x: u64) -> u64 {
        self.neg(self.decode_unchecked(x)).encode()
    }
}

impl EncodedField for TowerCtx {
    fn size(&self) -> u64 {
        self.order()
    }
    fn add_enc(&self, x: u64, y: u64) -> u64 {
        self.encode(self.add(self.decode_unchecked(x), self.decode_unchecked(y)))
    }
    fn sub_enc(&self, x: u64, y: u64) -> u64 {
        self.encode(self.sub(self.decode_unchecked(x), self.decode_unchecked(y)))
    }
    fn mul_enc(&self, x: u64, y: u64) -> u64 {
        self.encode(self.mul(self.decode_unchecked(x), self.decode_unchecked(y)))
    }
    fn div_enc(&self, x: u64, y: u64) -> u64 {
        let q = self
            .div(self.decode_unchecked(x), self.decode_unchecked(y))
            .expect("nonzero divisor");
        self.encode(q)
    }
    fn neg_enc(&self, x: u64) -> u64 {
        self.encode(self.neg(self.decode_unchecked(x)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub directions: BTreeSet<u64>,
    pub permuting_gammas: BTreeSet<u64>,
    pub complementary: bool,
}

fn check_size(size: u64) -> Result<()> {
    if size > MAX_DIRECTION_DOMAIN {
        return Err(Error::DomainTooLarge {
            size,
            limit: MAX_DIRECTION_DOMAIN,
        });
    }
    Ok(())
}

/// `{(f(x) - f(y)) / (x - y) : x ≠ y}` over the whole field; `table[x] = f(x)`.
pub fn direction_set<K: EncodedField>(field: &K, table: &[u64]) -> Result<BTreeSet<u64>> {
    let all: Vec<u64> = (0..field.size()).collect();
    direction_set_on(field, table, &all)
}

/// Difference quotients with both arguments drawn from `args`.
pub fn direction_set_on<K: EncodedField>(
    field: &K,
    table: &[u64],
    args: &[u64],
) -> Result<BTreeSet<u64>> {
    check_size(field.size())?;
    let mut out = BTreeSet::new();
    for (k, &x) in args.iter().enumerate() {
        for &y in &args[k + 1..] {
            let num = field.sub_enc(table[x as usize], table[y as usize]);
            out.insert(field.div_enc(num, field.sub_enc(x, y)));
        }
    }
    Ok(out)
}

/// `{γ : f(x) + γx permutes}`.
pub fn permuting_translate_set<K: EncodedField>(field: &K, table: &[u64]) -> Result<BTreeSet<u64>> {
    check_size(field.size())?;
    let mut out = BTreeSet::new();
    for g in 0..field.size() {
        let r = is_bijection(field.size(), |x| {
            field.add_enc(table[x as usize], field.mul_enc(g, x))
        })?;
        if r.is_permutation {
            out.insert(g);
        }
    }
    Ok(out)
}

/// Both sets and the law `m ∈ D(f) ⟺ -m ∉ P(f)` at every `m`.
pub fn check_complementarity<K: EncodedField>(field: &K, table: &[u64]) -> Result<DirectionReport> {
    let directions = direction_set(field, table)?;
    let permuting_gammas = permuting_translate_set(field, table)?;
    let complementary = (0..field.size())
        .all(|m| directions.contains(&m) != permuting_gammas.contains(&field.neg_enc(m)));
    Ok(DirectionReport {
        directions,
        permuting_gammas,
        complementary,
    })
}

pub fn field_table(field: &FieldCtx, f: impl Fn(FieldElem) -> FieldElem) -> Vec<u64> {
    field.elements().map(|x| f(x).encode()).collect()
}

pub fn tower_table(tower: &TowerCtx, f: impl Fn(TowerElem) -> TowerElem) -> Vec<u64> {
    tower.elements().map(|x| tower.encode(f(x))).collect()
}
