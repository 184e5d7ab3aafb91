//! Exhaustive permutation checks used as ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::tower::{TowerCtx, TowerElem};

/// Largest encoded tuple space the multivariate oracle accepts.
pub const MAX_TUPLE_DOMAIN: u64 = 1 << 32;

const ADDITIVITY_SAMPLES: usize = 64;
const ADDITIVITY_SEED: u64 = 0x5eed_add1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub is_permutation: bool,
    /// Encodings `(x1, x2)`, `x1 < x2`, with equal images.
    pub witness: Option<(u64, u64)>,
    pub domain_size: u64,
}

struct Bitmap(Vec<u64>);

impl Bitmap {
    fn new(size: u64) -> Self {
        Bitmap(vec![0; size.div_ceil(64) as usize])
    }

    /// Sets bit `i`, returning whether it was already set.
    fn test_and_set(&mut self, i: u64) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        let was = self.0[w] >> b & 1 == 1;
        self.0[w] |= 1 << b;
        was
    }
}

/// Bijection test of `eval` on `[0, size)`, through encodings.
pub fn is_bijection<F>(size: u64, mut eval: F) -> Result<OracleReport>
where
    F: FnMut(u64) -> u64,
{
    let mut seen = Bitmap::new(size);
    for x in 0..size {
        let y = eval(x);
        if y >= size {
            return Err(Error::ImageOutOfDomain { image: y, size });
        }
        if seen.test_and_set(y) {
            let x1 = (0..x).find(|&w| eval(w) == y).expect("earlier preimage exists");
            return Ok(OracleReport {
                is_permutation: false,
                witness: Some((x1, x)),
                domain_size: size,
            });
        }
    }
    Ok(OracleReport {
        is_permutation: true,
        witness: None,
        domain_size: size,
    })
}

/// Bijection test on a precomputed image table.
pub fn table_is_bijection(images: &[u64]) -> Result<OracleReport> {
    is_bijection(images.len() as u64, |x| images[x as usize])
}

pub fn field_bijection<F>(field: &FieldCtx, mut f: F) -> Result<OracleReport>
where
    F: FnMut(FieldElem) -> FieldElem,
{
    is_bijection(field.q(), |x| f(field.decode_unchecked(x)).encode())
}

pub fn tower_bijection<F>(tower: &TowerCtx, mut f: F) -> Result<OracleReport>
where
    F: FnMut(TowerElem) -> TowerElem,
{
    is_bijection(tower.order(), |x| tower.encode(f(tower.decode_unchecked(x))))
}

/// `Σ enc(x_i) q^i`, with `x_1` least significant.
pub fn encode_tuple(xs: &[FieldElem], q: u64) -> u64 {
    xs.iter().rev().fold(0, |acc, x| acc * q + x.encode())
}

pub fn decode_tuple(field: &FieldCtx, mut enc: u64, out: &mut [FieldElem]) {
    let q = field.q();
    for slot in out.iter_mut() {
        *slot = field.decode_unchecked(enc % q);
        enc /= q;
    }
}

/// Bijection test of `g: F_q^n -> F_q^n`; `g` writes its image into the second slice.
pub fn multivar_bijection<G>(field: &FieldCtx, n: usize, mut g: G) -> Result<OracleReport>
where
    G: FnMut(&[FieldElem], &mut [FieldElem]),
{
    let q = field.q();
    let size = (q as u128).pow(n as u32);
    if size > MAX_TUPLE_DOMAIN as u128 {
        return Err(Error::DomainTooLarge {
            size: u64::try_from(size).unwrap_or(u64::MAX),
            limit: MAX_TUPLE_DOMAIN,
        });
    }
    let mut xs = vec![field.zero(); n];
    let mut ys = vec![field.zero(); n];
    is_bijection(size as u64, |enc| {
        decode_tuple(field, enc, &mut xs);
        g(&xs, &mut ys);
        encode_tuple(&ys, q)
    })
}

/// Number of zeros of an additive map; the map permutes iff this is 1.
pub fn additive_kernel<L>(field: &FieldCtx, l: L) -> Result<u64>
where
    L: Fn(FieldElem) -> FieldElem,
{
    if !l(field.zero()).is_zero() {
        return Err(Error::NotAdditive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ADDITIVITY_SEED);
    let q = field.q();
    for _ in 0..ADDITIVITY_SAMPLES {
        let x = field.decode_unchecked(rng.gen_range(0..q));
        let y = field.decode_unchecked(rng.gen_range(0..q));
        if l(field.add(x, y)) != field.add(l(x), l(y)) {
            return Err(Error::NotAdditive);
        }
    }
    Ok(field.elements().filter(|&x| l(x).is_zero()).count() as u64)
}

/// `f` permutes iff `f(x + a) = f(x)` has no solution with `a != 0`.
///
/// The witness is `(x, x + a)` for the first solving `a`, then `x`.
pub fn injectivity_by_differences<F>(field: &FieldCtx, f: F) -> OracleReport
where
    F: Fn(FieldElem) -> FieldElem,
{
    let table: Vec<FieldElem> = field.elements().map(&f).collect();
    for a in field.nonzero_elements() {
        for x in field.elements() {
            let xa = field.add(x, a);
            if table[xa.encode() as usize] == table[x.encode() as usize] {
                return OracleReport {
                    is_permutation: false,
                    witness: Some((x.encode(), xa.encode())),
                    domain_size: field.q(),
                };
            }
        }
    }
    OracleReport {
        is_permutation: true,
        witness: None,
        domain_size: field.q(),
    }
}
