//! Arithmetic in prime fields and their extensions `F_{p^m}`.
//!
//! Fields are built from the least monic irreducible polynomial of degree `m`
//! under the integer encoding `sum c_i p^i`, so two processes asking for the same
//! `(p, m)` always get bit-identical moduli. Elements are dense coefficient
//! arrays in the polynomial basis and encode to integers in `[0, q)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree over the prime field.
pub const MAX_DEGREE: usize = 16;

/// Default bound on the field order.
pub const DEFAULT_MAX_Q: u64 = 1 << 16;

/// Hard ceiling on the field order regardless of configuration.
pub const HARD_MAX_Q: u64 = 1 << 32;

/// Environment variable overriding [`DEFAULT_MAX_Q`].
pub const MAX_Q_ENV: &str = "PPKIT_MAX_Q";

/// Field-size bound from `PPKIT_MAX_Q`, or the default.
pub fn max_q_from_env() -> u64 {
    std::env::var(MAX_Q_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(|v| v.min(HARD_MAX_Q))
        .unwrap_or(DEFAULT_MAX_Q)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Tag {
    p: u16,
    m: u8,
}

/// An element of `F_{p^m}`: `m` coordinates in the polynomial basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coeffs: [u16; MAX_DEGREE],
    tag: Tag,
}

impl FieldElem {
    /// Polynomial-basis coordinates, lowest degree first.
    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs[..self.tag.m as usize]
    }

    /// Integer encoding `sum coeffs[i] * p^i`.
    pub fn encode(&self) -> u64 {
        let p = self.tag.p as u64;
        self.coeffs()
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + c as u64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        let c = self.coeffs();
        c[0] == 1 && c[1..].iter().all(|&x| x == 0)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({})", self)
    }
}

/// Prime-field elements print as integers; extension elements as polynomials in `t`.
impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        if c.len() == 1 {
            return write!(f, "{}", c[0]);
        }
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (ci, i) {
                (_, 0) => ci.to_string(),
                (1, _) => mono,
                _ => format!("{ci}{mono}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// Which canonical special element to look for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialKind {
    /// Least non-square (odd characteristic).
    NonSquare,
    /// Least element of absolute trace one (characteristic two).
    AbsTraceOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
    Div,
    Pow,
}

/// Second operand of [`FieldCtx::arith`].
#[derive(Clone, Copy, Debug)]
pub enum Operand {
    Elem(FieldElem),
    Exp(u64),
    None,
}

/// The finite field `F_{p^m}` with a fixed monic irreducible modulus.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    m: usize,
    q: u64,
    /// `m + 1` coefficients, lowest first, leading coefficient 1.
    modulus: Vec<u64>,
    /// `(p - modulus[i]) mod p` for `i < m`.
    neg_low: Vec<u64>,
    tag: Tag,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Serialized form of a field: `{p, m, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u64>,
}

/// Builds `F_{p^m}` under the bound from `PPKIT_MAX_Q` (default `2^16`).
pub fn build_field(p: u64, m: usize) -> Result<FieldCtx> {
    build_field_bounded(p, m, max_q_from_env())
}

/// Builds `F_{p^m}`, rejecting fields with more than `bound` elements.
pub fn build_field_bounded(p: u64, m: usize, bound: u64) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let bound = bound.min(HARD_MAX_Q);
    let too_large = Error::DegreeTooLarge { p, m, bound };
    if m == 0 {
        return Err(Error::Invalid("extension degree must be at least 1".into()));
    }
    if m > MAX_DEGREE || p > u16::MAX as u64 {
        return Err(too_large);
    }
    let q = (0..m).try_fold(1u64, |acc, _| acc.checked_mul(p));
    let q = match q {
        Some(q) if q <= bound => q,
        _ => return Err(too_large),
    };
    let modulus = least_irreducible(p, m).ok_or(Error::NoIrreducibleFound { p, m })?;
    Ok(FieldCtx::from_parts(p, m, q, modulus))
}

impl FieldCtx {
    fn from_parts(p: u64, m: usize, q: u64, modulus: Vec<u64>) -> Self {
        let neg_low = modulus[..m].iter().map(|&c| (p - c) % p).collect();
        FieldCtx {
            p,
            m,
            q,
            modulus,
            neg_low,
            tag: Tag {
                p: p as u16,
                m: m as u8,
            },
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Field order `p^m`.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
        }
    }

    /// Rebuilds a field from its descriptor, checking the modulus is the canonical one.
    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Self> {
        let ctx = build_field_bounded(d.p, d.m, HARD_MAX_Q)?;
        if ctx.modulus != d.modulus {
            return Err(Error::Invalid(format!(
                "modulus {:?} is not the canonical modulus {:?}",
                d.modulus, ctx.modulus
            )));
        }
        Ok(ctx)
    }

    pub fn contains(&self, x: &FieldElem) -> bool {
        x.tag == self.tag
    }

    fn raw(&self, coeffs: [u16; MAX_DEGREE]) -> FieldElem {
        FieldElem {
            coeffs,
            tag: self.tag,
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.raw([0; MAX_DEGREE])
    }

    pub fn one(&self) -> FieldElem {
        let mut c = [0; MAX_DEGREE];
        c[0] = 1;
        self.raw(c)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let mut c = [0; MAX_DEGREE];
        c[0] = n.rem_euclid(self.p as i64) as u16;
        self.raw(c)
    }

    /// Element with the given polynomial-basis coordinates (reduced mod `p`).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.m {
            return Err(Error::Invalid(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                self.m
            )));
        }
        let mut c = [0; MAX_DEGREE];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = (v % self.p) as u16;
        }
        Ok(self.raw(c))
    }

    /// Inverse of [`FieldElem::encode`].
    pub fn decode(&self, enc: u64) -> Result<FieldElem> {
        if enc >= self.q {
            return Err(Error::Invalid(format!(
                "encoding {enc} out of range for F_{}",
                self.q
            )));
        }
        Ok(self.decode_unchecked(enc))
    }

    pub(crate) fn decode_unchecked(&self, mut enc: u64) -> FieldElem {
        let mut c = [0; MAX_DEGREE];
        for slot in c.iter_mut().take(self.m) {
            *slot = (enc % self.p) as u16;
            enc /= self.p;
        }
        self.raw(c)
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(move |e| self.decode_unchecked(e))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (1..self.q).map(move |e| self.decode_unchecked(e))
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        debug_assert!(self.contains(&x) && self.contains(&y));
        let p = self.p as u32;
        let mut c = [0; MAX_DEGREE];
        for i in 0..self.m {
            let s = x.coeffs[i] as u32 + y.coeffs[i] as u32;
            c[i] = if s >= p { (s - p) as u16 } else { s as u16 };
        }
        self.raw(c)
    }

    pub fn neg(&self, x: FieldElem) -> FieldElem {
        let p = self.p as u32;
        let mut c = [0; MAX_DEGREE];
        for i in 0..self.m {
            let v = x.coeffs[i] as u32;
            c[i] = if v == 0 { 0 } else { (p - v) as u16 };
        }
        self.raw(c)
    }

    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        debug_assert!(self.contains(&x) && self.contains(&y));
        let p = self.p;
        let m = self.m;
        if m == 1 {
            let mut c = [0; MAX_DEGREE];
            c[0] = ((x.coeffs[0] as u64 * y.coeffs[0] as u64) % p) as u16;
            return self.raw(c);
        }
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..m {
            let a = x.coeffs[i] as u64;
            if a == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] += a * y.coeffs[j] as u64;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let top = prod[k] % p;
            if top == 0 {
                continue;
            }
            for i in 0..m {
                prod[k - m + i] += (top * self.neg_low[i]) % p;
            }
        }
        let mut c = [0; MAX_DEGREE];
        for i in 0..m {
            c[i] = (prod[i] % p) as u16;
        }
        self.raw(c)
    }

    /// Square-and-multiply. `pow(0, 0)` is 1 (empty product).
    pub fn pow(&self, x: FieldElem, mut e: u64) -> FieldElem {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(x, self.q - 2))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Checked arithmetic entry point: validates operand membership before dispatching.
    pub fn arith(&self, op: ArithOp, x: FieldElem, y: Operand) -> Result<FieldElem> {
        if !self.contains(&x) {
            return Err(Error::MixedContexts);
        }
        let elem = |y: Operand| match y {
            Operand::Elem(e) if self.contains(&e) => Ok(e),
            Operand::Elem(_) => Err(Error::MixedContexts),
            _ => Err(Error::Invalid(format!("{op:?} needs a field element operand"))),
        };
        match op {
            ArithOp::Add => Ok(self.add(x, elem(y)?)),
            ArithOp::Sub => Ok(self.sub(x, elem(y)?)),
            ArithOp::Mul => Ok(self.mul(x, elem(y)?)),
            ArithOp::Div => self.div(x, elem(y)?),
            ArithOp::Neg => Ok(self.neg(x)),
            ArithOp::Inv => self.inv(x),
            ArithOp::Pow => match y {
                Operand::Exp(e) => Ok(self.pow(x, e)),
                _ => Err(Error::Invalid("pow needs an integer exponent".into())),
            },
        }
    }

    /// `j` such that `sub = p^j` and `j | m`.
    pub fn subfield_degree(&self, sub: u64) -> Result<usize> {
        let mut acc = 1u64;
        for j in 1..=self.m {
            acc *= self.p;
            if acc == sub {
                return if self.m % j == 0 {
                    Ok(j)
                } else {
                    Err(Error::InvalidSubfield(sub))
                };
            }
            if acc > sub {
                break;
            }
        }
        Err(Error::InvalidSubfield(sub))
    }

    /// `x^(base^k)`, the `k`-fold iterate of the `base`-power Frobenius.
    pub fn frobenius(&self, x: FieldElem, base: u64, k: u64) -> Result<FieldElem> {
        let j = self.subfield_degree(base)?;
        // The map has order m/j, so only k mod (m/j) iterations matter.
        let steps = k % (self.m / j) as u64;
        let mut y = x;
        for _ in 0..steps {
            y = self.pow(y, base);
        }
        Ok(y)
    }

    /// Whether `x` lies in the subfield of order `sub` (`x^sub = x`).
    pub fn in_subfield(&self, x: FieldElem, sub: u64) -> Result<bool> {
        self.subfield_degree(sub)?;
        Ok(self.pow(x, sub) == x)
    }

    /// Relative trace `x + x^sub + ... + x^(sub^(n-1))` down to the subfield of order `sub`.
    pub fn trace(&self, x: FieldElem, sub: u64) -> Result<FieldElem> {
        let j = self.subfield_degree(sub)?;
        let n = self.m / j;
        let mut acc = self.zero();
        let mut term = x;
        for _ in 0..n {
            acc = self.add(acc, term);
            term = self.pow(term, sub);
        }
        Ok(acc)
    }

    /// Relative norm `x^((q-1)/(sub-1))`.
    pub fn norm(&self, x: FieldElem, sub: u64) -> Result<FieldElem> {
        self.subfield_degree(sub)?;
        Ok(self.pow(x, (self.q - 1) / (sub - 1)))
    }

    pub fn trace_and_norm(&self, x: FieldElem, sub: u64) -> Result<(FieldElem, FieldElem)> {
        Ok((self.trace(x, sub)?, self.norm(x, sub)?))
    }

    /// True iff `x = y^k` for some `y`; zero counts as every power.
    pub fn power_class(&self, x: FieldElem, k: u32) -> Result<bool> {
        if k != 2 && k != 4 {
            return Err(Error::UnsupportedK(k));
        }
        if x.is_zero() {
            return Ok(true);
        }
        let e = (self.q - 1) / gcd(k as u64, self.q - 1);
        Ok(self.pow(x, e).is_one())
    }

    pub fn is_square(&self, x: FieldElem) -> bool {
        self.power_class(x, 2).expect("k = 2 is supported")
    }

    pub fn is_fourth_power(&self, x: FieldElem) -> bool {
        self.power_class(x, 4).expect("k = 4 is supported")
    }

    /// Horner evaluation of `Σ coeffs[i] x^i`.
    pub fn eval_poly(&self, coeffs: &[FieldElem], x: FieldElem) -> FieldElem {
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Least qualifying element in encoding order.
    pub fn find_special(&self, kind: SpecialKind) -> Result<FieldElem> {
        match kind {
            SpecialKind::NonSquare => {
                if self.p == 2 {
                    return Err(Error::WrongCharacteristic(
                        "non-squares exist only in odd characteristic",
                    ));
                }
                self.elements().find(|&x| !self.is_square(x))
            }
            SpecialKind::AbsTraceOne => {
                if self.p != 2 {
                    return Err(Error::WrongCharacteristic(
                        "absolute trace one is searched in characteristic 2",
                    ));
                }
                self.elements()
                    .find(|&x| self.trace(x, 2).map(|t| t.is_one()).unwrap_or(false))
            }
        }
        .ok_or_else(|| Error::Invalid("no special element found".into()))
    }
}

/// Field embedding `F_{p^j} -> F_{p^m}` fixed by sending the generator `t` of
/// the small field to the least root (by encoding) of its modulus in the big field.
#[derive(Clone, Debug)]
pub struct Embedding {
    small: FieldCtx,
    big: FieldCtx,
    image: Vec<FieldElem>,
    preimage: std::collections::HashMap<u64, FieldElem>,
}

impl Embedding {
    pub fn new(small: &FieldCtx, big: &FieldCtx) -> Result<Self> {
        if small.p != big.p {
            return Err(Error::MixedContexts);
        }
        if big.m % small.m != 0 {
            return Err(Error::InvalidSubfield(small.q));
        }
        let eval_modulus = |x: FieldElem| {
            small.modulus.iter().rev().fold(big.zero(), |acc, &c| {
                big.add(big.mul(acc, x), big.from_int(c as i64))
            })
        };
        let theta = big
            .elements()
            .find(|&x| eval_modulus(x).is_zero())
            .ok_or(Error::InvalidSubfield(small.q))?;
        let image: Vec<FieldElem> = small
            .elements()
            .map(|x| {
                x.coeffs().iter().rev().fold(big.zero(), |acc, &c| {
                    big.add(big.mul(acc, theta), big.from_int(c as i64))
                })
            })
            .collect();
        let preimage = small
            .elements()
            .zip(&image)
            .map(|(x, y)| (y.encode(), x))
            .collect();
        Ok(Embedding {
            small: small.clone(),
            big: big.clone(),
            image,
            preimage,
        })
    }

    pub fn small(&self) -> &FieldCtx {
        &self.small
    }

    pub fn big(&self) -> &FieldCtx {
        &self.big
    }

    pub fn embed(&self, x: FieldElem) -> FieldElem {
        self.image[x.encode() as usize]
    }

    /// Preimage of `y` when `y` lies in the embedded subfield.
    pub fn restrict(&self, y: FieldElem) -> Option<FieldElem> {
        self.preimage.get(&y.encode()).copied()
    }
}

// ---------------------------------------------------------------------------
// Polynomials over F_p used for modulus search.

fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    // b is monic.
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * bc) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn digits(mut k: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = k % p;
            k /= p;
            d
        })
        .collect()
}

fn has_root(p: u64, f: &[u64]) -> bool {
    (0..p).any(|a| f.iter().rev().fold(0u64, |acc, &c| (acc * a + c) % p) == 0)
}

/// Irreducibility of a monic polynomial over `F_p`: root test up to degree 3,
/// trial division by every monic polynomial of degree `<= m/2` beyond that.
pub fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    if has_root(p, f) {
        return false;
    }
    if m <= 3 {
        return true;
    }
    for d in 2..=m / 2 {
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut g = digits(k, p, d);
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u64, m: usize) -> Option<Vec<u64>> {
    let count = p.checked_pow(m as u32)?;
    (0..count).find_map(|k| {
        let mut f = digits(k, p, m);
        f.push(1);
        is_irreducible(p, &f).then_some(f)
    })
}
