//! Polynomial families over `F_{q^2}` and `F_{q^d}`, their evaluators, and the
//! closed-form `(g1, g2)` component tables.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::oracle::{is_bijection, OracleReport};
use crate::tower::{CharKind, TowerCtx, TowerElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T3_1,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T3_6,
    T3_7,
    T3_8,
    T3_9,
    T3_10,
    T3_11,
    T3_12,
    T3_13,
    T3_14,
    T3_15,
    T3_16,
    T3_17,
    T3_18,
    T3_19,
    T4_1,
}

impl TheoremId {
    pub const ALL: [TheoremId; 20] = [
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T3_5,
        TheoremId::T3_6,
        TheoremId::T3_7,
        TheoremId::T3_8,
        TheoremId::T3_9,
        TheoremId::T3_10,
        TheoremId::T3_11,
        TheoremId::T3_12,
        TheoremId::T3_13,
        TheoremId::T3_14,
        TheoremId::T3_15,
        TheoremId::T3_16,
        TheoremId::T3_17,
        TheoremId::T3_18,
        TheoremId::T3_19,
        TheoremId::T4_1,
    ];

    pub fn label(self) -> &'static str {
        use TheoremId::*;
        match self {
            T3_1 => "3.1",
            T3_2 => "3.2",
            T3_3 => "3.3",
            T3_4 => "3.4",
            T3_5 => "3.5",
            T3_6 => "3.6",
            T3_7 => "3.7",
            T3_8 => "3.8",
            T3_9 => "3.9",
            T3_10 => "3.10",
            T3_11 => "3.11",
            T3_12 => "3.12",
            T3_13 => "3.13",
            T3_14 => "3.14",
            T3_15 => "3.15",
            T3_16 => "3.16",
            T3_17 => "3.17",
            T3_18 => "3.18",
            T3_19 => "3.19",
            T4_1 => "4.1",
        }
    }

    /// Theorems whose hypothesis restricts `γ` to `F_q^*`.
    pub fn gamma_in_base(self) -> bool {
        use TheoremId::*;
        matches!(
            self,
            T3_6 | T3_7 | T3_8 | T3_9 | T3_10 | T3_11 | T3_12 | T3_13 | T3_14 | T3_15 | T3_16
                | T3_17 | T3_18
        )
    }

    pub fn even_characteristic(self) -> bool {
        matches!(self, TheoremId::T3_19 | TheoremId::T4_1)
    }

    /// The trace-form family lives on `F_{q^d}` rather than the quadratic tower.
    pub fn is_trace_form(self) -> bool {
        self == TheoremId::T4_1
    }

    /// Whether the proof displays a `(g1, g2)` pair.
    pub fn has_closed_form(self) -> bool {
        !matches!(self, TheoremId::T3_2 | TheoremId::T3_3 | TheoremId::T4_1)
    }

    pub fn linear_kind(self) -> LinearKind {
        use TheoremId::*;
        match self {
            T3_13 | T3_14 | T3_15 | T3_16 | T3_17 | T3_18 => LinearKind::XqPlusX,
            _ => LinearKind::X,
        }
    }

    /// Exponents of the `Δ`-power terms (empty for the trace form).
    pub fn terms(self, i: Option<u32>) -> Result<Vec<Exponent>> {
        use TheoremId::*;
        let e = |q_coeff, constant| Exponent::Affine { q_coeff, constant };
        Ok(match self {
            T3_1 | T3_14 => vec![e(1, 2)],
            T3_2 => vec![e(0, 2)],
            T3_3 => vec![e(2, 0)],
            T3_4 => vec![e(1, 2), e(2, 1)],
            T3_5 => vec![e(1, 4), e(0, 5)],
            T3_6 => vec![e(2, 1), e(3, 2)],
            T3_7 => vec![e(2, 3), e(2, 0)],
            T3_8 => vec![e(2, 4), e(1, 5)],
            T3_9 => vec![e(2, 4), e(1, 0)],
            T3_10 => vec![e(2, 3), e(5, 0)],
            T3_11 => vec![e(2, 4), e(2, 0)],
            T3_12 => vec![e(1, 5), e(2, 0)],
            T3_13 => vec![Exponent::QPlusPPower {
                i: i.ok_or(Error::MissingParam("i"))?,
            }],
            T3_15 => vec![e(3, 2)],
            T3_16 => vec![e(4, 2)],
            T3_17 => vec![e(1, 3), e(1, 2)],
            T3_18 => vec![e(3, 2), e(4, 2)],
            T3_19 => vec![e(2, 1)],
            T4_1 => vec![],
        })
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.label() == s.trim())
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An exponent written in terms of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    /// `q_coeff * q + constant`.
    Affine { q_coeff: u64, constant: u64 },
    /// `q + p^i`.
    QPlusPPower { i: u32 },
}

impl Exponent {
    pub fn instantiate(self, p: u64, q: u64) -> Result<u64> {
        let s = match self {
            Exponent::Affine { q_coeff, constant } => q_coeff
                .checked_mul(q)
                .and_then(|v| v.checked_add(constant)),
            Exponent::QPlusPPower { i } => p.checked_pow(i).and_then(|v| v.checked_add(q)),
        };
        match s {
            Some(0) => Err(Error::ExponentOutOfRange(0)),
            Some(s) => Ok(s),
            None => Err(Error::ExponentOutOfRange(u64::MAX)),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Exponent::Affine { q_coeff, constant } => match (q_coeff, constant) {
                (0, c) => write!(f, "{c}"),
                (1, 0) => write!(f, "q"),
                (1, c) => write!(f, "q+{c}"),
                (k, 0) => write!(f, "{k}q"),
                (k, c) => write!(f, "{k}q+{c}"),
            },
            Exponent::QPlusPPower { i } => write!(f, "q+p^{i}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `7`, `q`, `3q`, `2q+1`, `q+p^2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse exponent `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(i) = t.strip_prefix("q+p^") {
            return Ok(Exponent::QPlusPPower {
                i: i.parse().map_err(|_| bad())?,
            });
        }
        let (head, constant) = match t.split_once('+') {
            Some((h, c)) => (h.to_string(), c.parse().map_err(|_| bad())?),
            None => (t.clone(), 0),
        };
        if let Some(k) = head.strip_suffix('q') {
            let q_coeff = if k.is_empty() {
                1
            } else {
                k.parse().map_err(|_| bad())?
            };
            Ok(Exponent::Affine { q_coeff, constant })
        } else if t.contains('+') {
            Err(bad())
        } else {
            Ok(Exponent::Affine {
                q_coeff: 0,
                constant: head.parse().map_err(|_| bad())?,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinearKind {
    /// `L(x) = x`
    X,
    /// `L(x) = x^q + x`
    XqPlusX,
}

/// `Σ (core(x) + δ)^{s_i} + γ L(x)` on the quadratic tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaPowerSpec {
    pub terms: Vec<Exponent>,
    pub delta: TowerElem,
    pub gamma: TowerElem,
    pub linear: LinearKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Odd characteristic, `core(x) = x^q - x`.
    DeltaPower(DeltaPowerSpec),
    /// Characteristic two, `core(x) = x^q + x`.
    EvenDeltaPower(DeltaPowerSpec),
    /// `x + γ Tr_q^{q^d}(x^{q+1} + x^{2q+2})` on `F_{q^d}`.
    TraceForm { d: u32, gamma: FieldElem },
    /// `x + Σ_{i≥1} a_i Tr_q^{q^n}(x)^i` on `F_{q^n}`; `coeffs[k]` is `a_{k+1}`.
    TraceComposed { n: u32, coeffs: Vec<FieldElem> },
}

impl FamilySpec {
    /// The tower family a theorem is about.
    pub fn for_theorem(
        id: TheoremId,
        tower: &TowerCtx,
        delta: TowerElem,
        gamma: TowerElem,
        i: Option<u32>,
    ) -> Result<Self> {
        if id.is_trace_form() {
            return Err(Error::KindContextMismatch);
        }
        let spec = DeltaPowerSpec {
            terms: id.terms(i)?,
            delta,
            gamma,
            linear: id.linear_kind(),
        };
        match (id.even_characteristic(), tower.kind()) {
            (false, CharKind::Odd) => Ok(FamilySpec::DeltaPower(spec)),
            (true, CharKind::Even) => Ok(FamilySpec::EvenDeltaPower(spec)),
            _ => Err(Error::WrongCharacteristic(
                "theorem and tower characteristic differ",
            )),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::DeltaPower(_) => "DeltaPower",
            FamilySpec::EvenDeltaPower(_) => "EvenDeltaPower",
            FamilySpec::TraceForm { .. } => "TraceForm",
            FamilySpec::TraceComposed { .. } => "TraceComposed",
        }
    }

    fn delta_power(&self, tower: &TowerCtx) -> Result<&DeltaPowerSpec> {
        let (spec, kind) = match self {
            FamilySpec::DeltaPower(s) => (s, CharKind::Odd),
            FamilySpec::EvenDeltaPower(s) => (s, CharKind::Even),
            _ => return Err(Error::KindContextMismatch),
        };
        if tower.kind() != kind {
            return Err(Error::KindContextMismatch);
        }
        if !tower.contains(&spec.delta) || !tower.contains(&spec.gamma) {
            return Err(Error::MixedContexts);
        }
        Ok(spec)
    }

    /// Evaluator for the two `Δ`-power kinds, with exponents instantiated once.
    pub fn tower_evaluator<'a>(
        &'a self,
        tower: &'a TowerCtx,
    ) -> Result<impl Fn(TowerElem) -> TowerElem + 'a> {
        let spec = self.delta_power(tower)?;
        let exps = spec
            .terms
            .iter()
            .map(|e| e.instantiate(tower.base().p(), tower.q()))
            .collect::<Result<Vec<_>>>()?;
        Ok(move |x: TowerElem| {
            let t = tower.core_term(x, spec.delta);
            let mut acc = exps
                .iter()
                .fold(tower.zero(), |acc, &s| tower.add(acc, tower.pow(t, s)));
            let lx = match spec.linear {
                LinearKind::X => x,
                LinearKind::XqPlusX => tower.add(tower.frobenius(x), x),
            };
            acc = tower.add(acc, tower.mul(spec.gamma, lx));
            acc
        })
    }

    pub fn eval_tower(&self, tower: &TowerCtx, x: TowerElem) -> Result<TowerElem> {
        Ok(self.tower_evaluator(tower)?(x))
    }

    /// Base order `q` when `field` is `F_{q^k}`.
    fn base_order(field: &FieldCtx, k: u32) -> Result<u64> {
        if k == 0 || field.m() % k as usize != 0 {
            return Err(Error::KindContextMismatch);
        }
        Ok(field.p().pow((field.m() / k as usize) as u32))
    }

    /// Evaluator for the two trace kinds over the flat field.
    pub fn flat_evaluator<'a>(
        &'a self,
        field: &'a FieldCtx,
    ) -> Result<Box<dyn Fn(FieldElem) -> FieldElem + 'a>> {
        match self {
            FamilySpec::TraceForm { d, gamma } => {
                let q = Self::base_order(field, *d)?;
                if !field.contains(gamma) {
                    return Err(Error::MixedContexts);
                }
                let gamma = *gamma;
                Ok(Box::new(move |x| {
                    let x1 = field.pow(x, q + 1);
                    let inner = field.add(x1, field.mul(x1, x1));
                    let tr = field.trace(inner, q).expect("q is a subfield order");
                    field.add(x, field.mul(gamma, tr))
                }))
            }
            FamilySpec::TraceComposed { n, coeffs } => {
                let q = Self::base_order(field, *n)?;
                if coeffs.iter().any(|c| !field.contains(c)) {
                    return Err(Error::MixedContexts);
                }
                let g = reduce_trace_coeffs(field, coeffs, q);
                Ok(Box::new(move |x| {
                    let t = field.trace(x, q).expect("q is a subfield order");
                    // g has no constant term: g(t) = t * (a_1 + a_2 t + ...)
                    field.add(x, field.mul(t, field.eval_poly(&g, t)))
                }))
            }
            _ => Err(Error::KindContextMismatch),
        }
    }

    pub fn eval_flat(&self, field: &FieldCtx, x: FieldElem) -> Result<FieldElem> {
        Ok(self.flat_evaluator(field)?(x))
    }

    /// Record with element encodings, suitable for serialization.
    pub fn to_record(&self, tower: Option<&TowerCtx>) -> FamilyRecord {
        let enc = |x: &TowerElem| tower.map(|t| t.encode(*x));
        match self {
            FamilySpec::DeltaPower(s) | FamilySpec::EvenDeltaPower(s) => FamilyRecord {
                kind: self.kind_name().into(),
                terms: s.terms.iter().map(ToString::to_string).collect(),
                delta: enc(&s.delta),
                gamma: enc(&s.gamma),
                linear: Some(s.linear),
                d: None,
                coeffs: Vec::new(),
            },
            FamilySpec::TraceForm { d, gamma } => FamilyRecord {
                kind: self.kind_name().into(),
                terms: Vec::new(),
                delta: None,
                gamma: Some(gamma.encode()),
                linear: None,
                d: Some(*d),
                coeffs: Vec::new(),
            },
            FamilySpec::TraceComposed { n, coeffs } => FamilyRecord {
                kind: self.kind_name().into(),
                terms: Vec::new(),
                delta: None,
                gamma: None,
                linear: None,
                d: Some(*n),
                coeffs: coeffs.iter().map(|c| c.encode()).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub kind: String,
    pub terms: Vec<String>,
    pub delta: Option<u64>,
    pub gamma: Option<u64>,
    pub linear: Option<LinearKind>,
    /// `d` for the trace form, `n` for the composed form.
    pub d: Option<u32>,
    pub coeffs: Vec<u64>,
}

/// Folds `a_i` with `i ≥ q` onto `i - (q - 1)`, since `t^q = t` on `F_q`.
///
/// Returns `a_1..a_{q-1}`, zero-padded.
pub fn reduce_trace_coeffs(field: &FieldCtx, coeffs: &[FieldElem], q: u64) -> Vec<FieldElem> {
    let mut out = vec![field.zero(); (q - 1) as usize];
    for (k, &c) in coeffs.iter().enumerate() {
        let i = k as u64 + 1;
        let r = (i - 1) % (q - 1);
        out[r as usize] = field.add(out[r as usize], c);
    }
    out
}

/// Table-driven evaluation of a `Δ`-power family across many `(δ, γ)`.
///
/// Everything that does not depend on `δ` or `γ` is computed once; each
/// evaluation is a handful of table lookups on element encodings.
pub struct TabulatedFamily {
    q: usize,
    alpha_sq: (u32, u32),
    power_sum: Vec<u32>,
    core: Vec<(u32, u32)>,
    linear: Vec<(u32, u32)>,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl TabulatedFamily {
    /// Largest base order for which the `q × q` tables are built.
    pub const MAX_Q: u64 = 1024;

    pub fn new(tower: &TowerCtx, terms: &[Exponent], linear: LinearKind) -> Result<Self> {
        let q = tower.q();
        if q > Self::MAX_Q {
            return Err(Error::DomainTooLarge {
                size: q,
                limit: Self::MAX_Q,
            });
        }
        let f = tower.base();
        let exps = terms
            .iter()
            .map(|e| e.instantiate(f.p(), q))
            .collect::<Result<Vec<_>>>()?;
        let pair = |x: TowerElem| (x.c0.encode() as u32, x.c1.encode() as u32);
        let zero = tower.zero();
        let mut power_sum = Vec::with_capacity((q * q) as usize);
        let mut core = Vec::with_capacity((q * q) as usize);
        let mut lin = Vec::with_capacity((q * q) as usize);
        for x in tower.elements() {
            let s = exps
                .iter()
                .fold(zero, |acc, &s| tower.add(acc, tower.pow(x, s)));
            power_sum.push(tower.encode(s) as u32);
            core.push(pair(tower.core_term(x, zero)));
            lin.push(pair(match linear {
                LinearKind::X => x,
                LinearKind::XqPlusX => tower.add(tower.frobenius(x), x),
            }));
        }
        let mut add = Vec::with_capacity((q * q) as usize);
        let mut mul = Vec::with_capacity((q * q) as usize);
        for a in f.elements() {
            for b in f.elements() {
                add.push(f.add(a, b).encode() as u32);
                mul.push(f.mul(a, b).encode() as u32);
            }
        }
        let a2 = tower.mul(tower.alpha(), tower.alpha());
        Ok(TabulatedFamily {
            q: q as usize,
            alpha_sq: pair(a2),
            power_sum,
            core,
            linear: lin,
            add,
            mul,
        })
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }

    /// Image encoding of `x` for the family with the given `δ`, `γ` encodings.
    #[inline]
    pub fn eval(&self, delta: (u32, u32), gamma: (u32, u32), x: u64) -> u64 {
        let q = self.q as u64;
        let (k0, k1) = self.core[x as usize];
        let t = self.add(k0, delta.0) as u64 + q * self.add(k1, delta.1) as u64;
        let p = self.power_sum[t as usize] as u64;
        let (p0, p1) = ((p % q) as u32, (p / q) as u32);
        let (l0, l1) = self.linear[x as usize];
        let (c, d) = gamma;
        // (c + dα)(l0 + l1 α) with α² = s0 + s1 α
        let dl1 = self.mul(d, l1);
        let r0 = self.add(self.mul(c, l0), self.mul(dl1, self.alpha_sq.0));
        let r1 = self.add(
            self.add(self.mul(c, l1), self.mul(d, l0)),
            self.mul(dl1, self.alpha_sq.1),
        );
        self.add(p0, r0) as u64 + q * self.add(p1, r1) as u64
    }

    pub fn oracle(&self, delta: TowerElem, gamma: TowerElem) -> OracleReport {
        let pair = |x: TowerElem| (x.c0.encode() as u32, x.c1.encode() as u32);
        let (d, g) = (pair(delta), pair(gamma));
        let size = (self.q * self.q) as u64;
        is_bijection(size, |x| self.eval(d, g, x)).expect("tabulated images stay in range")
    }
}

/// Polynomial in `y` and `z` over `F_q`, sparse by `(deg_y, deg_z)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<(u8, u64), FieldElem>,
}

impl BivarPoly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c y^dy z^dz`.
    pub fn add_term(&mut self, field: &FieldCtx, dy: u8, dz: u64, c: FieldElem) {
        let entry = self.terms.entry((dy, dz)).or_insert_with(|| field.zero());
        *entry = field.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&(dy, dz));
        }
    }

    pub fn with(mut self, field: &FieldCtx, dy: u8, dz: u64, c: FieldElem) -> Self {
        self.add_term(field, dy, dz, c);
        self
    }

    pub fn coeff(&self, dy: u8, dz: u64) -> Option<FieldElem> {
        self.terms.get(&(dy, dz)).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, u64, FieldElem)> + '_ {
        self.terms.iter().map(|(&(dy, dz), &c)| (dy, dz, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn y_degree(&self) -> u8 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn z_degree(&self) -> u64 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn eval(&self, field: &FieldCtx, y: FieldElem, z: FieldElem) -> FieldElem {
        self.terms.iter().fold(field.zero(), |acc, (&(dy, dz), &c)| {
            let m = field.mul(field.pow(y, dy as u64), field.pow(z, dz));
            field.add(acc, field.mul(c, m))
        })
    }

    /// Same function on `F_q^2` with every degree below `q`.
    pub fn reduced(&self, field: &FieldCtx) -> BivarPoly {
        let q = field.q();
        let fold = |e: u64| if e == 0 { 0 } else { (e - 1) % (q - 1) + 1 };
        let mut out = BivarPoly::new();
        for (&(dy, dz), &c) in &self.terms {
            out.add_term(field, fold(dy as u64) as u8, fold(dz), c);
        }
        out
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(dy, dz), c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let cs = c.to_string();
            let mono: Vec<String> = [("y", dy as u64), ("z", dz)]
                .iter()
                .filter(|(_, e)| *e > 0)
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            let coeff = if cs.contains(['+', 't']) {
                format!("({cs})")
            } else {
                cs
            };
            match (mono.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{coeff}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{coeff}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

/// The pair `(g1, g2)` with `f(x) = g1 β1 + g2 β2 + const`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentTable {
    pub g1: BivarPoly,
    pub g2: BivarPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTableRecord {
    /// `(deg_y, deg_z, coeff encoding)` triples.
    pub g1: Vec<(u8, u64, u64)>,
    pub g2: Vec<(u8, u64, u64)>,
}

impl ComponentTable {
    pub fn eval(&self, field: &FieldCtx, y: FieldElem, z: FieldElem) -> (FieldElem, FieldElem) {
        (self.g1.eval(field, y, z), self.g2.eval(field, y, z))
    }

    /// Values at every `(y, z)`, indexed by `enc(y) + q enc(z)`.
    pub fn values(&self, field: &FieldCtx) -> Vec<(FieldElem, FieldElem)> {
        let mut out = Vec::with_capacity((field.q() * field.q()) as usize);
        for z in field.elements() {
            for y in field.elements() {
                out.push(self.eval(field, y, z));
            }
        }
        out
    }

    pub fn reduced(&self, field: &FieldCtx) -> ComponentTable {
        ComponentTable {
            g1: self.g1.reduced(field),
            g2: self.g2.reduced(field),
        }
    }

    pub fn to_record(&self) -> ComponentTableRecord {
        let triples = |g: &BivarPoly| g.terms().map(|(dy, dz, c)| (dy, dz, c.encode())).collect();
        ComponentTableRecord {
            g1: triples(&self.g1),
            g2: triples(&self.g2),
        }
    }

    pub fn from_record(field: &FieldCtx, rec: &ComponentTableRecord) -> Result<Self> {
        let build = |v: &[(u8, u64, u64)]| -> Result<BivarPoly> {
            let mut g = BivarPoly::new();
            for &(dy, dz, c) in v {
                g.add_term(field, dy, dz, field.decode(c)?);
            }
            Ok(g)
        };
        Ok(ComponentTable {
            g1: build(&rec.g1)?,
            g2: build(&rec.g2)?,
        })
    }
}

/// The `(g1, g2)` displayed for a theorem, instantiated at `(δ, γ)`.
///
/// Odd towers use `δ = a + bα`, `γ = c + dα`; the change of variable is
/// `x = y - (z - b)α/2`. Terms free of `y` and `z` are left out.
pub fn closed_form_components(
    id: TheoremId,
    tower: &TowerCtx,
    delta: TowerElem,
    gamma: TowerElem,
    i: Option<u32>,
) -> Result<ComponentTable> {
    if !id.has_closed_form() {
        return Err(Error::UnknownTheorem(format!(
            "{id} has no closed-form components"
        )));
    }
    if id.even_characteristic() != (tower.kind() == CharKind::Even) {
        return Err(Error::WrongCharacteristic(
            "theorem and tower characteristic differ",
        ));
    }
    if !tower.contains(&delta) || !tower.contains(&gamma) {
        return Err(Error::MixedContexts);
    }
    if id.gamma_in_base() && !tower.in_base(gamma) {
        return Err(Error::GammaNotInSubfield);
    }
    let f = tower.base();
    let k = |n: i64| f.from_int(n);
    let u = tower.u();
    let (a, b) = (delta.c0, delta.c1);
    let (c, d) = (gamma.c0, gamma.c1);
    let mul = |xs: &[FieldElem]| xs.iter().fold(f.one(), |acc, &x| f.mul(acc, x));
    let pw = |x: FieldElem, e: u64| f.pow(x, e);
    let neg = |x: FieldElem| f.neg(x);
    let sum = |xs: &[FieldElem]| xs.iter().fold(f.zero(), |acc, &x| f.add(acc, x));

    let table = |g1: &[(u8, u64, FieldElem)], g2: &[(u8, u64, FieldElem)]| {
        let build = |terms: &[(u8, u64, FieldElem)]| {
            terms
                .iter()
                .fold(BivarPoly::new(), |g, &(dy, dz, c)| g.with(f, dy, dz, c))
        };
        ComponentTable {
            g1: build(g1),
            g2: build(g2),
        }
    };

    if tower.kind() == CharKind::Even {
        // 3.19
        let b2 = mul(&[b, b]);
        let g1z = sum(&[mul(&[b2, u]), b2, mul(&[d, u])]);
        let g2z = sum(&[b2, c, d]);
        return Ok(table(
            &[(1, 0, c), (0, 3, f.one()), (0, 1, g1z)],
            &[(1, 0, d), (0, 2, b), (0, 1, g2z)],
        ));
    }

    let half = tower.half().expect("odd tower");
    let g = c;
    let u2 = pw(u, 2);
    let u3 = pw(u, 3);
    let a2 = pw(a, 2);
    let a3 = pw(a, 3);
    let a4 = pw(a, 4);
    let a5 = pw(a, 5);
    let g_half = mul(&[g, half]);
    let two_g = f.add(g, g);

    use TheoremId::*;
    Ok(match id {
        T3_1 => table(
            &[
                (1, 0, c),
                (0, 2, neg(mul(&[u, a]))),
                (0, 1, neg(mul(&[u, d, half]))),
            ],
            &[
                (1, 0, d),
                (0, 3, neg(u)),
                (0, 1, f.sub(a2, mul(&[c, half]))),
            ],
        ),
        T3_4 => table(
            &[
                (1, 0, c),
                (0, 2, neg(mul(&[k(2), a, u]))),
                (0, 1, neg(mul(&[u, d, half]))),
            ],
            &[(1, 0, d), (0, 1, neg(mul(&[c, half])))],
        ),
        T3_5 => table(
            &[
                (1, 0, c),
                (0, 4, mul(&[k(2), a, u2])),
                (0, 2, mul(&[k(12), a3, u])),
                (0, 1, neg(mul(&[u, d, half]))),
            ],
            &[
                (1, 0, d),
                (0, 3, mul(&[k(8), a2, u])),
                (0, 1, f.sub(mul(&[k(8), a4]), mul(&[c, half]))),
            ],
        ),
        T3_6 => {
            let s = f.add(mul(&[k(2), a2]), f.one());
            table(
                &[
                    (1, 0, g),
                    (0, 4, mul(&[a, u2])),
                    (0, 2, neg(mul(&[a, u, s]))),
                ],
                &[
                    (0, 5, neg(u2)),
                    (0, 3, mul(&[s, u])),
                    (0, 1, neg(sum(&[a4, a2, g_half]))),
                ],
            )
        }
        T3_7 => table(
            &[
                (1, 0, g),
                (0, 4, mul(&[a, u2])),
                (0, 2, mul(&[f.sub(f.one(), mul(&[k(2), a3])), u])),
            ],
            &[
                (0, 5, u2),
                (0, 3, neg(mul(&[k(2), u, a2]))),
                (0, 1, f.sub(f.sub(a4, mul(&[k(2), a])), g_half)),
            ],
        ),
        T3_8 => table(
            &[
                (1, 0, g),
                (0, 4, neg(mul(&[k(6), a2, u2]))),
                (0, 2, mul(&[k(4), a4, u])),
            ],
            &[
                (0, 5, neg(mul(&[k(2), a, u2]))),
                (0, 3, neg(mul(&[k(4), a3, u]))),
                (0, 1, f.sub(mul(&[k(6), a5]), g_half)),
            ],
        ),
        T3_9 => table(
            &[
                (1, 0, g),
                (0, 6, u3),
                (0, 4, neg(mul(&[a2, u2]))),
                (0, 2, neg(mul(&[a4, u]))),
            ],
            &[
                (0, 5, mul(&[k(2), a, u2])),
                (0, 3, neg(mul(&[k(4), a3, u]))),
                (0, 1, f.sub(f.sub(mul(&[k(2), a5]), f.one()), g_half)),
            ],
        ),
        // Taken from the expanded line of the derivation, whose α-part carries
        // an overall minus sign.
        T3_10 => table(
            &[
                (1, 0, g),
                (0, 4, mul(&[k(6), a, u2])),
                (0, 2, mul(&[k(8), a3, u])),
            ],
            &[
                (0, 3, neg(mul(&[k(12), a2, u]))),
                (0, 1, neg(f.add(mul(&[k(4), a4]), g_half))),
            ],
        ),
        T3_11 => table(
            &[
                (1, 0, g),
                (0, 6, u3),
                (0, 4, neg(mul(&[a2, u2]))),
                (0, 2, mul(&[f.sub(f.one(), a4), u])),
            ],
            &[
                (0, 5, mul(&[k(2), a, u2])),
                (0, 3, neg(mul(&[k(4), a3, u]))),
                (
                    0,
                    1,
                    f.sub(f.sub(mul(&[k(2), a5]), mul(&[k(2), a])), g_half),
                ),
            ],
        ),
        T3_12 => table(
            &[
                (1, 0, g),
                (0, 6, neg(u3)),
                (0, 4, neg(mul(&[k(5), a2, u2]))),
                (0, 2, mul(&[f.add(mul(&[k(5), a4]), f.one()), u])),
            ],
            &[
                (0, 5, neg(mul(&[k(4), a, u2]))),
                (
                    0,
                    1,
                    f.sub(f.sub(mul(&[k(4), a5]), mul(&[k(2), a])), g_half),
                ),
            ],
        ),
        T3_13 => {
            let i = i.ok_or(Error::MissingParam("i"))?;
            let pi = f.p().pow(i);
            table(
                &[(1, 0, two_g), (0, pi + 1, neg(pw(u, (pi + 1) / 2)))],
                &[
                    (0, pi, mul(&[a, pw(u, (pi - 1) / 2)])),
                    (0, 1, neg(pw(a, pi))),
                ],
            )
        }
        T3_14 => table(
            &[(1, 0, two_g), (0, 2, neg(mul(&[a, u])))],
            &[(0, 3, neg(u)), (0, 1, a2)],
        ),
        T3_15 => table(
            &[
                (1, 0, two_g),
                (0, 4, mul(&[a, u2])),
                (0, 2, neg(mul(&[k(2), a3, u]))),
            ],
            &[
                (0, 5, neg(u2)),
                (0, 3, mul(&[k(2), a2, u])),
                (0, 1, neg(a4)),
            ],
        ),
        // Expanded line of the derivation (`+u³z⁶`).
        T3_16 => table(
            &[
                (1, 0, two_g),
                (0, 6, u3),
                (0, 4, neg(mul(&[a2, u2]))),
                (0, 2, neg(mul(&[a4, u]))),
            ],
            &[
                (0, 5, neg(mul(&[k(2), a, u2]))),
                (0, 3, mul(&[k(4), a3, u])),
                (0, 1, neg(mul(&[k(2), a5]))),
            ],
        ),
        T3_17 => {
            let s = f.add(mul(&[k(2), a]), f.one());
            table(
                &[
                    (1, 0, two_g),
                    (0, 4, neg(u2)),
                    (0, 2, neg(mul(&[a, u]))),
                ],
                &[(0, 3, neg(mul(&[s, u]))), (0, 1, mul(&[s, a2]))],
            )
        }
        T3_18 => {
            let s = f.add(mul(&[k(2), a]), f.one());
            table(
                &[
                    (1, 0, two_g),
                    (0, 6, u3),
                    (0, 4, mul(&[a, u2, f.sub(f.one(), a)])),
                    (0, 2, neg(mul(&[a3, u, f.add(a, k(2))]))),
                ],
                &[
                    (0, 5, mul(&[s, u2])),
                    (0, 3, neg(mul(&[s, k(2), a2, u]))),
                    (0, 1, mul(&[s, a4])),
                ],
            )
        }
        T3_2 | T3_3 | T3_19 | T4_1 => unreachable!("filtered above"),
    })
}
