//! The quadratic extension `F_{q^2} = F_q(α)` with basis `{1, α}`.
//!
//! Odd characteristic uses `α² = u` with `u` the least non-square of `F_q`;
//! characteristic two uses `α² = α + u` with `u` the least element of absolute
//! trace one. In both cases `x^q` has a closed form in coordinates:
//! `c0 - c1 α` (odd) and `(c0 + c1) + c1 α` (even).

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Embedding, FieldCtx, FieldElem, SpecialKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CharKind {
    /// `α² = u`, `u` a non-square.
    Odd,
    /// `α² = α + u`, `Tr_2^q(u) = 1`.
    Even,
}

/// `c0 + c1 α`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TowerElem {
    pub c0: FieldElem,
    pub c1: FieldElem,
}

impl fmt::Debug for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TowerElem({self})")
    }
}

impl fmt::Display for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c0.is_zero(), self.c1.is_zero()) {
            (_, true) => write!(f, "{}", self.c0),
            (true, false) => write!(f, "({})α", self.c1),
            (false, false) => write!(f, "{} + ({})α", self.c0, self.c1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerCtx {
    base: FieldCtx,
    u: FieldElem,
    kind: CharKind,
    inv2: Option<FieldElem>,
}

/// Builds the canonical tower over `base`.
pub fn build_tower(base: &FieldCtx) -> Result<TowerCtx> {
    let (kind, special) = if base.p() == 2 {
        (CharKind::Even, SpecialKind::AbsTraceOne)
    } else {
        (CharKind::Odd, SpecialKind::NonSquare)
    };
    let u = base.find_special(special)?;
    TowerCtx::with_u(base, u).map(|t| {
        debug_assert_eq!(t.kind, kind);
        t
    })
}

impl TowerCtx {
    /// Tower with a caller-chosen `u`; rejects `u` that does not give a field.
    pub fn with_u(base: &FieldCtx, u: FieldElem) -> Result<Self> {
        if !base.contains(&u) {
            return Err(Error::MixedContexts);
        }
        let kind = if base.p() == 2 {
            if !base.trace(u, 2)?.is_one() {
                return Err(Error::Invalid(format!("Tr(u) != 1 for u = {u}")));
            }
            CharKind::Even
        } else {
            if base.is_square(u) {
                return Err(Error::Invalid(format!("u = {u} is a square")));
            }
            CharKind::Odd
        };
        let inv2 = match kind {
            CharKind::Odd => Some(base.inv(base.from_int(2))?),
            CharKind::Even => None,
        };
        let t = TowerCtx {
            base: base.clone(),
            u,
            kind,
            inv2,
        };
        if base.q() <= 256 {
            // Every nonzero element must have nonzero norm (hence an inverse).
            for c0 in base.elements() {
                for c1 in base.elements() {
                    let x = t.elem(c0, c1);
                    if x != t.zero() && t.norm(x).is_zero() {
                        return Err(Error::Invalid("tower is not a field".into()));
                    }
                }
            }
        }
        Ok(t)
    }

    /// Every admissible `u` for this base (non-squares, or trace-one elements).
    pub fn valid_us(base: &FieldCtx) -> Vec<FieldElem> {
        base.elements()
            .filter(|&u| {
                if base.p() == 2 {
                    base.trace(u, 2).map(|t| t.is_one()).unwrap_or(false)
                } else {
                    !base.is_square(u)
                }
            })
            .collect()
    }

    pub fn base(&self) -> &FieldCtx {
        &self.base
    }

    pub fn u(&self) -> FieldElem {
        self.u
    }

    pub fn kind(&self) -> CharKind {
        self.kind
    }

    /// Order of the base field.
    pub fn q(&self) -> u64 {
        self.base.q()
    }

    /// Order of the tower, `q²`.
    pub fn order(&self) -> u64 {
        self.base.q() * self.base.q()
    }

    /// `1/2` in the base field (odd characteristic only).
    pub fn half(&self) -> Option<FieldElem> {
        self.inv2
    }

    pub fn contains(&self, x: &TowerElem) -> bool {
        self.base.contains(&x.c0) && self.base.contains(&x.c1)
    }

    pub fn elem(&self, c0: FieldElem, c1: FieldElem) -> TowerElem {
        TowerElem { c0, c1 }
    }

    pub fn embed(&self, c: FieldElem) -> TowerElem {
        self.elem(c, self.base.zero())
    }

    pub fn zero(&self) -> TowerElem {
        self.embed(self.base.zero())
    }

    pub fn one(&self) -> TowerElem {
        self.embed(self.base.one())
    }

    pub fn alpha(&self) -> TowerElem {
        self.elem(self.base.zero(), self.base.one())
    }

    pub fn in_base(&self, x: TowerElem) -> bool {
        x.c1.is_zero()
    }

    /// `enc(c0) + q * enc(c1)`.
    pub fn encode(&self, x: TowerElem) -> u64 {
        x.c0.encode() + self.q() * x.c1.encode()
    }

    pub fn decode(&self, enc: u64) -> Result<TowerElem> {
        if enc >= self.order() {
            return Err(Error::Invalid(format!(
                "encoding {enc} out of range for F_{}",
                self.order()
            )));
        }
        Ok(self.decode_unchecked(enc))
    }

    pub(crate) fn decode_unchecked(&self, enc: u64) -> TowerElem {
        let q = self.q();
        self.elem(
            self.base.decode_unchecked(enc % q),
            self.base.decode_unchecked(enc / q),
        )
    }

    pub fn elements(&self) -> impl Iterator<Item = TowerElem> + '_ {
        (0..self.order()).map(move |e| self.decode_unchecked(e))
    }

    pub fn coords(&self, x: TowerElem) -> Result<(FieldElem, FieldElem)> {
        if !self.contains(&x) {
            return Err(Error::MixedContexts);
        }
        Ok((x.c0, x.c1))
    }

    pub fn from_coords(&self, c0: FieldElem, c1: FieldElem) -> Result<TowerElem> {
        let x = self.elem(c0, c1);
        if !self.contains(&x) {
            return Err(Error::MixedContexts);
        }
        Ok(x)
    }

    pub fn add(&self, x: TowerElem, y: TowerElem) -> TowerElem {
        let f = &self.base;
        self.elem(f.add(x.c0, y.c0), f.add(x.c1, y.c1))
    }

    pub fn sub(&self, x: TowerElem, y: TowerElem) -> TowerElem {
        let f = &self.base;
        self.elem(f.sub(x.c0, y.c0), f.sub(x.c1, y.c1))
    }

    pub fn neg(&self, x: TowerElem) -> TowerElem {
        let f = &self.base;
        self.elem(f.neg(x.c0), f.neg(x.c1))
    }

    /// Multiplication by a base-field scalar.
    pub fn scale(&self, c: FieldElem, x: TowerElem) -> TowerElem {
        let f = &self.base;
        self.elem(f.mul(c, x.c0), f.mul(c, x.c1))
    }

    pub fn mul(&self, x: TowerElem, y: TowerElem) -> TowerElem {
        let f = &self.base;
        let ac = f.mul(x.c0, y.c0);
        let bd = f.mul(x.c1, y.c1);
        let ad_bc = f.add(f.mul(x.c0, y.c1), f.mul(x.c1, y.c0));
        let c0 = f.add(ac, f.mul(self.u, bd));
        let c1 = match self.kind {
            CharKind::Odd => ad_bc,
            CharKind::Even => f.add(ad_bc, bd),
        };
        self.elem(c0, c1)
    }

    pub fn pow(&self, x: TowerElem, mut e: u64) -> TowerElem {
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

    /// `x^q` from the coordinate formula.
    pub fn frobenius(&self, x: TowerElem) -> TowerElem {
        let f = &self.base;
        match self.kind {
            CharKind::Odd => self.elem(x.c0, f.neg(x.c1)),
            CharKind::Even => self.elem(f.add(x.c0, x.c1), x.c1),
        }
    }

    /// `Tr_q^{q²}(x) = x + x^q`: `2 c0` (odd) or `c1` (even).
    pub fn trace(&self, x: TowerElem) -> FieldElem {
        let f = &self.base;
        match self.kind {
            CharKind::Odd => f.add(x.c0, x.c0),
            CharKind::Even => x.c1,
        }
    }

    /// `N_q^{q²}(x) = x^{q+1}`: `c0² - u c1²` (odd) or `c0² + c0 c1 + u c1²` (even).
    pub fn norm(&self, x: TowerElem) -> FieldElem {
        let f = &self.base;
        let uc1c1 = f.mul(self.u, f.mul(x.c1, x.c1));
        let c0c0 = f.mul(x.c0, x.c0);
        match self.kind {
            CharKind::Odd => f.sub(c0c0, uc1c1),
            CharKind::Even => f.add(f.add(c0c0, f.mul(x.c0, x.c1)), uc1c1),
        }
    }

    /// Inverse through the norm: `x^{-1} = x^q / N(x)`.
    pub fn inv(&self, x: TowerElem) -> Result<TowerElem> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ninv = self.base.inv(n)?;
        Ok(self.scale(ninv, self.frobenius(x)))
    }

    pub fn div(&self, x: TowerElem, y: TowerElem) -> Result<TowerElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Dual basis of `(b1, b2)` under the trace form `(x, y) -> Tr(xy)`.
    pub fn dual_basis(&self, b1: TowerElem, b2: TowerElem) -> Result<(TowerElem, TowerElem)> {
        let f = &self.base;
        if !self.contains(&b1) || !self.contains(&b2) {
            return Err(Error::MixedContexts);
        }
        let det = f.sub(f.mul(b1.c0, b2.c1), f.mul(b1.c1, b2.c0));
        if det.is_zero() {
            return Err(Error::DependentBasis);
        }
        let g11 = self.trace(self.mul(b1, b1));
        let g12 = self.trace(self.mul(b1, b2));
        let g22 = self.trace(self.mul(b2, b2));
        let gdet = f.sub(f.mul(g11, g22), f.mul(g12, g12));
        if gdet.is_zero() {
            return Err(Error::SingularGram);
        }
        let gi = f.inv(gdet)?;
        // G^{-1} = [[g22, -g12], [-g12, g11]] / det(G); row j gives dual j.
        let h11 = f.mul(g22, gi);
        let h12 = f.neg(f.mul(g12, gi));
        let h22 = f.mul(g11, gi);
        let d1 = self.add(self.scale(h11, b1), self.scale(h12, b2));
        let d2 = self.add(self.scale(h12, b1), self.scale(h22, b2));
        Ok((d1, d2))
    }

    /// The change of variable used in the component proofs.
    ///
    /// Odd: `x = y - (z - b) α / 2`, so `x^q - x + δ = a + z α`.
    /// Even: `x = y + (z + a) α`, so `x^q + x + δ = z + b α`.
    pub fn proof_substitution(&self, delta: TowerElem, y: FieldElem, z: FieldElem) -> TowerElem {
        let f = &self.base;
        match self.kind {
            CharKind::Odd => {
                let half = self.inv2.expect("odd towers carry 1/2");
                self.elem(y, f.neg(f.mul(f.sub(z, delta.c1), half)))
            }
            CharKind::Even => self.elem(y, f.add(z, delta.c0)),
        }
    }

    /// The proof's core term `x^q - x + δ` (odd) or `x^q + x + δ` (even).
    pub fn core_term(&self, x: TowerElem, delta: TowerElem) -> TowerElem {
        let xq = self.frobenius(x);
        match self.kind {
            CharKind::Odd => self.add(self.sub(xq, x), delta),
            CharKind::Even => self.add(self.add(xq, x), delta),
        }
    }

    /// Isomorphism onto the flat field `F_{p^{2m}}`.
    pub fn flat_isomorphism(&self, flat: &FieldCtx) -> Result<FlatIsomorphism> {
        if flat.p() != self.base.p() || flat.m() != 2 * self.base.m() {
            return Err(Error::MixedContexts);
        }
        let emb = Embedding::new(&self.base, flat)?;
        let u = emb.embed(self.u);
        let beta = flat
            .elements()
            .find(|&b| {
                let bb = flat.mul(b, b);
                match self.kind {
                    CharKind::Odd => bb == u,
                    CharKind::Even => flat.add(bb, b) == u,
                }
            })
            .ok_or_else(|| Error::Invalid("no image for α in the flat field".into()))?;
        Ok(FlatIsomorphism { emb, beta })
    }
}

/// `c0 + c1 α -> emb(c0) + emb(c1) β` with `β` a root of α's minimal polynomial.
#[derive(Clone, Debug)]
pub struct FlatIsomorphism {
    emb: Embedding,
    beta: FieldElem,
}

impl FlatIsomorphism {
    pub fn to_flat(&self, x: TowerElem) -> FieldElem {
        let f = self.emb.big();
        f.add(self.emb.embed(x.c0), f.mul(self.emb.embed(x.c1), self.beta))
    }

    pub fn embedding(&self) -> &Embedding {
        &self.emb
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;

    fn tower(p: u64, m: usize) -> TowerCtx {
        build_tower(&build_field(p, m).unwrap()).unwrap()
    }

    #[test]
    fn canonical_towers() {
        let t3 = tower(3, 1);
        assert_eq!(t3.u().encode(), 2);
        assert_eq!(t3.kind(), CharKind::Odd);
        let t2 = tower(2, 1);
        assert_eq!(t2.u().encode(), 1);
        assert_eq!(t2.kind(), CharKind::Even);
        let t4 = tower(2, 2);
        assert_eq!(t4.u().encode(), 2);
        let a = t4.alpha();
        assert_eq!(t4.mul(a, a), t4.add(a, t4.embed(t4.u())));
    }

    #[test]
    fn tower_is_a_field() {
        for (p, m) in [(3, 1), (5, 1), (2, 1), (2, 2), (3, 2), (7, 1), (2, 3)] {
            let t = tower(p, m);
            for x in t.elements().skip(1) {
                assert_eq!(t.mul(x, t.inv(x).unwrap()), t.one());
            }
            assert_eq!(t.inv(t.zero()), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn with_u_rejects_bad_u() {
        let f5 = build_field(5, 1).unwrap();
        assert!(TowerCtx::with_u(&f5, f5.from_int(4)).is_err());
        assert!(TowerCtx::with_u(&f5, f5.from_int(3)).is_ok());
        let f4 = build_field(2, 2).unwrap();
        assert!(TowerCtx::with_u(&f4, f4.one()).is_err());
        assert_eq!(TowerCtx::valid_us(&f4).len(), 2);
    }

    #[test]
    fn alpha_squared_and_frobenius() {
        let t = tower(5, 1);
        let a = t.alpha();
        assert_eq!(t.mul(a, a), t.embed(t.u()));
        let t4 = tower(2, 2);
        assert_eq!(t4.pow(t4.alpha(), 4), t4.add(t4.one(), t4.alpha()));
    }

    #[test]
    fn frobenius_closed_form_matches_power_odd() {
        for (p, m) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let t = tower(p, m);
            let q = t.q();
            for x in t.elements() {
                // q-fold multiplication is an independent route to x^q for tiny q
                let xq = if q <= 5 {
                    (1..q).fold(x, |acc, _| t.mul(acc, x))
                } else {
                    t.pow(x, q)
                };
                assert_eq!(xq, t.frobenius(x));
                assert_eq!(xq, t.elem(x.c0, t.base().neg(x.c1)));
            }
        }
    }

    #[test]
    fn frobenius_closed_form_matches_power_even() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (2, 4)] {
            let t = tower(p, m);
            let f = t.base();
            for x in t.elements() {
                assert_eq!(t.pow(x, t.q()), t.elem(f.add(x.c0, x.c1), x.c1));
            }
        }
    }

    #[test]
    fn coordinates() {
        let t = tower(3, 1);
        assert_eq!(
            t.coords(t.alpha()).unwrap(),
            (t.base().zero(), t.base().one())
        );
        let f = t.base();
        for c in f.elements() {
            assert_eq!(t.coords(t.embed(c)).unwrap(), (c, f.zero()));
        }
        for x in t.elements() {
            let (a, b) = t.coords(x).unwrap();
            assert_eq!(t.from_coords(a, b).unwrap(), x);
            assert_eq!(t.trace(x), f.add(a, a));
            assert_eq!(t.decode(t.encode(x)).unwrap(), x);
        }
        let other = build_field(5, 1).unwrap();
        assert_eq!(
            t.from_coords(other.one(), other.one()),
            Err(Error::MixedContexts)
        );
    }

    #[test]
    fn trace_and_norm_match_powers() {
        for (p, m) in [(3, 1), (5, 1), (2, 2), (2, 1), (3, 2)] {
            let t = tower(p, m);
            for x in t.elements() {
                assert_eq!(t.embed(t.trace(x)), t.add(x, t.pow(x, t.q())));
                assert_eq!(t.embed(t.norm(x)), t.pow(x, t.q() + 1));
            }
        }
    }

    #[test]
    fn tower_trace_norm_match_flat_field() {
        for (p, m) in [(3, 1), (3, 2), (5, 1), (2, 2)] {
            let t = tower(p, m);
            let flat = build_field(p, 2 * m).unwrap();
            let iso = t.flat_isomorphism(&flat).unwrap();
            let emb = iso.embedding();
            for x in t.elements() {
                let fx = iso.to_flat(x);
                let (tr, nm) = flat.trace_and_norm(fx, t.q()).unwrap();
                assert_eq!(tr, emb.embed(t.trace(x)));
                assert_eq!(nm, emb.embed(t.norm(x)));
                for y in t.elements().step_by(7) {
                    assert_eq!(iso.to_flat(t.mul(x, y)), flat.mul(fx, iso.to_flat(y)));
                }
            }
        }
    }

    fn trace_table(t: &TowerCtx, b: [TowerElem; 2], d: [TowerElem; 2]) -> [[FieldElem; 2]; 2] {
        let mut out = [[t.base().zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = t.trace(t.mul(b[i], d[j]));
            }
        }
        out
    }

    #[test]
    fn dual_basis_of_standard_basis_f9() {
        let t = tower(3, 1);
        let f = t.base();
        let (d1, d2) = t.dual_basis(t.one(), t.alpha()).unwrap();
        // Tr(1) = 2 and Tr(α²) = 2u = 1 with u = 2, so the duals are 2 and α.
        let table = trace_table(&t, [t.one(), t.alpha()], [d1, d2]);
        assert_eq!(table, [[f.one(), f.zero()], [f.zero(), f.one()]]);
        assert_eq!(d1, t.embed(f.from_int(2)));
        assert_eq!(d2, t.alpha());
    }

    #[test]
    fn dual_basis_properties() {
        for (p, m) in [(3, 1), (5, 1), (2, 2), (2, 1), (7, 1)] {
            let t = tower(p, m);
            let f = t.base();
            let elems: Vec<_> = t.elements().collect();
            for (k, &b1) in elems.iter().enumerate().step_by(3) {
                let b2 = elems[(k * 7 + 5) % elems.len()];
                let Ok((d1, d2)) = t.dual_basis(b1, b2) else {
                    assert_eq!(t.dual_basis(b1, b2), Err(Error::DependentBasis));
                    continue;
                };
                let table = trace_table(&t, [b1, b2], [d1, d2]);
                assert_eq!(table, [[f.one(), f.zero()], [f.zero(), f.one()]]);
                assert_eq!(t.dual_basis(d1, d2).unwrap(), (b1, b2));
                let lambda = f.from_int(2 % p as i64 + if p == 2 { 1 } else { 0 });
                let (s1, s2) = t.dual_basis(t.scale(lambda, b1), b2).unwrap();
                assert_eq!(s1, t.scale(f.inv(lambda).unwrap(), d1));
                assert_eq!(s2, d2);
            }
        }
        let t = tower(3, 1);
        assert_eq!(t.dual_basis(t.alpha(), t.alpha()), Err(Error::DependentBasis));
    }

    #[test]
    fn substitution_offset_point() {
        let t = tower(5, 1);
        let f = t.base();
        let delta = t.elem(f.from_int(3), f.from_int(4));
        let x = t.proof_substitution(delta, f.zero(), delta.c1);
        assert_eq!(x, t.zero());
        assert_eq!(t.core_term(x, delta), delta);
    }

    #[test]
    fn substitution_identities_exhaustive() {
        for (p, m) in [(3, 1), (5, 1), (7, 1), (3, 2), (2, 1), (2, 2), (2, 3)] {
            let t = tower(p, m);
            let f = t.base();
            for delta in t.elements() {
                for y in f.elements() {
                    for z in f.elements() {
                        let x = t.proof_substitution(delta, y, z);
                        let core = t.sub(t.add(t.pow(x, t.q()), if t.kind() == CharKind::Odd {
                            t.neg(x)
                        } else {
                            x
                        }), t.neg(delta));
                        let expect = match t.kind() {
                            CharKind::Odd => t.elem(delta.c0, z),
                            CharKind::Even => t.elem(z, delta.c1),
                        };
                        assert_eq!(core, expect);
                    }
                }
            }
        }
    }
}
