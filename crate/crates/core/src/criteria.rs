//! Theorem-statement predicates, normalized cubic/quintic permutation tests and
//! the trace reductions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::TheoremId;
use crate::gf::{Embedding, FieldCtx, FieldElem};
use crate::tower::{CharKind, TowerCtx, TowerElem};

pub const HYPOTHESIS_VIOLATED: &str = "hypothesis-violated";

#[derive(Clone, Copy, Debug)]
pub enum TheoremParams<'a> {
    /// Every theorem on the quadratic tower.
    Tower {
        theorem: TheoremId,
        tower: &'a TowerCtx,
        delta: TowerElem,
        gamma: TowerElem,
        i: Option<u32>,
    },
    /// The trace form over `F_{q^d}`, `field` being `F_{q^d}`.
    TraceForm {
        field: &'a FieldCtx,
        d: u32,
        gamma: FieldElem,
    },
}

impl TheoremParams<'_> {
    pub fn theorem(&self) -> TheoremId {
        match self {
            TheoremParams::Tower { theorem, .. } => *theorem,
            TheoremParams::TraceForm { .. } => TheoremId::T4_1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub predicted: bool,
    pub matched_case: String,
    pub notes: Option<String>,
}

impl Verdict {
    fn from_cases(cases: &[(&'static str, bool)]) -> Self {
        match cases.iter().find(|c| c.1) {
            Some((label, _)) => Verdict {
                predicted: true,
                matched_case: (*label).to_string(),
                notes: None,
            },
            None => Verdict::none(None),
        }
    }

    fn none(notes: Option<&str>) -> Self {
        Verdict {
            predicted: false,
            matched_case: "none".into(),
            notes: notes.map(str::to_string),
        }
    }

    pub fn hypothesis_violated(&self) -> bool {
        self.notes.as_deref() == Some(HYPOTHESIS_VIOLATED)
    }
}

/// Does `z^3 - cz` permute `F_q`?
pub fn cubic_norm_pp(field: &FieldCtx, c: FieldElem) -> Result<bool> {
    if field.p() == 2 {
        return Err(Error::WrongCharacteristic("cubic form needs odd q"));
    }
    let q = field.q();
    Ok((q % 3 == 0 && !field.is_square(c)) || (q % 3 != 1 && c.is_zero()))
}

/// Does `z^5 + A z^3 + B z` permute `F_q`?
pub fn quintic_norm_pp(field: &FieldCtx, a: FieldElem, b: FieldElem) -> Result<bool> {
    if field.p() == 2 {
        return Err(Error::WrongCharacteristic("quintic form needs odd q"));
    }
    let q = field.q();
    let f = field;
    if q == 3 {
        // z^5 = z^3 = z on F_3
        return Ok(!f.add(f.add(f.one(), a), b).is_zero());
    }
    if q == 5 {
        // z^5 = z: A z^3 + (1 + B) z
        let lin = f.add(f.one(), b);
        return Ok(if a.is_zero() {
            !lin.is_zero()
        } else {
            cubic_norm_pp(f, f.neg(f.div(lin, a)?))?
        });
    }
    let five_divides = q % 5 == 0;
    let pm2 = q % 5 == 2 || q % 5 == 3;
    if a.is_zero() {
        return Ok((b.is_zero() && q % 5 != 1)
            || (five_divides && !f.is_fourth_power(f.neg(b)))
            || (q == 9 && f.mul(b, b) == f.from_int(2)));
    }
    let a2 = f.mul(a, a);
    Ok((pm2 && b == f.div(a2, f.from_int(5))?)
        || (q == 13 && !f.is_square(a) && b == f.mul(f.from_int(3), a2))
        || (five_divides
            && b == f.div(a2, f.from_int(4))?
            && !f.is_square(f.div(f.neg(a), f.from_int(2))?)))
}

/// `1/n` in a field where the theorem's congruence hypothesis rules out `p | n`.
fn inv_const(f: &FieldCtx, n: i64) -> FieldElem {
    assert!(
        n.rem_euclid(f.p() as i64) != 0,
        "constant {n} is not invertible in characteristic {}",
        f.p()
    );
    f.inv(f.from_int(n)).expect("checked above")
}

/// Every case of a theorem with whether it holds, in statement order.
pub fn evaluate_cases(params: &TheoremParams) -> Result<Vec<(&'static str, bool)>> {
    match *params {
        TheoremParams::TraceForm { field, d, gamma } => trace_form_cases(field, d, gamma),
        TheoremParams::Tower {
            theorem,
            tower,
            delta,
            gamma,
            i,
        } => tower_cases(theorem, tower, delta, gamma, i),
    }
}

/// The statement's verdict with the first matching case.
pub fn predict(params: &TheoremParams) -> Result<Verdict> {
    if let TheoremParams::Tower {
        theorem,
        tower,
        gamma,
        ..
    } = *params
    {
        if theorem.is_trace_form() {
            return Err(Error::KindContextMismatch);
        }
        if !tower.contains(&gamma) {
            return Err(Error::MixedContexts);
        }
        let in_base = tower.in_base(gamma);
        if gamma == tower.zero() || (theorem.gamma_in_base() && !in_base) {
            // still validate the remaining parameters
            evaluate_cases(params)?;
            return Ok(Verdict::none(Some(HYPOTHESIS_VIOLATED)));
        }
    }
    Ok(Verdict::from_cases(&evaluate_cases(params)?))
}

/// Re-evaluates one labelled case in isolation.
pub fn case_holds(params: &TheoremParams, label: &str) -> Result<bool> {
    evaluate_cases(params)?
        .into_iter()
        .find(|c| c.0 == label)
        .map(|c| c.1)
        .ok_or_else(|| Error::Invalid(format!("no case `{label}` for {}", params.theorem())))
}

fn trace_form_cases(field: &FieldCtx, d: u32, gamma: FieldElem) -> Result<Vec<(&'static str, bool)>> {
    if field.p() != 2 {
        return Err(Error::WrongCharacteristic("trace form needs characteristic two"));
    }
    if d == 0 || d % 2 == 0 || field.m() % d as usize != 0 {
        return Err(Error::Invalid(format!(
            "d = {d} must be odd and divide the degree {}",
            field.m()
        )));
    }
    if !field.contains(&gamma) {
        return Err(Error::MixedContexts);
    }
    let q = field.p().pow((field.m() / d as usize) as u32);
    let in_base = field.in_subfield(gamma, q)?;
    let holds = in_base && {
        let mut sub = field.elements().filter(|&t| field.in_subfield(t, q).unwrap());
        !sub.any(|t| {
            let t3 = field.pow(t, 3);
            field
                .add(field.add(field.mul(gamma, t3), field.mul(gamma, t)), field.one())
                .is_zero()
        })
    };
    Ok(vec![("4.1", holds)])
}

fn tower_cases(
    id: TheoremId,
    tower: &TowerCtx,
    delta: TowerElem,
    gamma: TowerElem,
    i: Option<u32>,
) -> Result<Vec<(&'static str, bool)>> {
    if id.is_trace_form() {
        return Err(Error::KindContextMismatch);
    }
    if id.even_characteristic() != (tower.kind() == CharKind::Even) {
        return Err(Error::WrongCharacteristic(
            "theorem and tower characteristic differ",
        ));
    }
    if !tower.contains(&delta) || !tower.contains(&gamma) {
        return Err(Error::MixedContexts);
    }
    let f = tower.base();
    let q = f.q();
    let m = f.m();
    let gb = tower.in_base(gamma);

    if tower.kind() == CharKind::Even {
        let u = tower.u();
        let b = delta.c1;
        let (c, d) = (gamma.c0, gamma.c1);
        let b2 = f.mul(b, b);
        let m_odd = m % 2 == 1;
        let e2 = f.add(f.add(f.mul(b2, u), b2), f.mul(d, u));
        let inner = f.add(
            f.mul(b2, f.add(f.add(c, d), f.mul(d, u))),
            f.add(f.add(f.mul(c, c), f.mul(c, d)), f.mul(f.mul(d, d), u)),
        );
        let e3 = f.add(f.mul(b2, f.mul(c, c)), f.mul(d, inner));
        return Ok(vec![
            ("3.19(i)", gb && (b.is_zero() || b2 == c)),
            ("3.19(ii)", !gb && c.is_zero() && e2.is_zero() && m_odd),
            ("3.19(iii)", !gb && !c.is_zero() && e3.is_zero() && m_odd),
        ]);
    }

    let k = |n: i64| f.from_int(n);
    let pw = |x: FieldElem, e: u64| f.pow(x, e);
    let t = tower.trace(delta);
    let t0 = t.is_zero();
    let a = f.mul(t, inv_const(f, 2));
    let g = gamma.c0;
    let trg = tower.trace(gamma);
    let ng = tower.norm(gamma);
    let three = q % 3 == 0;
    let two_mod3 = q % 3 == 2;
    let five = q % 5 == 0;
    let pm2 = q % 5 == 2 || q % 5 == 3;
    let fourth_or_nonsq = |x: FieldElem| f.is_fourth_power(x) || !f.is_square(x);

    use TheoremId::*;
    Ok(match id {
        T3_1 => vec![
            ("3.1(i)", gb && three && f.is_square(f.sub(pw(t, 2), trg))),
            ("3.1(ii)", gb && two_mod3 && pw(t, 2) == trg),
            ("3.1(iii)", !gb && t0 && trg.is_zero()),
            (
                "3.1(iv)",
                !gb && t0
                    && !trg.is_zero()
                    && three
                    && f.is_square(f.neg(f.div(ng, trg).unwrap_or(f.zero()))),
            ),
            (
                "3.1(v)",
                !gb && !t0
                    && !trg.is_zero()
                    && two_mod3
                    && pw(f.mul(t, trg), 2)
                        == f.mul(ng, f.add(pw(t, 2), f.mul(k(3), trg))),
            ),
        ],
        T3_2 => vec![(
            "3.2",
            gb && !f.sub(t, f.mul(trg, inv_const(f, 4))).is_zero(),
        )],
        T3_3 => vec![(
            "3.3",
            gb && !f.add(t, f.mul(trg, inv_const(f, 4))).is_zero(),
        )],
        T3_4 => vec![("3.4(i)", gb), ("3.4(ii)", !gb && t0)],
        T3_5 => vec![
            ("3.5(i)", t0),
            (
                "3.5(ii)",
                !t0 && gb
                    && three
                    && f.is_square(f.sub(f.mul(trg, inv_const(f, 2)), pw(t, 4))),
            ),
            (
                "3.5(iii)",
                !t0 && gb && two_mod3 && f.mul(k(2), pw(t, 4)) == trg,
            ),
        ],
        T3_6 => {
            let half = inv_const(f, 2);
            let a2 = pw(a, 2);
            let pairs13: [(i64, i64); 7] =
                [(0, 6), (1, 11), (-1, 11), (2, 4), (-2, 4), (5, 6), (-5, 6)];
            let s = f.mul(f.add(f.mul(k(2), a2), f.one()), half);
            let va = if five {
                f.mul(f.sub(f.one(), f.mul(k(2), g)), inv_const(f, 4))
            } else {
                f.zero()
            };
            vec![
                ("3.6(i)", q == 9 && (a == k(1) || a == k(-1)) && g == k(1)),
                (
                    "3.6(ii)",
                    q == 13 && pairs13.iter().any(|&(x, y)| a == k(x) && g == k(y)),
                ),
                ("3.6(iii)", q % 5 != 1 && a2 == f.neg(half) && g == half),
                (
                    "3.6(iv)",
                    pm2 && f.add(
                        f.add(f.mul(k(2), pw(a, 4)), f.mul(k(2), a2)),
                        f.mul(k(5), g),
                    ) == k(2),
                ),
                ("3.6(v)(a)", five && a2 == f.neg(half) && fourth_or_nonsq(va)),
                ("3.6(v)(b)", five && f.is_square(s) && f.mul(k(2), g) == k(1)),
            ]
        }
        T3_7 => vec![
            (
                "3.7(i)",
                five && t0 && fourth_or_nonsq(f.mul(g, inv_const(f, 2))),
            ),
            ("3.7(ii)", q == 9 && t0 && (g == k(1) || g == k(-1))),
            (
                "3.7(iii)",
                pm2 && !t0
                    && f.sub(f.sub(pw(t, 4), f.mul(k(80), t)), f.mul(k(40), g)).is_zero(),
            ),
            ("3.7(iv)", five && !t0 && f.add(g, f.mul(k(2), t)).is_zero()),
        ],
        T3_8 => vec![
            ("3.8(i)", t0),
            (
                "3.8(ii)",
                !t0 && pm2 && f.mul(k(40), g) == f.mul(k(19), pw(t, 5)),
            ),
            ("3.8(iii)", !t0 && five && f.mul(k(2), g) == pw(t, 5)),
        ],
        T3_9 => vec![
            ("3.9(i)", t0 && !f.add(g, k(2)).is_zero()),
            (
                "3.9(ii)",
                !t0 && pm2 && f.mul(k(5), g) == f.sub(pw(t, 2), k(10)),
            ),
            ("3.9(iii)", !t0 && five && g == k(3)),
        ],
        T3_10 => vec![
            ("3.10(i)", t0),
            ("3.10(ii)", !t0 && three && g != pw(t, 4)),
            (
                "3.10(iii)",
                !t0 && two_mod3 && g == f.neg(f.mul(pw(t, 4), inv_const(f, 2))),
            ),
        ],
        T3_11 => vec![
            ("3.11(i)", t0),
            (
                "3.11(ii)",
                !t0 && pm2
                    && g == f.sub(f.mul(pw(t, 5), inv_const(f, 40)), f.mul(k(2), t)),
            ),
            ("3.11(iii)", !t0 && five && g == f.neg(f.mul(k(2), t))),
        ],
        T3_12 => {
            let t5 = pw(t, 5);
            let ratio = if t0 {
                f.zero()
            } else {
                f.div(f.add(f.add(t5, f.mul(k(2), t)), g), t)?
            };
            vec![
                ("3.12(i)", t0),
                (
                    "3.12(ii)",
                    !t0 && q % 5 != 1
                        && g == f.sub(f.mul(t5, inv_const(f, 4)), f.mul(k(2), t)),
                ),
                ("3.12(iii)", !t0 && five && fourth_or_nonsq(ratio)),
                ("3.12(iv)", !t0 && q == 9 && (g == t5 || g == f.sub(t5, t))),
            ]
        }
        T3_13 => {
            let i = i.ok_or(Error::MissingParam("i"))?;
            if i == 0 || i as usize >= m {
                return Err(Error::Invalid(format!("i = {i} must satisfy 1 <= i < {m}")));
            }
            vec![("3.13", !t0)]
        }
        T3_14 => vec![("3.14(i)", three), ("3.14(ii)", two_mod3 && t0)],
        T3_15 => vec![
            ("3.15(i)", five),
            ("3.15(ii)", matches!(q % 5, 2..=4) && t0),
        ],
        T3_16 => vec![("3.16", five && !t0)],
        T3_17 => vec![
            ("3.17(i)", three && t != k(2)),
            ("3.17(ii)", two_mod3 && t0),
        ],
        T3_18 => vec![
            ("3.18(i)", five && t != k(-1)),
            ("3.18(ii)", matches!(q % 5, 2..=4) && t0),
        ],
        T3_19 | T4_1 => unreachable!("handled above"),
    })
}

/// Coefficients of `h` (index `k` is the coefficient of `x^{k+1}`) over the
/// subfield, with `h(x) = x + Σ Tr(a_i) x^i` after folding `i ≥ q`.
pub fn reduce_trace_composed(emb: &Embedding, g_coeffs: &[FieldElem]) -> Vec<FieldElem> {
    let (small, big) = (emb.small(), emb.big());
    let q = small.q();
    crate::families::reduce_trace_coeffs(big, g_coeffs, q)
        .into_iter()
        .map(|c| {
            let t = big.trace(c, q).expect("q is a subfield order");
            emb.restrict(t).expect("traces lie in the subfield")
        })
        .collect()
}

/// `x + Σ h_k x^{k+1}`.
pub fn eval_reduced_h(field: &FieldCtx, h: &[FieldElem], x: FieldElem) -> FieldElem {
    field.add(x, field.mul(x, field.eval_poly(h, x)))
}

/// `h(x) = Tr(δ) x^2 + (Tr(δ)^2 + c) x + δ^{q+1} Tr(δ)`, as `[h0, h1, h2]`.
pub fn t319_subfield_h(tower: &TowerCtx, delta: TowerElem, gamma: TowerElem) -> Result<Vec<FieldElem>> {
    if tower.kind() != CharKind::Even {
        return Err(Error::WrongCharacteristic("needs characteristic two"));
    }
    if !tower.contains(&delta) || !tower.contains(&gamma) {
        return Err(Error::MixedContexts);
    }
    if !tower.in_base(gamma) {
        return Err(Error::GammaNotInSubfield);
    }
    let f = tower.base();
    let t = tower.trace(delta);
    Ok(vec![
        f.mul(tower.norm(delta), t),
        f.add(f.mul(t, t), gamma.c0),
        t,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use crate::gf::build_field;
    use crate::oracle::{field_bijection, tower_bijection};
    use crate::tower::build_tower;

    fn brute_cubic(f: &FieldCtx, c: FieldElem) -> bool {
        field_bijection(f, |z| f.sub(f.pow(z, 3), f.mul(c, z)))
            .unwrap()
            .is_permutation
    }

    fn brute_quintic(f: &FieldCtx, a: FieldElem, b: FieldElem) -> bool {
        field_bijection(f, |z| {
            f.add(
                f.add(f.pow(z, 5), f.mul(a, f.pow(z, 3))),
                f.mul(b, z),
            )
        })
        .unwrap()
        .is_permutation
    }

    #[test]
    fn cubic_examples() {
        let f3 = build_field(3, 1).unwrap();
        assert!(cubic_norm_pp(&f3, f3.from_int(2)).unwrap());
        let f5 = build_field(5, 1).unwrap();
        assert!(cubic_norm_pp(&f5, f5.zero()).unwrap());
        let f7 = build_field(7, 1).unwrap();
        assert!(!cubic_norm_pp(&f7, f7.one()).unwrap());
        let f4 = build_field(2, 2).unwrap();
        assert!(matches!(
            cubic_norm_pp(&f4, f4.one()),
            Err(Error::WrongCharacteristic(_))
        ));
    }

    #[test]
    fn normalized_forms_match_brute_force() {
        for (p, m) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let f = build_field(p, m).unwrap();
            for a in f.elements() {
                assert_eq!(cubic_norm_pp(&f, a).unwrap(), brute_cubic(&f, a), "q={} c={a}", f.q());
                for b in f.elements() {
                    assert_eq!(
                        quintic_norm_pp(&f, a, b).unwrap(),
                        brute_quintic(&f, a, b),
                        "q={} A={a} B={b}",
                        f.q()
                    );
                }
            }
        }
    }

    #[test]
    fn cubic_spot_checks_q27() {
        let f = build_field(3, 3).unwrap();
        for c in f.elements().step_by(4) {
            assert_eq!(cubic_norm_pp(&f, c).unwrap(), brute_cubic(&f, c));
        }
    }

    #[test]
    fn quintic_examples() {
        let f7 = build_field(7, 1).unwrap();
        assert!(quintic_norm_pp(&f7, f7.zero(), f7.zero()).unwrap());
        let f11 = build_field(11, 1).unwrap();
        assert!(!quintic_norm_pp(&f11, f11.zero(), f11.zero()).unwrap());
        let f9 = build_field(3, 2).unwrap();
        let b = f9.elements().find(|&b| f9.mul(b, b) == f9.from_int(2)).unwrap();
        assert!(quintic_norm_pp(&f9, f9.zero(), b).unwrap());
    }

    fn tower_params<'a>(
        id: TheoremId,
        t: &'a TowerCtx,
        delta: TowerElem,
        gamma: TowerElem,
    ) -> TheoremParams<'a> {
        TheoremParams::Tower {
            theorem: id,
            tower: t,
            delta,
            gamma,
            i: None,
        }
    }

    #[test]
    fn predict_examples() {
        let t13 = build_tower(&build_field(13, 1).unwrap()).unwrap();
        let f = t13.base();
        let v = predict(&tower_params(
            TheoremId::T3_6,
            &t13,
            t13.zero(),
            t13.embed(f.from_int(6)),
        ))
        .unwrap();
        assert_eq!(v.matched_case, "3.6(ii)");
        assert!(v.predicted);

        let t5 = build_tower(&build_field(5, 1).unwrap()).unwrap();
        let v = predict(&tower_params(TheoremId::T3_2, &t5, t5.zero(), t5.one())).unwrap();
        assert!(v.predicted);
        let spec = FamilySpec::for_theorem(TheoremId::T3_2, &t5, t5.zero(), t5.one(), None).unwrap();
        let ev = spec.tower_evaluator(&t5).unwrap();
        assert!(tower_bijection(&t5, ev).unwrap().is_permutation);

        let t9 = build_tower(&build_field(3, 2).unwrap()).unwrap();
        let params = TheoremParams::Tower {
            theorem: TheoremId::T3_13,
            tower: &t9,
            delta: t9.alpha(),
            gamma: t9.one(),
            i: Some(1),
        };
        assert!(!predict(&params).unwrap().predicted);

        let f64 = build_field(2, 6).unwrap();
        let v = predict(&TheoremParams::TraceForm {
            field: &f64,
            d: 3,
            gamma: f64.one(),
        })
        .unwrap();
        assert!(v.predicted);
    }

    #[test]
    fn missing_and_bad_params() {
        let t9 = build_tower(&build_field(3, 2).unwrap()).unwrap();
        let mut params = TheoremParams::Tower {
            theorem: TheoremId::T3_13,
            tower: &t9,
            delta: t9.one(),
            gamma: t9.one(),
            i: None,
        };
        assert_eq!(predict(&params), Err(Error::MissingParam("i")));
        if let TheoremParams::Tower { i, .. } = &mut params {
            *i = Some(2);
        }
        assert!(matches!(predict(&params), Err(Error::Invalid(_))));
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let t = build_tower(&build_field(7, 1).unwrap()).unwrap();
        let v = predict(&tower_params(TheoremId::T3_8, &t, t.zero(), t.alpha())).unwrap();
        assert!(!v.predicted && v.hypothesis_violated());
        let v = predict(&tower_params(TheoremId::T3_1, &t, t.zero(), t.zero())).unwrap();
        assert!(v.hypothesis_violated());
        let v = predict(&tower_params(TheoremId::T3_1, &t, t.zero(), t.alpha())).unwrap();
        assert!(!v.hypothesis_violated());
    }

    #[test]
    fn matched_case_reproduces() {
        for (p, m) in [(3, 1), (5, 1), (3, 2), (13, 1)] {
            let t = build_tower(&build_field(p, m).unwrap()).unwrap();
            for id in TheoremId::ALL {
                if id.even_characteristic() || id == TheoremId::T3_13 {
                    continue;
                }
                for delta in t.elements().step_by(7) {
                    for gamma in t.elements().step_by(3) {
                        let params = tower_params(id, &t, delta, gamma);
                        let v = predict(&params).unwrap();
                        assert_eq!(v.predicted, v.matched_case != "none");
                        if v.predicted {
                            assert!(case_holds(&params, &v.matched_case).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prediction_ignores_b_coordinate() {
        for (p, m) in [(5, 1), (7, 1), (3, 2)] {
            let t = build_tower(&build_field(p, m).unwrap()).unwrap();
            let f = t.base();
            for id in TheoremId::ALL {
                if id.even_characteristic() || id == TheoremId::T3_13 {
                    continue;
                }
                for a in f.elements() {
                    for gamma in t.elements().step_by(2) {
                        let base = predict(&tower_params(id, &t, t.embed(a), gamma)).unwrap();
                        for b in f.elements() {
                            let v = predict(&tower_params(id, &t, t.elem(a, b), gamma)).unwrap();
                            assert_eq!(v, base);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trace_reduction_examples() {
        let f3 = build_field(3, 1).unwrap();
        let f9 = build_field(3, 2).unwrap();
        let emb = Embedding::new(&f3, &f9).unwrap();
        let zero = vec![f9.zero(); 2];
        assert_eq!(reduce_trace_composed(&emb, &zero), vec![f3.zero(); 2]);
        // an element of trace zero plays the role of α
        let alpha = f9
            .elements()
            .find(|&x| !x.is_zero() && f9.trace(x, 3).unwrap().is_zero())
            .unwrap();
        let h = reduce_trace_composed(&emb, &[alpha]);
        assert_eq!(h, vec![f3.zero(), f3.zero()]);
        let spec = FamilySpec::TraceComposed {
            n: 2,
            coeffs: vec![alpha],
        };
        let ev = spec.flat_evaluator(&f9).unwrap();
        assert!(field_bijection(&f9, ev).unwrap().is_permutation);
    }

    #[test]
    fn t319_diagram_commutes() {
        let t = build_tower(&build_field(2, 2).unwrap()).unwrap();
        let f = t.base();
        for delta in t.elements() {
            for c in f.nonzero_elements() {
                let gamma = t.embed(c);
                let h = t319_subfield_h(&t, delta, gamma).unwrap();
                let spec =
                    FamilySpec::for_theorem(TheoremId::T3_19, &t, delta, gamma, None).unwrap();
                let ev = spec.tower_evaluator(&t).unwrap();
                for x in t.elements() {
                    assert_eq!(t.trace(ev(x)), f.eval_poly(&h, t.trace(x)));
                }
                if delta.c1.is_zero() {
                    assert_eq!(h, vec![f.zero(), c, f.zero()]);
                }
            }
        }
        let t3 = build_tower(&build_field(3, 1).unwrap()).unwrap();
        assert!(matches!(
            t319_subfield_h(&t3, t3.zero(), t3.one()),
            Err(Error::WrongCharacteristic(_))
        ));
        assert_eq!(
            t319_subfield_h(&t, t.zero(), t.alpha()),
            Err(Error::GammaNotInSubfield)
        );
    }
}
