//! Exhaustive sweeps of a theorem's parameter grid against the oracle.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{predict, TheoremParams};
use crate::error::{Error, Result};
use crate::families::{FamilySpec, TabulatedFamily, TheoremId};
use crate::gf::{build_field, max_q_from_env, FieldCtx};
use crate::oracle::{field_bijection, tower_bijection};
use crate::tower::{build_tower, TowerCtx, TowerElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaDomain {
    /// `F_q^*` inside the tower.
    FqStar,
    /// `F_{q^2}^*`.
    Fq2Star,
    /// All of `F_{q^d}` (trace form).
    Fqd,
}

impl GammaDomain {
    pub fn default_for(id: TheoremId) -> Self {
        if id.is_trace_form() {
            GammaDomain::Fqd
        } else if id.gamma_in_base() {
            GammaDomain::FqStar
        } else {
            GammaDomain::Fq2Star
        }
    }
}

impl std::str::FromStr for GammaDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fq_star" | "fq*" => Ok(GammaDomain::FqStar),
            "fq2_star" | "fq2*" => Ok(GammaDomain::Fq2Star),
            "fqd" => Ok(GammaDomain::Fqd),
            _ => Err(Error::Invalid(format!("unknown gamma domain `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub theorem: TheoremId,
    /// Characteristic and degree of `F_q`.
    pub p: u64,
    pub m: usize,
    pub gamma_domain: GammaDomain,
    /// `None` sweeps every `i` in `[1, m)` for 3.13.
    pub i: Option<u32>,
    /// Extension degree of the trace form.
    pub d: Option<u32>,
    /// Encoding of a non-canonical `u` for the tower.
    pub u: Option<u64>,
    pub workers: usize,
    /// Allows a γ-domain wider than the theorem's hypothesis.
    pub probe_hypotheses: bool,
}

impl SweepPlan {
    pub fn new(theorem: TheoremId, p: u64, m: usize) -> Self {
        SweepPlan {
            theorem,
            p,
            m,
            gamma_domain: GammaDomain::default_for(theorem),
            i: None,
            d: None,
            u: None,
            workers: 1,
            probe_hypotheses: false,
        }
    }

    fn validate(&self) -> Result<()> {
        let default = GammaDomain::default_for(self.theorem);
        if self.theorem.is_trace_form() != (self.gamma_domain == GammaDomain::Fqd) {
            return Err(Error::Invalid(format!(
                "gamma domain {:?} does not apply to {}",
                self.gamma_domain, self.theorem
            )));
        }
        if self.gamma_domain != default && !self.probe_hypotheses {
            return Err(Error::Invalid(format!(
                "gamma domain {:?} exceeds the hypothesis of {}; pass --probe-hypotheses",
                self.gamma_domain, self.theorem
            )));
        }
        if self.theorem.is_trace_form() && self.d.is_none() {
            return Err(Error::MissingParam("d"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theorem_id: TheoremId,
    pub p: u64,
    pub m: usize,
    pub q: u64,
    pub delta_enc: Option<u64>,
    pub gamma_enc: u64,
    pub i: Option<u32>,
    pub d: Option<u32>,
    pub predicted: bool,
    pub matched_case: String,
    pub oracle: bool,
    pub agree: bool,
}

impl SweepRecord {
    /// Whether `γ` lies outside the theorem's stated hypothesis.
    pub fn out_of_hypothesis(&self) -> bool {
        (self.gamma_enc == 0 && !self.theorem_id.is_trace_form())
            || (self.theorem_id.gamma_in_base() && self.gamma_enc >= self.q)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: u64,
    pub pp_count: u64,
    /// Disagreements inside the hypothesis; drives the exit code.
    pub disagreements: u64,
    pub out_of_hypothesis: u64,
    /// Oracle permutations found outside the hypothesis.
    pub out_of_hypothesis_pp: u64,
}

impl SweepSummary {
    pub fn of(records: &[SweepRecord]) -> Self {
        let mut s = SweepSummary::default();
        for r in records {
            s.total += 1;
            s.pp_count += r.oracle as u64;
            if r.out_of_hypothesis() {
                s.out_of_hypothesis += 1;
                s.out_of_hypothesis_pp += r.oracle as u64;
            } else if !r.agree {
                s.disagreements += 1;
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    Jsonl,
    Csv,
}

impl std::str::FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(RecordFormat::Jsonl),
            "csv" => Ok(RecordFormat::Csv),
            _ => Err(Error::Invalid(format!("unknown format `{s}`"))),
        }
    }
}

pub fn write_records<W: Write>(w: W, records: &[SweepRecord], format: RecordFormat) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    match format {
        RecordFormat::Jsonl => {
            let mut w = std::io::BufWriter::new(w);
            for r in records {
                serde_json::to_writer(&mut w, r).map_err(|e| Error::Io(e.to_string()))?;
                w.write_all(b"\n").map_err(io)?;
            }
            w.flush().map_err(io)
        }
        RecordFormat::Csv => {
            let mut w = csv::Writer::from_writer(w);
            for r in records {
                w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush().map_err(io)
        }
    }
}

pub fn read_jsonl(text: &str) -> Result<Vec<SweepRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Invalid(e.to_string())))
        .collect()
}

/// Tower for a plan, honouring a custom `u` and the field-size bound.
pub fn plan_tower(p: u64, m: usize, u: Option<u64>) -> Result<TowerCtx> {
    let base = build_field(p, m)?;
    check_domain(base.q().saturating_mul(base.q()))?;
    match u {
        None => build_tower(&base),
        Some(enc) => TowerCtx::with_u(&base, base.decode(enc)?),
    }
}

fn check_domain(size: u64) -> Result<()> {
    let limit = max_q_from_env();
    if size > limit {
        return Err(Error::DomainTooLarge { size, limit });
    }
    Ok(())
}

/// `F_{q^d}` for the trace form, with `q = p^m`.
pub fn trace_form_field(p: u64, m: usize, d: u32) -> Result<FieldCtx> {
    build_field(p, m * d as usize)
}

fn gammas(tower: &TowerCtx, domain: GammaDomain) -> Vec<TowerElem> {
    match domain {
        GammaDomain::FqStar => tower
            .base()
            .nonzero_elements()
            .map(|c| tower.embed(c))
            .collect(),
        _ => tower.elements().skip(1).collect(),
    }
}

pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRecord>> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    pool.install(|| {
        if plan.theorem.is_trace_form() {
            sweep_trace_form(plan)
        } else if plan.theorem == TheoremId::T3_13 && plan.i.is_none() {
            let mut out = Vec::new();
            for i in 1..plan.m as u32 {
                out.extend(sweep_tower(plan, Some(i))?);
            }
            Ok(out)
        } else {
            sweep_tower(plan, plan.i)
        }
    })
}

/// Splits `0..n` into `parts` contiguous ranges.
fn partitions(n: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.clamp(1, n.max(1));
    let chunk = n.div_ceil(parts);
    (0..parts)
        .map(|k| (k * chunk).min(n)..((k + 1) * chunk).min(n))
        .filter(|r| !r.is_empty())
        .collect()
}

fn sweep_tower(plan: &SweepPlan, i: Option<u32>) -> Result<Vec<SweepRecord>> {
    let tower = plan_tower(plan.p, plan.m, plan.u)?;
    let id = plan.theorem;
    let terms = id.terms(i)?;
    let tab = TabulatedFamily::new(&tower, &terms, id.linear_kind())?;
    let gammas = gammas(&tower, plan.gamma_domain);
    let deltas: Vec<TowerElem> = tower.elements().collect();
    let chunks: Vec<Result<Vec<SweepRecord>>> = partitions(deltas.len(), plan.workers)
        .into_par_iter()
        .map(|range| {
            let mut out = Vec::with_capacity(range.len() * gammas.len());
            for &delta in &deltas[range] {
                for &gamma in &gammas {
                    let v = predict(&TheoremParams::Tower {
                        theorem: id,
                        tower: &tower,
                        delta,
                        gamma,
                        i,
                    })?;
                    let oracle = tab.oracle(delta, gamma).is_permutation;
                    out.push(SweepRecord {
                        theorem_id: id,
                        p: plan.p,
                        m: plan.m,
                        q: tower.q(),
                        delta_enc: Some(tower.encode(delta)),
                        gamma_enc: tower.encode(gamma),
                        i,
                        d: None,
                        predicted: v.predicted,
                        matched_case: v.matched_case,
                        oracle,
                        agree: v.predicted == oracle,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

fn sweep_trace_form(plan: &SweepPlan) -> Result<Vec<SweepRecord>> {
    let d = plan.d.ok_or(Error::MissingParam("d"))?;
    let field = trace_form_field(plan.p, plan.m, d)?;
    check_domain(field.q())?;
    let q = plan.p.pow(plan.m as u32);
    let gammas: Vec<_> = field.elements().collect();
    let chunks: Vec<Result<Vec<SweepRecord>>> = partitions(gammas.len(), plan.workers)
        .into_par_iter()
        .map(|range| {
            gammas[range]
                .iter()
                .map(|&gamma| {
                    let v = predict(&TheoremParams::TraceForm {
                        field: &field,
                        d,
                        gamma,
                    })?;
                    let spec = FamilySpec::TraceForm { d, gamma };
                    let oracle =
                        field_bijection(&field, spec.flat_evaluator(&field)?)?.is_permutation;
                    Ok(SweepRecord {
                        theorem_id: TheoremId::T4_1,
                        p: plan.p,
                        m: plan.m,
                        q,
                        delta_enc: None,
                        gamma_enc: gamma.encode(),
                        i: None,
                        d: Some(d),
                        predicted: v.predicted,
                        matched_case: v.matched_case,
                        oracle,
                        agree: v.predicted == oracle,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// One parameter point through the direct (non-tabulated) evaluator.
pub fn check_point(
    id: TheoremId,
    tower: &TowerCtx,
    delta: TowerElem,
    gamma: TowerElem,
    i: Option<u32>,
) -> Result<(crate::criteria::Verdict, SweepRecord)> {
    let v = predict(&TheoremParams::Tower {
        theorem: id,
        tower,
        delta,
        gamma,
        i,
    })?;
    let spec = FamilySpec::for_theorem(id, tower, delta, gamma, i)?;
    let oracle = tower_bijection(tower, spec.tower_evaluator(tower)?)?.is_permutation;
    let f = tower.base();
    let rec = SweepRecord {
        theorem_id: id,
        p: f.p(),
        m: f.m(),
        q: f.q(),
        delta_enc: Some(tower.encode(delta)),
        gamma_enc: tower.encode(gamma),
        i,
        d: None,
        predicted: v.predicted,
        matched_case: v.matched_case.clone(),
        oracle,
        agree: v.predicted == oracle,
    };
    Ok((v, rec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t32_sweep_at_q5_agrees() {
        let plan = SweepPlan::new(TheoremId::T3_2, 5, 1);
        let recs = run_sweep(&plan).unwrap();
        let s = SweepSummary::of(&recs);
        assert_eq!(s.total, 25 * 24);
        assert_eq!(s.disagreements, 0);
    }

    #[test]
    fn order_is_independent_of_workers() {
        let mut plan = SweepPlan::new(TheoremId::T3_7, 7, 1);
        let one = run_sweep(&plan).unwrap();
        plan.workers = 5;
        assert_eq!(run_sweep(&plan).unwrap(), one);
        let keys: Vec<_> = one.iter().map(|r| (r.delta_enc, r.gamma_enc)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn probe_requires_flag() {
        let mut plan = SweepPlan::new(TheoremId::T3_8, 3, 1);
        plan.gamma_domain = GammaDomain::Fq2Star;
        assert!(matches!(run_sweep(&plan), Err(Error::Invalid(_))));
        plan.probe_hypotheses = true;
        let recs = run_sweep(&plan).unwrap();
        let s = SweepSummary::of(&recs);
        assert_eq!(s.out_of_hypothesis, 9 * 6);
        assert_eq!(s.total, 9 * 8);
    }

    #[test]
    fn trace_form_sweep() {
        let mut plan = SweepPlan::new(TheoremId::T4_1, 2, 2);
        plan.d = Some(1);
        let recs = run_sweep(&plan).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.agree));
    }

    #[test]
    fn check_point_agrees_with_sweep() {
        let plan = SweepPlan::new(TheoremId::T3_4, 3, 1);
        let recs = run_sweep(&plan).unwrap();
        let t = plan_tower(3, 1, None).unwrap();
        for r in recs.iter().step_by(5) {
            let delta = t.decode(r.delta_enc.unwrap()).unwrap();
            let gamma = t.decode(r.gamma_enc).unwrap();
            let (_, rec) = check_point(TheoremId::T3_4, &t, delta, gamma, None).unwrap();
            assert_eq!(&rec, r);
        }
    }

    #[test]
    fn record_round_trip() {
        let recs = run_sweep(&SweepPlan::new(TheoremId::T3_14, 3, 1)).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &recs, RecordFormat::Jsonl).unwrap();
        let back = read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, recs);
        let mut csv_buf = Vec::new();
        write_records(&mut csv_buf, &recs, RecordFormat::Csv).unwrap();
        let text = String::from_utf8(csv_buf).unwrap();
        assert!(text.starts_with("theorem_id,p,m,q,delta_enc,gamma_enc,i,d,predicted"));
        assert_eq!(text.lines().count(), recs.len() + 1);
    }
}
