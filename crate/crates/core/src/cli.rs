//! The `ppkit` command line.
//!
//! Exit codes: 0 agreement, 2 disagreement, 64 usage, 65 domain, 66 i/o.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use crate::criteria::{predict, TheoremParams};
use crate::decompose::lemma31_extract;
use crate::directions::{
    check_complementarity, direction_set_on, field_table, tower_table, DirectionReport,
};
use crate::error::Error;
use crate::families::{
    closed_form_components, DeltaPowerSpec, Exponent, FamilySpec, LinearKind, TheoremId,
};
use crate::gf::{build_field, max_q_from_env};
use crate::oracle::field_bijection;
use crate::sweep::{
    check_point, plan_tower, run_sweep, trace_form_field, write_records, GammaDomain,
    RecordFormat, SweepPlan, SweepRecord, SweepSummary,
};
use crate::tower::{CharKind, TowerCtx, TowerElem};

pub const EXIT_AGREE: i32 = 0;
pub const EXIT_DISAGREE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DOMAIN: i32 = 65;
pub const EXIT_IO: i32 = 66;

#[derive(Parser, Debug)]
#[command(name = "ppkit", version, about = "Permutation-polynomial toolkit over F_q and F_{q^2}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the modulus, tower constant and sizes of F_{p^m}.
    FieldInfo(FieldArgs),
    /// Compare a theorem's prediction with the oracle at one parameter point.
    Check(CheckArgs),
    /// Sweep a theorem's full parameter grid.
    Sweep(SweepArgs),
    /// Extract (g1, g2) numerically and compare with the closed form.
    Decompose(DecomposeArgs),
    /// Direction set, permuting translates and their complementarity.
    Directions(DirectionsArgs),
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Degree of F_q over F_p.
    #[arg(long, default_value_t = 1)]
    m: usize,
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Encoding of δ in F_{q^2}.
    #[arg(long, conflicts_with = "trdelta")]
    delta: Option<u64>,
    /// Encoding of Tr(δ) in F_q; δ is taken in F_q (odd) or in F_q·α (even).
    #[arg(long)]
    trdelta: Option<u64>,
    /// Encoding of γ (in F_{q^2}, or F_{q^d} for 4.1).
    #[arg(long)]
    gamma: u64,
    /// Exponent index for 3.13.
    #[arg(long)]
    i: Option<u32>,
    /// Extension degree for 4.1.
    #[arg(long)]
    d: Option<u32>,
    /// Encoding of a non-canonical u.
    #[arg(long)]
    u: Option<u64>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    theorem: String,
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    u: Option<u64>,
    /// fq_star, fq2_star or fqd.
    #[arg(long)]
    gamma_domain: Option<String>,
    #[arg(long)]
    probe_hypotheses: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// Record file; records go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
    format: FormatArg,
    /// JSON file with plan fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    theorem: Option<String>,
    /// Comma-separated exponents such as `q+2,2q+1` (instead of --theorem).
    #[arg(long)]
    terms: Option<String>,
    /// `x` or `xq+x`, with --terms.
    #[arg(long, default_value = "x")]
    linear: String,
    #[arg(long, default_value_t = 0)]
    delta: u64,
    #[arg(long, default_value_t = 0)]
    gamma: u64,
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    u: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Identity,
    Power,
    Random,
    Family,
}

#[derive(Args, Debug)]
struct DirectionsArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value_t = MapKind::Identity)]
    map: MapKind,
    /// Exponent for `--map power`.
    #[arg(long, default_value_t = 1)]
    exponent: u64,
    /// Seed for `--map random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Theorem for `--map family` (on F_{q^2}).
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long, default_value_t = 0)]
    delta: u64,
    #[arg(long, default_value_t = 0)]
    gamma: u64,
    #[arg(long)]
    i: Option<u32>,
    /// Also report D(f) with both arguments in F_p (flat maps) or F_q (families).
    #[arg(long)]
    restricted: bool,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e.to_string()))
    }
}

type CliResult = std::result::Result<i32, Failure>;

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::UnknownTheorem(_) | Error::MissingParam(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let res = match cli.command {
        Command::FieldInfo(a) => field_info(&a, out),
        Command::Check(a) => check(&a, out),
        Command::Sweep(a) => sweep(&a, out, err),
        Command::Decompose(a) => decompose(&a, out),
        Command::Directions(a) => directions(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn parse_theorem(s: &str) -> std::result::Result<TheoremId, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn field_info(a: &FieldArgs, out: &mut dyn Write) -> CliResult {
    let f = build_field(a.p, a.m)?;
    let info = json!({
        "p": f.p(),
        "m": f.m(),
        "q": f.q(),
        "modulus": f.modulus(),
        "max_q": max_q_from_env(),
    });
    writeln!(out, "F_{} = F_{}[t]/({})", f.q(), f.p(), poly_text(f.modulus()))?;
    let mut info = info;
    if f.q().checked_mul(f.q()).is_some_and(|s| s <= max_q_from_env()) {
        let t = crate::tower::build_tower(&f)?;
        let rel = match t.kind() {
            CharKind::Odd => "α² = u",
            CharKind::Even => "α² = α + u",
        };
        writeln!(out, "tower F_{}: {rel}, u = {} (encoding {})", t.order(), t.u(), t.u().encode())?;
        info["u"] = json!(t.u().encode());
        info["valid_u"] = json!(TowerCtx::valid_us(&f).iter().map(|u| u.encode()).collect::<Vec<_>>());
    }
    writeln!(out, "{info}")?;
    Ok(EXIT_AGREE)
}

fn poly_text(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{k}"),
        };
        terms.push(match (c, k) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    terms.join(" + ")
}

/// δ from either `--delta` or `--trdelta`.
fn resolve_delta(t: &TowerCtx, delta: Option<u64>, trdelta: Option<u64>) -> Result<TowerElem, Failure> {
    let f = t.base();
    match (delta, trdelta) {
        (Some(e), _) => Ok(t.decode(e)?),
        (None, Some(tr)) => {
            let tr = f.decode(tr)?;
            Ok(match t.kind() {
                CharKind::Odd => t.embed(f.mul(tr, t.half().expect("odd"))),
                CharKind::Even => t.elem(f.zero(), tr),
            })
        }
        (None, None) => Err(Failure::Usage("one of --delta or --trdelta is required".into())),
    }
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> CliResult {
    let id = parse_theorem(&a.theorem)?;
    let pt = &a.point;
    let rec = if id.is_trace_form() {
        let d = pt.d.ok_or(Error::MissingParam("d"))?;
        let field = trace_form_field(a.field.p, a.field.m, d)?;
        let gamma = field.decode(pt.gamma)?;
        let v = predict(&TheoremParams::TraceForm {
            field: &field,
            d,
            gamma,
        })?;
        let spec = FamilySpec::TraceForm { d, gamma };
        let oracle = field_bijection(&field, spec.flat_evaluator(&field)?)?.is_permutation;
        writeln!(out, "theorem 4.1 over F_{}: d = {d}, gamma = {gamma}", field.q())?;
        SweepRecord {
            theorem_id: id,
            p: a.field.p,
            m: a.field.m,
            q: a.field.p.pow(a.field.m as u32),
            delta_enc: None,
            gamma_enc: pt.gamma,
            i: None,
            d: Some(d),
            predicted: v.predicted,
            matched_case: v.matched_case,
            oracle,
            agree: v.predicted == oracle,
        }
    } else {
        let t = plan_tower(a.field.p, a.field.m, pt.u)?;
        let delta = resolve_delta(&t, pt.delta, pt.trdelta)?;
        let gamma = t.decode(pt.gamma)?;
        let (v, r) = check_point(id, &t, delta, gamma, pt.i)?;
        writeln!(
            out,
            "theorem {id} over F_{}: delta = {delta}, gamma = {gamma}, Tr(delta) = {}",
            t.order(),
            t.trace(delta)
        )?;
        if let Some(n) = &v.notes {
            writeln!(out, "note: {n}")?;
        }
        r
    };
    writeln!(out, "predicted: {} ({})", rec.predicted, rec.matched_case)?;
    writeln!(out, "oracle:    {}", rec.oracle)?;
    writeln!(out, "{}", if rec.agree { "agree" } else { "DISAGREE" })?;
    writeln!(out, "{}", serde_json::to_string(&rec).expect("record serializes"))?;
    Ok(if rec.agree { EXIT_AGREE } else { EXIT_DISAGREE })
}

/// Plan fields accepted from a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    theorem: Option<String>,
    p: Option<u64>,
    m: Option<usize>,
    gamma_domain: Option<String>,
    i: Option<u32>,
    d: Option<u32>,
    u: Option<u64>,
    workers: Option<usize>,
    probe_hypotheses: Option<bool>,
}

fn sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let file: PlanFile = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?
        }
        None => PlanFile::default(),
    };
    let theorem = a
        .theorem
        .clone()
        .or(file.theorem)
        .ok_or_else(|| Failure::Usage("--theorem is required".into()))?;
    let id = parse_theorem(&theorem)?;
    let p = a.p.or(file.p).ok_or_else(|| Failure::Usage("--p is required".into()))?;
    let m = a.m.or(file.m).unwrap_or(1);
    let mut plan = SweepPlan::new(id, p, m);
    plan.i = a.i.or(file.i);
    plan.d = a.d.or(file.d);
    plan.u = a.u.or(file.u);
    plan.workers = a.workers.or(file.workers).unwrap_or(1);
    plan.probe_hypotheses = a.probe_hypotheses || file.probe_hypotheses.unwrap_or(false);
    if let Some(g) = a.gamma_domain.clone().or(file.gamma_domain) {
        plan.gamma_domain = g.parse::<GammaDomain>().map_err(|e| Failure::Usage(e.to_string()))?;
        if plan.gamma_domain != GammaDomain::default_for(id) && !plan.probe_hypotheses {
            return Err(Failure::Usage(format!(
                "--gamma-domain {g} goes beyond the hypothesis of {id}; add --probe-hypotheses"
            )));
        }
    }
    let records = run_sweep(&plan)?;
    let format = match a.format {
        FormatArg::Jsonl => RecordFormat::Jsonl,
        FormatArg::Csv => RecordFormat::Csv,
    };
    let summary = SweepSummary::of(&records);
    match &a.out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            write_records(file, &records, format)?;
            writeln!(out, "{}", serde_json::to_string(&summary).expect("summary serializes"))?;
        }
        None => {
            write_records(&mut *out, &records, format)?;
            writeln!(err, "{}", serde_json::to_string(&summary).expect("summary serializes"))?;
        }
    }
    Ok(if summary.disagreements == 0 {
        EXIT_AGREE
    } else {
        EXIT_DISAGREE
    })
}

fn decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CliResult {
    let t = plan_tower(a.field.p, a.field.m, a.u)?;
    let delta = t.decode(a.delta)?;
    let gamma = t.decode(a.gamma)?;
    let (spec, id) = match (&a.theorem, &a.terms) {
        (Some(s), None) => {
            let id = parse_theorem(s)?;
            (FamilySpec::for_theorem(id, &t, delta, gamma, a.i)?, Some(id))
        }
        (None, Some(terms)) => {
            let terms = terms
                .split(',')
                .map(str::parse::<Exponent>)
                .collect::<Result<Vec<_>, _>>()?;
            let linear = match a.linear.as_str() {
                "x" => LinearKind::X,
                "xq+x" => LinearKind::XqPlusX,
                other => return Err(Failure::Usage(format!("unknown --linear `{other}`"))),
            };
            let s = DeltaPowerSpec {
                terms,
                delta,
                gamma,
                linear,
            };
            let spec = match t.kind() {
                CharKind::Odd => FamilySpec::DeltaPower(s),
                CharKind::Even => FamilySpec::EvenDeltaPower(s),
            };
            (spec, None)
        }
        _ => return Err(Failure::Usage("give exactly one of --theorem or --terms".into())),
    };
    let ex = lemma31_extract(&spec, &t)?;
    let f = t.base();
    let closed = match id {
        Some(id) => Some(closed_form_components(id, &t, delta, gamma, a.i)?),
        None => None,
    };
    let verdict = closed.as_ref().map(|c| if ex.matches(f, c) { "match" } else { "mismatch" });
    if a.format.is_some() {
        let obj = json!({
            "q": f.q(),
            "extracted": ex.coefficients().ok().map(|c| c.to_record()),
            "closed_form": closed.as_ref().map(|c| c.to_record()),
            "verdict": verdict,
        });
        writeln!(out, "{obj}")?;
    } else {
        writeln!(out, "family over F_{}: delta = {delta}, gamma = {gamma}", t.order())?;
        match ex.coefficients() {
            Ok(c) => {
                writeln!(out, "extracted   g1 = {}", c.g1)?;
                writeln!(out, "extracted   g2 = {}", c.g2)?;
            }
            Err(e) => writeln!(out, "extracted: value map over {} points ({e})", f.q() * f.q())?,
        }
        if let Some(c) = &closed {
            writeln!(out, "closed form g1 = {}", c.g1)?;
            writeln!(out, "closed form g2 = {}", c.g2)?;
        }
        if let Some(v) = verdict {
            writeln!(out, "verdict: {v}")?;
        }
    }
    Ok(match verdict {
        Some("mismatch") => EXIT_DISAGREE,
        _ => EXIT_AGREE,
    })
}

fn directions(a: &DirectionsArgs, out: &mut dyn Write) -> CliResult {
    let report: DirectionReport;
    let mut restricted = None;
    let size;
    if a.map == MapKind::Family {
        let id = parse_theorem(
            a.theorem
                .as_deref()
                .ok_or_else(|| Failure::Usage("--map family needs --theorem".into()))?,
        )?;
        let t = plan_tower(a.field.p, a.field.m, None)?;
        let spec = FamilySpec::for_theorem(id, &t, t.decode(a.delta)?, t.decode(a.gamma)?, a.i)?;
        let table = tower_table(&t, spec.tower_evaluator(&t)?);
        report = check_complementarity(&t, &table)?;
        if a.restricted {
            let sub: Vec<u64> = (0..t.q()).collect();
            restricted = Some(direction_set_on(&t, &table, &sub)?);
        }
        size = t.order();
    } else {
        let f = build_field(a.field.p, a.field.m)?;
        let table = match a.map {
            MapKind::Identity => field_table(&f, |x| x),
            MapKind::Power => field_table(&f, |x| f.pow(x, a.exponent)),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                (0..f.q()).map(|_| rng.gen_range(0..f.q())).collect()
            }
        };
        report = check_complementarity(&f, &table)?;
        if a.restricted {
            let sub: Vec<u64> = f
                .elements()
                .filter(|&x| x.coeffs()[1..].iter().all(|&c| c == 0))
                .map(|x| x.encode())
                .collect();
            restricted = Some(direction_set_on(&f, &table, &sub)?);
        }
        size = f.q();
    }
    writeln!(
        out,
        "|D| = {}, |P| = {}, field size {size}, complementary: {}",
        report.directions.len(),
        report.permuting_gammas.len(),
        report.complementary
    )?;
    let mut obj = serde_json::to_value(&report).expect("report serializes");
    if let Some(r) = restricted {
        writeln!(out, "|D restricted| = {}", r.len())?;
        obj["restricted_directions"] = json!(r);
    }
    writeln!(out, "{obj}")?;
    Ok(if report.complementary {
        EXIT_AGREE
    } else {
        EXIT_DISAGREE
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ppkit").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn check_examples() {
        let (code, out, _) = run_str(&[
            "check", "--theorem", "3.6", "--p", "13", "--m", "1", "--trdelta", "0", "--gamma", "6",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("predicted: true (3.6(ii))"));
        let (code, out, _) = run_str(&[
            "check", "--theorem", "4.1", "--p", "2", "--m", "2", "--d", "3", "--gamma", "0",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("oracle:    true"));
        let (code, out, _) = run_str(&[
            "check", "--theorem", "3.13", "--p", "3", "--m", "2", "--i", "1", "--delta", "0",
            "--gamma", "1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("predicted: false") && out.contains("oracle:    false"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["check", "--theorem", "3.1"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["check", "--theorem", "9.9", "--p", "3", "--delta", "0", "--gamma", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_str(&["check", "--theorem", "3.1", "--p", "4", "--delta", "0", "--gamma", "1"]).0,
            EXIT_DOMAIN
        );
        assert_eq!(
            run_str(&["check", "--theorem", "3.1", "--p", "3", "--delta", "99", "--gamma", "1"]).0,
            EXIT_DOMAIN
        );
        assert_eq!(
            run_str(&["sweep", "--theorem", "3.2", "--p", "3", "--out", "/nonexistent/dir/x.jsonl"]).0,
            EXIT_IO
        );
        assert_eq!(
            run_str(&["sweep", "--theorem", "3.8", "--p", "3", "--gamma-domain", "fq2_star"]).0,
            EXIT_USAGE
        );
        // 3.9(ii) disagrees with the oracle at q = 7
        assert_eq!(run_str(&["sweep", "--theorem", "3.9", "--p", "7"]).0, EXIT_DISAGREE);
    }

    #[test]
    fn decompose_examples() {
        let (code, out, _) = run_str(&[
            "decompose", "--theorem", "3.1", "--p", "7", "--delta", "1", "--gamma", "1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict: match"));
        let (code, out, _) = run_str(&["decompose", "--terms", "1", "--p", "7"]);
        assert_eq!(code, 0);
        assert!(out.contains("extracted   g2 = z"), "{out}");
    }

    #[test]
    fn directions_identity() {
        let (code, out, _) = run_str(&["directions", "--p", "5"]);
        assert_eq!(code, 0);
        assert!(out.contains("|D| = 1, |P| = 4"));
    }
}
